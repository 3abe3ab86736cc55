# %% [markdown]
# # When the density obeys a maximum principle
#
# If `C0 > ||psi||_1` no level set is needed and `beta = 0`: the density never
# exceeds its initial maximum.  On the torus `int G0 = M ||psi||_1`, so with a
# strictly positive density `C0 <= ||psi||_1` always.  The regime therefore
# needs a density with vacuum, and the surplus of `G0/rho0` on the support must
# be balanced by negative `G0` in the vacuum.

# %%
from euler_alignment import bounds as B
from euler_alignment import eulerian as E
from euler_alignment import kernels as K
from euler_alignment import presets as P

kern = K.constant_kernel(0.1)
pre = P.vacuum_bump(kern, ratio=1.1, width=0.5)
print(pre.notes)
rep = B.compute_bounds(B.BoundInputs(M=pre.M, C0=pre.C0, kernel=kern, rho0_sup=pre.rho0_sup))
print(f"C0 = {pre.C0:.3f} > ||psi||_1 = {kern.l1_norm():.3f}: beta = {rep.beta}, regime {rep.regime.value}")

# %%
d = E.run(E.SimConfig(N=512, t_end=10.0, order=2), pre.rho0, pre.u0, kern)
print(f"||rho0||_inf = {d.series('rho_inf')[0]:.4f}, max over t <= 10: {d.max_rho_inf:.4f}")
print(f"min G over the run (vacuum only): {d.min_G:.3f}")
