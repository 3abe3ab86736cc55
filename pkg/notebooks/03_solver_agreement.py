# %% [markdown]
# # Grid versus particles
#
# The finite-volume solver and the particle solver discretize the same
# dynamics in different ways.  Their `||rho||_inf` histories should approach
# each other under refinement, and the particle solver should keep each
# particle's ratio `G/rho` fixed.

# %%
from euler_alignment import harness as H

r = H.run_campaign(H.cross_validate_campaign(ladder=((64, 1e-2), (128, 1e-2), (256, 1e-2)), t_end=5.0))
print(r.to_text())

# %%
from euler_alignment import kernels as K
from euler_alignment import lagrangian as L
from euler_alignment import presets as P

kern = K.PowerLaw(0.5)
pre = P.sine_velocity(kern, 0.1)
s = L.seed_from_primitive(pre.rho0, pre.u0, kern, 128, du0=pre.du0)
res = L.integrate(s, kern, dt=1e-2, t_end=5.0)
print(f"ratio drift {res.max_ratio_drift:.2e}, momentum drift {res.series('momentum_drift').max():.2e}")
