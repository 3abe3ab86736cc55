import csv
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from euler_alignment import kernels as K
from euler_alignment import lagrangian as L
from euler_alignment import presets as P
from euler_alignment.errors import DegenerateStateError


def test_particle_grid_matches_cells():
    x = L.particle_grid(4)
    assert list(x) == [-0.25, 0.0, 0.25, 0.5]


def test_self_weight_power_law():
    n, a = 64, 0.5
    expect = n * 2.0 * (0.5 / n) ** (1 - a) / (1 - a)
    assert L.self_weight(K.PowerLaw(a), n) == pytest.approx(expect, rel=1e-14)


def test_single_particle_scalar_ode():
    # uniform velocity keeps the spacing, so conv is constant and each particle
    # obeys rho' = -rho (G - c), G' = -G (G - c)
    kern = K.PowerLaw(0.5)
    n = 32
    probe = L.seed_particles(1.0, 0.3, 0.0, n)
    c = float(L.rhs(probe, kern).conv[0])
    sysm = L.seed_particles(1.0, 0.3, 1.5 * c, n)
    res = L.integrate(sysm, kern, dt=1e-2, t_end=2.0)

    def f(t, y):
        rho, G = y
        return [-rho * (G - c), -G * (G - c)]

    ref = solve_ivp(f, (0.0, 2.0), [1.0, 1.5 * c], rtol=1e-12, atol=1e-14)
    assert res.final.rho[0] == pytest.approx(ref.y[0, -1], rel=1e-8)
    assert res.final.G[5] == pytest.approx(ref.y[1, -1], rel=1e-8)
    assert np.allclose(res.final.u, 0.3)


def test_zero_kernel_riccati_blowup_time():
    # G' = -G^2 and rho = rho0/(1 + G0 t): the particle at x = 0 hits rho = cap at (1 - 1/cap)/|G0|
    kern = K.zero_kernel()
    pre = P.sine_velocity(kern, -0.2)
    sysm = L.seed_from_primitive(pre.rho0, pre.u0, kern, 64, du0=pre.du0)
    res = L.integrate(sysm, kern, dt=1e-3, t_end=2.0, cap=1e6)
    G0 = 2.0 * math.pi * -0.2
    assert res.outcome == "BlowupDetected"
    assert res.event_time == pytest.approx((1.0 - 1e-6) / abs(G0), abs=2e-3)
    assert res.rejected_steps > 0


@pytest.mark.parametrize("kern", [K.PowerLaw(0.5), K.constant_kernel(1.0)], ids=["power", "const"])
def test_ratio_and_momentum_invariants(kern):
    pre = P.density_wave(kern, 0.3)
    sysm = L.seed_from_primitive(pre.rho0, lambda x: 0.1 * np.sin(2 * np.pi * x), kern, 128)
    res = L.integrate(sysm, kern, dt=1e-2, t_end=1.0)
    assert res.max_ratio_drift <= 1e-12
    assert res.series("momentum_drift").max() <= 1e-13


def test_flat_state_is_equilibrium():
    kern = K.PowerLaw(0.5)
    pre = P.flat(kern, mass=1.0, velocity=0.0)
    sysm = L.seed_from_primitive(pre.rho0, pre.u0, kern, 64, du0=pre.du0)
    res = L.integrate(sysm, kern, dt=1e-2, t_end=1.0)
    assert np.max(np.abs(res.final.rho - 1.0)) < 1e-12
    assert np.max(np.abs(res.final.u)) < 1e-14


def test_numerical_abort_below_dt_min():
    kern = K.zero_kernel()
    sysm = L.seed_particles(1.0, 0.0, -1000.0, 8)
    with pytest.raises(L.NumericalAbort):
        L.integrate(sysm, kern, dt=1e-2, t_end=1.0, dt_min=5e-3)


def test_collisions_are_counted():
    x = np.array([0.1, 0.1, 0.3, -0.2])
    psi, col = L.pair_matrix(x, K.PowerLaw(0.5))
    assert col == 1
    assert np.all(np.isfinite(psi))
    assert psi[0, 1] == pytest.approx(L.DISTANCE_FLOOR ** -0.5)


def test_massless_seed_rejected():
    with pytest.raises(DegenerateStateError):
        L.seed_particles(0.0, 0.0, 0.0, 8)


def test_trajectory_csv(tmp_path):
    kern = K.PowerLaw(0.5)
    pre = P.sine_velocity(kern, 0.1)
    sysm = L.seed_from_primitive(pre.rho0, pre.u0, kern, 8, du0=pre.du0)
    res = L.integrate(sysm, kern, dt=0.05, t_end=0.5, stride=2)
    res.trajectory_to_csv(tmp_path / "traj.csv")
    res.to_csv(tmp_path / "diag.csv")
    with open(tmp_path / "traj.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:5] == ["t", "x_0", "u_0", "rho_0", "G_0"]
    assert len(rows[0]) == 1 + 4 * 8
    assert len(rows) == 1 + 6  # t = 0, 0.1, ..., 0.5
    assert float(rows[-1][0]) == pytest.approx(0.5)
    with open(tmp_path / "diag.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == L.LAGRANGIAN_COLUMNS
    assert np.array_equal(np.array(rows[1:], dtype=float), np.array(res.rows))
