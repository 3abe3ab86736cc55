import csv
import math

import numpy as np
import pytest

from euler_alignment import eulerian as E
from euler_alignment import kernels as K
from euler_alignment import presets as P
from euler_alignment.errors import ConfigurationError, InputError, StepSizeError

TWO_PI = 2.0 * math.pi


def sine_cell_average(x, dx, shift=0.0):
    """Exact cell averages of 1 + 0.5 sin(2 pi (x - shift))."""
    a, b = x - shift - 0.5 * dx, x - shift + 0.5 * dx
    return 1.0 + 0.5 * (np.cos(TWO_PI * a) - np.cos(TWO_PI * b)) / (TWO_PI * dx)


def transport_error(N, order, T=0.5, c=1.0, cfl=0.4):
    x, dx = E.grid(N), 1.0 / N
    q = sine_cell_average(x, dx)
    u = np.full(N, c)
    steps = int(math.ceil(T / (cfl * dx / c)))
    for _ in range(steps):
        q = E.transport_step(q, u, T / steps, order)
    return float(np.abs(q - sine_cell_average(x, dx, c * T)).sum() * dx)


@pytest.mark.parametrize("order,min_rate", [(1, 0.9), (2, 1.8)])
def test_transport_convergence_order(order, min_rate):
    errs = [transport_error(N, order) for N in (64, 128, 256)]
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > min_rate), rates


def test_transport_conserves_with_variable_velocity():
    N = 128
    x = E.grid(N)
    q = 1.0 + 0.3 * np.cos(TWO_PI * x)
    u = 0.7 + 0.4 * np.sin(TWO_PI * x)
    m0 = q.sum()
    for order in (1, 2):
        qq = q.copy()
        for _ in range(200):
            qq = E.transport_step(qq, u, 0.4 / N / 1.1, order)
        assert abs(qq.sum() - m0) <= 1e-12 * m0
        assert qq.min() > 0.0


def test_central_derivative_fourth_order():
    errs = []
    for N in (32, 64):
        x = E.grid(N)
        errs.append(np.max(np.abs(E.central_derivative(np.sin(TWO_PI * x), 1.0 / N) - TWO_PI * np.cos(TWO_PI * x))))
    assert math.log2(errs[0] / errs[1]) > 3.9


def test_grid_centres():
    x = E.grid(8)
    assert x[-1] == 0.5 and x[3] == 0.0


def test_recover_velocity_round_trip():
    kern = K.PowerLaw(0.5)
    N = 256
    x = E.grid(N)
    rho = 1.0 + 0.4 * np.cos(TWO_PI * x)
    u = 0.2 * np.sin(TWO_PI * x) + 0.05
    w = K.cell_weights(kern, N)
    G = E.central_derivative(u, 1.0 / N) + K.convolve(w, rho)
    P0 = float((rho * u).sum() / N)
    ur = E.recover_velocity(G, rho, w, P0)
    assert np.max(np.abs(ur - u)) < 1e-4
    assert (rho * ur).sum() / N == pytest.approx(P0, abs=1e-15)
    assert abs(E.compatibility_residual(G, rho, w)) < 1e-14


def test_init_matches_preset_c0():
    kern = K.PowerLaw(0.5)
    pre = P.sine_velocity(kern, 0.1)
    init = E.init_from_primitive(pre.rho0, pre.u0, kern, 512)
    assert init.C0 == pytest.approx(pre.C0, rel=1e-3)
    assert init.state.M == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(InputError):
        E.init_from_primitive(lambda x: np.cos(TWO_PI * x), pre.u0, kern, 64)


def test_flat_state_is_stationary():
    kern = K.PowerLaw(0.5)
    pre = P.flat(kern, mass=1.3, velocity=0.2)
    d = E.run(E.SimConfig(N=64, t_end=1.0, order=2), pre.rho0, pre.u0, kern)
    s = d.final_state
    assert np.max(np.abs(s.rho - 1.3)) < 1e-13
    assert np.max(np.abs(s.u - 0.2)) < 1e-13


def test_cfl_violation_raises():
    kern = K.PowerLaw(0.5)
    pre = P.sine_velocity(kern, 0.1)
    init = E.init_from_primitive(pre.rho0, pre.u0, kern, 64)
    limit = E.stable_dt(init.state, 0.4)
    E.step(init.state, init.weights, limit, order=1, cfl=0.4)
    with pytest.raises(StepSizeError):
        E.step(init.state, init.weights, 2.0 * limit, order=1, cfl=0.4)


def test_positivity_order1_vacuum():
    kern = K.constant_kernel(0.1)
    pre = P.vacuum_bump(kern, ratio=1.1)
    init = E.init_from_primitive(pre.rho0, pre.u0, kern, 128)
    s = init.state
    while s.t < 2.0:
        s = E.step(s, init.weights, min(E.stable_dt(s, 0.4), 2.0 - s.t), order=1, cfl=0.4)
        assert s.rho.min() >= -1e-14


@pytest.mark.parametrize("order", [1, 2])
def test_conservation_smooth_run(order):
    kern = K.PowerLaw(0.5)
    pre = P.density_wave(kern, 0.3)
    d = E.run(E.SimConfig(N=256, t_end=2.0, order=order), pre.rho0, pre.u0, kern)
    assert d.series("mass_drift").max() <= 1e-12
    assert d.series("momentum_drift").max() <= 1e-6


def test_supercritical_reaches_blowup_threshold():
    kern = K.PowerLaw(0.5)
    pre = P.sine_velocity(kern, -2.0)
    cfg = E.SimConfig(N=128, t_end=2.0, order=2, rho_blowup=20.0)
    d = E.run(cfg, pre.rho0, pre.u0, kern)
    assert d.outcome is E.Outcome.BLOWUP_DETECTED
    assert 0.0 < d.event_time < 0.2
    # an honest cap still reports the cap outcome
    cfg = E.SimConfig(N=128, t_end=2.0, order=2, rho_cap=5.0)
    assert E.run(cfg, pre.rho0, pre.u0, kern).outcome is E.Outcome.CAP_EXCEEDED


def test_config_validation_accumulates():
    with pytest.raises(ConfigurationError) as exc:
        E.SimConfig(N=33, cfl=0.9)
    assert "even" in str(exc.value) and "cfl" in str(exc.value)


def test_snapshots_and_csv(tmp_path):
    kern = K.PowerLaw(0.5)
    pre = P.sine_velocity(kern, 0.1)
    cfg = E.SimConfig(N=64, t_end=0.5, order=1, snapshot_times=(0.0, 0.25, 0.5), output_stride=3)
    d = E.run(cfg, pre.rho0, pre.u0, kern)
    assert [s[0] for s in d.snapshots] == pytest.approx([0.0, 0.25, 0.5])
    d.to_csv(tmp_path / "diag.csv")
    d.snapshots_to_csv(tmp_path / "snap.csv")
    with open(tmp_path / "diag.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == E.DIAGNOSTIC_COLUMNS
    parsed = np.array(rows[1:], dtype=float)
    assert np.array_equal(parsed, np.array(d.rows))
    assert parsed[-1, 0] == 0.5
    with open(tmp_path / "snap.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "rho", "G", "u"]
    assert len(rows) == 1 + 3 * 64


def test_runs_are_deterministic():
    kern = K.PowerLaw(0.25)
    pre = P.density_wave(kern, 0.3)
    cfg = E.SimConfig(N=64, t_end=0.5, order=2)
    a = E.run(cfg, pre.rho0, pre.u0, kern)
    b = E.run(cfg, pre.rho0, pre.u0, kern)
    assert a.rows == b.rows
