"""Finite-volume solver for the (rho, G) formulation on the periodic grid.

The unknowns are cell averages of the density ``rho`` and of
``G = u_x + psi * rho``.  Both satisfy a continuity equation with the same
velocity,

    rho_t + (rho u)_x = 0,    G_t + (G u)_x = 0,

and the velocity is recovered from ``u_x = G - psi * rho`` with its constant
fixed by the total momentum.  Both fields are advanced with the same
Rusanov (local Lax-Friedrichs) flux, so a state with ``G = c rho`` keeps that
proportionality exactly.

The grid has ``N`` cells of width ``dx = 1/N`` centred at ``x_i = -1/2 + (i+1) dx``
(so one centre sits at ``x = 0`` and one at ``x = 1/2``).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels as K
from .errors import ConfigurationError, DegenerateStateError, InputError, StepSizeError

SPEED_EPS = 1e-14
RHO_THRESHOLD = 1e-12
RATIO_RHO_THRESHOLD = 1e-8


def grid(N: int) -> np.ndarray:
    return -0.5 + (np.arange(N) + 1.0) / N


def central_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order central difference on a periodic grid."""
    return (8.0 * (np.roll(f, -1) - np.roll(f, 1)) - (np.roll(f, -2) - np.roll(f, 2))) / (12.0 * dx)


def _sample(f, x):
    if callable(f):
        return np.asarray(np.broadcast_to(f(x), x.shape), dtype=float).copy()
    arr = np.asarray(f, dtype=float)
    if arr.shape != x.shape:
        raise ConfigurationError(f"field of shape {arr.shape} does not match the {x.size}-cell grid")
    return arr.copy()


@dataclass
class SimConfig:
    N: int = 256
    cfl: float = 0.4
    t_end: float = 10.0
    order: int = 1
    rho_cap: float = 1e6
    g_floor: float = -1e6
    output_stride: int = 1
    dt_max: float = 1e-2
    # grid-resolvable blow-up level; None disables the check
    rho_blowup: float | None = None
    snapshot_times: tuple = ()

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigurationError("; ".join(errors))

    def validate(self) -> list[str]:
        errors = []
        if not isinstance(self.N, (int, np.integer)) or self.N < 32 or self.N % 2:
            errors.append(f"N must be an even integer >= 32, got {self.N!r}")
        if not 0.0 < self.cfl <= 0.5:
            errors.append(f"cfl must lie in (0, 0.5], got {self.cfl!r}")
        if not self.t_end > 0.0:
            errors.append(f"t_end must be positive, got {self.t_end!r}")
        if self.order not in (1, 2):
            errors.append(f"order must be 1 or 2, got {self.order!r}")
        if not self.dt_max > 0.0:
            errors.append(f"dt_max must be positive, got {self.dt_max!r}")
        if self.output_stride < 1:
            errors.append(f"output_stride must be >= 1, got {self.output_stride!r}")
        return errors


@dataclass
class EulerianState:
    t: float
    rho: np.ndarray
    G: np.ndarray
    u: np.ndarray
    M: float
    P: float

    @property
    def N(self) -> int:
        return self.rho.size

    @property
    def dx(self) -> float:
        return 1.0 / self.N

    @property
    def x(self) -> np.ndarray:
        return grid(self.N)

    def mass(self) -> float:
        return float(self.rho.sum() * self.dx)

    def momentum(self) -> float:
        return float((self.rho * self.u).sum() * self.dx)


@dataclass
class Initialization:
    state: EulerianState
    C0: float
    inf_G: float
    weights: K.ConvolutionWeights


def init_from_primitive(rho0, u0, kernel: K.KernelSpec, N: int,
                        weights: K.ConvolutionWeights | None = None) -> Initialization:
    """Sample ``(rho0, u0)`` on the grid and form ``G0 = D_x u0 + psi * rho0``.

    ``rho0`` and ``u0`` are callables of ``x`` or arrays of length ``N``.
    """
    x = grid(N)
    rho = _sample(rho0, x)
    u = _sample(u0, x)
    if np.any(rho < 0.0):
        raise InputError("initial density must be nonnegative")
    w = weights if weights is not None else K.cell_weights(kernel, N)
    dx = 1.0 / N
    G = central_derivative(u, dx) + K.convolve(w, rho)
    M = float(rho.sum() * dx)
    P = float((rho * u).sum() * dx)
    support = rho > RHO_THRESHOLD
    C0 = float(np.min(G[support] / rho[support])) if support.any() else math.nan
    state = EulerianState(t=0.0, rho=rho, G=G, u=u, M=M, P=P)
    return Initialization(state=state, C0=C0, inf_G=float(G.min()), weights=w)


def recover_velocity(G, rho, weights: K.ConvolutionWeights, P0: float) -> np.ndarray:
    """Velocity with ``u_x = G - psi * rho`` and ``sum(rho u) dx = P0``.

    The mean of ``G - psi * rho`` is projected out before the cumulative
    trapezoidal integration, so the antiderivative is periodic.
    """
    rho = np.asarray(rho, dtype=float)
    dx = 1.0 / rho.size
    M = rho.sum() * dx
    if not M > 0.0:
        raise DegenerateStateError("cannot fix the velocity constant of a massless state")
    h = np.asarray(G, dtype=float) - K.convolve(weights, rho)
    h = h - h.mean()
    u = np.empty_like(h)
    u[0] = 0.0
    np.cumsum(0.5 * (h[:-1] + h[1:]) * dx, out=u[1:])
    c = (P0 - (rho * u).sum() * dx) / M
    return u + c


def compatibility_residual(G, rho, weights) -> float:
    """``sum(G - psi * rho) dx``; zero for data built from primitive variables."""
    return float((np.asarray(G) - K.convolve(weights, rho)).sum() / weights.N)


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def flux_divergence(q: np.ndarray, u: np.ndarray, dx: float, order: int) -> np.ndarray:
    """``-(F_{i+1/2} - F_{i-1/2}) / dx`` for ``f = q u`` with the Rusanov flux.

    ``q`` may stack several fields along its first axis; all share ``u``.
    """
    u_right = np.roll(u, -1)
    speed = np.maximum(np.abs(u), np.abs(u_right))
    if order == 1:
        qL, qR = q, np.roll(q, -1, axis=-1)
        uL, uR = u, u_right
    else:
        sq = _minmod(q - np.roll(q, 1, axis=-1), np.roll(q, -1, axis=-1) - q)
        su = _minmod(u - np.roll(u, 1), u_right - u)
        qL, qR = q + 0.5 * sq, np.roll(q - 0.5 * sq, -1, axis=-1)
        uL, uR = u + 0.5 * su, np.roll(u - 0.5 * su, -1)
    F = 0.5 * (qL * uL + qR * uR) - 0.5 * speed * (qR - qL)
    return -(F - np.roll(F, 1, axis=-1)) / dx


def transport_step(q, u, dt: float, order: int = 1) -> np.ndarray:
    """One conservative step of ``q_t + (q u)_x = 0`` with a frozen velocity."""
    q = np.asarray(q, dtype=float)
    dx = 1.0 / q.shape[-1]
    if order == 1:
        return q + dt * flux_divergence(q, u, dx, 1)
    q1 = q + dt * flux_divergence(q, u, dx, 2)
    return 0.5 * (q + q1 + dt * flux_divergence(q1, u, dx, 2))


def stable_dt(state: EulerianState, cfl: float) -> float:
    return cfl * state.dx / (float(np.max(np.abs(state.u))) + SPEED_EPS)


def _clip_dust(rho):
    dust = (rho < 0.0) & (rho > -1e-12 * max(1.0, float(np.max(rho))))
    if dust.any():
        rho = np.where(dust, 0.0, rho)
    return rho


def step(state: EulerianState, weights: K.ConvolutionWeights, dt: float,
         order: int = 1, cfl: float = 0.5) -> EulerianState:
    """Advance ``(rho, G)`` by ``dt`` and recompute ``u``."""
    limit = stable_dt(state, cfl)
    if dt > limit * (1.0 + 1e-12):
        raise StepSizeError(f"dt={dt!r} violates the CFL limit {limit!r}")
    dx = state.dx
    q = np.stack([state.rho, state.G])
    if order == 1:
        q = q + dt * flux_divergence(q, state.u, dx, 1)
    else:
        q1 = q + dt * flux_divergence(q, state.u, dx, 2)
        u1 = recover_velocity(q1[1], np.maximum(q1[0], 0.0), weights, state.P)
        q = 0.5 * (q + q1 + dt * flux_divergence(q1, u1, dx, 2))
    rho = _clip_dust(q[0])
    G = q[1]
    u = recover_velocity(G, rho, weights, state.P)
    return EulerianState(t=state.t + dt, rho=rho, G=G, u=u, M=state.M, P=state.P)


class Outcome(str, enum.Enum):
    COMPLETED_GLOBAL = "CompletedGlobal"
    BLOWUP_DETECTED = "BlowupDetected"
    CAP_EXCEEDED = "CapExceeded"


DIAGNOSTIC_COLUMNS = ("t", "rho_inf", "G_inf", "G_min", "ratio_min", "mass_drift", "momentum_drift")


@dataclass
class RunDiagnostics:
    """Sampled sup norms and conservation errors of one run."""

    columns: tuple = DIAGNOSTIC_COLUMNS
    rows: list = field(default_factory=list)
    outcome: Outcome = Outcome.COMPLETED_GLOBAL
    event_time: float | None = None
    max_rho_inf: float = 0.0
    max_G_inf: float = 0.0
    min_G: float = math.inf
    min_ratio: float = math.inf
    snapshots: list = field(default_factory=list)
    final_state: object = None
    steps: int = 0

    def record(self, row):
        self.rows.append(tuple(float(v) for v in row))

    def series(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(v) for v in r])

    def snapshots_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("t", "x", "rho", "G", "u"))
            for t, x, rho, G, u in self.snapshots:
                for row in zip(x, rho, G, u):
                    w.writerow([repr(float(t))] + [repr(float(v)) for v in row])

    def summary(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "event_time": self.event_time,
            "max_rho_inf": self.max_rho_inf,
            "max_G_inf": self.max_G_inf,
            "min_G": self.min_G,
            "min_ratio": self.min_ratio,
            "steps": self.steps,
        }


def _ratio_min(rho, G):
    mask = rho > RATIO_RHO_THRESHOLD
    return float(np.min(G[mask] / rho[mask])) if mask.any() else math.nan


def run(config: SimConfig, rho0, u0, kernel: K.KernelSpec) -> RunDiagnostics:
    """Integrate to ``config.t_end`` or until a cap is crossed."""
    init = init_from_primitive(rho0, u0, kernel, config.N)
    return run_state(config, init.state, init.weights)


def run_state(config: SimConfig, state: EulerianState, weights: K.ConvolutionWeights) -> RunDiagnostics:
    diag = RunDiagnostics()
    M0, P0 = state.mass(), state.momentum()
    snaps = sorted(t for t in config.snapshot_times if 0.0 <= t <= config.t_end)

    def observe(s):
        rho_inf = float(np.max(np.abs(s.rho)))
        G_inf = float(np.max(np.abs(s.G)))
        G_min = float(np.min(s.G))
        ratio = _ratio_min(s.rho, s.G)
        diag.max_rho_inf = max(diag.max_rho_inf, rho_inf)
        diag.max_G_inf = max(diag.max_G_inf, G_inf)
        diag.min_G = min(diag.min_G, G_min)
        if not math.isnan(ratio):
            diag.min_ratio = min(diag.min_ratio, ratio)
        mass_drift = abs(s.mass() - M0) / M0
        return (s.t, rho_inf, G_inf, G_min, ratio, mass_drift, abs(s.momentum() - P0))

    def take_snapshot(s):
        diag.snapshots.append((s.t, s.x, s.rho.copy(), s.G.copy(), s.u.copy()))

    row = observe(state)
    diag.record(row)
    while snaps and snaps[0] <= state.t:
        take_snapshot(state)
        snaps.pop(0)

    n = 0
    while state.t < config.t_end:
        dt = min(stable_dt(state, config.cfl), config.dt_max, config.t_end - state.t)
        if snaps:
            dt = min(dt, snaps[0] - state.t)
        state = step(state, weights, dt, order=config.order, cfl=config.cfl)
        if abs(state.t - config.t_end) < 1e-12 * config.t_end:
            state = replace(state, t=config.t_end)
        n += 1
        row = observe(state)
        if n % config.output_stride == 0:
            diag.record(row)
        while snaps and snaps[0] <= state.t + 1e-12:
            take_snapshot(state)
            snaps.pop(0)
        _, rho_inf, _, G_min = row[:4]
        if not (math.isfinite(rho_inf) and math.isfinite(G_min)) or rho_inf > config.rho_cap or G_min < config.g_floor:
            diag.outcome, diag.event_time = Outcome.CAP_EXCEEDED, state.t
            break
        if config.rho_blowup is not None and rho_inf >= config.rho_blowup:
            diag.outcome, diag.event_time = Outcome.BLOWUP_DETECTED, state.t
            break
    if not diag.rows or diag.rows[-1][0] != state.t:
        diag.record(row)
    diag.steps = n
    diag.final_state = state
    return diag
