"""Particle solver along characteristics.

Each particle ``i`` carries a position ``x_i``, a velocity ``u_i`` and the
values ``rho_i``, ``G_i`` of density and ``G`` at its position.  Velocities
follow the discrete Cucker-Smale alignment law, and density and ``G`` obey

    d rho_i / dt = -rho_i (G_i - conv_i),    d G_i / dt = -G_i (G_i - conv_i),

where ``conv_i`` approximates ``(psi * rho)(x_i)`` by a sum over particle
masses plus a cell-averaged self term.  Since both ODEs share the factor
``G_i - conv_i``, the ratio ``G_i / rho_i`` is invariant; the classical
Runge-Kutta stages preserve that ratio up to rounding.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels as K
from .errors import DegenerateStateError, StepSizeError

DISTANCE_FLOOR = 1e-10
DT_MIN = 1e-9
RATIO_RHO_THRESHOLD = 1e-12


@dataclass
class ParticleSystem:
    x: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    G: np.ndarray
    m: np.ndarray
    t: float = 0.0

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def M(self) -> float:
        return float(self.m.sum())

    def momentum(self) -> float:
        return float(np.dot(self.m, self.u))


def particle_grid(n: int) -> np.ndarray:
    """Equispaced positions ``-1/2 + (i+1)/n``, matching the Eulerian cell centres."""
    return -0.5 + (np.arange(n) + 1.0) / n


def _values(f, x):
    if callable(f):
        return np.asarray(np.broadcast_to(f(x), x.shape), dtype=float).copy()
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        return np.full(x.shape, float(arr))
    if arr.shape != x.shape:
        raise ValueError(f"sampled field has shape {arr.shape}, expected {x.shape}")
    return arr.copy()


def seed_particles(rho0, u0, G0, n: int) -> ParticleSystem:
    """Equispaced particles with midpoint-rule masses ``m_i = rho0(x_i) / n``."""
    if n < 2:
        raise ValueError("need at least two particles")
    x = particle_grid(n)
    rho = _values(rho0, x)
    m = rho / n
    if not np.any(m > 0.0):
        raise DegenerateStateError("all particle masses are zero")
    return ParticleSystem(x=x, u=_values(u0, x), rho=rho, G=_values(G0, x), m=m)


def self_weight(kernel: K.KernelSpec, n: int) -> float:
    """``n * int_{|y| < 1/(2n)} psi``: the kernel averaged over one particle cell."""
    return n * 2.0 * kernel.radial_integral(0.0, 0.5 / n)


def _derivative(f, x):
    if callable(f):
        h = 1e-3
        return (8.0 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12.0 * h)
    from .eulerian import central_derivative
    return central_derivative(np.asarray(f, dtype=float), 1.0 / x.size)


def seed_from_primitive(rho0, u0, kernel: K.KernelSpec, n: int, du0=None) -> ParticleSystem:
    """Seed particles with ``G_i = u0'(x_i) + conv_i`` using the particle quadrature.

    Building ``G`` from the same quadrature the solver uses keeps a flat
    state an exact equilibrium; ``du0`` may supply the exact derivative.
    """
    x = particle_grid(n)
    rho = _values(rho0, x)
    m = rho / n
    if not np.any(m > 0.0):
        raise DegenerateStateError("all particle masses are zero")
    du = _values(du0, x) if du0 is not None else _derivative(u0, x)
    psi = pair_matrix(x, kernel)[0]
    conv = psi @ m + m * self_weight(kernel, n)
    return ParticleSystem(x=x, u=_values(u0, x), rho=rho, G=du + conv, m=m)


def pair_matrix(x: np.ndarray, kernel: K.KernelSpec):
    """``psi(d(x_i, x_j))`` with a zero diagonal, and the number of colliding pairs."""
    d = np.subtract.outer(x, x)
    d -= np.rint(d)
    np.abs(d, out=d)
    np.fill_diagonal(d, K.HALF_LENGTH)
    collisions = 0
    if d.min() < DISTANCE_FLOOR:
        collisions = int((d < DISTANCE_FLOOR).sum()) // 2
        np.maximum(d, DISTANCE_FLOOR, out=d)
    psi = kernel.profile(d)
    np.fill_diagonal(psi, 0.0)
    return psi, collisions


@dataclass
class Derivatives:
    dx: np.ndarray
    du: np.ndarray
    drho: np.ndarray
    dG: np.ndarray
    conv: np.ndarray
    collisions: int = 0


def rhs(sys: ParticleSystem, kernel: K.KernelSpec, w_self: float | None = None) -> Derivatives:
    if w_self is None:
        w_self = self_weight(kernel, sys.n)
    return _rhs(sys.x, sys.u, sys.rho, sys.G, sys.m, kernel, w_self)


def _rhs(x, u, rho, G, m, kernel, w_self):
    psi, collisions = pair_matrix(x, kernel)
    pm = psi @ m
    du = psi @ (m * u) - u * pm
    conv = pm + m * w_self
    h = G - conv
    return Derivatives(dx=u.copy(), du=du, drho=-rho * h, dG=-G * h, conv=conv, collisions=collisions)


LAGRANGIAN_COLUMNS = ("t", "rho_max", "G_inf", "G_min", "ratio_drift", "momentum_drift", "u_max", "u_min")


@dataclass
class LagrangianResult:
    columns: tuple = LAGRANGIAN_COLUMNS
    rows: list = field(default_factory=list)
    outcome: str = "CompletedGlobal"
    event_time: float | None = None
    degeneracy_events: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)
    final: ParticleSystem | None = None
    rejected_steps: int = 0
    steps: int = 0

    def series(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    @property
    def max_rho(self) -> float:
        return float(self.series("rho_max").max())

    @property
    def max_G_inf(self) -> float:
        return float(self.series("G_inf").max())

    @property
    def max_ratio_drift(self) -> float:
        return float(self.series("ratio_drift").max())

    def summary(self) -> dict:
        return {
            "outcome": self.outcome,
            "event_time": self.event_time,
            "max_rho": self.max_rho,
            "max_G_inf": self.max_G_inf,
            "min_G": float(self.series("G_min").min()),
            "max_ratio_drift": self.max_ratio_drift,
            "max_momentum_drift": float(self.series("momentum_drift").max()),
            "degeneracy_events": len(self.degeneracy_events),
            "steps": self.steps,
            "rejected_steps": self.rejected_steps,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(float(v)) for v in r])

    def trajectory_to_csv(self, path) -> None:
        if not self.trajectory:
            n = 0
        else:
            n = self.trajectory[0][1].size
        header = ["t"] + [f"{q}_{i}" for i in range(n) for q in ("x", "u", "rho", "G")]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for t, x, u, rho, G in self.trajectory:
                block = np.column_stack([x, u, rho, G]).ravel()
                w.writerow([repr(float(t))] + [repr(float(v)) for v in block])


class NumericalAbort(StepSizeError):
    """The step size fell below ``dt_min`` without producing an acceptable step."""


def integrate(sys: ParticleSystem, kernel: K.KernelSpec, dt: float, t_end: float,
              cap: float = 1e6, stride: int = 0, dt_min: float = DT_MIN,
              record_every: int = 1) -> LagrangianResult:
    """Classical RK4 to ``t_end`` with density-overshoot step rejection.

    A step is rejected when ``|d rho_i/dt| dt > rho_i`` for some particle, or
    when the accepted increment would do the same; ``dt`` is then halved (not
    below ``dt_min``) and grows back by doubling after each accepted step.
    The run stops with ``BlowupDetected`` once ``max rho_i > cap``.
    ``stride > 0`` stores particle snapshots every ``stride`` accepted steps.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    w_self = self_weight(kernel, sys.n)
    res = LagrangianResult()
    m = sys.m
    P0 = sys.momentum()
    carrying = sys.rho > RATIO_RHO_THRESHOLD
    ratio0 = np.where(carrying, sys.G / np.where(carrying, sys.rho, 1.0), 0.0)

    def observe(s):
        ratio = np.where(carrying, s.G / np.where(carrying, s.rho, 1.0), 0.0)
        drift = float(np.max(np.abs(ratio - ratio0))) if carrying.any() else 0.0
        res.rows.append((s.t, float(s.rho.max()), float(np.abs(s.G).max()), float(s.G.min()),
                         drift, abs(s.momentum() - P0), float(s.u.max()), float(s.u.min())))

    def snapshot(s):
        res.trajectory.append((s.t, s.x.copy(), s.u.copy(), s.rho.copy(), s.G.copy()))

    observe(sys)
    if stride:
        snapshot(sys)

    def f(y):
        x, u, rho, G = y
        d = _rhs(x, u, rho, G, m, kernel, w_self)
        return np.stack([d.dx, d.du, d.drho, d.dG]), d.collisions

    y = np.stack([sys.x, sys.u, sys.rho, sys.G])
    t = sys.t
    h = dt
    n_steps = 0
    while t_end - t > 0.5 * dt_min:
        hstep = min(h, t_end - t)
        k1, col = f(y)
        if col:
            res.degeneracy_events.append((t, col))
        while True:
            if hstep < dt_min:
                raise NumericalAbort(f"step size fell below dt_min={dt_min!r} at t={t!r}")
            if np.any(np.abs(k1[2]) * hstep > y[2]):
                res.rejected_steps += 1
                hstep *= 0.5
                continue
            k2, _ = f(y + 0.5 * hstep * k1)
            k3, _ = f(y + 0.5 * hstep * k2)
            k4, _ = f(y + hstep * k3)
            incr = hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(incr)) or np.any(np.abs(incr[2]) > y[2]):
                res.rejected_steps += 1
                hstep *= 0.5
                continue
            break
        y = y + incr
        y[0] = y[0] - np.round(y[0])
        t = t + hstep
        n_steps += 1
        h = min(2.0 * hstep, dt) if hstep < dt else dt
        s = ParticleSystem(x=y[0], u=y[1], rho=y[2], G=y[3], m=m, t=t)
        if n_steps % record_every == 0:
            observe(s)
        if stride and n_steps % stride == 0:
            snapshot(s)
        if float(y[2].max()) > cap:
            res.outcome, res.event_time = "BlowupDetected", t
            break
    if res.rows[-1][0] != t:
        observe(ParticleSystem(x=y[0], u=y[1], rho=y[2], G=y[3], m=m, t=t))
    res.steps = n_steps
    res.final = ParticleSystem(x=y[0].copy(), u=y[1].copy(), rho=y[2].copy(), G=y[3].copy(), m=m, t=t)
    return res
