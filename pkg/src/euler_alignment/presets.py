"""Closed-form initial data.

Each preset bundles ``rho0``, ``u0`` and ``u0'`` as vectorized callables of
``x`` together with the analytic values of ``C0 = inf G0/rho0`` (over the
support of ``rho0``), ``inf G0`` and the sup norms the bounds need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from . import kernels as K
from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Preset:
    name: str
    params: dict
    rho0: Callable = field(repr=False)
    u0: Callable = field(repr=False)
    du0: Callable = field(repr=False)
    M: float
    C0: float
    inf_G0: float
    rho0_sup: float
    G0_sup: float
    notes: str = ""

    @property
    def subcritical(self) -> bool:
        return self.inf_G0 > 0.0


def fourier_cosine(kernel: K.KernelSpec, mode: int = 1) -> float:
    """``int_X psi(|y|) cos(2 pi mode y) dy``; the eigenvalue of ``psi *`` on that mode."""
    w = TWO_PI * mode
    if isinstance(kernel, K.PowerLaw):
        # algebraic endpoint weight absorbs the singularity at r = 0
        val, _ = integrate.quad(lambda r: math.cos(w * r), 0.0, 0.5, weight="alg",
                                wvar=(-kernel.alpha, 0.0), epsabs=1e-14, epsrel=1e-13, limit=200)
        return 2.0 * val
    pts = list(kernel.radii) if isinstance(kernel, K.Tabulated) else list(getattr(kernel, "breakpoints", ()))
    pts = [p for p in pts if 0.0 < p < 0.5] or None
    val, _ = integrate.quad(lambda r: float(kernel.profile(r)) * math.cos(w * r), 0.0, 0.5,
                            points=pts, epsabs=1e-14, epsrel=1e-13, limit=400)
    return 2.0 * val


def sine_velocity(kernel: K.KernelSpec, amplitude: float = 0.1, mass: float = 1.0) -> Preset:
    """Flat density ``M`` with velocity ``a sin(2 pi x)``.

    ``G0 = 2 pi a cos(2 pi x) + M ||psi||_1``; negative ``a`` compresses the
    flow at ``x = 0``.  Supercritical iff ``2 pi |a| > M ||psi||_1``.
    """
    a, M = float(amplitude), float(mass)
    l1 = kernel.l1_norm()
    inf_G = M * l1 - TWO_PI * abs(a)
    return Preset(
        name="sine_velocity",
        params={"amplitude": a, "mass": M},
        rho0=lambda x: np.full_like(np.asarray(x, dtype=float), M),
        u0=lambda x: a * np.sin(TWO_PI * np.asarray(x, dtype=float)),
        du0=lambda x: TWO_PI * a * np.cos(TWO_PI * np.asarray(x, dtype=float)),
        M=M,
        C0=inf_G / M,
        inf_G0=inf_G,
        rho0_sup=M,
        G0_sup=abs(M * l1) + TWO_PI * abs(a),
    )


def density_wave(kernel: K.KernelSpec, amplitude: float = 0.3, mass: float = 1.0) -> Preset:
    """``rho0 = M (1 + b cos(2 pi x))`` at rest.

    ``G0 = psi * rho0 = M (||psi||_1 + b c1 cos(2 pi x))`` with ``c1`` the
    first cosine coefficient of ``psi``; the ratio ``G0/rho0`` is monotone in
    ``cos(2 pi x)`` so its infimum sits at ``x = 0`` or ``x = 1/2``.
    """
    b, M = float(amplitude), float(mass)
    if not 0.0 <= b < 1.0:
        raise ConfigurationError(f"density_wave amplitude must lie in [0, 1), got {b!r}")
    l1 = kernel.l1_norm()
    c1 = fourier_cosine(kernel)
    C0 = min((l1 + b * c1) / (1.0 + b), (l1 - b * c1) / (1.0 - b))
    return Preset(
        name="density_wave",
        params={"amplitude": b, "mass": M},
        rho0=lambda x: M * (1.0 + b * np.cos(TWO_PI * np.asarray(x, dtype=float))),
        u0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        du0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        M=M,
        C0=C0,
        inf_G0=M * (l1 - b * abs(c1)),
        rho0_sup=M * (1.0 + b),
        G0_sup=M * (l1 + b * abs(c1)),
        notes=f"first cosine coefficient of psi: {c1!r}",
    )


def flat(kernel: K.KernelSpec, mass: float = 1.0, velocity: float = 0.0) -> Preset:
    """Uniform density and velocity; a steady state of the system."""
    M, v = float(mass), float(velocity)
    l1 = kernel.l1_norm()
    return Preset(
        name="flat",
        params={"mass": M, "velocity": v},
        rho0=lambda x: np.full_like(np.asarray(x, dtype=float), M),
        u0=lambda x: np.full_like(np.asarray(x, dtype=float), v),
        du0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        M=M,
        C0=l1,
        inf_G0=M * l1,
        rho0_sup=M,
        G0_sup=M * l1,
    )


def vacuum_bump(kernel: K.KernelSpec, ratio: float = 1.1, width: float = 0.5, mass: float = 1.0) -> Preset:
    """Compactly supported density with ``G0/rho0 = ratio * ||psi||_1`` on its support.

    ``rho0 = (M/L)(1 + cos(2 pi x / L))`` on ``|x| < L/2``.  On a torus
    ``int G0 = M ||psi||_1``, so a ratio above ``||psi||_1`` forces ``G0 < 0``
    somewhere; here the deficit sits in the vacuum as the smooth dip
    ``-kappa (1 + cos(2 pi (x - 1/2) / (1 - L)))``.  The density never sees
    it, but ``G`` in the vacuum blows up after
    ``ln(1 + c/(2 kappa)) / c`` for a constant kernel ``c`` (``c M`` with mass).

    Only constant kernels are supported: then ``psi * rho0 = c M`` and ``u0``
    is elementary.
    """
    if not isinstance(kernel, K.BoundedAnalytic) or not kernel.name.startswith("constant"):
        raise ConfigurationError("vacuum_bump needs a constant kernel")
    L, M = float(width), float(mass)
    if not 0.0 < L < 1.0:
        raise ConfigurationError(f"vacuum_bump width must lie in (0, 1), got {L!r}")
    cM = kernel.l1_norm() * M
    C = float(ratio) * kernel.l1_norm()
    kappa = (C - kernel.l1_norm()) * M / (1.0 - L)
    V = 1.0 - L

    def rho0(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < 0.5 * L, (M / L) * (1.0 + np.cos(TWO_PI * x / L)), 0.0)

    def du0(x):
        x = np.asarray(x, dtype=float)
        s = np.abs(x) - 0.5
        inside = np.abs(x) < 0.5 * L
        return np.where(inside, C * rho0(x), -kappa * (1.0 + np.cos(TWO_PI * s / V))) - cM

    def u0(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        inside = (C * M / L) * (ax + L / TWO_PI * np.sin(TWO_PI * ax / L)) - cM * ax
        edge = 0.5 * C * M - 0.5 * cM * L
        s = ax - 0.5
        outside = edge - kappa * ((ax - 0.5 * L) + V / TWO_PI * np.sin(TWO_PI * s / V)) - cM * (ax - 0.5 * L)
        return np.sign(x) * np.where(ax < 0.5 * L, inside, outside)

    c = kernel.l1_norm() * M
    t_vac = math.inf if kappa == 0.0 else (math.log1p(c / (2.0 * kappa)) / c if c > 0 else 1.0 / (2.0 * kappa))
    return Preset(
        name="vacuum_bump",
        params={"ratio": float(ratio), "width": L, "mass": M},
        rho0=rho0,
        u0=u0,
        du0=du0,
        M=M,
        C0=C,
        inf_G0=-2.0 * kappa,
        rho0_sup=2.0 * M / L,
        G0_sup=max(2.0 * C * M / L, 2.0 * kappa),
        notes=f"G0 < 0 only in the vacuum; vacuum G blow-up at t = {t_vac:.6g}",
    )


PRESETS = {
    "sine_velocity": sine_velocity,
    "density_wave": density_wave,
    "flat": flat,
    "vacuum_bump": vacuum_bump,
}


def make_preset(name: str, kernel: K.KernelSpec, **params) -> Preset:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown initial-data preset {name!r}") from None
    return factory(kernel, **params)
