"""Influence functions on the torus (-1/2, 1/2] and their integrals.

Every kernel is radial: it is described by its profile ``psi(r)`` for
``0 < r <= 1/2`` and extended symmetrically, so integrals over the torus are
twice the corresponding radial integral.  Three families are supported:

* :class:`PowerLaw` -- ``psi(r) = r**-alpha`` with ``0 < alpha < 1``;
  unbounded but integrable at the origin.
* :class:`BoundedAnalytic` -- any callable profile with a known sup norm.
* :class:`Tabulated` -- piecewise-linear profile through sampled values.

Distances between points of the torus are periodic distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigurationError, DomainError

HALF_LENGTH = 0.5

_QUAD_RTOL = 1e-12
_ROOT_SAMPLES = 2048


def periodic_distance(a, b):
    """Distance on the unit torus, in ``[0, 1/2]``."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def _check_radius(r: float) -> None:
    if not r > 0.0:
        raise DomainError(f"kernel evaluated at r={r!r}; the singular point r <= 0 is excluded")
    if r > HALF_LENGTH:
        raise DomainError(f"radius {r!r} exceeds the torus half-length 1/2")


@dataclass(frozen=True)
class PowerLaw:
    """``psi(r) = r**(-alpha)`` on the torus."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"power-law exponent must lie in (0, 1), got {self.alpha!r}")

    kind = "power_law"

    @property
    def sup_norm(self) -> float | None:
        return None

    def profile(self, r):
        return np.asarray(r, dtype=float) ** (-self.alpha)

    def antiderivative(self, r):
        """Radial integral ``int_0^r psi``."""
        a = self.alpha
        return np.asarray(r, dtype=float) ** (1.0 - a) / (1.0 - a)

    def radial_integral(self, lo: float, hi: float) -> float:
        return float(self.antiderivative(hi) - self.antiderivative(lo))

    def l1_norm(self) -> float:
        a = self.alpha
        return 2.0**a / (1.0 - a)

    def level_set_integral(self, k: float) -> float:
        if k <= HALF_LENGTH ** (-self.alpha):
            # psi >= k on the whole torus
            return self.l1_norm()
        r_k = k ** (-1.0 / self.alpha)
        return 2.0 * r_k ** (1.0 - self.alpha) / (1.0 - self.alpha)


@dataclass(frozen=True)
class BoundedAnalytic:
    """A bounded closed-form profile ``fn(r)`` with ``sup |fn| = sup_norm``.

    ``fn`` must accept scalars and NumPy arrays.  Quadratures use
    :func:`scipy.integrate.quad`; pass ``breakpoints`` when the profile has
    kinks so that the adaptive rule can split there.
    """

    fn: Callable = field(compare=False)
    sup_norm: float
    name: str = "bounded"
    breakpoints: tuple = ()

    kind = "bounded"

    def __post_init__(self):
        if not self.sup_norm >= 0.0:
            raise DomainError(f"sup_norm must be >= 0, got {self.sup_norm!r}")

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(np.asarray(self.fn(r), dtype=float), r.shape).copy()

    def _points(self, lo, hi):
        return [p for p in self.breakpoints if lo < p < hi] or None

    def radial_integral(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        val, _ = integrate.quad(
            lambda r: float(self.fn(r)), lo, hi,
            epsabs=0.0, epsrel=_QUAD_RTOL, limit=200, points=self._points(lo, hi),
        )
        return val

    def antiderivative(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([self.radial_integral(0.0, ri) for ri in r.ravel()])
        return out.reshape(r.shape)

    def l1_norm(self) -> float:
        return 2.0 * self.radial_integral(0.0, HALF_LENGTH)

    def level_set_integral(self, k: float) -> float:
        if k == 0.0:
            return self.l1_norm()
        if k > self.sup_norm:
            return 0.0
        total = 0.0
        for lo, hi in _superlevel_intervals(lambda r: self.profile(r) - k, HALF_LENGTH):
            total += self.radial_integral(lo, hi)
        return 2.0 * total


def _superlevel_intervals(h, r_max):
    """Subintervals of ``(0, r_max]`` on which ``h >= 0``.

    Sign changes are located on a uniform sample and polished with Brent's
    method; a sign pattern finer than the sample spacing is not resolved.
    """
    r = np.linspace(0.0, r_max, _ROOT_SAMPLES + 1)
    r[0] = r_max * 1e-14
    vals = h(r)
    cuts = [0.0]
    for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
        a, b = r[i], r[i + 1]
        if vals[i] == 0.0 or vals[i + 1] == 0.0:
            cuts.append(a if vals[i] == 0.0 else b)
        else:
            cuts.append(optimize.brentq(lambda x: float(h(np.array([x]))[0]), a, b, xtol=1e-15, rtol=1e-15))
    cuts.append(r_max)
    cuts = sorted(set(cuts))
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo and h(np.array([0.5 * (lo + hi)]))[0] >= 0.0:
            if out and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return out


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear radial profile.

    Between consecutive ``radii`` the profile is interpolated linearly; below
    the first radius it is held at ``values[0]`` and beyond the last radius
    it is zero.  Monotonicity is not required.
    """

    radii: tuple
    values: tuple

    kind = "tabulated"

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size == 0:
            raise ConfigurationError("table_radii and table_values must be 1-D and of equal length")
        if np.any(r <= 0.0) or np.any(np.diff(r) <= 0.0):
            raise ConfigurationError("table_radii must be positive and strictly increasing")
        if r[-1] > HALF_LENGTH:
            raise ConfigurationError("table_radii must not exceed the torus half-length 1/2")
        if np.any(v < 0.0) or not np.all(np.isfinite(v)):
            raise ConfigurationError("table_values must be finite and nonnegative")
        object.__setattr__(self, "radii", tuple(float(x) for x in r))
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    def _nodes(self):
        # profile as a polyline on [0, r_last]; zero beyond
        r = np.concatenate(([0.0], self.radii))
        v = np.concatenate(([self.values[0]], self.values))
        return r, v

    @property
    def sup_norm(self) -> float:
        return max(self.values)

    def profile(self, r):
        nr, nv = self._nodes()
        return np.interp(np.asarray(r, dtype=float), nr, nv, right=0.0)

    def antiderivative(self, r):
        nr, nv = self._nodes()
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (nv[1:] + nv[:-1]) * np.diff(nr))))
        r = np.minimum(np.asarray(r, dtype=float), nr[-1])
        i = np.clip(np.searchsorted(nr, r, side="right") - 1, 0, len(nr) - 2)
        t = r - nr[i]
        slope = (nv[i + 1] - nv[i]) / (nr[i + 1] - nr[i])
        return cum[i] + nv[i] * t + 0.5 * slope * t * t

    def radial_integral(self, lo: float, hi: float) -> float:
        return float(self.antiderivative(hi) - self.antiderivative(lo))

    def l1_norm(self) -> float:
        return 2.0 * float(self.antiderivative(self.radii[-1]))

    def level_set_integral(self, k: float) -> float:
        if k == 0.0:
            return self.l1_norm()
        nr, nv = self._nodes()
        total = 0.0
        for r0, r1, v0, v1 in zip(nr[:-1], nr[1:], nv[:-1], nv[1:]):
            if v0 >= k and v1 >= k:
                lo, hi = r0, r1
            elif v0 < k and v1 < k:
                continue
            else:
                rc = r0 + (k - v0) * (r1 - r0) / (v1 - v0)
                lo, hi = (r0, rc) if v0 >= k else (rc, r1)
            total += self.radial_integral(lo, hi)
        return 2.0 * total


KernelSpec = Union[PowerLaw, BoundedAnalytic, Tabulated]


def constant_kernel(c: float) -> BoundedAnalytic:
    """``psi == c`` on the whole torus."""
    c = float(c)
    return BoundedAnalytic(fn=lambda r: np.full_like(np.asarray(r, dtype=float), c), sup_norm=abs(c), name=f"constant({c:g})")


def zero_kernel() -> BoundedAnalytic:
    return constant_kernel(0.0)


def is_bounded(kernel: KernelSpec) -> bool:
    return kernel.sup_norm is not None


def evaluate(kernel: KernelSpec, r: float) -> float:
    """``psi(r)`` for ``0 < r <= 1/2``."""
    _check_radius(r)
    return float(kernel.profile(r))


def l1_norm(kernel: KernelSpec) -> float:
    """``int_X psi`` over the torus."""
    return kernel.l1_norm()


def level_set_integral(kernel: KernelSpec, k: float) -> float:
    """``I(k) = int_{psi >= k} psi`` over the torus."""
    if k < 0.0 or math.isnan(k):
        raise DomainError(f"level k must be >= 0, got {k!r}")
    return kernel.level_set_integral(float(k))


@dataclass(frozen=True)
class ConvolutionWeights:
    """Cell integrals of a kernel on the uniform N-cell torus grid.

    ``weights[j]`` is the integral of ``psi`` over the cell at offset
    ``j * dx`` from the origin (offsets taken modulo 1).
    """

    N: int
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def dx(self) -> float:
        return 1.0 / self.N

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def cell_weights(kernel: KernelSpec, N: int) -> ConvolutionWeights:
    """Exact cell-averaged discretization of ``psi`` on ``N`` torus cells."""
    if N < 4 or N % 2:
        raise ConfigurationError(f"cell_weights needs an even N >= 4, got {N!r}")
    dx = 1.0 / N
    half = N // 2
    w = np.empty(N)
    # cell 0 is centred on the singularity; cell N/2 straddles r = 1/2
    w[0] = 2.0 * kernel.radial_integral(0.0, 0.5 * dx)
    edges = (np.arange(1, half) + 0.5) * dx
    if isinstance(kernel, BoundedAnalytic):
        w[1:half] = [kernel.radial_integral(a - dx, a) for a in edges]
    else:
        F = kernel.antiderivative(np.concatenate(([0.5 * dx], edges)))
        w[1:half] = np.diff(F)
    w[half] = 2.0 * kernel.radial_integral(HALF_LENGTH - 0.5 * dx, HALF_LENGTH)
    w[half + 1:] = w[1:half][::-1]
    return ConvolutionWeights(N=N, weights=w)


def convolve(weights: ConvolutionWeights, f, method: str = "auto") -> np.ndarray:
    """Circular convolution ``(psi * f)_i = sum_j w_j f_{i-j}``.

    ``method`` is ``"direct"`` (O(N^2) reference), ``"fft"`` or ``"auto"``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (weights.N,):
        raise ConfigurationError(f"field of shape {f.shape} does not match N={weights.N}")
    if method == "auto":
        method = "direct" if weights.N <= 64 else "fft"
    if method == "direct":
        return convolve_direct(weights.weights, f)
    if method == "fft":
        return np.fft.irfft(np.fft.rfft(weights.weights) * np.fft.rfft(f), n=weights.N)
    raise ConfigurationError(f"unknown convolution method {method!r}")


def convolve_direct(w: np.ndarray, f: np.ndarray) -> np.ndarray:
    n = len(f)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return (f[idx] * w[None, :]).sum(axis=1)


def kernel_from_dict(block: dict) -> KernelSpec:
    """Build a kernel from a config block (keys ``kind``, ``alpha``, ``sup_norm``,
    ``table_radii``, ``table_values``)."""
    kind = block.get("kind")
    if kind == "power_law":
        return PowerLaw(float(block["alpha"]))
    if kind == "constant":
        return constant_kernel(float(block["sup_norm"]))
    if kind == "zero":
        return zero_kernel()
    if kind == "tabulated":
        return Tabulated(tuple(block["table_radii"]), tuple(block["table_values"]))
    raise ConfigurationError(f"unknown kernel kind {kind!r}")


def kernel_to_dict(kernel: KernelSpec) -> dict:
    if isinstance(kernel, PowerLaw):
        return {"kind": "power_law", "alpha": kernel.alpha}
    if isinstance(kernel, Tabulated):
        return {"kind": "tabulated", "table_radii": list(kernel.radii), "table_values": list(kernel.values)}
    if kernel.name.startswith("constant"):
        if kernel.sup_norm == 0.0:
            return {"kind": "zero"}
        return {"kind": "constant", "sup_norm": kernel.sup_norm}
    raise ConfigurationError(f"kernel {kernel.name!r} has no config representation")
