"""Uniform density and G bounds for subcritical data.

For a nonnegative kernel ``psi`` in L1, mass ``M`` and ratio threshold
``C0 = inf G0/rho0 > 0`` the density obeys

    ||rho(t)||_inf <= max(||rho0||_inf, beta),
    ||G(t)||_inf   <= max(||G0||_inf, gamma),

where ``beta`` is the infimum of ``g(k) = M k / (C0 - I(k))`` over the levels
``k`` whose superlevel set ``{psi >= k}`` carries kernel weight
``I(k) < C0``.  Unbounded kernels go through a numeric minimization of ``g``;
for the power law ``|x|**-alpha`` a closed form is available and is
cross-checked against the optimizer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .errors import AnalyticFallback, DomainError, InadmissibleLevelError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

K0_RTOL = 1e-10
SCAN_POINTS = 512
SCAN_SPAN = 1e6
SCAN_OFFSET = 1e-6
GOLDEN_RTOL = 1e-8
ANALYTIC_AGREEMENT = 1e-6


class Regime(str, enum.Enum):
    MAX_PRINCIPLE = "MaxPrinciple"
    BOUNDED_KERNEL = "BoundedKernel"
    OPTIMIZED_NUMERIC = "OptimizedNumeric"
    OPTIMIZED_ANALYTIC = "OptimizedAnalytic"


@dataclass(frozen=True)
class BoundInputs:
    M: float
    C0: float
    kernel: K.KernelSpec
    rho0_sup: float = 0.0
    g0_sup: float = 0.0

    def __post_init__(self):
        if not self.M > 0.0:
            raise DomainError(f"total mass must be positive, got {self.M!r}")
        if not self.C0 > 0.0:
            raise DomainError(f"C0 must be positive (subcritical data), got {self.C0!r}")
        if self.rho0_sup < 0.0 or self.g0_sup < 0.0:
            raise DomainError("sup norms must be nonnegative")


@dataclass(frozen=True)
class BoundReport:
    beta: float
    gamma: float
    k0: float | None
    k_star: float | None
    regime: Regime
    rho_bound: float
    g_bound: float
    l1_norm: float
    beta_numeric: float | None = None

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["regime"] = self.regime.value
        return d


def _threshold_level(kernel, target: float) -> float:
    """``inf {k : I(k) < target}`` by bisection on the nonincreasing ``I``."""
    lo, hi = 0.0, 1.0
    while kernel.level_set_integral(hi) >= target:
        lo, hi = hi, 2.0 * hi
    for _ in range(4000):
        if hi - lo <= K0_RTOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if kernel.level_set_integral(mid) >= target:
            lo = mid
        else:
            hi = mid
    return hi


def compute_k0(inputs: BoundInputs) -> float | None:
    """Left end of the admissible level range, or ``None`` when every
    ``k >= 0`` is admissible (``C0 > ||psi||_1``).

    At a jump of ``I`` the jump location is returned, so ``g`` is defined on
    ``(k0, inf)`` in all cases.
    """
    if inputs.C0 > inputs.kernel.l1_norm():
        return None
    if isinstance(inputs.kernel, K.PowerLaw):
        # I(k0) = C0 is reached before the level set wraps the torus
        a = inputs.kernel.alpha
        return (2.0 / (inputs.C0 * (1.0 - a))) ** (a / (1.0 - a))
    return _threshold_level(inputs.kernel, inputs.C0)


def g_of_k(inputs: BoundInputs, k: float) -> float:
    level = K.level_set_integral(inputs.kernel, k)
    if level >= inputs.C0:
        raise InadmissibleLevelError(
            f"level k={k!r} has I(k)={level!r} >= C0={inputs.C0!r}")
    return inputs.M * k / (inputs.C0 - level)


def golden_section_minimize(f, a: float, b: float, rtol: float = GOLDEN_RTOL, max_iter: int = 500):
    """Minimize ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= rtol * max(abs(a), abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def scan_g(inputs: BoundInputs, k0: float | None = None, points: int = SCAN_POINTS):
    """Log-spaced samples ``(k, g(k))`` over ``(k0 (1 + 1e-6), k0 * 1e6]``."""
    if k0 is None:
        k0 = compute_k0(inputs)
    if k0 is None:
        raise DomainError("C0 > ||psi||_1: g has no blow-up at k0 and the scan is undefined")
    lo = max(k0, 1e-300) * (1.0 + SCAN_OFFSET)
    ks = np.geomspace(lo, max(k0, 1e-300) * SCAN_SPAN, points)
    gs = np.array([_g_safe(inputs, k) for k in ks])
    return ks, gs


def _g_safe(inputs, k):
    level = inputs.kernel.level_set_integral(k)
    if level >= inputs.C0:
        return math.inf
    return inputs.M * k / (inputs.C0 - level)


def beta_optimized(inputs: BoundInputs) -> tuple[float, float | None]:
    """Numeric infimum of ``g`` and its (approximate) minimizer.

    Does not assume ``g`` is unimodal: a dense scan picks the best sample and
    golden-section search refines inside the neighbouring bracket (in log k).
    """
    k0 = compute_k0(inputs)
    if k0 is None:
        return 0.0, None
    ks, gs = scan_g(inputs, k0)
    i = int(np.argmin(gs))
    lo = ks[max(i - 1, 0)]
    hi = ks[min(i + 1, len(ks) - 1)]
    x, fx = golden_section_minimize(lambda k: _g_safe(inputs, k), lo, hi, rtol=GOLDEN_RTOL)
    if gs[i] <= fx:
        return float(gs[i]), float(ks[i])
    return float(fx), float(x)


def beta_analytic_powerlaw(alpha: float, M: float, C0: float) -> tuple[float, float, float]:
    """Closed-form ``(beta, k_star, k0)`` for ``psi = |x|**-alpha``.

    Raises :class:`AnalyticFallback` when ``C0 > ||psi||_1`` or when the
    minimizer's level set would exceed the torus (the unclamped level-set
    formula is then invalid).
    """
    kern = K.PowerLaw(alpha)
    if C0 > kern.l1_norm():
        raise AnalyticFallback(f"C0={C0!r} exceeds ||psi||_1={kern.l1_norm()!r}")
    e = alpha / (1.0 - alpha)
    k0 = (2.0 / (C0 * (1.0 - alpha))) ** e
    k_star = (2.0 / (C0 * alpha * (1.0 - alpha))) ** e
    if k_star ** (-1.0 / alpha) > K.HALF_LENGTH:
        raise AnalyticFallback(f"level set of k*={k_star!r} is wider than the torus")
    beta = (2.0 / alpha) ** e * M / (C0 * (1.0 - alpha)) ** (1.0 / (1.0 - alpha))
    assert k_star > k0
    return beta, k_star, k0


def compute_beta(inputs: BoundInputs):
    """``(beta, k_star, regime, beta_numeric)`` following the case table.

    ``beta_numeric`` is the optimizer's value whenever it was run.
    """
    kern = inputs.kernel
    if inputs.C0 > kern.l1_norm():
        return 0.0, None, Regime.MAX_PRINCIPLE, None
    if K.is_bounded(kern):
        return inputs.M * kern.sup_norm / inputs.C0, kern.sup_norm, Regime.BOUNDED_KERNEL, None
    beta_n, k_n = beta_optimized(inputs)
    if isinstance(kern, K.PowerLaw):
        try:
            beta_a, k_a, _ = beta_analytic_powerlaw(kern.alpha, inputs.M, inputs.C0)
        except AnalyticFallback:
            return beta_n, k_n, Regime.OPTIMIZED_NUMERIC, beta_n
        if abs(beta_n - beta_a) > ANALYTIC_AGREEMENT * beta_a:
            raise RuntimeError(f"numeric beta {beta_n!r} disagrees with closed form {beta_a!r}")
        return beta_a, k_a, Regime.OPTIMIZED_ANALYTIC, beta_n
    return beta_n, k_n, Regime.OPTIMIZED_NUMERIC, beta_n


def compute_gamma(inputs: BoundInputs, beta: float) -> float:
    kern = inputs.kernel
    if K.is_bounded(kern):
        return inputs.M * kern.sup_norm
    return kern.l1_norm() * max(inputs.rho0_sup, beta)


def compute_bounds(inputs: BoundInputs) -> BoundReport:
    beta, k_star, regime, beta_n = compute_beta(inputs)
    gamma = compute_gamma(inputs, beta)
    return BoundReport(
        beta=beta,
        gamma=gamma,
        k0=compute_k0(inputs),
        k_star=k_star,
        regime=regime,
        rho_bound=max(inputs.rho0_sup, beta),
        g_bound=max(inputs.g0_sup, gamma),
        l1_norm=inputs.kernel.l1_norm(),
        beta_numeric=beta_n,
    )


def rough_bound_step1(inputs: BoundInputs) -> float:
    """Density bound ``max(rho0, 2 M k / C0)`` from the first, cruder argument,
    where ``k`` is the smallest level whose set satisfies ``4 I(k) < C0``."""
    if inputs.C0 > 4.0 * inputs.kernel.l1_norm():
        return inputs.rho0_sup
    k = _threshold_level(inputs.kernel, inputs.C0 / 4.0)
    return max(inputs.rho0_sup, 2.0 * inputs.M * k / inputs.C0)


def refined_bound_step2(inputs: BoundInputs, k: float) -> float:
    """Density bound ``max(rho0, g(k))`` for one admissible level ``k``."""
    return max(inputs.rho0_sup, g_of_k(inputs, k))
