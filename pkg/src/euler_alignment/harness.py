"""Verification campaigns tying the bound formulas to both solvers."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds as B
from . import eulerian as E
from . import kernels as K
from . import lagrangian as L
from . import presets as P
from .errors import AnalyticFallback, ConfigurationError


class Scenario(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    SUPERCRITICAL = "Supercritical"
    MAX_PRINCIPLE = "MaxPrinciple"
    BOUNDED_KERNEL = "BoundedKernel"
    CROSS_VALIDATE = "CrossValidate"
    BLOWUP_REFINEMENT = "BlowupRefinement"

    @classmethod
    def parse(cls, name: str) -> "Scenario":
        key = name.replace("-", "").replace("_", "").lower()
        for s in cls:
            if s.value.lower() == key:
                return s
        raise ConfigurationError(f"unknown scenario {name!r}")


DEFAULT_TOLERANCES = {
    "rho": 0.05,
    "G": 0.05,
    "max_principle": 0.02,
    "cross": 0.03,
    "blowup_agreement": 0.10,
    "cauchy_ratio": 1.5,
    # Eulerian cell averages saturate near M/dx; blow-up is timed at this multiple of ||rho0||_inf
    "euler_blowup_factor": 20.0,
}


@dataclass
class Campaign:
    scenario: Scenario
    kernel: dict
    preset: str
    preset_params: dict = field(default_factory=dict)
    ladder: list = field(default_factory=lambda: [[128, 1e-2], [256, 1e-2], [512, 1e-2]])
    t_end: float = 10.0
    order: int = 2
    cap: float = 1e6
    tolerances: dict = field(default_factory=dict)
    solvers: tuple = ("eulerian", "lagrangian")

    def __post_init__(self):
        self.scenario = Scenario(self.scenario) if not isinstance(self.scenario, Scenario) else self.scenario
        self.ladder = [[int(n), float(dt)] for n, dt in self.ladder]
        sizes = [n for n, _ in self.ladder]
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ConfigurationError(f"resolution ladder must be nonempty and strictly increasing, got {sizes}")
        self.solvers = tuple(self.solvers)

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def build_kernel(self) -> K.KernelSpec:
        return K.kernel_from_dict(self.kernel)

    def build_preset(self, kernel=None) -> P.Preset:
        return P.make_preset(self.preset, kernel or self.build_kernel(), **self.preset_params)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scenario"] = self.scenario.value
        d["solvers"] = list(self.solvers)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Campaign":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Campaign":
        return cls.from_dict(json.loads(text))


@dataclass
class Assertion:
    name: str
    invariant: str
    passed: bool
    measured: float | None = None
    bound: float | None = None
    detail: str = ""


@dataclass
class VerificationReport:
    scenario: Scenario
    campaign: dict
    assertions: list = field(default_factory=list)
    quantities: dict = field(default_factory=dict)
    rungs: list = field(default_factory=list)

    def check(self, name, invariant, passed, measured=None, bound=None, detail=""):
        self.assertions.append(Assertion(name, invariant, bool(passed),
                                         None if measured is None else float(measured),
                                         None if bound is None else float(bound), detail))

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "passed": self.passed,
            "campaign": self.campaign,
            "assertions": [asdict(a) for a in self.assertions],
            "quantities": _jsonable(self.quantities),
            "rungs": _jsonable(self.rungs),
        }

    def to_json(self, **kw) -> str:
        kw.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kw)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario.value}  ->  {'PASS' if self.passed else 'FAIL'}"]
        for k, v in self.quantities.items():
            lines.append(f"  {k} = {v}")
        for a in self.assertions:
            mark = "PASS" if a.passed else "FAIL"
            vals = ""
            if a.measured is not None:
                vals = f"  measured={a.measured:.6g}"
                if a.bound is not None:
                    vals += f"  bound={a.bound:.6g}"
            lines.append(f"  [{mark}] {a.name}: {a.invariant}{vals}{'  ' + a.detail if a.detail else ''}")
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _bound_inputs(preset: P.Preset, kernel) -> B.BoundInputs:
    return B.BoundInputs(M=preset.M, C0=preset.C0, kernel=kernel,
                         rho0_sup=preset.rho0_sup, g0_sup=preset.G0_sup)


def run_eulerian(campaign: Campaign, preset: P.Preset, kernel, N: int, **overrides) -> E.RunDiagnostics:
    cfg = E.SimConfig(N=N, t_end=campaign.t_end, order=campaign.order, rho_cap=campaign.cap,
                      g_floor=-campaign.cap, output_stride=1, **overrides)
    return E.run(cfg, preset.rho0, preset.u0, kernel)


def run_lagrangian(campaign: Campaign, preset: P.Preset, kernel, n: int, dt: float, t_end=None) -> L.LagrangianResult:
    sys = L.seed_from_primitive(preset.rho0, preset.u0, kernel, n, du0=preset.du0)
    return L.integrate(sys, kernel, dt, campaign.t_end if t_end is None else t_end, cap=campaign.cap)


def _classify(campaign: Campaign, preset: P.Preset):
    if campaign.scenario is Scenario.SUBCRITICAL and not preset.inf_G0 > 0.0:
        raise ConfigurationError(f"scenario Subcritical but inf G0 = {preset.inf_G0!r} <= 0")
    if campaign.scenario in (Scenario.SUPERCRITICAL, Scenario.BLOWUP_REFINEMENT) and not preset.inf_G0 < 0.0:
        raise ConfigurationError(f"scenario {campaign.scenario.value} but inf G0 = {preset.inf_G0!r} >= 0")


def verify_threshold(campaign: Campaign) -> VerificationReport:
    """Subcritical: uniform bounds hold on every solver at the finest rung.
    Supercritical: every rung reaches blow-up and the blow-up times converge."""
    if campaign.scenario not in (Scenario.SUBCRITICAL, Scenario.SUPERCRITICAL, Scenario.BOUNDED_KERNEL,
                                 Scenario.BLOWUP_REFINEMENT):
        raise ConfigurationError(f"verify_threshold does not handle {campaign.scenario.value}")
    kernel = campaign.build_kernel()
    preset = campaign.build_preset(kernel)
    _classify(campaign, preset)
    report = VerificationReport(campaign.scenario, campaign.to_dict())
    report.quantities.update(preset=preset.name, C0=preset.C0, inf_G0=preset.inf_G0,
                             l1_norm=kernel.l1_norm(), rho0_sup=preset.rho0_sup, G0_sup=preset.G0_sup)
    if preset.subcritical:
        _verify_subcritical(campaign, preset, kernel, report)
    else:
        _verify_supercritical(campaign, preset, kernel, report)
    return report


def _verify_subcritical(campaign, preset, kernel, report):
    bnd = B.compute_bounds(_bound_inputs(preset, kernel))
    report.quantities.update(beta=bnd.beta, gamma=bnd.gamma, regime=bnd.regime.value,
                             rho_bound=bnd.rho_bound, G_bound=bnd.g_bound, k0=bnd.k0, k_star=bnd.k_star)
    if campaign.scenario is Scenario.BOUNDED_KERNEL:
        report.check("bounded_regime", "bounded kernel selects the M||psi||_inf/C0 branch",
                     bnd.regime is B.Regime.BOUNDED_KERNEL)
    tol_rho, tol_G = campaign.tol("rho"), campaign.tol("G")
    finest = len(campaign.ladder) - 1
    for r, (n, dt) in enumerate(campaign.ladder):
        for solver in campaign.solvers:
            if solver == "eulerian":
                d = run_eulerian(campaign, preset, kernel, n)
                rho_max, G_max, G_min, outcome = d.max_rho_inf, d.max_G_inf, d.min_G, d.outcome.value
            else:
                d = run_lagrangian(campaign, preset, kernel, n, dt)
                rho_max, G_max = d.max_rho, d.max_G_inf
                G_min, outcome = float(d.series("G_min").min()), d.outcome
            report.rungs.append({"solver": solver, "resolution": n, "dt": dt, "outcome": outcome,
                                 "max_rho_inf": rho_max, "max_G_inf": G_max, "min_G": G_min})
            report.check(f"{solver}[{n}].no_cap", "subcritical data never reaches a cap",
                         outcome == "CompletedGlobal", detail=outcome)
            report.check(f"{solver}[{n}].G_nonnegative", "0 <= G along characteristics (discrete: G >= -1e-6)",
                         G_min >= -1e-6, measured=G_min, bound=-1e-6)
            if r == finest:
                report.check(f"{solver}[{n}].rho_bound", "||rho(t)||_inf <= (1+tol) max(||rho0||_inf, beta)",
                             rho_max <= (1.0 + tol_rho) * bnd.rho_bound, measured=rho_max,
                             bound=(1.0 + tol_rho) * bnd.rho_bound)
                report.check(f"{solver}[{n}].G_bound", "||G(t)||_inf <= (1+tol) max(||G0||_inf, gamma)",
                             G_max <= (1.0 + tol_G) * bnd.g_bound, measured=G_max,
                             bound=(1.0 + tol_G) * bnd.g_bound)


def riccati_blowup_bound(G0: np.ndarray, rho0: np.ndarray) -> float:
    """Latest possible blow-up time along the worst characteristic.

    With ``G0 < 0`` the density obeys ``rho' >= (|G0|/rho0) rho^2`` and blows
    up no later than ``1/|G0|``.
    """
    mask = (G0 < 0.0) & (rho0 > 0.0)
    return float(np.min(1.0 / np.abs(G0[mask]))) if mask.any() else math.inf


def _cauchy(times):
    diffs = [abs(b - a) for a, b in zip(times, times[1:])]
    ratios = [d0 / d1 if d1 > 0 else math.inf for d0, d1 in zip(diffs, diffs[1:])]
    return diffs, ratios


def _verify_supercritical(campaign, preset, kernel, report):
    lag_times, eul_times = [], []
    bounds = []
    factor = campaign.tol("euler_blowup_factor")
    for n, dt in campaign.ladder:
        if "lagrangian" in campaign.solvers:
            sys = L.seed_from_primitive(preset.rho0, preset.u0, kernel, n, du0=preset.du0)
            bounds.append(riccati_blowup_bound(sys.G, sys.rho))
            d = L.integrate(sys, kernel, dt, campaign.t_end, cap=campaign.cap)
            report.rungs.append({"solver": "lagrangian", "resolution": n, "dt": dt, "outcome": d.outcome,
                                 "event_time": d.event_time, "riccati_bound": bounds[-1],
                                 "min_G": float(d.series("G_min").min())})
            report.check(f"lagrangian[{n}].blowup", "inf G0 < 0 => rho_i exceeds the cap in finite time",
                         d.outcome == "BlowupDetected", measured=d.event_time, detail=d.outcome)
            lag_times.append(d.event_time if d.event_time is not None else math.inf)
        if "eulerian" in campaign.solvers:
            d = run_eulerian(campaign, preset, kernel, n, rho_blowup=factor * preset.rho0_sup)
            report.rungs.append({"solver": "eulerian", "resolution": n, "outcome": d.outcome.value,
                                 "event_time": d.event_time, "threshold": factor * preset.rho0_sup,
                                 "min_G": d.min_G})
            report.check(f"eulerian[{n}].blowup",
                         f"inf G0 < 0 => ||rho||_inf reaches {factor:g} ||rho0||_inf (grid-resolvable level)",
                         d.outcome is not E.Outcome.COMPLETED_GLOBAL, measured=d.event_time,
                         detail=d.outcome.value)
            eul_times.append(d.event_time if d.event_time is not None else math.inf)
    agree = campaign.tol("blowup_agreement")
    for solver, times in (("lagrangian", lag_times), ("eulerian", eul_times)):
        if len(times) < 2:
            continue
        rel = abs(times[-1] - times[-2]) / times[-1] if math.isfinite(times[-1]) else math.inf
        report.check(f"{solver}.finest_agreement", "blow-up times of the two finest rungs agree",
                     rel < agree, measured=rel, bound=agree)
        diffs, ratios = _cauchy(times)
        report.quantities[f"{solver}_blowup_times"] = times
        report.quantities[f"{solver}_time_differences"] = diffs
        report.quantities[f"{solver}_shrink_ratios"] = ratios
    if len(eul_times) >= 3:
        _, ratios = _cauchy(eul_times)
        need = campaign.tol("cauchy_ratio")
        report.check("eulerian.cauchy", f"successive blow-up time differences shrink by >= {need:g}x",
                     all(r >= need for r in ratios), measured=min(ratios), bound=need)
    if bounds:
        report.quantities["riccati_upper_bounds"] = bounds


def verify_max_principle(campaign: Campaign) -> VerificationReport:
    """``C0 > ||psi||_1``: beta = 0 and the density never exceeds its initial sup."""
    kernel = campaign.build_kernel()
    preset = campaign.build_preset(kernel)
    l1 = kernel.l1_norm()
    if not preset.C0 > l1:
        raise ConfigurationError(f"max-principle campaign needs C0 > ||psi||_1 (C0={preset.C0!r}, ||psi||_1={l1!r})")
    report = VerificationReport(Scenario.MAX_PRINCIPLE, campaign.to_dict())
    bnd = B.compute_bounds(_bound_inputs(preset, kernel))
    report.quantities.update(preset=preset.name, C0=preset.C0, l1_norm=l1, inf_G0=preset.inf_G0,
                             beta=bnd.beta, regime=bnd.regime.value, notes=preset.notes)
    report.check("beta_zero", "C0 > ||psi||_1 => beta = 0 (MaxPrinciple regime)",
                 bnd.beta == 0.0 and bnd.regime is B.Regime.MAX_PRINCIPLE, measured=bnd.beta, bound=0.0)
    tol = campaign.tol("max_principle")
    n = campaign.ladder[-1][0]
    d = run_eulerian(campaign, preset, kernel, n)
    rho0_sup = d.series("rho_inf")[0]
    report.rungs.append({"solver": "eulerian", "resolution": n, **d.summary()})
    report.check(f"eulerian[{n}].max_principle", "||rho(t)||_inf <= (1+tol) ||rho0||_inf",
                 d.max_rho_inf <= (1.0 + tol) * rho0_sup, measured=d.max_rho_inf, bound=(1.0 + tol) * rho0_sup)
    return report


def _sup_series_gap(eul: E.RunDiagnostics, lag: L.LagrangianResult) -> float:
    te, re = eul.series("t"), eul.series("rho_inf")
    tl, rl = lag.series("t"), lag.series("rho_max")
    lag_on_eul = np.interp(te, tl, rl)
    return float(np.max(np.abs(re - lag_on_eul) / re))


def cross_validate(campaign: Campaign) -> VerificationReport:
    """Compare the ``||rho||_inf`` time series of both solvers rung by rung."""
    kernel = campaign.build_kernel()
    preset = campaign.build_preset(kernel)
    report = VerificationReport(Scenario.CROSS_VALIDATE, campaign.to_dict())
    report.quantities.update(preset=preset.name, C0=preset.C0, inf_G0=preset.inf_G0)
    if preset.inf_G0 > 0.0:
        bnd = B.compute_bounds(_bound_inputs(preset, kernel))
        report.quantities.update(beta=bnd.beta, gamma=bnd.gamma, regime=bnd.regime.value)
    gaps = []
    for n, dt in campaign.ladder:
        eul = run_eulerian(campaign, preset, kernel, n)
        lag = run_lagrangian(campaign, preset, kernel, n, dt)
        gap = _sup_series_gap(eul, lag)
        gaps.append(gap)
        report.rungs.append({"resolution": n, "dt": dt, "gap": gap,
                             "eulerian_max_rho": eul.max_rho_inf, "lagrangian_max_rho": lag.max_rho})
    report.quantities["gaps"] = gaps
    tol = campaign.tol("cross")
    report.check("finest_agreement", "sup-norm time series agree within tolerance at the finest rung",
                 gaps[-1] <= tol, measured=gaps[-1], bound=tol)
    shrinking = all(b <= a or b <= 1e-12 for a, b in zip(gaps, gaps[1:]))
    report.check("refinement", "disagreement does not grow under refinement", shrinking,
                 detail=" -> ".join(f"{g:.3g}" for g in gaps))
    return report


SWEEP_COLUMNS = ("kernel", "alpha", "M", "C0", "l1_norm", "k0", "k_star", "beta", "gamma", "regime",
                 "beta_numeric", "beta_analytic", "rel_gap", "analytic_status")


def sweep_beta_surface(kernels, masses, c0s, rho0_sup: float = 0.0) -> list[dict]:
    """Bound report over a ``kernel x M x C0`` grid; power laws also carry the
    closed form and the numeric-analytic relative gap."""
    if not kernels or not masses or not c0s:
        raise ConfigurationError("sweep grids must be nonempty")
    rows = []
    for ker in kernels:
        for M in masses:
            for C0 in c0s:
                inp = B.BoundInputs(M=float(M), C0=float(C0), kernel=ker, rho0_sup=rho0_sup)
                rep = B.compute_bounds(inp)
                row = {
                    "kernel": K.kernel_to_dict(ker)["kind"] if not isinstance(ker, K.BoundedAnalytic) else ker.name,
                    "alpha": getattr(ker, "alpha", None),
                    "M": float(M), "C0": float(C0), "l1_norm": rep.l1_norm,
                    "k0": rep.k0, "k_star": rep.k_star, "beta": rep.beta, "gamma": rep.gamma,
                    "regime": rep.regime.value, "beta_numeric": rep.beta_numeric,
                    "beta_analytic": None, "rel_gap": None, "analytic_status": "",
                }
                if isinstance(ker, K.PowerLaw):
                    try:
                        ba, _, _ = B.beta_analytic_powerlaw(ker.alpha, float(M), float(C0))
                        row["beta_analytic"] = ba
                        bn = rep.beta_numeric
                        row["rel_gap"] = abs(bn - ba) / ba if bn is not None else None
                        row["analytic_status"] = "ok"
                    except AnalyticFallback as exc:
                        row["analytic_status"] = f"fallback: {exc}"
                rows.append(row)
    return rows


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r[k] is None else r[k]) for k in SWEEP_COLUMNS})


# Named campaigns used by the command line and the acceptance suite.

SPIKE_TABLE = {"kind": "tabulated", "table_radii": [0.01, 0.03, 0.1, 0.5], "table_values": [10.0, 3.0, 1.0, 0.5]}

SUBCRITICAL_KERNELS = [
    {"kind": "power_law", "alpha": 0.25},
    {"kind": "power_law", "alpha": 0.5},
    {"kind": "power_law", "alpha": 0.75},
    {"kind": "constant", "sup_norm": 1.0},
    SPIKE_TABLE,
]

SUBCRITICAL_PRESETS = [("sine_velocity", {"amplitude": 0.1}), ("density_wave", {"amplitude": 0.3})]

SUPERCRITICAL_CASES = [
    ({"kind": "power_law", "alpha": 0.5}, "sine_velocity", {"amplitude": -2.0}),
    ({"kind": "constant", "sup_norm": 1.0}, "sine_velocity", {"amplitude": -0.5}),
    ({"kind": "zero"}, "sine_velocity", {"amplitude": -0.2}),
]


def subcritical_matrix(ladder=((256, 1e-2), (512, 1e-2)), t_end=10.0):
    return [Campaign(Scenario.SUBCRITICAL, kern, name, dict(params), ladder=[list(r) for r in ladder], t_end=t_end)
            for kern in SUBCRITICAL_KERNELS for name, params in SUBCRITICAL_PRESETS]


def supercritical_matrix(ladder=((128, 1e-3), (256, 1e-3), (512, 1e-3)), t_end=2.0):
    return [Campaign(Scenario.SUPERCRITICAL, kern, name, dict(params), ladder=[list(r) for r in ladder], t_end=t_end)
            for kern, name, params in SUPERCRITICAL_CASES]


def max_principle_campaign(N=512, t_end=10.0):
    return Campaign(Scenario.MAX_PRINCIPLE, {"kind": "constant", "sup_norm": 0.1}, "vacuum_bump",
                    {"ratio": 1.1, "width": 0.5}, ladder=[[N, 1e-2]], t_end=t_end, solvers=("eulerian",))


def cross_validate_campaign(ladder=((128, 1e-2), (256, 1e-2), (512, 1e-2)), t_end=10.0):
    return Campaign(Scenario.CROSS_VALIDATE, {"kind": "power_law", "alpha": 0.5}, "sine_velocity",
                    {"amplitude": 0.1}, ladder=[list(r) for r in ladder], t_end=t_end)


def run_campaign(campaign: Campaign) -> VerificationReport:
    s = campaign.scenario
    if s is Scenario.MAX_PRINCIPLE:
        return verify_max_principle(campaign)
    if s is Scenario.CROSS_VALIDATE:
        return cross_validate(campaign)
    return verify_threshold(campaign)
