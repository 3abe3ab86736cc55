"""Command line entry point: ``bound``, ``simulate``, ``verify``, ``sweep``, ``compare``.

Exit codes: 0 success, 1 a verification assertion failed, 2 usage or
configuration error, 3 numerical abort (step size underflow).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import bounds as B
from . import eulerian as E
from . import harness as H
from . import kernels as K
from . import lagrangian as L
from . import presets as P
from .config import ConfigValidationError, parse_config
from .errors import ConfigurationError, DomainError, StepSizeError

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3

BOUND_CSV_COLUMNS = ("alpha_or_kind", "M", "C0", "k0", "k_star", "beta", "gamma", "regime")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


# bound -------------------------------------------------------------------

def _bound_inputs(args) -> tuple[B.BoundInputs, str]:
    kernel_block, M, C0, rho_sup, g_sup = None, None, None, 0.0, 0.0
    if args.config:
        cfg = parse_config(args.config)
        kernel_block = cfg.kernel
        kernel = K.kernel_from_dict(kernel_block)
        preset = P.make_preset(cfg.preset_name, kernel, **cfg.preset_params)
        M, C0, rho_sup, g_sup = preset.M, preset.C0, preset.rho0_sup, preset.G0_sup
    if args.alpha is not None:
        kernel_block = {"kind": "power_law", "alpha": args.alpha}
    elif args.sup_norm is not None:
        kernel_block = {"kind": "constant", "sup_norm": args.sup_norm}
    M = args.mass if args.mass is not None else M
    C0 = args.c0 if args.c0 is not None else C0
    rho_sup = args.rho0_sup if args.rho0_sup is not None else rho_sup
    g_sup = args.g0_sup if args.g0_sup is not None else g_sup
    missing = [name for name, v in (("kernel (--alpha, --sup-norm or --config)", kernel_block),
                                    ("--mass", M), ("--c0", C0)) if v is None]
    if missing:
        raise ConfigurationError("bound needs " + ", ".join(missing))
    kernel = K.kernel_from_dict(kernel_block)
    label = str(kernel_block["alpha"]) if kernel_block["kind"] == "power_law" else kernel_block["kind"]
    return B.BoundInputs(M=M, C0=C0, kernel=kernel, rho0_sup=rho_sup, g0_sup=g_sup), label


def cmd_bound(args) -> int:
    inputs, label = _bound_inputs(args)
    rep = B.compute_bounds(inputs)
    rows = [("kernel", label), ("M", inputs.M), ("C0", inputs.C0), ("l1_norm", rep.l1_norm),
            ("regime", rep.regime.value), ("k0", rep.k0), ("k_star", rep.k_star), ("beta", rep.beta),
            ("beta_numeric", rep.beta_numeric), ("gamma", rep.gamma), ("rho_bound", rep.rho_bound),
            ("G_bound", rep.g_bound)]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}} = {_fmt(v)}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(BOUND_CSV_COLUMNS)
            w.writerow([label, repr(inputs.M), repr(inputs.C0),
                        "" if rep.k0 is None else repr(rep.k0), "" if rep.k_star is None else repr(rep.k_star),
                        repr(rep.beta), repr(rep.gamma), rep.regime.value])
    return EXIT_OK


# simulate ----------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    s, out = cfg.solver, cfg.output
    scheme = args.scheme or s["scheme"]
    kernel = K.kernel_from_dict(cfg.kernel)
    preset = P.make_preset(cfg.preset_name, kernel, **cfg.preset_params)
    diag_path = args.diagnostics or out["diagnostics_csv"]
    if scheme == "eulerian":
        sim = E.SimConfig(N=s["N"], cfl=s["cfl"], t_end=s["t_end"], order=s["order"], rho_cap=s["rho_cap"],
                          g_floor=s["g_floor"], output_stride=out["stride"], dt_max=s["dt_max"],
                          rho_blowup=s["rho_blowup"], snapshot_times=tuple(out["snapshot_times"]))
        result = E.run(sim, preset.rho0, preset.u0, kernel)
        snap_path = args.snapshots or out["snapshots_csv"]
        if snap_path:
            result.snapshots_to_csv(snap_path)
    else:
        system = L.seed_from_primitive(preset.rho0, preset.u0, kernel, s["n"], du0=preset.du0)
        traj_path = args.trajectory or out["trajectory_csv"]
        result = L.integrate(system, kernel, s["dt"], s["t_end"], cap=s["rho_cap"],
                             stride=out["stride"] if traj_path else 0)
        if traj_path:
            result.trajectory_to_csv(traj_path)
    if diag_path:
        result.to_csv(diag_path)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(result.columns)
        for r in result.rows:
            w.writerow([repr(float(v)) for v in r])
    summary = {"scheme": scheme, "preset": preset.name, "C0": preset.C0, "inf_G0": preset.inf_G0,
               **result.summary()}
    print(json.dumps(H._jsonable(summary), indent=2), file=sys.stderr if not diag_path else sys.stdout)
    return EXIT_OK


# verify / compare --------------------------------------------------------

def _campaign_from_config(cfg, scenario: H.Scenario, default_ladder) -> H.Campaign:
    c = cfg.campaign
    return H.Campaign(
        scenario=scenario, kernel=cfg.kernel, preset=cfg.preset_name, preset_params=cfg.preset_params,
        ladder=c.get("ladder", default_ladder), t_end=c.get("t_end", cfg.solver["t_end"]),
        order=c.get("order", cfg.solver["order"]), cap=c.get("cap", cfg.solver["rho_cap"]),
        tolerances=c.get("tolerances", {}), solvers=tuple(c.get("solvers", ("eulerian", "lagrangian"))),
    )


def default_campaigns(scenario: H.Scenario) -> list[H.Campaign]:
    if scenario is H.Scenario.SUBCRITICAL:
        return H.subcritical_matrix()
    if scenario is H.Scenario.BOUNDED_KERNEL:
        return [c for c in H.subcritical_matrix() if c.kernel.get("kind") == "constant"]
    if scenario in (H.Scenario.SUPERCRITICAL, H.Scenario.BLOWUP_REFINEMENT):
        cs = H.supercritical_matrix()
        for c in cs:
            c.scenario = scenario
        return cs
    if scenario is H.Scenario.MAX_PRINCIPLE:
        return [H.max_principle_campaign()]
    return [H.cross_validate_campaign()]


def _default_ladder(scenario):
    return [list(r) for r in default_campaigns(scenario)[0].ladder]


def _write_reports(reports, path):
    if path:
        with open(path, "w") as fh:
            json.dump({"passed": all(r.passed for r in reports),
                       "reports": [r.to_dict() for r in reports]}, fh, indent=2)


def cmd_verify(args) -> int:
    scenario = H.Scenario.parse(args.scenario)
    if args.config:
        cfg = parse_config(args.config)
        campaigns = [_campaign_from_config(cfg, scenario, _default_ladder(scenario))]
        report_path = args.report or cfg.output["report_json"]
    else:
        campaigns = default_campaigns(scenario)
        report_path = args.report
    reports = []
    for c in campaigns:
        r = H.run_campaign(c)
        reports.append(r)
        print(r.to_text(), flush=True)
    _write_reports(reports, report_path)
    ok = all(r.passed for r in reports)
    print(f"{sum(r.passed for r in reports)}/{len(reports)} campaigns passed")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_compare(args) -> int:
    cfg = parse_config(args.config)
    ladder = cfg.campaign.get("ladder", _default_ladder(H.Scenario.CROSS_VALIDATE))
    if args.ladder:
        ladder = [[int(n), float(dt)] for n, dt in (item.split(":") for item in args.ladder.split(","))]
    campaign = _campaign_from_config(cfg, H.Scenario.CROSS_VALIDATE, ladder)
    campaign.ladder = ladder
    r = H.cross_validate(campaign)
    print(r.to_text())
    _write_reports([r], args.report or cfg.output["report_json"])
    return EXIT_OK if r.passed else EXIT_FAILED


# sweep -------------------------------------------------------------------

def cmd_sweep(args) -> int:
    kernels = [K.PowerLaw(a) for a in args.alpha]
    kernels += [K.constant_kernel(c) for c in args.sup_norm]
    if not kernels:
        raise ConfigurationError("sweep needs --alpha and/or --sup-norm values")
    rows = H.sweep_beta_surface(kernels, args.mass, args.c0, rho0_sup=args.rho0_sup)
    if args.csv:
        H.write_sweep_csv(rows, args.csv)
    cols = ("kernel", "alpha", "M", "C0", "k0", "k_star", "beta", "gamma", "regime", "rel_gap")
    print("  ".join(f"{c:>14}" for c in cols))
    for r in rows:
        print("  ".join(f"{_fmt(r[c]):>14}" for c in cols))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="euler-alignment", description="Density bounds and solvers for 1D Euler-alignment.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("bound", help="optimized density bound for a kernel, mass and C0")
    b.add_argument("--config", help="config path or built-in name")
    b.add_argument("--alpha", type=float, help="power-law kernel exponent in (0,1)")
    b.add_argument("--sup-norm", type=float, help="constant kernel value")
    b.add_argument("--mass", type=float)
    b.add_argument("--c0", type=float)
    b.add_argument("--rho0-sup", type=float)
    b.add_argument("--g0-sup", type=float)
    b.add_argument("--csv", help="also write the report as a one-row CSV")
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("simulate", help="run one solver from a config")
    s.add_argument("--config", required=True)
    s.add_argument("--scheme", choices=("eulerian", "lagrangian"))
    s.add_argument("--diagnostics", help="diagnostics CSV path (default: stdout)")
    s.add_argument("--snapshots", help="Eulerian field snapshots CSV path")
    s.add_argument("--trajectory", help="Lagrangian trajectory CSV path")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run a verification scenario")
    v.add_argument("--scenario", required=True,
                   help="subcritical, supercritical, maxprinciple, boundedkernel, crossvalidate, blowuprefinement")
    v.add_argument("--config", help="config path or built-in name (default: the built-in campaign set)")
    v.add_argument("--report", help="structured JSON report path")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="tabulate bounds over kernel x M x C0 grids")
    w.add_argument("--alpha", type=_floats, default=[])
    w.add_argument("--sup-norm", type=_floats, default=[])
    w.add_argument("--mass", type=_floats, default=[1.0])
    w.add_argument("--c0", type=_floats, required=True)
    w.add_argument("--rho0-sup", type=float, default=0.0)
    w.add_argument("--csv")
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="cross-validate the two solvers on a config")
    c.add_argument("--config", required=True)
    c.add_argument("--ladder", help="comma-separated n:dt rungs, e.g. 128:0.01,256:0.01")
    c.add_argument("--report")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigValidationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepSizeError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
