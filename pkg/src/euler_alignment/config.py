"""Run configuration files (JSON) and their validation.

See ``docs/config_schema.md`` for the documented keys.  Validation collects
every problem before raising, and unknown keys are errors.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError

KERNEL_KINDS = ("power_law", "constant", "zero", "tabulated")
KERNEL_KEYS = {"kind", "alpha", "sup_norm", "table_radii", "table_values"}

PRESET_KEYS = {
    "sine_velocity": {"amplitude", "mass"},
    "density_wave": {"amplitude", "mass"},
    "flat": {"mass", "velocity"},
    "vacuum_bump": {"ratio", "width", "mass"},
}

SOLVER_DEFAULTS = {
    "scheme": "eulerian",
    "N": 256,
    "n": 256,
    "dt": 1e-2,
    "cfl": 0.4,
    "t_end": 10.0,
    "order": 1,
    "rho_cap": 1e6,
    "g_floor": -1e6,
    "dt_max": 1e-2,
    "rho_blowup": None,
}

OUTPUT_DEFAULTS = {
    "diagnostics_csv": None,
    "snapshots_csv": None,
    "snapshot_times": [],
    "trajectory_csv": None,
    "stride": 1,
    "report_json": None,
}

CAMPAIGN_KEYS = {"ladder", "tolerances", "order", "t_end", "cap", "solvers"}

TOP_KEYS = {"kernel", "data", "solver", "output", "campaign"}


class ConfigValidationError(ConfigurationError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass
class RunConfig:
    kernel: dict
    data: dict
    solver: dict = field(default_factory=lambda: dict(SOLVER_DEFAULTS))
    output: dict = field(default_factory=lambda: copy.deepcopy(OUTPUT_DEFAULTS))
    campaign: dict = field(default_factory=dict)

    @property
    def preset_name(self) -> str:
        return self.data["preset"]

    @property
    def preset_params(self) -> dict:
        return {k: v for k, v in self.data.items() if k != "preset"}

    def to_dict(self) -> dict:
        return {"kernel": self.kernel, "data": self.data, "solver": self.solver,
                "output": self.output, "campaign": self.campaign}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _unknown(block: dict, allowed: set, where: str, errors: list):
    for key in sorted(set(block) - allowed):
        errors.append(f"{where}: unknown key {key!r}")


def _validate_kernel(block, errors):
    if not isinstance(block, dict):
        errors.append("kernel: must be an object")
        return
    _unknown(block, KERNEL_KEYS, "kernel", errors)
    kind = block.get("kind")
    if kind not in KERNEL_KINDS:
        errors.append(f"kernel.kind: must be one of {', '.join(KERNEL_KINDS)}, got {kind!r}")
        return
    if kind == "power_law":
        a = block.get("alpha")
        if not _is_number(a) or not 0.0 < a < 1.0:
            errors.append(f"kernel.alpha: must lie in the open interval (0,1), got {a!r}")
    elif kind == "constant":
        c = block.get("sup_norm")
        if not _is_number(c) or c < 0.0:
            errors.append(f"kernel.sup_norm: must be a number >= 0, got {c!r}")
    elif kind == "tabulated":
        r, v = block.get("table_radii"), block.get("table_values")
        if not isinstance(r, list) or not isinstance(v, list) or not r or len(r) != len(v):
            errors.append("kernel.table_radii/table_values: must be nonempty lists of equal length")
        elif not all(_is_number(x) for x in r + v):
            errors.append("kernel.table_radii/table_values: entries must be finite numbers")
        else:
            if any(x <= 0.0 for x in r) or any(b <= a for a, b in zip(r, r[1:])) or r[-1] > 0.5:
                errors.append("kernel.table_radii: must be positive, strictly increasing and <= 0.5")
            if any(x < 0.0 for x in v):
                errors.append("kernel.table_values: must be nonnegative")


def _validate_data(block, errors):
    if not isinstance(block, dict):
        errors.append("data: must be an object")
        return
    preset = block.get("preset")
    if preset not in PRESET_KEYS:
        errors.append(f"data.preset: must be one of {', '.join(PRESET_KEYS)}, got {preset!r}")
        return
    _unknown(block, PRESET_KEYS[preset] | {"preset"}, "data", errors)
    for key in PRESET_KEYS[preset] & set(block):
        if not _is_number(block[key]):
            errors.append(f"data.{key}: must be a finite number, got {block[key]!r}")
    if _is_number(block.get("mass", 1.0)) and block.get("mass", 1.0) <= 0.0:
        errors.append("data.mass: must be positive")
    if preset == "density_wave" and _is_number(block.get("amplitude", 0.3)):
        if not 0.0 <= block.get("amplitude", 0.3) < 1.0:
            errors.append("data.amplitude: density_wave amplitude must lie in [0,1)")


def _validate_solver(block, errors):
    if not isinstance(block, dict):
        errors.append("solver: must be an object")
        return
    _unknown(block, set(SOLVER_DEFAULTS), "solver", errors)
    s = {**SOLVER_DEFAULTS, **block}
    if s["scheme"] not in ("eulerian", "lagrangian"):
        errors.append(f"solver.scheme: must be 'eulerian' or 'lagrangian', got {s['scheme']!r}")
    for key in ("N", "n"):
        v = s[key]
        if not isinstance(v, int) or isinstance(v, bool):
            errors.append(f"solver.{key}: must be an integer, got {v!r}")
        elif key == "N" and (v < 32 or v % 2):
            errors.append(f"solver.N: must be even and >= 32, got {v!r}")
        elif key == "n" and v < 2:
            errors.append(f"solver.n: must be >= 2, got {v!r}")
    if not _is_number(s["cfl"]) or not 0.0 < s["cfl"] <= 0.5:
        errors.append(f"solver.cfl: must lie in (0,0.5], got {s['cfl']!r}")
    for key in ("t_end", "dt", "dt_max", "rho_cap"):
        if not _is_number(s[key]) or s[key] <= 0.0:
            errors.append(f"solver.{key}: must be a positive number, got {s[key]!r}")
    if not _is_number(s["g_floor"]) or s["g_floor"] >= 0.0:
        errors.append(f"solver.g_floor: must be a negative number, got {s['g_floor']!r}")
    if s["order"] not in (1, 2):
        errors.append(f"solver.order: must be 1 or 2, got {s['order']!r}")
    if s["rho_blowup"] is not None and (not _is_number(s["rho_blowup"]) or s["rho_blowup"] <= 0.0):
        errors.append(f"solver.rho_blowup: must be null or positive, got {s['rho_blowup']!r}")


def _validate_output(block, errors):
    if not isinstance(block, dict):
        errors.append("output: must be an object")
        return
    _unknown(block, set(OUTPUT_DEFAULTS), "output", errors)
    for key in ("diagnostics_csv", "snapshots_csv", "trajectory_csv", "report_json"):
        v = block.get(key)
        if v is not None and not isinstance(v, str):
            errors.append(f"output.{key}: must be a path string or null")
    times = block.get("snapshot_times", [])
    if not isinstance(times, list) or not all(_is_number(t) and t >= 0.0 for t in times):
        errors.append("output.snapshot_times: must be a list of nonnegative numbers")
    stride = block.get("stride", 1)
    if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
        errors.append(f"output.stride: must be an integer >= 1, got {stride!r}")


def _validate_campaign(block, errors):
    if not isinstance(block, dict):
        errors.append("campaign: must be an object")
        return
    _unknown(block, CAMPAIGN_KEYS, "campaign", errors)
    ladder = block.get("ladder")
    if ladder is not None:
        ok = isinstance(ladder, list) and ladder and all(
            isinstance(r, list) and len(r) == 2 and isinstance(r[0], int) and _is_number(r[1]) and r[1] > 0
            for r in ladder)
        if not ok:
            errors.append("campaign.ladder: must be a nonempty list of [resolution, dt] pairs")
        elif any(b[0] <= a[0] for a, b in zip(ladder, ladder[1:])):
            errors.append("campaign.ladder: resolutions must be strictly increasing")


def validate_dict(raw) -> list[str]:
    errors: list[str] = []
    if not isinstance(raw, dict):
        return ["configuration root must be an object"]
    _unknown(raw, TOP_KEYS, "config", errors)
    for key in ("kernel", "data"):
        if key not in raw:
            errors.append(f"config: missing required block {key!r}")
    if "kernel" in raw:
        _validate_kernel(raw["kernel"], errors)
    if "data" in raw:
        _validate_data(raw["data"], errors)
    if "solver" in raw:
        _validate_solver(raw["solver"], errors)
    if "output" in raw:
        _validate_output(raw["output"], errors)
    if "campaign" in raw:
        _validate_campaign(raw["campaign"], errors)
    return errors


def config_from_dict(raw) -> RunConfig:
    errors = validate_dict(raw)
    if errors:
        raise ConfigValidationError(errors)
    return RunConfig(
        kernel=dict(raw["kernel"]),
        data=dict(raw["data"]),
        solver={**SOLVER_DEFAULTS, **raw.get("solver", {})},
        output={**copy.deepcopy(OUTPUT_DEFAULTS), **raw.get("output", {})},
        campaign=dict(raw.get("campaign", {})),
    )


BUILTIN_CONFIGS = {
    "preset1": {
        "kernel": {"kind": "power_law", "alpha": 0.5},
        "data": {"preset": "sine_velocity", "amplitude": 0.1, "mass": 1.0},
        "solver": {"N": 512, "n": 512, "order": 2, "t_end": 10.0},
        "campaign": {"ladder": [[256, 0.01], [512, 0.01]]},
    },
    "preset2": {
        "kernel": {"kind": "power_law", "alpha": 0.5},
        "data": {"preset": "density_wave", "amplitude": 0.3, "mass": 1.0},
        "solver": {"N": 512, "n": 512, "order": 2, "t_end": 10.0},
        "campaign": {"ladder": [[256, 0.01], [512, 0.01]]},
    },
    "supercritical1": {
        "kernel": {"kind": "power_law", "alpha": 0.5},
        "data": {"preset": "sine_velocity", "amplitude": -2.0, "mass": 1.0},
        "solver": {"N": 512, "n": 512, "order": 2, "t_end": 2.0, "dt": 0.001},
        "campaign": {"ladder": [[128, 0.001], [256, 0.001], [512, 0.001]]},
    },
    "maxprinciple1": {
        "kernel": {"kind": "constant", "sup_norm": 0.1},
        "data": {"preset": "vacuum_bump", "ratio": 1.1, "width": 0.5, "mass": 1.0},
        "solver": {"N": 512, "order": 2, "t_end": 10.0},
        "campaign": {"ladder": [[512, 0.01]], "solvers": ["eulerian"]},
    },
}


def parse_config(path) -> RunConfig:
    """Load and validate a JSON config file, or a built-in name such as ``preset1``."""
    if isinstance(path, str) and path in BUILTIN_CONFIGS:
        return config_from_dict(copy.deepcopy(BUILTIN_CONFIGS[path]))
    p = Path(path)
    if not p.is_file():
        raise ConfigValidationError([f"config file not found: {str(p)!r}"])
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigValidationError([f"{p}: not valid JSON ({exc})"]) from None
    return config_from_dict(raw)
