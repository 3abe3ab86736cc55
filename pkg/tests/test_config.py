import json

import pytest

from euler_alignment.config import (BUILTIN_CONFIGS, ConfigValidationError, config_from_dict, parse_config,
                                    validate_dict)

MINIMAL = {"kernel": {"kind": "power_law", "alpha": 0.5}, "data": {"preset": "sine_velocity"}}


def write(tmp_path, obj, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_minimal_config_gets_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, MINIMAL))
    assert cfg.solver["cfl"] == 0.4
    assert cfg.solver["order"] == 1
    assert cfg.solver["rho_cap"] == 1e6
    assert cfg.solver["g_floor"] == -1e6
    assert cfg.output["stride"] == 1
    assert cfg.preset_name == "sine_velocity" and cfg.preset_params == {}


def test_alpha_out_of_range_names_interval():
    with pytest.raises(ConfigValidationError) as exc:
        config_from_dict({**MINIMAL, "kernel": {"kind": "power_law", "alpha": 1.2}})
    assert "(0,1)" in str(exc.value)


def test_all_errors_reported():
    bad = {"kernel": {"kind": "power_law", "alpha": 1.2}, "data": {"preset": "sine_velocity"},
           "solver": {"N": 63, "cfl": 2.0}, "extra": 1}
    errs = validate_dict(bad)
    assert len(errs) == 4
    with pytest.raises(ConfigValidationError) as exc:
        config_from_dict(bad)
    assert len(exc.value.errors) == 4
    assert any("N" in e and "even" in e for e in exc.value.errors)


def test_unknown_keys_rejected_at_every_level():
    bad = {"kernel": {"kind": "zero", "colour": "red"}, "data": {"preset": "flat", "amplitude": 0.1},
           "solver": {"threads": 4}, "output": {"png": "x.png"}, "campaign": {"seed": 1}}
    errs = validate_dict(bad)
    for key in ("colour", "amplitude", "threads", "png", "seed"):
        assert any(key in e for e in errs), key


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigValidationError, match="not found"):
        parse_config(tmp_path / "nope.json")
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigValidationError, match="JSON"):
        parse_config(p)
    with pytest.raises(ConfigValidationError):
        config_from_dict([1, 2])


def test_tabulated_and_ladder_checks():
    errs = validate_dict({"kernel": {"kind": "tabulated", "table_radii": [0.2, 0.1], "table_values": [1.0, 2.0]},
                          "data": {"preset": "flat"}, "campaign": {"ladder": [[256, 0.01], [128, 0.01]]}})
    assert len(errs) == 2


def test_builtins_are_valid():
    for name in BUILTIN_CONFIGS:
        parse_config(name)
