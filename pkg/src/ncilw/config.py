"""Configuration parsing and schema validation for the CLI.

Configs are JSON documents validated against per-subcommand schemas
(unknown keys rejected, defaults filled in after validation).  Schema
violations raise SchemaError carrying the JSON path of the offending
field; unreadable files raise IoError.
"""

import json

import jsonschema

from .errors import IoError, SchemaError

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_POS_INT = {"type": "integer", "minimum": 1}
_COUNT = {"type": "integer", "minimum": 0}

_INITIAL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["preset"],
    "properties": {
        "preset": {
            "enum": ["single-mode", "gaussian-bump", "soliton-approximant"]
        },
        "amplitude": {"type": "number"},
        "mode": _POS_INT,
        "width": _POSITIVE,
        "x0": {"type": "number"},
        "speed": _POSITIVE,
    },
}

SCHEMAS = {
    "eval": {
        "type": "object",
        "additionalProperties": False,
        "required": ["function", "ell", "delta"],
        "properties": {
            "function": {"enum": ["wp1", "zeta1", "wp1_shifted", "c_const", "g_const"]},
            "x": {"type": "number"},
            "ell": _POSITIVE,
            "delta": _POSITIVE,
            "n_particles": _COUNT,
            "g": {"type": "number", "minimum": 1},
            "out_dir": {"type": "string"},
        },
    },
    "operator-test": {
        "type": "object",
        "additionalProperties": False,
        "required": ["m_points", "ell", "delta"],
        "properties": {
            "m_points": {"type": "integer", "minimum": 4},
            "ell": _POSITIVE,
            "delta": _POSITIVE,
            "operators": {
                "type": "array",
                "items": {"enum": ["H", "T", "Ttilde", "dx"]},
                "minItems": 1,
            },
            "out_dir": {"type": "string"},
        },
    },
    "simulate": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "m_points", "ell", "dt", "t_end", "initial"],
        "properties": {
            "kind": {"enum": ["KdV", "BO", "ILW", "ncILW"]},
            "m_points": {"type": "integer", "minimum": 4},
            "ell": _POSITIVE,
            "delta": _POSITIVE,
            "kdv_delta": _POSITIVE,
            "initial": _INITIAL_SCHEMA,
            "initial_v": _INITIAL_SCHEMA,
            "dt": _POSITIVE,
            "t_end": _POSITIVE,
            "dealias": {"type": "boolean"},
            "invariant_every": _COUNT,
            "snapshot_every": _COUNT,
            "mass_tol": _POSITIVE,
            "energy_tol": _POSITIVE,
            "out_dir": {"type": "string"},
        },
    },
    "cms": {
        "type": "object",
        "additionalProperties": False,
        "required": ["case", "g2", "positions", "momenta", "dt", "n_steps"],
        "properties": {
            "case": {"enum": ["rational", "trigonometric", "hyperbolic", "elliptic"]},
            "ell": _POSITIVE,
            "delta": _POSITIVE,
            "g2": {"type": "number", "minimum": 0},
            "positions": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "momenta": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "dt": _POSITIVE,
            "n_steps": _POS_INT,
            "record_every": _POS_INT,
            "energy_tol": _POSITIVE,
            "out_dir": {"type": "string"},
        },
    },
    "pole-check": {
        "type": "object",
        "additionalProperties": False,
        "required": ["ell", "delta", "m_points", "poles", "dt", "t_end"],
        "properties": {
            "ell": _POSITIVE,
            "delta": _POSITIVE,
            "m_points": {"type": "integer", "minimum": 4},
            "poles": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
            "dt": _POSITIVE,
            "t_end": _POSITIVE,
            "deviation_tol": _POSITIVE,
            "out_dir": {"type": "string"},
        },
    },
    "quantum": {
        "type": "object",
        "additionalProperties": False,
        "required": ["sector", "g", "ell", "delta", "grids"],
        "properties": {
            "sector": {
                "type": "array",
                "items": _COUNT,
                "minItems": 4,
                "maxItems": 4,
            },
            "g": {"type": "number", "minimum": 1},
            "ell": _POSITIVE,
            "delta": _POSITIVE,
            "grids": {
                "type": "array",
                "items": {"type": "integer", "minimum": 4},
                "minItems": 2,
            },
            "order": {"enum": [2, 4]},
            "n_eigenvalues": _POS_INT,
            "stability_tol": _POSITIVE,
            "out_dir": {"type": "string"},
        },
    },
}

DEFAULTS = {
    "eval": {"n_particles": 1, "g": 1.0},
    "operator-test": {"operators": ["H", "T", "Ttilde", "dx"]},
    "simulate": {
        "dealias": True,
        "invariant_every": 10,
        "snapshot_every": 0,
        "mass_tol": 1e-10,
        "energy_tol": 1e-7,
    },
    "cms": {"record_every": 100, "energy_tol": 1e-8},
    "pole-check": {"deviation_tol": 1e-5},
    "quantum": {"order": 2, "n_eigenvalues": 1, "stability_tol": 1e-6},
}


def validate_config(data, subcommand):
    """Validate a config dict and fill defaults; returns a new dict."""
    if subcommand not in SCHEMAS:
        raise SchemaError(f"unknown subcommand {subcommand!r}")
    try:
        jsonschema.validate(data, SCHEMAS[subcommand])
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{path}: {exc.message}", field=path) from exc
    out = dict(DEFAULTS.get(subcommand, {}))
    out.update(data)
    _cross_checks(out, subcommand)
    return out


def _cross_checks(cfg, subcommand):
    """Constraints that span fields (schema-level keywords cannot express)."""
    if subcommand == "eval":
        if cfg["function"] in ("wp1", "zeta1", "wp1_shifted") and "x" not in cfg:
            raise SchemaError("x: required for pointwise functions", field="x")
    if subcommand == "simulate":
        if cfg["kind"] == "KdV" and "kdv_delta" not in cfg:
            raise SchemaError("kdv_delta: required for kind KdV", field="kdv_delta")
        if cfg["kind"] != "KdV" and "delta" not in cfg:
            raise SchemaError(f"delta: required for kind {cfg['kind']}", field="delta")
        if cfg["m_points"] % 2 != 0:
            raise SchemaError("m_points: must be even", field="m_points")
    if subcommand == "operator-test" and cfg["m_points"] % 2 != 0:
        raise SchemaError("m_points: must be even", field="m_points")
    if subcommand == "pole-check" and cfg["m_points"] % 2 != 0:
        raise SchemaError("m_points: must be even", field="m_points")
    if subcommand == "cms":
        if len(cfg["positions"]) != len(cfg["momenta"]):
            raise SchemaError(
                "momenta: length must match positions", field="momenta"
            )
        if cfg["case"] != "rational" and ("ell" not in cfg or "delta" not in cfg):
            raise SchemaError(
                "ell: ell and delta required for non-rational cases", field="ell"
            )
    if subcommand == "quantum":
        total = sum(cfg["sector"])
        if not 1 <= total <= 3:
            raise SchemaError("sector: total particles must be 1..3", field="sector")


def parse_config(path, subcommand):
    """Read, validate, and default-fill a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("config must be a JSON object")
    return validate_config(data, subcommand)
