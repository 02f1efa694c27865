"""Declarative run configuration for the command-line tool.

Each subcommand has a flat key/value schema. Values come from (lowest to
highest precedence) the schema defaults, an optional YAML/JSON config file,
and command-line flags. Powers given in dB use keys ending in ``_db``; every
other power-like key is linear.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

import yaml

__all__ = ["ConfigError", "Field", "SCHEMAS", "load_file", "resolve", "config_hash"]


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Field:
    name: str
    kind: str  # int | float | bool | str | int_list | float_list
    default: Any
    help: str = ""
    check: Optional[Callable[[Any], Optional[str]]] = None


def _prob_open(v):
    return None if 0.0 < v < 1.0 else "must lie in (0, 1)"


def _pos(v):
    return None if v > 0 else "must be > 0"


def _nonneg(v):
    return None if v >= 0 else "must be >= 0"


def _alpha(v):
    return None if 0.0 < v <= 1.0 else "must lie in (0, 1]"


def _eps(v):
    return None if 0.0 <= v <= 0.5 else "must lie in [0, 0.5]"


def _seed(v):
    return None if 0 <= v < 2**64 else "must be an unsigned 64-bit integer"


def _each(check):
    def run(values):
        if not values:
            return "must not be empty"
        for v in values:
            msg = check(v)
            if msg:
                return f"entry {v!r} {msg}"
        return None

    return run


_COMMON = [
    Field("seed", "int", 0, "master random seed", _seed),
    Field("trials", "int", 10_000, "Monte-Carlo trials per hypothesis (0 = dry run)", _nonneg),
    Field("format", "str", "csv", "output format: csv or jsonl", lambda v: None if v in ("csv", "jsonl") else "must be csv or jsonl"),
    Field("out", "str", "-", "output path ('-' for stdout)"),
    Field("paired_baseline", "bool", False, "also run the unquantized energy detector on the same samples"),
    Field("c", "float", 1.6, "window comparator parameter", _pos),
]

SCHEMAS: dict[str, list[Field]] = {
    "params": [
        Field("n", "int", 320, "number of binary observations", _pos),
        Field("p_f", "float", 0.05, "target false-alarm probability", _prob_open),
    ],
    "roc": [
        Field("n", "int", 200, "number of binary observations", _pos),
        Field("p_f", "float_list", [0.01, 0.02, 0.05, 0.1, 0.2, 0.5], "false-alarm grid", _each(_prob_open)),
        Field("delta_var", "float", 1.0, "variance increase under H1 (Gaussian scenario, sigma0^2 = 1)", _nonneg),
    ],
    "sweep-c": [
        Field("n", "int", 200, "number of binary observations", _pos),
        Field("p_f", "float", 0.05, "target false-alarm probability", _prob_open),
        Field("alpha", "float_list", [0.8, 0.85, 0.9], "variance ratios sigma0/sigma1", _each(_alpha)),
        Field("c_min", "float", 0.1, "first grid point", _pos),
        Field("c_max", "float", 4.0, "last grid point", _pos),
        Field("c_step", "float", 0.05, "grid step", _pos),
    ],
    "sim-mimo": [
        Field("M", "int_list", [32, 128, 256], "base-station antennas", _each(_pos)),
        Field("N", "int", 1, "coherence blocks", _pos),
        Field("K", "int", 5, "users", _pos),
        Field("tau", "int", 5, "pilot length", _pos),
        Field("user_power_db", "float", 0.0, "per-user transmit power (dB)"),
        Field("user_beta", "float", 1.0, "user large-scale coefficient", _nonneg),
        Field("jammer_power_db", "float_list", [-10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 2.0], "per-antenna jamming power grid (dB)"),
        Field("jammer_beta", "float", 1.0, "jammer large-scale coefficient", _nonneg),
        Field("jammer_antennas", "int_list", [1], "jammer antenna counts", _each(_pos)),
        Field("noise_var", "float", 1.0, "receiver noise variance", _pos),
        Field("use_all_pilots", "bool", True, "use all tau pilot symbols (requires K == tau)"),
        Field("p_f", "float", 0.05, "target false-alarm probability", _prob_open),
    ],
    "sim-wsn": [
        Field("n_sensors", "int_list", [20], "number of sensors", _each(_pos)),
        Field("snr_db", "float_list", [-4.0], "per-symbol receive SNR (dB)"),
        Field("tau", "int_list", [1, 2, 4], "probe length in symbols", _each(_pos)),
        Field("complex_model", "bool", True, "complex baseband model (two real dimensions per symbol)"),
        Field("p_f", "float", 0.05, "target false-alarm probability", _prob_open),
    ],
    "sim-bsc": [
        Field("n", "int", 200, "number of binary observations", _pos),
        Field("delta_var", "float", 1.0, "variance increase under H1 (Gaussian scenario, sigma0^2 = 1)", _nonneg),
        Field("epsilon", "float_list", [0.0, 0.01, 0.05, 0.1, 0.2], "BSC crossover probabilities", _each(_eps)),
        Field("p_f", "float", 0.05, "target false-alarm probability", _prob_open),
    ],
}


def fields_for(command: str) -> list[Field]:
    return SCHEMAS[command] + _COMMON


def _coerce(f: Field, raw: Any) -> Any:
    try:
        if f.kind in ("int_list", "float_list"):
            if isinstance(raw, str):
                raw = [x for x in raw.split(",") if x.strip()]
            elif not isinstance(raw, (list, tuple)):
                raw = [raw]
            scalar = Field(f.name, f.kind[:-5], None)
            return [_coerce(scalar, x) for x in raw]
        if f.kind == "int":
            if isinstance(raw, bool):
                raise TypeError
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError
            return int(raw)
        if f.kind == "float":
            if isinstance(raw, bool):
                raise TypeError
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if f.kind == "bool":
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f.name, f"cannot interpret {raw!r} as {f.kind}") from None


def load_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping of keys to values")
    return data


def resolve(command: str, file_values: dict, cli_values: dict) -> dict:
    """Merge defaults, file and CLI values, coerce and validate every field."""
    fields = {f.name: f for f in fields_for(command)}
    unknown = sorted(set(file_values) - set(fields))
    if unknown:
        raise ConfigError(unknown[0], f"unknown key for '{command}'")
    out = {}
    for name, f in fields.items():
        if cli_values.get(name) is not None:
            raw = cli_values[name]
        elif name in file_values:
            raw = file_values[name]
        else:
            raw = f.default
        value = _coerce(f, raw)
        if f.check is not None:
            msg = f.check(value)
            if msg:
                raise ConfigError(name, msg)
        out[name] = value
    return out


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
