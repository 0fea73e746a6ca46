"""TOML run configuration and named scenario presets.

Layout::

    preset = "paper-fig1"      # optional base; other keys override it

    [string]       T, rho, L
    [patch]        z_p1, z_p2, edge_weight
    [equilibrium]  a, b
    [controller]   c1, c2, feedforward, feedback_source, damping_source
    [observer]     k
    [sim]          n_cells, dt, cfl, t_final, integrator, framework, zoh, snapshots
    [init]         plant, plant_amplitude, plant_mode, observer_slope

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import sys
from dataclasses import fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import SimConfig
from .errors import ConfigError, ParseError, ValidationError

_REAL = "real"
_INT = "int"
_STR = "str"
_BOOL = "bool"
_REALS = "reals"

# section -> key -> (SimConfig field, value kind)
SCHEMA: dict[str, dict[str, tuple[str, str]]] = {
    "string": {"T": ("T", _REAL), "rho": ("rho", _REAL), "L": ("L", _REAL)},
    "patch": {
        "z_p1": ("z_p1", _REAL),
        "z_p2": ("z_p2", _REAL),
        "edge_weight": ("edge_weight", _REAL),
    },
    "equilibrium": {"a": ("a", _REAL), "b": ("b", _REAL)},
    "controller": {
        "c1": ("c1", _REAL),
        "c2": ("c2", _REAL),
        "feedforward": ("feedforward", _STR),
        "feedback_source": ("feedback_source", _STR),
        "damping_source": ("damping_source", _STR),
    },
    "observer": {"k": ("k", _REAL)},
    "sim": {
        "n_cells": ("n_cells", _INT),
        "dt": ("dt", _REAL),
        "cfl": ("cfl", _REAL),
        "t_final": ("t_final", _REAL),
        "integrator": ("integrator", _STR),
        "framework": ("framework", _STR),
        "zoh": ("zoh", _BOOL),
        "snapshots": ("snapshots", _REALS),
    },
    "init": {
        "plant": ("init_plant", _STR),
        "plant_amplitude": ("plant_amplitude", _REAL),
        "plant_mode": ("plant_mode", _INT),
        "observer_slope": ("observer_slope", _REAL),
    },
}

PRESETS: dict[str, SimConfig] = {
    # T = rho = L = 1, patch [0.4, 0.6], target a = 0.2, b = 0.5, observer-fed
    # controller with gains c1 = 5, c2 = 30 and observer gain k = 30.
    "paper-fig1": SimConfig(
        T=1.0, rho=1.0, L=1.0,
        z_p1=0.4, z_p2=0.6,
        a=0.2, b=0.5,
        c1=5.0, c2=30.0, k=30.0,
        feedback_source="observer",
        n_cells=100, cfl=0.5, t_final=10.0,
        observer_slope=0.1,
    ),
    # Coarse replica: 20 cells, full-weight patch edges, force-balance feedforward.
    "paper-fig1-coarse": SimConfig(
        T=1.0, rho=1.0, L=1.0,
        z_p1=0.4, z_p2=0.6, edge_weight=1.0,
        a=0.2, b=0.5,
        c1=5.0, c2=30.0, k=30.0,
        feedforward="force_balance",
        feedback_source="observer",
        n_cells=20, cfl=0.1, t_final=10.0,
        observer_slope=0.1,
    ),
}  # fmt: skip


def preset(name: str) -> SimConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _coerce(section: str, key: str, value, kind: str):
    where = f"[{section}] {key}"
    if kind == _REAL:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind == _BOOL:
        if not isinstance(value, bool):
            raise ValidationError(f"{where}: expected true or false, got {value!r}")
        return value
    if kind == _STR:
        if not isinstance(value, str):
            raise ValidationError(f"{where}: expected a string, got {value!r}")
        return value
    if not isinstance(value, list):
        raise ValidationError(f"{where}: expected a list of numbers, got {value!r}")
    return tuple(_coerce(section, key, v, _REAL) for v in value)


def config_from_mapping(doc: dict) -> SimConfig:
    """Build a validated config from an already parsed TOML document."""
    doc = dict(doc)
    base_name = doc.pop("preset", None)
    if base_name is not None and not isinstance(base_name, str):
        raise ParseError(f"key 'preset' must be a string, got {base_name!r}")
    base = preset(base_name) if base_name else SimConfig()
    changes = {}
    for section, table in doc.items():
        if section not in SCHEMA:
            raise ParseError(f"unknown section or key {section!r}")
        if not isinstance(table, dict):
            raise ParseError(f"{section!r} must be a table")
        for key, value in table.items():
            if key not in SCHEMA[section]:
                raise ParseError(f"unknown key {key!r} in section [{section}]")
            name, kind = SCHEMA[section][key]
            changes[name] = _coerce(section, key, value, kind)
    return _replace(base, changes)


def _replace(base: SimConfig, changes: dict) -> SimConfig:
    try:
        return base.with_(**changes)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def parse_config_text(text: str) -> SimConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}") from exc
    return config_from_mapping(doc)


def parse_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_config_text(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return repr(value)


def dump_config(cfg: SimConfig) -> str:
    """TOML text that :func:`parse_config_text` turns back into ``cfg``."""
    values = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    lines = []
    for section, table in SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (name, _) in table.items():
            if values[name] is not None:
                lines.append(f"{key} = {_toml_value(values[name])}")
        lines.append("")
    return "\n".join(lines)
