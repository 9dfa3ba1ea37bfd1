"""Flat key = value run configuration with strict parsing.

A config is a plain-text document of ``key = value`` lines with ``#``
comments.  Unknown keys, duplicate keys, type mismatches and invariant
violations are all hard errors carrying the offending line.  A ``preset``
key applies the named parameter set first; explicit keys then override
individual fields.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .engine import IntegratorConfig
from .model import ModelParameters, preset

__all__ = ["ConfigError", "RunConfig", "parse_config", "render_config"]


class ConfigError(ValueError):
    """Invalid run configuration text or values."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to run one simulation and write its outputs."""

    model: ModelParameters
    integrator: IntegratorConfig
    initial_state: str = "em"
    csv_path: str = "trajectory.csv"
    report_path: str = "report.json"
    record_full_state: bool = False
    hysteresis: float = 0.0

    def __post_init__(self):
        if self.initial_state not in ("gn", "em"):
            raise ValueError(f"initial_state must be 'gn' or 'em', got {self.initial_state!r}")
        if self.hysteresis < 0:
            raise ValueError(f"hysteresis must be >= 0, got {self.hysteresis!r}")


_MODEL_FLOAT_KEYS = (
    "omega0",
    "omegaM",
    "omega_drive",
    "drive_phase",
    "rabi_B",
    "coupling_qr",
    "coupling_br",
    "kappa_q",
    "kappa_r",
    "scale",
    "carrier_cutoff",
)
_MODEL_STR_KEYS = ("frame", "sigma_z_convention")
_INTEGRATOR_DEFAULTS = {"t_end": 0.05, "dt": 1e-5}

_PARSERS = {}
for _key in _MODEL_FLOAT_KEYS:
    _PARSERS[_key] = float
for _key in _MODEL_STR_KEYS:
    _PARSERS[_key] = str


def _parse_bool(text):
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"expected 'true' or 'false', got {text!r}")


_PARSERS.update(
    {
        "preset": str,
        "hz_is_angular": _parse_bool,
        "t_end": float,
        "dt": float,
        "method": str,
        "record_stride": int,
        "renormalize": _parse_bool,
        "force_dt": _parse_bool,
        "initial_state": str,
        "csv_path": str,
        "report_path": str,
        "record_full_state": _parse_bool,
        "hysteresis": float,
    }
)


def parse_config(text: str) -> RunConfig:
    """Parse a key = value document into a validated RunConfig."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            entries[key] = (_PARSERS[key](value), lineno)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from None

    def take(key, default=None):
        if key in entries:
            return entries.pop(key)[0]
        return default

    hz_is_angular = take("hz_is_angular", False)
    preset_name = take("preset")
    if preset_name is not None:
        try:
            params = preset(preset_name, hz_is_angular=hz_is_angular)
        except ValueError as exc:
            raise ConfigError(f"key 'preset': {exc}") from None
    else:
        if hz_is_angular:
            raise ConfigError("hz_is_angular is only meaningful together with a preset")
        params = ModelParameters()

    for key in _MODEL_FLOAT_KEYS + _MODEL_STR_KEYS:
        if key in entries:
            value, lineno = entries.pop(key)
            try:
                params = dataclasses.replace(params, **{key: value})
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from None

    integrator_kwargs = dict(_INTEGRATOR_DEFAULTS)
    for key in ("t_end", "dt", "method", "record_stride", "renormalize", "force_dt"):
        if key in entries:
            integrator_kwargs[key] = entries.pop(key)[0]
    try:
        integrator = IntegratorConfig(**integrator_kwargs)
    except ValueError as exc:
        raise ConfigError(f"integrator settings: {exc}") from None

    run_kwargs = {}
    for key in ("initial_state", "csv_path", "report_path", "record_full_state", "hysteresis"):
        if key in entries:
            run_kwargs[key] = entries.pop(key)[0]
    assert not entries, f"unconsumed keys: {sorted(entries)}"
    try:
        return RunConfig(model=params, integrator=integrator, **run_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_config(cfg: RunConfig) -> str:
    """Canonical text form of a RunConfig; parse_config(render_config(c)) == c."""
    lines = []
    for key in _MODEL_FLOAT_KEYS + _MODEL_STR_KEYS:
        lines.append(f"{key} = {_fmt(getattr(cfg.model, key))}")
    for key in ("t_end", "dt", "method", "record_stride", "renormalize", "force_dt"):
        lines.append(f"{key} = {_fmt(getattr(cfg.integrator, key))}")
    for key in ("initial_state", "csv_path", "report_path", "record_full_state", "hysteresis"):
        lines.append(f"{key} = {_fmt(getattr(cfg, key))}")
    return "\n".join(lines) + "\n"
