"""Run configuration with layered precedence.

Every tunable resolves as: command-line flag, then BITSPECTRA_<NAME>
environment variable, then a JSON config file (--config flag or
BITSPECTRA_CONFIG), then the built-in default.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .bitstring import DEFAULT_MAX_BITS
from .metrics import DEFAULT_BITPARALLEL_CAP, DEFAULT_FFT_CAP, DEFAULT_REFERENCE_CAP

ENV_PREFIX = "BITSPECTRA_"

_DEFAULTS: dict[str, object] = {
    "kernel": "auto",
    "max_bits": DEFAULT_MAX_BITS,
    "reference_cap": DEFAULT_REFERENCE_CAP,
    "bitparallel_cap": DEFAULT_BITPARALLEL_CAP,
    "fft_cap": DEFAULT_FFT_CAP,
    "workers": 1,
    "seed": 1,
    "thresholds": None,
}

_TYPES: dict[str, type] = {
    "kernel": str,
    "max_bits": int,
    "reference_cap": int,
    "bitparallel_cap": int,
    "fft_cap": int,
    "workers": int,
    "seed": int,
    "thresholds": str,
}


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    kernel: str = "auto"
    max_bits: int = DEFAULT_MAX_BITS
    reference_cap: int = DEFAULT_REFERENCE_CAP
    bitparallel_cap: int = DEFAULT_BITPARALLEL_CAP
    fft_cap: int = DEFAULT_FFT_CAP
    workers: int = 1
    seed: int = 1
    thresholds: str | None = None
    output: str | None = None
    verbosity: int = 0

    def __post_init__(self):
        for cap in ("max_bits", "reference_cap", "bitparallel_cap", "fft_cap"):
            if getattr(self, cap) < 1:
                raise ValueError(f"{cap} must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(ENV_PREFIX + "CONFIG")
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    unknown = set(doc) - set(_DEFAULTS)
    if unknown:
        raise ValueError(f"config file {path}: unknown settings {sorted(unknown)}")
    return doc


def resolve_setting(name: str, flag_value, config_doc: dict):
    """One setting through the precedence chain. flag_value None means unset."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        return _TYPES[name](env)
    if name in config_doc and config_doc[name] is not None:
        return _TYPES[name](config_doc[name])
    return _DEFAULTS[name]


def resolve_all(flags: dict, config_path: str | None) -> dict:
    """Resolve every known setting given a dict of flag values (None = unset)."""
    doc = load_config_file(config_path)
    return {name: resolve_setting(name, flags.get(name), doc) for name in _DEFAULTS}
