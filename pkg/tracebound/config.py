from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Tuple

import yaml

from tracebound.errors import ConfigError

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.yaml"
SEED_ENV_VAR = "TRACEBOUND_SEED"


@dataclass
class TraceboundConfig:
    """
    Numerical tolerances and output defaults used across the package.

    Adjust these in the `tracebound:` section of config.yaml if your matrices
    need looser or tighter gates.
    """

    # Verification slack, relative to (||A||_F + 1)
    slack: float = 1e-9

    # Gates
    normal_tol: float = 1e-10
    hermitian_tol: float = 1e-12

    # Eigensolver
    eig_tol: float = 1e-12
    sweeps_per_order: int = 100
    max_order: int = 512

    # Analysis defaults
    r_values: Tuple[int, ...] = (1, 2)
    output_format: str = "json"
    decimals: int = 6
    seed: int = 0

    schema_version: str = "1.0"


def load_config(path: Optional[str | Path] = None) -> TraceboundConfig:
    """
    Load the `tracebound` section of a YAML config file.

    A missing default file gives the built-in defaults; unknown keys raise
    ConfigError.
    """
    cfg_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if not cfg_path.exists():
        if path is not None:
            raise ConfigError(f"Config file not found: {cfg_path}")
        return TraceboundConfig()

    try:
        raw = yaml.safe_load(cfg_path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"Could not parse {cfg_path}: {exc}") from exc

    section = raw.get("tracebound", {}) if isinstance(raw, dict) else None
    if not isinstance(section, dict):
        raise ConfigError(f"{cfg_path}: 'tracebound' must be a mapping")

    known = {f.name for f in fields(TraceboundConfig)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise ConfigError(f"{cfg_path}: unknown tracebound keys {unknown}")

    values = dict(section)
    if "r_values" in values:
        values["r_values"] = tuple(int(r) for r in values["r_values"])
    cfg = TraceboundConfig(**values)
    if cfg.slack < 0 or cfg.normal_tol <= 0 or cfg.eig_tol <= 0:
        raise ConfigError(f"{cfg_path}: tolerances must be positive (slack may be 0)")
    if any(r < 1 for r in cfg.r_values):
        raise ConfigError(f"{cfg_path}: r_values must be positive integers")
    return cfg


def resolve_seed(explicit: Optional[int], cfg: TraceboundConfig) -> int:
    """Explicit seed, then $TRACEBOUND_SEED, then the configured default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(SEED_ENV_VAR)
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    return cfg.seed
