"""Experiment configuration: defaults, scale presets and validation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .errors import ConfigError


@dataclass(frozen=True)
class ExperimentConfig:
    M: int = 10000
    s: int = 1000
    k_range: list = field(default_factory=lambda: list(range(2, 11)))
    torus_R: float = 3.0
    torus_r: float = 2.0
    max_scale: float = 5.0
    homology_dim: int = 1
    landscape_dim: int = 1
    t_min: float = 0.0
    t_max: float = 5.0
    grid_points: int = 500
    k_max: int = 1
    kernel: str = "gaussian"
    bandwidth: float = 0.00693
    h_grid: list | None = None
    g_range: list = field(default_factory=lambda: list(range(1, 11)))
    runs: int = 100
    eta_upper: float = math.pi
    seed: int = 2021
    output_dir: str = "results"

    def echo(self) -> dict:
        """Parameters that determine the results (the output location does not)."""
        d = asdict(self)
        d.pop("output_dir")
        return d


SCALES = {
    "paper": {},
    "desk": {"M": 2000, "s": 200, "runs": 10},
}

_INT = {"M", "s", "homology_dim", "landscape_dim", "grid_points", "k_max", "runs", "seed"}
_FLOAT = {"torus_R", "torus_r", "max_scale", "t_min", "t_max", "bandwidth", "eta_upper"}
_INT_LIST = {"k_range", "g_range"}


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v):
    return (_is_int(v) or isinstance(v, float)) and math.isfinite(v)


def validate_config(raw: dict | None, scale: str = "paper") -> ExperimentConfig:
    """Fill defaults (full-scale values, or the ``desk`` preset) and check constraints.

    Every problem found is reported at once in a :class:`ConfigError`.
    """
    if scale not in SCALES:
        raise ConfigError([f"scale: unknown preset {scale!r} (use {sorted(SCALES)})"])
    raw = dict(raw or {})
    problems = []
    known = {f.name for f in fields(ExperimentConfig)}
    for key in sorted(set(raw) - known):
        problems.append(f"{key}: unknown key")
    values = {**SCALES[scale], **{k: v for k, v in raw.items() if k in known}}

    for key, v in values.items():
        if key in _INT and not _is_int(v):
            problems.append(f"{key}: expected an integer, got {v!r}")
        elif key in _FLOAT and not _is_real(v):
            problems.append(f"{key}: expected a finite number, got {v!r}")
        elif key in _INT_LIST and not (isinstance(v, list) and v and all(_is_int(x) for x in v)):
            problems.append(f"{key}: expected a nonempty list of integers, got {v!r}")
        elif key == "h_grid" and v is not None and not (
                isinstance(v, list) and v and all(_is_real(x) for x in v)):
            problems.append(f"h_grid: expected a nonempty list of numbers, got {v!r}")
        elif key in ("kernel", "output_dir") and not isinstance(v, str):
            problems.append(f"{key}: expected a string, got {v!r}")
    if problems:
        raise ConfigError(problems)

    for key in _FLOAT:
        if key in values:
            values[key] = float(values[key])
    if values.get("h_grid") is not None:
        values["h_grid"] = [float(h) for h in values["h_grid"]]
    cfg = ExperimentConfig(**values)

    for key in ("M", "s", "grid_points", "k_max", "runs"):
        if getattr(cfg, key) < 1:
            problems.append(f"{key}: must be positive, got {getattr(cfg, key)}")
    if cfg.s > cfg.M:
        problems.append(f"s: must not exceed M ({cfg.s} > {cfg.M})")
    if any(k < 2 for k in cfg.k_range):
        problems.append("k_range: every landmark count must be at least 2")
    if any(k > cfg.M for k in cfg.k_range):
        problems.append("k_range: landmark counts cannot exceed M")
    if any(g < 1 for g in cfg.g_range):
        problems.append("g_range: component counts must be at least 1")
    if not cfg.torus_R > cfg.torus_r > 0:
        problems.append("torus_r: need torus_R > torus_r > 0")
    if not cfg.max_scale > 0:
        problems.append("max_scale: must be positive")
    if cfg.homology_dim not in (0, 1):
        problems.append("homology_dim: must be 0 or 1")
    if not 0 <= cfg.landscape_dim <= cfg.homology_dim:
        problems.append("landscape_dim: must be between 0 and homology_dim")
    if not cfg.t_min < cfg.t_max:
        problems.append("t_max: need t_min < t_max")
    if cfg.grid_points < 2:
        problems.append("grid_points: need at least 2")
    if cfg.kernel not in ("gaussian", "tricube"):
        problems.append(f"kernel: unknown kernel {cfg.kernel!r}")
    if not cfg.bandwidth > 0:
        problems.append("bandwidth: must be positive")
    if cfg.h_grid is not None and any(h <= 0 for h in cfg.h_grid):
        problems.append("h_grid: bandwidths must be positive")
    if not cfg.eta_upper > 0:
        problems.append("eta_upper: must be positive")
    if cfg.seed < 0:
        problems.append("seed: must be non-negative")
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config_file(path) -> dict:
    """Read a flat ``key: value`` document (YAML; JSON manifests work too).

    For a run manifest, the echoed ``config`` block is returned.
    """
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: not a parseable key-value document ({exc})"]) from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    if "config" in doc and "summary" in doc:
        doc = doc["config"]
    return doc
