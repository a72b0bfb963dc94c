"""Experiment configuration: an INI file with a ``[space]`` and an
``[experiment]`` section.  List values are written as JSON arrays.

    [space]
    kind = flat_torus
    lengths = [1.0, 1.0]

    [experiment]
    epsilon = [0.12, 0.15, 0.2]
    resolution = 200
    qmax = 2
    p = 1
    k_max = 10
    out = reports
    seed = 0

The only environment variable honoured is ``HODGENERVE_OUT``, which
overrides the output directory.
"""
from __future__ import annotations

import configparser
import json
import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .geometry import ModelSpace, space_from_config

OUT_ENV = "HODGENERVE_OUT"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    space: dict
    epsilon: tuple[float, ...]
    resolution: int = 200
    qmax: int = 2
    p: int = 1
    k_max: int = 10
    out: str = "reports"
    seed: int = 0
    guard_radius: float | None = None
    trials: int = 100
    grids: tuple[int, ...] = (64, 128)
    workers: int = 1
    base_dir: str = "."
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self.validate()

    def _fail(self, key: str, msg: str):
        line = self.lines.get(key)
        where = f" (line {line})" if line else ""
        raise ConfigError(f"{key}{where}: {msg}")

    def validate(self) -> None:
        eps = list(self.epsilon)
        if not eps:
            self._fail("epsilon", "epsilon list is empty")
        if any(e <= 0 for e in eps):
            self._fail("epsilon", "epsilon values must be positive")
        if any(b <= a for a, b in zip(eps, eps[1:])):
            self._fail("epsilon", "epsilon values must be strictly ascending")
        if self.k_max < 1:
            self._fail("k_max", "k_max must be at least 1")
        if self.resolution < 1:
            self._fail("resolution", "resolution must be positive")
        if self.qmax < 0:
            self._fail("qmax", "qmax must be non-negative")
        if self.p < 0:
            self._fail("p", "p must be non-negative")
        if self.trials < 1:
            self._fail("trials", "trials must be at least 1")
        if len(self.grids) != 2 or self.grids[0] >= self.grids[1]:
            self._fail("grids", "grids must be two ascending sizes")
        if self.workers < 1:
            self._fail("workers", "workers must be at least 1")
        if self.guard_radius is not None and self.guard_radius <= 0:
            self._fail("guard_radius", "guard_radius must be positive")
        try:
            self.build_space()
        except (KeyError, TypeError, ValueError, OSError) as exc:
            self._fail("space", str(exc))

    def build_space(self) -> ModelSpace:
        return space_from_config(self.space, Path(self.base_dir))

    def out_dir(self) -> Path:
        out = os.environ.get(OUT_ENV) or self.out
        path = Path(out)
        return path if path.is_absolute() else Path(self.base_dir) / path

    def with_out(self, out) -> "ExperimentConfig":
        return replace(self, out=str(out))

    def as_dict(self) -> dict:
        return {"space": self.space, "epsilon": list(self.epsilon), "resolution": self.resolution,
                "qmax": self.qmax, "p": self.p, "k_max": self.k_max, "seed": self.seed,
                "guard_radius": self.guard_radius, "trials": self.trials, "grids": list(self.grids)}


def _line_numbers(text: str) -> dict:
    """Map ``key`` and ``section.key`` to the 1-based line they appear on."""
    lines = {}
    section = None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            section = m.group(1).strip()
            lines.setdefault(section, n)
            continue
        m = re.match(r"([A-Za-z_][\w.]*)\s*[=:]", s)
        if m and section:
            lines.setdefault(m.group(1), n)
            lines[f"{section}.{m.group(1)}"] = n
    return lines


_SPACE_KEYS = {"kind": str, "lengths": list, "radius": float, "points_file": str}
_EXPERIMENT_KEYS = {
    "epsilon": list, "resolution": int, "qmax": int, "p": int, "k_max": int, "out": str,
    "seed": int, "guard_radius": float, "trials": int, "grids": list, "workers": int,
}


def _parse_value(raw: str, kind, key: str, lines: dict):
    raw = raw.strip()
    try:
        if kind is str:
            return raw.strip('"').strip("'")
        if kind is list:
            val = json.loads(raw)
            if not isinstance(val, list):
                val = [val]
            return val
        return kind(json.loads(raw))
    except (ValueError, TypeError) as exc:
        line = lines.get(key)
        raise ConfigError(f"{key} (line {line}): cannot parse {raw!r}: {exc}") from None


def parse_config(text: str, base_dir=".") -> ExperimentConfig:
    lines = _line_numbers(text)
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for name in ("space", "experiment"):
        if not cp.has_section(name):
            raise ConfigError(f"missing [{name}] section")
    space = {}
    for key, raw in cp.items("space"):
        if key not in _SPACE_KEYS:
            raise ConfigError(f"space.{key} (line {lines.get('space.' + key)}): unknown key")
        space[key] = _parse_value(raw, _SPACE_KEYS[key], key, lines)
    exp = {}
    for key, raw in cp.items("experiment"):
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"experiment.{key} (line {lines.get('experiment.' + key)}): unknown key")
        exp[key] = _parse_value(raw, _EXPERIMENT_KEYS[key], key, lines)
    if "epsilon" not in exp:
        raise ConfigError("experiment.epsilon is required")
    try:
        exp["epsilon"] = tuple(float(e) for e in exp["epsilon"])
        if "grids" in exp:
            exp["grids"] = tuple(int(g) for g in exp["grids"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad list value: {exc}") from None
    return ExperimentConfig(space=space, base_dir=str(base_dir), lines=lines, **exp)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)
