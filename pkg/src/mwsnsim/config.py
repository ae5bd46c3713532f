"""Line-oriented ``key = value`` configuration files.

Example::

    # one sweep cell, two models
    n_nodes = 26
    target_duration = 1000
    models = coverage_based, random_walk

``#`` starts a comment, blank lines are ignored, list values are comma
separated. Unknown or repeated keys are errors; missing keys take the
defaults in :data:`DEFAULTS`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable

from .engine import SimConfig
from .geometry import Arena
from .harness import Experiment, SweepGrid
from .mobility import MobilityParams, Model
from .target import TargetKind, TargetSpec


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


def _float(raw: str) -> float:
    v = float(raw)
    if not math.isfinite(v):
        raise ValueError(f"{raw!r} is not a finite number")
    return v


def _int(raw: str) -> int:
    v = float(raw)
    if not v.is_integer():
        raise ValueError(f"{raw!r} is not an integer")
    return int(v)


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(raw: str) -> tuple:
        parts = [p.strip() for p in raw.split(",")]
        if not parts or any(p == "" for p in parts):
            raise ValueError(f"malformed list {raw!r}")
        return tuple(item(p) for p in parts)
    return parse


def _positive(v):
    if not v > 0:
        raise ValueError(f"must be positive, got {v}")


def _non_negative(v):
    if not v >= 0:
        raise ValueError(f"must be non-negative, got {v}")


def _each(check):
    def run(vs):
        for v in vs:
            check(v)
    return run


# key -> (parser, validator, formatter)
_KEYS: dict[str, tuple[Callable, Callable | None, Callable]] = {
    "arena_side": (_float, _positive, repr),
    "n_nodes": (_int, _non_negative, str),
    "mobility_model": (Model.from_label, None, lambda m: m.label),
    "node_speed": (_float, _non_negative, repr),
    "range": (_float, _positive, repr),
    "step_length": (_float, _positive, repr),
    "target_kind": (TargetKind.from_label, None, lambda k: k.label),
    "target_duration": (_float, _positive, repr),
    "target_speed": (_float, _positive, repr),
    "dt": (_float, _positive, repr),
    "runs": (_int, _positive, str),
    "base_seed": (_int, _non_negative, str),
    "n_values": (_list(_int), _each(_non_negative), lambda vs: ",".join(map(str, vs))),
    "td_values": (_list(_float), _each(_positive), lambda vs: ",".join(map(repr, vs))),
    "models": (_list(Model.from_label), None, lambda vs: ",".join(m.label for m in vs)),
}


@dataclass(frozen=True)
class ConfigDocument:
    arena_side: float = 4000.0
    n_nodes: int = 10
    mobility_model: Model = Model.COVERAGE_BASED
    node_speed: float = 5.0
    range: float = 500.0
    step_length: float = 50.0
    target_kind: TargetKind = TargetKind.STATIONARY
    target_duration: float = 500.0
    target_speed: float = 5.0
    dt: float = 1.0
    runs: int = 2000
    base_seed: int = 0
    n_values: tuple[int, ...] = (2, 10, 18, 26)
    td_values: tuple[float, ...] = (100.0, 300.0, 500.0, 1000.0)
    models: tuple[Model, ...] = tuple(Model)
    # key -> source line, for error reporting
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def mobility(self) -> MobilityParams:
        return MobilityParams(
            model=self.mobility_model,
            speed=self.node_speed,
            range=self.range,
            step_length=self.step_length,
        )

    def target(self) -> TargetSpec:
        return TargetSpec(
            kind=self.target_kind,
            duration=self.target_duration,
            speed=self.target_speed,
            step_length=self.step_length,
        )

    def _build(self, fn):
        try:
            return fn()
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            # per-key checks already ran, only the dt/speed/range guard is left
            raise ConfigError(str(e), key="dt", line=self.lines.get("dt")) from e

    def sim_config(self) -> SimConfig:
        return self._build(lambda: SimConfig(
            arena=Arena(self.arena_side),
            n_nodes=self.n_nodes,
            mobility=self.mobility(),
            target=self.target(),
            dt=self.dt,
        ))

    def experiment(self) -> Experiment:
        cfg = self.sim_config()
        return Experiment(base_config=cfg, runs=self.runs, base_seed=self.base_seed)

    def sweep_grid(self) -> SweepGrid:
        return SweepGrid(n_values=self.n_values, td_values=self.td_values, models=self.models)

    def validate_grid(self) -> "ConfigDocument":
        """Check cross-key invariants for every sweep cell the document describes."""
        self.sim_config()
        for n in self.n_values:
            for td in self.td_values:
                for m in self.models:
                    doc = replace(self, n_nodes=n, target_duration=td, mobility_model=m)
                    doc.sim_config()
        return self

    def with_overrides(self, overrides: dict[str, str]) -> "ConfigDocument":
        """Apply raw string values (e.g. from CLI flags); later values win."""
        values = {}
        lines = dict(self.lines)
        for key, raw in overrides.items():
            values[key] = _parse_value(key, raw, None)
            lines.pop(key, None)
        return replace(self, lines=lines, **values)

    def to_text(self) -> str:
        """Canonical normalized form: every key, fixed order, one per line."""
        out = []
        for f in fields(self):
            if f.name == "lines":
                continue
            fmt = _KEYS[f.name][2]
            out.append(f"{f.name} = {fmt(getattr(self, f.name))}")
        return "\n".join(out) + "\n"


DEFAULTS = ConfigDocument()
CONFIG_KEYS = tuple(_KEYS)


def _parse_value(key: str, raw: str, line: int | None):
    if key not in _KEYS:
        raise ConfigError(f"unknown key (expected one of {', '.join(_KEYS)})", key=key, line=line)
    parser, check, _ = _KEYS[key]
    raw = raw.strip()
    if raw == "":
        raise ConfigError("missing value", key=key, line=line)
    try:
        value = parser(raw)
        if check is not None:
            check(value)
    except ValueError as e:
        raise ConfigError(str(e), key=key, line=line) from None
    return value


def parse_config(text: str) -> ConfigDocument:
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", key=key, line=lineno)
        values[key] = _parse_value(key, raw, lineno)
        lines[key] = lineno
    doc = ConfigDocument(lines=lines, **values)
    doc.sim_config()
    return doc


def load_config(path) -> ConfigDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def normalize(text: str) -> str:
    return parse_config(text).to_text()
