"""The single event/target of a run.

A target is either a stationary point, a border-to-border linear crosser, or
a random walker sharing the random-walk node kinematics. Every kind lives
for a finite duration; a linear crosser also finishes when it reaches the
opposite border.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np
from numba import njit

from .geometry import Arena, Point2
from .mobility import RANDOM_WALK, _move_node, _wrap

STATIONARY = 0
LINEAR_CROSSING = 1
RANDOM_WALK_TARGET = 2

# elapsed-time comparisons tolerate accumulated dt rounding
_TIME_TOL = 1e-9


class TargetKind(IntEnum):
    STATIONARY = STATIONARY
    LINEAR_CROSSING = LINEAR_CROSSING
    RANDOM_WALK = RANDOM_WALK_TARGET

    @property
    def label(self) -> str:
        return {0: "stationary", 1: "linear", 2: "random_walk"}[int(self)]

    @classmethod
    def from_label(cls, label: str) -> "TargetKind":
        key = label.strip().lower().replace("-", "_")
        aliases = {
            "stationary": cls.STATIONARY,
            "static": cls.STATIONARY,
            "linear": cls.LINEAR_CROSSING,
            "linear_crossing": cls.LINEAR_CROSSING,
            "random_walk": cls.RANDOM_WALK,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(
                f"unknown target kind {label!r} (expected stationary, linear or random_walk)"
            ) from None

    @property
    def is_mobile(self) -> bool:
        return self is not TargetKind.STATIONARY


@dataclass(frozen=True)
class TargetSpec:
    kind: TargetKind = TargetKind.STATIONARY
    duration: float = 500.0
    speed: float = 5.0
    step_length: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TargetKind(self.kind))
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ValueError(f"target duration must be positive, got {self.duration!r}")
        if self.kind.is_mobile and not (self.speed > 0 and math.isfinite(self.speed)):
            raise ValueError(f"mobile target speed must be positive, got {self.speed!r}")
        if not self.step_length > 0:
            raise ValueError(f"target step_length must be positive, got {self.step_length!r}")

    @property
    def effective_speed(self) -> float:
        return self.speed if self.kind.is_mobile else 0.0


@dataclass(frozen=True)
class TargetState:
    pos: Point2
    heading: float = 0.0
    dist_since_decision: float = 0.0
    start: Point2 | None = None
    end: Point2 | None = None
    elapsed: float = 0.0
    finished: bool = False


@njit(cache=True)
def _spawn(kind, side, rng):
    # returns pos, heading, start, end as flat floats
    if kind == LINEAR_CROSSING:
        edge = rng.integers(0, 4)
        u = rng.uniform(0.0, side)
        v = rng.uniform(0.0, side)
        if edge == 0:  # x = 0 -> x = side
            sx, sy, ex, ey = 0.0, u, side, v
        elif edge == 1:  # x = side -> x = 0
            sx, sy, ex, ey = side, u, 0.0, v
        elif edge == 2:  # y = 0 -> y = side
            sx, sy, ex, ey = u, 0.0, v, side
        else:  # y = side -> y = 0
            sx, sy, ex, ey = u, side, v, 0.0
        h = _wrap(np.arctan2(ey - sy, ex - sx))
        return sx, sy, h, sx, sy, ex, ey
    x = rng.uniform(0.0, side)
    y = rng.uniform(0.0, side)
    h = 0.0
    if kind == RANDOM_WALK_TARGET:
        h = _wrap(rng.uniform(0.0, 2.0 * np.pi))
    return x, y, h, x, y, x, y


@njit(cache=True)
def _step(kind, tpos, thead, tdist, start, end, elapsed, duration, speed, step_length, side, dt, rng):
    """Advance the target in place; returns (elapsed, finished)."""
    elapsed += dt
    if kind == LINEAR_CROSSING:
        dx = end[0] - start[0]
        dy = end[1] - start[1]
        length = np.sqrt(dx * dx + dy * dy)
        frac = 1.0 if length == 0.0 else min(1.0, speed * elapsed / length)
        tpos[0, 0] = start[0] + frac * dx
        tpos[0, 1] = start[1] + frac * dy
        if frac >= 1.0 - 1e-12:
            return elapsed, True
    elif kind == RANDOM_WALK_TARGET:
        _move_node(0, tpos, thead, tdist, tpos[:, 1].copy(), RANDOM_WALK, speed, step_length,
                   1.0, side, dt, tpos, rng)
    return elapsed, elapsed >= duration - _TIME_TOL * max(1.0, duration)


def spawn_target(spec: TargetSpec, arena: Arena, rng: np.random.Generator) -> TargetState:
    """Place a new target.

    Stationary and random-walk targets appear uniformly in the arena. A linear
    crosser starts uniformly on a uniformly chosen edge and heads for a uniform
    point on the opposite edge.
    """
    x, y, h, sx, sy, ex, ey = _spawn(int(spec.kind), float(arena.side), rng)
    if spec.kind is TargetKind.LINEAR_CROSSING:
        return TargetState(pos=Point2(x, y), heading=h, start=Point2(sx, sy), end=Point2(ex, ey))
    return TargetState(pos=Point2(x, y), heading=h)


def advance_target(
    state: TargetState, spec: TargetSpec, arena: Arena, dt: float, rng: np.random.Generator
) -> TargetState:
    """Advance by ``dt``. The returned state has ``finished`` set once the event is over."""
    if state.finished:
        raise RuntimeError("advance_target called on a finished target")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    tpos = np.array([state.pos], dtype=np.float64)
    thead = np.array([state.heading], dtype=np.float64)
    tdist = np.array([state.dist_since_decision], dtype=np.float64)
    start = np.asarray(state.start if state.start is not None else state.pos, dtype=np.float64)
    end = np.asarray(state.end if state.end is not None else state.pos, dtype=np.float64)
    elapsed, finished = _step(
        int(spec.kind), tpos, thead, tdist, start, end, float(state.elapsed), float(spec.duration),
        float(spec.speed), float(spec.step_length), float(arena.side), float(dt), rng,
    )
    return replace(
        state,
        pos=Point2(float(tpos[0, 0]), float(tpos[0, 1])),
        heading=float(thead[0]),
        dist_since_decision=float(tdist[0]),
        elapsed=float(elapsed),
        finished=bool(finished),
    )


def crossing_time(state: TargetState, spec: TargetSpec) -> float:
    """Time a linear crosser needs to reach the far border."""
    if state.start is None or state.end is None:
        return math.inf
    return math.dist(state.start, state.end) / spec.speed
