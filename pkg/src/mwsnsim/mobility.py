"""Node mobility models.

Five behaviours are supported: static nodes, random walk, random direction
(zero pause time), parallel-path sweeping, and the coverage-based repulsion
model in which every node steers along the resultant of inverse-distance
repulsion from its neighbours plus a ``1/range`` momentum term along its own
heading.

Kinematics are an event loop per node. Within a tick a node travels
``speed * dt``; the move is cut at the two kinds of events, reaching the
step length (random walk / coverage-based direction decision) and touching
a wall (the model's boundary rule), and the residual distance is travelled
along the new heading. Decisions read the positions at the start of the
tick, so the update is synchronous and independent of node order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterator, Sequence

import numpy as np
from numba import njit

from .geometry import BOUNDARY_EPS, TWO_PI, Arena, Point2, _redirect_heading

# Repulsion magnitude is capped at 1/D_MIN for near-coincident nodes.
D_MIN = 1.0
ZERO_RESULTANT = 1e-12
STEP_TOL = 1e-9
MAX_EVENTS_PER_TICK = 10_000

STATIC = 0
RANDOM_WALK = 1
RANDOM_DIRECTION = 2
PARALLEL_PATH = 3
COVERAGE_BASED = 4


class Model(IntEnum):
    STATIC = STATIC
    RANDOM_WALK = RANDOM_WALK
    RANDOM_DIRECTION = RANDOM_DIRECTION
    PARALLEL_PATH = PARALLEL_PATH
    COVERAGE_BASED = COVERAGE_BASED

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "Model":
        key = label.strip().lower().replace("-", "_")
        try:
            return cls[key.upper()]
        except KeyError:
            names = ", ".join(m.label for m in cls)
            raise ValueError(f"unknown mobility model {label!r} (expected one of {names})") from None

    @property
    def is_mobile(self) -> bool:
        return self is not Model.STATIC


@dataclass(frozen=True)
class MobilityParams:
    model: Model = Model.COVERAGE_BASED
    speed: float = 5.0
    max_speed: float | None = None
    range: float = 500.0
    step_length: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.max_speed is None:
            object.__setattr__(self, "max_speed", self.speed)
        if not (0.0 <= self.speed <= self.max_speed and math.isfinite(self.max_speed)):
            raise ValueError(
                f"need 0 <= speed <= max_speed, got speed={self.speed!r}, max_speed={self.max_speed!r}"
            )
        if not (self.range > 0 and math.isfinite(self.range)):
            raise ValueError(f"range must be positive, got {self.range!r}")
        if not (self.step_length > 0 and math.isfinite(self.step_length)):
            raise ValueError(f"step_length must be positive, got {self.step_length!r}")

    @property
    def effective_speed(self) -> float:
        return self.speed if self.model.is_mobile else 0.0


@dataclass
class NodeState:
    pos: Point2
    heading: float
    dist_since_decision: float = 0.0
    sweep_axis_coord: float = 0.0


@dataclass
class Swarm:
    """Structure-of-arrays view over a sequence of :class:`NodeState`."""

    pos: np.ndarray
    heading: np.ndarray
    dist: np.ndarray = field(default=None)
    lane: np.ndarray = field(default=None)

    def __post_init__(self):
        self.pos = np.ascontiguousarray(self.pos, dtype=np.float64).reshape(-1, 2)
        n = self.pos.shape[0]
        self.heading = np.ascontiguousarray(self.heading, dtype=np.float64).reshape(n)
        self.dist = np.zeros(n) if self.dist is None else np.ascontiguousarray(self.dist, dtype=np.float64)
        self.lane = self.pos[:, 1].copy() if self.lane is None else np.ascontiguousarray(self.lane, dtype=np.float64)

    @classmethod
    def from_states(cls, states: Sequence[NodeState]) -> "Swarm":
        states = list(states)
        return cls(
            pos=np.array([s.pos for s in states], dtype=np.float64).reshape(-1, 2),
            heading=np.array([s.heading for s in states], dtype=np.float64),
            dist=np.array([s.dist_since_decision for s in states], dtype=np.float64),
            lane=np.array([s.sweep_axis_coord for s in states], dtype=np.float64),
        )

    def __len__(self) -> int:
        return self.pos.shape[0]

    def __getitem__(self, i: int) -> NodeState:
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        return NodeState(
            pos=Point2(float(self.pos[i, 0]), float(self.pos[i, 1])),
            heading=float(self.heading[i]),
            dist_since_decision=float(self.dist[i]),
            sweep_axis_coord=float(self.lane[i]),
        )

    def __iter__(self) -> Iterator[NodeState]:
        return (self[i] for i in range(len(self)))

    def copy(self) -> "Swarm":
        return Swarm(self.pos.copy(), self.heading.copy(), self.dist.copy(), self.lane.copy())


def _as_swarm(nodes) -> Swarm:
    return nodes if isinstance(nodes, Swarm) else Swarm.from_states(nodes)


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True)
def _wrap(a):
    a = a % (2.0 * np.pi)
    if a >= 2.0 * np.pi:
        a = 0.0
    return a


@njit(cache=True)
def _unit(h):
    c = np.cos(h)
    s = np.sin(h)
    # cos(pi/2), sin(pi) etc. are ~1e-16, not 0; keep axis-aligned motion exact
    if abs(c) < 1e-15:
        c = 0.0
    if abs(s) < 1e-15:
        s = 0.0
    return c, s


@njit(cache=True)
def _resultant(sx, sy, heading, nbrs, range_, rng):
    if nbrs.shape[0] == 0:
        return heading
    c, s = _unit(heading)
    rx = c / range_
    ry = s / range_
    for j in range(nbrs.shape[0]):
        dx = sx - nbrs[j, 0]
        dy = sy - nbrs[j, 1]
        d = np.sqrt(dx * dx + dy * dy)
        if d == 0.0:
            a = rng.random() * 2.0 * np.pi
            rx += np.cos(a) / D_MIN
            ry += np.sin(a) / D_MIN
        else:
            mag = 1.0 / max(d, D_MIN)
            rx += mag * dx / d
            ry += mag * dy / d
    if np.sqrt(rx * rx + ry * ry) < ZERO_RESULTANT:
        return heading
    return _wrap(np.arctan2(ry, rx))


@njit(cache=True)
def _heading_leaves(x, y, h, side, eps):
    c, s = _unit(h)
    return (
        (x <= eps and c < 0.0)
        or (x >= side - eps and c > 0.0)
        or (y <= eps and s < 0.0)
        or (y >= side - eps and s > 0.0)
    )


@njit(cache=True)
def _boundary_rule(i, pos, heading, model, side, rng):
    if model == PARALLEL_PATH:
        return _wrap(heading[i] + np.pi)
    return _redirect_heading(pos[i, 0], pos[i, 1], side, BOUNDARY_EPS, rng)


@njit(cache=True)
def _step_rule(i, heading, model, range_, snapshot, rng):
    if model == RANDOM_WALK:
        return _wrap(rng.random() * 2.0 * np.pi)
    if model == COVERAGE_BASED:
        sx = snapshot[i, 0]
        sy = snapshot[i, 1]
        n = snapshot.shape[0]
        nbrs = np.empty((n, 2))
        k = 0
        for j in range(n):
            if j == i:
                continue
            dx = snapshot[j, 0] - sx
            dy = snapshot[j, 1] - sy
            if dx * dx + dy * dy <= range_ * range_:
                nbrs[k, 0] = snapshot[j, 0]
                nbrs[k, 1] = snapshot[j, 1]
                k += 1
        return _resultant(sx, sy, heading[i], nbrs[:k], range_, rng)
    return heading[i]


@njit(cache=True)
def _move_node(i, pos, heading, dist, lane, model, speed, step_length, range_, side, dt, snapshot, rng):
    remaining = speed * dt
    stepped = model == RANDOM_WALK or model == COVERAGE_BASED
    for _ in range(MAX_EVENTS_PER_TICK):
        if remaining <= 0.0:
            return
        x = pos[i, 0]
        y = pos[i, 1]
        c, s = _unit(heading[i])
        tx = np.inf
        ty = np.inf
        if c > 0.0:
            tx = (side - x) / c
        elif c < 0.0:
            tx = -x / c
        if s > 0.0:
            ty = (side - y) / s
        elif s < 0.0:
            ty = -y / s
        t_wall = max(min(tx, ty), 0.0)
        t_step = step_length - dist[i] if stepped else np.inf
        move = min(remaining, t_wall, t_step)
        hit_wall = t_wall <= move

        nx = x + move * c
        ny = y + move * s
        if hit_wall:
            if tx <= move:
                nx = side if c > 0.0 else 0.0
            if ty <= move:
                ny = side if s > 0.0 else 0.0
        nx = min(max(nx, 0.0), side)
        ny = min(max(ny, 0.0), side)
        if model == PARALLEL_PATH:
            ny = lane[i]
        pos[i, 0] = nx
        pos[i, 1] = ny
        remaining -= move
        if stepped:
            dist[i] += move

        if hit_wall and _heading_leaves(nx, ny, heading[i], side, BOUNDARY_EPS):
            heading[i] = _boundary_rule(i, pos, heading, model, side, rng)
        if stepped and dist[i] >= step_length - STEP_TOL:
            dist[i] = 0.0
            heading[i] = _step_rule(i, heading, model, range_, snapshot, rng)
    raise RuntimeError("node kinematics did not converge within one tick")


@njit(cache=True)
def _advance_all(pos, heading, dist, lane, model, speed, step_length, range_, side, dt, rng):
    if model == STATIC:
        return
    snapshot = pos.copy()
    for i in range(pos.shape[0]):
        _move_node(i, pos, heading, dist, lane, model, speed, step_length, range_, side, dt, snapshot, rng)


@njit(cache=True)
def _init_arrays(n, model, side, rng):
    pos = np.empty((n, 2))
    for i in range(n):
        pos[i, 0] = rng.uniform(0.0, side)
        pos[i, 1] = rng.uniform(0.0, side)
    heading = np.empty(n)
    for i in range(n):
        if model == PARALLEL_PATH:
            heading[i] = np.pi * rng.integers(0, 2)
        else:
            heading[i] = _wrap(rng.uniform(0.0, 2.0 * np.pi))
    return pos, heading, np.zeros(n), pos[:, 1].copy()


# ---------------------------------------------------------------------------
# public API


def init_nodes(n: int, params: MobilityParams, arena: Arena, rng: np.random.Generator) -> Swarm:
    """Uniform random deployment.

    Positions are i.i.d. uniform over the arena. Headings are uniform on
    ``[0, 2*pi)``, except for parallel-path nodes which pick one of the two
    x-axis sweep directions and keep their initial ``y`` as the lane.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    pos, heading, dist, lane = _init_arrays(int(n), int(params.model), float(arena.side), rng)
    return Swarm(pos, heading, dist, lane)


def resultant_direction(node: NodeState, neighbors, range: float, rng: np.random.Generator | None = None) -> float:
    """Heading of the coverage-based resultant force acting on ``node``.

    ``neighbors`` are the positions of the other nodes inside ``range``. With no
    neighbours, or when the forces cancel, the current heading is kept.
    """
    nbrs = np.ascontiguousarray(np.asarray(neighbors, dtype=np.float64).reshape(-1, 2))
    if rng is None:
        rng = np.random.default_rng()
    return float(_resultant(float(node.pos[0]), float(node.pos[1]), float(node.heading), nbrs, float(range), rng))


def decide_direction(
    node: NodeState,
    model: MobilityParams,
    all_nodes: Sequence[NodeState],
    arena: Arena,
    rng: np.random.Generator,
) -> float:
    """New heading for ``node`` at a decision event.

    A node sitting on a wall with a heading that leaves the arena gets the
    model's boundary rule (parallel-path reverses, every other model draws an
    inward heading). Otherwise the step rule applies: random walk redraws,
    coverage-based follows the resultant force from ``all_nodes`` within range,
    random direction and parallel-path keep their heading.
    """
    if model.model is Model.STATIC:
        raise ValueError("static nodes never take direction decisions")
    swarm = _as_swarm(all_nodes)
    others = [s for s in swarm]
    try:
        i = others.index(node)
    except ValueError:
        swarm = Swarm.from_states(others + [node])
        i = len(swarm) - 1
    side = float(arena.side)
    m = int(model.model)
    x, y = float(node.pos[0]), float(node.pos[1])
    if _heading_leaves(x, y, float(node.heading), side, BOUNDARY_EPS):
        pos = np.array([[x, y]])
        return float(_boundary_rule(0, pos, np.array([node.heading], dtype=float), m, side, rng))
    heading = swarm.heading.copy()
    heading[i] = node.heading
    return float(_step_rule(i, heading, m, float(model.range), swarm.pos, rng))


def advance(nodes, params: MobilityParams, arena: Arena, dt: float, rng: np.random.Generator) -> Swarm:
    """Move every node for ``dt`` seconds; returns a new :class:`Swarm`."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    out = _as_swarm(nodes).copy()
    _advance_all(
        out.pos, out.heading, out.dist, out.lane,
        int(params.model), float(params.speed), float(params.step_length),
        float(params.range), float(arena.side), float(dt), rng,
    )
    return out


def with_model(params: MobilityParams, model: Model) -> MobilityParams:
    return replace(params, model=Model(model))


__all__ = [
    "Model",
    "MobilityParams",
    "NodeState",
    "Swarm",
    "init_nodes",
    "resultant_direction",
    "decide_direction",
    "advance",
    "with_model",
    "TWO_PI",
]
