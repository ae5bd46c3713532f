"""Single-run simulation and swept-area coverage estimation.

A run owns two independent random streams spawned from its seed, one for the
target and one for the nodes, so that changing the mobility model leaves the
target's placement and trajectory untouched for the same seed.

Tick order: coverage is sampled at the tick boundary, then the target
advances, then the nodes. A target born inside coverage is detected at t=0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .geometry import Arena, Point2, seg_point_distance
from .mobility import MobilityParams, Model, Swarm, _advance_all, init_nodes
from .target import TargetKind, TargetSpec, _step, spawn_target

# coverage sampling guard: (node speed + target speed) * dt <= range / GUARD_DIVISOR
GUARD_DIVISOR = 10.0


@dataclass(frozen=True)
class SimConfig:
    arena: Arena = field(default_factory=Arena)
    n_nodes: int = 10
    mobility: MobilityParams = field(default_factory=MobilityParams)
    target: TargetSpec = field(default_factory=TargetSpec)
    dt: float = 1.0
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 0:
            raise ValueError(f"n_nodes must be a non-negative integer, got {self.n_nodes!r}")
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        rel = (self.mobility.effective_speed + self.target.effective_speed) * self.dt
        if rel > self.mobility.range / GUARD_DIVISOR * (1 + 1e-12):
            raise ValueError(
                f"dt={self.dt} too coarse: relative displacement per tick {rel:g} m exceeds "
                f"range/{GUARD_DIVISOR:g} = {self.mobility.range / GUARD_DIVISOR:g} m"
            )
        if any(t < 0 or not math.isfinite(t) for t in self.snapshot_times):
            raise ValueError("snapshot times must be finite and non-negative")

    @property
    def density(self) -> float:
        return self.n_nodes / self.arena.area


@dataclass(frozen=True)
class RunResult:
    detected: bool
    detection_time: float | None
    tracked_ticks: int
    event_ticks: int
    snapshots: tuple[tuple[float, tuple[Point2, ...]], ...] = ()

    @property
    def tracking_fraction(self) -> float:
        return self.tracked_ticks / self.event_ticks if self.event_ticks else 0.0


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(target stream, node stream) for one run."""
    t_ss, n_ss = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(t_ss), np.random.default_rng(n_ss)


@njit(cache=True)
def _covered(pos, tx, ty, range_):
    r2 = range_ * range_
    for i in range(pos.shape[0]):
        dx = pos[i, 0] - tx
        dy = pos[i, 1] - ty
        if dx * dx + dy * dy <= r2:
            return True
    return False


@njit(cache=True)
def _run(pos, heading, dist, lane, model, speed, step_length, range_, side, dt,
         tkind, tpos, thead, tdist, start, end, duration, tspeed, tstep,
         snap_ticks, node_rng, target_rng):
    n_snap = snap_ticks.shape[0]
    snaps = np.full((n_snap, pos.shape[0], 2), np.nan)
    detected = False
    det_tick = -1
    tracked = 0
    ticks = 0
    while True:
        for k in range(n_snap):
            if snap_ticks[k] == ticks:
                snaps[k] = pos
        if _covered(pos, tpos[0, 0], tpos[0, 1], range_):
            tracked += 1
            if not detected:
                detected = True
                det_tick = ticks
        elapsed, finished = _step(tkind, tpos, thead, tdist, start, end, ticks * dt, duration,
                                  tspeed, tstep, side, dt, target_rng)
        _advance_all(pos, heading, dist, lane, model, speed, step_length, range_, side, dt, node_rng)
        ticks += 1
        if finished:
            break
    for k in range(n_snap):
        if snap_ticks[k] == ticks:
            snaps[k] = pos
    return detected, det_tick, tracked, ticks, snaps


@njit(cache=True)
def _trajectory(pos, heading, dist, lane, model, speed, step_length, range_, side, dt, n_ticks, rng):
    out = np.empty((n_ticks + 1, pos.shape[0], 2))
    out[0] = pos
    for k in range(n_ticks):
        _advance_all(pos, heading, dist, lane, model, speed, step_length, range_, side, dt, rng)
        out[k + 1] = pos
    return out


def covered_now(nodes, target_pos, range: float) -> bool:
    """True iff some node lies within the closed disc of radius ``range`` around the target."""
    if isinstance(nodes, Swarm):
        pos = nodes.pos
    else:
        pos = np.array([n.pos for n in nodes], dtype=np.float64).reshape(-1, 2)
    return bool(_covered(pos, float(target_pos[0]), float(target_pos[1]), float(range)))


def _snapshot_ticks(times: Sequence[float], dt: float) -> np.ndarray:
    return np.array([int(round(t / dt)) for t in times], dtype=np.int64)


def run_single(config: SimConfig, seed: int) -> RunResult:
    """One seeded scenario; a pure function of ``(config, seed)``."""
    target_rng, node_rng = streams(seed)
    arena, mob, spec = config.arena, config.mobility, config.target
    target = spawn_target(spec, arena, target_rng)
    swarm = init_nodes(config.n_nodes, mob, arena, node_rng)

    tpos = np.array([target.pos], dtype=np.float64)
    start = np.asarray(target.start if target.start is not None else target.pos, dtype=np.float64)
    end = np.asarray(target.end if target.end is not None else target.pos, dtype=np.float64)
    snap_ticks = _snapshot_ticks(config.snapshot_times, config.dt)

    detected, det_tick, tracked, ticks, snaps = _run(
        swarm.pos, swarm.heading, swarm.dist, swarm.lane,
        int(mob.model), float(mob.speed), float(mob.step_length), float(mob.range),
        float(arena.side), float(config.dt),
        int(spec.kind), tpos, np.array([target.heading]), np.zeros(1), start, end,
        float(spec.duration), float(spec.speed), float(spec.step_length),
        snap_ticks, node_rng, target_rng,
    )
    snapshots = []
    for t, k, frame in zip(config.snapshot_times, snap_ticks, snaps):
        if k <= ticks:
            snapshots.append((t, tuple(Point2(float(x), float(y)) for x, y in frame)))
    return RunResult(
        detected=bool(detected),
        detection_time=det_tick * config.dt if detected else None,
        tracked_ticks=int(tracked),
        event_ticks=int(ticks),
        snapshots=tuple(snapshots),
    )


def node_trajectory(config: SimConfig, horizon: float, seed: int) -> np.ndarray:
    """Node positions at every tick boundary in ``[0, horizon]``, shape ``(ticks + 1, n, 2)``.

    Uses the same node stream as :func:`run_single` with ``seed``, so the
    positions coincide with that run's nodes.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be non-negative, got {horizon!r}")
    _, node_rng = streams(seed)
    mob = config.mobility
    swarm = init_nodes(config.n_nodes, mob, config.arena, node_rng)
    n_ticks = int(math.ceil(horizon / config.dt - 1e-9))
    return _trajectory(
        swarm.pos, swarm.heading, swarm.dist, swarm.lane,
        int(mob.model), float(mob.speed), float(mob.step_length), float(mob.range),
        float(config.arena.side), float(config.dt), n_ticks, node_rng,
    )


def grid_points(arena: Arena, grid_resolution: float) -> np.ndarray:
    """Cell centres of a square lattice with spacing at most ``grid_resolution``."""
    n = max(1, int(math.ceil(arena.side / grid_resolution - 1e-9)))
    c = (np.arange(n) + 0.5) * (arena.side / n)
    gx, gy = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def coverage_fraction(trajectory: np.ndarray, arena: Arena, radius: float, grid_resolution: float) -> float:
    """Fraction of grid points swept by the capsules of a trajectory.

    ``trajectory`` has shape ``(frames, n, 2)``; consecutive frames define one
    travel segment per node, a single frame is a set of discs.
    """
    traj = np.asarray(trajectory, dtype=np.float64)
    pts = grid_points(arena, grid_resolution)
    covered = np.zeros(len(pts), dtype=bool)
    if traj.shape[1] == 0:
        return 0.0
    if traj.shape[0] == 1:
        traj = np.concatenate([traj, traj])
    a_all, b_all = traj[:-1], traj[1:]
    n_seg = a_all.shape[0]
    chunk = max(1, 2_000_000 // (traj.shape[1] * len(pts)))
    for k in range(0, n_seg, chunk):
        todo = np.flatnonzero(~covered)
        if todo.size == 0:
            break
        a = a_all[k:k + chunk].reshape(-1, 1, 2)
        b = b_all[k:k + chunk].reshape(-1, 1, 2)
        d = seg_point_distance(a, b, pts[todo])
        covered[todo] = (d <= radius).any(axis=0)
    return float(covered.mean())


def estimate_area_coverage(config: SimConfig, horizon: float, grid_resolution: float, seed: int) -> float:
    """Fraction of the arena swept by at least one node within ``[0, horizon]``."""
    if not 0 < grid_resolution <= config.mobility.range / 5 * (1 + 1e-12):
        raise ValueError(
            f"grid_resolution must be in (0, range/5] = (0, {config.mobility.range / 5:g}], "
            f"got {grid_resolution!r}"
        )
    traj = node_trajectory(config, horizon, seed)
    return coverage_fraction(traj, config.arena, config.mobility.range, grid_resolution)


__all__ = [
    "SimConfig",
    "RunResult",
    "covered_now",
    "run_single",
    "estimate_area_coverage",
    "coverage_fraction",
    "node_trajectory",
    "grid_points",
    "streams",
    "Model",
    "TargetKind",
]
