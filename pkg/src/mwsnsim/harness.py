"""Monte Carlo orchestration: repeated runs, parameter sweeps, minimum-node
search and spatial snapshots.

Seeding
-------
Run ``i`` of an experiment uses seed ``base_seed + i``. A sweep cell with
``n_nodes = N`` and ``target_duration = td`` uses the base
``base_seed + 10**6 * cell_key(N, td)``, where ``cell_key`` is a stable hash
of the cell's values. Cells therefore keep their seeds when other cells are
added or removed, and all mobility models in the same cell see the same
targets and initial deployments.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .analysis import CoverageParams, min_nodes_mobile
from .engine import RunResult, SimConfig, node_trajectory, run_single
from .mobility import Model

CELL_STRIDE = 10**6
HIST_BIN_M = 50.0


class Metric(Enum):
    DETECTION_PROBABILITY = "detection_probability"
    TRACKING_PERCENTAGE = "tracking_percentage"


@dataclass(frozen=True)
class Experiment:
    base_config: SimConfig = field(default_factory=SimConfig)
    runs: int = 2000
    base_seed: int = 0

    def __post_init__(self):
        if int(self.runs) != self.runs or self.runs < 1:
            raise ValueError(f"runs must be a positive integer, got {self.runs!r}")
        if int(self.base_seed) != self.base_seed or self.base_seed < 0:
            raise ValueError(f"base_seed must be a non-negative integer, got {self.base_seed!r}")

    def seeds(self) -> range:
        return range(self.base_seed, self.base_seed + self.runs)


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std_error: float
    runs: int
    metric: Metric


@dataclass(frozen=True)
class SweepGrid:
    n_values: tuple[int, ...] = (2, 10, 18, 26)
    td_values: tuple[float, ...] = (100.0, 300.0, 500.0, 1000.0)
    models: tuple[Model, ...] = tuple(Model)

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "td_values", tuple(float(t) for t in self.td_values))
        object.__setattr__(self, "models", tuple(Model(m) for m in self.models))
        if not (self.n_values and self.td_values and self.models):
            raise ValueError("sweep grid axes must be non-empty")
        if any(n < 0 for n in self.n_values) or any(t <= 0 for t in self.td_values):
            raise ValueError("sweep grid needs n >= 0 and target durations > 0")


@dataclass(frozen=True)
class SweepRow:
    model: Model
    n_nodes: int
    target_duration: float
    detection: Aggregate
    tracking: Aggregate


def aggregate(results: Mapping[int, RunResult]) -> tuple[Aggregate, Aggregate]:
    """Detection and tracking aggregates of runs keyed by run index.

    Sums go through ``math.fsum`` so the result does not depend on the order
    in which runs completed.
    """
    if not results:
        raise ValueError("no runs to aggregate")
    keys = sorted(results)
    runs = len(keys)
    det = [1.0 if results[k].detected else 0.0 for k in keys]
    trk = [results[k].tracking_fraction for k in keys]

    p = math.fsum(det) / runs
    det_agg = Aggregate(p, math.sqrt(max(p * (1.0 - p), 0.0) / runs), runs, Metric.DETECTION_PROBABILITY)

    m = math.fsum(trk) / runs
    if runs > 1:
        var = math.fsum((x - m) ** 2 for x in trk) / (runs - 1)
        se = math.sqrt(var / runs)
    else:
        se = 0.0
    trk_agg = Aggregate(m, se, runs, Metric.TRACKING_PERCENTAGE)
    return det_agg, trk_agg


def run_all(exp: Experiment) -> dict[int, RunResult]:
    return {i: run_single(exp.base_config, exp.base_seed + i) for i in range(exp.runs)}


def monte_carlo(exp: Experiment) -> tuple[Aggregate, Aggregate]:
    """(detection, tracking) aggregates over ``exp.runs`` seeded runs."""
    return aggregate(run_all(exp))


def cell_key(n_nodes: int, target_duration: float) -> int:
    return zlib.crc32(f"{int(n_nodes)}|{float(target_duration)!r}".encode())


def cell_seed(base_seed: int, n_nodes: int, target_duration: float) -> int:
    return base_seed + CELL_STRIDE * cell_key(n_nodes, target_duration)


def cell_experiment(template: Experiment, model: Model, n_nodes: int, target_duration: float) -> Experiment:
    cfg = template.base_config
    cfg = replace(
        cfg,
        n_nodes=n_nodes,
        mobility=replace(cfg.mobility, model=Model(model)),
        target=replace(cfg.target, duration=target_duration),
    )
    return replace(template, base_config=cfg, base_seed=cell_seed(template.base_seed, n_nodes, target_duration))


def sweep(grid: SweepGrid, template: Experiment) -> list[SweepRow]:
    """One row per (model, n_nodes, target_duration) cell, sorted by model label then values."""
    cells = sorted(
        {(m, n, td) for m in grid.models for n in grid.n_values for td in grid.td_values},
        key=lambda c: (c[0].label, c[1], c[2]),
    )
    # build every cell config up front so a bad cell fails before any run starts
    exps = [(c, cell_experiment(template, *c)) for c in cells]
    rows = []
    for (model, n, td), exp in exps:
        det, trk = monte_carlo(exp)
        rows.append(SweepRow(model, n, td, det, trk))
    return rows


def analytic_min_nodes(p_d: float, config: SimConfig) -> int:
    params = CoverageParams(
        area=config.arena.area,
        range=config.mobility.range,
        mean_speed=config.mobility.effective_speed,
        horizon=config.target.duration,
    )
    return min_nodes_mobile(p_d, params)


def find_min_nodes_empirical(p_d_target: float, template: Experiment, n_max: int) -> int | None:
    """Smallest node count whose simulated detection frequency reaches ``p_d_target``.

    The scan starts at the closed-form mobile bound (no mobility model covers
    more than the union of swept discs) and walks upward one node at a time.
    Returns ``None`` if nothing up to ``n_max`` qualifies.
    """
    if not 0.0 < p_d_target < 1.0:
        raise ValueError(f"target detection probability must lie in (0, 1), got {p_d_target!r}")
    start = analytic_min_nodes(p_d_target, template.base_config)
    for n in range(max(start, 0), n_max + 1):
        exp = replace(template, base_config=replace(template.base_config, n_nodes=n))
        det, _ = monte_carlo(exp)
        if det.mean >= p_d_target:
            return n
    return None


def nearest_neighbor_distances(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        return np.empty(0)
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def histogram_edges(side: float, bin_width: float = HIST_BIN_M) -> np.ndarray:
    diag = side * math.sqrt(2.0)
    n = int(math.ceil(diag / bin_width))
    return np.arange(n + 1) * bin_width


@dataclass
class SnapshotExport:
    times: tuple[float, ...]
    positions: list[tuple[float, int, float, float]]
    nn_distances: dict[float, np.ndarray]
    bin_edges: np.ndarray

    def histogram(self, time: float | None = None) -> np.ndarray:
        """Nearest-neighbour distance counts, pooled over runs (and over times unless one is given)."""
        if time is None:
            chunks = list(self.nn_distances.values())
        else:
            chunks = [self.nn_distances[time]]
        d = np.concatenate(chunks) if chunks else np.empty(0)
        counts, _ = np.histogram(d, bins=self.bin_edges)
        return counts

    def mean_nn_distance(self, time: float) -> float:
        return float(np.mean(self.nn_distances[time]))


def export_snapshots(exp: Experiment, times: Sequence[float]) -> SnapshotExport:
    """Node positions of run 0 at each requested time, plus nearest-neighbour
    distances pooled over all runs of ``exp``."""
    times = tuple(float(t) for t in times)
    cfg = exp.base_config
    edges = histogram_edges(cfg.arena.side)
    if not times:
        return SnapshotExport(times, [], {}, edges)
    if any(t < 0 for t in times):
        raise ValueError("snapshot times must be non-negative")
    ticks = [int(round(t / cfg.dt)) for t in times]
    horizon = max(ticks) * cfg.dt
    positions: list[tuple[float, int, float, float]] = []
    pooled: dict[float, list[np.ndarray]] = {t: [] for t in times}
    for i in range(exp.runs):
        traj = node_trajectory(cfg, horizon, exp.base_seed + i)
        for t, k in zip(times, ticks):
            frame = traj[k]
            pooled[t].append(nearest_neighbor_distances(frame))
            if i == 0:
                positions.extend((t, j, float(x), float(y)) for j, (x, y) in enumerate(frame))
    nn = {t: np.concatenate(v) for t, v in pooled.items()}
    return SnapshotExport(times, positions, nn, edges)


def pooled_standard_error(a: Aggregate, b: Aggregate) -> float:
    return math.hypot(a.std_error, b.std_error)


__all__ = [
    "Metric",
    "Experiment",
    "Aggregate",
    "SweepGrid",
    "SweepRow",
    "aggregate",
    "run_all",
    "monte_carlo",
    "cell_key",
    "cell_seed",
    "cell_experiment",
    "sweep",
    "analytic_min_nodes",
    "find_min_nodes_empirical",
    "nearest_neighbor_distances",
    "histogram_edges",
    "SnapshotExport",
    "export_snapshots",
    "pooled_standard_error",
]
