"""Planar primitives and the square arena.

All coordinates are meters, angles are radians. The arena is the closed
square ``[0, side] x [0, side]`` with its origin at a corner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi

# "on the boundary" tolerance, meters
BOUNDARY_EPS = 1e-6


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Arena:
    side: float = 4000.0

    def __post_init__(self):
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ValueError(f"arena side must be positive and finite, got {self.side!r}")

    @property
    def area(self) -> float:
        return self.side * self.side

    @property
    def diagonal(self) -> float:
        return self.side * math.sqrt(2.0)

    def contains(self, p, tol: float = 0.0) -> bool:
        x, y = p
        return -tol <= x <= self.side + tol and -tol <= y <= self.side + tol


def normalize_angle(angle: float) -> float:
    """Wrap ``angle`` into ``[0, 2*pi)``."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    if a >= TWO_PI:
        a = 0.0
    return a


def distance(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def seg_point_distance(a, b, p):
    """Minimum distance from ``p`` to the closed segment ``ab``.

    Broadcasts over leading dimensions, so ``a``/``b`` of shape ``(m, 1, 2)``
    against ``p`` of shape ``(g, 2)`` yields an ``(m, g)`` distance table.
    Scalar inputs return a Python float.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = np.asarray(p, dtype=float)
    ab = b - a
    ap = p - a
    denom = np.sum(ab * ab, axis=-1)
    num = np.sum(ap * ab, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    d = np.sqrt(np.sum((p - closest) ** 2, axis=-1))
    if d.ndim == 0:
        return float(d)
    return d


def sample_uniform_point(arena: Arena, rng: np.random.Generator) -> Point2:
    return Point2(float(rng.uniform(0.0, arena.side)), float(rng.uniform(0.0, arena.side)))


@njit(cache=True)
def _inward_sector(x, y, side, eps):
    # Returns (center, half_width) of the open sector of inward headings,
    # half_width == 0 when the point is not on the boundary.
    nx = 0.0
    ny = 0.0
    edges = 0
    if x <= eps:
        nx += 1.0
        edges += 1
    elif x >= side - eps:
        nx -= 1.0
        edges += 1
    if y <= eps:
        ny += 1.0
        edges += 1
    elif y >= side - eps:
        ny -= 1.0
        edges += 1
    if edges == 0:
        return 0.0, 0.0
    half = 0.5 * np.pi if edges == 1 else 0.25 * np.pi
    return np.arctan2(ny, nx), half


@njit(cache=True)
def _redirect_heading(x, y, side, eps, rng):
    center, half = _inward_sector(x, y, side, eps)
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    a = center - half + 2.0 * half * u
    a = a % (2.0 * np.pi)
    if a >= 2.0 * np.pi:
        a = 0.0
    return a


def on_boundary(pos, arena: Arena, eps: float = BOUNDARY_EPS) -> bool:
    x, y = pos
    return x <= eps or y <= eps or x >= arena.side - eps or y >= arena.side - eps


def redirect_into_interior(pos, arena: Arena, rng: np.random.Generator) -> float:
    """Draw a heading uniformly from the directions pointing into the arena.

    ``pos`` must sit on (or within ``BOUNDARY_EPS`` of) an edge. On an edge the
    admissible set is the open inward half-plane, at a corner the open
    quarter-plane.
    """
    x, y = float(pos[0]), float(pos[1])
    if not on_boundary((x, y), arena):
        raise ValueError(f"position {(x, y)} is not on the arena boundary")
    return float(_redirect_heading(x, y, float(arena.side), BOUNDARY_EPS, rng))
