"""Closed-form Poisson coverage results for uniformly deployed sensors.

With ``n`` nodes spread uniformly over an area ``A``, the number of nodes
covering a fixed point is Poisson with mean ``n * pi * r**2 / A``. A node moving
at mean speed ``E[V]`` for ``t`` seconds sweeps an average area
``pi * r**2 + 2 * r * E[V] * t``, which replaces the disc area in the mobile
formulas.

For very large exponents (beyond ~700) ``exp(-x)`` underflows to zero and the
detection probabilities saturate at exactly 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CoverageParams:
    area: float = 16e6
    range: float = 500.0
    mean_speed: float = 5.0
    horizon: float = 0.0

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError(f"area must be positive, got {self.area!r}")
        if not self.range > 0:
            raise ValueError(f"range must be positive, got {self.range!r}")
        if not self.mean_speed >= 0:
            raise ValueError(f"mean_speed must be non-negative, got {self.mean_speed!r}")
        if not self.horizon >= 0:
            raise ValueError(f"horizon must be non-negative, got {self.horizon!r}")

    @property
    def disc_area(self) -> float:
        return math.pi * self.range ** 2

    def swept_area(self, duration: float | None = None) -> float:
        """Mean area covered by one node over ``duration`` (defaults to the horizon)."""
        t = self.horizon if duration is None else duration
        return self.disc_area + 2.0 * self.range * self.mean_speed * t


def _check_pd(p_d: float) -> None:
    if not 0.0 < p_d < 1.0:
        raise ValueError(f"detection probability must lie in (0, 1), got {p_d!r}")


def prob_k_coverage(n: int, params: CoverageParams, k: int) -> float:
    """P(a point is covered by exactly ``k`` static nodes)."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    lam = n * params.disc_area / params.area
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    # log-space keeps large k finite
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))


def detect_prob_static(n: int, params: CoverageParams) -> float:
    return -math.expm1(-n * params.disc_area / params.area)


def detect_prob_mobile(n: int, params: CoverageParams) -> float:
    return -math.expm1(-n * params.swept_area() / params.area)


def _min_nodes(p_d: float, area: float, per_node: float) -> int:
    bound = -area * math.log1p(-p_d) / per_node
    n = max(0, math.ceil(bound))
    # ceil of a value like 46.99999999 or 47.00000001 can land one off the
    # exact smallest n; settle it against the forward formula
    prob = lambda m: -math.expm1(-m * per_node / area)
    while n > 0 and prob(n - 1) >= p_d:
        n -= 1
    while prob(n) < p_d:
        n += 1
    return n


def min_nodes_static(p_d: float, params: CoverageParams) -> int:
    """Smallest node count whose static detection probability reaches ``p_d``."""
    _check_pd(p_d)
    return _min_nodes(p_d, params.area, params.disc_area)


def min_nodes_mobile(p_d: float, params: CoverageParams) -> int:
    """Smallest node count whose mobile detection probability over the horizon reaches ``p_d``."""
    _check_pd(p_d)
    return _min_nodes(p_d, params.area, params.swept_area())


def nodes_no_overlap(params: CoverageParams, event_duration: float) -> int:
    """Node count that would cover the area if swept regions never overlapped."""
    if event_duration < 0:
        raise ValueError(f"event duration must be non-negative, got {event_duration!r}")
    return math.ceil(params.area / params.swept_area(event_duration))


def edge_corrected_disc_area(side: float, radius: float) -> float:
    """Mean area of a radius-``radius`` disc, centred uniformly in a square, that falls inside it.

    Valid for ``radius <= side``. Used to quantify how far the bounded arena
    departs from the boundary-free Poisson law.
    """
    if radius > side:
        raise ValueError("edge correction formula requires radius <= side")
    r, a = radius, side
    return math.pi * r * r - 8.0 * r ** 3 / (3.0 * a) + r ** 4 / (2.0 * a * a)
