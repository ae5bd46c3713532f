import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mwsnsim.geometry import (
    Arena,
    Point2,
    distance,
    normalize_angle,
    redirect_into_interior,
    sample_uniform_point,
    seg_point_distance,
)

coord = st.floats(-1e4, 1e4, allow_nan=False, allow_infinity=False)
points = st.tuples(coord, coord)


@pytest.mark.parametrize(
    "p, q, expected",
    [((0, 0), (0, 0), 0.0), ((0, 0), (3, 4), 5.0), ((100, 200), (400, 600), 500.0)],
)
def test_distance_examples(p, q, expected):
    assert distance(Point2(*p), Point2(*q)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "a, b, p, expected",
    [
        ((0, 0), (0, 0), (0, 7), 7.0),
        ((0, 0), (100, 0), (50, 499), 499.0),
        ((0, 0), (100, 0), (200, 0), 100.0),
    ],
)
def test_seg_point_distance_examples(a, b, p, expected):
    assert seg_point_distance(a, b, p) == pytest.approx(expected, abs=1e-12)


def test_seg_point_distance_matches_dense_sampling(rng):
    # oracle: minimum over 20001 points sampled along the segment
    for _ in range(50):
        a, b, p = rng.uniform(-100, 100, size=(3, 2))
        t = np.linspace(0.0, 1.0, 20001)[:, None]
        brute = np.min(np.hypot(*(a + t * (b - a) - p).T))
        seg_len = np.hypot(*(b - a))
        assert seg_point_distance(a, b, p) == pytest.approx(brute, abs=seg_len / 20000 + 1e-9)


def test_seg_point_distance_broadcasts():
    a = np.array([[0.0, 0.0], [10.0, 0.0]]).reshape(2, 1, 2)
    b = np.array([[100.0, 0.0], [10.0, 0.0]]).reshape(2, 1, 2)
    p = np.array([[50.0, 3.0], [10.0, 4.0], [-3.0, 4.0]])
    d = seg_point_distance(a, b, p)
    assert d.shape == (2, 3)
    for i in range(2):
        for j in range(3):
            assert d[i, j] == pytest.approx(seg_point_distance(a[i, 0], b[i, 0], p[j]))


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9


@given(points, points, points)
def test_segment_distance_bounded_by_endpoints(a, b, p):
    d = seg_point_distance(a, b, p)
    assert 0.0 <= d <= min(distance(a, p), distance(b, p)) + 1e-9


@given(points, points, points, st.floats(0, 2 * math.pi), points)
def test_segment_distance_rigid_motion_invariant(a, b, p, theta, shift):
    c, s = math.cos(theta), math.sin(theta)

    def move(v):
        return (c * v[0] - s * v[1] + shift[0], s * v[0] + c * v[1] + shift[1])

    before = seg_point_distance(a, b, p)
    after = seg_point_distance(move(a), move(b), move(p))
    assert after == pytest.approx(before, rel=1e-9, abs=1e-7)


def test_sample_uniform_point_containment_and_mean(rng):
    arena = Arena(4000.0)
    pts = np.array([sample_uniform_point(arena, rng) for _ in range(100_000)])
    assert pts.min() >= 0.0 and pts.max() <= 4000.0
    assert abs(pts[:, 0].mean() - 2000.0) < 50.0


def test_sample_uniform_point_deterministic():
    arena = Arena(4000.0)
    g1, g2 = np.random.default_rng(5), np.random.default_rng(5)
    assert [sample_uniform_point(arena, g1) for _ in range(20)] == [sample_uniform_point(arena, g2) for _ in range(20)]


def _in_open_interval(angle, lo, hi):
    # interval given in an unwrapped frame, angle in [0, 2pi)
    for a in (angle - 2 * math.pi, angle, angle + 2 * math.pi):
        if lo < a < hi:
            return True
    return False


@pytest.mark.parametrize(
    "pos, lo, hi",
    [
        ((0.0, 2000.0), -math.pi / 2, math.pi / 2),
        ((0.0, 0.0), 0.0, math.pi / 2),
        ((4000.0, 2000.0), math.pi / 2, 3 * math.pi / 2),
        ((2000.0, 4000.0), math.pi, 2 * math.pi),
        ((4000.0, 4000.0), math.pi, 3 * math.pi / 2),
        ((0.0, 4000.0), -math.pi / 2, 0.0),
        ((4000.0 - 5e-7, 1e-7), math.pi / 2, math.pi),
    ],
)
def test_redirect_into_interior_sector(pos, lo, hi, rng):
    arena = Arena(4000.0)
    headings = [redirect_into_interior(pos, arena, rng) for _ in range(2000)]
    assert all(0.0 <= h < 2 * math.pi for h in headings)
    assert all(_in_open_interval(h, lo, hi) for h in headings)
    # uniform over the sector: both halves get hit
    mid = 0.5 * (lo + hi)
    lower = sum(_in_open_interval(h, lo, mid) for h in headings)
    assert 800 < lower < 1200


def test_redirect_rejects_interior_point(rng):
    with pytest.raises(ValueError):
        redirect_into_interior((10.0, 10.0), Arena(4000.0), rng)


@given(
    st.sampled_from(["left", "right", "bottom", "top", "ll", "lr", "ul", "ur"]),
    st.floats(0, 4000),
    st.integers(0, 2**32 - 1),
    st.floats(1e-3, 3999),
)
def test_redirect_moves_inward_from_touched_edges(edge, u, seed, step):
    side = 4000.0
    pos = {
        "left": (0.0, u), "right": (side, u), "bottom": (u, 0.0), "top": (u, side),
        "ll": (0.0, 0.0), "lr": (side, 0.0), "ul": (0.0, side), "ur": (side, side),
    }[edge]
    h = redirect_into_interior(pos, Arena(side), np.random.default_rng(seed))
    x = pos[0] + step * math.cos(h)
    y = pos[1] + step * math.sin(h)
    if pos[0] == 0.0:
        assert x > 0.0
    if pos[0] == side:
        assert x < side
    if pos[1] == 0.0:
        assert y > 0.0
    if pos[1] == side:
        assert y < side


@given(st.floats(-100, 100))
def test_normalize_angle_range(a):
    h = normalize_angle(a)
    assert 0.0 <= h < 2 * math.pi
    assert math.cos(h) == pytest.approx(math.cos(a), abs=1e-9)


def test_arena_rejects_non_positive_side():
    with pytest.raises(ValueError):
        Arena(0.0)
    assert Arena(4000.0).area == 16e6
