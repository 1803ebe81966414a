import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscmax.geometry import (
    CENTERED,
    CONTAINED,
    BaseDomain,
    DyadicCube,
    EnumerationBudgetError,
    GeometryError,
    Window,
    comparison_cube,
    count_windows,
    dilate,
    enumerate_windows,
    join_cube,
    smallest_dyadic_block,
)


def cubes_below(root, depth):
    out = [root]
    frontier = [root]
    for _ in range(depth):
        frontier = [c for q in frontier for c in q.children()]
        out += frontier
    return out


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_children_partition_parent(dim):
    q = DyadicCube(0, (0,) * dim)
    kids = q.children()
    assert len(kids) == 2**dim
    assert len(set(kids)) == len(kids)
    for k in kids:
        assert k.parent() == q
        assert q.contains(k)
    # volumes add up
    assert sum(k.side**dim for k in kids) == q.side**dim


@pytest.mark.parametrize("dim,depth", [(1, 3), (2, 3)])
def test_nesting_trichotomy_exhaustive(dim, depth):
    cubes = cubes_below(DyadicCube(0, (0,) * dim), depth)
    for a, b in itertools.combinations(cubes, 2):
        boxes_meet = all(max(x0, y0) < min(x1, y1) for (x0, x1), (y0, y1) in zip(a.bounds(), b.bounds()))
        nested = a.contains(b) or b.contains(a)
        assert boxes_meet == nested


def test_window_count_examples():
    assert [w.to_json() for w in enumerate_windows(BaseDomain.unit(1, 1))] == [
        {"anchor": [0], "side_cells": 1},
        {"anchor": [1], "side_cells": 1},
        {"anchor": [0], "side_cells": 2},
    ]
    assert len(list(enumerate_windows(BaseDomain.unit(2, 1)))) == 5
    assert len(list(enumerate_windows(BaseDomain.unit(1, 3)))) == 36


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("m", range(6))
def test_window_count_formula(dim, m):
    d = BaseDomain.unit(dim, m)
    n = 2**m
    windows = list(enumerate_windows(d))
    assert len(windows) == count_windows(d) == sum((n - w + 1) ** dim for w in range(1, n + 1))
    assert len(set(windows)) == len(windows)
    assert all(w.inside(d) for w in windows)
    centered = list(enumerate_windows(d, CENTERED))
    assert len(centered) == count_windows(d, CENTERED) == n**dim * n


def test_centered_windows_cover_root_at_largest_radius():
    d = BaseDomain.unit(2, 3)
    biggest = [w for w in enumerate_windows(d, CENTERED) if w.side == 2 * d.cells_per_side - 1]
    assert biggest and all(w.contains(d.root_window()) for w in biggest)


def test_enumeration_cap(monkeypatch):
    d = BaseDomain.unit(1, 4)
    monkeypatch.setenv("OSCMAX_WINDOW_CAP", "100")
    with pytest.raises(EnumerationBudgetError):
        next(enumerate_windows(d))
    monkeypatch.setenv("OSCMAX_WINDOW_CAP", "1000")
    assert len(list(enumerate_windows(d))) == 136


def test_window_lengths_follow_root_level():
    d = BaseDomain.unit(1, 3, level=2)
    assert d.cell_side == 0.5
    assert Window((0,), 3).length(d) == 1.5


def test_join_cube_examples():
    bound = Window((0,), 8)
    q = join_cube(Window((0,), 2), Window((1,), 3), bound)
    assert q.contains(Window((0,), 4)) and q.side <= 4
    assert join_cube(Window((2,), 3), Window((2,), 3), bound) == Window((2,), 3)


def test_join_cube_corner_cells_matches_exhaustive_search():
    d = BaseDomain.unit(2, 2)
    a, b = Window((1, 1), 1), Window((2, 2), 1)
    q = join_cube(a, b, d.root_window())
    smallest = min(w.side for w in enumerate_windows(d) if w.contains(a) and w.contains(b))
    assert q.side == smallest == 2
    assert q.contains(a) and q.contains(b)


def test_join_cube_rejects_disjoint():
    with pytest.raises(GeometryError):
        join_cube(Window((0,), 1), Window((3,), 1), Window((0,), 8))


@st.composite
def touching_pair(draw):
    dim = draw(st.integers(1, 2))
    n = 2 ** draw(st.integers(1, 4))
    s1 = draw(st.integers(1, n))
    a1 = tuple(draw(st.integers(0, n - s1)) for _ in range(dim))
    s2 = draw(st.integers(1, n))
    a2 = []
    for x in a1:
        lo = max(0, x - s2)
        hi = min(n - s2, x + s1)
        if lo > hi:
            return None
        a2.append(draw(st.integers(lo, hi)))
    return Window((0,) * dim, n), Window(a1, s1), Window(tuple(a2), s2)


@settings(max_examples=300, deadline=None)
@given(touching_pair())
def test_join_cube_properties(case):
    if case is None:
        return
    bound, q1, q2 = case
    q = join_cube(q1, q2, bound)
    assert bound.contains(q)
    assert q.contains(q1) and q.contains(q2)
    assert q.side <= q1.side + q2.side


def _in_dilate(p, q):
    return all(lo <= a and a + p.side <= hi for a, (lo, hi) in zip(p.anchor, dilate(q, 2)))


@pytest.mark.parametrize("dim,m", [(1, 3), (2, 2)])
def test_comparison_cube_inclusions(dim, m):
    d = BaseDomain.unit(dim, m)
    n = d.cells_per_side
    for side in range(1, 2 * n + 1):
        for anchor in itertools.product(range(-2 * n, n), repeat=dim):
            q = Window(anchor, side)
            if not q.meets(d):
                continue
            p = comparison_cube(q, d)
            assert p.inside(d)
            assert p.side == min(side, n)
            lo_hi = q.clip_bounds(d)
            assert all(a <= lo and hi <= a + p.side for a, (lo, hi) in zip(p.anchor, lo_hi))
            centre_in_root = all(0 <= 2 * a + side <= 2 * n for a in anchor)
            if centre_in_root:
                assert _in_dilate(p, q)


def test_comparison_cube_cases():
    d = BaseDomain.unit(1, 3)
    assert comparison_cube(Window((2,), 3), d) == Window((2,), 3)
    assert comparison_cube(Window((-3,), 9), d) == d.root_window()
    assert comparison_cube(d.root_window(), d) == d.root_window()


def test_grazing_cube_has_no_admissible_comparison_cube():
    # Q = [-3, 1) cells touches the root in one cell; its double is [-5, 3).
    # Any window of side 4 inside the root containing cell 0 starts at 0 and
    # ends at 4, which leaves 2Q.  The three inclusions cannot all hold.
    d = BaseDomain.unit(1, 3)
    q = Window((-3,), 4)
    lo, hi = dilate(q, 2)[0]
    candidates = [Window((a,), 4) for a in range(0, 5)]
    admissible = [p for p in candidates if p.anchor[0] <= 0 and lo <= p.anchor[0] and p.upper[0] <= hi]
    assert admissible == []


def test_smallest_dyadic_block():
    assert smallest_dyadic_block((3,), (5,), 3) == (3, (0,))
    assert smallest_dyadic_block((4,), (6,), 3) == (1, (4,))
    assert smallest_dyadic_block((2, 2), (3, 3), 2) == (0, (2, 2))


def test_domain_json_and_scaling():
    d = BaseDomain.unit(2, 3)
    assert d.to_json() == {"dim": 2, "root_level": 0, "root_offset": [0, 0], "resolution_m": 3}
    assert d.scaled().cell_side == 2 * d.cell_side
    assert d.n_cells == 64
