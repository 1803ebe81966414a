import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscmax.content import (
    CellSet,
    ContentError,
    ContentParams,
    box_content,
    content,
    content_brute,
    content_value,
    cube_equivalence_constants,
    window_content,
)
from oscmax.geometry import BaseDomain, DyadicCube, Window, enumerate_windows

# Values are compared exactly where both sides walk the same tree; the slack
# below only absorbs rounding in inequalities between different sets.
SLACK = 1e-12


def mask_sets(dim, m):
    n_cells = (1 << m) ** dim
    return st.lists(st.booleans(), min_size=n_cells, max_size=n_cells).map(
        lambda bits: CellSet(BaseDomain.unit(dim, m), np.array(bits).reshape((1 << m,) * dim))
    )


BETAS = st.sampled_from([0.3, 0.5, 0.7, 1.0])


def test_empty_set_has_zero_content():
    e = CellSet(BaseDomain.unit(1, 3), np.zeros(8, dtype=bool))
    assert content(e, 0.5) == (0.0, [])


@pytest.mark.parametrize("dim,beta", [(1, 0.3), (1, 1.0), (2, 0.5), (2, 2.0)])
def test_full_root_has_content_one(dim, beta):
    d = BaseDomain.unit(dim, 3)
    value, cover = content(CellSet(d, np.ones(d.shape, dtype=bool)), beta)
    assert value == 1.0
    assert cover == [d.root]


def test_two_cell_example():
    d = BaseDomain.unit(1, 2)
    e = CellSet.from_indices(d, [0, 2])
    value, cover = content(e, ContentParams(0.6))
    assert value == pytest.approx(2 * 0.25**0.6, abs=1e-15)
    assert round(value, 5) == 0.87055
    assert sorted(cover, key=lambda q: q.offset) == [DyadicCube(-2, (0,)), DyadicCube(-2, (2,))]
    assert content_brute(e, 0.6) == value


@pytest.mark.parametrize("beta", [0.0, -1.0, 1.5])
def test_beta_out_of_range(beta):
    e = CellSet(BaseDomain.unit(1, 2), np.ones(4, dtype=bool))
    with pytest.raises(ContentError):
        content(e, beta)


def test_brute_force_is_capped():
    e = CellSet(BaseDomain.unit(1, 7), np.ones(128, dtype=bool))
    with pytest.raises(ContentError):
        content_brute(e, 0.5)


@pytest.mark.parametrize("beta", [0.3, 0.6, 0.7, 1.0])
def test_dp_equals_brute_on_every_1d_mask(beta):
    d = BaseDomain.unit(1, 3)
    for bits in itertools.product((False, True), repeat=8):
        e = CellSet(d, np.array(bits))
        assert content(e, beta)[0] == content_brute(e, beta)


@pytest.mark.parametrize("beta", [0.3, 0.7, 1.0, 1.5, 2.0])
def test_dp_equals_brute_on_random_2d_masks(rng, beta):
    d = BaseDomain.unit(2, 2)
    for _ in range(60):
        e = CellSet(d, rng.random(d.shape) < 0.5)
        assert content(e, beta)[0] == content_brute(e, beta)


@settings(max_examples=100, deadline=None)
@given(mask_sets(2, 3), st.sampled_from([0.3, 0.7, 1.0, 1.7]))
def test_cover_is_an_antichain_covering_e_at_the_reported_cost(e, beta):
    d = e.domain
    value, cover = content(e, beta)
    covered = np.zeros(d.shape, dtype=bool)
    for q in cover:
        w = d.cube_window(q)
        assert not covered[w.slices()].any()
        covered[w.slices()] = True
    assert np.all(covered[e.mask])
    assert math.fsum(q.side**beta for q in cover) == pytest.approx(value, rel=1e-12, abs=0)


@settings(max_examples=100, deadline=None)
@given(mask_sets(1, 4), BETAS)
def test_value_paths_agree(e, beta):
    assert content_value(e, beta) == content(e, beta)[0]


@settings(max_examples=200, deadline=None)
@given(mask_sets(1, 4), mask_sets(1, 4), BETAS)
def test_monotone_and_strongly_subadditive_1d(a, b, beta):
    ca, cb = content_value(a, beta), content_value(b, beta)
    cu, ci = content_value(a | b, beta), content_value(a & b, beta)
    assert ci <= min(ca, cb) + SLACK
    assert cu <= ca + cb + SLACK
    assert cu + ci <= ca + cb + SLACK


@settings(max_examples=100, deadline=None)
@given(mask_sets(2, 2), mask_sets(2, 2), st.sampled_from([0.3, 0.7, 1.0, 2.0]))
def test_monotone_and_strongly_subadditive_2d(a, b, beta):
    ca, cb = content_value(a, beta), content_value(b, beta)
    cu, ci = content_value(a | b, beta), content_value(a & b, beta)
    assert max(ca, cb) <= cu + SLACK
    assert cu + ci <= ca + cb + SLACK


def test_finite_subadditivity(rng):
    d = BaseDomain.unit(2, 3)
    for beta in (0.3, 0.7, 1.0):
        for _ in range(50):
            parts = [CellSet(d, rng.random(d.shape) < 0.2) for _ in range(4)]
            union = parts[0]
            for p in parts[1:]:
                union = union | p
            assert content_value(union, beta) <= math.fsum(content_value(p, beta) for p in parts) + SLACK


def test_lebesgue_case_is_cell_count(rng):
    for dim in (1, 2):
        d = BaseDomain.unit(dim, 3)
        for _ in range(20):
            e = CellSet(d, rng.random(d.shape) < 0.4)
            assert content_value(e, dim) == e.mask.sum() * d.cell_side**dim


@pytest.mark.parametrize("dim,m", [(1, 5), (2, 3)])
@pytest.mark.parametrize("beta", [0.3, 0.7, 1.0])
def test_dyadic_windows_have_content_side_to_beta(dim, m, beta):
    d = BaseDomain.unit(dim, m)
    for level in range(d.cell_level, 1):
        side = 1 << (level - d.cell_level)
        for anchor in itertools.product(range(0, d.cells_per_side, side), repeat=dim):
            w = Window(anchor, side)
            assert window_content(d, w, beta) == w.length(d) ** beta


@pytest.mark.parametrize("dim,m", [(1, 5), (2, 3)])
def test_box_content_matches_dp_on_every_window(dim, m):
    d = BaseDomain.unit(dim, m)
    for beta in (0.3, 0.6, 1.0):
        for w in enumerate_windows(d):
            assert window_content(d, w, beta) == content_value(CellSet.from_window(d, w), beta)


def test_box_content_off_root_uses_global_lattice():
    # [-1, 1) in cells straddles the origin: no dyadic cube holds both cells
    d = BaseDomain.unit(1, 2)
    assert box_content(d, (-1,), (1,), 0.5) == 2 * 0.25**0.5


@pytest.mark.parametrize("dim,beta", [(1, 0.5), (1, 1.0), (2, 0.7)])
def test_cube_equivalence_constants(dim, beta):
    # A side-ℓ window sits inside at most 2**n dyadic cubes of side < 2ℓ,
    # so C2 <= 2**(n+β); finer grids only add windows, so C2 cannot drop.
    consts = [cube_equivalence_constants(BaseDomain.unit(dim, m), beta) for m in (2, 3, 4)]
    uppers = [c2 for _, c2 in consts]
    for c1, c2 in consts:
        assert c1 == 1.0
        assert 1.0 <= c2 <= 2.0 ** (dim + beta)
    assert uppers == sorted(uppers)
    if beta == dim:
        assert uppers == [1.0] * 3


@settings(max_examples=100, deadline=None)
@given(mask_sets(1, 3), st.sampled_from([0.3, 0.7, 1.0]))
def test_doubling_is_exact_scaling(e, beta):
    # 2A lives on the root one level up; its cells are the preimages j // 2
    d = e.domain
    up = BaseDomain(1, DyadicCube(1, (0,)), d.resolution + 1)
    doubled = np.zeros(up.shape, dtype=bool)
    doubled[: 2 * d.cells_per_side] = np.repeat(e.mask, 2)
    ratio_target = 2.0**beta
    ca = content_value(e, beta)
    c2a = content_value(CellSet(up, doubled), beta)
    assert c2a == pytest.approx(ratio_target * ca, rel=1e-12, abs=0)


def test_json_round_trip(rng):
    d = BaseDomain.unit(2, 3)
    e = CellSet(d, rng.random(d.shape) < 0.5)
    back = CellSet.from_json(e.to_json())
    assert np.array_equal(back.mask, e.mask)
    assert back.domain == d
    assert CellSet.from_json({"dim": 1, "resolution": 2, "bits": "0101"}).indices == [1, 3]


def test_raster_round_trip(rng):
    d = BaseDomain.unit(2, 2)
    e = CellSet(d, rng.random(d.shape) < 0.5)
    text = e.to_raster()
    assert len(text.splitlines()) == 4
    assert np.array_equal(CellSet.from_raster(d, text).mask, e.mask)
    with pytest.raises(ContentError):
        CellSet.from_raster(d, "0101")


def test_bad_masks_rejected():
    d = BaseDomain.unit(1, 2)
    with pytest.raises(ContentError):
        CellSet(d, np.zeros(3, dtype=bool))
    with pytest.raises(ContentError):
        CellSet.from_indices(d, [4])
