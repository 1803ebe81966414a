import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscmax.content import window_content
from oscmax.geometry import CENTERED, CONTAINED, BaseDomain, Window, enumerate_windows
from oscmax.grid import GridFunction
from oscmax.oscillation import (
    OscillationError,
    OscillationParams,
    WindowObjective,
    average_oscillation,
    blo_norm,
    bmo_norm,
    choquet_average,
    essinf_beta,
    lower_oscillation,
    mean_oscillation,
    oscillation_at,
    oscillation_modulus,
    oscillation_profile,
)

from conftest import dense_oscillation, dyadic_grid

SLACK = 1e-12


def grids(dim, m, signed=False):
    d = BaseDomain.unit(dim, m)
    lo = -64 if signed else 0
    return st.lists(st.integers(lo, 64), min_size=d.n_cells, max_size=d.n_cells).map(
        lambda v: GridFunction(d, np.array(v, dtype=np.float64) / 16.0)
    )


F01 = GridFunction.from_flat([0.0, 1.0])
ROOT2 = Window((0,), 2)


def test_constant_function():
    f = GridFunction.from_flat([1.5] * 8)
    w = Window((2,), 4)
    assert mean_oscillation(f, w, 0.5) == (0.0, 1.5)
    assert essinf_beta(f, w) == 1.5
    assert bmo_norm(f, 0.5).norm_value == 0.0
    assert blo_norm(f, 0.5).norm_value == 0.0
    assert oscillation_modulus(f, 0.5, 0.5) == 0.0


def test_two_cell_examples():
    value, c = mean_oscillation(F01, ROOT2, 0.5)
    assert (value, c) == (pytest.approx(0.5, abs=1e-15), 0.5)
    assert bmo_norm(F01, 1.0).norm_value == 0.5
    assert blo_norm(F01, 1.0).norm_value == 0.5
    assert blo_norm(F01, 0.5).norm_value == pytest.approx(0.5**0.5, abs=1e-15)


def test_essinf_and_average_examples():
    assert essinf_beta(GridFunction.from_flat([3.0, 1.0, 2.0, 5.0])) == 1.0
    assert choquet_average(GridFunction.from_flat([2.0, 1.0]), ROOT2, 0.5) == pytest.approx(1 + 0.5**0.5, abs=1e-15)
    d = BaseDomain.unit(1, 3)
    w = Window((2,), 3)
    chi = np.zeros(8)
    chi[2:5] = 1.0
    assert choquet_average(GridFunction(d, chi), w, 0.4) == pytest.approx(1.0, abs=1e-15)


def test_parameter_errors():
    with pytest.raises(OscillationError):
        OscillationParams(0.5, p=0.5)
    with pytest.raises(OscillationError):
        bmo_norm(F01, 0.5, p=0.9)
    with pytest.raises(OscillationError):
        oscillation_modulus(F01, 0.0, 0.5)
    with pytest.raises(ValueError):
        bmo_norm(F01, 1.5)


@pytest.mark.parametrize("p", [1.0, 2.0])
@pytest.mark.parametrize("beta", [0.3, 0.7, 1.0])
def test_minimizer_matches_dense_grid(rng, p, beta):
    # multiples of 2e-5 put every p = 1 candidate on the 1e-5 grid
    d = BaseDomain.unit(1, 4)
    for _ in range(6):
        f = GridFunction(d, rng.integers(0, 2000, d.shape) * 2e-5)
        side = int(rng.integers(2, 9))
        w = Window((int(rng.integers(0, 17 - side)),), side)
        got = mean_oscillation(f, w, beta, p)[0] ** p
        oracle, _ = dense_oscillation(f, w, beta, p, 1e-5)
        assert abs(got - oracle) <= 1e-9
        assert got <= oracle + 1e-12


def test_minimizer_matches_dense_grid_2d(rng):
    d = BaseDomain.unit(2, 2)
    for _ in range(6):
        f = GridFunction(d, rng.integers(0, 2000, d.shape) * 2e-5)
        for p in (1.0, 2.0):
            got = mean_oscillation(f, Window((1, 1), 2), 0.8, p)[0] ** p
            oracle, _ = dense_oscillation(f, Window((1, 1), 2), 0.8, p, 1e-5)
            assert abs(got - oracle) <= 1e-9
            assert got <= oracle + 1e-12


def test_lebesgue_p1_is_median_oscillation(rng):
    d = BaseDomain.unit(1, 3)
    for _ in range(20):
        f = dyadic_grid(rng, 1, 3, signed=True)
        for w in enumerate_windows(d):
            vals = f.restrict(w)
            brute = min(np.mean(np.abs(vals - c)) for c in vals)
            assert mean_oscillation(f, w, 1.0)[0] == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_batch_matches_scalar(rng):
    f = dyadic_grid(rng, 2, 3, signed=True)
    obj = WindowObjective(f, Window((1, 2), 5), 0.6, 2.0)
    cs = np.linspace(-1, 1, 17)
    assert np.allclose(obj.batch(cs), [obj(c) for c in cs], rtol=1e-13, atol=0)


@settings(max_examples=60, deadline=None)
@given(grids(1, 3, signed=True), st.sampled_from([0.3, 0.7, 1.0]), st.sampled_from([1.0, 2.0]))
def test_witness_reproduces_norm(f, beta, p):
    for rep in (bmo_norm(f, beta, p), blo_norm(f, beta, p)):
        again = oscillation_at(f, rep.witness_window, rep.witness_c, beta, p)
        assert abs(again - rep.norm_value) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(grids(1, 3, signed=True), st.sampled_from([0.3, 0.7, 1.0]))
def test_abs_at_most_doubles_bmo(f, beta):
    assert bmo_norm(f.abs(), beta).norm_value <= 2 * bmo_norm(f, beta).norm_value + SLACK


@settings(max_examples=60, deadline=None)
@given(grids(1, 3), st.sampled_from([0.3, 0.7, 1.0]))
def test_average_centering_sandwich(f, beta):
    d = f.domain
    for w in enumerate_windows(d):
        o = mean_oscillation(f, w, beta)[0]
        a = average_oscillation(f, w, beta)
        assert o <= a + SLACK
        assert a <= 2 * o + SLACK


@settings(max_examples=60, deadline=None)
@given(grids(2, 2, signed=True), st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([1.0, 2.0]))
def test_lower_oscillation_dominates(f, beta, p):
    for w in enumerate_windows(f.domain):
        assert mean_oscillation(f, w, beta, p)[0] <= lower_oscillation(f, w, beta, p)[0] + SLACK


@settings(max_examples=40, deadline=None)
@given(grids(1, 3, signed=True), grids(1, 3, signed=True), st.sampled_from([0.3, 0.7, 1.0]))
def test_max_stability(f, g, beta):
    h = f.with_values(np.maximum(f.values, g.values))
    for w in enumerate_windows(f.domain):
        lhs = mean_oscillation(h, w, beta)[0]
        assert lhs <= mean_oscillation(f, w, beta)[0] + mean_oscillation(g, w, beta)[0] + SLACK


@settings(max_examples=40, deadline=None)
@given(grids(1, 3, signed=True))
def test_oscillation_vanishes_together_across_beta(f):
    # the nesting constant is only reported; here zero must match zero
    for w in enumerate_windows(f.domain):
        lo = mean_oscillation(f, w, 0.4)[0]
        hi = mean_oscillation(f, w, 1.0)[0]
        assert (lo == 0.0) == (hi == 0.0)


@settings(max_examples=40, deadline=None)
@given(grids(1, 3, signed=True), st.sampled_from([0.3, 1.0]))
def test_p_monotonicity_contained(f, beta):
    # H(.)/H(W) is a normalized capacity on contained windows, so Hölder gives p-monotonicity
    assert bmo_norm(f, beta, 1.0).norm_value <= bmo_norm(f, beta, 2.0).norm_value * (1 + SLACK) + SLACK


@settings(max_examples=30, deadline=None)
@given(grids(1, 4, signed=True), st.sampled_from([0.5, 1.0]))
def test_modulus(f, beta):
    d = f.domain
    rs = [d.cell_side * k for k in (1, 2, 4, 8, 16)]
    omegas = [oscillation_modulus(f, r, beta) for r in rs]
    assert omegas == sorted(omegas)
    assert omegas[-1] == bmo_norm(f, beta).norm_value
    assert oscillation_modulus(f, d.cell_side / 2, beta) == 0.0
    assert oscillation_modulus(f.abs(), rs[2], beta) <= 2 * omegas[2] + SLACK


def test_profile_and_modulus_agree(rng):
    f = dyadic_grid(rng, 1, 4, signed=True)
    prof = oscillation_profile(f, 0.6)
    assert sorted(prof) == list(range(1, 17))
    assert prof[1] == 0.0
    for k in (2, 5, 16):
        r = k * f.domain.cell_side
        assert max(v for s, v in prof.items() if s <= k) == oscillation_modulus(f, r, 0.6)


def test_centered_family(rng):
    f = dyadic_grid(rng, 1, 3, signed=True)
    cen = bmo_norm(f, 0.5, family=CENTERED)
    con = bmo_norm(f, 0.5, family=CONTAINED)
    assert cen.family == CENTERED
    assert 0 < cen.norm_value and 0 < con.norm_value
    w = cen.witness_window
    assert oscillation_at(f, w, cen.witness_c, 0.5) == pytest.approx(cen.norm_value, abs=1e-12)
    # centered windows are normalized by the content of the full window
    assert WindowObjective(f, w, 0.5).content == window_content(f.domain, w, 0.5)


def test_report_json():
    rep = bmo_norm(F01, 0.5)
    data = rep.to_json()
    assert data["kind"] == "bmo"
    assert data["witness_window"] == ROOT2.to_json()
    assert data["witness_c"] == 0.5
