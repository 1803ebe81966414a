"""Uncentered fractional and β-dimensional maximal functions on grids.

For each window side the score of every window is computed at once
(prefix sums for Lebesgue averages, layer cakes for Choquet averages), then
spread to the cells each window covers by a separable sliding-max dilation.
The maximal function is therefore constant on cells, and the value on a cell
is the largest score among windows of the family containing it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .choquet import choquet_integral, window_integral
from .content import as_beta, check_beta, window_content
from .geometry import (
    CENTERED,
    CONTAINED,
    BaseDomain,
    EnumerationBudgetError,
    GeometryError,
    count_windows,
    enumerate_windows,
    window_cap,
    window_sides,
    windows_of_side,
)
from .grid import GridFunction


class MaximalParamError(ValueError):
    pass


@dataclass(frozen=True)
class MaximalParams:
    alpha: float = 0.0
    family: str = CONTAINED
    kappa: float | None = None


@dataclass(frozen=True)
class MaximalField:
    domain: BaseDomain
    values: np.ndarray

    def as_grid(self) -> GridFunction:
        return GridFunction(self.domain, self.values)


def sliding_max(a: np.ndarray, width: int, axis: int = -1) -> np.ndarray:
    """``out[i] = max(a[i:i+width])`` along ``axis`` in O(len) per line.

    Block prefix/suffix maxima (van Herk, Gil and Werman), vectorized over
    every other axis.
    """
    a = np.moveaxis(np.asarray(a, dtype=np.float64), axis, -1)
    length = a.shape[-1]
    if width < 1 or width > length:
        raise ValueError("sliding window wider than the data")
    if width == 1:
        return np.moveaxis(a.copy(), -1, axis)
    nblocks = -(-length // width)
    pad = nblocks * width - length
    padded = np.concatenate([a, np.full(a.shape[:-1] + (pad,), -np.inf)], axis=-1)
    blocks = padded.reshape(a.shape[:-1] + (nblocks, width))
    prefix = np.maximum.accumulate(blocks, axis=-1).reshape(padded.shape)
    suffix = np.maximum.accumulate(blocks[..., ::-1], axis=-1)[..., ::-1].reshape(padded.shape)
    count = length - width + 1
    out = np.maximum(suffix[..., :count], prefix[..., width - 1 : width - 1 + count])
    return np.moveaxis(out, -1, axis)


def dilate_max(scores: np.ndarray, out_len: int, before: int, after: int) -> np.ndarray:
    """``out[c] = max{scores[a] : c - before <= a <= c + after}`` on every axis.

    Positions outside ``scores`` are ignored; cells reached by no position
    get ``-inf``.
    """
    out = np.asarray(scores, dtype=np.float64)
    for axis in range(out.ndim):
        length = out.shape[axis]
        right = out_len + after - length
        widths = [(0, 0)] * out.ndim
        widths[axis] = (before, right)
        padded = np.pad(out, widths, constant_values=-np.inf)
        out = sliding_max(padded, before + after + 1, axis)
    return out


def _prefix_window_sums(a: np.ndarray, side: int, family: str) -> np.ndarray:
    """Sum of ``a`` over every window of one side, indexed by position."""
    out = a
    for axis in range(a.ndim):
        n = out.shape[axis]
        zero_shape = list(out.shape)
        zero_shape[axis] = 1
        cs = np.concatenate([np.zeros(zero_shape), np.cumsum(out, axis=axis)], axis=axis)
        if family == CONTAINED:
            hi = np.arange(side, n + 1)
            lo = hi - side
        else:
            j = side // 2
            centres = np.arange(n)
            lo = np.maximum(centres - j, 0)
            hi = np.minimum(centres + j + 1, n)
        out = np.take(cs, hi, axis=axis) - np.take(cs, lo, axis=axis)
    return out


def _reach(side: int, family: str) -> tuple[int, int]:
    if family == CONTAINED:
        return side - 1, 0
    j = side // 2
    return j, j


def _check_family(domain: BaseDomain, family: str) -> None:
    if family not in (CONTAINED, CENTERED):
        raise GeometryError(f"unknown window family {family!r}")
    total = count_windows(domain, family)
    if total > window_cap():
        raise EnumerationBudgetError(f"{total} windows exceed the enumeration cap")


def lebesgue_weight(domain: BaseDomain, side: int, alpha: float) -> float:
    """``ℓ(W)**(n - α)`` for a window of ``side`` cells."""
    return (side * domain.cell_side) ** (domain.dim - alpha)


def _check_alpha(alpha: float, dim: int) -> float:
    if not (0.0 <= alpha < dim):
        raise MaximalParamError(f"alpha must lie in [0, {dim}), got {alpha}")
    return float(alpha)


def _finish(field: np.ndarray) -> np.ndarray:
    return np.where(np.isneginf(field), 0.0, field)


def _fractional_sides(f: GridFunction, alpha: float, sides, family: str) -> np.ndarray:
    domain = f.domain
    a = np.abs(f.values)
    cell_vol = domain.cell_side**domain.dim
    field = np.full(domain.shape, -np.inf)
    for side in sides:
        sums = _prefix_window_sums(a, side, family)
        scores = (sums * cell_vol) / lebesgue_weight(domain, side, alpha)
        before, after = _reach(side, family)
        field = np.maximum(field, dilate_max(scores, domain.cells_per_side, before, after))
    return field


def fractional_maximal(f: GridFunction, params: MaximalParams | float = 0.0, family: str | None = None) -> MaximalField:
    """``M_α f`` on every cell: the largest ``ℓ(W)**(α-n) ∫_W |f|`` over
    family windows ``W`` containing the cell."""
    if isinstance(params, MaximalParams):
        alpha, fam = params.alpha, params.family
    else:
        alpha, fam = float(params), CONTAINED
    fam = family or fam
    domain = f.domain
    alpha = _check_alpha(alpha, domain.dim)
    _check_family(domain, fam)
    field = _fractional_sides(f, alpha, window_sides(domain, fam), fam)
    return MaximalField(domain, _finish(field))


def beta_window_scores(f: GridFunction, beta: float, side: int, family: str) -> np.ndarray:
    """Choquet averages of ``|f|`` over all windows of one side, by position."""
    domain = f.domain
    a = np.abs(f.values)
    scores = []
    for w in windows_of_side(domain, side, family):
        lo, hi = zip(*w.clip_bounds(domain))
        scores.append(window_integral(domain, a, lo, hi, beta) / window_content(domain, w, beta))
    n = domain.cells_per_side
    positions = n - side + 1 if family == CONTAINED else n
    return np.asarray(scores, dtype=np.float64).reshape((positions,) * domain.dim)


def _beta_sides(f: GridFunction, beta: float, sides, family: str) -> np.ndarray:
    domain = f.domain
    field = np.full(domain.shape, -np.inf)
    for side in sides:
        scores = beta_window_scores(f, beta, side, family)
        before, after = _reach(side, family)
        field = np.maximum(field, dilate_max(scores, domain.cells_per_side, before, after))
    return field


def beta_maximal(f: GridFunction, content_params, family: str = CONTAINED) -> MaximalField:
    """``M^β f`` on every cell: the largest Choquet average
    ``H(W)**-1 ∫_W |f| dH^β_∞`` over family windows containing the cell."""
    domain = f.domain
    beta = check_beta(as_beta(content_params), domain.dim)
    _check_family(domain, family)
    field = _beta_sides(f, beta, window_sides(domain, family), family)
    return MaximalField(domain, _finish(field))


def split_sides(domain: BaseDomain, kappa: float, family: str = CONTAINED) -> tuple[list[int], list[int]]:
    """Window sides with ``ℓ < κ`` (local) and ``ℓ >= κ`` (global)."""
    if not kappa > 0:
        raise MaximalParamError("kappa must be positive")
    sides = window_sides(domain, family)
    local = [s for s in sides if s * domain.cell_side < kappa]
    glob = [s for s in sides if s * domain.cell_side >= kappa]
    return local, glob


def local_global_split(
    f: GridFunction,
    kappa: float,
    alpha: float = 0.0,
    family: str = CONTAINED,
    beta: float | None = None,
) -> tuple[MaximalField, MaximalField]:
    """Local (``ℓ(W) < κ``) and global (``ℓ(W) >= κ``) parts of the maximal
    function.  ``κ`` is a length in domain units.  With ``beta`` given the
    parts of ``M^β`` are returned instead of those of ``M_α``.

    A part whose family is empty at a cell is 0 there.
    """
    domain = f.domain
    _check_family(domain, family)
    local, glob = split_sides(domain, kappa, family)
    if beta is None:
        alpha = _check_alpha(alpha, domain.dim)
        loc = _fractional_sides(f, alpha, local, family)
        gl = _fractional_sides(f, alpha, glob, family)
    else:
        beta = check_beta(beta, domain.dim)
        loc = _beta_sides(f, beta, local, family)
        gl = _beta_sides(f, beta, glob, family)
    return MaximalField(domain, _finish(loc)), MaximalField(domain, _finish(gl))


def kappa_for_cells(domain: BaseDomain, cells: float) -> float:
    return cells * domain.cell_side


# ---------------------------------------------------------------- oracles


def fractional_maximal_brute(f: GridFunction, alpha: float = 0.0, family: str = CONTAINED, sides=None) -> np.ndarray:
    """Window-by-window evaluation of ``M_α f`` (test oracle)."""
    domain = f.domain
    a = np.abs(f.values)
    cell_vol = domain.cell_side**domain.dim
    field = np.zeros(domain.shape)
    allowed = None if sides is None else set(sides)
    for w in enumerate_windows(domain, family):
        if allowed is not None and w.side not in allowed:
            continue
        box = w.clip_slices(domain)
        score = (float(np.sum(a[box])) * cell_vol) / lebesgue_weight(domain, w.side, alpha)
        np.maximum(field[box], score, out=field[box])
    return field


def beta_maximal_brute(f: GridFunction, beta: float, family: str = CONTAINED) -> np.ndarray:
    """Cell-by-cell evaluation of ``M^β f`` over every window holding the cell."""
    domain = f.domain
    g = f.abs()
    windows = list(enumerate_windows(domain, family))
    averages = {w: choquet_integral(g, w, beta) / window_content(domain, w, beta) for w in windows}
    field = np.zeros(domain.shape)
    for cell in domain.cells():
        best = 0.0
        for w in windows:
            if w.contains_cell(cell):
                best = max(best, averages[w])
        field[cell] = best
    return field


def shift_modulus(field: np.ndarray, shift: int) -> float:
    """``max |F(x + δ) - F(x)|`` over cells and axis-parallel shifts of ``shift`` cells."""
    best = 0.0
    for axis in range(field.ndim):
        if shift >= field.shape[axis]:
            continue
        a = np.take(field, np.arange(shift, field.shape[axis]), axis=axis)
        b = np.take(field, np.arange(0, field.shape[axis] - shift), axis=axis)
        best = max(best, float(np.max(np.abs(a - b))))
    return best
