"""Choquet integrals against the dyadic Hausdorff content.

Grid functions are cellwise constant, so the layer-cake integral is the
finite sum ``Σ_j (t_j - t_{j-1}) H({f >= t_j} ∩ region)`` over the sorted
distinct positive values ``t_j``.  No quadrature is involved.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .content import (
    CellSet,
    ContentError,
    as_beta,
    box_content,
    check_beta,
    dense_content,
    window_block,
)
from .geometry import BaseDomain, DyadicCube, Window
from .grid import GridFunction

__all__ = [
    "GridFunction",
    "choquet_integral",
    "choquet_lp_norm",
    "packing_check",
    "layer_cake",
    "window_integral",
]


class ChoquetDomainError(ValueError):
    pass


def layer_cake(values: np.ndarray, inside: np.ndarray, n: int, cell_side: float, beta: float) -> float:
    """Choquet integral of nonnegative ``values`` over the cells ``inside``.

    Both arrays cover one dyadic block of the cell tree (side a power of two).
    """
    v = values[inside]
    levels = np.unique(v)
    levels = levels[levels > 0.0]
    if levels.size == 0:
        return 0.0
    masks = (values[None, ...] >= levels.reshape((-1,) + (1,) * n)) & inside[None, ...]
    heights = dense_content(masks, n, cell_side, beta)
    steps = np.diff(levels, prepend=0.0)
    return math.fsum(steps * heights)


def lebesgue_sum(values: np.ndarray, cell_side: float, n: int) -> float:
    return float(np.sum(values)) * cell_side**n


def window_integral(domain: BaseDomain, values: np.ndarray, lo, hi, beta: float) -> float:
    """Choquet integral of nonnegative grid ``values`` over the box ``[lo, hi)``.

    The box must lie inside the root.
    """
    n = domain.dim
    if beta == n:
        box = tuple(slice(l, h) for l, h in zip(lo, hi))
        return lebesgue_sum(values[box], domain.cell_side, n)
    block = window_block(domain, lo, hi)
    sub = values[block]
    inside = np.zeros(sub.shape, dtype=bool)
    inside[tuple(slice(l - b.start, h - b.start) for l, h, b in zip(lo, hi, block))] = True
    return layer_cake(sub, inside, n, domain.cell_side, beta)


def _region_arrays(f: GridFunction, region):
    domain = f.domain
    if region is None:
        return f.values, np.ones(domain.shape, dtype=bool)
    if isinstance(region, Window):
        mask = np.zeros(domain.shape, dtype=bool)
        mask[region.clip_slices(domain)] = True
        return f.values, mask
    if isinstance(region, CellSet):
        return f.values, region.mask
    mask = np.asarray(region, dtype=bool)
    if mask.shape != domain.shape:
        raise ChoquetDomainError("region mask does not match the grid")
    return f.values, mask


def choquet_integral(f: GridFunction, region=None, params=None, *, use_dp: bool = False) -> float:
    """``∫_region f dH^β_∞`` for a nonnegative grid function.

    ``region`` is ``None`` (the whole root), a :class:`Window` (clipped to
    the root), a :class:`CellSet` or a boolean mask.  At ``β = n`` the
    content is Lebesgue measure and the cell sum is returned directly unless
    ``use_dp`` asks for the layer-cake route.
    """
    domain = f.domain
    beta = check_beta(as_beta(params), domain.dim)
    values, inside = _region_arrays(f, region)
    if np.any(values[inside] < 0):
        raise ChoquetDomainError("Choquet integration needs a nonnegative function")
    n = domain.dim
    if beta == n and not use_dp:
        return lebesgue_sum(values[inside], domain.cell_side, n)
    if isinstance(region, Window) and beta != n:
        lo, hi = zip(*region.clip_bounds(domain))
        return window_integral(domain, values, lo, hi, beta)
    return layer_cake(values, inside, n, domain.cell_side, beta)


def choquet_lp_norm(f: GridFunction, region=None, p: float = 1.0, params=None) -> float:
    """``(∫_region |f|**p dH^β_∞)**(1/p)``."""
    if p < 1:
        raise ChoquetDomainError("p must be >= 1")
    g = f.with_values(np.abs(f.values) ** p)
    return choquet_integral(g, region, params) ** (1.0 / p)


def _node_key(domain: BaseDomain, cube: DyadicCube) -> tuple[int, tuple[int, ...]]:
    w = domain.cube_window(cube)
    depth = w.side.bit_length() - 1
    return depth, tuple(a >> depth for a in w.anchor)


def packing_check(family: Sequence[DyadicCube], f: GridFunction, params) -> tuple[float, bool]:
    """Smallest packing constant of ``family`` and the integral packing bound.

    Returns ``A = max_Q Σ_{Q_j ⊆ Q} H(Q_j) / H(Q)`` over the dyadic nodes
    ``Q`` of the domain tree, and whether
    ``Σ_j ∫_{Q_j} f dH <= A ∫_{∪ Q_j} f dH`` holds.
    """
    domain = f.domain
    beta = check_beta(as_beta(params), domain.dim)
    if np.any(f.values < 0):
        raise ChoquetDomainError("packing check needs a nonnegative function")
    family = list(family)
    for i, a in enumerate(family):
        for b in family[i + 1 :]:
            if not a.disjoint(b):
                raise ContentError(f"cubes {a} and {b} overlap")
    windows = [domain.cube_window(q) for q in family]
    contents = [box_content(domain, w.anchor, w.upper, beta) for w in windows]
    keys = [_node_key(domain, q) for q in family]

    best = 0.0
    for depth in range(domain.resolution + 1):
        per_node: dict[tuple[int, ...], list[float]] = {}
        for (d, idx), h in zip(keys, contents):
            if d <= depth:
                per_node.setdefault(tuple(i >> (depth - d) for i in idx), []).append(h)
        for idx, hs in per_node.items():
            anchor = tuple(i << depth for i in idx)
            upper = tuple(a + (1 << depth) for a in anchor)
            best = max(best, math.fsum(hs) / box_content(domain, anchor, upper, beta))

    lhs = math.fsum(choquet_integral(f, w, beta) for w in windows)
    union = np.zeros(domain.shape, dtype=bool)
    for w in windows:
        union[w.slices()] = True
    rhs = best * choquet_integral(f, union, beta)
    holds = lhs <= rhs * (1.0 + 1e-12) + 1e-300
    return best, bool(holds)
