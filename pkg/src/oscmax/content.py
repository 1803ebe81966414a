"""Dyadic Hausdorff content of cell sets.

The content of a union of cells is computed exactly by a bottom-up pass over
the dyadic tree of the root::

    value(leaf) = ℓ(cell)**β  if the cell is in E else 0
    value(node) = min(ℓ(node)**β, sum of the children's values)

Covers never need cubes larger than the root (an ancestor costs at least
``ℓ(root)**β``, which the root itself already achieves) nor cubes smaller
than a cell (``β <= n`` makes subdividing a cell never cheaper), so the
rooted recursion is the exact infimum.  Children are always summed in the
same lexicographic order, so every path through this module that evaluates
the same tree gives bit-identical floats.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .geometry import BaseDomain, DyadicCube, Window, smallest_dyadic_block

BRUTE_CELL_CAP = 64
BRUTE_COVER_CAP = 5_000_000


class ContentError(ValueError):
    pass


@dataclass(frozen=True)
class ContentParams:
    beta: float

    def check(self, dim: int) -> None:
        if not (0.0 < self.beta <= dim):
            raise ContentError(f"beta must lie in (0, {dim}], got {self.beta}")

    def lebesgue(self, dim: int) -> bool:
        return self.beta == dim


def as_beta(params) -> float:
    if isinstance(params, ContentParams):
        return float(params.beta)
    return float(params)


def check_beta(beta: float, dim: int) -> float:
    ContentParams(beta).check(dim)
    return float(beta)


@lru_cache(maxsize=None)
def child_offsets(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product((0, 1), repeat=n))


def side_powers(cell_side: float, beta: float, depth: int) -> list[float]:
    """``(cell_side * 2**d) ** beta`` for ``d = 0..depth``."""
    return [math.ldexp(cell_side, d) ** beta for d in range(depth + 1)]


def _child_sum(values: np.ndarray, n: int) -> np.ndarray:
    acc = None
    for bits in child_offsets(n):
        part = values[(Ellipsis,) + tuple(slice(b, None, 2) for b in bits)]
        acc = part.copy() if acc is None else acc + part
    return acc


def dense_content(masks: np.ndarray, n: int, cell_side: float, beta: float) -> np.ndarray:
    """Content of a batch of cell sets on one dyadic block.

    ``masks`` has shape ``batch + (2**d,)*n``; the block is the dyadic cube
    of side ``2**d`` cells.  Returns an array of shape ``batch``.
    """
    size = masks.shape[-1]
    depth = size.bit_length() - 1
    pows = side_powers(cell_side, beta, depth)
    values = masks.astype(np.float64) * pows[0]
    for d in range(1, depth + 1):
        values = np.minimum(_child_sum(values, n), pows[d])
    return values.reshape(values.shape[: values.ndim - n])


@dataclass(frozen=True)
class CellSet:
    """A set of cells of a domain, stored as a boolean array of grid shape."""

    domain: BaseDomain
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != self.domain.shape:
            raise ContentError(f"mask shape {mask.shape} != grid shape {self.domain.shape}")
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_indices(cls, domain: BaseDomain, indices: Sequence[int]) -> CellSet:
        flat = np.zeros(domain.n_cells, dtype=bool)
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= domain.n_cells):
            raise ContentError("cell index out of range")
        flat[idx] = True
        return cls(domain, flat.reshape(domain.shape))

    @classmethod
    def from_window(cls, domain: BaseDomain, window: Window) -> CellSet:
        mask = np.zeros(domain.shape, dtype=bool)
        mask[window.clip_slices(domain)] = True
        return cls(domain, mask)

    @property
    def indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.mask.ravel())]

    def __or__(self, other: CellSet) -> CellSet:
        return CellSet(self.domain, self.mask | other.mask)

    def __and__(self, other: CellSet) -> CellSet:
        return CellSet(self.domain, self.mask & other.mask)

    def to_json(self) -> dict:
        return {
            "dim": self.domain.dim,
            "level": self.domain.root.level,
            "resolution": self.domain.resolution,
            "cells": self.indices,
        }

    @classmethod
    def from_json(cls, data: dict) -> CellSet:
        dim = int(data["dim"])
        domain = BaseDomain(
            dim,
            DyadicCube(int(data.get("level", 0)), tuple(data.get("offset", (0,) * dim))),
            int(data["resolution"]),
        )
        if "cells" in data:
            return cls.from_indices(domain, data["cells"])
        return cls.from_raster(domain, data["bits"])

    @classmethod
    def from_raster(cls, domain: BaseDomain, text: str) -> CellSet:
        """Row-major string of ``0``/``1`` characters; whitespace is ignored."""
        bits = [c for c in text if c in "01"]
        if len(bits) != domain.n_cells:
            raise ContentError(f"raster has {len(bits)} bits, expected {domain.n_cells}")
        flat = np.array([b == "1" for b in bits], dtype=bool)
        return cls(domain, flat.reshape(domain.shape))

    def to_raster(self) -> str:
        n = self.domain.cells_per_side
        flat = "".join("1" if b else "0" for b in self.mask.ravel())
        return "\n".join(flat[i : i + n] for i in range(0, len(flat), n)) + "\n"

    def dumps(self) -> str:
        return json.dumps(self.to_json())


class ContentTree:
    """All node values of the content recursion for one cell set.

    ``values[d]`` and ``sums[d]`` are grids of shape ``(2**(m-d),)*n`` holding
    the node values and children sums at depth ``d`` above the cells.
    """

    def __init__(self, cells: CellSet, beta: float):
        domain = cells.domain
        n = domain.dim
        self.domain = domain
        self.beta = beta
        self.pows = side_powers(domain.cell_side, beta, domain.resolution)
        leaf = cells.mask.astype(np.float64) * self.pows[0]
        self.values = [leaf]
        self.sums: list[np.ndarray | None] = [None]
        for d in range(1, domain.resolution + 1):
            acc = _child_sum(self.values[-1], n)
            self.sums.append(acc)
            self.values.append(np.minimum(acc, self.pows[d]))

    @property
    def value(self) -> float:
        return float(self.values[-1].ravel()[0])

    def cover(self) -> list[DyadicCube]:
        """A minimizing antichain; ties go to the coarser cube."""
        domain = self.domain
        out: list[DyadicCube] = []

        def visit(d: int, idx: tuple[int, ...]):
            if self.values[d][idx] == 0.0:
                return
            if d == 0 or self.pows[d] <= self.sums[d][idx]:
                base = tuple((o << (domain.resolution - d)) for o in domain.root.offset)
                out.append(DyadicCube(domain.cell_level + d, tuple(b + i for b, i in zip(base, idx))))
                return
            for bits in child_offsets(domain.dim):
                visit(d - 1, tuple(2 * i + b for i, b in zip(idx, bits)))

        visit(self.domain.resolution, (0,) * domain.dim)
        return out


def content(e: CellSet, params) -> tuple[float, list[DyadicCube]]:
    """Exact dyadic Hausdorff content of ``e`` and a minimizing cover."""
    beta = check_beta(as_beta(params), e.domain.dim)
    tree = ContentTree(e, beta)
    return tree.value, tree.cover()


def content_value(e: CellSet, params) -> float:
    beta = check_beta(as_beta(params), e.domain.dim)
    d = e.domain
    return float(dense_content(e.mask, d.dim, d.cell_side, beta))


def content_brute(e: CellSet, params) -> float:
    """Minimum cost over every antichain of tree nodes that covers ``e``.

    Cubes disjoint from ``e`` are left out of the enumeration (dropping one
    from a cover keeps it a cover and lowers the cost).  Each candidate's
    cost is summed along the tree in the same child order as
    :func:`content`, so agreement is bitwise.
    """
    domain = e.domain
    beta = check_beta(as_beta(params), domain.dim)
    if domain.n_cells > BRUTE_CELL_CAP:
        raise ContentError(f"brute force limited to {BRUTE_CELL_CAP} cells")
    n = domain.dim
    pows = side_powers(domain.cell_side, beta, domain.resolution)
    occupied = [e.mask]
    for _ in range(domain.resolution):
        occupied.append(_child_sum(occupied[-1].astype(np.int64), n) > 0)

    def count(d, idx):
        if not occupied[d][idx]:
            return 1
        if d == 0:
            return 1
        total = 1
        for bits in child_offsets(n):
            total *= count(d - 1, tuple(2 * i + b for i, b in zip(idx, bits)))
        return total + 1

    root = (0,) * n
    if count(domain.resolution, root) > BRUTE_COVER_CAP:
        raise ContentError("too many antichain covers to enumerate")

    def costs(d, idx) -> list[float]:
        if not occupied[d][idx]:
            return [0.0]
        if d == 0:
            return [pows[0]]
        options = [pows[d]]
        child_lists = [costs(d - 1, tuple(2 * i + b for i, b in zip(idx, bits))) for bits in child_offsets(n)]
        for combo in itertools.product(*child_lists):
            acc = combo[0]
            for c in combo[1:]:
                acc = acc + c
            options.append(acc)
        return options

    return min(costs(domain.resolution, root))


def _full_values(cell_side: float, beta: float, depth: int, n: int) -> list[float]:
    pows = side_powers(cell_side, beta, depth)
    full = [pows[0]]
    k = 1 << n
    for d in range(1, depth + 1):
        acc = full[-1]
        for _ in range(k - 1):
            acc = acc + full[-1]
        full.append(min(acc, pows[d]))
    return full


@lru_cache(maxsize=1 << 20)
def _box_content_global(lo: tuple[int, ...], hi: tuple[int, ...], cell_side: float, beta: float) -> float:
    n = len(lo)
    extent = max(h - l for l, h in zip(lo, hi))
    if extent <= 0:
        return 0.0
    d0 = max(0, (extent - 1).bit_length())
    pows = side_powers(cell_side, beta, d0)
    full = _full_values(cell_side, beta, d0, n)

    def node(d: int, g: tuple[int, ...]) -> float:
        span = 1 << d
        inside = True
        for gi, l, h in zip(g, lo, hi):
            a = gi * span
            b = a + span
            if b <= l or a >= h:
                return 0.0
            if a < l or b > h:
                inside = False
        if inside:
            return full[d]
        acc = None
        for bits in child_offsets(n):
            v = node(d - 1, tuple(2 * gi + b for gi, b in zip(g, bits)))
            acc = v if acc is None else acc + v
        return min(acc, pows[d])

    axes = [sorted({l >> d0, (h - 1) >> d0}) for l, h in zip(lo, hi)]
    level = {g: node(d0, g) for g in itertools.product(*axes)}
    level = {g: v for g, v in level.items() if v != 0.0}
    d = d0
    while len(level) > 1:
        # Cubes in different coordinate orthants never share a dyadic
        # ancestor, so once each orthant holds one node nothing merges.
        if len({tuple(gi < 0 for gi in g) for g in level}) == len(level):
            return math.fsum(level[g] for g in sorted(level))
        parents: dict[tuple[int, ...], list] = {}
        for g in sorted(level):
            parents.setdefault(tuple(gi >> 1 for gi in g), []).append(level[g])
        d += 1
        cap = math.ldexp(cell_side, d) ** beta
        nxt = {}
        for p, vals in parents.items():
            acc = vals[0]
            for v in vals[1:]:
                acc = acc + v
            nxt[p] = min(acc, cap)
        level = nxt
    return next(iter(level.values())) if level else 0.0


def box_content(domain: BaseDomain, lo: Sequence[int], hi: Sequence[int], beta: float) -> float:
    """Content of the cell box ``[lo, hi)`` given in root cell coordinates.

    The box may extend beyond the root; it is located on the global dyadic
    lattice of the domain's cell level.
    """
    glo = domain.global_cell(lo)
    ghi = domain.global_cell(hi)
    return _box_content_global(glo, ghi, domain.cell_side, float(beta))


def window_content(domain: BaseDomain, window: Window, beta: float) -> float:
    """``H^β_∞`` of the full window (not clipped to the root)."""
    return box_content(domain, window.anchor, window.upper, beta)


def window_block(domain: BaseDomain, lo: Sequence[int], hi: Sequence[int]):
    """Slices of the smallest dyadic block of the root tree containing the box."""
    depth, anchor = smallest_dyadic_block(lo, hi, domain.resolution)
    return tuple(slice(a, a + (1 << depth)) for a in anchor)


def cube_equivalence_constants(domain: BaseDomain, beta: float) -> tuple[float, float]:
    """Min and max of ``H(W) / ℓ(W)**β`` over all contained windows."""
    from .geometry import enumerate_windows

    lo_c, hi_c = math.inf, 0.0
    for w in enumerate_windows(domain):
        r = window_content(domain, w, beta) / w.length(domain) ** beta
        lo_c = min(lo_c, r)
        hi_c = max(hi_c, r)
    return lo_c, hi_c
