"""Dyadic cubes, base domains and grid-aligned windows.

All analysis cubes are discretized to cell-aligned windows of a
:class:`BaseDomain`.  Cell coordinates are integers in ``[0, 2**m)`` per
axis; a window is the half-open box ``anchor + [0, side)**n`` in those
coordinates.  Windows of the ``centered`` family may stick out of the root;
everything that integrates over them works on ``window.clip(domain)``.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

DEFAULT_WINDOW_CAP = 10**8

CONTAINED = "contained"
CENTERED = "centered"
FAMILIES = (CONTAINED, CENTERED)


class GeometryError(ValueError):
    """Raised when a geometric precondition is violated."""


class EnumerationBudgetError(RuntimeError):
    """Raised when a window family is larger than the configured cap."""


def window_cap() -> int:
    value = os.environ.get("OSCMAX_WINDOW_CAP")
    if value is None:
        return DEFAULT_WINDOW_CAP
    return int(float(value))


@dataclass(frozen=True)
class DyadicCube:
    """The dyadic cube ``2**level * (offset + [0, 1)**n)``."""

    level: int
    offset: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "offset", tuple(int(o) for o in self.offset))

    @property
    def dim(self) -> int:
        return len(self.offset)

    @property
    def side(self) -> float:
        return math.ldexp(1.0, self.level)

    def children(self) -> list[DyadicCube]:
        base = tuple(2 * o for o in self.offset)
        return [
            DyadicCube(self.level - 1, tuple(b + d for b, d in zip(base, bits)))
            for bits in itertools.product((0, 1), repeat=self.dim)
        ]

    def child(self, index: int) -> DyadicCube:
        return self.children()[index]

    def parent(self) -> DyadicCube:
        return DyadicCube(self.level + 1, tuple(o >> 1 for o in self.offset))

    def ancestor(self, level: int) -> DyadicCube:
        if level < self.level:
            raise GeometryError("ancestor level below cube level")
        shift = level - self.level
        return DyadicCube(level, tuple(o >> shift for o in self.offset))

    def contains(self, other: DyadicCube) -> bool:
        if other.level > self.level:
            return False
        return other.ancestor(self.level) == self

    def disjoint(self, other: DyadicCube) -> bool:
        return not (self.contains(other) or other.contains(self))

    def bounds(self) -> list[tuple[float, float]]:
        s = self.side
        return [(o * s, (o + 1) * s) for o in self.offset]


@dataclass(frozen=True)
class Window:
    """Cell-aligned cube: ``anchor + [0, side)**n`` in cell coordinates."""

    anchor: tuple[int, ...]
    side: int

    def __post_init__(self):
        object.__setattr__(self, "anchor", tuple(int(a) for a in self.anchor))
        if self.side < 1:
            raise GeometryError("window side must be >= 1 cell")

    @property
    def dim(self) -> int:
        return len(self.anchor)

    @property
    def upper(self) -> tuple[int, ...]:
        return tuple(a + self.side for a in self.anchor)

    def length(self, domain: BaseDomain) -> float:
        return self.side * domain.cell_side

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(a, a + self.side) for a in self.anchor)

    def inside(self, domain: BaseDomain) -> bool:
        n = domain.cells_per_side
        return all(0 <= a and a + self.side <= n for a in self.anchor)

    def intersects(self, other: Window) -> bool:
        return all(
            a < b + other.side and b < a + self.side
            for a, b in zip(self.anchor, other.anchor)
        )

    def touches(self, other: Window) -> bool:
        """True if the closures meet (shared faces or corners count)."""
        return all(
            a <= b + other.side and b <= a + self.side
            for a, b in zip(self.anchor, other.anchor)
        )

    def contains(self, other: Window) -> bool:
        return all(
            a <= b and b + other.side <= a + self.side
            for a, b in zip(self.anchor, other.anchor)
        )

    def contains_cell(self, cell: Sequence[int]) -> bool:
        return all(a <= c < a + self.side for a, c in zip(self.anchor, cell))

    def clip_bounds(self, domain: BaseDomain) -> tuple[tuple[int, int], ...]:
        n = domain.cells_per_side
        return tuple(
            (max(a, 0), min(a + self.side, n)) for a in self.anchor
        )

    def clip_slices(self, domain: BaseDomain) -> tuple[slice, ...]:
        return tuple(slice(lo, hi) for lo, hi in self.clip_bounds(domain))

    def meets(self, domain: BaseDomain) -> bool:
        return all(lo < hi for lo, hi in self.clip_bounds(domain))

    def to_json(self) -> dict:
        return {"anchor": list(self.anchor), "side_cells": self.side}

    @classmethod
    def from_json(cls, data: dict) -> Window:
        return cls(tuple(data["anchor"]), int(data["side_cells"]))


@dataclass(frozen=True)
class BaseDomain:
    """A dyadic root cube subdivided into ``2**resolution`` cells per side."""

    dim: int
    root: DyadicCube
    resolution: int

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryError("dimension must be >= 1")
        if self.resolution < 0:
            raise GeometryError("resolution must be >= 0")
        if self.root.dim != self.dim:
            raise GeometryError("root cube dimension mismatch")

    @classmethod
    def unit(cls, dim: int, resolution: int, level: int = 0) -> BaseDomain:
        return cls(dim, DyadicCube(level, (0,) * dim), resolution)

    @property
    def cells_per_side(self) -> int:
        return 1 << self.resolution

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells_per_side,) * self.dim

    @property
    def n_cells(self) -> int:
        return self.cells_per_side**self.dim

    @property
    def cell_level(self) -> int:
        return self.root.level - self.resolution

    @property
    def cell_side(self) -> float:
        return math.ldexp(1.0, self.cell_level)

    @property
    def root_side(self) -> float:
        return self.root.side

    def root_window(self) -> Window:
        return Window((0,) * self.dim, self.cells_per_side)

    def cell_cube(self, cell: Sequence[int]) -> DyadicCube:
        base = tuple(o << self.resolution for o in self.root.offset)
        return DyadicCube(self.cell_level, tuple(b + c for b, c in zip(base, cell)))

    def global_cell(self, cell: Sequence[int]) -> tuple[int, ...]:
        """Offset of a (possibly out-of-root) cell on the global lattice."""
        return tuple((o << self.resolution) + c for o, c in zip(self.root.offset, cell))

    def cube_window(self, cube: DyadicCube) -> Window:
        """Window covered by a dyadic cube lying inside the root."""
        depth = cube.level - self.cell_level
        if depth < 0 or depth > self.resolution or not self.root.contains(cube):
            raise GeometryError(f"{cube} is not a node of the domain tree")
        base = tuple(o << self.resolution for o in self.root.offset)
        anchor = tuple((o << depth) - b for o, b in zip(cube.offset, base))
        return Window(anchor, 1 << depth)

    def cells(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.cells_per_side), repeat=self.dim)

    def scaled(self) -> BaseDomain:
        """Domain of the dilation ``2A``: same cells, one level up."""
        return BaseDomain(self.dim, DyadicCube(self.root.level + 1, self.root.offset), self.resolution)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "root_level": self.root.level,
            "root_offset": list(self.root.offset),
            "resolution_m": self.resolution,
        }


def count_windows(domain: BaseDomain, family: str = CONTAINED) -> int:
    n = domain.cells_per_side
    if family == CONTAINED:
        return sum((n - w + 1) ** domain.dim for w in range(1, n + 1))
    if family == CENTERED:
        return domain.n_cells * n
    raise GeometryError(f"unknown window family {family!r}")


def window_sides(domain: BaseDomain, family: str = CONTAINED) -> list[int]:
    n = domain.cells_per_side
    if family == CONTAINED:
        return list(range(1, n + 1))
    if family == CENTERED:
        return [2 * j + 1 for j in range(n)]
    raise GeometryError(f"unknown window family {family!r}")


def windows_of_side(domain: BaseDomain, side: int, family: str = CONTAINED) -> Iterator[Window]:
    """Windows of one side length, in row-major order of their position index.

    For ``contained`` the position is the anchor; for ``centered`` it is the
    centre cell ``anchor + (side - 1) / 2``.
    """
    n = domain.cells_per_side
    if family == CONTAINED:
        for anchor in itertools.product(range(n - side + 1), repeat=domain.dim):
            yield Window(anchor, side)
    elif family == CENTERED:
        if side % 2 == 0:
            raise GeometryError("centered windows have odd side in cells")
        j = side // 2
        for centre in itertools.product(range(n), repeat=domain.dim):
            yield Window(tuple(c - j for c in centre), side)
    else:
        raise GeometryError(f"unknown window family {family!r}")


def enumerate_windows(
    domain: BaseDomain,
    family: str = CONTAINED,
    max_side: int | None = None,
    cap: int | None = None,
) -> Iterator[Window]:
    """Yield every window of ``family``, smallest sides first.

    ``contained`` gives all cell-aligned subcubes of the root.  ``centered``
    gives the cubes ``Q(x, r)`` centred at cell centres with ``r`` an odd
    number of cells, up to the size at which every such cube covers the
    root; integrate over ``w.clip(domain)`` but normalize by the full cube.
    """
    cap = window_cap() if cap is None else cap
    total = count_windows(domain, family)
    if total > cap:
        raise EnumerationBudgetError(
            f"{total} windows exceed the enumeration cap {cap}"
        )
    for side in window_sides(domain, family):
        if max_side is not None and side > max_side:
            break
        yield from windows_of_side(domain, side, family)


def join_cube(q1: Window, q2: Window, bound: Window) -> Window:
    """A window containing ``q1`` and ``q2``, inside ``bound``, of side at most
    ``q1.side + q2.side``.

    Inputs must lie in ``bound`` and their closures must meet.
    """
    if not (bound.contains(q1) and bound.contains(q2)):
        raise GeometryError("join_cube inputs must lie inside the bound")
    if not q1.touches(q2):
        raise GeometryError("join_cube inputs are disjoint")
    lo = [min(a, b) for a, b in zip(q1.anchor, q2.anchor)]
    hi = [max(a, b) for a, b in zip(q1.upper, q2.upper)]
    side = max(h - l for l, h in zip(lo, hi))
    anchor = tuple(min(l, b + bound.side - side) for l, b in zip(lo, bound.anchor))
    return Window(anchor, side)


def comparison_cube(q: Window, domain: BaseDomain) -> Window:
    """Window ``P_Q`` inside the root with ``P_Q ⊇ Q ∩ root``.

    The side is ``min(ℓ(Q), ℓ(root))``.  ``P_Q ⊆ 2Q`` additionally holds
    whenever the centre of ``Q`` lies in the closed root; cubes that only
    graze the root cannot satisfy all three properties at once.
    """
    if not q.meets(domain):
        raise GeometryError("comparison_cube needs a window meeting the root")
    n = domain.cells_per_side
    if q.side >= n:
        return domain.root_window()
    anchor = tuple(min(max(a, 0), n - q.side) for a in q.anchor)
    return Window(anchor, q.side)


def dilate(q: Window, factor: int) -> tuple[tuple[float, float], ...]:
    """Real-valued per-axis bounds (in cells) of the concentric dilation."""
    half = (factor - 1) * q.side / 2.0
    return tuple((a - half, a + q.side + half) for a in q.anchor)


def smallest_dyadic_block(lo: Sequence[int], hi: Sequence[int], resolution: int) -> tuple[int, tuple[int, ...]]:
    """Smallest dyadic block (depth, anchor) of the cell tree holding ``[lo, hi)``.

    ``depth`` is log2 of the block side in cells.
    """
    depth = 0
    while depth < resolution and any(
        (l >> depth) != ((h - 1) >> depth) for l, h in zip(lo, hi)
    ):
        depth += 1
    return depth, tuple((l >> depth) << depth for l in lo)
