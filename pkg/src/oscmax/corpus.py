"""Seeded test functions with known oscillation character.

Every kind is sampled at cell centres of the domain, so a spec plus a
resolution determines the grid bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import BaseDomain
from .grid import GridFunction

KINDS = (
    "constant",
    "indicator",
    "smoothed_indicator",
    "sawtooth",
    "log_distance",
    "log_abs",
    "dyadic_martingale",
    "random",
)


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusSpec:
    """A corpus function: ``kind`` with its ``params`` on a domain.

    ``truncation`` caps ``|f|`` for the singular log kinds.
    """

    kind: str
    dim: int = 1
    resolution: int = 4
    root_level: int = 0
    params: dict = field(default_factory=dict)
    truncation: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CorpusError(f"unknown corpus kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        object.__setattr__(self, "params", dict(self.params))

    @property
    def domain(self) -> BaseDomain:
        return BaseDomain.unit(self.dim, self.resolution, self.root_level)

    def at(self, resolution: int) -> CorpusSpec:
        return replace(self, resolution=resolution)

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.kind}({inner})"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "resolution_m": self.resolution,
            "root_level": self.root_level,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> CorpusSpec:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            kind=data["kind"],
            dim=int(data.get("dim", 1)),
            resolution=int(data.get("resolution_m", data.get("resolution", 4))),
            root_level=int(data.get("root_level", 0)),
            params=dict(data.get("params", {})),
            truncation=data.get("truncation"),
        )


def cell_centres(domain: BaseDomain) -> np.ndarray:
    """Coordinates of the cell centres in units of the root side, shape ``(n, *grid)``."""
    n = domain.cells_per_side
    axis = (np.arange(n) + 0.5) / n
    return np.stack(np.meshgrid(*([axis] * domain.dim), indexing="ij"))


def _box_fraction(spec: CorpusSpec, key: str, default):
    value = spec.params.get(key, default)
    if np.isscalar(value):
        value = [value] * spec.dim
    if len(value) != spec.dim:
        raise CorpusError(f"{key} needs {spec.dim} coordinates")
    return np.asarray(value, dtype=np.float64).reshape((-1,) + (1,) * spec.dim)


def _indicator(spec: CorpusSpec, x: np.ndarray) -> np.ndarray:
    lo = _box_fraction(spec, "lo", 0.0)
    hi = _box_fraction(spec, "hi", 0.5)
    return np.all((x >= lo) & (x < hi), axis=0).astype(np.float64)


def _smoothed_indicator(spec: CorpusSpec, x: np.ndarray) -> np.ndarray:
    lo = _box_fraction(spec, "lo", 0.25)
    hi = _box_fraction(spec, "hi", 0.75)
    width = float(spec.params.get("width", 0.125))
    if width <= 0:
        raise CorpusError("smoothed_indicator width must be positive")
    outside = np.max(np.maximum(lo - x, 0.0) + np.maximum(x - hi, 0.0), axis=0)
    return np.clip(1.0 - outside / width, 0.0, 1.0)


def _sawtooth(spec: CorpusSpec, x: np.ndarray) -> np.ndarray:
    freq = float(spec.params.get("frequency", 2))
    phase = np.mod(freq * x, 1.0)
    return np.mean(1.0 - np.abs(2.0 * phase - 1.0), axis=0)


def _log_distance(spec: CorpusSpec, x: np.ndarray, k: int) -> np.ndarray:
    n = spec.dim
    if not 0 <= k < n:
        raise CorpusError(f"hyperplane dimension k={k} must satisfy 0 <= k < n={n}")
    domain = spec.domain
    side = domain.root_side
    pts = x * side
    centre = side / 2.0
    dist = np.sqrt(np.sum((pts[k:] - centre) ** 2, axis=0))
    eps = 0.5 * domain.cell_side * np.sqrt(n)
    values = -np.log(dist + eps)
    if spec.truncation is not None:
        values = np.clip(values, -spec.truncation, spec.truncation)
    return values


def _martingale(spec: CorpusSpec) -> np.ndarray:
    """Dyadic martingale started at 0 on the root.

    Each refinement of an active node adds ``±step`` to its children, half
    up and half down in seeded random order.  With ``branch="up"`` (default)
    only the children that went up stay active, which places a dyadic
    logarithm at a random location; with ``branch="all"`` every node keeps
    refining.  Draws are made level by level from the root, so the same seed
    at a coarser resolution gives the conditional expectation of the finer
    function.
    """
    n = spec.dim
    step = float(spec.params.get("step", 0.5))
    branch = spec.params.get("branch", "up")
    if branch not in ("up", "all"):
        raise CorpusError(f"martingale branch must be 'up' or 'all', got {branch!r}")
    rng = np.random.default_rng(int(spec.params.get("seed", 0)))
    k = 1 << n
    signs = np.array([1.0] * (k // 2) + [-1.0] * (k // 2))
    values = np.zeros((1,) * n)
    active = np.ones((1,) * n, dtype=bool)
    for level in range(1, spec.resolution + 1):
        draws = rng.permuted(np.tile(signs, (values.size, 1)), axis=1)
        half = 1 << (level - 1)
        # row i of ``draws`` holds the children of parent i in bit order
        order = [a for axis in range(n) for a in (axis, n + axis)]
        draws = draws.reshape((half,) * n + (2,) * n).transpose(order).reshape((2 * half,) * n)
        refined = values
        live = active
        for axis in range(n):
            refined = np.repeat(refined, 2, axis=axis)
            live = np.repeat(live, 2, axis=axis)
        values = refined + np.where(live, draws * step, 0.0)
        active = live & (draws > 0) if branch == "up" else live
    return values


def generate(spec: CorpusSpec) -> GridFunction:
    """Grid function for ``spec``, sampled at cell centres."""
    domain = spec.domain
    x = cell_centres(domain)
    kind = spec.kind
    if kind == "constant":
        values = np.full(domain.shape, float(spec.params.get("c", 1.0)))
    elif kind == "indicator":
        values = _indicator(spec, x)
    elif kind == "smoothed_indicator":
        values = _smoothed_indicator(spec, x)
    elif kind == "sawtooth":
        values = _sawtooth(spec, x)
    elif kind == "log_distance":
        values = _log_distance(spec, x, int(spec.params.get("k", 0)))
    elif kind == "log_abs":
        values = _log_distance(spec, x, 0)
    elif kind == "random":
        rng = np.random.default_rng(int(spec.params.get("seed", 0)))
        low = float(spec.params.get("low", 0.0))
        high = float(spec.params.get("high", 1.0))
        values = rng.uniform(low, high, domain.shape)
    else:
        values = _martingale(spec)
    return GridFunction(domain, values)
