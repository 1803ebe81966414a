"""Capacitary mean oscillation and the BMO/BLO norms built from it.

For a window ``W`` with content ``H = H^β_∞(W)`` the oscillation objective is

    F(c) = H**-1 ∫_{W ∩ root} |f - c|**p dH^β_∞.

``F`` is convex in ``c``: the Choquet integral against a submodular content
is monotone and sublinear, and ``c -> |f(x) - c|**p`` is convex cellwise.
For ``p = 1`` it is also piecewise linear, with kinks only where two cells
swap order in ``|f - c|`` (cell values and midpoints of pairs), so the exact
minimum is attained on that finite candidate set.  For ``p > 1`` the best
cell value brackets the minimizer and a bounded scalar search finishes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.optimize import minimize_scalar

from .choquet import ChoquetDomainError, choquet_integral, layer_cake
from .content import as_beta, check_beta, child_offsets, side_powers, window_block, window_content
from .geometry import CONTAINED, GeometryError, Window, enumerate_windows
from .grid import GridFunction

# Entries of the (batch, levels, block) mask tensor handled per DP call.
BATCH_BUDGET = 1 << 21
SCALAR_XTOL = 1e-12


class OscillationError(ValueError):
    pass


@dataclass(frozen=True)
class OscillationParams:
    beta: float
    p: float = 1.0
    family: str = CONTAINED

    def __post_init__(self):
        if self.p < 1:
            raise OscillationError("p must be >= 1")


@dataclass(frozen=True)
class NormReport:
    norm_value: float
    witness_window: Window | None
    witness_c: float | None
    kind: str = "bmo"
    beta: float | None = None
    p: float = 1.0
    family: str = CONTAINED

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "norm_value": self.norm_value,
            "witness_window": None if self.witness_window is None else self.witness_window.to_json(),
            "witness_c": self.witness_c,
            "beta": self.beta,
            "p": self.p,
            "family": self.family,
        }


def _check_p(p: float) -> float:
    if p < 1:
        raise OscillationError("p must be >= 1")
    return float(p)


def _batched_content(masks: np.ndarray, n: int, pows: list[float]) -> np.ndarray:
    values = masks * pows[0]
    for d in range(1, len(pows)):
        acc = None
        for bits in child_offsets(n):
            part = values[(Ellipsis,) + tuple(slice(b, None, 2) for b in bits)]
            acc = part.copy() if acc is None else acc + part
        values = np.minimum(acc, pows[d])
    return values.reshape(values.shape[: values.ndim - n])


class WindowObjective:
    """Evaluates ``F(c)`` on one window for one or many ``c`` at a time."""

    def __init__(self, f: GridFunction, window: Window, beta: float, p: float = 1.0):
        domain = f.domain
        if not window.meets(domain):
            raise GeometryError("window does not meet the root")
        self.n = domain.dim
        self.beta = beta
        self.p = _check_p(p)
        self.content = window_content(domain, window, beta)
        lo, hi = zip(*window.clip_bounds(domain))
        box = tuple(slice(l, h) for l, h in zip(lo, hi))
        self.cells = np.ascontiguousarray(f.values[box]).ravel()
        self.lebesgue = beta == self.n
        self.cell_side = domain.cell_side
        self.cell_vol = domain.cell_side**self.n
        if not self.lebesgue:
            block = window_block(domain, lo, hi)
            self.block = f.values[block]
            inside = np.zeros(self.block.shape, dtype=bool)
            inside[tuple(slice(l - b.start, h - b.start) for l, h, b in zip(lo, hi, block))] = True
            self.inside = inside
            depth = self.block.shape[0].bit_length() - 1
            self.pows = side_powers(domain.cell_side, beta, depth)

    def _powered(self, d: np.ndarray) -> np.ndarray:
        return d if self.p == 1.0 else d**self.p

    def integral(self, c: float) -> float:
        """``∫_{W ∩ root} |f - c|**p dH`` (unnormalized)."""
        if self.lebesgue:
            return float(np.sum(self._powered(np.abs(self.cells - c)))) * self.cell_vol
        d = self._powered(np.abs(self.block - c))
        return layer_cake(d, self.inside, self.n, self.cell_side, self.beta)

    def __call__(self, c: float) -> float:
        return self.integral(c) / self.content

    def batch(self, cs) -> np.ndarray:
        """``F`` at every entry of ``cs``."""
        cs = np.asarray(cs, dtype=np.float64).ravel()
        if cs.size == 0:
            return cs
        if self.lebesgue:
            out = []
            step = max(1, BATCH_BUDGET // max(self.cells.size, 1))
            for s in range(0, cs.size, step):
                d = self._powered(np.abs(self.cells[None, :] - cs[s : s + step, None]))
                out.append(d.sum(axis=1) * self.cell_vol)
            return np.concatenate(out) / self.content
        k = self.cells.size
        bsize = self.block.size
        step = max(1, BATCH_BUDGET // (k * bsize))
        out = []
        shape = (1,) * self.n
        for s in range(0, cs.size, step):
            chunk = cs[s : s + step]
            d = self._powered(np.abs(self.block[None, ...] - chunk.reshape((-1,) + shape)))
            levels = np.sort(d[:, self.inside], axis=1)
            masks = (d[:, None, ...] >= levels.reshape(levels.shape + shape)) & self.inside
            heights = _batched_content(masks, self.n, self.pows)
            steps = np.diff(levels, axis=1, prepend=0.0)
            out.append(np.array([math.fsum(r) for r in steps * heights]))
        return np.concatenate(out) / self.content


def _midpoints(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    v = np.unique(values)
    mids = (v[:, None] + v[None, :]) / 2.0
    mids = mids[np.triu_indices(v.size, 1)]
    cand = np.concatenate([v, mids])
    cand = cand[(cand >= lo) & (cand <= hi)]
    return np.unique(cand)


def minimize_objective(obj: WindowObjective) -> tuple[float, float]:
    """``(min_c F(c), argmin)``; the minimizer is the smallest best candidate."""
    vals = np.unique(obj.cells)
    if vals.size == 1:
        return 0.0, float(vals[0])
    if obj.lebesgue and obj.p == 1.0:
        srt = np.sort(obj.cells)
        c = float(srt[(srt.size - 1) // 2])
        return obj(c), c
    fv = obj.batch(vals)
    i = int(np.argmin(fv))
    lo = float(vals[max(i - 1, 0)])
    hi = float(vals[min(i + 1, vals.size - 1)])
    best_f, best_c = float(fv[i]), float(vals[i])
    if obj.p == 1.0:
        cand = _midpoints(obj.cells, lo, hi)
        fc = obj.batch(cand)
        j = int(np.argmin(fc))
        if fc[j] < best_f:
            best_f, best_c = float(fc[j]), float(cand[j])
        return best_f, best_c
    res = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": SCALAR_XTOL})
    x = float(res.x)
    # the minimum may sit on a kink, which the search only approaches
    kinks = _midpoints(obj.cells, lo, hi)
    k = int(np.searchsorted(kinks, x))
    cand = np.concatenate([[x], kinks[max(k - 1, 0) : k + 1]])
    fc = obj.batch(cand)
    j = int(np.argmin(fc))
    if fc[j] < best_f:
        best_f, best_c = float(fc[j]), float(cand[j])
    return best_f, best_c


def _root(value: float, p: float) -> float:
    return value if p == 1.0 else value ** (1.0 / p)


def essinf_beta(f: GridFunction, w: Window | None = None, params=None) -> float:
    """β-essential infimum over ``w ∩ root``: the cellwise minimum, since every
    cell has positive content when ``β > 0``."""
    if params is not None:
        check_beta(as_beta(params), f.domain.dim)
    vals = f.values if w is None else f.restrict(w)
    if vals.size == 0:
        raise GeometryError("empty window")
    return float(np.min(vals))


def choquet_average(f: GridFunction, w: Window, params) -> float:
    """``H(W)**-1 ∫_{W ∩ root} f dH^β_∞`` for nonnegative ``f``."""
    beta = check_beta(as_beta(params), f.domain.dim)
    return choquet_integral(f, w, beta) / window_content(f.domain, w, beta)


def mean_oscillation(f: GridFunction, w: Window, params, p: float = 1.0) -> tuple[float, float]:
    """``(inf_c (H**-1 ∫|f - c|**p dH)**(1/p), minimizing c)`` on one window."""
    beta = check_beta(as_beta(params), f.domain.dim)
    obj = WindowObjective(f, w, beta, p)
    value, c = minimize_objective(obj)
    return _root(value, obj.p), c


def oscillation_at(f: GridFunction, w: Window, c: float, params, p: float = 1.0) -> float:
    """``(H**-1 ∫|f - c|**p dH)**(1/p)`` for a given constant."""
    beta = check_beta(as_beta(params), f.domain.dim)
    obj = WindowObjective(f, w, beta, p)
    return _root(obj(c), obj.p)


def lower_oscillation(f: GridFunction, w: Window, params, p: float = 1.0) -> tuple[float, float]:
    """``((H**-1 ∫(f - essinf_β f)**p dH)**(1/p), essinf_β f)`` on one window."""
    c = essinf_beta(f, w)
    return oscillation_at(f, w, c, params, p), c


def average_oscillation(f: GridFunction, w: Window, params) -> float:
    """``H**-1 ∫|f - f_{W,β}| dH`` with the Choquet average as centre."""
    return oscillation_at(f, w, choquet_average(f, w, params), params, 1.0)


def _windows(f: GridFunction, family: str, max_side: int | None) -> Iterator[Window]:
    return enumerate_windows(f.domain, family, max_side=max_side)


def sup_over_windows(
    f: GridFunction,
    local: Callable[[Window], tuple[float, float]],
    family: str = CONTAINED,
    max_side: int | None = None,
) -> tuple[float, Window | None, float | None]:
    """Largest ``local(w)[0]`` over the family; the first window wins ties."""
    best, arg, c_arg = 0.0, None, None
    for w in _windows(f, family, max_side):
        value, c = local(w)
        if arg is None or value > best:
            best, arg, c_arg = value, w, c
    return best, arg, c_arg


def bmo_norm(f: GridFunction, params, p: float = 1.0, family: str = CONTAINED, max_side: int | None = None) -> NormReport:
    """``sup_W inf_c (H(W)**-1 ∫_W |f - c|**p dH)**(1/p)`` with its witness."""
    beta = check_beta(as_beta(params), f.domain.dim)
    p = _check_p(p)
    value, w, c = sup_over_windows(f, lambda q: mean_oscillation(f, q, beta, p), family, max_side)
    if w is None:
        raise GeometryError("empty window family")
    return NormReport(value, w, c, "bmo", beta, p, family)


def blo_norm(f: GridFunction, params, p: float = 1.0, family: str = CONTAINED, max_side: int | None = None) -> NormReport:
    """``sup_W (H(W)**-1 ∫_W (f - essinf_β f)**p dH)**(1/p)`` with its witness."""
    beta = check_beta(as_beta(params), f.domain.dim)
    p = _check_p(p)
    value, w, c = sup_over_windows(f, lambda q: lower_oscillation(f, q, beta, p), family, max_side)
    if w is None:
        raise GeometryError("empty window family")
    return NormReport(value, w, c, "blo", beta, p, family)


def sides_up_to(f: GridFunction, r: float) -> int:
    """Largest window side in cells whose length does not exceed ``r``."""
    return int(math.floor(r / f.domain.cell_side * (1 + 1e-12)))


def oscillation_profile(
    f: GridFunction, params, p: float = 1.0, family: str = CONTAINED, max_side: int | None = None
) -> dict[int, float]:
    """Largest mean oscillation among family windows of each side (in cells)."""
    beta = check_beta(as_beta(params), f.domain.dim)
    best: dict[int, float] = {}
    for w in _windows(f, family, max_side):
        value, _ = mean_oscillation(f, w, beta, p)
        best[w.side] = max(best.get(w.side, 0.0), value)
    return best


def modulus_from_profile(profile: dict[int, float], cell_side: float, r: float) -> float:
    """``ω(r)`` read off a per-side profile."""
    limit = r / cell_side * (1 + 1e-12)
    return max((v for s, v in profile.items() if s <= limit), default=0.0)


def oscillation_modulus(f: GridFunction, r: float, params, p: float = 1.0, family: str = CONTAINED) -> float:
    """``ω_β(f, r)``: the largest oscillation over family windows with ``ℓ <= r``."""
    if not r > 0:
        raise OscillationError("r must be positive")
    max_side = sides_up_to(f, r)
    if max_side < 1:
        return 0.0
    return bmo_norm(f, params, p, family, max_side).norm_value


__all__ = [
    "ChoquetDomainError",
    "NormReport",
    "OscillationParams",
    "WindowObjective",
    "average_oscillation",
    "blo_norm",
    "bmo_norm",
    "choquet_average",
    "essinf_beta",
    "lower_oscillation",
    "mean_oscillation",
    "oscillation_at",
    "oscillation_modulus",
    "oscillation_profile",
]
