"""Experiment suites: measured norm ratios, level-set decay fits and verdicts.

No constant in the underlying inequalities is known numerically, so each
suite checks shape rather than size: ratios must stay bounded under
resolution doubling, distributions must decay, moduli must shrink.  Every
suite is a pure function of its :class:`ExperimentConfig`; corpus items are
farmed out to a thread pool and merged back in input order, so reports do
not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .choquet import choquet_lp_norm
from .content import dense_content, window_block, window_content
from .corpus import CorpusSpec, generate
from .geometry import CONTAINED, BaseDomain, Window, enumerate_windows, windows_of_side
from .grid import GridFunction
from .maximal import beta_maximal, fractional_maximal, local_global_split, shift_modulus
from .oscillation import blo_norm, bmo_norm, modulus_from_profile, oscillation_profile

PASS = "PASS"
FAIL = "FAIL"
TRIVIAL = "TRIVIAL"
SKIPPED = "SKIPPED"
REPORTED = "REPORTED"
DIVERGES = "DIVERGES-AS-PREDICTED"
NO_DIVERGENCE = "NO-DIVERGENCE"
OK_VERDICTS = frozenset({PASS, TRIVIAL, SKIPPED, REPORTED, DIVERGES})

MARTINGALE = "dyadic_martingale"


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one suite run.

    ``corpus`` entries are corpus spec dicts without a resolution; each is
    generated at every entry of ``resolutions``.  ``beta`` doubles as the
    smaller exponent where a suite compares two of them, ``beta2`` is the
    larger one.
    """

    suite: str
    corpus: tuple = ()
    resolutions: tuple = ()
    alpha: float = 0.0
    beta: float = 1.0
    beta2: float | None = None
    p: float = 1.0
    lambdas: tuple = (4.0, 8.0, 16.0, 32.0)
    kappa: float | None = None
    seed: int = 0
    growth_guard: float = 1.5
    r2_min: float = 0.9
    family: str = CONTAINED
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "corpus", tuple(dict(c) for c in self.corpus))
        object.__setattr__(self, "resolutions", tuple(int(m) for m in self.resolutions))
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "options", dict(self.options))

    def specs(self, corpus: Iterable[dict] | None = None) -> list[CorpusSpec]:
        out = []
        for entry in self.corpus if corpus is None else corpus:
            data = dict(entry)
            params = dict(data.get("params", {}))
            if data["kind"] in (MARTINGALE, "random") and "seed" not in params:
                params["seed"] = self.seed
            data["params"] = params
            out.append(CorpusSpec.from_json(data))
        return out

    def items(self, corpus: Iterable[dict] | None = None, resolutions=None) -> list[CorpusSpec]:
        ms = self.resolutions if resolutions is None else resolutions
        return [spec.at(m) for spec in self.specs(corpus) for m in ms]

    def with_overrides(self, **changes) -> ExperimentConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_json(self) -> dict:
        return _clean(asdict(self))

    @classmethod
    def from_json(cls, data: dict) -> ExperimentConfig:
        return cls(**data)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit ``log(H_j / H(Q')) ≈ log c1 - c2 t_j / ‖f‖`` over ``H_j > 0``."""

    thresholds: tuple
    contents: tuple
    c1: float
    c2: float
    r_squared: float
    c1_envelope: float

    @classmethod
    def fit(cls, thresholds, contents, norm: float) -> DecayFit:
        t = np.asarray(thresholds, dtype=np.float64)
        h = np.asarray(contents, dtype=np.float64)
        keep = h > 0
        x = t[keep] / norm
        y = np.log(h[keep])
        if x.size >= 2 and np.ptp(x) > 0:
            slope, intercept = np.polyfit(x, y, 1)
            resid = y - (slope * x + intercept)
            spread = float(np.sum((y - y.mean()) ** 2))
            r2 = 1.0 - float(np.sum(resid**2)) / spread if spread > 0 else 1.0
        else:
            slope, intercept, r2 = 0.0, float(y[0]) if y.size else 0.0, 1.0
        c2 = -float(slope)
        envelope = float(np.max(h[keep] * np.exp(c2 * x))) if x.size else 0.0
        return cls(tuple(map(float, t)), tuple(map(float, h)), math.exp(intercept), c2, r2, envelope)

    def to_json(self) -> dict:
        return _clean(asdict(self))


@dataclass
class Report:
    suite: str
    config: dict
    per_function: list
    verdicts: dict
    runtime_ms: float | None = None

    @property
    def passed(self) -> bool:
        return all(v in OK_VERDICTS for v in self.verdicts.values())

    def to_json(self) -> dict:
        return _clean(
            {
                "suite": self.suite,
                "config": self.config,
                "per_function": self.per_function,
                "verdicts": self.verdicts,
                "runtime_ms": self.runtime_ms,
            }
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def series_csv(self) -> str:
        """Plot series of every function as long-format CSV."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["function", "resolution_m", "series", "x", "y"])
        for entry in self.per_function:
            label = entry.get("label", "")
            m = entry.get("spec", {}).get("resolution_m", "")
            for name, points in entry.get("series", {}).items():
                for x, y in points:
                    writer.writerow([label, m, name, repr(x), repr(y)])
        return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def run_items(fn: Callable, items: list, threads: int = 1) -> list:
    """``[fn(i) for i in items]``, optionally on a thread pool, in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _entry(spec: CorpusSpec, **extra) -> dict:
    out = {"label": spec.label, "spec": spec.to_json(), "norms": {}, "ratios": {}}
    out.update(extra)
    return out


def growth_verdict(sups: dict[int, float], guard: float) -> tuple[str, list]:
    """PASS when every resolution doubling grows the sup ratio by less than ``guard``."""
    ms = sorted(m for m, v in sups.items() if v is not None)
    if len(ms) < 2:
        return SKIPPED, []
    growth = []
    for a, b in zip(ms, ms[1:]):
        lo, hi = sups[a], sups[b]
        growth.append(hi / lo if lo > 0 else (1.0 if hi == 0 else math.inf))
    ok = all(math.isfinite(g) and g < guard for g in growth)
    return (PASS if ok else FAIL), growth


def sup_by_resolution(entries: list, key: str) -> dict[int, float]:
    sups: dict[int, float] = {}
    for e in entries:
        value = e["ratios"].get(key)
        if value is None:
            continue
        m = e["spec"]["resolution_m"]
        sups[m] = max(sups.get(m, 0.0), value)
    return sups


def _combine(verdicts: Iterable[str]) -> str:
    verdicts = list(verdicts)
    if not verdicts:
        return SKIPPED
    if any(v == FAIL for v in verdicts):
        return FAIL
    if all(v == TRIVIAL for v in verdicts):
        return TRIVIAL
    if all(v in (TRIVIAL, SKIPPED) for v in verdicts):
        return SKIPPED
    return PASS


def _finish(cfg: ExperimentConfig, entries: list, verdicts: dict, started: float, timing: bool) -> Report:
    runtime = round((time.perf_counter() - started) * 1000.0, 3) if timing else None
    return Report(cfg.suite, cfg.to_json(), entries, verdicts, runtime)


# ------------------------------------------------------------ level sets


def dyadic_ladder(domain: BaseDomain) -> list[Window]:
    """Every dyadic cube of the cell tree, as windows, coarsest first."""
    out = []
    for depth in range(domain.resolution, -1, -1):
        side = 1 << depth
        out += [w for w in windows_of_side(domain, side) if all(a % side == 0 for a in w.anchor)]
    return out


def level_set_contents(f: GridFunction, w: Window, beta: float, thresholds) -> np.ndarray:
    """``H({x in W : f - essinf_W f > t}) / H(W)`` for each threshold, by the exact DP."""
    domain = f.domain
    lo, hi = zip(*w.clip_bounds(domain))
    block = window_block(domain, lo, hi)
    sub = f.values[block]
    inside = np.zeros(sub.shape, dtype=bool)
    inside[tuple(slice(l - b.start, h - b.start) for l, h, b in zip(lo, hi, block))] = True
    g = sub - np.min(sub[inside])
    ts = np.asarray(thresholds, dtype=np.float64)
    masks = (g[None, ...] > ts.reshape((-1,) + (1,) * domain.dim)) & inside
    return dense_content(masks, domain.dim, domain.cell_side, beta) / window_content(domain, w, beta)


def level_envelope(f: GridFunction, windows: list[Window], beta: float, thresholds=None):
    """Thresholds and ``max_W`` of the normalized level-set contents."""
    if thresholds is None:
        levels = set()
        for w in windows:
            vals = f.restrict(w)
            g = np.unique(vals - vals.min())
            levels.update(g[:-1].tolist())
        thresholds = np.array(sorted(levels))
    thresholds = np.asarray(thresholds, dtype=np.float64)
    env = np.zeros(thresholds.size)
    for w in windows:
        env = np.maximum(env, level_set_contents(f, w, beta, thresholds))
    return thresholds, env


# ------------------------------------------------------------ suites


def jn_blo_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """Exponential decay of level-set contents of ``f - essinf_β f`` relative
    to the BLO norm, over the dyadic ladder of windows."""
    started = time.perf_counter()
    beta = cfg.beta

    def item(spec: CorpusSpec) -> dict:
        f = generate(spec)
        entry = _entry(spec)
        norm = blo_norm(f, beta).norm_value
        entry["norms"]["blo"] = norm
        if norm == 0.0:
            entry["status"] = TRIVIAL
            return entry
        ladder = dyadic_ladder(f.domain)
        ts, env = level_envelope(f, ladder, beta)
        fit = DecayFit.fit(ts, env, norm)
        monotone = bool(np.all(np.diff(env) <= 0.0))
        _, env_all = level_envelope(f, list(enumerate_windows(f.domain)), beta, ts)
        entry["fit"] = fit.to_json()
        entry["ratios"]["all_windows_r_squared"] = DecayFit.fit(ts, env_all, norm).r_squared
        entry["monotone"] = monotone
        entry["series"] = {"log_content": [[float(t), math.log(h)] for t, h in zip(ts, env) if h > 0]}
        ok = monotone and (spec.kind != MARTINGALE or fit.r_squared >= cfg.r2_min)
        entry["status"] = PASS if ok else FAIL
        return entry

    entries = run_items(item, cfg.items(), threads)
    fitted = [e for e in entries if e["status"] != TRIVIAL]
    verdicts = {
        "monotone_distribution": _combine(
            [TRIVIAL] if not fitted else [PASS if e["monotone"] else FAIL for e in fitted]
        ),
        "martingale_log_linear": _combine(
            [PASS if e["fit"]["r_squared"] >= cfg.r2_min else FAIL for e in fitted if e["spec"]["kind"] == MARTINGALE]
        ),
    }
    if not fitted:
        verdicts["martingale_log_linear"] = TRIVIAL
    return _finish(cfg, entries, verdicts, started, timing)


def _fractional_blo_ratio(spec: CorpusSpec, alpha: float, beta: float) -> dict:
    f = generate(spec)
    entry = _entry(spec)
    n = f.domain.dim
    bmo = bmo_norm(f, float(n)).norm_value
    entry["norms"]["bmo_lebesgue"] = bmo
    if bmo == 0.0:
        entry["status"] = SKIPPED
        return entry
    field = fractional_maximal(f, alpha).as_grid()
    blo = blo_norm(field, beta).norm_value
    entry["norms"]["blo_maximal"] = blo
    entry["ratios"]["ratio"] = blo / (f.domain.root_side**alpha * bmo)
    entry["status"] = PASS
    return entry


def divergence_verdict(ratios: list[float], guard: float) -> tuple[str, list]:
    """DIVERGES when ratios rise strictly with increments that do not fade
    (each at least half the first) and total growth exceeds ``guard``."""
    if len(ratios) < 3 or ratios[0] <= 0:
        return NO_DIVERGENCE, []
    inc = [b - a for a, b in zip(ratios, ratios[1:])]
    rising = all(d > 0 for d in inc)
    steady = rising and min(inc) >= 0.5 * inc[0]
    grows = ratios[-1] / ratios[0] >= guard
    return (DIVERGES if rising and steady and grows else NO_DIVERGENCE), inc


COUNTEREXAMPLE_CORPUS = ({"kind": "log_distance", "dim": 2, "params": {"k": 1}},)


def alpha0_counterexample(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """``‖M f‖_{BLO^k} / ‖f‖_BMO`` for ``f = log dist(·, H_k)`` at ``α = 0``.

    The ratio must blow up as the grid refines.
    """
    started = time.perf_counter()
    corpus = cfg.corpus or COUNTEREXAMPLE_CORPUS
    res = cfg.resolutions or (2, 3, 4, 5)
    cfg = replace(cfg, corpus=corpus, resolutions=res)
    beta = cfg.beta
    entries = run_items(lambda s: _fractional_blo_ratio(s, 0.0, beta), cfg.items(), threads)
    verdicts = {}
    for spec in cfg.specs():
        ratios = [e["ratios"].get("ratio", 0.0) for e in entries if e["label"] == spec.label]
        verdict, inc = divergence_verdict(ratios, cfg.growth_guard)
        verdicts[f"alpha0_counterexample[{spec.label}]"] = verdict
        for e in entries:
            if e["label"] == spec.label:
                e["increments"] = inc
    return _finish(cfg, entries, verdicts, started, timing)


def blo_boundedness_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """``‖M_α f‖_{BLO^β} / (ℓ(Q0)^α ‖f‖_BMO)`` across the corpus and resolutions.

    With ``options["contrast"]`` the α = 0 counterexample runs alongside.
    """
    started = time.perf_counter()
    if not 0.0 < cfg.alpha:
        raise ExperimentError("boundedness needs alpha > 0; the alpha = 0 case is the counterexample suite")
    entries = run_items(lambda s: _fractional_blo_ratio(s, cfg.alpha, cfg.beta), cfg.items(), threads)
    verdict, growth = growth_verdict(sup_by_resolution(entries, "ratio"), cfg.growth_guard)
    verdicts = {"bounded_ratio": verdict}
    extra = {"sup_ratio_growth": growth}
    if cfg.options.get("contrast", True):
        contrast_cfg = ExperimentConfig(
            "alpha0_counterexample",
            beta=float(cfg.options.get("contrast_beta", 1.0)),
            resolutions=tuple(cfg.options.get("contrast_resolutions", (2, 3, 4, 5))),
            growth_guard=cfg.growth_guard,
        )
        contrast = alpha0_counterexample(contrast_cfg, threads)
        for e in contrast.per_function:
            e["role"] = "contrast"
        entries = entries + contrast.per_function
        verdicts.update(contrast.verdicts)
        extra["contrast_config"] = contrast.config
    report = _finish(cfg, entries, verdicts, started, timing)
    report.config = {**report.config, **_clean(extra)}
    return report


def beta_maximal_boundedness_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """``‖M^{β2} f‖_{BLO^{β1}} / ‖f‖_{BMO^{β1}}`` across corpus and resolutions."""
    started = time.perf_counter()
    b1 = cfg.beta
    b2 = cfg.beta2 if cfg.beta2 is not None else b1
    if not 0.0 < b1 <= b2:
        raise ExperimentError("need 0 < beta <= beta2")

    def item(spec: CorpusSpec) -> dict:
        f = generate(spec)
        entry = _entry(spec)
        if b2 > f.domain.dim:
            raise ExperimentError("beta2 exceeds the dimension")
        bmo = bmo_norm(f, b1).norm_value
        entry["norms"]["bmo"] = bmo
        if bmo == 0.0:
            entry["status"] = SKIPPED
            return entry
        blo = blo_norm(beta_maximal(f, b2).as_grid(), b1).norm_value
        entry["norms"]["blo_maximal"] = blo
        entry["ratios"]["ratio"] = blo / bmo
        entry["status"] = PASS
        return entry

    entries = run_items(item, cfg.items(), threads)
    verdict, growth = growth_verdict(sup_by_resolution(entries, "ratio"), cfg.growth_guard)
    report = _finish(cfg, entries, {"bounded_ratio": verdict}, started, timing)
    report.config = {**report.config, "sup_ratio_growth": _clean(growth)}
    return report


def sawyer_lp_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """``‖M_α f‖_{L^p(H^{n-αp})} / ‖f‖_{L^p}`` on the root."""
    started = time.perf_counter()
    alpha, p = cfg.alpha, cfg.p
    random_count = int(cfg.options.get("random_count", 0))
    random_corpus = tuple(
        {"kind": "random", "dim": int(cfg.options.get("random_dim", 1)), "params": {"seed": cfg.seed * 100003 + i}}
        for i in range(random_count)
    )

    def item(spec: CorpusSpec) -> dict:
        f = generate(spec)
        n = f.domain.dim
        beta = n - alpha * p
        if not (0.0 < alpha < n and 1.0 < p < n / alpha and beta > 0):
            raise ExperimentError(f"need 1 < p < n/alpha and beta = n - alpha p > 0 (got beta={beta})")
        entry = _entry(spec)
        lp = (float(np.sum(np.abs(f.values) ** p)) * f.domain.cell_side**n) ** (1.0 / p)
        entry["norms"]["lp"] = lp
        if lp == 0.0:
            entry["status"] = SKIPPED
            return entry
        field = fractional_maximal(f, alpha).as_grid()
        num = choquet_lp_norm(field, None, p, beta)
        entry["norms"]["choquet_lp_maximal"] = num
        entry["ratios"]["ratio"] = num / lp
        entry["status"] = PASS
        return entry

    items = cfg.items() + cfg.items(random_corpus)
    entries = run_items(item, items, threads)
    fixed = [e for e in entries if e["spec"]["kind"] != "random"]
    rand = [e for e in entries if e["spec"]["kind"] == "random"]
    verdict, growth = growth_verdict(sup_by_resolution(fixed, "ratio"), cfg.growth_guard)
    verdicts = {"bounded_ratio": verdict}
    if rand:
        rv, rgrowth = growth_verdict(sup_by_resolution(rand, "ratio"), cfg.growth_guard)
        verdicts["random_bounded_ratio"] = rv
        growth = {"corpus": growth, "random": rgrowth}
    report = _finish(cfg, entries, verdicts, started, timing)
    report.config = {**report.config, "beta_rule": "n - alpha * p", "sup_ratio_growth": _clean(growth)}
    return report


def uniform_continuity_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """Shift modulus ``μ(δ) = max |M_α f(x + δ) - M_α f(x)|`` over cell shifts."""
    started = time.perf_counter()
    alpha = cfg.alpha

    def moduli(f: GridFunction, a: float) -> list[list[float]]:
        field = fractional_maximal(f, a).values
        h = f.domain.cell_side
        return [[(1 << j) * h, shift_modulus(field, 1 << j)] for j in range(f.domain.resolution)]

    def item(spec: CorpusSpec) -> dict:
        f = generate(spec)
        entry = _entry(spec)
        mu = moduli(f, alpha)
        contrast = moduli(f, 0.0)
        values = [v for _, v in mu]
        entry["norms"]["cell_modulus"] = values[0] if values else 0.0
        entry["norms"]["contrast_cell_modulus"] = contrast[0][1] if contrast else 0.0
        entry["monotone_in_delta"] = all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
        entry["series"] = {"modulus": mu, "contrast_modulus_alpha0": contrast}
        entry["status"] = PASS if entry["monotone_in_delta"] else FAIL
        return entry

    entries = run_items(item, cfg.items(), threads)
    decay = []
    for spec in cfg.specs():
        cells = [e["norms"]["cell_modulus"] for e in entries if e["label"] == spec.label]
        if all(c == 0.0 for c in cells):
            decay.append(TRIVIAL)
        elif len(cells) < 2:
            decay.append(SKIPPED)
        else:
            shrinking = all(b <= a for a, b in zip(cells, cells[1:])) and cells[-1] < cells[0]
            decay.append(PASS if shrinking else FAIL)
    verdicts = {
        "modulus_monotone_in_delta": _combine(e["status"] for e in entries),
        "cell_modulus_decay": _combine(decay),
        "alpha0_contrast": REPORTED,
    }
    return _finish(cfg, entries, verdicts, started, timing)


def lemma_exponent(alpha: float, beta: float) -> float:
    """Midpoint of the admissible interval ``1 < p < β/α`` for the local bound."""
    if alpha <= 0:
        return 2.0
    return 0.5 * (1.0 + beta / alpha)


def vmo_preservation_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """Oscillation modulus of ``M_α f`` along ``r = 2**-j ℓ(Q0)`` plus the
    local/global split on windows of side ``r`` with ``κ = λ r``."""
    started = time.perf_counter()
    alpha, beta = cfg.alpha, cfg.beta
    if not 0.0 <= alpha < beta:
        raise ExperimentError("need 0 <= alpha < beta")
    ladder = int(cfg.options.get("ladder", 4))
    r_cells = int(cfg.options.get("r_cells", 2))
    p_loc = lemma_exponent(alpha, beta)

    def item(spec: CorpusSpec) -> dict:
        f = generate(spec)
        domain = f.domain
        side = domain.root_side
        h = domain.cell_side
        entry = _entry(spec)
        field = fractional_maximal(f, alpha).as_grid()
        prof_m = oscillation_profile(field, beta)
        prof_f = oscillation_profile(f, beta)
        omegas = [[side * 2.0**-j, modulus_from_profile(prof_m, h, side * 2.0**-j)] for j in range(ladder + 1)]
        entry["series"] = {"omega_maximal": omegas}
        ladder_ok = all(b[1] <= a[1] + 1e-12 for a, b in zip(omegas, omegas[1:]))
        bmo_f = max(prof_f.values(), default=0.0)
        entry["norms"]["bmo"] = bmo_f
        r = r_cells * h
        split = []
        for lam in cfg.lambdas:
            loc, glob = local_global_split(f, lam * r, alpha)
            o_loc = modulus_from_profile(oscillation_profile(loc.as_grid(), beta, max_side=r_cells), h, r)
            o_glob = modulus_from_profile(oscillation_profile(glob.as_grid(), beta, max_side=r_cells), h, r)
            o_full = modulus_from_profile(prof_m, h, r)
            loc_bound = lam ** (beta / p_loc) * side**alpha * modulus_from_profile(prof_f, h, 3 * lam * r)
            glob_bound = side**alpha * (1.0 + math.log(lam)) / lam * bmo_f
            split.append(
                {
                    "lambda": lam,
                    "kappa": lam * r,
                    "local_oscillation": o_loc,
                    "global_oscillation": o_glob,
                    "local_constant": o_loc / loc_bound if loc_bound > 0 else None,
                    "global_constant": o_glob / glob_bound if glob_bound > 0 else None,
                    "recombination_holds": o_full <= o_loc + o_glob + 1e-12,
                }
            )
        entry["split"] = split
        globs = [s["global_oscillation"] for s in split]
        entry["ladder_nonincreasing"] = ladder_ok
        entry["global_nonincreasing"] = all(b <= a + 1e-12 for a, b in zip(globs, globs[1:]))
        entry["recombination"] = all(s["recombination_holds"] for s in split)
        trivial = bmo_f == 0.0
        entry["status"] = TRIVIAL if trivial else PASS
        return entry

    entries = run_items(item, cfg.items(), threads)

    def verdict(key: str) -> str:
        return _combine(TRIVIAL if e["status"] == TRIVIAL else (PASS if e[key] else FAIL) for e in entries)

    verdicts = {
        "modulus_ladder_nonincreasing": verdict("ladder_nonincreasing"),
        "global_part_nonincreasing_in_lambda": verdict("global_nonincreasing"),
        "recombination": verdict("recombination"),
    }
    report = _finish(cfg, entries, verdicts, started, timing)
    report.config = {**report.config, "local_exponent_p": p_loc, "r_cells": r_cells}
    return report


def nesting_experiment(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    """Empirical constants between norms at two content dimensions and
    between the ``p``-versions and the ``p = 1`` norms."""
    started = time.perf_counter()
    gamma = cfg.beta
    beta = cfg.beta2 if cfg.beta2 is not None else gamma
    if not 0.0 < gamma <= beta:
        raise ExperimentError("need 0 < gamma <= beta")
    ps = tuple(float(p) for p in cfg.options.get("p_ladder", (1, 2, 4)))

    def item(spec: CorpusSpec) -> dict:
        f = generate(spec)
        entry = _entry(spec)
        norms = entry["norms"]
        norms["bmo_gamma"] = bmo_norm(f, gamma).norm_value
        norms["blo_gamma"] = blo_norm(f, gamma).norm_value
        for p in ps:
            norms[f"bmo_beta_p{p:g}"] = bmo_norm(f, beta, p).norm_value
            norms[f"blo_beta_p{p:g}"] = blo_norm(f, beta, p).norm_value
        b1, l1 = norms["bmo_beta_p1"], norms["blo_beta_p1"]
        if norms["bmo_gamma"] == 0.0:
            entry["status"] = TRIVIAL
            return entry
        ratios = entry["ratios"]
        ratios["bmo_nesting"] = b1 / norms["bmo_gamma"]
        ratios["blo_nesting"] = l1 / norms["blo_gamma"]
        shape_ok = True
        prev = None
        for p in ps:
            rb = norms[f"bmo_beta_p{p:g}"] / b1
            rl = norms[f"blo_beta_p{p:g}"] / l1
            ratios[f"bmo_p{p:g}_over_p1"] = rb
            ratios[f"blo_p{p:g}_over_p1"] = rl
            scaled = max(rb, rl) / p
            shape_ok &= min(rb, rl) >= 1.0 - 1e-12 and (prev is None or scaled <= prev + 1e-12)
            prev = scaled
        entry["p_shape"] = bool(shape_ok)
        entry["status"] = PASS if shape_ok else FAIL
        return entry

    entries = run_items(item, cfg.items(), threads)
    v_bmo, g_bmo = growth_verdict(sup_by_resolution(entries, "bmo_nesting"), cfg.growth_guard)
    v_blo, g_blo = growth_verdict(sup_by_resolution(entries, "blo_nesting"), cfg.growth_guard)
    verdicts = {
        "bmo_nesting_stable": v_bmo,
        "blo_nesting_stable": v_blo,
        "p_ratio_shape": _combine(e["status"] for e in entries),
    }
    report = _finish(cfg, entries, verdicts, started, timing)
    report.config = {**report.config, "sup_ratio_growth": _clean({"bmo": g_bmo, "blo": g_blo})}
    return report


# ------------------------------------------------------------ registry

_HALF = {"kind": "indicator", "dim": 1}
_MART = {"kind": MARTINGALE, "dim": 1, "params": {"step": 0.5}}
_SAW = {"kind": "sawtooth", "dim": 1, "params": {"frequency": 2}}

DEFAULT_CONFIGS: dict[str, ExperimentConfig] = {
    "jn_blo": ExperimentConfig("jn_blo", corpus=(_MART,), resolutions=(5, 6), beta=0.5, seed=7),
    "blo_boundedness": ExperimentConfig(
        "blo_boundedness",
        corpus=(_HALF, _MART, _SAW, {"kind": "log_abs", "dim": 1}),
        resolutions=(3, 4, 5, 6),
        alpha=0.5,
        beta=0.5,
        options={"contrast": True},
    ),
    "alpha0_counterexample": ExperimentConfig("alpha0_counterexample", beta=1.0, resolutions=(2, 3, 4, 5)),
    "beta_maximal_boundedness": ExperimentConfig(
        "beta_maximal_boundedness",
        corpus=(_HALF, _MART, _SAW),
        resolutions=(3, 4, 5, 6),
        beta=0.5,
        beta2=1.0,
    ),
    "sawyer_lp": ExperimentConfig(
        "sawyer_lp",
        corpus=({"kind": "indicator", "dim": 1, "params": {"lo": 0.0, "hi": 1.0}}, _HALF, _SAW),
        resolutions=(3, 4, 5, 6),
        alpha=0.25,
        p=2.0,
        options={"random_count": 50},
    ),
    "uniform_continuity": ExperimentConfig(
        "uniform_continuity",
        corpus=(_HALF, {"kind": "log_abs", "dim": 1}, _SAW),
        resolutions=(4, 5, 6, 7),
        alpha=0.5,
    ),
    "vmo_preservation": ExperimentConfig(
        "vmo_preservation",
        corpus=(_SAW, {"kind": "smoothed_indicator", "dim": 1}),
        resolutions=(6,),
        alpha=0.25,
        beta=0.75,
        options={"ladder": 4, "r_cells": 2},
    ),
    "nesting": ExperimentConfig(
        "nesting",
        corpus=(_HALF, _MART, _SAW),
        resolutions=(3, 4, 5),
        beta=0.5,
        beta2=1.0,
        options={"p_ladder": [1, 2, 4]},
    ),
}

SUITES: dict[str, Callable[..., Report]] = {
    "jn_blo": jn_blo_experiment,
    "blo_boundedness": blo_boundedness_experiment,
    "alpha0_counterexample": alpha0_counterexample,
    "beta_maximal_boundedness": beta_maximal_boundedness_experiment,
    "sawyer_lp": sawyer_lp_experiment,
    "uniform_continuity": uniform_continuity_experiment,
    "vmo_preservation": vmo_preservation_experiment,
    "nesting": nesting_experiment,
}


def default_config(suite: str) -> ExperimentConfig:
    try:
        return DEFAULT_CONFIGS[suite]
    except KeyError:
        raise ExperimentError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}") from None


def run_suite(cfg: ExperimentConfig, threads: int = 1, timing: bool = False) -> Report:
    try:
        fn = SUITES[cfg.suite]
    except KeyError:
        raise ExperimentError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}") from None
    return fn(cfg, threads=threads, timing=timing)
