"""``oscmax`` command line.

Exit status: 0 on success, 1 when a verification suite reports a failed
verdict, 2 on bad input (arguments, grid files, parameter ranges).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .choquet import choquet_integral, choquet_lp_norm
from .content import CellSet, content
from .corpus import CorpusSpec, generate
from .geometry import CENTERED, CONTAINED
from .grid import GridFunction, load_grid
from .maximal import beta_maximal, fractional_maximal, local_global_split
from .oscillation import blo_norm, bmo_norm, oscillation_modulus
from .verify import SUITES, default_config, run_suite

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscmax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, grid=True):
        if grid:
            p.add_argument("--grid", required=True, metavar="FILE", help="grid file (.json or .csv)")
        p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("content", help="dyadic Hausdorff content of the nonzero cells of a grid")
    p.add_argument("--beta", type=float, required=True)
    common(p)

    p = sub.add_parser("choquet", help="Choquet integral (and L^p norm) of |f| over the root")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--p", type=float, default=None)
    common(p)

    p = sub.add_parser("maximal", help="fractional (--alpha) or beta-dimensional (--beta) maximal function")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float)
    group.add_argument("--beta", type=float)
    p.add_argument("--family", choices=(CONTAINED, CENTERED), default=CONTAINED)
    p.add_argument("--kappa", type=float, help="split scale as a length; emits local and global parts")
    common(p)

    p = sub.add_parser("norm", help="BMO and BLO norms with witnesses")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--family", choices=(CONTAINED, CENTERED), default=CONTAINED)
    p.add_argument("--kind", choices=("bmo", "blo", "both"), default="both")
    common(p)

    p = sub.add_parser("modulus", help="oscillation modulus over windows of side at most r")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--r", type=float, required=True, help="largest window side, as a length")
    p.add_argument("--family", choices=(CONTAINED, CENTERED), default=CONTAINED)
    common(p)

    p = sub.add_parser("gen", help="generate a corpus function")
    p.add_argument("--spec", required=True, metavar="JSON", help="corpus spec as JSON text or a file path")
    p.add_argument("--resolutions", type=_int_list, help="resolution m (first entry is used)")
    p.add_argument("--seed", type=int)
    common(p, grid=False)

    p = sub.add_parser("verify", help="run an experiment suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--spec", metavar="JSON", help="corpus spec list (JSON text or file) replacing the default")
    p.add_argument("--resolutions", type=_int_list)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--lambda", dest="lambdas", type=_float_list)
    p.add_argument("--kappa", type=float)
    p.add_argument("--family", choices=(CONTAINED, CENTERED))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall-clock runtime in the report")
    common(p, grid=False)
    return parser


def _json_arg(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON spec: {exc}") from None


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _values_csv(values: np.ndarray) -> str:
    return GridFunction.from_flat(values.ravel(), values.ndim).to_csv() if values.ndim <= 2 else ""


def _cmd_content(args) -> int:
    f = load_grid(args.grid)
    cells = CellSet(f.domain, f.values != 0)
    value, cover = content(cells, args.beta)
    if args.format == "csv":
        _emit(args, f"content\n{value!r}")
    else:
        _emit(
            args,
            _dump(
                {
                    "beta": args.beta,
                    "content": value,
                    "cover": [{"level": q.level, "offset": list(q.offset)} for q in cover],
                }
            ),
        )
    return EXIT_OK


def _cmd_choquet(args) -> int:
    f = load_grid(args.grid).abs()
    out = {"beta": args.beta, "integral": choquet_integral(f, None, args.beta)}
    if args.p is not None:
        out["p"] = args.p
        out["lp_norm"] = choquet_lp_norm(f, None, args.p, args.beta)
    if args.format == "csv":
        keys = list(out)
        _emit(args, ",".join(keys) + "\n" + ",".join(repr(out[k]) for k in keys))
    else:
        _emit(args, _dump(out))
    return EXIT_OK


def _cmd_maximal(args) -> int:
    f = load_grid(args.grid)
    beta = args.beta
    if args.kappa is not None:
        if beta is None:
            loc, glob = local_global_split(f, args.kappa, args.alpha, args.family)
        else:
            loc, glob = local_global_split(f, args.kappa, 0.0, args.family, beta=beta)
        fields = {"local": loc.values, "global": glob.values}
    elif beta is None:
        fields = {"field": fractional_maximal(f, args.alpha, args.family).values}
    else:
        fields = {"field": beta_maximal(f, beta, args.family).values}
    if args.format == "csv":
        if len(fields) == 1:
            _emit(args, _values_csv(fields["field"]))
        else:
            rows = ["part,cell,value"]
            for name, vals in fields.items():
                rows += [f"{name},{i},{v!r}" for i, v in enumerate(vals.ravel())]
            _emit(args, "\n".join(rows))
    else:
        payload = {"domain": f.domain.to_json(), "family": args.family}
        payload.update({"alpha": args.alpha} if beta is None else {"beta": beta})
        if args.kappa is not None:
            payload["kappa"] = args.kappa
        payload.update({k: [float(x) for x in v.ravel()] for k, v in fields.items()})
        _emit(args, _dump(payload))
    return EXIT_OK


def _cmd_norm(args) -> int:
    f = load_grid(args.grid)
    reports = {}
    if args.kind in ("bmo", "both"):
        reports["bmo"] = bmo_norm(f, args.beta, args.p, args.family).to_json()
    if args.kind in ("blo", "both"):
        reports["blo"] = blo_norm(f, args.beta, args.p, args.family).to_json()
    if args.format == "csv":
        rows = ["kind,norm_value,witness_anchor,witness_side_cells,witness_c"]
        for kind, r in reports.items():
            w = r["witness_window"]
            anchor = " ".join(str(a) for a in w["anchor"])
            rows.append(f"{kind},{r['norm_value']!r},{anchor},{w['side_cells']},{r['witness_c']!r}")
        _emit(args, "\n".join(rows))
    else:
        _emit(args, _dump(reports))
    return EXIT_OK


def _cmd_modulus(args) -> int:
    f = load_grid(args.grid)
    value = oscillation_modulus(f, args.r, args.beta, args.p, args.family)
    if args.format == "csv":
        _emit(args, f"r,modulus\n{args.r!r},{value!r}")
    else:
        _emit(args, _dump({"beta": args.beta, "p": args.p, "r": args.r, "family": args.family, "modulus": value}))
    return EXIT_OK


def _cmd_gen(args) -> int:
    data = _json_arg(args.spec)
    if not isinstance(data, dict):
        raise UsageError("gen expects a single corpus spec object")
    spec = CorpusSpec.from_json(data)
    if args.resolutions:
        spec = spec.at(args.resolutions[0])
    if args.seed is not None:
        spec = CorpusSpec.from_json({**spec.to_json(), "params": {**spec.params, "seed": args.seed}})
    f = generate(spec)
    fmt = args.format
    if args.out and Path(args.out).suffix.lower() == ".csv":
        fmt = "csv"
    _emit(args, f.to_csv() if fmt == "csv" else json.dumps(f.to_json()))
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = default_config(args.suite)
    corpus = None
    if args.spec:
        data = _json_arg(args.spec)
        corpus = tuple(data if isinstance(data, list) else [data])
    cfg = cfg.with_overrides(
        corpus=corpus,
        resolutions=args.resolutions,
        seed=args.seed,
        alpha=args.alpha,
        beta=args.beta,
        beta2=args.beta2,
        p=args.p,
        lambdas=args.lambdas,
        kappa=args.kappa,
        family=args.family,
    )
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    report = run_suite(cfg, threads=args.threads, timing=args.timing)
    _emit(args, report.series_csv() if args.format == "csv" else report.dumps())
    return EXIT_OK if report.passed else EXIT_VERDICT


COMMANDS = {
    "content": _cmd_content,
    "choquet": _cmd_choquet,
    "maximal": _cmd_maximal,
    "norm": _cmd_norm,
    "modulus": _cmd_modulus,
    "gen": _cmd_gen,
    "verify": _cmd_verify,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"oscmax {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
