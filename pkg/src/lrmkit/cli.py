"""Command-line front end.

Exit codes: 0 success, 1 contract/range/structure error, 2 I/O error
(unreadable file, malformed integers, bad or version-mismatched container).
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .arrayio import InputError, format_array, read_array, write_array
from .container import TAG_PERMCODE, ContainerError, read_file, write_file
from .counters import OpCounter
from .errors import ContractError, LRMKitError
from .lrm import ranks, run_heads
from .partition_sort import measures, sort_lrm, sort_runs_baseline
from .permcode import PermCode, encode
from .rmq import RunsRMQIndex, build_plain, build_runs, build_strict_runs, load_index

EXIT_OK, EXIT_CONTRACT, EXIT_IO = 0, 1, 2


def default_seed() -> int:
    raw = os.environ.get("LRMKIT_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ContractError(f"LRMKIT_SEED must be an integer, got {raw!r}") from None


def generate(n: int, runs: int, seed: int) -> tuple[list[int], int]:
    """Permutation of 1..n with exactly ``runs`` ascending runs; returns (values, achieved).

    Cut points are drawn uniformly without replacement. Values are then
    assigned by an integer walk that steps up by a random positive amount
    inside a block and down at every cut; ranking the walk (ties broken by
    position) gives the permutation. Neighbouring walk values always differ,
    so the descents are exactly the cuts.
    """
    if n < 1 or not 1 <= runs <= n:
        raise ContractError(f"need 1 <= runs <= n, got n={n}, runs={runs}")
    rng = np.random.default_rng(seed)
    sign = np.ones(n - 1, dtype=np.int64)
    if runs > 1:
        sign[rng.choice(n - 1, size=runs - 1, replace=False)] = -1
    steps = rng.integers(1, n + 1, size=n - 1) * sign
    walk = np.concatenate([[0], np.cumsum(steps)])
    vals = ranks(walk)
    achieved = int(run_heads(vals).sum())
    return vals.tolist(), achieved


def _emit_json(obj, out=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_table(d: dict) -> None:
    width = max(len(k) for k in d)
    for k, v in d.items():
        print(f"{k:<{width}}  {v:.4f}" if isinstance(v, float) else f"{k:<{width}}  {v}")


def sort_report(A: Sequence[int], algo: str) -> tuple[list[int], dict]:
    out, st = (sort_lrm if algo == "lrm" else sort_runs_baseline)(A)
    report = measures(A).as_dict() if len(A) else {
        "n": 0, "rho": 0, "rho_strict": 0, "n_sus": 0, "h_runs": 0.0, "h_lrm": 0.0}
    report.update(
        algo=algo,
        cmp_build=st.cmp_build,
        cmp_merge=st.cmp_merge,
        cmp_total=st.cmp_total,
        internal_ops=st.internal_ops,
        max_leaf_depth=st.max_leaf_depth,
    )
    return out, report


def _spearman(x: Sequence[float], y: Sequence[float]) -> float:
    from scipy.stats import spearmanr

    if len(x) < 2 or len(set(x)) < 2 or len(set(y)) < 2:
        return float("nan")
    return float(spearmanr(x, y).statistic)


def bench_point(n: int, runs: int, seed: int, queries: int) -> dict:
    A, achieved = generate(n, runs, seed)
    m = measures(A).as_dict()
    _, lrm = sort_lrm(A)
    _, base = sort_runs_baseline(A)
    rng = np.random.default_rng([seed, runs, 1])
    ii = rng.integers(1, n + 1, size=queries)
    jj = rng.integers(1, n + 1, size=queries)
    lo, hi = np.minimum(ii, jj), np.maximum(ii, jj)
    plain = build_plain(A)
    strict = build_strict_runs(A)
    systematic = build_runs(A)
    plain.query_many(lo, hi)
    for i, j in zip(lo.tolist(), hi.tolist()):
        strict.query(i, j)
    qc = OpCounter()
    for i, j in zip(lo.tolist(), hi.tolist()):
        systematic.query(A, i, j, qc)
    code = encode(A)
    return {
        "input": {"n": n, "seed": seed, "requested_rho": runs, "achieved_rho": achieved},
        "measures": m,
        "counters": {
            "cmp_build": lrm.cmp_build,
            "cmp_merge": lrm.cmp_merge,
            "cmp_total": lrm.cmp_total,
            "internal_ops": lrm.internal_ops,
            "max_leaf_depth": lrm.max_leaf_depth,
            "runs_baseline_cmp_total": base.cmp_total,
            "queries": queries,
            "data_accesses": {"plain": 0, "strict_runs": 0, "runs": qc.accesses},
            "data_comparisons": {"plain": 0, "strict_runs": 0, "runs": qc.comparisons},
        },
        "sizes": {
            "rmq_plain": plain.size_report(),
            "rmq_strict_runs": strict.size_report(),
            "rmq_runs": systematic.size_report(),
            "permcode": code.size_report(),
        },
    }


def bench(n: int, seed: int, queries: int, runs: Optional[list[int]] = None, meta: bool = True) -> dict:
    if runs is None:
        runs = []
        r = 1
        while r < n:
            runs.append(r)
            r *= 2
        runs.append(n)
    points = [bench_point(n, r, seed, queries) for r in runs]
    h = [p["measures"]["h_lrm"] for p in points]
    c = [p["counters"]["cmp_total"] for p in points]
    rho_s = _spearman(h, c)
    report = {
        "points": points,
        "trend": {
            "spearman_h_lrm_cmp_total": None if rho_s != rho_s else rho_s,
            "sweep_points": len(points),
            "ok": bool(len(points) >= 8 and rho_s > 0.9),
        },
    }
    if meta:
        report["meta"] = {
            "version": __version__,
            "python": platform.python_version(),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
    return report


# ----------------------------------------------------------------------
# argument handling


def _cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    vals, achieved = generate(args.n, args.runs, seed)
    if args.out:
        write_array(args.out, vals)
    else:
        sys.stdout.write(format_array(vals))
    print(f"n={args.n} requested_rho={args.runs} achieved_rho={achieved} seed={seed}", file=sys.stderr)
    return EXIT_OK


def _cmd_stats(args) -> int:
    A = read_array(args.input)
    if not A:
        raise ContractError("stats need at least one value")
    _emit_json(measures(A).as_dict())
    return EXIT_OK


def _cmd_sort(args) -> int:
    A = read_array(args.input)
    out, report = sort_report(A, args.algo)
    if args.out:
        write_array(args.out, out)
    else:
        sys.stdout.write(format_array(out))
    if args.stats:
        _emit_json(report, args.stats)
    return EXIT_OK


_BUILDERS = {"plain": build_plain, "sruns": build_strict_runs, "runs": build_runs}


def _cmd_rmq_build(args) -> int:
    idx = _BUILDERS[args.index](read_array(args.input))
    write_file(args.out, idx.to_writer())
    return EXIT_OK


def _cmd_rmq_query(args) -> int:
    idx = load_index(read_file(args.idx))
    if isinstance(idx, RunsRMQIndex):
        if not args.data:
            raise ContractError("the runs index is systematic: pass the array with --data")
        print(idx.query(read_array(args.data), args.i, args.j))
    else:
        print(idx.query(args.i, args.j))
    return EXIT_OK


def _load_code(path: str) -> PermCode:
    return PermCode.from_reader(read_file(path, TAG_PERMCODE))


def _cmd_perm_encode(args) -> int:
    code = encode(read_array(args.input), with_psv_rmq=args.with_index)
    write_file(args.out, code.to_writer())
    return EXIT_OK


def _cmd_perm_apply(args) -> int:
    print(_load_code(args.code).apply(args.i))
    return EXIT_OK


def _cmd_perm_inverse(args) -> int:
    print(_load_code(args.code).inverse(args.v))
    return EXIT_OK


def _cmd_perm_size(args) -> int:
    rep = _load_code(args.code).size_report()
    if args.json:
        _emit_json(rep)
    else:
        _emit_table(rep)
    return EXIT_OK


def _cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    rep = bench(args.n, seed, args.queries, args.runs, meta=not args.no_meta)
    if args.json:
        _emit_json(rep, args.out)
    else:
        for p in rep["points"]:
            inp, m, c = p["input"], p["measures"], p["counters"]
            print(f"rho={inp['achieved_rho']:>8}  h_lrm={m['h_lrm']:.4f}  cmp_total={c['cmp_total']}")
        print(f"spearman(h_lrm, cmp_total)={rep['trend']['spearman_h_lrm_cmp_total']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrmkit", description="LRM-trees: sorting, RMQ indices, compressed permutations.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a permutation with a given number of runs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="default: $LRMKIT_SEED or 0")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("stats", help="disorder measures of an array (JSON)")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("sort", help="sort an array and report comparison counts")
    p.add_argument("--algo", choices=["lrm", "runs"], default="lrm")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--stats", help="write the stats JSON here")
    p.set_defaults(func=_cmd_sort)

    rmq = sub.add_parser("rmq", help="range-minimum indices").add_subparsers(dest="rmq_command", required=True)
    p = rmq.add_parser("build")
    p.add_argument("--index", choices=sorted(_BUILDERS), default="plain")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rmq_build)
    p = rmq.add_parser("query")
    p.add_argument("--idx", required=True)
    p.add_argument("--data")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p.set_defaults(func=_cmd_rmq_query)

    perm = sub.add_parser("perm", help="compressed permutations").add_subparsers(dest="perm_command", required=True)
    p = perm.add_parser("encode")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--with-index", action="store_true", help="keep the LRM-tree for PSV/RMQ queries")
    p.set_defaults(func=_cmd_perm_encode)
    p = perm.add_parser("apply")
    p.add_argument("--code", required=True)
    p.add_argument("i", type=int)
    p.set_defaults(func=_cmd_perm_apply)
    p = perm.add_parser("inverse")
    p.add_argument("--code", required=True)
    p.add_argument("v", type=int)
    p.set_defaults(func=_cmd_perm_inverse)
    p = perm.add_parser("size")
    p.add_argument("--code", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_perm_size)

    p = sub.add_parser("bench", help="sweep the run count and report counters and sizes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="default: $LRMKIT_SEED or 0")
    p.add_argument("--runs", type=int, nargs="*", default=None, help="explicit run counts (default 1, 2, 4, ..., n)")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-meta", action="store_true", help="omit version and timestamp")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, UnicodeDecodeError, InputError, ContainerError) as exc:
        print(f"lrmkit: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LRMKitError as exc:
        print(f"lrmkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
