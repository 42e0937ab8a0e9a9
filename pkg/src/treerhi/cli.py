"""Command-line front end.

Subcommands: gen, analyze, verify, trace, p0, curve.  Exit codes: 0 on
success / all checks passing, 1 when a verification or trace assertion
fails, 2 on usage or input errors.  Reports echo the full run
configuration so runs are reproducible from the output alone.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import exponents, rearrange, trace as trace_mod, weight as weight_mod
from .tree import TreeSpace
from .weight import DyadicWeight

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _echo_config(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {k: str(v) if isinstance(v, Path) else v for k, v in config.items()}


def _write_report(path: str | None, doc: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args: argparse.Namespace) -> int:
    space = TreeSpace(args.k, args.depth)
    if args.kind == "constant":
        w = weight_mod.gen_constant(space, args.value)
    elif args.kind == "two-value":
        w = weight_mod.gen_two_value(space, args.first, args.second)
    elif args.kind == "random":
        w = weight_mod.gen_random(space, args.seed, args.low, args.high)
    else:
        w = weight_mod.gen_power(space, args.alpha)
    weight_mod.save_weight(w, args.output)
    print(f"wrote {space.n_leaves} leaves to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def analyze_weight(w: DyadicWeight, p: float) -> dict:
    k = w.space.k
    rhi = w.dyadic_rhi_constant(p)
    star = rearrange.rearrangement(w)
    prefix = rearrange.prefix_rhi_constant(star, p)
    bound = k * rhi.constant - k + 1.0
    report = {
        "k": k,
        "depth": w.space.depth,
        "p": p,
        "dyadic_constant": rhi.constant,
        "dyadic_witness": [rhi.witness.level, rhi.witness.index],
        "prefix_constant": prefix.constant,
        "prefix_witness_t": prefix.witness_t,
        "bound": bound,
        "margin": bound - prefix.constant,
        "p0_dyadic": exponents.p0_solve(p, max(rhi.constant, 1.0)).p0,
        "p0_bound": exponents.p0_solve(p, max(bound, 1.0)).p0,
    }
    if np.all(w.values > 0):
        muck = w.dyadic_muckenhoupt_constant(p)
        prefix_muck = rearrange.prefix_muckenhoupt_constant(star, p)
        report["muckenhoupt_constant"] = muck.constant
        report["muckenhoupt_witness"] = [muck.witness.level, muck.witness.index]
        report["prefix_muckenhoupt_constant"] = prefix_muck.constant
        report["muckenhoupt_bound"] = k * muck.constant - k + 1.0
    return report


def cmd_analyze(args: argparse.Namespace) -> int:
    w = weight_mod.load_weight(args.weight)
    report = analyze_weight(w, args.p)
    report["config"] = _echo_config(args)
    print(f"dyadic constant  c = {report['dyadic_constant']:.12g} "
          f"at node {tuple(report['dyadic_witness'])}")
    print(f"prefix constant    = {report['prefix_constant']:.12g} "
          f"at t = {report['prefix_witness_t']:.12g}")
    print(f"bound k*c-k+1      = {report['bound']:.12g}   "
          f"margin = {report['margin']:.12g}")
    print(f"p0 (dyadic c)      = {report['p0_dyadic']:.12g}")
    print(f"p0 (bound)         = {report['p0_bound']:.12g}")
    if "muckenhoupt_constant" in report:
        print(f"Muckenhoupt        = {report['muckenhoupt_constant']:.12g}   "
              f"prefix = {report['prefix_muckenhoupt_constant']:.12g}")
    _write_report(args.output, report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _corpus(count: int, seed: int, k_list: list[int], depth: int):
    """Deterministic stream of random weights cycling over k and depth."""
    for i in range(count):
        k = k_list[i % len(k_list)]
        d = 1 + (i * 7 + seed) % depth
        yield i, weight_mod.gen_random(TreeSpace(k, d), seed=seed + 1000 * i)


def _fail(args, index: int, w: DyadicWeight, detail: str) -> int:
    doc = {
        "config": _echo_config(args),
        "index": index,
        "weight": {
            "k": w.space.k,
            "depth": w.space.depth,
            "leaves": [float(v) for v in w.values],
        },
        "detail": detail,
    }
    print(f"FAIL at weight {index}: {detail}")
    print(json.dumps(doc))
    return EXIT_FAIL

def verify_theorem1(args) -> int:
    tol = args.tolerance
    for i, w in _corpus(args.count, args.seed, args.k, args.depth):
        star = rearrange.rearrangement(w)
        for p in args.p:
            c = w.dyadic_rhi_constant(p).constant
            bound = w.space.k * c - w.space.k + 1.0
            prefix = rearrange.prefix_rhi_constant(star, p).constant
            if prefix > bound * (1.0 + tol):
                return _fail(args, i, w, f"prefix {prefix} > bound {bound} at p={p}")
    print(f"theorem1: {args.count} weights x {len(args.p)} exponents, all bounded")
    return EXIT_OK


def verify_weaktype(args) -> int:
    for i, w in _corpus(args.count, args.seed, args.k, args.depth):
        lo, hi = float(w.values.min()), float(w.values.max())
        for lam in np.geomspace(max(lo, 1e-12) / 2.0, hi * 2.0, 20):
            result = w.weak_type_check(float(lam))
            if not result.holds:
                return _fail(
                    args, i, w,
                    f"weak type fails at lambda={lam}: {result.lhs} > {result.rhs}",
                )
    print(f"weaktype: {args.count} weights x 20 thresholds, all hold")
    return EXIT_OK


def verify_lemma(args) -> int:
    rng = np.random.default_rng(args.seed)
    checked = 0
    i = 0
    while checked < args.count:
        k = args.k[i % len(args.k)]
        d = 1 + (i * 7 + args.seed) % args.depth
        w = weight_mod.gen_random(TreeSpace(k, d), seed=args.seed + 1000 * i)
        i += 1
        t = float(rng.uniform(0.05, 1.0))
        top = trace_mod.build_top_set(w, t)
        threshold = top.average(w)
        maximal = w.maximal_function()
        if np.any(maximal > threshold):
            tr = trace_mod.trace_theorem1(w, args.p[0], t)
            e_hat = trace_mod.FractionalSet.union(
                w.space, [r.gamma for r in tr.records]
            )
        else:
            e_hat = top
        result = trace_mod.lemma21_check(w, top, e_hat, args.p[0])
        if not result.hypotheses_hold:
            continue
        checked += 1
        if not result.conclusion_holds:
            return _fail(
                args, i - 1, w,
                f"lemma conclusion fails: {result.lhs} > {result.rhs} at t={t}",
            )
    print(f"lemma: {checked} instances with valid hypotheses, all conclusions hold")
    return EXIT_OK


def verify_decomposition(args) -> int:
    t_grid = [0.1, 0.3, 0.5, 0.7, 0.9]
    for i, w in _corpus(args.count, args.seed, args.k, args.depth):
        for t in t_grid:
            for p in args.p:
                tr = trace_mod.trace_theorem1(w, p, t)
                if not tr.all_hold:
                    bad = [a.name for a in tr.assertions if not a.holds]
                    return _fail(args, i, w, f"assertions failed at t={t}, p={p}: {bad}")
    print(
        f"decomposition: {args.count} weights x {len(t_grid)} prefixes x "
        f"{len(args.p)} exponents, all assertions hold"
    )
    return EXIT_OK


VERIFY_SUITES = {
    "theorem1": verify_theorem1,
    "weaktype": verify_weaktype,
    "lemma": verify_lemma,
    "decomposition": verify_decomposition,
}


def cmd_verify(args: argparse.Namespace) -> int:
    if args.count <= 0:
        raise UsageError("count must be positive")
    if any(p <= 1 for p in args.p):
        raise UsageError("all exponents must be > 1")
    if any(k < 2 for k in args.k):
        raise UsageError("all branching factors must be >= 2")
    if args.depth < 1:
        raise UsageError("depth must be >= 1")
    return VERIFY_SUITES[args.suite](args)


# ---------------------------------------------------------------------------
# trace
# ---------------------------------------------------------------------------

def cmd_trace(args: argparse.Namespace) -> int:
    if not 0.0 < args.t <= 1.0:
        raise UsageError(f"t must lie in (0, 1], got {args.t}")
    w = weight_mod.load_weight(args.weight)
    tr = trace_mod.trace_theorem1(w, args.p, args.t)
    doc = tr.to_dict()
    doc["config"] = _echo_config(args)
    if args.output:
        Path(args.output).write_text(json.dumps(doc, indent=2) + "\n")
    branch = "degenerate" if tr.degenerate else f"{len(tr.fathers)} fathers"
    status = "all hold" if tr.all_hold else "ASSERTION FAILURES"
    print(f"threshold A = {tr.threshold:.12g}, {branch}, "
          f"{len(tr.assertions)} assertions: {status}")
    for a in tr.assertions:
        if not a.holds:
            print(f"  FAILED {a.name}: lhs={a.lhs!r} rhs={a.rhs!r}")
    return EXIT_OK if tr.all_hold else EXIT_FAIL


# ---------------------------------------------------------------------------
# p0 / curve
# ---------------------------------------------------------------------------

def cmd_p0(args: argparse.Namespace) -> int:
    result = exponents.improvement_range(args.p, args.c, args.k)
    if math.isinf(result.p0):
        print("p0 = infinity (effective constant 1)")
    else:
        print(f"p0 = {result.p0:.12g}  (effective constant {result.C:.12g}, "
              f"residual {result.residual:.3g})")
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    if args.samples < 2:
        raise UsageError("samples must be >= 2")
    w = weight_mod.load_weight(args.weight)
    star = rearrange.rearrangement(w)
    curve = rearrange.ratio_curve(star, args.p, args.samples)
    rearrange.write_curve_csv(args.output, curve)
    print(f"wrote {len(curve)} samples to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treerhi",
        description="Reverse-Holder constants on homogeneous trees, "
        "rearrangement prefix constants, and traced decompositions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a weight file")
    gen.add_argument("kind", choices=["constant", "two-value", "random", "power"])
    gen.add_argument("--k", type=int, default=2)
    gen.add_argument("--depth", type=int, default=4)
    gen.add_argument("--value", type=float, default=1.0, help="constant value")
    gen.add_argument("--first", type=float, default=1.0, help="two-value: first half")
    gen.add_argument("--second", type=float, default=2.0, help="two-value: second half")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--low", type=float, default=1e-3)
    gen.add_argument("--high", type=float, default=1e3)
    gen.add_argument("--alpha", type=float, default=0.25)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_gen)

    analyze = sub.add_parser("analyze", help="constants and bounds for a weight file")
    analyze.add_argument("weight")
    analyze.add_argument("--p", type=float, default=2.0)
    analyze.add_argument("-o", "--output")
    analyze.set_defaults(func=cmd_analyze)

    verify = sub.add_parser("verify", help="run a property suite on random weights")
    verify.add_argument("suite", choices=sorted(VERIFY_SUITES))
    verify.add_argument("--count", type=int, default=50)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--k", type=_int_list, default=[2, 4, 8],
                        help="comma-separated branching factors")
    verify.add_argument("--depth", type=int, default=5, help="maximum depth")
    verify.add_argument("--p", type=_float_list, default=[1.5, 2.0, 3.0],
                        help="comma-separated exponents")
    verify.add_argument("--tolerance", type=float, default=1e-9)
    verify.set_defaults(func=cmd_verify)

    tr = sub.add_parser("trace", help="trace the decomposition for a weight file")
    tr.add_argument("weight")
    tr.add_argument("--p", type=float, default=2.0)
    tr.add_argument("--t", type=float, required=True)
    tr.add_argument("-o", "--output")
    tr.set_defaults(func=cmd_trace)

    p0 = sub.add_parser("p0", help="self-improvement exponent for (p, c, k)")
    p0.add_argument("--p", type=float, required=True)
    p0.add_argument("--c", type=float, required=True)
    p0.add_argument("--k", type=int, default=2)
    p0.set_defaults(func=cmd_p0)

    curve = sub.add_parser("curve", help="prefix-ratio curve CSV for a weight file")
    curve.add_argument("weight")
    curve.add_argument("--p", type=float, default=2.0)
    curve.add_argument("--samples", type=int, default=200)
    curve.add_argument("-o", "--output", required=True)
    curve.set_defaults(func=cmd_curve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
