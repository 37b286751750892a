"""Command-line front end.

    haargreedy run fN:6 --s 3/4 --t 1/2
    haargreedy diverge s1 --k 16 --eps 1/96
    haargreedy diverge st --N 64 --t 1/2 --eps 1/32
    haargreedy walsh --N 16 --u 2/5 --t 1/2
    haargreedy verify --suite norm-lemmas --trials 500

Exit status: 0 success, 1 a checked inequality failed, 2 usage error,
3 unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import constructions as cons
from .greedy import GreedyParams, run
from .haar import HaarExpansion, norm
from .serialization import (
    decimal,
    dumps,
    expansion_from_dict,
    rational_to_str,
    trace_to_csv,
    trace_to_jsonl,
)
from .verify import SUITES, check_uniform_bound, run_suite, summarize, uniform_bound_constant

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _fmt(x: Fraction) -> str:
    return f"{rational_to_str(x)} (~{decimal(x)})"


def load_input(source: str) -> HaarExpansion:
    """Named construction (``fN:6``, ``fNeps:32:1/96``, ``gNeps:64:1/32:1/2``,
    ``rademacher:16:2/5``, ``zero:2``) or a path to an expansion JSON file."""
    head, _, rest = source.partition(":")
    args = rest.split(":") if rest else []
    builders = {
        "fN": (cons.build_f_N, (int,)),
        "fNeps": (cons.build_f_N_eps, (int, Fraction)),
        "gNeps": (cons.build_g_N_eps, (int, Fraction, Fraction)),
        "rademacher": (cons.build_rademacher_product, (int, Fraction)),
        "zero": (HaarExpansion, (int,)),
    }
    if head in builders:
        build, types = builders[head]
        if len(args) != len(types):
            raise InputError(f"{head} takes {len(types)} argument(s), got {len(args)}")
        try:
            return build(*(tp(a) for tp, a in zip(types, args)))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad construction {source!r}: {exc}") from exc
    path = Path(source)
    try:
        return expansion_from_dict(json.loads(path.read_text()))
    except OSError as exc:
        raise InputError(f"cannot read {source!r}: {exc.strerror or exc}") from exc
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot parse {source!r}: {exc}") from exc


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _wants(fmt: str, kind: str) -> bool:
    return fmt in (kind, "both")


def _params(parser: argparse.ArgumentParser, **kwargs: Any) -> GreedyParams:
    try:
        return GreedyParams(**kwargs)
    except ValueError as exc:
        parser.error(str(exc))
        raise  # unreachable


# -- commands -------------------------------------------------------------


def cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params(parser, s=args.s, t=args.t, variant=args.variant, max_steps=args.max_steps)
    f = load_input(args.input)
    trace = run(f, params)
    if _wants(args.format, "json"):
        _write(args.out, "trace.jsonl", trace_to_jsonl(trace))
    if _wants(args.format, "csv"):
        _write(args.out, "trace.csv", trace_to_csv(trace))

    base = trace.initial_norm
    print(f"steps: {len(trace.steps)}  terminated: {trace.terminated}")
    print(f"norm of f: {_fmt(base)}")
    if trace.final is not None:
        print(f"final residual norm: {_fmt(norm(trace.final.residual))}")
    if not base:
        print("max approximant ratio: n/a (f = 0)")
        return EXIT_OK
    ratio = trace.max_approximant_norm() / base
    if params.boundary:
        print(f"max approximant ratio: {_fmt(ratio)}  bound: n/a (s = 1 or s = t)")
        return EXIT_OK
    bound = uniform_bound_constant(f.dim, params.s, params.t)
    print(f"max approximant ratio: {_fmt(ratio)}  bound: {_fmt(bound)}")
    return EXIT_OK if check_uniform_bound(trace).holds else EXIT_FAIL


def cmd_diverge(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    t = args.t
    try:
        if args.which == "s1":
            k = args.k
            if k < 1:
                parser.error("--k must be positive")
            eps = args.eps if args.eps is not None else Fraction(1, 6 * k)
            f = cons.build_f_N_eps(2 * k, eps)
            params = _params(parser, s=1, t=t)
            steps = 3 * k + 1
            expected = cons.f_N_eps_greedy_closed_form(2 * k)
            lower = Fraction(k, 1) / (8 * (1 + 3 * k * eps))
            label = {"k": k, "N": 2 * k}
        else:
            N = args.N
            if N < 1:
                parser.error("--N must be positive")
            eps = args.eps if args.eps is not None else Fraction(2, N)
            f = cons.build_g_N_eps(N, eps, t)
            params = _params(parser, s=t, t=t)
            steps = 2 * N + 1
            expected = cons.g_N_eps_greedy_closed_form(N, t)
            lower = N * t / (2 * (1 + t + N * t * eps))
            label = {"N": N}
    except ValueError as exc:
        parser.error(str(exc))
    trace = run(f, GreedyParams(params.s, params.t, params.variant, max_steps=steps))
    G = trace.approximant()
    ratio = norm(G) / norm(f)
    holds = ratio >= lower
    report = {
        "which": args.which,
        **label,
        "eps": rational_to_str(eps),
        "s": rational_to_str(params.s),
        "t": rational_to_str(params.t),
        "steps": len(trace.steps),
        "ratio": rational_to_str(ratio),
        "ratio_decimal": decimal(ratio),
        "lower_bound": rational_to_str(lower),
        "lower_bound_decimal": decimal(lower),
        "closed_form_matches": G == expected,
        "holds": holds,
    }
    if _wants(args.format, "json"):
        _write(args.out, f"diverge-{args.which}.json", dumps(report) + "\n")
    if _wants(args.format, "csv"):
        _write(args.out, f"diverge-{args.which}.csv", _csv_rows([list(report), list(report.values())]))
    print(f"{args.which}: steps {len(trace.steps)}, closed form matches: {G == expected}")
    print(f"ratio {_fmt(ratio)} >= lower bound {_fmt(lower)}: {holds}")
    return EXIT_OK if holds else EXIT_FAIL


def cmd_walsh(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    N, u, t = args.N, args.u, args.t
    if N < 1:
        parser.error("--N must be positive")
    if not 0 < u < t < 1:
        parser.error("need 0 < u < t < 1")
    values = cons.rademacher_product_values(N, u)
    product_norm = sum((abs(v) for v in values), Fraction(0)) / len(values)
    coeffs = cons.walsh_coefficients(values)
    chosen = cons.forced_weak_greedy_set(coeffs, N + 1, t)
    approximant = {a: coeffs[a] for a in chosen}
    g_norm = cons.walsh_synthesis_l1(approximant, N)
    direct = norm(cons.rademacher_sum(N, u))
    kh = cons.khinchine_l1(N)
    lower = u * kh - 1
    holds = g_norm == direct and g_norm >= lower
    report = {
        "N": N,
        "u": rational_to_str(u),
        "t": rational_to_str(t),
        "product_norm": rational_to_str(product_norm),
        "approximant_norm": rational_to_str(g_norm),
        "approximant_norm_decimal": decimal(g_norm),
        "khinchine_l1": rational_to_str(kh),
        "khinchine_over_sqrt_n": f"{float(kh) / math.sqrt(N):.17g}",
        "lower_bound": rational_to_str(lower),
        "lower_bound_decimal": decimal(lower),
        "holds": holds,
    }
    if _wants(args.format, "json"):
        _write(args.out, "walsh.json", dumps(report) + "\n")
    if _wants(args.format, "csv"):
        _write(args.out, "walsh.csv", _csv_rows([list(report), list(report.values())]))
    print(f"norm of product: {_fmt(product_norm)}")
    print(f"norm of G_{N + 1}: {_fmt(g_norm)}  (direct: {rational_to_str(direct)})")
    print(f"khinchine_l1({N}) = {_fmt(kh)}, over sqrt(N): {report['khinchine_over_sqrt_n']}")
    print(f"lower bound u*khinchine - 1 = {_fmt(lower)}: {holds}")
    return EXIT_OK if holds else EXIT_FAIL


def _csv_rows(rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        parser.error(f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}")
    if args.trials < 1:
        parser.error("--trials must be positive")
    verdicts = run_suite(args.suite, args.trials, args.seed, jobs=args.jobs)
    rows = summarize(verdicts)
    failures = [v for v in verdicts if not v.holds]
    if _wants(args.format, "json"):
        _write(args.out, "verdicts.jsonl", "".join(dumps(v.to_dict()) + "\n" for v in verdicts))
    if _wants(args.format, "csv"):
        _write(args.out, "summary.csv", _csv_rows([["lemma_id", "trials", "failures"], *map(list, rows)]))
    if failures:
        _write(args.out, "failures.jsonl", "".join(dumps(v.to_dict()) + "\n" for v in failures))
    width = max(len(r[0]) for r in rows)
    for lemma_id, trials, failed in rows:
        print(f"{lemma_id:<{width}}  trials {trials:>6}  failures {failed}")
    return EXIT_FAIL if failures else EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="directory for output files")
    common.add_argument("--format", choices=("json", "csv", "both"), default="both")

    parser = argparse.ArgumentParser(prog="haargreedy", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run the greedy algorithm on one expansion")
    p.add_argument("input", help="named construction or expansion JSON file")
    p.add_argument("--s", type=rational, default=Fraction(3, 4))
    p.add_argument("--t", type=rational, default=Fraction(1, 2))
    p.add_argument("--variant", type=str.upper, choices=("A", "B"), default="A")
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("diverge", parents=[common], help="boundary-case divergence demos")
    p.add_argument("which", choices=("s1", "st"))
    p.add_argument("--k", type=int, default=16, help="half the depth for s1")
    p.add_argument("--N", type=int, default=64, help="depth for st")
    p.add_argument("--eps", type=rational, default=None)
    p.add_argument("--t", type=rational, default=Fraction(1, 2))
    p.set_defaults(handler=cmd_diverge)

    p = sub.add_parser("walsh", parents=[common], help="Rademacher product experiment")
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--u", type=rational, default=Fraction(2, 5))
    p.add_argument("--t", type=rational, default=Fraction(1, 2))
    p.set_defaults(handler=cmd_walsh)

    p = sub.add_parser("verify", parents=[common], help="run a randomized verification suite")
    p.add_argument("--suite", default="all", help=f"all, {', '.join(SUITES)}")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", default="0")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
