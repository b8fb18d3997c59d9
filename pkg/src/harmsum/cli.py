"""Command line interface.

Subcommands cover term generation, the exact minimum searches and their
published-table reproductions, the cosine-product kernel and its limit,
the limiting density, finite-range inequality scans, and Monte Carlo
comparison. Output formats: tsv (default, '#'-prefixed header), json
(canonical key order, big integers as decimal strings), and bfile
("index value" pairs, no header).

Exit codes: 0 success, 2 usage or domain error, 3 cap or resource limit,
4 numerical truncation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analytic import (
    check_decay,
    cosine_product,
    cosine_product_limit,
    density,
    exponential_bound_suite,
    sandwich_suite,
)
from .errors import (
    CapExceeded,
    DivergedTruncation,
    InvalidSpec,
    Overflow,
    RangeUnreachable,
    ResourceLimit,
    TruncationFailure,
)
from .exact import decay_profile, min_gap, min_signed_sum, parse_exact, two_stage_for_n
from .montecarlo import SimulationConfig, histogram, simulate
from .sequences import SequenceSpec, generate, terms_array

EMITS = ("tsv", "json", "bfile")


@dataclass(frozen=True)
class RunConfig:
    emit: str
    force: bool
    minsum_cap: int | None
    gap_cap: int | None
    memory_gib: float
    threads: int | None  # reserved; all operations are deterministic single-thread


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must fit in 64 unsigned bits, got {text}")
    return value


def _spec_from_args(args) -> SequenceSpec:
    kind = args.kind
    if kind == "pk":
        return SequenceSpec.k_squarefree(args.k if args.k else 1)
    if kind == "omega-k":
        return SequenceSpec.k_distinct(args.k if args.k else 1)
    if kind == "ap":
        return SequenceSpec.arithmetic(args.a, args.q)
    if kind == "custom":
        if not args.values:
            raise ValueError("custom sequences need --values")
        return SequenceSpec.custom(int(v) for v in args.values.split(","))
    if kind == "nonprimes":
        return SequenceSpec.nonprimes()
    return SequenceSpec.primes()


def _jnum(x: float):
    return x if math.isfinite(x) else repr(x)


def _emit_pairs(emit: str, pairs, bfile_row=None) -> None:
    """One record of (key, value) pairs in canonical order."""
    if emit == "json":
        print(json.dumps(dict(pairs)))
    elif emit == "bfile":
        if bfile_row is None:
            raise ValueError("bfile output is not available for this subcommand")
        print(f"{bfile_row[0]} {bfile_row[1]}")
    else:
        for key, value in pairs:
            print(f"{key}\t{value}")


def _emit_table(emit: str, header, rows, json_key: str, bfile_cols=None) -> None:
    """Many records with a fixed column layout."""
    if emit == "json":
        print(json.dumps({json_key: [dict(zip(header, r)) for r in rows]}))
    elif emit == "bfile":
        if bfile_cols is None:
            raise ValueError("bfile output is not available for this subcommand")
        i, j = bfile_cols
        for r in rows:
            print(f"{r[i]} {r[j]}")
    else:
        print("# " + "\t".join(header))
        for r in rows:
            print("\t".join(str(v) for v in r))


def _search_pairs(res) -> list:
    return [
        ("n", res.n),
        ("scaled_num", str(res.scaled_num)),
        ("den", str(res.den)),
        ("witness", str(res.witness)),
        ("tau", str(res.tau)),
    ]


def cmd_seq(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    terms = generate(spec, args.n).terms
    if rc.emit == "json":
        print(json.dumps({"kind": spec.label(), "n": len(terms), "terms": [str(t) for t in terms]}))
    else:
        rows = [(i + 1, t) for i, t in enumerate(terms)]
        _emit_table(rc.emit, ("index", "term"), rows, "terms", bfile_cols=(0, 1))
    return 0


def cmd_minsum(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    tau = parse_exact(args.tau)
    res = min_signed_sum(
        generate(spec, args.n),
        tau,
        cap=rc.minsum_cap,
        force=rc.force,
        memory_gib=rc.memory_gib,
    )
    _emit_pairs(rc.emit, _search_pairs(res), bfile_row=(res.n, res.scaled_num))
    return 0


def cmd_gap(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    res = min_gap(
        generate(spec, args.n), cap=rc.gap_cap, force=rc.force, memory_gib=rc.memory_gib
    )
    pairs = [
        ("n", res.n),
        ("scaled_num", str(res.scaled_num)),
        ("den", str(res.den)),
        ("witness", str(res.witness)),
    ]
    _emit_pairs(rc.emit, pairs, bfile_row=(res.n, res.scaled_num))
    return 0


def cmd_table1(args, rc: RunConfig) -> int:
    terms = generate(SequenceSpec.primes(), args.upto)
    rows = []
    for n in range(1, args.upto + 1):
        res = min_signed_sum(
            terms.prefix(n), 0, cap=rc.minsum_cap, force=rc.force, memory_gib=rc.memory_gib
        )
        rows.append((n, str(res.scaled_num)))
    _emit_table(rc.emit, ("n", "scaled_minimum"), rows, "rows", bfile_cols=(0, 1))
    return 0


def cmd_table3(args, rc: RunConfig) -> int:
    terms = generate(SequenceSpec.primes(), args.upto)
    rows = []
    for n in range(1, args.upto + 1):
        res = min_gap(terms.prefix(n), cap=rc.gap_cap, force=rc.force, memory_gib=rc.memory_gib)
        rows.append((n, str(res.scaled_num)))
    _emit_table(rc.emit, ("n", "scaled_gap"), rows, "rows", bfile_cols=(0, 1))
    return 0


def cmd_decay(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    tau = parse_exact(args.tau)
    terms = generate(spec, args.hi)
    profile = decay_profile(
        terms,
        range(args.lo, args.hi + 1),
        tau,
        cap=rc.minsum_cap,
        force=rc.force,
        memory_gib=rc.memory_gib,
    )
    rows = [
        (
            r.n,
            str(r.scaled_num),
            str(r.den),
            str(r.value),
            _jnum(r.log_value),
            _jnum(r.ref_log_sq),
            _jnum(r.ref_power),
        )
        for r in profile.rows
    ]
    header = ("n", "scaled_num", "den", "value", "log_value", "ref_log_sq", "ref_power")
    if rc.emit == "json":
        print(
            json.dumps(
                {
                    "slope": _jnum(profile.slope),
                    "intercept": _jnum(profile.intercept),
                    "r_squared": _jnum(profile.r_squared),
                    "rows": [dict(zip(header, r)) for r in rows],
                }
            )
        )
    elif rc.emit == "bfile":
        raise ValueError("bfile output is not available for this subcommand")
    else:
        print("# " + "\t".join(header))
        for r in rows:
            print("\t".join(str(v) for v in r))
        print(f"# slope={profile.slope!r} intercept={profile.intercept!r} r_squared={profile.r_squared!r}")
    return 0


def cmd_two_stage(args, rc: RunConfig) -> int:
    tau = parse_exact(args.tau)
    res = two_stage_for_n(
        args.n, tau, cap=rc.minsum_cap, force=rc.force, memory_gib=rc.memory_gib
    )
    if rc.emit == "json":
        print(
            json.dumps(
                {
                    "tau": str(tau),
                    "refined_target": str(res.refined_target),
                    "residual": str(res.residual),
                    "first": dict(_search_pairs(res.first)),
                    "second": dict(_search_pairs(res.second)),
                }
            )
        )
    elif rc.emit == "bfile":
        raise ValueError("bfile output is not available for this subcommand")
    else:
        pairs = [("tau", tau), ("refined_target", res.refined_target), ("residual", res.residual)]
        pairs += [("first." + k, v) for k, v in _search_pairs(res.first)]
        pairs += [("second." + k, v) for k, v in _search_pairs(res.second)]
        _emit_pairs("tsv", pairs)
    return 0


def cmd_rho(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    if args.n is not None:
        rv = cosine_product(terms_array(spec, args.n), args.x)
        pairs = [("x", _jnum(rv.x)), ("n", rv.n), ("value", _jnum(rv.value))]
        _emit_pairs(rc.emit, pairs)
    else:
        if args.eps is None:
            raise ValueError("need --n for the finite kernel or --eps for the limit")
        rv = cosine_product_limit(spec, args.x, args.eps)
        pairs = [
            ("x", _jnum(rv.x)),
            ("eps", _jnum(args.eps)),
            ("value", _jnum(rv.value)),
            ("tail_bound", _jnum(rv.tail_bound)),
            ("terms_used", rv.terms_used),
        ]
        _emit_pairs(rc.emit, pairs)
    return 0


def cmd_density(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    if args.grid:
        try:
            lo_s, hi_s, steps_s = args.grid.split(":")
            lo, hi, steps = float(lo_s), float(hi_s), int(steps_s)
        except ValueError:
            raise ValueError("--grid expects lo:hi:steps")
        if steps < 2 or not lo < hi:
            raise ValueError("--grid expects lo < hi and steps >= 2")
        rows = []
        for x in np.linspace(lo, hi, steps):
            d = density(spec, float(x), args.eps)
            rows.append((_jnum(d.x), _jnum(d.g), _jnum(d.quadrature_error_estimate)))
        _emit_table(rc.emit, ("x", "g", "quadrature_error_estimate"), rows, "rows")
    else:
        d = density(spec, args.x, args.eps)
        pairs = [
            ("x", _jnum(d.x)),
            ("eps", _jnum(args.eps)),
            ("g", _jnum(d.g)),
            ("quadrature_error_estimate", _jnum(d.quadrature_error_estimate)),
            ("truncation_m", d.truncation_m),
            ("truncation_u", _jnum(d.truncation_u)),
        ]
        _emit_pairs(rc.emit, pairs)
    return 0


def cmd_check(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    if args.bound == "exp":
        report = exponential_bound_suite(
            terms_array(spec, args.n), pairs=args.pairs, seed=args.seed, x_max=args.x_max
        )
    elif args.bound == "sandwich":
        report = sandwich_suite(
            terms_array(spec, args.n), pairs=args.pairs, seed=args.seed, x_max=args.x_max
        )
    else:
        report = check_decay(
            spec, args.n, args.alpha, args.grid, c_prime=args.c_prime, x_cap=args.x_cap
        )
    payload = {
        "bound": args.bound,
        "a": report.a,
        "x_lo": _jnum(report.x_lo),
        "x_hi": _jnum(report.x_hi),
        "samples": report.samples,
        "violations": [_jnum(v) for v in report.violations],
        "passed": report.passed,
        "c_prime": report.c_prime,
        "c_prime_defaulted": report.c_prime_defaulted,
    }
    if rc.emit == "bfile":
        raise ValueError("bfile output is not available for this subcommand")
    if rc.emit == "tsv":
        for key, value in payload.items():
            print(f"{key}\t{value}")
    else:
        print(json.dumps(payload))
    return 0


def cmd_mc(args, rc: RunConfig) -> int:
    spec = _spec_from_args(args)
    config = SimulationConfig(
        spec=spec, n=args.n, samples=args.samples, seed=args.seed, interval=(args.lo, args.hi)
    )
    if args.bins:
        rows = [
            (_jnum(r.center), _jnum(r.empirical), _jnum(r.expected))
            for r in histogram(config, args.bins, eps=args.eps)
        ]
        _emit_table(rc.emit, ("center", "empirical", "expected"), rows, "bins")
    else:
        rep = simulate(config, eps=args.eps)
        pairs = [
            ("empirical_prob", _jnum(rep.empirical_prob)),
            ("predicted", _jnum(rep.predicted)),
            ("standard_error", _jnum(rep.standard_error)),
            ("z_score", _jnum(rep.z_score)),
            ("sample_mean", _jnum(rep.sample_mean)),
            ("sample_variance", _jnum(rep.sample_variance)),
        ]
        _emit_pairs(rc.emit, pairs)
    return 0


def _add_seq_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--kind",
        choices=("primes", "pk", "omega-k", "nonprimes", "ap", "custom"),
        default="primes",
        help="denominator sequence family",
    )
    p.add_argument("--k", type=_positive_int, help="prime-factor count for pk / omega-k")
    p.add_argument("--a", type=_positive_int, default=1, help="first term for --kind ap")
    p.add_argument("--q", type=_positive_int, default=1, help="common difference for --kind ap")
    p.add_argument("--values", help="comma separated terms for --kind custom")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--emit", choices=EMITS, default="tsv", help="output format")
    p.add_argument("--force", action="store_true", help="lift the default size caps")
    p.add_argument("--minsum-cap", type=_positive_int, help="override the minimum-search cap")
    p.add_argument("--gap-cap", type=_positive_int, help="override the gap-search cap")
    p.add_argument("--memory-gib", type=float, default=8.0, help="memory budget in GiB")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmsum",
        description="Exact minimal signed harmonic sums and their limiting density.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        _add_common_flags(p)
        return p

    p = add("seq", cmd_seq, "emit the first n terms of a sequence")
    _add_seq_flags(p)
    p.add_argument("--n", type=_positive_int, required=True)

    p = add("minsum", cmd_minsum, "exact minimal |signed sum - tau|")
    _add_seq_flags(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--tau", default="0", help="target as an exact fraction, e.g. 1/3")

    p = add("gap", cmd_gap, "exact minimal nonzero |three-valued sum|")
    _add_seq_flags(p)
    p.add_argument("--n", type=_positive_int, required=True)

    p = add("table1", cmd_table1, "scaled minima over prime prefixes 1..upto")
    p.add_argument("--upto", type=_positive_int, required=True)

    p = add("table3", cmd_table3, "scaled minimal gaps over prime prefixes 1..upto")
    p.add_argument("--upto", type=_positive_int, required=True)

    p = add("decay", cmd_decay, "minimum decay profile with reference curves")
    _add_seq_flags(p)
    p.add_argument("--lo", type=_positive_int, required=True)
    p.add_argument("--hi", type=_positive_int, required=True)
    p.add_argument("--tau", default="0")

    p = add("two-stage", cmd_two_stage, "composite-then-prime refinement over {1..n}")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--tau", default="0")

    p = add("rho", cmd_rho, "cosine-product kernel, finite or limiting")
    _add_seq_flags(p)
    p.add_argument("--n", type=_positive_int, help="factor count for the finite kernel")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--eps", type=float, help="tail tolerance for the limit")

    p = add("density", cmd_density, "limiting density of the random signed sum")
    _add_seq_flags(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--grid", help="lo:hi:steps sweep instead of a single point")

    p = add("check", cmd_check, "finite-range inequality scans")
    _add_seq_flags(p)
    p.add_argument("--bound", choices=("exp", "sandwich", "decay"), required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--pairs", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--x-max", type=float, default=1000.0)
    p.add_argument("--alpha", type=float, default=1.0, help="decay exponent")
    p.add_argument("--grid", type=_positive_int, default=200)
    p.add_argument("--c-prime", type=float, help="decay range constant")
    p.add_argument("--x-cap", type=float, default=1e6)
    p.set_defaults(emit="json")

    p = add("mc", cmd_mc, "Monte Carlo comparison with the limiting density")
    _add_seq_flags(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--samples", type=_positive_int, required=True)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--bins", type=_positive_int)
    p.add_argument("--eps", type=float, default=1e-8)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    threads = None
    env_threads = os.environ.get("HARMONIC_THREADS")
    if env_threads:
        try:
            threads = int(env_threads)
            if threads < 1:
                raise ValueError
        except ValueError:
            print(f"error: HARMONIC_THREADS must be a positive integer, got {env_threads!r}", file=sys.stderr)
            return 2
    rc = RunConfig(
        emit=args.emit,
        force=args.force,
        minsum_cap=getattr(args, "minsum_cap", None),
        gap_cap=getattr(args, "gap_cap", None),
        memory_gib=args.memory_gib,
        threads=threads,
    )
    try:
        return args.func(args, rc)
    except (InvalidSpec, Overflow, RangeUnreachable, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CapExceeded, ResourceLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DivergedTruncation, TruncationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
