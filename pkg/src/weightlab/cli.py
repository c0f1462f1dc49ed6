"""Command-line front end.

Subcommands
-----------
char            dyadic characteristics of one weight (JSON)
verify-gehring  self-improvement and subset-bound scans (CSV, one row per check)
sparse-form     evaluate the quadratic sparse form from files (JSON)
weak-norm       empirical weak operator norm over the test corpus (CSV)
trace-proof     run the instrumented pigeonhole argument (JSON + optional CSV)
bounds          closed-form bound calculus for one weight and window (JSON)
sweep           power-weight sweep of characteristics and bounds (CSV)

Exit codes: 0 on success, 1 when a verified inequality fails, 2 on bad
input or usage.  Identical configuration and seed give byte-identical
output files.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from .bounds import evaluate_bounds, simplified_weak_type_factor
from .characteristics import characteristic_report, rh_constant
from .errors import WeightlabError, ConfigError
from .gehring import epsilon_range, random_subset_checks, verify_sharp_rh
from .grid import DyadicGrid
from .operators import empirical_weak_operator_norm, function_corpus
from .profiles import ExponentProfile
from .serialize import dump_csv, dump_json, write_text
from .sparse import SparseFamily, sparse_form, verify_sparsity
from .tracer import ProofTrace, default_trace_family, trace_proof
from .weights import PowerWeight, TabulatedWeight, Weight, unit_weight

RATIO_SLACK = 1.0 + 1e-12


# --- shared argument plumbing ----------------------------------------------------------


def _add_depth(parser: argparse.ArgumentParser, default: Optional[int] = None) -> None:
    parser.add_argument(
        "--L",
        dest="depth",
        type=int,
        required=default is None,
        default=default,
        help="dyadic depth: the grid splits [0,1) into 2^L cells",
    )


def _add_weight_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--power",
        type=float,
        metavar="ALPHA",
        help="power weight x^ALPHA on [0,1) with exact moments",
    )
    group.add_argument(
        "--weight-file",
        metavar="PATH",
        help="tabulated weight: one positive decimal per line, exactly 2^L lines",
    )
    group.add_argument(
        "--unit-weight", action="store_true", help="the constant weight 1"
    )


def _read_value_file(path: str, grid: DyadicGrid, positive: bool) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        raise ConfigError(f"cannot read value file {path!r}: {exc}") from exc
    lines = [ln for ln in lines if ln]
    if len(lines) != grid.n_cells:
        raise ConfigError(
            f"value file {path!r} has {len(lines)} entries; depth {grid.depth} "
            f"needs exactly {grid.n_cells}"
        )
    try:
        values = np.array([float(ln) for ln in lines], dtype=np.float64)
    except ValueError as exc:
        raise ConfigError(f"value file {path!r}: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"value file {path!r} contains non-finite entries")
    if positive and not np.all(values > 0.0):
        raise ConfigError(f"value file {path!r} must be strictly positive")
    return values


def _load_weight(args: argparse.Namespace, grid: DyadicGrid) -> Weight:
    if args.unit_weight:
        return unit_weight()
    if args.power is not None:
        return PowerWeight(args.power)
    values = _read_value_file(args.weight_file, grid, positive=True)
    return TabulatedWeight(values)


def _finite_q0(value: float) -> float:
    q0 = float(value)
    if not q0 > 2.0:
        raise ConfigError(f"the upper window exponent must exceed 2, got {q0}")
    return q0


# --- char -------------------------------------------------------------------------------


def _cmd_char(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    w = _load_weight(args, grid)
    ap_exps = args.ap_exponents or [2.0]
    rh_exps = args.rh_exponents or [2.0]
    report = characteristic_report(w, grid, ap_exps, rh_exps)
    write_text(dump_json(report.to_jsonable()), args.out)
    return 0


# --- verify-gehring ---------------------------------------------------------------------


def _cmd_verify_gehring(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    w = _load_weight(args, grid)
    q0s = float(args.q0_star)
    if not q0s >= 1.0:
        raise ConfigError(f"the integrability exponent must be >= 1, got {q0s}")
    if args.eps_grid < 1:
        raise ConfigError("--eps-grid must be at least 1")
    eps_max = epsilon_range(w, q0s, grid)
    rh = rh_constant(w, q0s, grid)
    epsilons = [eps_max * i / args.eps_grid for i in range(1, args.eps_grid + 1)]
    columns = ["check", "level", "index", "epsilon", "lhs", "rhs", "ratio"]
    rows: List[Sequence[object]] = []
    worst = 0.0
    for eps in epsilons:
        for cube in grid.cubes():
            chk = verify_sharp_rh(w, q0s, eps, cube, grid, rh=rh, epsilon_max=eps_max)
            worst = max(worst, chk.ratio)
            rows.append(
                ["self-improve", cube.level, cube.index, eps, chk.lhs, chk.rhs, chk.ratio]
            )
    if args.subsets > 0:
        for cube, eps, chk in random_subset_checks(
            w, q0s, epsilons, grid, args.subsets, args.seed
        ):
            worst = max(worst, chk.ratio)
            rows.append(
                ["subset", cube.level, cube.index, eps, chk.lhs, chk.rhs, chk.ratio]
            )
    write_text(dump_csv(columns, rows), args.csv)
    print(
        f"verify-gehring: {len(rows)} checks, epsilon_max={eps_max!r}, "
        f"worst ratio={worst!r}",
        file=sys.stderr,
    )
    return 0 if worst <= RATIO_SLACK else 1


# --- sparse-form ------------------------------------------------------------------------


def _cmd_sparse_form(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    try:
        with open(args.family, "r", encoding="utf-8") as fh:
            family = SparseFamily.from_json(fh.read(), grid)
    except OSError as exc:
        raise ConfigError(f"cannot read family file {args.family!r}: {exc}") from exc
    report = verify_sparsity(family, grid)
    if not report.ok:
        print(
            f"sparse-form: family at {args.family!r} is not 1/2-sparse "
            f"({report.first_violation})",
            file=sys.stderr,
        )
        return 1
    fvals = _read_value_file(args.f, grid, positive=False)
    gvals = _read_value_file(args.g, grid, positive=False)
    profile = ExponentProfile(p0=args.p0, q0=_finite_q0(args.q0))
    value = sparse_form(fvals, gvals, profile, family, grid)
    payload = {
        "depth": grid.depth,
        "p0": profile.p0,
        "q0_star": profile.q0_star,
        "n_cubes": len(family),
        "value": value,
    }
    write_text(dump_json(payload), args.out)
    return 0


# --- weak-norm --------------------------------------------------------------------------


def _cmd_weak_norm(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    w = _load_weight(args, grid)
    corpus = function_corpus(grid, seed=args.seed)
    best, rows = empirical_weak_operator_norm(w, grid, p=args.p, corpus=corpus)
    columns = ["function", "strong_norm_f", "weak_norm_sf", "ratio"]
    table = [[r.name, r.strong_norm, r.weak_norm_sf, r.ratio] for r in rows]
    write_text(dump_csv(columns, table), args.csv)
    print(
        f"weak-norm: {len(rows)} corpus functions, best ratio={best!r}",
        file=sys.stderr,
    )
    return 0


# --- trace-proof ------------------------------------------------------------------------


def _trace_gates(trace: ProofTrace) -> List[str]:
    """Hard inequalities every valid trace must satisfy; returns failures."""
    failures: List[str] = []
    if trace.good_fraction < 0.75 * (1.0 - 1e-12):
        failures.append(f"good-set fraction {trace.good_fraction!r} below 3/4")
    if trace.worst_average_ratio > RATIO_SLACK:
        failures.append(
            f"average-comparison ratio {trace.worst_average_ratio!r} above 1"
        )
    if trace.worst_bin_min_ratio > RATIO_SLACK:
        failures.append(f"bin cap ratio {trace.worst_bin_min_ratio!r} above 1")
    if trace.worst_mass_ratio > RATIO_SLACK:
        failures.append(f"layer-counting ratio {trace.worst_mass_ratio!r} above 1")
    if trace.clamped:
        failures.append(f"{len(trace.clamped)} cubes needed bin clamping")
    if not (math.isfinite(trace.c0) and trace.c0 >= 0.0):
        failures.append(f"empirical constant {trace.c0!r} is not finite")
    return failures


def _cmd_trace_proof(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    w = _load_weight(args, grid)
    profile = ExponentProfile(p0=args.p0, q0=_finite_q0(args.q0))
    if args.f is not None:
        fvals = _read_value_file(args.f, grid, positive=False)
    else:
        fvals = np.ones(grid.n_cells, dtype=np.float64)
    family = default_trace_family(fvals, w, grid, profile.p0, ratio=args.ratio)
    trace = trace_proof(fvals, w, grid, profile, family, epsilon=args.epsilon)
    write_text(dump_json(trace.to_jsonable()), args.out)
    if args.csv is not None:
        columns = [
            "r",
            "s",
            "n_cubes",
            "quad_sum",
            "cap_via_mass",
            "cap_via_disjoint",
            "min_ratio",
            "mass_ratio",
            "witness_mass",
            "comparability_max",
        ]
        table = [
            [
                r,
                s,
                len(b.cubes),
                b.quad_sum,
                b.cap_via_mass,
                b.cap_via_disjoint,
                b.min_ratio,
                b.mass_ratio,
                b.witness_mass,
                b.comparability_max,
            ]
            for (r, s), b in sorted(trace.bins.items())
        ]
        write_text(dump_csv(columns, table), args.csv)
    failures = _trace_gates(trace)
    for message in failures:
        print(f"trace-proof: {message}", file=sys.stderr)
    print(
        f"trace-proof: {len(trace.traced)} cubes in {len(trace.bins)} bins, "
        f"empirical constant={trace.c0!r}",
        file=sys.stderr,
    )
    return 1 if failures else 0


# --- bounds -----------------------------------------------------------------------------


def _cmd_bounds(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    w = _load_weight(args, grid)
    q0 = float(args.q0)
    if not q0 > 2.0:
        raise ConfigError(f"the upper window exponent must exceed 2, got {q0}")
    report = evaluate_bounds(w, grid, args.p0, q0, epsilon=args.epsilon)
    write_text(dump_json(report.to_jsonable()), args.out)
    return 0


# --- sweep ------------------------------------------------------------------------------


def _cmd_sweep(args: argparse.Namespace) -> int:
    grid = DyadicGrid(args.depth)
    if args.alpha_steps < 1:
        raise ConfigError("--alpha-steps must be at least 1")
    q0 = _finite_q0(args.q0)
    profile = ExponentProfile(p0=args.p0, q0=q0)
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)
    corpus = function_corpus(grid, seed=args.seed)
    columns = [
        "alpha",
        "L",
        "ap",
        "rh",
        "a_infty",
        "epsilon",
        "weak_bound",
        "weak_bound_pinned",
        "strong_bound",
        "empirical_weak",
        "c0",
    ]
    ones = np.ones(grid.n_cells, dtype=np.float64)
    rows: List[Sequence[object]] = []
    for alpha in alphas:
        w: Weight = unit_weight() if alpha == 0.0 else PowerWeight(float(alpha))
        bounds = evaluate_bounds(w, grid, profile.p0, q0)
        pinned_eta = simplified_weak_type_factor(
            bounds.rh_char, bounds.a_infty_char, bounds.q0_star, bounds.a_infty_pow_char
        )
        pinned = math.sqrt(bounds.ap_char * bounds.rh_char * pinned_eta)
        empirical, _ = empirical_weak_operator_norm(w, grid, p=2.0, corpus=corpus)
        family = default_trace_family(ones, w, grid, profile.p0)
        trace = trace_proof(ones, w, grid, profile, family)
        rows.append(
            [
                float(alpha),
                grid.depth,
                bounds.ap_char,
                bounds.rh_char,
                bounds.a_infty_char,
                bounds.epsilon,
                bounds.weak_bound,
                pinned,
                bounds.strong_bound,
                empirical,
                trace.c0,
            ]
        )
    write_text(dump_csv(columns, rows), args.csv)
    return 0


# --- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weightlab",
        description="dyadic weighted-inequality laboratory on [0,1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_char = sub.add_parser("char", help="dyadic characteristics of one weight")
    _add_weight_source(p_char)
    _add_depth(p_char)
    p_char.add_argument(
        "-p",
        dest="ap_exponents",
        type=float,
        action="append",
        metavar="P",
        help="strong-type exponent for the two-sided characteristic (repeatable)",
    )
    p_char.add_argument(
        "-q",
        dest="rh_exponents",
        type=float,
        action="append",
        metavar="Q",
        help="higher-integrability exponent (repeatable)",
    )
    p_char.add_argument("--out", metavar="PATH", help="write JSON here (default stdout)")
    p_char.set_defaults(func=_cmd_char)

    p_geh = sub.add_parser(
        "verify-gehring",
        help="scan the self-improved integrability and subset bounds",
    )
    _add_weight_source(p_geh)
    _add_depth(p_geh)
    p_geh.add_argument(
        "--q0-star", type=float, default=2.0, help="integrability exponent (default 2)"
    )
    p_geh.add_argument(
        "--eps-grid",
        type=int,
        default=10,
        help="number of evenly spaced epsilon values in (0, epsilon_max]",
    )
    p_geh.add_argument(
        "--subsets",
        type=int,
        default=0,
        help="number of seeded random subset checks to add",
    )
    p_geh.add_argument("--seed", type=int, default=2024, help="subset sampling seed")
    p_geh.add_argument("--csv", metavar="PATH", help="write CSV here (default stdout)")
    p_geh.set_defaults(func=_cmd_verify_gehring)

    p_sf = sub.add_parser(
        "sparse-form", help="evaluate the quadratic sparse form from files"
    )
    _add_depth(p_sf)
    p_sf.add_argument(
        "--family",
        required=True,
        metavar="PATH",
        help="JSON list of cubes with witness cell ranges",
    )
    p_sf.add_argument(
        "--f", required=True, metavar="PATH", help="values file: one decimal per line"
    )
    p_sf.add_argument(
        "--g", required=True, metavar="PATH", help="values file: one decimal per line"
    )
    p_sf.add_argument("--p0", type=float, default=1.0, help="lower window exponent")
    p_sf.add_argument("--q0", type=float, default=4.0, help="upper window exponent")
    p_sf.add_argument("--out", metavar="PATH", help="write JSON here (default stdout)")
    p_sf.set_defaults(func=_cmd_sparse_form)

    p_wn = sub.add_parser(
        "weak-norm", help="empirical weak operator norm over the test corpus"
    )
    _add_weight_source(p_wn)
    _add_depth(p_wn)
    p_wn.add_argument("-p", type=float, default=2.0, help="Lebesgue exponent")
    p_wn.add_argument("--seed", type=int, default=2024, help="corpus noise seed")
    p_wn.add_argument("--csv", metavar="PATH", help="write CSV here (default stdout)")
    p_wn.set_defaults(func=_cmd_weak_norm)

    p_tp = sub.add_parser(
        "trace-proof", help="run the instrumented pigeonhole argument"
    )
    _add_weight_source(p_tp)
    _add_depth(p_tp)
    p_tp.add_argument("--p0", type=float, default=1.0, help="lower window exponent")
    p_tp.add_argument("--q0", type=float, default=4.0, help="upper window exponent")
    p_tp.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="integrability bump (default: the proven maximum)",
    )
    p_tp.add_argument(
        "--f",
        metavar="PATH",
        help="values file for the test function (default: constant 1)",
    )
    p_tp.add_argument(
        "--ratio",
        type=float,
        default=2.0,
        help="stopping-time threshold ratio for the traced family",
    )
    p_tp.add_argument("--out", metavar="PATH", help="write JSON here (default stdout)")
    p_tp.add_argument("--csv", metavar="PATH", help="also write a per-bin CSV here")
    p_tp.set_defaults(func=_cmd_trace_proof)

    p_bd = sub.add_parser(
        "bounds", help="closed-form bound calculus for one weight and window"
    )
    _add_weight_source(p_bd)
    _add_depth(p_bd)
    p_bd.add_argument("--p0", type=float, default=1.0, help="lower window exponent")
    p_bd.add_argument(
        "--q0",
        type=float,
        default=4.0,
        help="upper window exponent ('inf' allowed)",
    )
    p_bd.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="integrability bump (default: the proven maximum)",
    )
    p_bd.add_argument("--out", metavar="PATH", help="write JSON here (default stdout)")
    p_bd.set_defaults(func=_cmd_bounds)

    p_sw = sub.add_parser(
        "sweep", help="power-weight sweep of characteristics and bounds"
    )
    _add_depth(p_sw, default=10)
    p_sw.add_argument("--alpha-min", type=float, default=-0.375)
    p_sw.add_argument("--alpha-max", type=float, default=0.375)
    p_sw.add_argument("--alpha-steps", type=int, default=7)
    p_sw.add_argument("--p0", type=float, default=1.0, help="lower window exponent")
    p_sw.add_argument("--q0", type=float, default=4.0, help="upper window exponent")
    p_sw.add_argument("--seed", type=int, default=2024, help="corpus noise seed")
    p_sw.add_argument("--csv", metavar="PATH", help="write CSV here (default stdout)")
    p_sw.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WeightlabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
