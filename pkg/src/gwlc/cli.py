"""Command-line entry point: ``gwlc <subcommand> ...``.

Exit status: 0 on success, 1 when ``verify`` finds a failure, 2 on bad flags
or invalid input (one-line diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import contextlib
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import io as gio
from ._bigint import fraction_parts
from .enumeration import dump_trees, oracle_conditional_law
from .errors import GWLCError
from .exactlaws import (
    binary_conditional_law,
    is_binary,
    leaf_law,
    leaf_law_asymptotic,
    leaf_table,
    plugin_conditional_law,
    ratio_conditional_law,
    tail_deficit,
    tail_threshold,
    v_conditional_moments,
)
from .offspring import load_distribution
from .treesim import DEFAULT_NODE_CAP, rejection_sample
from .verify import run_checks


class UsageError(GWLCError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _default_seed() -> int:
    raw = os.environ.get("GWLC_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GWLC_SEED is not an integer: {raw!r}")


def _frac_cols(q: Fraction) -> list:
    num, den = fraction_parts(q)
    return [num, den, float(q)]


def _emit(args, header, rows, payload=None) -> None:
    with _open_out(args.out) as fh:
        if args.format == "json":
            if payload is None:
                payload = [dict(zip(header, (gio.format_cell(v) for v in row))) for row in rows]
            gio.dump_json(payload, fh)
        else:
            gio.write_table(header, rows, fh)


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_leaf_law(args) -> int:
    d = load_distribution(args.dist, require_critical=True)
    leaf_table(d).ensure(args.max_ell)
    rows = []
    for ell in range(1, args.max_ell + 1):
        p = leaf_law(d, ell)
        asym = leaf_law_asymptotic(d, ell)
        exact = float(p)
        rows.append([ell, *_frac_cols(p), asym.double_factorial_form, asym.power_law_form,
                     exact / asym.double_factorial_form if asym.double_factorial_form else math.nan,
                     exact / asym.power_law_form])
    header = ("ell", "p_num", "p_den", "p_float", "double_factorial_form", "power_law_form",
              "ratio_double_factorial", "ratio_power_law")
    _emit(args, header, rows)
    return 0


def _law_for_mode(d, args):
    ell = args.ell
    if args.mode == "exact-binary":
        if not is_binary(d):
            raise UsageError("exact-binary mode needs the binary law p0 = p2 = 1/2")
        return binary_conditional_law(ell)
    if args.mode == "plugin":
        return plugin_conditional_law(d, ell)
    if args.mode == "ratio":
        return ratio_conditional_law(d, ell)
    if args.mode == "oracle":
        return oracle_conditional_law(d, ell, args.node_cap)
    raise UsageError(f"unknown mode {args.mode!r}")


def cmd_subtree_law(args) -> int:
    if args.mode == "mc":
        return cmd_simulate(args)
    d = load_distribution(args.dist, require_critical=True)
    law = _law_for_mode(d, args)
    _emit(args, gio.LAW_HEADER, gio.law_rows(law), gio.law_to_dict(law) if args.format == "json" else None)
    return 0


def cmd_v_moments(args) -> int:
    d = load_distribution(args.dist, require_critical=True)
    rows = []
    for ell in args.ell:
        m = v_conditional_moments(d, ell)
        mean_dev = abs(float(m.mean - ell / d.p0)) / math.sqrt(ell)
        rows.append([ell, *_frac_cols(m.mean), *_frac_cols(m.variance),
                     mean_dev, float(m.variance) / ell**1.5])
    header = ("ell", "mean_num", "mean_den", "mean_float", "var_num", "var_den", "var_float",
              "mean_dev_scaled", "var_scaled")
    _emit(args, header, rows)
    return 0


def cmd_simulate(args) -> int:
    d = load_distribution(args.dist)
    if not d.criticality:
        print(f"gwlc: warning: {d.regime} law (mean {d.mean}); exact comparisons do not apply",
              file=sys.stderr)
    seed = args.seed if args.seed is not None else _default_seed()
    run = rejection_sample(d, args.ell, args.accepted, seed, args.node_cap, args.workers)
    print(f"accepted={run.accepted} trials={run.trials} overflowed={run.overflowed} "
          f"v_mean={run.v_mean!r} v_stderr={run.v_stderr!r}", file=sys.stderr)
    payload = gio.estimates_to_dict(run.estimates) if args.format == "json" else None
    _emit(args, gio.ESTIMATE_HEADER, gio.estimate_rows(run.estimates), payload)
    return 0


def cmd_enumerate(args) -> int:
    d = load_distribution(args.dist)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            dump_trees(d, args.ell, args.node_cap, fh)
    law = oracle_conditional_law(d, args.ell, args.node_cap)
    print(f"residual={gio.format_cell(law.residual)} ({float(law.residual)!r})", file=sys.stderr)
    _emit(args, gio.LAW_HEADER, gio.law_rows(law), gio.law_to_dict(law) if args.format == "json" else None)
    return 0


def cmd_tail(args) -> int:
    d = load_distribution(args.dist, require_critical=True)
    rows = []
    for ell in args.ell_grid:
        tau = tail_threshold(ell)
        rows.append([ell, tau, math.floor(tau), tail_deficit(d, ell, "ratio"),
                     tail_deficit(d, ell, "plugin")])
    _emit(args, ("ell", "tau", "cutoff", "ratio_tail", "plugin_tail"), rows)
    return 0


def cmd_verify(args) -> int:
    d = load_distribution(args.dist, require_critical=True)
    results = run_checks(d, args.level)
    with _open_out(args.out) as fh:
        for r in results:
            fh.write(r.line() + "\n")
        failed = sum(not r.passed for r in results)
        fh.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwlc",
        description="Leaf count of a uniformly random subtree of a critical Galton-Watson tree.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, fmt=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--dist", required=True,
                       help="built-in name (binary, p1demo, ternary) or JSON descriptor file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=func)
        return p

    p = add("leaf-law", cmd_leaf_law, "exact P(L=l) with its two asymptotic forms")
    p.add_argument("--max-ell", type=_positive, required=True)

    p = add("subtree-law", cmd_subtree_law, "conditional law of the subtree leaf count")
    p.add_argument("--ell", type=_positive, required=True)
    p.add_argument("--mode", choices=("exact-binary", "plugin", "ratio", "oracle", "mc"),
                   default="plugin")
    p.add_argument("--node-cap", type=_positive, default=None)
    p.add_argument("--accepted", type=_positive, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=_positive, default=1)

    p = add("v-moments", cmd_v_moments, "exact mean and variance of V given L=l")
    p.add_argument("--ell", type=_int_list, required=True, help="one value or a comma list")

    p = add("simulate", cmd_simulate, "Monte Carlo estimates by rejection sampling")
    p.add_argument("--ell", type=_positive, required=True)
    p.add_argument("--accepted", type=_positive, default=10000)
    p.add_argument("--seed", type=int, default=None, help="default: $GWLC_SEED, else 0")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--node-cap", type=_positive, default=DEFAULT_NODE_CAP)

    p = add("enumerate", cmd_enumerate, "brute-force oracle law and residual")
    p.add_argument("--ell", type=_positive, required=True)
    p.add_argument("--node-cap", type=_positive, default=None)
    p.add_argument("--dump", default=None, help="write trees and weights as JSON lines")

    p = add("tail", cmd_tail, "tail mass beyond sqrt(l)/ln(l)^2 along a grid")
    p.add_argument("--ell-grid", type=_int_list, required=True)

    p = add("verify", cmd_verify, "run the cross-check suite", fmt=False)
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "subtree-law" and args.mode == "mc" and args.node_cap is None:
        args.node_cap = DEFAULT_NODE_CAP
    try:
        return args.func(args)
    except GWLCError as exc:
        print(f"gwlc: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gwlc: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())
