"""CSV and JSON export of laws, estimates and diagnostic tables.

Exact rationals are written as decimal ``num/den`` strings (split into two
columns in CSV); floats use ``repr`` so output is byte-stable.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import IO, Iterable, Sequence

from ._bigint import fraction_parts, fraction_str
from .exactlaws import ConditionalLaw
from .treesim import ConditionalEstimate

__all__ = [
    "LAW_HEADER",
    "ESTIMATE_HEADER",
    "format_cell",
    "write_table",
    "law_rows",
    "law_to_dict",
    "estimate_rows",
    "estimates_to_dict",
    "dump_json",
]

LAW_HEADER = ("ell", "t", "mass_num", "mass_den", "mass_float")
ESTIMATE_HEADER = ("ell", "t", "point", "stderr", "accepted", "trials", "overflowed", "seed")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(header: Sequence[str], rows: Iterable[Sequence], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


def law_rows(law: ConditionalLaw) -> Iterable[tuple]:
    for t in range(1, law.ell + 1):
        m = law.mass(t)
        if isinstance(m, Fraction):
            num, den = fraction_parts(m)
        else:
            num, den = repr(float(m)), "1"
        yield law.ell, t, num, den, law.float_mass(t)


def law_to_dict(law: ConditionalLaw) -> dict:
    return {
        "kind": law.kind,
        "ell": law.ell,
        "residual": format_cell(law.residual),
        "flags": list(law.flags),
        "rows": [
            {"t": t, "mass": f"{num}/{den}", "mass_float": mf}
            for _, t, num, den, mf in law_rows(law)
        ],
    }


def estimate_rows(estimates: Sequence[ConditionalEstimate]) -> Iterable[tuple]:
    for e in estimates:
        yield e.ell, e.t, e.point, e.stderr, e.accepted, e.trials, e.overflowed, e.seed


def estimates_to_dict(estimates: Sequence[ConditionalEstimate]) -> dict:
    first = estimates[0]
    return {
        "kind": "monte-carlo",
        "ell": first.ell,
        "accepted": first.accepted,
        "trials": first.trials,
        "overflowed": first.overflowed,
        "seed": first.seed,
        "rows": [{"t": e.t, "point": e.point, "stderr": e.stderr} for e in estimates],
    }


def dump_json(payload, fh: IO[str]) -> None:
    json.dump(payload, fh, indent=2)
    fh.write("\n")
