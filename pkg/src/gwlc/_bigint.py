"""Big-integer helpers backed by GMP.

Python 3.10+ refuses ``str(int)`` past 4300 digits and multiplies large
integers with Karatsuba only; exact leaf-law work at l ~ 10^4 needs both
unbounded decimal conversion and FFT-speed products.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import gmpy2

mpz = gmpy2.mpz


def int_to_str(n: int) -> str:
    return mpz(n).digits(10)


def str_to_int(s: str) -> int:
    return int(mpz(s.strip()))


def fraction_parts(q: Fraction) -> tuple[str, str]:
    return int_to_str(q.numerator), int_to_str(q.denominator)


def fraction_str(q: Fraction) -> str:
    num, den = fraction_parts(q)
    return num if den == "1" else f"{num}/{den}"


def parse_fraction(num: str, den: str = "1") -> Fraction:
    return Fraction(str_to_int(num), str_to_int(den))


def reduced_fraction(num: int, den: int) -> Fraction:
    """``Fraction(num, den)`` with the gcd done by GMP."""
    q = gmpy2.mpq(num, den)
    return Fraction(int(q.numerator), int(q.denominator))


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    """Exact sum of a[i]*b[i]."""
    acc = mpz(0)
    for x, y in zip(a, b):
        if x and y:
            acc += mpz(x) * y
    return int(acc)


def _bytes_per_slot(a: Sequence[int], b: Sequence[int]) -> int:
    bits = max(x.bit_length() for x in a) + max(x.bit_length() for x in b)
    bits += max(1, min(len(a), len(b))).bit_length() + 1
    return (bits + 7) // 8


def _pack(values: Sequence[int], width: int) -> int:
    return int.from_bytes(b"".join(v.to_bytes(width, "little") for v in values), "little")


def convolve(a: Sequence[int], b: Sequence[int], n_out: int | None = None) -> list[int]:
    """Cauchy product of two integer sequences, truncated to ``n_out`` terms.

    Nonnegative inputs go through Kronecker substitution (one GMP product);
    signed inputs fall back to the schoolbook loop.
    """
    if n_out is None:
        n_out = len(a) + len(b) - 1
    if not a or not b or n_out <= 0:
        return [0] * max(n_out, 0)
    a = [int(x) for x in a[:n_out]]
    b = [int(x) for x in b[:n_out]]
    if min(a) < 0 or min(b) < 0:
        out = [0] * n_out
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n_out - i)):
                    out[i + j] += x * b[j]
        return out
    if max(a) == 0 or max(b) == 0:
        return [0] * n_out
    width = _bytes_per_slot(a, b)
    prod = mpz(_pack(a, width)) * mpz(_pack(b, width))
    raw = int(prod).to_bytes(width * (len(a) + len(b)), "little")
    out = [
        int.from_bytes(raw[k * width:(k + 1) * width], "little")
        for k in range(min(n_out, len(a) + len(b) - 1))
    ]
    out.extend([0] * (n_out - len(out)))
    return out
