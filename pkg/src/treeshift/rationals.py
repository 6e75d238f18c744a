"""Scalar layer shared by every module: exact rationals, floats, +inf.

Exact mode keeps every quantity a ``Fraction``; a float anywhere in the
inputs demotes the computation to floating arithmetic, which the report
layer records.  ``+inf`` only ever arises from negative-power moments of
measures with an atom at zero.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

Scalar = Union[Fraction, float]

INF: float = math.inf

ZERO = Fraction(0)
ONE = Fraction(1)


class RationalParseError(ValueError):
    """A string did not parse as integer/integer."""


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or a bare integer (string or int) into a Fraction.

    Zero denominators and non-integer parts are rejected.
    """
    if isinstance(text, bool):
        raise RationalParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError as exc:
        raise RationalParseError(f"not a rational: {text!r}") from exc
    if d == 0:
        raise RationalParseError(f"zero denominator: {text!r}")
    return Fraction(n, d)


def as_scalar(value) -> Scalar:
    """Coerce ints and rational strings to Fraction; keep floats floating."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"unsupported scalar type: {value!r}")


def is_exact(x: Scalar) -> bool:
    return isinstance(x, Fraction)


def all_exact(values: Iterable[Scalar]) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def to_float(x: Scalar) -> float:
    return float(x)


def mul0(a: Scalar, b: Scalar) -> Scalar:
    """Product under the 0*inf = 0 convention used by every consistency sum."""
    if a == 0 or b == 0:
        return ZERO
    return a * b


def format_struct(x) -> str:
    """Render a scalar for machine reports: rationals always as "p/q"."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    f = float(x)
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return repr(f)


def format_human(x) -> str:
    """Render a scalar for humans: "3/4", "1", "inf", or a float repr."""
    if isinstance(x, (Fraction, int)):
        return str(x)
    f = float(x)
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return repr(f)


def rational_sqrt(x: Fraction):
    """Exact square root when x is a perfect square of a rational, else None."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def log_scalar(x: Scalar) -> float:
    """Natural log, safe for rationals far outside float range."""
    if isinstance(x, Fraction):
        if x <= 0:
            raise ValueError("log of a nonpositive rational")
        # math.log accepts arbitrarily large ints, so huge fractions survive.
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def carleman_term(t: Scalar, n: int) -> float:
    """t ** (-1/(2n)) computed through logs; t may exceed float range."""
    return math.exp(-log_scalar(t) / (2.0 * n))
