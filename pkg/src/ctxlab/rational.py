"""Exact rational arithmetic backing every probability in the package.

All tables, equivalence coefficients and LP data are rationals in lowest
terms with positive denominator.  gmpy2 provides the fast backend; the
stdlib Fraction is a drop-in fallback so the package still works without
the C extension.

Decimal text is parsed exactly: "0.25" becomes 1/4, never the binary
float rounding of 0.25.  Python floats passed through the API are first
rendered with their shortest round-trip repr and then parsed the same
way, so float(0.1) maps to 1/10.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _rat

    _RAT_TYPES = (type(_rat(0)), Fraction)
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _rat = Fraction
    _RAT_TYPES = (Fraction,)

#: Rational constructor: Q(n), Q(n, d). Lowest terms, positive denominator.
Q = _rat

ZERO = Q(0)
ONE = Q(1)


def is_rational(x) -> bool:
    return isinstance(x, _RAT_TYPES)


def parse_rational(text: str):
    """Parse "3/4", "-2", "0.125" or "1e-3" into an exact rational."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    if "/" in s:
        num_s, den_s = s.split("/", 1)
        num = int(num_s.strip())
        den = int(den_s.strip())
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Q(num, den)
    return _parse_decimal(s)


def _parse_decimal(s: str):
    mantissa = s
    exp = 0
    for marker in ("e", "E"):
        if marker in mantissa:
            mantissa, exp_s = mantissa.split(marker, 1)
            exp = int(exp_s)
            break
    sign = 1
    if mantissa.startswith(("+", "-")):
        if mantissa[0] == "-":
            sign = -1
        mantissa = mantissa[1:]
    if "." in mantissa:
        int_part, frac_part = mantissa.split(".", 1)
    else:
        int_part, frac_part = mantissa, ""
    digits = (int_part + frac_part) or "0"
    if not digits.isdigit():
        raise ValueError(f"not a rational literal: {s!r}")
    value = Q(sign * int(digits))
    shift = exp - len(frac_part)
    if shift >= 0:
        return value * Q(10) ** shift
    return value / Q(10) ** (-shift)


def as_rational(x):
    """Coerce ints, rationals, floats and strings to an exact rational.

    Floats are converted through their shortest decimal repr, matching
    what a human wrote rather than the underlying binary expansion.
    """
    if is_rational(x):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a probability")
    if isinstance(x, int):
        return Q(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {x!r}")
        return _parse_decimal(repr(x))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def format_rational(q) -> str:
    """Serialize to "num" for integers, else "num/den"."""
    num, den = q.numerator, q.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"


def to_float(q) -> float:
    return int(q.numerator) / int(q.denominator)


def rational_from_float_exact(x: float):
    """Exact binary value of a float (internal use: LP certification of
    float-valued objectives, where the float itself is the ground truth)."""
    return Q(Fraction(x))
