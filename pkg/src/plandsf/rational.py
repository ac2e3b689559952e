"""Exact rational arithmetic helpers.

All costs, capacities and LP values in this package are exact rationals.
We use gmpy2.mpq when available (noticeably faster inside the simplex and
min-cut inner loops) and fall back to fractions.Fraction otherwise. Both
types expose .numerator/.denominator and interoperate with ints, which is
all the rest of the code relies on.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def Q(value=0, denom=None):
        if denom is not None:
            return _mpq(value, denom)
        if isinstance(value, str):
            num, den = _parse_string(value)
            return _mpq(num, den)
        if isinstance(value, float):
            raise TypeError("floats are not accepted; pass a string or int")
        return _mpq(value)

except ImportError:  # pragma: no cover - exercised only without gmpy2
    def Q(value=0, denom=None):
        if denom is not None:
            return Fraction(value, denom)
        if isinstance(value, str):
            num, den = _parse_string(value)
            return Fraction(num, den)
        if isinstance(value, float):
            raise TypeError("floats are not accepted; pass a string or int")
        return Fraction(value)


ZERO = Q(0)
ONE = Q(1)


def _parse_string(text: str) -> tuple[int, int]:
    """Parse "3", "-7/2" or an exact decimal like "1.25" into (num, den)."""
    text = text.strip()
    if "/" in text:
        num_s, den_s = text.split("/", 1)
        num, den = int(num_s), int(den_s)
        if den <= 0:
            raise ValueError(f"invalid rational literal {text!r}")
        return num, den
    if "." in text or "e" in text or "E" in text:
        frac = Fraction(text)  # exact decimal conversion
        return frac.numerator, frac.denominator
    return int(text), 1


def rat_str(value) -> str:
    """Canonical rendering: "p" for integers, "p/q" in lowest terms otherwise."""
    value = Q(value.numerator, value.denominator) if not isinstance(value, int) else Q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))
