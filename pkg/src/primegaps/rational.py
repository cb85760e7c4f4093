"""Exact rational arithmetic helpers.

All certificate-grade arithmetic in this package is exact.  gmpy2.mpq is
used when available (it is several times faster than fractions.Fraction on
the factorial-scale numbers that show up in moment matrices); the stdlib
Fraction is a drop-in fallback.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Q  # type: ignore
except ImportError:  # pragma: no cover
    Q = Fraction

#: zero/one constants in the active rational type
QZERO = Q(0)
QONE = Q(1)


def to_fraction(x) -> Fraction:
    """Convert an exact rational (mpq, Fraction, int) to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator)) if hasattr(x, "numerator") else Fraction(x)


def parse_rational(text: str):
    """Parse 'p/q' or 'p' into an exact rational.

    Decimal strings like '4.0043' are accepted and read exactly
    (4.0043 -> 40043/10000).
    """
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Q(int(num), int(den))
    if "." in s or "e" in s.lower():
        return Q(Fraction(s))
    return Q(int(s))


def rational_str(x) -> str:
    """Canonical 'p/q' (or 'p' when integral) rendering."""
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
