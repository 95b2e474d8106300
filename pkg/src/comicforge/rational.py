"""Exact rational arithmetic helpers.

All engine-internal weights (transition costs, linkage distances, fact
weights, tier-cell coordinates) are `fractions.Fraction` so symmetry,
triangle-inequality, and byte-stability checks hold exactly. Floats are
accepted at the boundaries and converted decimal-faithfully.
"""

from __future__ import annotations

from fractions import Fraction


def to_fraction(x) -> Fraction:
    """Convert a number (or fraction string) to an exact Fraction.

    Floats go through their shortest decimal repr, so 0.7 becomes 7/10,
    not the underlying binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def frac_str(f: Fraction) -> str:
    """Canonical string form: '3' for integers, '2/3' otherwise."""
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(value) -> Fraction:
    """Parse a serialized fraction (string, int, or float)."""
    return to_fraction(value)
