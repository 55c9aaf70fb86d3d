"""Rational <-> JSON helpers shared by all serialised formats.

Rationals travel as "numerator/denominator" strings so that files survive
round trips without any precision loss.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ValidationError


def fraction_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fraction_from_str(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational literal {s!r}") from exc
