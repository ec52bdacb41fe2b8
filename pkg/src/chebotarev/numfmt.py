"""Exact decimal rendering of rationals (round half to even)."""

from __future__ import annotations

from fractions import Fraction


def fraction_json(q) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def parse_fraction(obj) -> Fraction:
    """Accept ``[num, den]``, ``{"num":..,"den":..}``, an int or a string like "1/3"."""
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise ValueError(f"fraction pair expected, got {obj!r}")
        return Fraction(int(obj[0]), int(obj[1]))
    if isinstance(obj, float):
        raise ValueError("floats are not accepted as exact weights")
    return Fraction(obj)


def format_fixed(q, digits: int) -> str:
    """``q`` with exactly ``digits`` fractional digits."""
    q = Fraction(q)
    scaled = round(q * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _exponent(q: Fraction) -> int:
    """floor(log10 |q|) for q != 0."""
    q = abs(q)
    e = int((q.numerator.bit_length() - q.denominator.bit_length()) * 0.30102999566398120)
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    return e


def format_sig(q, sig: int = 7) -> str:
    """``q`` rounded to ``sig`` significant digits in plain notation."""
    q = Fraction(q)
    if q == 0:
        return format_fixed(q, sig - 1)
    e = _exponent(q)
    digits = sig - 1 - e
    rounded = round(q * Fraction(10) ** digits)
    if abs(rounded) >= 10 ** sig:
        digits -= 1
    return format_fixed(q, max(digits, 0))
