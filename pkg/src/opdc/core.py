"""Exact scalars, a finite-float guard and dense rational polynomials.

Rationals are :class:`fractions.Fraction`; they are normalized after every
operation, so equality is a plain ``==``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NonFiniteValue

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (optionally signed, ASCII or Unicode minus).

    Integers and Fractions pass through unchanged.  Floats are rejected
    because they would smuggle rounding into exact computations.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse {type(text).__name__} as a rational")
    m = _RATIONAL_RE.match(text.replace("−", "-"))
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational_list(text: str) -> list[Fraction]:
    return [parse_rational(t) for t in text.split(",") if t.strip()]


def check_finite(value, what="value"):
    """Return ``value`` unchanged, raising :class:`NonFiniteValue` on inf/nan."""
    arr = np.asarray(value)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"non-finite entries in {what}")
    return value


def to_float(q) -> float:
    try:
        x = float(q)
    except OverflowError:
        raise NonFiniteValue(f"{q!r} does not fit in a double") from None
    if not math.isfinite(x):
        raise NonFiniteValue(f"{q!r} does not fit in a double")
    return x


class Polynomial:
    """Dense univariate polynomial with Fraction coefficients.

    ``coeffs[k]`` multiplies ``x**k``.  Trailing zeros are trimmed, and the
    zero polynomial is stored as ``(0,)``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (0,)):
        c = [Fraction(v) for v in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [Fraction(0)]
        self.coeffs = tuple(c)

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return self.leading == 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __call__(self, x):
        return poly_eval(self, x)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == (Fraction(other),)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[format_rational(c) for c in self.coeffs]})"

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            s = Fraction(other)
            return Polynomial(s * c for c in self.coeffs)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Return ``self(inner(x))`` (Horner in the polynomial ring)."""
        out = Polynomial.constant(self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            out = out * inner + c
        return out

    def reversed(self, n: int | None = None) -> "Polynomial":
        """Coefficient reversal ``x**n * p(1/x)``; ``n`` defaults to the degree."""
        n = self.degree if n is None else n
        if n < self.degree:
            raise ValueError("reversal order below degree")
        padded = self.coeffs + (Fraction(0),) * (n + 1 - len(self.coeffs))
        return Polynomial(reversed(padded))


def poly_eval(p: Polynomial, x) -> Fraction:
    """Evaluate ``sum c_k x**k`` exactly by Horner's rule."""
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def alternating(k: int) -> int:
    """(-1)**k without float detours."""
    return -1 if k % 2 else 1


def as_fractions(values: Sequence) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)
