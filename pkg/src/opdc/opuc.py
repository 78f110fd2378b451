"""Reflection (Verblunsky) parameter sequences and the Szegő recurrence."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core import Polynomial, as_fractions, format_rational

A_MINUS_ONE = Fraction(-1)


class ReflectionSequence:
    """Real reflection parameters ``a_0, a_1, ...`` with ``a_{-1} = -1``.

    Backed either by a finite prefix or by a closed-form generator
    ``n -> a_n``.  Indexing at ``-1`` always returns ``-1``; indexing past a
    finite prefix raises :class:`IndexError`.

    Examples
    --------
    >>> seq = ReflectionSequence.from_list(["1/2", "-1/3"])
    >>> seq[-1], seq[1]
    (Fraction(-1, 1), Fraction(-1, 3))
    """

    def __init__(self, values: Sequence | None = None, generator: Callable[[int], Fraction] | None = None,
                 label: str | None = None):
        if (values is None) == (generator is None):
            raise ValueError("give exactly one of values / generator")
        self._values = None if values is None else as_fractions(values)
        self._generator = generator
        self._cache: dict[int, Fraction] = {}
        self.label = label

    @classmethod
    def from_list(cls, values: Sequence, label=None) -> "ReflectionSequence":
        return cls(values=values, label=label)

    @classmethod
    def from_generator(cls, fn: Callable[[int], Fraction], label=None) -> "ReflectionSequence":
        return cls(generator=fn, label=label)

    @classmethod
    def zeros(cls) -> "ReflectionSequence":
        return cls(generator=lambda n: Fraction(0), label="zero")

    @property
    def length(self) -> int | None:
        """Number of stored parameters, or ``None`` for a generator."""
        return None if self._values is None else len(self._values)

    @property
    def a_minus1(self) -> Fraction:
        return A_MINUS_ONE

    def __getitem__(self, n: int) -> Fraction:
        if n == -1:
            return A_MINUS_ONE
        if n < -1:
            raise IndexError(f"reflection index {n} < -1")
        if self._values is not None:
            if n >= len(self._values):
                raise IndexError(f"a_{n} not available (prefix of length {len(self._values)})")
            return self._values[n]
        if n not in self._cache:
            self._cache[n] = Fraction(self._generator(n))
        return self._cache[n]

    def prefix(self, n: int) -> tuple[Fraction, ...]:
        return tuple(self[k] for k in range(n))

    def epsilon(self, n: int) -> int:
        return -1 if abs(self[n]) > 1 else 1

    def rsq(self, n: int) -> Fraction:
        """Exact ``|1 - a_n^2|``; ``r_n`` is its positive square root."""
        return abs(1 - self[n] ** 2)

    def to_json(self, n: int | None = None) -> dict:
        n = self.length if n is None else n
        if n is None:
            raise ValueError("generator-backed sequence needs an explicit length")
        return {"a": [format_rational(v) for v in self.prefix(n)], "generator": None}

    def __repr__(self):
        if self._values is not None:
            return f"ReflectionSequence({[format_rational(v) for v in self._values]})"
        return f"ReflectionSequence(<generator {self.label or '?'}>)"


@dataclass(frozen=True)
class SzegoPair:
    phi: Polynomial
    phi_star: Polynomial
    n: int


@dataclass(frozen=True)
class Classification:
    epsilon: tuple[int, ...]
    rsq: tuple[Fraction, ...]
    classical: bool
    degenerate: bool


def szego_polynomials(seq: ReflectionSequence, n: int) -> SzegoPair:
    """Monic ``Phi_n`` and its reversal ``Phi_n^*`` from the Szegő recurrence.

    ``Phi_{k+1} = z Phi_k - a_k Phi_k^*`` and
    ``Phi_{k+1}^* = Phi_k^* - a_k z Phi_k``, starting from ``Phi_0 = 1``.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    z = Polynomial.x()
    phi = phi_star = Polynomial.constant(1)
    for k in range(n):
        a = seq[k]
        phi, phi_star = z * phi - phi_star * a, phi_star - (z * phi) * a
    return SzegoPair(phi, phi_star, n)


def classify(seq: ReflectionSequence, n: int) -> Classification:
    a = seq.prefix(n)
    return Classification(
        epsilon=tuple(seq.epsilon(k) for k in range(n)),
        rsq=tuple(seq.rsq(k) for k in range(n)),
        classical=all(abs(v) < 1 for v in a),
        degenerate=any(abs(v) == 1 for v in a),
    )


def sequence_from_json(obj: dict) -> ReflectionSequence:
    """Build a sequence from ``{"a": [...], "generator": null | {...}}``."""
    gen = obj.get("generator")
    if gen:
        from . import families

        return families.reflection_generator(gen["family"], gen.get("params", {}))
    return ReflectionSequence.from_list(obj["a"])
