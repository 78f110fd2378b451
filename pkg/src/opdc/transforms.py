"""Christoffel/Geronimus steps, the SDG step, rescaling and the Chihara split.

Everything works on exact recurrence coefficients.  A monic recurrence is

    P_{n+1}(x) + b_n P_n(x) + u_n P_{n-1}(x) = x P_n(x),   u_0 = 0,

and its AC-form with respect to a point ``theta`` is
``b_n = theta - A_n - C_n``, ``u_n = C_n A_{n-1}``, ``C_0 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cmv import pencil_recurrence
from .core import Polynomial, alternating, as_fractions, format_rational
from .errors import (
    DegenerateRecursion,
    IdentityViolation,
    InconsistentTheta,
    NotAPerfectSquare,
    ZeroAtTheta,
    ZeroSqrt,
)
from .opuc import ReflectionSequence


@dataclass(frozen=True)
class ACForm:
    A: tuple[Fraction, ...]
    C: tuple[Fraction, ...]
    theta: Fraction


@dataclass(frozen=True)
class ThreeTermRecurrence:
    b: tuple[Fraction, ...]
    u: tuple[Fraction, ...]
    ac: ACForm | None = None

    def __post_init__(self):
        if len(self.b) != len(self.u):
            raise ValueError("b and u must have equal length")
        if self.u and self.u[0] != 0:
            raise ValueError("u_0 must be 0")

    @classmethod
    def from_lists(cls, b: Sequence, u: Sequence) -> "ThreeTermRecurrence":
        return cls(as_fractions(b), as_fractions(u))

    @classmethod
    def from_ac(cls, A: Sequence, C: Sequence, theta) -> "ThreeTermRecurrence":
        """Canonical AC -> (b, u) conversion; length is ``min(len(A), len(C))``."""
        A, C, theta = as_fractions(A), as_fractions(C), Fraction(theta)
        if C and C[0] != 0:
            raise ValueError("C_0 must be 0")
        n = min(len(A), len(C))
        b = tuple(theta - A[k] - C[k] for k in range(n))
        u = tuple(Fraction(0) if k == 0 else C[k] * A[k - 1] for k in range(n))
        return cls(b, u, ACForm(A[:n], C[:n], theta))

    def __len__(self):
        return len(self.b)

    def truncate(self, n: int) -> "ThreeTermRecurrence":
        ac = None if self.ac is None else ACForm(self.ac.A[:n], self.ac.C[:n], self.ac.theta)
        return ThreeTermRecurrence(self.b[:n], self.u[:n], ac)

    def same_coefficients(self, other: "ThreeTermRecurrence") -> bool:
        return self.b == other.b and self.u == other.u

    def polynomials(self, n: int) -> list[Polynomial]:
        """Monic ``P_0, ..., P_n`` (needs ``n`` recurrence coefficients)."""
        return monic_polynomials(self.b, self.u, n)

    def to_json(self) -> dict:
        ac = None
        if self.ac is not None:
            ac = {
                "A": [format_rational(v) for v in self.ac.A],
                "C": [format_rational(v) for v in self.ac.C],
                "theta": format_rational(self.ac.theta),
            }
        return {
            "b": [format_rational(v) for v in self.b],
            "u": [format_rational(v) for v in self.u],
            "AC": ac,
        }


def monic_polynomials(b: Sequence, u: Sequence, n: int) -> list[Polynomial]:
    if n > len(b):
        raise ValueError(f"need {n} coefficients, have {len(b)}")
    x = Polynomial.x()
    polys = [Polynomial.constant(1)]
    prev = Polynomial.constant(0)
    for k in range(n):
        nxt = (x - b[k]) * polys[-1] - prev * u[k]
        prev = polys[-1]
        polys.append(nxt)
    return polys


@dataclass(frozen=True)
class ChristoffelResult:
    A: tuple[Fraction, ...]
    C: tuple[Fraction, ...]
    theta: Fraction
    original: ThreeTermRecurrence
    transformed: ThreeTermRecurrence
    checked_depth: int


def christoffel(rec: ThreeTermRecurrence, theta, check_depth: int = 8) -> ChristoffelResult:
    """Christoffel (kernel polynomial) step at ``theta``.

    Factors ``J - theta`` through the AC-form: ``A_0 = theta - b_0`` and
    ``C_k = u_k / A_{k-1}``, ``A_k = theta - b_k - C_k``.  The kernel
    polynomials ``(P_{n+1} - A_n P_n) / (x - theta)`` then satisfy a recurrence
    with ``b~_n = theta - A_n - C_{n+1}`` and ``u~_n = C_n A_n``.

    A recurrence of length N yields A, C of length N and a transformed
    recurrence of length N - 1.  ``A_n = P_{n+1}(theta) / P_n(theta)`` is
    re-derived by direct polynomial evaluation for ``n < check_depth``.

    Raises
    ------
    ZeroAtTheta
        If some ``A_k = 0``.
    """
    theta = Fraction(theta)
    n = len(rec)
    A, C = [], []
    for k in range(n):
        if k == 0:
            c = Fraction(0)
        else:
            if A[k - 1] == 0:
                raise ZeroAtTheta(k - 1)
            c = rec.u[k] / A[k - 1]
        C.append(c)
        A.append(theta - rec.b[k] - c)
    if A and A[-1] == 0:
        raise ZeroAtTheta(n - 1)

    depth = min(check_depth, n)
    if depth:
        polys = rec.polynomials(depth)
        values = [p(theta) for p in polys]
        for k in range(depth):
            if values[k + 1] != A[k] * values[k]:
                raise IdentityViolation(f"A_{k} != P_{k + 1}(theta)/P_{k}(theta)", k)

    A, C = tuple(A), tuple(C)
    tb = tuple(theta - A[k] - C[k + 1] for k in range(n - 1))
    tu = tuple(C[k] * A[k] for k in range(n - 1))
    original = ThreeTermRecurrence(rec.b, rec.u, ACForm(A, C, theta))
    return ChristoffelResult(A, C, theta, original, ThreeTermRecurrence(tb, tu), depth)


def geronimus(transformed: ThreeTermRecurrence, theta, A0) -> ThreeTermRecurrence:
    """Inverse of :func:`christoffel` given the free constant ``A_0``.

    Reads ``C_{n+1} = theta - b~_n - A_n`` and ``A_n = u~_n / C_n`` off the
    kernel recurrence; ``P_n = P~_n - C_n P~_{n-1}``.  Returns a recurrence of
    the same length as ``transformed``, with its AC-form attached.
    """
    theta, A0 = Fraction(theta), Fraction(A0)
    m = len(transformed)
    A, C = [A0], [Fraction(0)]
    for k in range(m):
        C.append(theta - transformed.b[k] - A[k])
        if k + 1 < m:
            if C[k + 1] == 0:
                raise DegenerateRecursion(f"C_{k + 1} = 0 in Geronimus inversion", k + 1)
            A.append(transformed.u[k + 1] / C[k + 1])
    return ThreeTermRecurrence.from_ac(A, C[:m], theta)


def geronimus_reconstruct(result: ChristoffelResult) -> ThreeTermRecurrence:
    """Rebuild the first ``N - 1`` coefficients of the input of :func:`christoffel`."""
    return geronimus(result.transformed, result.theta, result.A[0])


def kernel_polynomials(result: ChristoffelResult, n: int) -> list[Polynomial]:
    """``P~_k = (P_{k+1} - A_k P_k) / (x - theta)`` for ``k <= n`` by exact division."""
    polys = result.original.polynomials(n + 1)
    out = []
    for k in range(n + 1):
        num = polys[k + 1] - polys[k] * result.A[k]
        out.append(_divide_by_linear(num, result.theta))
    return out


def _divide_by_linear(p: Polynomial, theta: Fraction) -> Polynomial:
    # synthetic division by (x - theta); remainder must vanish
    coeffs = list(p.coeffs)
    q = [Fraction(0)] * (len(coeffs) - 1)
    acc = Fraction(0)
    for i in range(len(coeffs) - 1, 0, -1):
        acc = acc * theta + coeffs[i]
        q[i - 1] = acc
    if acc * theta + coeffs[0] != 0:
        raise IdentityViolation("polynomial does not vanish at theta")
    return Polynomial(q)


@dataclass(frozen=True)
class SDGResult:
    """Output of the SDG step: ``Q~_{n+1} + (-1)^n (lam-1) Q~_n + lam u*_n Q~_{n-1} = x Q~_n``."""

    ustar: tuple[Fraction, ...]
    lam: Fraction
    christoffel: ChristoffelResult
    recurrence: ThreeTermRecurrence


def sdg_closed_form(seq: ReflectionSequence, lam, n: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Closed-form A_k, C_k (k < n) of the pencil recurrence at ``theta = lam + 1``."""
    lam = Fraction(lam)
    A, C = [], []
    for k in range(n):
        a, prev = seq[k], seq[k - 1]
        if k % 2 == 0:
            A.append(1 - a)
            C.append(lam * (1 + prev))
        else:
            A.append(lam * (1 - a))
            C.append(1 + prev)
    return tuple(A), tuple(C)


def ustar(seq: ReflectionSequence, n: int) -> tuple[Fraction, ...]:
    return tuple((1 + seq[k - 1]) * (1 - seq[k]) for k in range(n))


def sdg_step(seq: ReflectionSequence, lam, n: int) -> SDGResult:
    """Christoffel step of the pencil recurrence at ``theta = lam + 1``.

    Runs the generic :func:`christoffel` on :func:`pencil_recurrence` and
    checks it against the closed forms ``A_k = 1 - a_k`` / ``lam (1 - a_k)``,
    ``C_k = lam (1 + a_{k-1})`` / ``1 + a_{k-1}`` (even / odd k).  The
    resulting recurrence (length ``n``) has diagonal ``(-1)^k (lam - 1)`` and
    off-diagonal ``lam u*_k`` with ``u*_k = (1 + a_{k-1})(1 - a_k)``.
    """
    lam = Fraction(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    for k in range(n + 1):
        if seq[k] == 1:
            raise ZeroAtTheta(k)
        if k >= 1 and seq[k - 1] == -1:
            raise ZeroAtTheta(k)
    pencil = pencil_recurrence(seq, lam, n + 1)
    res = christoffel(ThreeTermRecurrence(pencil.b, pencil.u), lam + 1)
    A, C = sdg_closed_form(seq, lam, n + 1)
    for k in range(n + 1):
        if res.A[k] != A[k] or res.C[k] != C[k]:
            raise IdentityViolation(f"SDG closed form disagrees with Christoffel output at n={k}", k)
    us = ustar(seq, n)
    rec = ThreeTermRecurrence(
        tuple(alternating(k) * (lam - 1) for k in range(n)),
        tuple(lam * v for v in us),
    )
    if not rec.same_coefficients(res.transformed):
        bad = next(k for k in range(n) if (rec.b[k], rec.u[k]) != (res.transformed.b[k], res.transformed.u[k]))
        raise IdentityViolation(f"SDG recurrence disagrees with kernel recurrence at n={bad}", bad)
    return SDGResult(us, lam, res, rec)


@dataclass(frozen=True)
class RescaleResult:
    chi: Fraction
    lam: Fraction
    sqrt_lam: Fraction
    lam0: Fraction
    recurrence: ThreeTermRecurrence


def rescale(sdg: SDGResult, lam, sqrt_lambda, lam0) -> RescaleResult:
    """Rescaled recurrence ``S_{n+1} + (-1)^n chi S_n + lam0 u*_n S_{n-1} = x S_n``.

    ``chi = lam0 s - 1/s`` for the caller-supplied rational ``s`` with
    ``s^2 = lam`` (the sign of ``s`` is the caller's branch choice).  When
    ``sdg`` was computed at ``lam * lam0`` the result is also checked against
    direct substitution ``x -> s x`` in its recurrence.
    """
    lam, s, lam0 = Fraction(lam), Fraction(sqrt_lambda), Fraction(lam0)
    if s == 0:
        raise ZeroSqrt("square root of lambda must be nonzero")
    if s * s != lam:
        raise NotAPerfectSquare(f"({format_rational(s)})^2 != {format_rational(lam)}")
    chi = lam0 * s - 1 / s
    n = len(sdg.ustar)
    rec = ThreeTermRecurrence(
        tuple(alternating(k) * chi for k in range(n)),
        tuple(lam0 * v for v in sdg.ustar),
    )
    if sdg.lam == lam * lam0:
        direct = ThreeTermRecurrence(
            tuple(v / s for v in sdg.recurrence.b),
            tuple(v / lam for v in sdg.recurrence.u),
        )
        if not direct.same_coefficients(rec):
            raise IdentityViolation("rescaled recurrence disagrees with direct substitution")
    return RescaleResult(chi, lam, s, lam0, rec)


def chihara_split(A: Sequence, C: Sequence, chi, n: int) -> ThreeTermRecurrence:
    """Recurrence ``S_{k+1} + (-1)^k chi S_k + v_k S_{k-1} = x S_k`` for ``k < n``.

    ``v_{2m} = -C_m`` and ``v_{2m+1} = -A_m``.
    """
    chi = Fraction(chi)
    need = (n + 1) // 2
    if len(A) < n // 2 or len(C) < need:
        raise ValueError(f"need A, C up to index {need - 1}")
    v = tuple(-Fraction(C[k // 2]) if k % 2 == 0 else -Fraction(A[k // 2]) for k in range(n))
    return ThreeTermRecurrence(tuple(alternating(k) * chi for k in range(n)), v)


@dataclass(frozen=True)
class ChiharaReport:
    passed: bool
    depth: int
    first_failure: str | None = None


def chihara_polynomial_check(P_rec: ThreeTermRecurrence, tP_rec: ThreeTermRecurrence, alpha, c2, chi,
                             depth: int) -> ChiharaReport:
    """Compare ``S_{2n}`` with ``P_n(x^2 + alpha - c2)`` and ``S_{2n+1}`` with
    ``(x - chi) P~_n(x^2 + alpha - c2)`` as explicit polynomials, ``n <= depth``.

    ``P_rec`` must carry its AC-form at ``theta = chi^2 + alpha - c2``;
    ``tP_rec`` is its Christoffel transform at the same point.
    """
    alpha, c2, chi = Fraction(alpha), Fraction(c2), Fraction(chi)
    if P_rec.ac is None:
        raise InconsistentTheta("P recurrence carries no AC-form")
    theta = chi * chi + alpha - c2
    if P_rec.ac.theta != theta:
        raise InconsistentTheta(
            f"theta = {format_rational(P_rec.ac.theta)} but chi^2 + alpha - c^2 = {format_rational(theta)}"
        )
    x = Polynomial.x()
    y = x * x + (alpha - c2)
    S_rec = chihara_split(P_rec.ac.A, P_rec.ac.C, chi, 2 * depth + 1)
    S = S_rec.polynomials(2 * depth + 1)
    P = P_rec.polynomials(depth)
    tP = tP_rec.polynomials(depth)
    for k in range(depth + 1):
        if S[2 * k] != P[k].compose(y):
            return ChiharaReport(False, depth, f"S_{2 * k} != P_{k}(x^2 + alpha - c^2)")
        if S[2 * k + 1] != (x - chi) * tP[k].compose(y):
            return ChiharaReport(False, depth, f"S_{2 * k + 1} != (x - chi) P~_{k}(x^2 + alpha - c^2)")
    return ChiharaReport(True, depth)
