"""Bannai-Ito, complementary Bannai-Ito and Racah-Wilson coefficient generators.

All generators are exact.  Every denominator factor is checked before it is
used, and a vanishing factor raises :class:`PoleInParameters` naming it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .cmv import pencil_recurrence
from .core import as_fractions, format_rational, parse_rational
from .errors import DegenerateRecursion, IdentityViolation, OPDCError, PoleInParameters
from .opuc import ReflectionSequence
from .transforms import ThreeTermRecurrence

HALF = Fraction(1, 2)


def _div(num: Fraction, den: Fraction, factor: str, index: int | None = None) -> Fraction:
    if den == 0:
        raise PoleInParameters(factor, index)
    return num / den


@dataclass(frozen=True)
class BIParameters:
    rho1: Fraction
    rho2: Fraction
    r1: Fraction
    r2: Fraction

    def __post_init__(self):
        for name in ("rho1", "rho2", "r1", "r2"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))

    @property
    def g(self) -> Fraction:
        return self.rho1 + self.rho2 - self.r1 - self.r2

    def as_tuple(self):
        return (self.rho1, self.rho2, self.r1, self.r2)

    def to_json(self) -> dict:
        return {k: format_rational(v) for k, v in zip(("rho1", "rho2", "r1", "r2"), self.as_tuple())}


@dataclass(frozen=True)
class RWParameters:
    beta1: Fraction
    beta2: Fraction
    beta3: Fraction
    beta4: Fraction

    def __post_init__(self):
        for name in ("beta1", "beta2", "beta3", "beta4"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))

    @property
    def sigma(self) -> Fraction:
        return self.beta1 + self.beta2 + self.beta3 + self.beta4

    def as_tuple(self):
        return (self.beta1, self.beta2, self.beta3, self.beta4)

    def to_json(self) -> dict:
        return {f"beta{i + 1}": format_rational(v) for i, v in enumerate(self.as_tuple())}


@dataclass(frozen=True)
class BICoefficients:
    A: tuple[Fraction, ...]
    C: tuple[Fraction, ...]
    rec: ThreeTermRecurrence


@dataclass(frozen=True)
class CBICoefficients:
    v: tuple[Fraction, ...]
    rec: ThreeTermRecurrence


@dataclass(frozen=True)
class BISeed:
    a0: Fraction
    lambda0: Fraction
    lambda_bi: Fraction
    sqrt_lambda_bi: Fraction


# -- Bannai-Ito ---------------------------------------------------------------


def bi_A(p: BIParameters, k: int) -> Fraction:
    rho1, rho2, r1, r2 = p.as_tuple()
    den = 4 * (k + 1 - r1 - r2 + rho1 + rho2)
    if k % 2 == 0:
        num = (k + 1 + 2 * rho1 - 2 * r1) * (k + 1 + 2 * rho1 - 2 * r2)
    else:
        num = (k + 1 - 2 * r1 - 2 * r2 + 2 * rho1 + 2 * rho2) * (k + 1 + 2 * rho1 + 2 * rho2)
    return _div(num, den, "(k+1+g)", k)


def bi_C(p: BIParameters, k: int) -> Fraction:
    rho1, rho2, r1, r2 = p.as_tuple()
    den = 4 * (k - r1 - r2 + rho1 + rho2)
    if k % 2 == 0:
        num = -k * (k - 2 * r1 - 2 * r2)
    else:
        num = -(k - 2 * r2 + 2 * rho2) * (k - 2 * r1 + 2 * rho2)
    return _div(num, den, "(k+g)", k)


def bi_coeffs(p: BIParameters, n: int) -> BICoefficients:
    """A_k, C_k (k < n) of the Bannai-Ito recurrence and its (b, u) form.

    ``b_k = rho1 - A_k - C_k`` and ``u_k = A_{k-1} C_k``; the recurrence
    carries its AC-form at ``theta = rho1``.
    """
    A = tuple(bi_A(p, k) for k in range(n))
    C = tuple(bi_C(p, k) for k in range(n))
    return BICoefficients(A, C, ThreeTermRecurrence.from_ac(A, C, p.rho1))


def cbi_v(p: BIParameters, k: int) -> Fraction:
    rho1, rho2, r1, r2 = p.as_tuple()
    g = p.g
    m = k // 2
    if k % 2 == 0:
        num = -m * (m + rho1 - r1 + HALF) * (m + rho1 - r2 + HALF) * (m - r1 - r2)
        den1, den2 = 2 * m + 1 + g, 2 * m + g
        names = ("(2m+1+g)", "(2m+g)")
    else:
        num = -(m + g + 1) * (m + rho1 + rho2 + 1) * (m + rho2 - r1 + HALF) * (m + rho2 - r2 + HALF)
        den1, den2 = 2 * m + 1 + g, 2 * m + g + 2
        names = ("(2m+1+g)", "(2m+g+2)")
    if den1 == 0:
        raise PoleInParameters(names[0], k)
    return _div(num / den1, den2, names[1], k)


def cbi_coeffs(p: BIParameters, n: int) -> CBICoefficients:
    """Complementary Bannai-Ito data: ``W_{k+1} + (-1)^k rho2 W_k + v_k W_{k-1} = x W_k``."""
    v = tuple(cbi_v(p, k) for k in range(n))
    b = tuple(p.rho2 if k % 2 == 0 else -p.rho2 for k in range(n))
    return CBICoefficients(v, ThreeTermRecurrence(b, v))


def bi_seed(p: BIParameters) -> BISeed:
    """Seed ``a_0``, ``lambda_0`` and the signed root ``s = 2/(-rho2 - r2 - 1/2)``.

    With ``lambda_BI = s^2`` one has ``lambda_0 s - 1/s = rho2`` exactly.
    """
    rho1, rho2, r1, r2 = p.as_tuple()
    left = -rho2 - r2 - HALF
    right = rho2 - r2 - HALF
    if left == 0:
        raise PoleInParameters("(-rho2-r2-1/2)")
    if right == 0:
        raise PoleInParameters("(rho2-r2-1/2)")
    a0 = 1 - 2 * _div((rho1 - r2 + HALF) * (-r1 - r2), left * (p.g + 1), "(g+1)", 0)
    lam0 = left * right / 4
    s = 2 / left
    return BISeed(a0, lam0, s * s, s)


def bi_reflection_term(p: BIParameters, k: int) -> Fraction:
    """Closed-form reflection parameter ``a_k`` whose SDG image is the complementary BI family."""
    rho1, rho2, r1, r2 = p.as_tuple()
    g = p.g
    if k + g + 1 == 0:
        raise PoleInParameters("(k+g+1)", k)
    if k % 2 == 0:
        den = -rho2 - r2 - HALF
        if den == 0:
            raise PoleInParameters("(-rho2-r2-1/2)", k)
        num = (rho1 - r2 + Fraction(k + 1, 2)) * (-r1 - r2 + Fraction(k, 2))
    else:
        den = rho2 - r2 - HALF
        if den == 0:
            raise PoleInParameters("(rho2-r2-1/2)", k)
        num = (g + Fraction(k + 1, 2)) * (rho2 - r2 + Fraction(k, 2))
    return 1 - 2 * num / (den * (k + g + 1))


def bi_reflection(p: BIParameters, n: int, mode: str = "closed_form") -> tuple[Fraction, ...]:
    """Reflection parameters ``a_0 .. a_{n-1}`` for the complementary BI identification.

    ``mode="closed_form"`` evaluates the parity-split closed form;
    ``mode="recursive"`` starts from the seed ``a_0`` and iterates
    ``a_k = 1 - v_k / (lambda_0 (1 + a_{k-1}))`` for ``k >= 1``.
    """
    if mode == "closed_form":
        return tuple(bi_reflection_term(p, k) for k in range(n))
    if mode != "recursive":
        raise ValueError(f"unknown mode {mode!r}")
    seed = bi_seed(p)
    if n == 0:
        return ()
    v = cbi_coeffs(p, n).v
    if seed.lambda0 == 0:
        raise PoleInParameters("lambda0")
    a = [seed.a0]
    for k in range(1, n):
        if 1 + a[k - 1] == 0:
            raise DegenerateRecursion(f"1 + a_{k - 1} = 0", k)
        a.append(1 - v[k] / (seed.lambda0 * (1 + a[k - 1])))
    return tuple(a)


def bi_sequence(p: BIParameters) -> ReflectionSequence:
    return ReflectionSequence.from_generator(lambda k: bi_reflection_term(p, k), label="bannai-ito")


# -- Racah-Wilson -------------------------------------------------------------


def rw_A(p: RWParameters, k: int) -> Fraction:
    b1, b2, b3, b4 = p.as_tuple()
    s = p.sigma
    num = (k + s - 1) * (k + b1 + b2) * (k + b1 + b3) * (k + b1 + b4)
    d1, d2 = 2 * k + s - 1, 2 * k + s
    if d1 == 0:
        raise PoleInParameters("(2k+sigma-1)", k)
    return _div(num / d1, d2, "(2k+sigma)", k)


def rw_C(p: RWParameters, k: int) -> Fraction:
    b1, b2, b3, b4 = p.as_tuple()
    s = p.sigma
    num = k * (k + b2 + b3 - 1) * (k + b2 + b4 - 1) * (k + b3 + b4 - 1)
    d1, d2 = 2 * k + s - 1, 2 * k + s - 2
    if d1 == 0:
        raise PoleInParameters("(2k+sigma-1)", k)
    return _div(num / d1, d2, "(2k+sigma-2)", k)


def rw_coeffs(p: RWParameters, n: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    return tuple(rw_A(p, k) for k in range(n)), tuple(rw_C(p, k) for k in range(n))


def rw_recurrence(p: RWParameters, n: int) -> ThreeTermRecurrence:
    """Wilson recurrence ``W_{k+1} + (A_k + C_k - beta1^2) W_k + A_{k-1} C_k W_{k-1} = x W_k``."""
    A, C = rw_coeffs(p, n)
    b = tuple(A[k] + C[k] - p.beta1 ** 2 for k in range(n))
    u = tuple(Fraction(0) if k == 0 else A[k - 1] * C[k] for k in range(n))
    return ThreeTermRecurrence(b, u)


def beta_map(p: BIParameters) -> RWParameters:
    """``(beta1, beta2, beta3, beta4) = (rho2, 1 + rho1, 1/2 - r1, 1/2 - r2)``; sigma = g + 2."""
    return RWParameters(p.rho2, 1 + p.rho1, HALF - p.r1, HALF - p.r2)


def rw_reflection_term(p: RWParameters, k: int) -> Fraction:
    b1, b2, b3, b4 = p.as_tuple()
    s = p.sigma
    if k + s - 1 == 0:
        raise PoleInParameters("(k+sigma-1)", k)
    if k % 2 == 0:
        den = b4 - b1 - 1
        if den == 0:
            raise PoleInParameters("(beta4-beta1-1)", k)
        num = (b2 + b4 + Fraction(k, 2) - 1) * (b3 + b4 + Fraction(k, 2) - 1)
    else:
        den = b1 + b4 - 1
        if den == 0:
            raise PoleInParameters("(beta1+beta4-1)", k)
        num = (s + Fraction(k, 2) - Fraction(3, 2)) * (b1 + b4 + Fraction(k, 2) - HALF)
    return 1 - 2 * num / (den * (k + s - 1))


def rw_reflection(p: RWParameters, n: int) -> tuple[Fraction, ...]:
    return tuple(rw_reflection_term(p, k) for k in range(n))


# -- Bannai-Ito polynomials as pencil polynomials ------------------------------


def subs1(p: BIParameters) -> BIParameters:
    """``(rho1, rho2, r1, r2) -> (-r2 - 1/2, rho1, r1, -rho2 - 1/2)``; preserves g."""
    return BIParameters(-p.r2 - HALF, p.rho1, p.r1, -p.rho2 - HALF)


def q_reflection_term(p: BIParameters, k: int) -> Fraction:
    """Closed form of ``bi_reflection_term(subs1(p), k)`` written in the original parameters.

    Even k: ``1 - 2 (rho2 - r2 + (k+1)/2)(rho2 - r1 + (k+1)/2) / ((rho2 - rho1)(k + g + 1))``;
    odd k:  ``1 - 2 (g + (k+1)/2)(rho1 + rho2 + (k+1)/2) / ((rho1 + rho2)(k + g + 1))``.
    """
    rho1, rho2, r1, r2 = p.as_tuple()
    g = p.g
    h = Fraction(k + 1, 2)
    if k + g + 1 == 0:
        raise PoleInParameters("(k+g+1)", k)
    if k % 2 == 0:
        den = rho2 - rho1
        if den == 0:
            raise PoleInParameters("(rho2-rho1)", k)
        num = (rho2 - r2 + h) * (rho2 - r1 + h)
    else:
        den = rho1 + rho2
        if den == 0:
            raise PoleInParameters("(rho1+rho2)", k)
        num = (g + h) * (rho1 + rho2 + h)
    return 1 - 2 * num / (den * (k + g + 1))


def q_reflection_term_swapped(p: BIParameters, k: int) -> Fraction:
    """Variant of :func:`q_reflection_term` with rho1 and rho2 interchanged in the even branch.

    It does not satisfy the identification; reports use it to show the first
    index where the two disagree.
    """
    if k % 2:
        return q_reflection_term(p, k)
    rho1, rho2, r1, r2 = p.as_tuple()
    h = Fraction(k + 1, 2)
    den = (rho1 - rho2) * (k + p.g + 1)
    return 1 - 2 * _div((rho1 - r2 + h) * (rho1 - r1 + h), den, "(rho1-rho2)(k+g+1)", k)


@dataclass(frozen=True)
class IdentifyQReport:
    passed: bool
    n: int
    lam: Fraction
    a: tuple[Fraction, ...]
    first_failure: int | None = None
    failure: str | None = None
    swapped_form_first_mismatch: int | None = None

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "n": self.n,
            "lambda": format_rational(self.lam),
            "first_failure": self.first_failure,
            "failure": self.failure,
            "swapped_form_first_mismatch": self.swapped_form_first_mismatch,
        }


def bi_identify_q(p: BIParameters, n: int, strict: bool = False) -> IdentifyQReport:
    """Check that the pencil polynomials Q_n(x; lam) are renormalized Bannai-Ito polynomials.

    With ``a_k`` from :func:`q_reflection_term` (cross-checked against
    ``bi_reflection(subs1(p))``) and ``lam = (rho2 + rho1)/(rho2 - rho1)``::

        b_k(lam) = 2 (rho1 - A_k - C_k) / (rho2 - rho1)
        u_k(lam) = 4 A_{k-1} C_k / (rho2 - rho1)^2

    where ``A, C`` are the Bannai-Ito coefficients of ``p``.
    """
    rho1, rho2 = p.rho1, p.rho2
    if rho2 == rho1:
        raise PoleInParameters("(rho2-rho1)")
    if rho2 == -rho1:
        raise PoleInParameters("(rho2+rho1)")
    lam = (rho2 + rho1) / (rho2 - rho1)

    def fail(msg, k=None):
        if strict:
            raise IdentityViolation(msg, k)
        return IdentifyQReport(False, n, lam, a, k, msg, swapped)

    a = tuple(q_reflection_term(p, k) for k in range(n))
    swapped = None
    for k in range(n):
        try:
            if q_reflection_term_swapped(p, k) != a[k]:
                swapped = k
                break
        except PoleInParameters:
            swapped = k
            break

    q = subs1(p)
    if bi_reflection(q, n) != a:
        k = next(i for i, (x, y) in enumerate(zip(bi_reflection(q, n), a)) if x != y)
        return fail("closed form disagrees with subs1 path", k)
    seed = bi_seed(q)
    if seed.lambda0 * seed.lambda_bi != lam:
        return fail("lambda0 * lambda_BI != (rho2+rho1)/(rho2-rho1) under subs1")

    coeffs = bi_coeffs(p, n)
    pen = pencil_recurrence(ReflectionSequence.from_list(a), lam, n)
    d = rho2 - rho1
    for k in range(n):
        if pen.b[k] != 2 * (rho1 - coeffs.A[k] - coeffs.C[k]) / d:
            return fail(f"b_{k}(lambda) mismatch", k)
        target_u = Fraction(0) if k == 0 else 4 * coeffs.A[k - 1] * coeffs.C[k] / (d * d)
        if pen.u[k] != target_u:
            return fail(f"u_{k}(lambda) mismatch", k)
    return IdentifyQReport(True, n, lam, a, None, None, swapped)


# -- generator registry and sampling ------------------------------------------


def reflection_generator(family: str, params: dict) -> ReflectionSequence:
    """Closed-form reflection sequence for ``family`` in {"bannai-ito", "bannai-ito-q", "racah-wilson"}."""
    if family == "bannai-ito":
        p = BIParameters(**params)
        return ReflectionSequence.from_generator(lambda k: bi_reflection_term(p, k), label=family)
    if family == "bannai-ito-q":
        p = BIParameters(**params)
        return ReflectionSequence.from_generator(lambda k: q_reflection_term(p, k), label=family)
    if family == "racah-wilson":
        p = RWParameters(**params)
        return ReflectionSequence.from_generator(lambda k: rw_reflection_term(p, k), label=family)
    raise ValueError(f"unknown family {family!r}")


def random_rational(rng: random.Random, bound: int = 20) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_bi_parameters(rng: random.Random, bound: int = 20, admissible=None,
                         max_attempts: int = 1000) -> BIParameters:
    """Draw ``BIParameters`` with entries ``p/q``, ``|p|, q <= bound``.

    Draws for which ``admissible(p)`` raises an :class:`OPDCError` or returns
    False are rejected and redrawn.
    """
    for _ in range(max_attempts):
        p = BIParameters(*(random_rational(rng, bound) for _ in range(4)))
        if admissible is None:
            return p
        try:
            if admissible(p) is not False:
                return p
        except (OPDCError, ZeroDivisionError):
            continue
    raise RuntimeError(f"no admissible parameters after {max_attempts} draws")


def parse_bi(params: dict) -> BIParameters:
    return BIParameters(*as_fractions([params["rho1"], params["rho2"], params["r1"], params["r2"]]))
