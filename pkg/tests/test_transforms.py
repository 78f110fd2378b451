from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import rationals, reflection_lists
from oracles import kernel_polynomial, monic_from_recurrence
from opdc.errors import DegenerateRecursion, InconsistentTheta, NotAPerfectSquare, ZeroAtTheta, ZeroSqrt
from opdc.opuc import ReflectionSequence
from opdc.transforms import (
    ThreeTermRecurrence,
    chihara_polynomial_check,
    chihara_split,
    christoffel,
    geronimus,
    geronimus_reconstruct,
    kernel_polynomials,
    rescale,
    sdg_closed_form,
    sdg_step,
    ustar,
)

X = sp.symbols("x")


def chebyshev_like(n):
    return ThreeTermRecurrence.from_lists([0] * n, [0] + ["1/4"] * (n - 1))


@st.composite
def recurrences(draw, n=6):
    b = draw(st.lists(rationals(), min_size=n, max_size=n))
    u = [Fraction(0)] + draw(st.lists(rationals(nonzero=True), min_size=n - 1, max_size=n - 1))
    return ThreeTermRecurrence(tuple(b), tuple(u))


def test_christoffel_example():
    res = christoffel(chebyshev_like(6), 1)
    assert res.A[:4] == (1, Fraction(3, 4), Fraction(2, 3), Fraction(5, 8))
    assert res.C[:4] == (0, Fraction(1, 4), Fraction(1, 3), Fraction(3, 8))
    assert res.transformed.b[0] == Fraction(-1, 4)
    assert res.transformed.u[1] == Fraction(3, 16)
    assert len(res.transformed) == 5 and res.original.ac.theta == 1


def test_christoffel_zero_at_theta():
    rec = ThreeTermRecurrence.from_lists(["2", "0"], ["0", "1"])
    with pytest.raises(ZeroAtTheta) as err:
        christoffel(rec, 2)
    assert err.value.index == 0


@given(recurrences(), rationals())
def test_christoffel_matches_kernel_polynomial_definition(rec, theta):
    try:
        res = christoffel(rec, theta)
    except ZeroAtTheta:
        assume(False)
    P = monic_from_recurrence(rec.b, rec.u, len(rec), X)
    tP = monic_from_recurrence(res.transformed.b, res.transformed.u, len(rec) - 1, X)
    th = sp.Rational(str(theta))
    for k in range(len(rec) - 1):
        assert res.A[k] == Fraction(str(P[k + 1].subs(X, th) / P[k].subs(X, th)))
        assert sp.expand(kernel_polynomial(P[k + 1], P[k], theta, X).as_expr() - tP[k]) == 0
    ours = kernel_polynomials(res, len(rec) - 2)
    for k, p in enumerate(ours):
        assert [sp.Rational(str(c)) for c in p.coeffs] == sp.Poly(tP[k], X).all_coeffs()[::-1]


@given(recurrences(n=8), rationals())
def test_christoffel_geronimus_roundtrip(rec, theta):
    try:
        res = christoffel(rec, theta)
        back = geronimus_reconstruct(res)
    except (ZeroAtTheta, DegenerateRecursion):
        assume(False)
    assert back.same_coefficients(rec.truncate(len(rec) - 1))
    assert back.ac.A == res.A[: len(back)]


def test_geronimus_free_constant_changes_result():
    res = christoffel(chebyshev_like(6), 1)
    other = geronimus(res.transformed, 1, 2)
    assert not other.same_coefficients(res.original.truncate(5))
    assert other.ac.A[0] == 2


def test_ustar_example_and_seed():
    seq = ReflectionSequence.from_list(["1/2", "-1/3", "1/4", "1/5"])
    assert ustar(seq, 3) == (0, 2, Fraction(1, 2))
    res = sdg_step(seq, 2, 3)
    assert res.ustar == (0, 2, Fraction(1, 2))
    assert res.recurrence.b == (1, -1, 1)
    assert res.recurrence.u == (0, 4, 1)


@given(reflection_lists(min_size=8, max_size=8), rationals(nonzero=True), rationals(nonzero=True))
def test_sdg_closed_form_and_lambda_invariance(a, lam1, lam2):
    assume(lam1 != lam2)
    seq = ReflectionSequence.from_list(a)
    try:
        r1, r2 = sdg_step(seq, lam1, 6), sdg_step(seq, lam2, 6)
    except ZeroAtTheta:
        assume(False)
    assert (r1.christoffel.A, r1.christoffel.C) == sdg_closed_form(seq, lam1, 7)
    assert r1.ustar == r2.ustar == ustar(seq, 6)
    assert r1.ustar[0] == 0
    assert all(b == (-1) ** k * (lam1 - 1) for k, b in enumerate(r1.recurrence.b))


def test_sdg_degenerate_inputs():
    with pytest.raises(ZeroAtTheta):
        sdg_step(ReflectionSequence.from_list(["1/2", "1", "0"]), 2, 2)
    with pytest.raises(ZeroAtTheta):
        sdg_step(ReflectionSequence.from_list(["-1", "1/3", "0"]), 2, 2)
    with pytest.raises(ValueError):
        sdg_step(ReflectionSequence.from_list(["1/2", "1/3"]), 0, 1)


def test_rescale_examples():
    seq = ReflectionSequence.from_list(["1/2", "-1/3", "1/4", "1/5"])
    sdg = sdg_step(seq, 4, 3)
    assert rescale(sdg, 4, 2, 1).chi == Fraction(3, 2)
    assert rescale(sdg_step(seq, 1, 3), 1, 1, 1).chi == 0
    res = rescale(sdg_step(seq, Fraction(-119, 289), 3), Fraction(144, 289), Fraction(-12, 17), Fraction(-119, 144))
    assert res.chi == 2
    assert res.recurrence.u == tuple(Fraction(-119, 144) * v for v in ustar(seq, 3))
    with pytest.raises(NotAPerfectSquare):
        rescale(sdg, 4, 3, 1)
    with pytest.raises(ZeroSqrt):
        rescale(sdg, 0, 0, 1)


@given(reflection_lists(min_size=7, max_size=7), rationals(nonzero=True), rationals(nonzero=True))
def test_rescale_equals_direct_substitution(a, s, lam0):
    seq = ReflectionSequence.from_list(a)
    try:
        sdg = sdg_step(seq, s * s * lam0, 5)
    except ZeroAtTheta:
        assume(False)
    res = rescale(sdg, s * s, s, lam0)
    assert res.chi == lam0 * s - 1 / s
    assert res.recurrence.b == tuple(v / s for v in sdg.recurrence.b)


def test_chihara_split_examples():
    A = [Fraction(234, 53), Fraction(5)]
    C = [Fraction(0), Fraction(9, 106)]
    rec = chihara_split(A, C, 0, 4)
    assert rec.u == (0, Fraction(-234, 53), Fraction(-9, 106), -5)
    assert rec.b == (0, 0, 0, 0)
    assert chihara_split(A, C, 2, 3).b == (2, -2, 2)


@given(st.lists(rationals(), min_size=4, max_size=4), st.lists(rationals(), min_size=4, max_size=4), rationals())
def test_chihara_split_inverts(A, C, chi):
    C = [Fraction(0)] + C[1:]
    rec = chihara_split(A, C, chi, 8)
    assert [-v for v in rec.u[0::2]] == C
    assert [-v for v in rec.u[1::2]] == A


def test_chihara_polynomial_check_chebyshev_like():
    res = christoffel(chebyshev_like(4), -1)
    rep = chihara_polynomial_check(res.original, res.transformed, 0, 1, 0, 1)
    assert rep.passed


def test_chihara_polynomial_check_against_sympy():
    res = christoffel(chebyshev_like(5), -1)
    P = monic_from_recurrence(res.original.b, res.original.u, 2, X)
    rec = chihara_split(res.A, res.C, 0, 5)
    S = monic_from_recurrence(rec.b, rec.u, 5, X)
    assert sp.expand(S[4] - P[2].subs(X, X ** 2 - 1)) == 0


def test_chihara_inconsistent_theta():
    res = christoffel(chebyshev_like(4), -1)
    with pytest.raises(InconsistentTheta):
        chihara_polynomial_check(res.original, res.transformed, 0, 2, 0, 1)
    with pytest.raises(InconsistentTheta):
        chihara_polynomial_check(chebyshev_like(4), res.transformed, 0, 1, 0, 1)


@given(recurrences(n=8), rationals(), rationals(), rationals())
def test_chihara_polynomial_identity(rec, chi, alpha, theta):
    try:
        res = christoffel(rec, theta)
    except ZeroAtTheta:
        assume(False)
    c2 = chi * chi + alpha - theta
    assert chihara_polynomial_check(res.original.truncate(7), res.transformed, alpha, c2, chi, 6).passed


def test_recurrence_validation_and_json():
    with pytest.raises(ValueError):
        ThreeTermRecurrence.from_lists([0, 0], [1, 0])
    with pytest.raises(ValueError):
        ThreeTermRecurrence.from_lists([0], [0, 0])
    rec = ThreeTermRecurrence.from_ac(["1", "3/4"], ["0", "1/4"], 1)
    assert rec.to_json() == {"b": ["0", "0"], "u": ["0", "1/4"],
                             "AC": {"A": ["1", "3/4"], "C": ["0", "1/4"], "theta": "1"}}
