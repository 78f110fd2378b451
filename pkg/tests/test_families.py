import random
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from conftest import rationals
from opdc import families as fam
from opdc.errors import DegenerateRecursion, OPDCError, PoleInParameters
from opdc.suites import bi_admissible
from opdc.transforms import chihara_split, christoffel

F = Fraction
params = st.builds(fam.BIParameters, rationals(), rationals(), rationals(), rationals())


def admissible(p, n):
    try:
        return bi_admissible(p, n)
    except (OPDCError, ZeroDivisionError):
        return False


# -- worked instance (1, 2, 1/4, 1/3) --------------------------------------------------


def test_bi_coeffs_worked(worked):
    bi = fam.bi_coeffs(worked, 3)
    assert bi.A[0] == F(35, 82)
    assert bi.C[1] == F(-117, 82)
    assert bi.C[0] == 0
    assert bi.rec.b[0] == 1 - F(35, 82)
    assert bi.rec.u[1] == bi.A[0] * bi.C[1]


def test_cbi_worked(worked):
    cbi = fam.cbi_coeffs(worked, 3)
    assert cbi.v == (0, F(-234, 53), F(-9, 106))
    assert cbi.rec.b == (2, -2, 2)


def test_seed_worked(worked):
    s = fam.bi_seed(worked)
    assert (s.a0, s.lambda0, s.lambda_bi, s.sqrt_lambda_bi) == (F(599, 697), F(-119, 144), F(144, 289), F(-12, 17))
    assert s.lambda0 * s.sqrt_lambda_bi - 1 / s.sqrt_lambda_bi == 2


def test_reflection_worked(worked):
    for mode in ("closed_form", "recursive"):
        assert fam.bi_reflection(worked, 2, mode=mode) == (F(599, 697), F(-695, 371))
    s = fam.bi_seed(worked)
    assert s.lambda0 * (1 + s.a0) == F(-63, 41)
    assert s.lambda0 * (1 + F(-1)) * (1 - s.a0) == 0
    with pytest.raises(ValueError):
        fam.bi_reflection(worked, 2, mode="other")


def test_rw_worked(worked):
    beta = fam.beta_map(worked)
    assert beta.as_tuple() == (2, 2, F(1, 4), F(1, 6))
    assert beta.sigma == F(53, 12) == worked.g + 2
    A, C = fam.rw_coeffs(beta, 2)
    assert A[0] == F(234, 53) and C[1] == F(9, 106) and C[0] == 0
    assert fam.rw_reflection(beta, 1) == (F(599, 697),)
    v = chihara_split(A, C, 0, 3).u
    assert v == (0, F(-234, 53), F(-9, 106))


def test_beta_map_trivial():
    assert fam.beta_map(fam.BIParameters(0, 0, F(1, 2), F(1, 2))).as_tuple() == (0, 1, 0, 0)


def test_subs1_worked(worked):
    q = fam.subs1(worked)
    assert q.as_tuple() == (F(-5, 6), 1, F(1, 4), F(-5, 2))
    assert q.g == worked.g
    assert fam.subs1(q) != worked


def test_identify_q_worked(worked):
    rep = fam.bi_identify_q(worked, 50)
    assert rep.passed and rep.lam == 3
    b0 = 2 * (worked.rho1 - F(35, 82) - 0) / (worked.rho2 - worked.rho1)
    assert b0 == F(47, 41)
    assert oracles.pencil_b_u(rep.a, rep.lam, 0)[0] == b0
    assert rep.swapped_form_first_mismatch == 0
    assert rep.to_json()["lambda"] == "3"


# -- poles and errors -----------------------------------------------------------------------


def test_poles_name_the_factor():
    p = fam.BIParameters(0, 0, F(1, 2), F(1, 2))
    with pytest.raises(PoleInParameters) as err:
        fam.bi_coeffs(p, 2)
    assert "k+1+g" in str(err.value) and err.value.index == 0
    with pytest.raises(PoleInParameters):
        fam.bi_seed(fam.BIParameters(0, F(-1, 2), 0, 0))
    with pytest.raises(PoleInParameters):
        fam.rw_reflection(fam.RWParameters(1, 2, 3, 2), 2)
    with pytest.raises(PoleInParameters):
        fam.bi_identify_q(fam.BIParameters(1, 1, F(1, 4), F(1, 3)), 3)


def test_recursive_mode_degenerate():
    # a_0 = -1 forces a zero divisor at k = 1
    found = None
    rng = random.Random(3)
    for _ in range(20000):
        p = fam.BIParameters(*(fam.random_rational(rng, 6) for _ in range(4)))
        try:
            if fam.bi_seed(p).a0 == -1 and fam.bi_seed(p).lambda0 != 0:
                found = p
                break
        except (OPDCError, ZeroDivisionError):
            continue
    assert found is not None
    with pytest.raises(DegenerateRecursion):
        fam.bi_reflection(found, 3, mode="recursive")


def test_parameter_parsing():
    p = fam.parse_bi({"rho1": "1", "rho2": "2", "r1": "1/4", "r2": "1/3"})
    assert p == fam.BIParameters(1, 2, F(1, 4), F(1, 3))
    assert fam.BIParameters("1", "2", "1/4", "1/3") == p
    assert p.to_json() == {"rho1": "1", "rho2": "2", "r1": "1/4", "r2": "1/3"}


def test_reflection_generator_registry(worked):
    params = worked.to_json()
    assert fam.reflection_generator("bannai-ito", params)[1] == F(-695, 371)
    q = fam.reflection_generator("bannai-ito-q", params)
    assert q[0] == fam.bi_reflection(fam.subs1(worked), 1)[0]
    rw = fam.reflection_generator("racah-wilson", fam.beta_map(worked).to_json())
    assert rw[0] == F(599, 697)
    with pytest.raises(ValueError):
        fam.reflection_generator("jacobi", {})


def test_random_parameters_resample_and_cap():
    rng = random.Random(0)
    p = fam.random_bi_parameters(rng, 20, admissible=lambda p: admissible(p, 10))
    assert admissible(p, 10)
    with pytest.raises(RuntimeError):
        fam.random_bi_parameters(rng, 20, admissible=lambda p: False, max_attempts=5)


# -- oracle comparisons over random parameters -----------------------------------------------


@given(params, st.integers(0, 9))
def test_coefficients_match_symbolic_formulas(p, k):
    try:
        A, C, v = fam.bi_A(p, k), fam.bi_C(p, k), fam.cbi_v(p, k)
        a = fam.bi_reflection_term(p, k)
    except PoleInParameters:
        assume(False)
    t = p.as_tuple()
    assert A == oracles.bi_A(t, k)
    assert C == oracles.bi_C(t, k)
    assert v == oracles.cbi_v(t, k)
    assert a == oracles.a_bannai(t, k)


@given(params)
def test_seed_matches_symbolic_formulas(p):
    try:
        s = fam.bi_seed(p)
    except PoleInParameters:
        assume(False)
    assert (s.a0, s.lambda0, s.lambda_bi) == oracles.seed(p.as_tuple())
    assert s.lambda0 * s.sqrt_lambda_bi - 1 / s.sqrt_lambda_bi == p.rho2


@given(params, st.integers(0, 9))
def test_rw_matches_symbolic_formulas(p, k):
    beta = fam.beta_map(p)
    assert beta.sigma - p.g == 2
    try:
        A, C, a = fam.rw_A(beta, k), fam.rw_C(beta, k), fam.rw_reflection_term(beta, k)
    except PoleInParameters:
        assume(False)
    t = beta.as_tuple()
    assert (A, C, a) == (oracles.rw_A(t, k), oracles.rw_C(t, k), oracles.a_wilson(t, k))


@given(params, st.integers(0, 9))
def test_q_reflection_equals_symbolic_substitution(p, k):
    try:
        a = fam.q_reflection_term(p, k)
    except PoleInParameters:
        assume(False)
    assert a == oracles.a_bannai_after_subs1(p.as_tuple(), k)
    assert a == fam.bi_reflection_term(fam.subs1(p), k)


@given(params)
def test_subs1_preserves_g(p):
    assert fam.subs1(p).g == p.g


@given(params)
def test_companion_identity(p):
    assume(admissible(p, 12))
    tr = christoffel(fam.bi_coeffs(p, 14).rec, p.rho1).transformed
    cbi = fam.cbi_coeffs(p, 13)
    assert tr.b == cbi.rec.b
    assert tr.u == cbi.v


@given(params)
def test_reflection_modes_agree_and_match_rw(p):
    assume(admissible(p, 12))
    closed = fam.bi_reflection(p, 13)
    assert closed == fam.bi_reflection(p, 13, mode="recursive")
    assert fam.rw_reflection(fam.beta_map(p), 13) == closed


@given(params)
def test_identify_q_random(p):
    assume(admissible(p, 12))
    rep = fam.bi_identify_q(p, 12, strict=True)
    assert rep.passed and rep.first_failure is None
    lam = (p.rho2 + p.rho1) / (p.rho2 - p.rho1)
    assert rep.lam == lam
    bi = fam.bi_coeffs(p, 12)
    for k in range(12):
        b, u = oracles.pencil_b_u(rep.a, lam, k)
        assert b == 2 * (p.rho1 - bi.A[k] - bi.C[k]) / (p.rho2 - p.rho1)
        assert u == (4 * bi.A[k - 1] * bi.C[k] / (p.rho2 - p.rho1) ** 2 if k else 0)
