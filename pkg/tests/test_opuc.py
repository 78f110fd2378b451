import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from conftest import reflection_lists
from oracles import charpoly_coeffs
from opdc.cmv import build_l, build_m
from opdc.core import Polynomial
from opdc.opuc import ReflectionSequence, classify, sequence_from_json, szego_polynomials


def test_free_case():
    pair = szego_polynomials(ReflectionSequence.zeros(), 5)
    assert pair.phi == Polynomial([0, 0, 0, 0, 0, 1])
    assert pair.phi_star == Polynomial([1])


def test_two_step_example():
    seq = ReflectionSequence.from_list(["1/2", "-1/3"])
    assert szego_polynomials(seq, 2).phi == Polynomial([Fraction(1, 3), Fraction(-2, 3), 1])
    assert szego_polynomials(seq, 1).phi_star == Polynomial([1, Fraction(-1, 2)])


def test_classify_examples():
    c = classify(ReflectionSequence.from_list(["1/2", "-1/3"]), 2)
    assert c.epsilon == (1, 1) and c.classical and not c.degenerate
    c = classify(ReflectionSequence.from_list(["-695/371"]), 1)
    assert c.epsilon == (-1,) and not c.classical
    assert c.rsq == (Fraction(695 ** 2 - 371 ** 2, 371 ** 2),)
    assert classify(ReflectionSequence.from_list([1]), 1).degenerate


def test_indexing_rules():
    seq = ReflectionSequence.from_list(["1/2"])
    assert seq[-1] == -1
    assert seq.length == 1
    with pytest.raises(IndexError):
        seq[1]
    with pytest.raises(IndexError):
        seq[-2]
    gen = ReflectionSequence.from_generator(lambda k: Fraction(1, k + 2))
    assert gen[5] == Fraction(1, 7) and gen.length is None
    with pytest.raises(ValueError):
        ReflectionSequence()


@given(reflection_lists(max_size=7))
def test_verblunsky_readback_degree_and_reversal(a):
    seq = ReflectionSequence.from_list(a)
    for n in range(len(a) + 1):
        pair = szego_polynomials(seq, n)
        assert pair.phi.degree == n and pair.phi.is_monic()
        assert pair.phi_star(0) == 1
        assert pair.phi_star == pair.phi.reversed(n)
        if n < len(a):
            assert -szego_polynomials(seq, n + 1).phi(0) == a[n]


@given(reflection_lists(min_size=2, max_size=6, classical=True))
def test_szego_matches_truncated_cmv_determinant(a):
    seq = ReflectionSequence.from_list(list(a) + [Fraction(0)] * 4)
    n = len(a)
    U = build_l(seq, n + 2).matrix @ build_m(seq, n + 2).matrix
    phi = [float(c) for c in szego_polynomials(seq, n).phi.coeffs]
    assert np.allclose(charpoly_coeffs(U[:n, :n]), phi, atol=1e-10)


def test_json_roundtrip():
    seq = ReflectionSequence.from_list(["1/2", "-1/3", "7/5"])
    obj = json.loads(json.dumps(seq.to_json()))
    assert obj == {"a": ["1/2", "-1/3", "7/5"], "generator": None}
    assert sequence_from_json(obj).prefix(3) == seq.prefix(3)


def test_json_generator():
    params = {"rho1": "1", "rho2": "2", "r1": "1/4", "r2": "1/3"}
    seq = sequence_from_json({"a": [], "generator": {"family": "bannai-ito", "params": params}})
    assert seq[0] == Fraction(599, 697) and seq[1] == Fraction(-695, 371)
    with pytest.raises(ValueError):
        seq.to_json()
    assert seq.to_json(2)["a"] == ["599/697", "-695/371"]
