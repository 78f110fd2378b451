import random

from opdc import suites


def test_first_counterexample_is_kept():
    res = suites.SuiteResult("x", 3, 0)
    res.record("a", True)
    res.record("a", False, {"k": 1}, "first")
    res.record("b", False, {"k": 2}, "second")
    assert not res.passed
    assert res.counterexample == {"check": "a", "inputs": {"k": 1}, "detail": "first"}
    assert res.to_json()["checks"] == {"a": 1, "b": 0}


def test_suites_are_reproducible():
    a = suites.roundtrip_suite(3, 5, depth=8).to_json()
    b = suites.roundtrip_suite(3, 5, depth=8).to_json()
    assert a == b


def test_draws_are_admissible_and_seeded():
    p1 = suites.draw_bi(random.Random(1), 20)
    p2 = suites.draw_bi(random.Random(1), 20)
    assert p1 == p2 and suites.bi_admissible(p1, 20)


def test_bi_chain_small():
    res = suites.bi_chain_suite(seed=2, trials=5, n=10)
    assert res.passed and res.checks["SDG closure"] == 5
