from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(bound=20, nonzero=False):
    num = st.integers(-bound, bound)
    if nonzero:
        num = num.filter(bool)
    return st.builds(Fraction, num, st.integers(1, bound))


@st.composite
def classical_rationals(draw, bound=20):
    den = draw(st.integers(2, bound))
    return Fraction(draw(st.integers(-den + 1, den - 1)), den)


def reflection_lists(min_size=1, max_size=8, classical=False):
    elem = classical_rationals() if classical else rationals().filter(lambda a: abs(a) != 1)
    return st.lists(elem, min_size=min_size, max_size=max_size)


@pytest.fixture
def worked():
    from opdc.families import BIParameters

    return BIParameters(1, 2, Fraction(1, 4), Fraction(1, 3))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
