from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sodkit.algebra import Poly
from sodkit.errors import DuplicateNodes, HypothesisFailed
from sodkit.rolle import (
    InterpolationProblem,
    check_prop_rolle_fails,
    check_rolle_failure,
    lagrange_fit,
)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_rolle_failure(p):
    rep = check_rolle_failure(p)
    assert rep.passed
    assert rep.residues == [p - 1] * p


@pytest.mark.parametrize("p", [3, 5, 7])
def test_prop_rolle_fails(p):
    rep = check_prop_rolle_fails(p)
    assert rep.passed
    assert rep.checks["fitted quadratic is the zero polynomial"]


def test_p3_residues():
    # f'' = 12X^2 - 2, which is 1 mod 3 everywhere
    assert check_prop_rolle_fails(3).residues == [1, 1, 1]


def test_errors():
    with pytest.raises(HypothesisFailed):
        check_prop_rolle_fails(2)
    with pytest.raises(HypothesisFailed):
        check_rolle_failure(9)
    with pytest.raises(DuplicateNodes):
        InterpolationProblem((0, 1, 1), (0, 0, 0))


def test_fit_example():
    q = lagrange_fit(InterpolationProblem((0, 1, 2), (1, 2, 5)))
    X = Poly.variable("X")
    assert q == X**2 + 1


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-20, 20), min_size=1, max_size=6, unique=True),
    st.data(),
)
def test_fit_interpolates(nodes, data):
    values = data.draw(st.lists(st.integers(-50, 50), min_size=len(nodes), max_size=len(nodes)))
    q = lagrange_fit(InterpolationProblem(tuple(nodes), tuple(values)))
    assert q.is_zero() or q.degree <= len(nodes) - 1
    for a, b in zip(nodes, values):
        assert q.eval(Fraction(a)) == b
