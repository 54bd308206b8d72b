import cmath
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sodkit.algebra import Poly
from sodkit.errors import BadDenominator, ScaleMismatch, TooLarge
from sodkit.extension_padic import (
    PadicMomentInstance,
    character_eval,
    extension_sum,
    l4_moments_by_counting,
    moments_by_characters,
    verify_padic_theorem,
)

T = Poly.variable("X")


def brute_counts(inst):
    q, r = inst.q, inst.r
    phi = inst.phi_table()
    w = inst.weights()
    total = paired = 0
    for a, b, c, d in itertools.product(range(q), repeat=4):
        if (a + b - c - d) % q or (phi[a] + phi[b] - phi[c] - phi[d]) % q:
            continue
        val = w[a] * w[b] * np.conj(w[c] * w[d])
        total += val
        if (a - c) % r == 0 and (b - d) % r == 0:
            paired += val
    return total.real, paired.real


def test_character_examples():
    assert character_eval(5, 3) == 1
    assert character_eval(Fraction(1, 3), 3) == pytest.approx(cmath.exp(-2j * cmath.pi / 3))
    assert character_eval(Fraction(4, 3), 3) == pytest.approx(character_eval(Fraction(1, 3), 3))
    with pytest.raises(BadDenominator):
        character_eval(Fraction(1, 6), 3)


def test_gauss_sum_example():
    inst = PadicMomentInstance(3, 0, 1, T**2)
    val = extension_sum(inst, None, (0, Fraction(1, 3)))
    assert val == pytest.approx((1 + 2 * cmath.exp(-2j * cmath.pi / 3)) / 3)
    assert val == pytest.approx(-1j / 3**0.5)


def test_cell_measure_and_additivity():
    inst = PadicMomentInstance(5, 1, 2, T**3)
    assert extension_sum(inst, 2, (0, 0)) == pytest.approx(1 / 5)
    x = (Fraction(3, 25), Fraction(7, 5))
    full = extension_sum(PadicMomentInstance(5, 0, 2, T**3), None, x)
    assert sum(extension_sum(inst, xi, x) for xi in range(5)) == pytest.approx(full)


def test_errors():
    with pytest.raises(ScaleMismatch):
        PadicMomentInstance(3, 2, 1, T**2)
    with pytest.raises(ScaleMismatch):
        verify_padic_theorem(PadicMomentInstance(3, 1, 2, T**3))
    with pytest.raises(TooLarge):
        l4_moments_by_counting(PadicMomentInstance(5, 2, 4, T**2), budget=10**5)
    with pytest.raises(BadDenominator):
        extension_sum(PadicMomentInstance(3, 0, 1, T**2), None, (Fraction(1, 9), 0))


@pytest.mark.parametrize(
    "p,i,m,phi", [(3, 1, 2, T**2), (3, 1, 3, T**3), (5, 1, 2, T**2), (5, 1, 3, T**3)]
)
def test_verify_padic_theorem_instances(p, i, m, phi):
    rep = verify_padic_theorem(PadicMomentInstance(p, i, m, phi))
    assert rep.passed
    assert rep.ratio <= phi.degree ** 0.25


def test_i_zero_gives_ratio_one():
    rep = verify_padic_theorem(PadicMomentInstance(5, 0, 2, T**3))
    assert rep.ratio == pytest.approx(1.0)


def test_full_constraint_is_diagonal():
    inst = PadicMomentInstance(3, 2, 2, T**2)
    q = inst.q
    # with m1 = n1 and m2 = n2 mod q forced, only the q^2 trivial quadruples remain
    assert l4_moments_by_counting(inst).n_paired == q * q


def test_parseval_against_direct_sums():
    inst = PadicMomentInstance(3, 1, 2, T**3)
    q = inst.q
    whole = PadicMomentInstance(3, 0, 2, T**3)
    e4 = s4 = 0.0
    for a1 in range(q):
        for a2 in range(q):
            x = (Fraction(a1, q), Fraction(a2, q))
            e4 += abs(extension_sum(whole, None, x)) ** 4
            s4 += sum(abs(extension_sum(inst, xi, x)) ** 2 for xi in range(inst.r)) ** 2
    counts = l4_moments_by_counting(inst)
    # the sum over the p^{2m} dual points of |E|^4 equals p^{-2m} n_total
    assert e4 == pytest.approx(counts.n_total / q**2, rel=1e-9)
    assert s4 == pytest.approx(counts.n_paired / q**2, rel=1e-9)


instances = st.builds(
    lambda p, m, i, phi: (p, min(i, m), m, phi),
    st.sampled_from([2, 3, 5]),
    st.integers(1, 2),
    st.integers(0, 2),
    st.sampled_from([T**2, T**3, T**3 + T, 2 * T**2 + T]),
)


@settings(max_examples=25, deadline=None)
@given(instances)
def test_counting_matches_brute_force(args):
    inst = PadicMomentInstance(*args)
    if inst.q > 9:
        return
    counts = l4_moments_by_counting(inst)
    total, paired = brute_counts(inst)
    assert counts.n_total == pytest.approx(total)
    assert counts.n_paired == pytest.approx(paired)


@settings(max_examples=25, deadline=None)
@given(instances, st.data())
def test_counting_matches_characters_with_cell_values(args, data):
    p, i, m, phi = args
    vals = tuple(data.draw(st.lists(st.sampled_from([0, 1]), min_size=p**i, max_size=p**i)))
    inst = PadicMomentInstance(p, i, m, phi, vals)
    a, b = l4_moments_by_counting(inst), moments_by_characters(inst)
    assert a.n_total == pytest.approx(b.n_total, rel=1e-9, abs=1e-6)
    assert a.n_paired == pytest.approx(b.n_paired, rel=1e-9, abs=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 3), st.sampled_from([T**2, T**3, T**3 + T]))
def test_monotone_in_i_and_floor(p, m, phi):
    if p**m > 125:
        return
    q = p**m
    prev = None
    for i in range(m + 1):
        c = l4_moments_by_counting(PadicMomentInstance(p, i, m, phi))
        assert c.n_paired <= c.n_total
        assert c.n_paired >= q * q
        assert c.n_total >= 2 * q * q - q
        if prev is not None:
            assert c.n_paired <= prev
        prev = c.n_paired
