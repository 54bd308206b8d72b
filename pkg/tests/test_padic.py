from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import primerange

from sodkit.algebra import Poly
from sodkit.errors import (
    BadModulus,
    DivisionByZero,
    HypothesisFailed,
    NotARoot,
    NotSimpleRoot,
    PrecisionExhausted,
    ZeroPolynomial,
)
from sodkit.padic import (
    PadicInt,
    PadicNumber,
    find_sod_split_primes,
    hensel_lift,
    is_dth_power_residue,
    jb_polynomial,
    padic_add,
    padic_inv,
    padic_mul,
    primitive_root,
    roots_mod_p,
    valuation_int,
    valuation_rational,
    verify_prop_jb,
)

T = Poly.variable("X")
PRIMES = [3, 5, 7, 11, 13]


def test_sqrt2_in_z7():
    r = hensel_lift(T**2 - 2, 3, 7, 3)
    assert r.rep == 108 and (108**2 - 2) % 343 == 0


def test_hensel_errors():
    with pytest.raises(NotARoot):
        hensel_lift(T**2 - 2, 2, 7, 3)
    with pytest.raises(NotSimpleRoot):
        hensel_lift(T**2, 0, 7, 3)


def test_roots_mod_p():
    assert roots_mod_p(T**2 - 2, 7) == [3, 4]
    with pytest.raises(ZeroPolynomial):
        roots_mod_p(7 * T, 7)


def test_valuations():
    assert valuation_int(72, 3) == 2
    assert valuation_rational(Fraction(5, 9), 3) == -2


def test_padic_inverse_and_division():
    one = PadicNumber.from_int(1, 5, 6)
    x = PadicNumber.from_rational(Fraction(2, 25), 5, 6)
    assert x.valuation == -2
    y = padic_mul(x, padic_inv(x))
    assert y.valuation == 0 and y.to_int() == 1
    assert (one / x).valuation == 2
    with pytest.raises(DivisionByZero):
        PadicNumber.make_zero(5, 4).inverse()
    with pytest.raises(PrecisionExhausted):
        PadicNumber.make_zero(5, 4).valuation


def test_precision_tracking():
    a = PadicNumber.from_int(1, 3, 4)
    b = PadicNumber.from_int(3**4 - 1, 3, 6)
    s = padic_add(a, b)
    assert s.zero and s.abs_prec == 4
    with pytest.raises(PrecisionExhausted):
        PadicInt(3, 2, 4).reduce(3)


def test_power_residue_and_primitive_root():
    assert is_dth_power_residue(2, 2, 7)
    assert not is_dth_power_residue(3, 2, 7)
    with pytest.raises(BadModulus):
        is_dth_power_residue(2, 4, 7)
    assert primitive_root(7) == 3


@pytest.mark.parametrize("k,p", [(4, 3), (4, 5), (4, 7), (4, 17), (6, 5), (8, 7)])
def test_verify_prop_jb_passes(k, p):
    rep = verify_prop_jb(k, p)
    assert rep.passed
    assert rep.to_dict()["passed"] is True
    phi = jb_polynomial(k)
    # each lifted root at the origin fiber is a root mod p^N
    from sodkit.sod import sod_fiber

    fib = sod_fiber(phi, 0, 0)
    for r in rep.lifted_roots:
        v = fib.eval(r.rep)
        assert v.numerator % p**rep.N == 0


def test_verify_prop_jb_rejects_13():
    with pytest.raises(HypothesisFailed):
        verify_prop_jb(4, 13)


def test_prime_search_k4():
    got = find_sod_split_primes(4, 200)
    expected = [3] + [p for p in primerange(5, 201) if p % 12 in (5, 7)]
    assert got == expected


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 8), st.integers(-50, 50))
def test_hensel_lift_is_a_root(p, N, a):
    f = T**3 + a * T + 1
    for r in roots_mod_p(f, p):
        if f.derivative().eval(r) % p == 0:
            continue
        x = hensel_lift(f, r, p, N)
        assert f.eval(x.rep).numerator % p**N == 0
        assert x.residue() == r


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from(PRIMES),
    st.integers(-(10**6), 10**6).filter(bool),
    st.integers(-(10**6), 10**6).filter(bool),
)
def test_padic_arithmetic_is_reduction_homomorphism(p, a, b):
    N = 6
    pa, pb = PadicNumber.from_int(a, p, N), PadicNumber.from_int(b, p, N)
    s = pa + pb
    if not s.zero and s.abs_prec > 0 and s.valuation >= 0:
        assert s.to_int() % p ** s.abs_prec == (a + b) % p ** s.abs_prec
    if not (pa.zero or pb.zero):
        m = pa * pb
        assert m.valuation == pa.valuation + pb.valuation
        assert m.to_int() % p ** m.abs_prec == (a * b) % p ** m.abs_prec


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 500), st.integers(1, 500))
def test_ultrametric(p, a, b):
    x = PadicNumber.from_int(a, p, 10)
    y = PadicNumber.from_int(b, p, 10)
    s = x + y
    assert s.norm() <= max(x.norm(), y.norm()) + 1e-15
