import pytest
from hypothesis import given, settings

from conftest import small_fraction, uni_polys
from sodkit.algebra import COMPLEX, ModPrimePower, Poly
from sodkit.errors import DegreeTooLow, DomainMismatch, EqualSlice
from sodkit.sod import (
    REAL,
    CurveSpec,
    FieldTag,
    Padic,
    first_order_difference,
    second_order_difference,
    sod_axis_restriction,
    sod_fiber,
    sod_numerator,
)

XYZ = ("X", "Y", "Z")
X, Y, Z = (Poly.variable(v, XYZ) for v in XYZ)
T = Poly.variable("X")


def test_psi_examples():
    assert second_order_difference(T**2) == Poly.constant(2, XYZ)
    assert second_order_difference(T**3) == 3 * (X + Y)


def test_chi_example():
    xy = ("X", "Y")
    Xa, Ya = Poly.variable("X", xy), Poly.variable("Y", xy)
    assert first_order_difference(T**3) == Xa**2 + Xa * Ya + Ya**2


def test_degree_errors():
    with pytest.raises(DegreeTooLow):
        second_order_difference(T)
    with pytest.raises(DegreeTooLow):
        CurveSpec(T + 1)
    with pytest.raises(DegreeTooLow):
        first_order_difference(Poly.constant(3))


def test_domain_errors():
    with pytest.raises(DomainMismatch):
        second_order_difference((T**3).with_domain(ModPrimePower(3, 2)))


def test_fiber_examples():
    assert sod_fiber(T**3, 1, 2) == 3 * Poly.variable("Y", ("Y",)) + 3
    with pytest.raises(EqualSlice):
        sod_fiber(T**3, 1, 1, distinct=True)
    f = sod_fiber(T**3, 0.5, 1j)
    assert f.domain == COMPLEX


def test_axis_restriction_monomials():
    for k in range(2, 11):
        expected = Poly.from_coeffs([0] * (k - 2) + [k], var="Y")
        assert sod_axis_restriction(T**k) == expected


def test_curve_spec_field_checks():
    assert str(Padic(3)) == "Q_3" and str(REAL) == "R"
    with pytest.raises(ValueError):
        FieldTag("padic")
    with pytest.raises(ValueError):
        CurveSpec(T**2 / 3, Padic(3))
    spec = CurveSpec(T**3)
    assert spec.k == 3 and spec.psi is spec.psi


@settings(max_examples=40, deadline=None)
@given(uni_polys(min_deg=2, max_deg=8))
def test_sod_identity(phi):
    psi = second_order_difference(phi)
    assert (X - Z) * (Y - Z) * psi == sod_numerator(phi)


@settings(max_examples=40, deadline=None)
@given(uni_polys(min_deg=2, max_deg=8))
def test_psi_symmetric_in_x_and_y(phi):
    psi = second_order_difference(phi)
    assert psi.substitute({"X": Y, "Y": X}) == psi


@settings(max_examples=40, deadline=None)
@given(uni_polys(min_deg=2, max_deg=8))
def test_psi_total_degree(phi):
    psi = second_order_difference(phi)
    assert psi.degree == phi.degree - 2


@settings(max_examples=40, deadline=None)
@given(uni_polys(min_deg=2, max_deg=8))
def test_axis_restriction_matches_specialization(phi):
    spec = second_order_difference(phi).substitute({"X": 0, "Z": 0})
    assert spec == sod_axis_restriction(phi)


@settings(max_examples=40, deadline=None)
@given(uni_polys(min_deg=2, max_deg=7), small_fraction, small_fraction)
def test_chi_on_diagonal_is_derivative(phi, x, y):
    chi = first_order_difference(phi)
    assert chi.eval(x, x) == phi.derivative().eval(x)
    if x != y:
        assert chi.eval(x, y) == (phi.eval(x) - phi.eval(y)) / (x - y)


@settings(max_examples=40, deadline=None)
@given(uni_polys(min_deg=2, max_deg=6), small_fraction, small_fraction, small_fraction)
def test_psi_is_pointwise_second_difference(phi, x, y, z):
    if x == z or y == z:
        return
    lhs = second_order_difference(phi).eval(x, y, z)
    rhs = (phi.eval(x + y - z) - phi.eval(x) - phi.eval(y) + phi.eval(z)) / ((x - z) * (y - z))
    assert lhs == rhs
