"""First- and second-order differencing polynomials of a curve polynomial.

For ``phi`` in Q[T] the first-order difference ``chi`` and the second-order
difference ``psi`` are defined by

    phi(X) - phi(Y)                          = (X - Y) chi(X, Y)
    phi(X+Y-Z) - phi(X) - phi(Y) + phi(Z)    = (X - Z)(Y - Z) psi(X, Y, Z)

Only characteristic-0 coefficients are accepted: over Z/p^N the numerator
can vanish identically (X^3 in characteristic 3) and ``psi`` is meaningless.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any

from .algebra import RATIONAL, Poly, compose, exact_divide
from .errors import DegreeTooLow, DomainMismatch, EqualSlice

XYZ = ("X", "Y", "Z")


@dataclass(frozen=True)
class FieldTag:
    """Which local field a curve is considered over."""

    kind: str  # "real" | "complex" | "padic"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("real", "complex", "padic"):
            raise ValueError(f"unknown field {self.kind!r}")
        if (self.kind == "padic") != (self.p is not None):
            raise ValueError("a prime is required exactly for the p-adic field")

    @property
    def archimedean(self) -> bool:
        return self.kind != "padic"

    def __str__(self) -> str:
        return f"Q_{self.p}" if self.kind == "padic" else {"real": "R", "complex": "C"}[self.kind]


REAL = FieldTag("real")
COMPLEX_FIELD = FieldTag("complex")


def Padic(p: int) -> FieldTag:
    return FieldTag("padic", p)


def _require_rational(phi: Poly) -> None:
    if phi.domain is not RATIONAL:
        raise DomainMismatch(
            "differencing polynomials are only defined here over characteristic-0 "
            f"coefficients, got {phi.domain!r}"
        )
    phi._require_univariate()


@dataclass
class CurveSpec:
    """The curve T -> (T, phi(T)) over a chosen field; caches chi and psi."""

    phi: Poly
    field: FieldTag = REAL
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        _require_rational(self.phi)
        if self.phi.degree is None or self.phi.degree < 2:
            raise DegreeTooLow(f"curve polynomial must have degree >= 2, got {self.phi!r}")
        if self.field.kind == "padic":
            for c in self.phi.terms.values():
                if c.denominator % self.field.p == 0:
                    raise ValueError(f"{self.phi!r} is not {self.field.p}-integral")

    @property
    def k(self) -> int:
        return self.phi.degree

    @property
    def chi(self) -> Poly:
        if "chi" not in self._cache:
            self._cache["chi"] = first_order_difference(self.phi)
        return self._cache["chi"]

    @property
    def psi(self) -> Poly:
        if "psi" not in self._cache:
            self._cache["psi"] = second_order_difference(self.phi)
        return self._cache["psi"]

    def fiber(self, t1, t1p, distinct: bool = False) -> Poly:
        return _fiber_of(self.psi, t1, t1p, distinct)


def first_order_difference(phi: Poly) -> Poly:
    """chi(X, Y) with (X - Y) chi = phi(X) - phi(Y)."""
    _require_rational(phi)
    if phi.degree is None or phi.degree < 1:
        raise DegreeTooLow("first-order difference needs deg(phi) >= 1")
    xy = ("X", "Y")
    X = Poly.variable("X", xy)
    Y = Poly.variable("Y", xy)
    num = compose(phi, X) - compose(phi, Y)
    return exact_divide(num, X - Y)


def sod_numerator(phi: Poly) -> Poly:
    """phi(X+Y-Z) - phi(X) - phi(Y) + phi(Z) as a trivariate polynomial."""
    _require_rational(phi)
    X, Y, Z = (Poly.variable(v, XYZ) for v in XYZ)
    return compose(phi, X + Y - Z) - compose(phi, X) - compose(phi, Y) + compose(phi, Z)


def second_order_difference(phi: Poly) -> Poly:
    """psi(X, Y, Z): divide the numerator by X - Z, then by Y - Z."""
    _require_rational(phi)
    if phi.degree is None or phi.degree <= 1:
        raise DegreeTooLow("second-order difference needs deg(phi) >= 2 (numerator vanishes)")
    X, Y, Z = (Poly.variable(v, XYZ) for v in XYZ)
    step = exact_divide(sod_numerator(phi), X - Z)
    return exact_divide(step, Y - Z)


def sod_axis_restriction(phi: Poly) -> Poly:
    """psi(0, Y, 0) read off the coefficients: sum_j (j+2) a_{j+2} Y^j."""
    _require_rational(phi)
    k = phi.degree
    if k is None or k < 2:
        raise DegreeTooLow("axis restriction needs deg(phi) >= 2")
    return Poly.from_coeffs([(j + 2) * phi.coeff(j + 2) for j in range(k - 1)], var="Y")


def _fiber_of(psi: Poly, t1: Any, t1p: Any, distinct: bool) -> Poly:
    if distinct and t1 == t1p:
        raise EqualSlice("t1 and t1' coincide")
    exact = all(isinstance(t, (int, Fraction)) for t in (t1, t1p))
    if exact:
        return psi.substitute({"X": Fraction(t1), "Z": Fraction(t1p)})
    return psi.substitute({"X": complex(t1), "Z": complex(t1p)})


def sod_fiber(phi: Poly, t1: Any, t1p: Any, distinct: bool = False) -> Poly:
    """Y -> psi(t1, Y, t1') as a univariate polynomial in Y.

    Rational slices stay exact; float or complex slices give a ComplexFloat
    polynomial.  ``distinct=True`` rejects ``t1 == t1p``.
    """
    return _fiber_of(second_order_difference(phi), t1, t1p, distinct)
