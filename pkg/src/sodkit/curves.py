"""Curve polynomials from text and the built-in curve registry."""

from __future__ import annotations

from fractions import Fraction

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from .algebra import Poly
from .errors import DegreeTooLow
from .extension_numeric import CurveHandle, cosh_handle

_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication_application)
REGISTRY_NAMES = ("parabola", "cubic", "monomial:k", "jb:k", "cosh")


def parse_phi(text: str) -> Poly:
    """Univariate rational polynomial from text such as ``"2x^4 - 4x^2"``.

    The single free symbol (any name) becomes X; ``^`` means power.
    """
    try:
        expr = parse_expr(text, transformations=_TRANSFORMS, evaluate=True)
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc}") from None
    free = sorted(expr.free_symbols, key=str)
    if len(free) > 1:
        raise ValueError(f"{text!r} has more than one variable: {free}")
    t = free[0] if free else sympy.Symbol("x")
    try:
        P = sympy.Poly(sympy.expand(expr), t)
    except sympy.PolynomialError as exc:
        raise ValueError(f"{text!r} is not a polynomial: {exc}") from None
    terms = {}
    for (j,), c in P.terms():
        c = sympy.Rational(c)
        terms[(j,)] = Fraction(int(c.p), int(c.q))
    return Poly(terms, ("X",))


def registry_poly(name: str) -> Poly:
    """Polynomial members of the registry: parabola, cubic, monomial:k, jb:k."""
    X = Poly.variable("X")
    if name == "parabola":
        return X**2
    if name == "cubic":
        return X**3
    kind, _, arg = name.partition(":")
    if kind in ("monomial", "jb") and arg:
        k = int(arg)
        if k < 2:
            raise DegreeTooLow(f"{name}: degree must be at least 2")
        return X**k if kind == "monomial" else 2 * X**k - k * X**2
    raise KeyError(f"unknown curve {name!r}; known: {', '.join(REGISTRY_NAMES)}")


def resolve_poly(phi: str | None = None, handle: str | None = None) -> Poly:
    if (phi is None) == (handle is None):
        raise ValueError("give exactly one of --phi and --handle")
    return parse_phi(phi) if phi is not None else registry_poly(handle)


def resolve_handle(phi: str | None = None, handle: str | None = None) -> CurveHandle:
    """Numerical curve for the real workflows (the registry adds ``cosh``)."""
    if handle == "cosh" and phi is None:
        return cosh_handle()
    poly = resolve_poly(phi, handle)
    return CurveHandle.from_poly(poly, name=phi or handle)
