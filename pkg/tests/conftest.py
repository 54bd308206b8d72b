from fractions import Fraction

import sympy
from hypothesis import strategies as st

from sodkit.algebra import Poly

X_SYM, Y_SYM, Z_SYM = sympy.symbols("X Y Z")

small_fraction = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 9))


@st.composite
def uni_polys(draw, min_deg=0, max_deg=6):
    deg = draw(st.integers(min_deg, max_deg))
    coeffs = draw(st.lists(small_fraction, min_size=deg + 1, max_size=deg + 1))
    if coeffs[-1] == 0:
        coeffs[-1] = Fraction(1)
    return Poly.from_coeffs(coeffs)


@st.composite
def tri_polys(draw, max_terms=6, max_exp=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, max_exp)) for _ in range(3))
        terms[e] = draw(small_fraction)
    return Poly(terms, ("X", "Y", "Z"))


def to_sympy(p: Poly):
    syms = [sympy.Symbol(v) for v in p.vars]
    out = sympy.Integer(0)
    for exp, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exp):
            term *= s**e
        out += term
    return sympy.expand(out)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LOG, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
