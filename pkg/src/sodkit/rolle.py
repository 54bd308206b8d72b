"""Exact checks that Rolle's theorem and its interpolation variant fail over Z_p."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from sympy import isprime

from .algebra import Poly
from .errors import DuplicateNodes, HypothesisFailed


@dataclass(frozen=True)
class InterpolationProblem:
    nodes: tuple
    values: tuple

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise ValueError("nodes and values differ in length")
        if len(set(Fraction(a) for a in self.nodes)) != len(self.nodes):
            raise DuplicateNodes(f"nodes {self.nodes} are not pairwise distinct")


def lagrange_fit(problem: InterpolationProblem) -> Poly:
    """The unique polynomial of degree <= len(nodes)-1 through the data (exact)."""
    X = Poly.variable("X")
    nodes = [Fraction(a) for a in problem.nodes]
    out = Poly.constant(0)
    for m, (am, bm) in enumerate(zip(nodes, problem.values)):
        if Fraction(bm) == 0:
            continue
        basis = Poly.constant(Fraction(bm))
        for i, ai in enumerate(nodes):
            if i != m:
                basis = basis * (X - ai) * (1 / (am - ai))
        out = out + basis
    return out


@dataclass
class RolleReport:
    p: int
    checks: dict
    residues: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"p": self.p, "passed": self.passed, "checks": self.checks, "residues": self.residues}


def _require_prime(p: int) -> None:
    if not isprime(p):
        raise HypothesisFailed(f"{p} is not prime", "p prime")


def check_rolle_failure(p: int) -> RolleReport:
    """g = X^p - X vanishes at 0 and 1 while g' = -1 mod p on every residue.

    A unit residue of g' mod p is a unit on the whole residue disc, so the
    exhaustive table certifies g' has no zero in Z_p.
    """
    _require_prime(p)
    X = Poly.variable("X")
    g = X**p - X
    dg = g.derivative()
    residues = [int(dg.eval(x)) % p for x in range(p)]
    return RolleReport(
        p,
        {
            "g(0) == 0": g.eval(0) == 0,
            "g(1) == 0": g.eval(1) == 0,
            "g'(x) == -1 mod p for all residues": all(r == (-1) % p for r in residues),
        },
        residues,
    )


def check_prop_rolle_fails(p: int) -> RolleReport:
    """f = X^(p+1) - X^2 meets its quadratic interpolant at 0, 1, -1, but f'' never vanishes.

    The interpolant through three zeros is the zero polynomial, so a point
    with f''(z) = q''(z) would be a zero of f''; the residue table rules it out.
    """
    _require_prime(p)
    if p == 2:
        raise HypothesisFailed("p must be odd", "p > 2")
    X = Poly.variable("X")
    f = X ** (p + 1) - X**2
    nodes = (0, 1, -1)
    q = lagrange_fit(InterpolationProblem(nodes, tuple(f.eval(a) for a in nodes)))
    d2 = f.derivative(order=2)
    residues = [int(d2.eval(x)) % p for x in range(p)]
    return RolleReport(
        p,
        {
            "f vanishes at 0, 1, -1": all(f.eval(a) == 0 for a in nodes),
            "fitted quadratic is the zero polynomial": q.is_zero(),
            "f''(x) != 0 mod p for all residues": all(r != 0 for r in residues),
        },
        residues,
    )
