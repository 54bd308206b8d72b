"""Voorhoeve index on the boundary of the unit square and the complex zero-count checks.

V(f) = (1/2pi) * contour integral of |d/dt Arg f(z(t))| dt
     = (1/2pi) * contour integral of |Im(f'(z) z'(t) / f(z))| dt

over the boundary of O = {max(|Re z|, |Im z|) <= 1/2}, traversed
counter-clockwise.  Each side is integrated with Gauss-Legendre after being
split at sign changes of the integrand so the absolute value is smooth on
every piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .algebra import Poly
from .errors import EqualSlice, HypothesisFailed, ZeroOnContour

SIDES = (  # start, direction of each side of the square, counter-clockwise
    (complex(-0.5, -0.5), 1 + 0j),
    (complex(0.5, -0.5), 1j),
    (complex(0.5, 0.5), -1 + 0j),
    (complex(-0.5, 0.5), -1j),
)


@dataclass(frozen=True)
class ContourSpec:
    half_width: float = 0.5
    nodes: int = 256
    margin: float = 1e-12  # |f| below margin * scale at a node counts as a zero


@dataclass
class AnalyticHandle:
    """Entire function with derivatives: ``deriv(z, order)``."""

    name: str
    deriv: Callable
    poly: Poly | None = None

    def __call__(self, z):
        return self.deriv(z, 0)

    @classmethod
    def from_poly(cls, phi: Poly, name: str | None = None) -> "AnalyticHandle":
        coeffs = [complex(c) for c in phi.coeffs()]
        P = np.polynomial.Polynomial(coeffs)

        def deriv(z, order=0):
            z = np.asarray(z, dtype=complex)
            return (P.deriv(order) if order else P)(z)

        return cls(name or repr(phi), deriv, phi)

    def shifted_difference(self, t1: complex, t1p: complex, order: int) -> "AnalyticHandle":
        """Y -> d^order/dY^order [phi(t1+Y-t1') - phi(t1) - phi(Y) + phi(t1')]."""
        d = t1 - t1p

        def deriv(z, o=0):
            z = np.asarray(z, dtype=complex)
            n = order + o
            out = self.deriv(z + d, n) - self.deriv(z, n)
            if n == 0:
                out = out - self.deriv(t1, 0) + self.deriv(t1p, 0)
            return out

        return AnalyticHandle(f"D^{order} f[{t1}, {t1p}]", deriv)


def _side_integrand(f: AnalyticHandle, start: complex, direction: complex, s: np.ndarray, contour: ContourSpec):
    z = start + 2 * contour.half_width * direction * s  # s in [0, 1]
    fz = f.deriv(z, 0)
    scale = max(1.0, float(np.max(np.abs(fz))))
    if np.any(np.abs(fz) <= contour.margin * scale):
        bad = z[np.argmin(np.abs(fz))]
        raise ZeroOnContour(f"{f.name} vanishes (numerically) at {bad} on the contour")
    return np.imag(f.deriv(z, 1) * (2 * contour.half_width * direction) / fz)


def _side_variation(f, start, direction, contour: ContourSpec, n: int) -> float:
    # locate sign changes of the integrand on a fine sample, refine them with brentq
    g = lambda s: float(_side_integrand(f, start, direction, np.array([s]), contour)[0])  # noqa: E731
    sample = np.linspace(0.0, 1.0, 4 * n + 1)
    vals = _side_integrand(f, start, direction, sample, contour)
    if not np.any(vals):
        return 0.0
    cuts = [0.0]
    last_sign, last_zero = 0.0, None
    for a, b, va, vb in zip(sample[:-1], sample[1:], vals[:-1], vals[1:]):
        if va == 0.0:
            last_zero = a if last_zero is None else last_zero
            continue
        if last_zero is not None and last_sign * va < 0:
            cuts.append(last_zero)  # sign flips across an exact zero
        last_sign, last_zero = np.sign(va), None
        if va * vb < 0:
            cuts.append(brentq(g, a, b, xtol=1e-15))
    cuts.append(1.0)
    t, w = np.polynomial.legendre.leggauss(n)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        s = 0.5 * (b - a) * t + 0.5 * (a + b)
        total += 0.5 * (b - a) * float(np.sum(w * np.abs(_side_integrand(f, start, direction, s, contour))))
    return total


def voorhoeve_index(f: AnalyticHandle, contour: ContourSpec = ContourSpec()) -> tuple[float, float]:
    """(V(f), |V_n - V_(n/2)|) on the boundary of the square."""

    def run(n):
        return sum(_side_variation(f, a, d, contour, n) for a, d in SIDES) / (2 * math.pi)

    v = run(contour.nodes)
    return v, abs(v - run(max(contour.nodes // 2, 8)))


@dataclass
class ComplexCurveHypotheses:
    k: int
    beta: float
    kth_lower_bound: bool
    next_upper_bound: bool
    boundary_nonvanishing: bool
    certification: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.kth_lower_bound and self.next_upper_bound and self.boundary_nonvanishing

    def to_dict(self) -> dict:
        return {
            "k": self.k, "beta": self.beta, "passed": self.passed,
            "kth_lower_bound": self.kth_lower_bound, "next_upper_bound": self.next_upper_bound,
            "boundary_nonvanishing": self.boundary_nonvanishing,
            "certification": self.certification, "details": self.details,
        }


def _square_grid(half: float, n: int) -> np.ndarray:
    u = np.linspace(-half, half, n)
    return (u[:, None] + 1j * u[None, :]).ravel()


def _boundary(half: float, n: int) -> np.ndarray:
    s = np.linspace(0, 1, n, endpoint=False)
    return np.concatenate([2 * half * (start + d * s) for start, d in SIDES])


def check_complex_hypotheses(phi: AnalyticHandle, k: int, beta: float, grid: int = 201) -> ComplexCurveHypotheses:
    """Grid certification of the three hypotheses with Lipschitz slack.

    |phi^(k)| >= beta on O, sup |phi^(k+1)| < beta / (2 sqrt 2) on 3O and
    phi^(k-1) != 0 on the boundary of O.  The slack for a grid of spacing h
    is h/sqrt(2) times a sampled bound of the next derivative, so the result
    is certified only up to that sampled bound.
    """
    if k < 1 or beta <= 0:
        raise ValueError("need k >= 1 and beta > 0")
    inner = _square_grid(0.5, grid)
    outer = _square_grid(1.5, grid)
    h_in, h_out = 1.0 / (grid - 1), 3.0 / (grid - 1)
    rad = lambda h: h / math.sqrt(2)  # noqa: E731  distance to nearest grid point

    dk = np.abs(phi.deriv(inner, k))
    dk1_out = np.abs(phi.deriv(outer, k + 1))
    dk2_out = np.abs(phi.deriv(outer, k + 2))
    lower = float(dk.min()) - rad(h_in) * float(np.abs(phi.deriv(inner, k + 1)).max())
    upper = float(dk1_out.max()) + rad(h_out) * float(dk2_out.max())

    bnd = _boundary(0.5, 4 * grid)
    dkm1 = np.abs(phi.deriv(bnd, k - 1))
    h_b = 1.0 / grid
    bmin = float(dkm1.min()) - 0.5 * h_b * float(np.abs(phi.deriv(bnd, k)).max())

    hyp = ComplexCurveHypotheses(
        k, beta,
        kth_lower_bound=lower >= beta,
        next_upper_bound=upper < beta / (2 * math.sqrt(2)),
        boundary_nonvanishing=bmin > 0,
        certification="grid plus Lipschitz slack from sampled higher derivatives",
        details={"min_kth": lower, "sup_next": upper, "threshold": beta / (2 * math.sqrt(2)),
                 "min_boundary_km1": bmin},
    )
    if not hyp.kth_lower_bound:
        raise HypothesisFailed(f"|phi^({k})| >= {beta} fails on O (certified min {lower:.6g})",
                               f"|phi^(k)| >= beta on O")
    if not hyp.next_upper_bound:
        raise HypothesisFailed(
            f"sup |phi^({k + 1})| on 3O is {upper:.6g}, not below beta/(2 sqrt 2) = {beta / (2 * math.sqrt(2)):.6g}",
            "sup |phi^(k+1)| < beta/(2 sqrt 2) on 3O")
    if not hyp.boundary_nonvanishing:
        raise HypothesisFailed(f"phi^({k - 1}) may vanish on the boundary of O (certified min {bmin:.3g})",
                               "phi^(k-1) has no zeros on the boundary of O")
    return hyp


@dataclass
class CensusResult:
    t1: complex
    t1p: complex
    voorhoeve: float
    quadrature_error: float
    zero_bound_f: int
    zero_bound_psi: int
    below_one: bool

    def to_dict(self) -> dict:
        return {
            "t1": [self.t1.real, self.t1.imag], "t1p": [self.t1p.real, self.t1p.imag],
            "voorhoeve": self.voorhoeve, "quadrature_error": self.quadrature_error,
            "zero_bound_f": self.zero_bound_f, "zero_bound_psi": self.zero_bound_psi,
            "below_one": self.below_one,
        }


def sod_zero_census(phi: AnalyticHandle, t1: complex, t1p: complex, k: int,
                    contour: ContourSpec = ContourSpec()) -> CensusResult:
    """V(f^(k-1)) for f(Y) = phi(t1+Y-t1') - phi(t1) - phi(Y) + phi(t1')."""
    t1, t1p = complex(t1), complex(t1p)
    if t1 == t1p:
        raise EqualSlice("t1 and t1' coincide")
    g = phi.shifted_difference(t1, t1p, k - 1)
    v, err = voorhoeve_index(g, contour)
    return CensusResult(t1, t1p, v, err, k - 1, k - 2, bool(v + err < 1))


def sample_pairs(n: int, seed: int = 0, min_gap: float = 0.05) -> list[tuple[complex, complex]]:
    """n pairs (t1, t1') in O with max-norm distance at least ``min_gap``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a = complex(*rng.uniform(-0.5, 0.5, 2))
        b = complex(*rng.uniform(-0.5, 0.5, 2))
        if max(abs(a.real - b.real), abs(a.imag - b.imag)) >= min_gap:
            out.append((a, b))
    return out


def fiber_roots_in_box(psi_fiber_coeffs: Sequence[complex]) -> int:
    """Number of roots (companion eigenvalues) of a univariate polynomial inside O."""
    c = np.trim_zeros(np.asarray(psi_fiber_coeffs, dtype=complex), "b")
    if len(c) <= 1:
        return 0
    roots = np.polynomial.polynomial.polyroots(c)
    return int(np.sum((np.abs(roots.real) <= 0.5) & (np.abs(roots.imag) <= 0.5)))
