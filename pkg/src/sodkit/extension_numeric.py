"""Numerical extension operators, square functions and weighted L^4 norms over R.

Conventions: e(t) = exp(-2 pi i t), O = [-1/2, 1/2), gamma(t) = (t, phi(t)),

    E_I f(x) = int_I f(xi) e(xi x1 + phi(xi) x2) dxi,   S f = (sum_J |E_J f|^2)^(1/2).

The weight w = (g / g(1))^2 with g the inverse transform of the triangle
(1 - 2|xi|)_+ equals sin^4(pi x / 2) / x^4: it is >= 1 on [-1, 1], decays
like x^-4 and its transform lives in [-1, 1].  W_B(x) = w(x1/D) w(x2/D).

|E|^4 W_B is band-limited (x1 band 2 + 1/D, x2 band 2 osc(phi) + 1/D), so
the trapezoid rule on a grid finer than the band is exact up to the
truncation of the plane; the truncation tail is bounded with w <= x^-4.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .algebra import Poly
from .errors import HypothesisFailed, ResolutionTooLow
from .partitions import poly_range
from .report import VerificationReport

W0 = math.pi**4 / 16  # w(0)
W_INTEGRAL = math.pi**4 / 12  # int_R w
TRUNC_REL = 1e-6
TRUNC_X = (1.0 / (W0 * TRUNC_REL)) ** 0.25  # w(x) <= x^-4 < 1e-6 w(0) beyond this
STEP_SAFETY = 0.9
PROBES = 7
PANEL = 32  # Gauss-Legendre order per panel


# ---------------------------------------------------------------------------
# weights


def fejer_w(x):
    """w(x) = sin^4(pi x/2) / x^4, continuous at 0 with value pi^4/16."""
    x = np.asarray(x, dtype=float)
    return W0 * np.sinc(x / 2) ** 4


@dataclass(frozen=True)
class WeightSpec:
    tag: str  # "fejer" | "indicator"
    center: tuple
    diameter: float
    normalization: float

    def __call__(self, x1, x2):
        u1 = (np.asarray(x1, dtype=float) - self.center[0]) / self.diameter
        u2 = (np.asarray(x2, dtype=float) - self.center[1]) / self.diameter
        if self.tag == "fejer":
            return self.normalization * np.multiply.outer(fejer_w(u1), fejer_w(u2))
        inside = lambda u: (np.abs(u) <= 0.5).astype(float)  # noqa: E731
        return self.normalization * np.multiply.outer(inside(u1), inside(u2))

    @property
    def truncation(self) -> float:
        """Half-width of the square outside which the weight is neglected."""
        return self.diameter * (TRUNC_X if self.tag == "fejer" else 0.5)

    @property
    def band(self) -> float:
        return 1.0 / self.diameter if self.tag == "fejer" else 0.0

    def tail_mass(self) -> float:
        """Upper bound for the integral of W outside the truncation square."""
        if self.tag != "fejer":
            return 0.0
        one = 2.0 / (3.0 * TRUNC_X**3)  # int_{|u|>T} u^-4
        return self.normalization * self.diameter**2 * 2.0 * W_INTEGRAL * one

    def total_mass(self) -> float:
        if self.tag == "fejer":
            return self.normalization * (self.diameter * W_INTEGRAL) ** 2
        return self.normalization * self.diameter**2


def build_weight(diameter: float, center: Sequence[float] = (0.0, 0.0), tag: str = "fejer") -> WeightSpec:
    if diameter <= 0:
        raise ValueError("diameter must be positive")
    if tag not in ("fejer", "indicator"):
        raise ValueError(f"unknown weight {tag!r}")
    return WeightSpec(tag, (float(center[0]), float(center[1])), float(diameter), 1.0)


# ---------------------------------------------------------------------------
# curves


@dataclass
class CurveHandle:
    """phi with derivatives on 3O = [-3/2, 3/2]; ``deriv(t, order)``."""

    name: str
    deriv: Callable
    k: int
    poly: Poly | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, t):
        return self.deriv(t, 0)

    @classmethod
    def from_poly(cls, phi: Poly, name: str | None = None) -> "CurveHandle":
        coeffs = np.array([float(c) for c in phi.coeffs()])
        P = np.polynomial.Polynomial(coeffs)

        def deriv(t, order=0):
            return P.deriv(order)(np.asarray(t, dtype=float)) if order else P(np.asarray(t, dtype=float))

        return cls(name or repr(phi), deriv, phi.degree, phi)

    def phi_oscillation(self) -> float:
        """Upper bound for max - min of phi on O."""
        if "osc" not in self._cache:
            if self.poly is not None:
                iv = poly_range(self.poly, Fraction(-1, 2), Fraction(1, 2), pieces=64)
                self._cache["osc"] = float(iv.hi - iv.lo)
            else:
                v = self(np.linspace(-0.5, 0.5, 20001))
                self._cache["osc"] = 1.01 * float(v.max() - v.min())
        return self._cache["osc"]

    def sup_gamma_prime(self) -> float:
        """Upper bound for |gamma'| = (1 + phi'^2)^(1/2) on O."""
        if "gp" not in self._cache:
            if self.poly is not None:
                L = sum(abs(float(c)) * j * 0.5 ** (j - 1) for (j,), c in self.poly.terms.items() if j)
            else:
                L = 1.01 * float(np.max(np.abs(self.deriv(np.linspace(-0.5, 0.5, 20001), 1))))
            self._cache["gp"] = math.hypot(1.0, L)
        return self._cache["gp"]


def cosh_handle() -> CurveHandle:
    def deriv(t, order=0):
        t = np.asarray(t, dtype=float)
        if order == 0:
            return np.cosh(t) - 1.0
        return np.sinh(t) if order % 2 else np.cosh(t)

    return CurveHandle("cosh(t) - 1", deriv, 2)


# ---------------------------------------------------------------------------
# quadrature


def required_nodes(radius: float, curve: CurveHandle) -> int:
    """Quadrature nodes per cell so the phase turns < 1 radian per node spacing."""
    return int(math.ceil(8.0 * (1.0 + radius * curve.sup_gamma_prime())))


@lru_cache(maxsize=64)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _cell_bounds(R: int) -> list[tuple[float, float]]:
    return [(-0.5 + j / R, -0.5 + (j + 1) / R) for j in range(R)]


def _nodes(a: float, b: float, n: int, order: int = PANEL):
    """Composite Gauss-Legendre on [a, b]: ceil(n / PANEL) equal panels of ``order`` nodes."""
    panels = max(1, math.ceil(n / PANEL))
    t, w = _gl(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * t).ravel(), (half[:, None] * w).ravel()


def _interval(I) -> tuple[float, float]:
    if I is None:
        return (-0.5, 0.5)
    if hasattr(I, "lo"):
        return (float(I.lo), float(I.hi))
    a, b = I
    return (float(a), float(b))


def extension_quad(curve: CurveHandle, f, I, x: Sequence[float], nodes: int | None = None):
    """E_I f(x) with the node count and a nodes-vs-half-nodes error estimate.

    ``f`` is a constant or a callable of xi.  Returns ``(value, error, nodes)``.
    """
    a, b = _interval(I)
    if b - a > 1 + 1e-15:
        raise ValueError("|I| must be at most 1")
    x1, x2 = float(x[0]), float(x[1])
    need = required_nodes(math.hypot(x1, x2), curve)
    if nodes is None:
        nodes = need
    elif nodes < need:
        raise ResolutionTooLow(f"{nodes} nodes < required {need} at |x| = {math.hypot(x1, x2):.3g}")

    def rule(order):
        t, w = _nodes(a, b, nodes, order)
        fv = f(t) if callable(f) else np.full_like(t, 1.0, dtype=complex) * f
        return complex(np.sum(w * fv * np.exp(-2j * np.pi * (t * x1 + curve(t) * x2))))

    value = rule(PANEL)
    return value, abs(value - rule(PANEL // 2)), nodes


def extension_eval(curve: CurveHandle, f, I, x: Sequence[float]) -> complex:
    return extension_quad(curve, f, I, x)[0]


def square_function_eval(curve: CurveHandle, f_cells: Sequence[complex], R: int, x: Sequence[float]) -> float:
    """S f(x) for f constant on each of the R cells of O."""
    f_cells = _cell_values(f_cells, R)
    total = 0.0
    for (a, b), v in zip(_cell_bounds(R), f_cells):
        if v != 0:
            total += abs(extension_eval(curve, v, (a, b), x)) ** 2
    return math.sqrt(total)


def _cell_values(f_cells, R: int) -> np.ndarray:
    if f_cells is None:
        return np.ones(R, dtype=complex)
    f_cells = np.asarray(f_cells, dtype=complex)
    if f_cells.shape != (R,):
        raise ValueError(f"need {R} cell values, got {f_cells.shape}")
    return f_cells


# ---------------------------------------------------------------------------
# grids and weighted norms


@dataclass
class GridField:
    x1: np.ndarray
    x2: np.ndarray
    values: np.ndarray  # shape (len(x1), len(x2))


def _axis(half_width: float, h: float, offset: float = 0.0) -> np.ndarray:
    """Uniform grid of step h covering [-half_width, half_width], symmetric about 0."""
    n = int(math.ceil(half_width / h))
    if offset == 0:
        return np.arange(-n, n + 1) * h
    if offset != 0.5:
        raise ValueError("offset must be 0 or 1/2")
    return (np.arange(-n - 1, n + 1) + 0.5) * h


def _phases(freqs: np.ndarray, xs: np.ndarray, axis: int) -> np.ndarray:
    """exp(-2 pi i freq x) for a uniform grid xs, built by cumulative products."""
    if axis == 0:
        out = np.empty((len(xs), len(freqs)), dtype=complex)
        out[0] = np.exp(-2j * np.pi * xs[0] * freqs)
        if len(xs) > 1:
            out[1:] = np.exp(-2j * np.pi * (xs[1] - xs[0]) * freqs)
    else:
        out = np.empty((len(freqs), len(xs)), dtype=complex)
        out[:, 0] = np.exp(-2j * np.pi * xs[0] * freqs)
        if len(xs) > 1:
            out[:, 1:] = np.exp(-2j * np.pi * (xs[1] - xs[0]) * freqs)[:, None]
    return np.cumprod(out, axis=axis, out=out)


def _pairwise_sum(a: np.ndarray) -> float:
    # numpy's sum is already pairwise along contiguous axes; ravel keeps order fixed
    return float(np.sum(np.ascontiguousarray(a).ravel()))


def l4_weighted_norm(evaluator: Callable, weight: WeightSpec, h1: float, h2: float,
                     sup_bound: float | None = None) -> tuple[float, float]:
    """(int |F|^4 W)^(1/4) by the trapezoid rule on the truncation square.

    ``evaluator(x1, x2)`` returns the field on the outer product grid.  The
    second return value bounds the neglected tail of the fourth moment (needs
    ``sup_bound`` >= sup |F|).
    """
    T = weight.truncation
    x1, x2 = _axis(T, h1), _axis(T, h2)
    if weight.tag == "indicator":
        x1, x2 = np.linspace(-T, T, len(x1)), np.linspace(-T, T, len(x2))
        w1 = np.full(len(x1), x1[1] - x1[0]); w1[[0, -1]] /= 2
        w2 = np.full(len(x2), x2[1] - x2[0]); w2[[0, -1]] /= 2
        W = weight(x1 + weight.center[0], x2 + weight.center[1]) * np.outer(w1, w2)
    else:
        W = weight(x1 + weight.center[0], x2 + weight.center[1]) * (h1 * h2)
    F = np.abs(evaluator(x1 + weight.center[0], x2 + weight.center[1])) ** 4
    moment = _pairwise_sum(F * W)
    tail = weight.tail_mass() * sup_bound**4 if sup_bound is not None else float("nan")
    return moment**0.25, tail


# ---------------------------------------------------------------------------
# the real theorem


@dataclass
class _Moments:
    E4: float
    S4: float
    points: int
    max_nodes: int


class _Engine:
    """Tiled evaluation of all E_J on a grid: E_J = B_J @ A_J per tile."""

    def __init__(self, curve: CurveHandle, f_cells: np.ndarray, R: int, weight: WeightSpec, tile: int = 256):
        self.curve, self.f, self.R, self.weight, self.tile = curve, f_cells, R, weight, tile

    def moments(self, h1: float, h2: float, off1: float = 0.0, off2: float = 0.0) -> _Moments:
        T = self.weight.truncation
        x1, x2 = _axis(T, h1, off1), _axis(T, h2, off2)
        # real phi and real f: E(-x) = conj E(x), so |E| and S are even and the
        # half plane x1 >= 0 suffices (weight 2 off the axis)
        even = bool(np.all(self.f.imag == 0))
        fold = np.ones(len(x1))
        if even:
            keep = x1 >= 0
            x1, fold = x1[keep], np.where(x1[keep] > 0, 2.0, 1.0)
        E4 = S4 = 0.0
        max_nodes = 0
        cells = [(ab, v) for ab, v in zip(_cell_bounds(self.R), self.f) if v != 0]
        for s1 in range(0, len(x1), self.tile):
            X1 = x1[s1:s1 + self.tile]
            w1 = self._w(X1) * fold[s1:s1 + self.tile]
            for s2 in range(0, len(x2), self.tile):
                X2 = x2[s2:s2 + self.tile]
                radius = math.hypot(max(abs(X1[0]), abs(X1[-1])), max(abs(X2[0]), abs(X2[-1])))
                n = PANEL * math.ceil(required_nodes(radius, self.curve) / PANEL)
                max_nodes = max(max_nodes, n)
                E = np.zeros((len(X1), len(X2)), dtype=complex)
                S2 = np.zeros((len(X1), len(X2)))
                for (a, b), v in cells:
                    E_J = self._cell(a, b, v, n, X1, X2)
                    E += E_J
                    S2 += E_J.real**2 + E_J.imag**2
                W = np.outer(w1, self._w(X2))
                E2 = E.real**2 + E.imag**2
                E4 += float(np.sum(E2 * E2 * W))
                S4 += float(np.sum(S2 * S2 * W))
        scale = h1 * h2 * self.weight.normalization
        return _Moments(E4 * scale, S4 * scale, int(fold.sum()) * len(x2), max_nodes)

    def _w(self, X):
        if self.weight.tag == "fejer":
            return fejer_w(X / self.weight.diameter)
        return (np.abs(X) <= self.weight.truncation).astype(float)

    def _cell(self, a, b, v, n, X1, X2):
        t, w = _nodes(a, b, n)
        B = _phases(t, X1, axis=0)
        A = (w * v)[:, None] * _phases(self.curve(t), X2, axis=1)
        return B @ A

    def probe_error(self, h1: float, h2: float) -> float:
        """Largest nodes-vs-half-nodes discrepancy of E_J over probe points, corners included."""
        T = self.weight.truncation
        x1, x2 = _axis(T, h1), _axis(T, h2)
        idx1 = np.unique(np.linspace(0, len(x1) - 1, PROBES).astype(int))
        idx2 = np.unique(np.linspace(0, len(x2) - 1, PROBES).astype(int))
        worst = 0.0
        for i in idx1:
            for j in idx2:
                x = (x1[i], x2[j])
                n = required_nodes(math.hypot(*x), self.curve)
                for (a, b), v in zip(_cell_bounds(self.R), self.f):
                    if v != 0:
                        worst = max(worst, extension_quad(self.curve, v, (a, b), x, nodes=n)[1])
        return worst


def _check_kth_derivative(curve: CurveHandle, k: int, samples: int = 3001) -> None:
    t = np.linspace(-1.5, 1.5, samples)
    d = np.asarray(curve.deriv(t, k), dtype=float) * np.ones_like(t)
    if np.any(d == 0) or not (np.all(d > 0) or np.all(d < 0)):
        raise HypothesisFailed(
            f"phi^({k}) vanishes or changes sign on [-3/2, 3/2] (min |phi^({k})| = {np.min(np.abs(d)):.3g})",
            f"phi^({k}) != 0 on 3O",
        )


def _check_convex(curve: CurveHandle, samples: int = 3001) -> None:
    t = np.linspace(-1.5, 1.5, samples)
    dd = np.diff(np.asarray(curve.deriv(t, 1), dtype=float) * np.ones_like(t))
    if not (np.all(dd > 0) or np.all(dd < 0)):
        raise HypothesisFailed("phi' is not strictly monotone on [-3/2, 3/2]", "phi strictly convex or concave on 3O")


def _run(curve: CurveHandle, f_cells, R: int, C: float, k: int, weight_tag: str, refine: bool,
         tile: int, anchor: str, hypothesis: str, density: float = 1.0) -> VerificationReport:
    if not 0 < C <= 1:
        raise ValueError("C must lie in (0, 1]")
    if density < 1:
        raise ResolutionTooLow("grid density below 1 undersamples the band of |E|^4 W")
    f = _cell_values(f_cells, R)
    D = R**k / C
    weight = build_weight(D, tag=weight_tag)
    h1 = STEP_SAFETY / (2.0 + weight.band) / density
    h2 = STEP_SAFETY / (2.0 * curve.phi_oscillation() + weight.band) / density
    engine = _Engine(curve, f, R, weight, tile)
    base = engine.moments(h1, h2)
    l1 = float(np.sum(np.abs(f))) / R  # sup |E| and sup S are at most ||f||_1
    tail = weight.tail_mass() * l1**4
    quad = engine.probe_error(h1, h2)
    # |(E + d)|^4 - |E|^4 <= 4 (|E| + d)^3 d, integrated against W
    delta = R * quad  # per-point error of E (and of each |E_J| summed)
    quad4 = 4 * (l1 + delta) ** 3 * delta * weight.total_mass()
    quantities = {
        "E_norm4": base.E4, "S_norm4": base.S4,
        "E_norm": base.E4**0.25, "S_norm": base.S4**0.25,
        "grid_points": base.points, "max_gl_nodes": base.max_nodes,
        "h1": h1, "h2": h2, "truncation_half_width": weight.truncation,
        "tail_bound_4th_moment": tail, "quadrature_bound_4th_moment": quad4,
        "probe_quadrature_error": quad,
    }
    rel = 0.0
    if refine:
        offs = [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
        parts = [base] + [engine.moments(h1, h2, a, b) for a, b in offs]
        E4r = sum(p.E4 for p in parts) / 4
        S4r = sum(p.S4 for p in parts) / 4
        quantities["E_norm_refined"] = E4r**0.25
        quantities["S_norm_refined"] = S4r**0.25
        rel = max(abs(E4r**0.25 / base.E4**0.25 - 1), abs(S4r**0.25 / base.S4**0.25 - 1))
        quantities["refinement_rel_change"] = rel
    ratio = (base.E4 / base.S4) ** 0.25
    err4 = tail + quad4
    # d(ratio)/ratio = (dE4/E4 + dS4/S4)/4, plus the refinement spread
    budget = ratio * ((err4 / base.E4 + err4 / base.S4) / 4 + rel)
    return VerificationReport(
        instance={"phi": curve.name, "R": R, "C": C, "k": k, "ball_diameter": D, "weight": weight_tag,
                  "f": [str(complex(v)) for v in f]},
        quantities=quantities,
        bound=5 * k**0.25,
        bound_label="5*k^(1/4)",
        anchor=anchor + "; hypothesis: " + hypothesis,
        ratio=ratio,
        error_budget=budget,
        extra_bounds={"sqrt5_k_quarter": math.sqrt(5) * k**0.25,
                      "sqrt5_passed": bool(ratio <= math.sqrt(5) * k**0.25 + budget)},
    )


def verify_real_theorem(curve: CurveHandle, f_cells=None, R: int = 4, C: float = 0.5,
                        weight: str = "fejer", refine: bool = True, tile: int = 256,
                        density: float = 1.0) -> VerificationReport:
    """Compare ||E_O f||_{L^4(W_B)} with ||S f||_{L^4(W_B)} on a ball of diameter R^k / C."""
    k = curve.k
    if k < 2:
        raise HypothesisFailed(f"order k={k}: a line has no curvature, need k >= 2", "k >= 2")
    _check_kth_derivative(curve, k)
    return _run(curve, f_cells, R, C, k, weight, refine, tile,
                "L^4 square-function estimate for finite type curves over R, constant 5 k^(1/4) "
                "(sqrt(5) k^(1/4) over R)", f"|phi^({k})| != 0 on [-3/2, 3/2]", density)


def verify_convex_theorem(curve: CurveHandle, f_cells=None, R: int = 4, C: float = 0.5,
                          weight: str = "fejer", refine: bool = True, tile: int = 256,
                          density: float = 1.0) -> VerificationReport:
    """Same comparison for a strictly convex or concave C^1 curve at k = 2 geometry."""
    _check_convex(curve)
    return _run(curve, f_cells, R, C, 2, weight, refine, tile,
                "L^4 square-function estimate for strictly convex curves over R", "phi' strictly monotone on [-3/2, 3/2]",
                density)


def dump_grid_csv(curve: CurveHandle, R: int, C: float, k: int, path: str, f_cells=None,
                  weight: str = "fejer", stride: int = 8) -> None:
    """Write x1, x2, |E|^4, S^4 on a subsampled grid for external plotting."""
    f = _cell_values(f_cells, R)
    weight = build_weight(R**k / C, tag=weight)
    h1 = STEP_SAFETY / (2.0 + weight.band) * stride
    h2 = STEP_SAFETY / (2.0 * curve.phi_oscillation() + weight.band) * stride
    x1, x2 = _axis(weight.truncation, h1), _axis(weight.truncation, h2)
    n = required_nodes(math.hypot(x1[-1], x2[-1]), curve)
    E = np.zeros((len(x1), len(x2)), dtype=complex)
    S2 = np.zeros_like(E, dtype=float)
    eng = _Engine(curve, f, R, weight)
    for (a, b), v in zip(_cell_bounds(R), f):
        if v != 0:
            E_J = eng._cell(a, b, v, n, x1, x2)
            E += E_J
            S2 += np.abs(E_J) ** 2
    with open(path, "w") as fh:
        fh.write("x1,x2,E4,S4\n")
        for i, a in enumerate(x1):
            for j, b in enumerate(x2):
                fh.write(f"{a:.6g},{b:.6g},{abs(E[i, j]) ** 4:.9g},{S2[i, j] ** 2:.9g}\n")
