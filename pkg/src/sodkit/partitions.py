"""Partitions of the unit ball at scale R and brute-force pair counting.

Cells are half-open intervals of length 1/R in [-1/2, 1/2) (real field),
half-open boxes (complex field, |z| = max(|Re z|, |Im z|)) or residue classes
modulo p^s in Z_p.  For a base pair (I1, I1') the pairs (I2, I2') whose gap

    gamma(t1) + gamma(t2) - gamma(t1') - gamma(t2'),  gamma(t) = (t, phi(t))

might stay within C R^-k are counted with a sound enclosure: a pair is only
discarded when the enclosure of the gap over the whole cell product misses
the ball, so the reported count never undercounts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import sqrt
from typing import Sequence, Union

import numpy as np

from .algebra import ModPrimePower, Poly
from .errors import DegenerateFiber, HypothesisFailed
from .padic import hensel_lift, roots_mod_p, valuation_int
from .sod import CurveSpec, FieldTag

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class RealCell:
    j: int
    R: int

    @property
    def lo(self) -> Fraction:
        return -HALF + Fraction(self.j, self.R)

    @property
    def hi(self) -> Fraction:
        return -HALF + Fraction(self.j + 1, self.R)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi})"


@dataclass(frozen=True)
class ComplexCell:
    j: int
    l: int
    R: int

    @property
    def re(self) -> tuple[Fraction, Fraction]:
        return (-HALF + Fraction(self.j, self.R), -HALF + Fraction(self.j + 1, self.R))

    @property
    def im(self) -> tuple[Fraction, Fraction]:
        return (-HALF + Fraction(self.l, self.R), -HALF + Fraction(self.l + 1, self.R))

    def __str__(self) -> str:
        (a, b), (c, d) = self.re, self.im
        return f"[{a}, {b}) + i[{c}, {d})"


@dataclass(frozen=True)
class PadicCell:
    r: int
    p: int
    s: int

    def __str__(self) -> str:
        return f"{self.r} + {self.p}^{self.s}Z_{self.p}"


Cell = Union[RealCell, ComplexCell, PadicCell]


@dataclass(frozen=True)
class PartitionSpec:
    field: FieldTag
    R: int

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("scale must be at least 1")
        if self.field.kind == "padic":
            p, R = self.field.p, self.R
            while R % p == 0:
                R //= p
            if R != 1:
                raise ValueError(f"p-adic scale must be a power of {self.field.p}, got {self.R}")

    @property
    def s(self) -> int:
        """Exponent with R = p^s (p-adic partitions only)."""
        return 0 if self.R == 1 else valuation_int(self.R, self.field.p)


def partition_cells(spec: PartitionSpec) -> list[Cell]:
    R = spec.R
    if spec.field.kind == "real":
        return [RealCell(j, R) for j in range(R)]
    if spec.field.kind == "complex":
        return [ComplexCell(j, l, R) for j in range(R) for l in range(R)]
    return [PadicCell(r, spec.field.p, spec.s) for r in range(R)]


def cell_neighbors(cell: Cell, spec: PartitionSpec) -> list[Cell]:
    """Cells sharing a boundary point; none in the ultrametric case."""
    R = spec.R
    if isinstance(cell, RealCell):
        return [RealCell(j, R) for j in (cell.j - 1, cell.j + 1) if 0 <= j < R]
    if isinstance(cell, ComplexCell):
        return [
            ComplexCell(cell.j + a, cell.l + b, R)
            for a in (-1, 0, 1)
            for b in (-1, 0, 1)
            if (a, b) != (0, 0) and 0 <= cell.j + a < R and 0 <= cell.l + b < R
        ]
    return []


def cell_distance(a: Cell, b: Cell) -> Fraction:
    """Infimum distance between closures (max-norm); p^-v(r - r') for p-adic cells."""
    if isinstance(a, RealCell):
        return max(Fraction(0), Fraction(abs(a.j - b.j) - 1, a.R))
    if isinstance(a, ComplexCell):
        gap = lambda d: max(Fraction(0), Fraction(abs(d) - 1, a.R))  # noqa: E731
        return max(gap(a.j - b.j), gap(a.l - b.l))
    if a.r == b.r:
        return Fraction(0)
    return Fraction(1, a.p ** valuation_int(a.r - b.r, a.p))


def admissible(a: Cell, b: Cell, spec: PartitionSpec) -> bool:
    return cell_distance(a, b) >= Fraction(1, spec.R)


# ---------------------------------------------------------------------------
# exact interval arithmetic


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __add__(self, o: "Interval") -> "Interval":
        return Interval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o: "Interval") -> "Interval":
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, o) -> "Interval":
        if not isinstance(o, Interval):
            o = Interval(Fraction(o), Fraction(o))
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(c), max(c))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Interval":
        if n == 0:
            return Interval(Fraction(1), Fraction(1))
        a, b = self.lo**n, self.hi**n
        if n % 2 == 0:
            if self.lo <= 0 <= self.hi:
                return Interval(Fraction(0), max(a, b))
            return Interval(min(a, b), max(a, b))
        return Interval(a, b)

    def hull(self, o: "Interval") -> "Interval":
        return Interval(min(self.lo, o.lo), max(self.hi, o.hi))

    def distance_to_zero(self) -> Fraction:
        return max(Fraction(0), self.lo, -self.hi)


def poly_range(phi: Poly, lo: Fraction, hi: Fraction, pieces: int = 8) -> Interval:
    """Sound enclosure of phi over [lo, hi] (monomial form, subdivided)."""
    out = None
    width = (hi - lo) / pieces
    for i in range(pieces):
        x = Interval(lo + i * width, lo + (i + 1) * width)
        acc = Interval(Fraction(0), Fraction(0))
        for (j,), c in phi.terms.items():
            acc = acc + (x**j) * c
        out = acc if out is None else out.hull(acc)
    return out


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    def __add__(self, o):
        return ComplexInterval(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return ComplexInterval(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        if not isinstance(o, ComplexInterval):
            c = Fraction(o)
            return ComplexInterval(self.re * c, self.im * c)
        return ComplexInterval(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)


def poly_range_complex(phi: Poly, box: ComplexCell, pieces: int = 2) -> ComplexInterval:
    """Sound rectangular enclosure of phi over a closed box (Horner form)."""
    (a, b), (c, d) = box.re, box.im
    out = None
    for i, l in product(range(pieces), repeat=2):
        z = ComplexInterval(
            Interval(a + (b - a) * i / pieces, a + (b - a) * (i + 1) / pieces),
            Interval(c + (d - c) * l / pieces, c + (d - c) * (l + 1) / pieces),
        )
        acc = ComplexInterval(Interval(Fraction(0), Fraction(0)), Interval(Fraction(0), Fraction(0)))
        for coef in reversed(phi.coeffs()):
            acc = acc * z
            acc = ComplexInterval(acc.re + Interval(coef, coef), acc.im)
        out = acc if out is None else ComplexInterval(out.re.hull(acc.re), out.im.hull(acc.im))
    return out


# ---------------------------------------------------------------------------
# enclosures of the gap vector


@dataclass(frozen=True)
class Enclosure:
    """Sound enclosure of a vector quantity.

    Archimedean: ``bounds`` holds one closed interval per real coordinate.
    p-adic: ``valuations`` holds, per coordinate, ``(v, exact)``: every value
    has valuation exactly ``v`` when ``exact``, otherwise at least ``v`` (and
    0 is possible).
    """

    bounds: tuple = ()
    valuations: tuple = ()
    p: int | None = None

    def critical_radius(self) -> Fraction:
        """Smallest rho for which the enclosure meets the max-norm ball of radius rho."""
        if self.p is None:
            return max(iv.distance_to_zero() for iv in self.bounds)
        worst = Fraction(0)
        for v, exact in self.valuations:
            if exact:
                worst = max(worst, Fraction(self.p) ** (-v))
        return worst

    def excludes_ball(self, radius) -> bool:
        return self.critical_radius() > Fraction(radius)

    def contains(self, point: Sequence) -> bool:
        if self.p is None:
            return all(iv.lo <= Fraction(x) <= iv.hi for iv, x in zip(self.bounds, point))
        for (v, exact), x in zip(self.valuations, point):
            x = Fraction(x)
            if x == 0:
                if exact:
                    return False
                continue
            w = valuation_int(x.numerator, self.p) - valuation_int(x.denominator, self.p)
            if (exact and w != v) or (not exact and w < v):
                return False
        return True


@lru_cache(maxsize=None)
def _real_image(phi: Poly, cell: RealCell) -> Interval:
    return poly_range(phi, cell.lo, cell.hi)


@lru_cache(maxsize=None)
def _complex_image(phi: Poly, cell: ComplexCell) -> ComplexInterval:
    return poly_range_complex(phi, cell)


def _padic_phi_residue(phi: Poly, cell: PadicCell) -> int:
    q = cell.p**cell.s
    return phi.with_domain(ModPrimePower(cell.p, max(cell.s, 1))).eval(cell.r) % q


def _padic_coordinate(residue: int, p: int, s: int) -> tuple[int, bool]:
    q = p**s
    residue %= q
    if residue == 0:
        return (s, False)
    return (valuation_int(residue, p), True)


def gap_enclosure(curve: CurveSpec, I1: Cell, I2: Cell, I1p: Cell, I2p: Cell) -> Enclosure:
    """Enclosure of gamma(t1)+gamma(t2)-gamma(t1')-gamma(t2') over the cell product."""
    phi = curve.phi
    if isinstance(I1, RealCell):
        first = (
            Interval(I1.lo, I1.hi) + Interval(I2.lo, I2.hi) - Interval(I1p.lo, I1p.hi)
            - Interval(I2p.lo, I2p.hi)
        )
        second = _real_image(phi, I1) + _real_image(phi, I2) - _real_image(phi, I1p) - _real_image(phi, I2p)
        return Enclosure(bounds=(first, second))
    if isinstance(I1, ComplexCell):
        box = lambda c: ComplexInterval(Interval(*c.re), Interval(*c.im))  # noqa: E731
        first = box(I1) + box(I2) - box(I1p) - box(I2p)
        img = lambda c: _complex_image(phi, c)  # noqa: E731
        second = img(I1) + img(I2) - img(I1p) - img(I2p)
        return Enclosure(bounds=(first.re, first.im, second.re, second.im))
    p, s = I1.p, I1.s
    lin = I1.r + I2.r - I1p.r - I2p.r
    val = sum(sgn * _padic_phi_residue(phi, c) for sgn, c in ((1, I1), (1, I2), (-1, I1p), (-1, I2p)))
    return Enclosure(valuations=(_padic_coordinate(lin, p, s), _padic_coordinate(val, p, s)), p=p)


# ---------------------------------------------------------------------------
# pair counting


def _check_base(spec: PartitionSpec, I1: Cell, I1p: Cell) -> None:
    if not admissible(I1, I1p, spec):
        raise HypothesisFailed(
            f"dist({I1}, {I1p}) = {cell_distance(I1, I1p)} < 1/R = 1/{spec.R}",
            "dist(I1, I1') >= 1/R",
        )


def _padic_radii(curve: CurveSpec, spec: PartitionSpec, I1: PadicCell, I1p: PadicCell) -> np.ndarray:
    # critical radius for every (I2, I2') at once, indexed [r2, r2']
    p, s, q = spec.field.p, spec.s, spec.R
    phi_res = np.array([_padic_phi_residue(curve.phi, PadicCell(r, p, s)) for r in range(q)], dtype=np.int64)
    r = np.arange(q, dtype=np.int64)
    lin = (I1.r - I1p.r + r[:, None] - r[None, :]) % q
    val = (phi_res[I1.r] - phi_res[I1p.r] + phi_res[:, None] - phi_res[None, :]) % q
    inv_norm = np.zeros(q)  # |x|_p for residues x != 0 mod p^s, 0 for the zero class
    for x in range(1, q):
        inv_norm[x] = float(p) ** (-valuation_int(x, p))
    return np.maximum(inv_norm[lin], inv_norm[val])


def pair_radii(curve: CurveSpec, spec: PartitionSpec, I1: Cell, I1p: Cell) -> dict:
    """Critical radius of every ordered pair (I2, I2') for a base pair."""
    _check_base(spec, I1, I1p)
    cells = partition_cells(spec)
    if spec.field.kind == "padic":
        radii = _padic_radii(curve, spec, I1, I1p)
        return {(cells[a], cells[b]): Fraction(radii[a, b]).limit_denominator(spec.R**2)
                for a in range(len(cells)) for b in range(len(cells))}
    return {
        (I2, I2p): gap_enclosure(curve, I1, I2, I1p, I2p).critical_radius()
        for I2 in cells
        for I2p in cells
    }


def kdv_pair_count(
    curve: CurveSpec, spec: PartitionSpec, I1: Cell, I1p: Cell, C
) -> tuple[int, list[tuple[Cell, Cell]]]:
    """Ordered pairs (I2, I2') whose gap enclosure meets the ball of radius C R^-k."""
    rho = Fraction(C) / Fraction(spec.R) ** curve.k
    radii = pair_radii(curve, spec, I1, I1p)
    pairs = [pair for pair, r in radii.items() if r <= rho]
    return len(pairs), pairs


def kdv_count_sweep(curve: CurveSpec, spec: PartitionSpec, I1: Cell, I1p: Cell, Cs) -> dict:
    """Counts for several C at once from one enclosure pass."""
    if spec.field.kind == "padic":
        _check_base(spec, I1, I1p)
        radii = _padic_radii(curve, spec, I1, I1p).ravel()
        return {C: int(np.sum(radii <= float(Fraction(C) / Fraction(spec.R) ** curve.k) * (1 + 1e-12)))
                for C in Cs}
    radii = list(pair_radii(curve, spec, I1, I1p).values())
    out = {}
    for C in Cs:
        rho = Fraction(C) / Fraction(spec.R) ** curve.k
        out[C] = sum(1 for r in radii if r <= rho)
    return out


def admissible_bases(spec: PartitionSpec) -> list[tuple[Cell, Cell]]:
    cells = partition_cells(spec)
    return [(a, b) for a in cells for b in cells if admissible(a, b, spec)]


# ---------------------------------------------------------------------------
# the constant C_phi


@dataclass
class CPhiEstimate:
    value: Fraction
    m: float
    M: float
    heuristic: bool
    notes: list

    def to_dict(self) -> dict:
        return {
            "C": str(self.value),
            "C_float": float(self.value),
            "rootless_factor_min": self.m,
            "lipschitz_factor": self.M,
            "heuristic": self.heuristic,
            "notes": self.notes,
        }


def _lipschitz_bound(phi: Poly, radius: float) -> float:
    # sup |phi'| on |t| <= radius by coefficient sums
    return float(sum(abs(j * c) * radius ** (j - 1) for (j,), c in phi.terms.items() if j))


def _estimate_real(curve: CurveSpec, grid: int):
    psi = curve.psi
    ts = [Fraction(i, grid - 1) - HALF for i in range(grid)]
    ys = np.linspace(-0.5, 0.5, 4 * grid + 1)
    h = ys[1] - ys[0]
    m_est, slack, heuristic, notes = np.inf, 0.0, False, []
    for t1, t1p in product(ts, ts):
        if t1 == t1p:
            continue
        fiber = psi.substitute({"X": t1, "Z": t1p})
        if fiber.is_zero():
            raise DegenerateFiber(f"psi(t1, Y, t1') vanishes for t1={t1}, t1'={t1p}")
        coeffs = np.array([float(c) for c in reversed(fiber.coeffs())])
        P = coeffs
        if len(coeffs) > 1:
            roots = np.roots(coeffs)
            scale = max(1.0, np.max(np.abs(roots)))
            real = np.sort(roots[np.abs(roots.imag) <= 1e-9 * scale].real)
            if len(real) > 1 and np.min(np.diff(real)) < 1e-6:
                heuristic = True
            if len(real):
                P, _ = np.polydiv(coeffs, np.poly(real))
        vals = np.abs(np.polyval(P, ys))
        m_pair = float(np.min(vals))
        if m_pair < m_est:
            m_est = m_pair
            dP = np.polyder(P) if len(P) > 1 else np.zeros(1)
            slack = 0.5 * h * float(np.max(np.abs(np.polyval(dP, ys))))
    if m_est - slack <= 0:
        heuristic = True
        notes.append("Lipschitz certificate failed on the Y grid; raw grid minimum used")
        m_cert = m_est
    else:
        m_cert = m_est - slack
    M = 1.0 + _lipschitz_bound(curve.phi, 1.5)
    notes.append("(t1, t1') sampled on a grid; minimum over the slice is not certified")
    return m_cert, M, heuristic, notes


def _estimate_padic(curve: CurveSpec, spec: PartitionSpec, grid_exp: int, N: int = 12):
    p = curve.field.p
    psi = curve.psi
    q = p**grid_exp
    m_est, heuristic, notes = np.inf, False, []
    for t1, t1p in product(range(q), range(q)):
        if t1 == t1p:
            continue
        fiber = psi.substitute({"X": Fraction(t1), "Z": Fraction(t1p)})
        if fiber.is_zero():
            raise DegenerateFiber(f"psi(t1, Y, t1') vanishes for t1={t1}, t1'={t1p}")
        content = min(valuation_int(c.numerator, p) - valuation_int(c.denominator, p)
                      for c in fiber.terms.values())
        reduced = fiber * Fraction(p) ** (-content)
        roots = []
        if reduced.degree:
            dred = reduced.derivative().with_domain(ModPrimePower(p, 1))
            for r in roots_mod_p(reduced, p):
                if dred.eval(r) == 0:
                    heuristic = True
                    continue
                roots.append(hensel_lift(reduced, r, p, N).rep)
        qN = p**N
        red_N = reduced.with_domain(ModPrimePower(p, N))
        for t2 in range(q):
            value = red_N.eval(t2)
            diffs = [(t2 - y) % qN for y in roots]
            if value == 0 or any(d == 0 for d in diffs):
                continue
            v = content + valuation_int(value, p) - sum(valuation_int(d, p) for d in diffs)
            m_est = min(m_est, float(p) ** (-v))
    notes.append(f"(t1, t1', t2) sampled modulo {p}^{grid_exp}; roots lifted to {p}^{N}")
    if heuristic:
        notes.append("fiber with a multiple root mod p; its factor was not deflated")
    return m_est, 1.0, heuristic, notes


def estimate_c_phi(curve: CurveSpec, spec: PartitionSpec | None = None, grid: int = 9) -> CPhiEstimate:
    """Candidate for C_phi = m / M from the rootless factor of psi's fibers.

    ``m`` is the sampled minimum of |P_{t1,t1'}| (psi's fiber with its field
    roots divided out) and ``M`` bounds the Lipschitz loss of replacing t2' by
    t1 + t2 - t1' (1 + sup|phi'| on 3O over R and C, 1 over Q_p).  The result
    is capped at 1.
    """
    kind = curve.field.kind
    if kind == "real":
        m, M, heuristic, notes = _estimate_real(curve, grid)
    elif kind == "padic":
        grid_exp = max(1, spec.s if spec is not None else 1)
        m, M, heuristic, notes = _estimate_padic(curve, spec, grid_exp)
    else:
        # every fiber splits over C; the rootless factor is psi's constant Y^(k-2) coefficient
        lead = abs(curve.k * curve.phi.leading_coeff)
        m, M, heuristic = float(lead), 1.0 + _lipschitz_bound(curve.phi, 1.5 * sqrt(2)), False
        notes = ["fibers split completely over C"]
    if not np.isfinite(m) or m <= 0:
        raise DegenerateFiber("no positive rootless-factor minimum found")
    value = min(Fraction(1), Fraction(m / M).limit_denominator(10**6))
    if value <= 0:
        value = Fraction(1, 10**6)
    return CPhiEstimate(value, float(m), float(M), heuristic, notes)
