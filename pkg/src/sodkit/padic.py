"""Truncated p-adic arithmetic, Hensel lifting and residue tests.

Precision is absolute and fixed: an element of Z_p is stored as a
representative modulo p^N.  :class:`PadicNumber` adds a valuation so that
elements of Q_p (and their inverses) can be handled; its unit part carries
``prec`` known digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from sympy import isprime, primerange

from .algebra import RATIONAL, ModPrimePower, Poly
from .errors import (
    BadModulus,
    DivisionByZero,
    HypothesisFailed,
    NotARoot,
    NotSimpleRoot,
    PrecisionExhausted,
    ZeroPolynomial,
)
from .sod import second_order_difference

DEFAULT_PRECISION = 8
DEFAULT_SAMPLES = 25


def valuation_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation_rational(x: Fraction, p: int) -> int:
    x = Fraction(x)
    return valuation_int(x.numerator, p) - valuation_int(x.denominator, p)


@dataclass(frozen=True)
class PadicInt:
    """An element of Z_p known modulo p^N."""

    p: int
    N: int
    rep: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("precision must be positive")
        if not 0 <= self.rep < self.p**self.N:
            raise ValueError(f"representative {self.rep} outside [0, {self.p}^{self.N})")

    @classmethod
    def of(cls, x, p: int, N: int) -> "PadicInt":
        return cls(p, N, ModPrimePower(p, N).convert(x))

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def __int__(self) -> int:
        return self.rep

    def residue(self) -> int:
        return self.rep % self.p

    def reduce(self, M: int) -> "PadicInt":
        if M > self.N:
            raise PrecisionExhausted(f"cannot raise precision from {self.N} to {M}")
        return PadicInt(self.p, M, self.rep % self.p**M)

    def to_number(self) -> "PadicNumber":
        return PadicNumber.from_int(self.rep, self.p, self.N)


@dataclass(frozen=True)
class PadicNumber:
    """p^v * unit with the unit known modulo p^prec.

    The zero element is flagged explicitly; for it ``v`` is the absolute
    precision to which the value is known to vanish.
    """

    p: int
    v: int
    unit: int
    prec: int
    zero: bool = field(default=False)

    def __post_init__(self):
        if not self.zero:
            if self.prec < 1 or self.unit % self.p == 0:
                raise ValueError("unit part must be a p-adic unit with positive precision")
            object.__setattr__(self, "unit", self.unit % self.p**self.prec)

    # -- constructors -----------------------------------------------------

    @classmethod
    def make_zero(cls, p: int, abs_prec: int) -> "PadicNumber":
        return cls(p, abs_prec, 0, 0, True)

    @classmethod
    def from_int(cls, n: int, p: int, N: int) -> "PadicNumber":
        """``n`` known modulo p^N (absolute precision N)."""
        n %= p**N
        if n == 0:
            return cls.make_zero(p, N)
        v = valuation_int(n, p)
        return cls(p, v, n // p**v, N - v)

    @classmethod
    def from_rational(cls, x, p: int, N: int) -> "PadicNumber":
        """``x`` with ``N`` digits of relative precision."""
        x = Fraction(x)
        if x == 0:
            return cls.make_zero(p, N)
        v = valuation_rational(x, p)
        u = x / Fraction(p) ** v
        q = p**N
        return cls(p, v, u.numerator * pow(u.denominator, -1, q) % q, N)

    # -- queries ----------------------------------------------------------

    @property
    def abs_prec(self) -> int:
        return self.v if self.zero else self.v + self.prec

    @property
    def valuation(self) -> int:
        if self.zero:
            raise PrecisionExhausted(
                f"value vanishes to the known precision p^{self.v}; valuation undetermined"
            )
        return self.v

    def norm(self) -> float:
        """|x|_p = p^(-v); 0 for a (flagged) zero."""
        return 0.0 if self.zero else float(Fraction(self.p) ** (-self.v))

    def to_int(self) -> int:
        """Representative in [0, p^abs_prec) of an integral element."""
        if self.zero:
            return 0
        if self.v < 0:
            raise ValueError("element is not integral")
        return self.unit * self.p**self.v % self.p**self.abs_prec

    def to_padic_int(self) -> PadicInt:
        if self.abs_prec < 1:
            raise PrecisionExhausted("no digits known")
        return PadicInt(self.p, self.abs_prec, self.to_int())

    def _same_prime(self, other: "PadicNumber") -> None:
        if not isinstance(other, PadicNumber) or other.p != self.p:
            raise ValueError("p-adic operands must share the prime")

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "PadicNumber":
        if self.zero:
            return self
        return PadicNumber(self.p, self.v, -self.unit, self.prec)

    def __add__(self, other: "PadicNumber") -> "PadicNumber":
        self._same_prime(other)
        p = self.p
        N = min(self.abs_prec, other.abs_prec)
        if self.zero and other.zero:
            return PadicNumber.make_zero(p, N)
        terms = [x for x in (self, other) if not x.zero]
        v0 = min(x.v for x in terms)
        if N <= v0:
            return PadicNumber.make_zero(p, N)
        s = sum(x.unit * p ** (x.v - v0) for x in terms) % p ** (N - v0)
        if s == 0:
            return PadicNumber.make_zero(p, N)
        w = valuation_int(s, p)
        return PadicNumber(p, v0 + w, s // p**w, N - v0 - w)

    def __sub__(self, other: "PadicNumber") -> "PadicNumber":
        return self + (-other)

    def __mul__(self, other: "PadicNumber") -> "PadicNumber":
        self._same_prime(other)
        if self.zero and other.zero:
            return PadicNumber.make_zero(self.p, self.v + other.v)
        if self.zero or other.zero:
            z, x = (self, other) if self.zero else (other, self)
            return PadicNumber.make_zero(self.p, z.v + x.v)
        prec = min(self.prec, other.prec)
        return PadicNumber(self.p, self.v + other.v, self.unit * other.unit, prec)

    def inverse(self) -> "PadicNumber":
        if self.zero:
            raise DivisionByZero("inverse of a p-adic zero")
        q = self.p**self.prec
        return PadicNumber(self.p, -self.v, pow(self.unit, -1, q), self.prec)

    def __truediv__(self, other: "PadicNumber") -> "PadicNumber":
        return self * other.inverse()

    def __repr__(self) -> str:
        if self.zero:
            return f"O({self.p}^{self.v})"
        return f"{self.p}^{self.v}*{self.unit} + O({self.p}^{self.abs_prec})"


def padic_add(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    return a + b


def padic_mul(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    return a * b


def padic_neg(a: PadicNumber) -> PadicNumber:
    return -a


def padic_inv(a: PadicNumber) -> PadicNumber:
    return a.inverse()


# ---------------------------------------------------------------------------
# roots and lifting


def _mod(f: Poly, p: int, N: int = 1) -> Poly:
    dom = ModPrimePower(p, N)
    if f.domain == dom:
        return f
    if isinstance(f.domain, ModPrimePower):
        if f.domain.p != p or f.domain.N < N:
            raise BadModulus(f"cannot reduce {f.domain!r} modulo {p}^{N}")
        return Poly({e: c % dom.modulus for e, c in f.terms.items()}, f.vars, dom)
    return f.with_domain(dom)


def roots_mod_p(f: Poly, p: int) -> list[int]:
    """All r in [0, p) with f(r) = 0 mod p, ascending (exhaustive search)."""
    fp = _mod(f, p)
    if fp.is_zero():
        raise ZeroPolynomial(f"{f!r} vanishes identically mod {p}")
    return [r for r in range(p) if fp.eval(r) == 0]


def hensel_lift(f: Poly, r: int, p: int, N: int = DEFAULT_PRECISION) -> PadicInt:
    """Lift a simple root r of f mod p to the unique root mod p^N above it."""
    fN = _mod(f, p, N)
    dfN = fN.derivative()
    r %= p
    if fN.eval(r) % p:
        raise NotARoot(f"{r} is not a root of {f!r} mod {p}")
    if dfN.eval(r) % p == 0:
        raise NotSimpleRoot(f"{r} is a multiple root of {f!r} mod {p}")
    x, prec = r, 1
    while prec < N:
        prec = min(2 * prec, N)
        q = p**prec
        x = (x - fN.eval(x) * pow(dfN.eval(x), -1, q)) % q
    assert fN.eval(x) == 0
    return PadicInt(p, N, x)


# ---------------------------------------------------------------------------
# residues and primitive roots


def is_dth_power_residue(a: int, d: int, p: int) -> bool:
    """Whether a is a d-th power modulo the prime p (Euler's criterion)."""
    if (p - 1) % d:
        raise BadModulus(f"{d} does not divide {p} - 1")
    if a % p == 0:
        raise ValueError(f"{a} is divisible by {p}")
    return pow(a, (p - 1) // d, p) == 1


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x for an odd prime p."""
    if p < 3 or not isprime(p):
        raise ValueError(f"{p} is not an odd prime")
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


# ---------------------------------------------------------------------------
# split-completely checks for 2X^k - kX^2


def jb_polynomial(k: int) -> Poly:
    """2X^k - kX^2."""
    return Poly({(k,): 2, (2,): -k}, ("X",))


def jb_hypotheses(k: int, p: int) -> dict[str, bool]:
    """Hypotheses on (k, p) under which 2X^k - kX^2 splits over Z_p."""
    hyp = {
        "k >= 4": k >= 4,
        "p odd prime": p > 2 and isprime(p),
    }
    hyp["p does not divide 2k"] = hyp["p odd prime"] and (2 * k) % p != 0
    hyp["p = 1 mod (k-2)"] = k >= 3 and (p - 1) % (k - 2) == 0
    if k == p + 1:
        hyp["k = p+1 or k-1 is not a (k-2)th power residue"] = True
    elif hyp["p odd prime"] and hyp["p = 1 mod (k-2)"]:
        # k-1 = 0 mod p is not a unit, so certainly not a power residue
        hyp["k = p+1 or k-1 is not a (k-2)th power residue"] = (k - 1) % p == 0 or not (
            is_dth_power_residue(k - 1, k - 2, p)
        )
    else:
        hyp["k = p+1 or k-1 is not a (k-2)th power residue"] = False
    return hyp


@dataclass
class JBReport:
    k: int
    p: int
    N: int
    hypotheses: dict
    condA: bool
    condB: bool
    lifted_roots: list
    samples: list

    @property
    def passed(self) -> bool:
        return all(self.hypotheses.values()) and self.condA and self.condB

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "p": self.p,
            "precision": self.N,
            "phi": repr(jb_polynomial(self.k)),
            "hypotheses": self.hypotheses,
            "condA_second_derivative_unit": self.condA,
            "condB_fiber_splits": self.condB,
            "lifted_roots_at_origin": [r.rep for r in self.lifted_roots],
            "samples": self.samples,
            "sampling_note": (
                "condB is checked on the listed (x, z) in (pZ_p)^2; since "
                "psi(x,Y,z) = psi(0,Y,0) mod p there, the exhaustive mod-p "
                "root analysis is what carries over to all of (pZ_p)^2"
            ),
            "passed": self.passed,
        }


def sample_pairs(p: int, s: int) -> list[tuple[int, int]]:
    g = isqrt(max(s - 1, 0)) + 1  # smallest g with g*g >= s
    grid = [(p * a, p * b) for a in range(g) for b in range(g)]
    return grid[:s]


def verify_prop_jb(
    k: int, p: int, N: int = DEFAULT_PRECISION, samples: int = DEFAULT_SAMPLES
) -> JBReport:
    """Check that 2X^k - kX^2 has |phi''| >= 1 on Z_p and a fully split fiber.

    Raises :class:`HypothesisFailed` naming the first violated hypothesis.
    """
    hyp = jb_hypotheses(k, p)
    for name, ok in hyp.items():
        if not ok:
            raise HypothesisFailed(f"(k={k}, p={p}) violates '{name}'", name)
    phi = jb_polynomial(k)
    d2 = _mod(phi.derivative(order=2), p)
    condA = all(d2.eval(x) != 0 for x in range(p))

    psi = second_order_difference(phi)
    records = []
    condB = True
    origin_roots: list[PadicInt] = []
    for x, z in sample_pairs(p, samples):
        fiber = psi.substitute({"X": Fraction(x), "Z": Fraction(z)})
        roots = roots_mod_p(fiber, p)
        dfiber = _mod(fiber.derivative(), p)
        simple = all(dfiber.eval(r) != 0 for r in roots)
        ok = len(roots) == k - 2 and simple
        lifted = [hensel_lift(fiber, r, p, N) for r in roots] if simple else []
        ok = ok and len({r.residue() for r in lifted}) == len(lifted)
        condB = condB and ok
        if (x, z) == (0, 0):
            origin_roots = lifted
        records.append(
            {"x": x, "z": z, "roots_mod_p": roots, "lifted": [r.rep for r in lifted], "splits": ok}
        )
    return JBReport(k, p, N, hyp, condA, condB, origin_roots, records)


def find_sod_split_primes(k: int, bound: int) -> list[int]:
    """Primes p <= bound meeting every hypothesis of :func:`jb_hypotheses`."""
    if k < 4:
        raise ValueError("k must be at least 4")
    return [p for p in primerange(3, bound + 1) if all(jb_hypotheses(k, p).values())]
