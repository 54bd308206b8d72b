"""Sparse polynomials over exchangeable coefficient domains.

Polynomials are immutable maps ``exponent tuple -> coefficient``.  Three
coefficient domains are provided:

* :data:`RATIONAL` -- exact :class:`fractions.Fraction` arithmetic,
* :class:`ModPrimePower` -- exact arithmetic in Z/p^N Z,
* :data:`COMPLEX` -- IEEE double complex arithmetic (never exact).

The univariate, bivariate and trivariate cases share one class; the aliases
``UniPoly``, ``BiPoly`` and ``TriPoly`` exist for readability at call sites.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from numbers import Number
from typing import Any, Iterable, Mapping, Sequence

from .errors import DivisionByZero, DomainMismatch, NotDivisible

BigRational = Fraction

__all__ = [
    "BigRational",
    "RATIONAL",
    "COMPLEX",
    "ModPrimePower",
    "Poly",
    "UniPoly",
    "BiPoly",
    "TriPoly",
    "poly_add",
    "poly_mul",
    "poly_eval",
    "formal_derivative",
    "exact_divide",
    "compose",
]


# ---------------------------------------------------------------------------
# coefficient domains


class _RationalDomain:
    name = "Rational"
    exact = True
    zero = Fraction(0)
    one = Fraction(1)

    def convert(self, c: Any) -> Fraction:
        if isinstance(c, Fraction):
            return c
        if isinstance(c, int):
            return Fraction(c)
        if isinstance(c, str):
            return Fraction(c)
        if isinstance(c, float):
            # exact binary value of the float; callers wanting decimals pass strings
            return Fraction(c)
        raise DomainMismatch(f"cannot coerce {c!r} into the rationals")

    def is_zero(self, c) -> bool:
        return c == 0

    def div(self, a, b):
        return a / b

    def __repr__(self) -> str:
        return "RATIONAL"

    def __eq__(self, other) -> bool:
        return isinstance(other, _RationalDomain)

    def __hash__(self) -> int:
        return hash("Rational")


class _ComplexDomain:
    name = "ComplexFloat"
    exact = False
    zero = 0j
    one = 1 + 0j
    # coefficients below this magnitude are dropped after arithmetic
    tol = 1e-14

    def convert(self, c: Any) -> complex:
        if isinstance(c, Number):
            return complex(c)
        if isinstance(c, str):
            return complex(Fraction(c))
        raise DomainMismatch(f"cannot coerce {c!r} into ComplexFloat")

    def is_zero(self, c) -> bool:
        return abs(c) <= self.tol

    def div(self, a, b):
        return a / b

    def __repr__(self) -> str:
        return "COMPLEX"

    def __eq__(self, other) -> bool:
        return isinstance(other, _ComplexDomain)

    def __hash__(self) -> int:
        return hash("ComplexFloat")


@dataclass(frozen=True)
class ModPrimePower:
    """The residue ring Z/p^N Z; coefficients are ints in ``[0, p**N)``."""

    p: int
    N: int = 1

    name = "ModPrimePower"
    exact = True

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1 % self.modulus

    def convert(self, c: Any) -> int:
        q = self.modulus
        if isinstance(c, int):
            return c % q
        if isinstance(c, Fraction):
            if c.denominator % self.p == 0:
                raise DomainMismatch(f"{c} is not {self.p}-integral")
            return c.numerator * pow(c.denominator, -1, q) % q
        raise DomainMismatch(f"cannot coerce {c!r} into Z/{self.p}^{self.N}")

    def is_zero(self, c) -> bool:
        return c % self.modulus == 0

    def div(self, a, b):
        try:
            return a * pow(b, -1, self.modulus) % self.modulus
        except ValueError:
            raise NotDivisible(f"{b} is not a unit mod {self.p}^{self.N}") from None


RATIONAL = _RationalDomain()
COMPLEX = _ComplexDomain()


def _reduce(domain, c):
    if isinstance(domain, ModPrimePower):
        return c % domain.modulus
    return c


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Immutable sparse polynomial in the variables ``vars``."""

    __slots__ = ("vars", "domain", "_terms")

    def __init__(
        self,
        terms: Mapping[Sequence[int], Any] | None = None,
        vars: Sequence[str] = ("X",),
        domain=RATIONAL,
    ):
        self.vars = tuple(vars)
        self.domain = domain
        n = len(self.vars)
        clean: dict[tuple[int, ...], Any] = {}
        for exp, c in (terms or {}).items():
            exp = (exp,) if isinstance(exp, int) else tuple(int(e) for e in exp)
            if len(exp) != n or min(exp, default=0) < 0:
                raise ValueError(f"bad exponent {exp} for variables {self.vars}")
            c = domain.convert(c)
            if exp in clean:
                c = _reduce(domain, clean[exp] + c)
            if domain.is_zero(c):
                clean.pop(exp, None)
            else:
                clean[exp] = c
        self._terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict, vars: tuple, domain) -> "Poly":
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.domain = domain
        obj._terms = terms
        return obj

    @classmethod
    def constant(cls, c, vars: Sequence[str] = ("X",), domain=RATIONAL) -> "Poly":
        return cls({(0,) * len(vars): c}, vars, domain)

    @classmethod
    def variable(cls, name: str, vars: Sequence[str] = ("X",), domain=RATIONAL) -> "Poly":
        vars = tuple(vars)
        exp = tuple(1 if v == name else 0 for v in vars)
        if sum(exp) != 1:
            raise ValueError(f"{name!r} is not one of {vars}")
        return cls({exp: 1}, vars, domain)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, var: str = "X", domain=RATIONAL) -> "Poly":
        """Univariate polynomial from ascending coefficients ``a_0, a_1, ...``."""
        return cls({(j,): c for j, c in enumerate(coeffs)}, (var,), domain)

    # -- basic queries ----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int | None:
        """Total degree, or ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        return max(sum(e) for e in self._terms)

    def degree_in(self, var: str) -> int | None:
        i = self.vars.index(var)
        if not self._terms:
            return None
        return max(e[i] for e in self._terms)

    def coeff(self, exp) -> Any:
        exp = (exp,) if isinstance(exp, int) else tuple(exp)
        return self._terms.get(exp, self.domain.zero)

    def coeffs(self) -> list:
        """Dense ascending coefficient list of a univariate polynomial."""
        self._require_univariate()
        if not self._terms:
            return []
        out = [self.domain.zero] * (self.degree + 1)
        for (j,), c in self._terms.items():
            out[j] = c
        return out

    @property
    def leading_coeff(self):
        self._require_univariate()
        if not self._terms:
            return self.domain.zero
        return self._terms[(self.degree,)]

    def _require_univariate(self) -> None:
        if self.nvars != 1:
            raise ValueError("operation needs a univariate polynomial")

    def _check(self, other: "Poly") -> None:
        if other.domain != self.domain:
            raise DomainMismatch(f"{self.domain!r} vs {other.domain!r}")
        if other.vars != self.vars:
            raise DomainMismatch(f"variables {self.vars} vs {other.vars}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(other, self.vars, self.domain)

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        dom = self.domain
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = _reduce(dom, out.get(e, dom.zero) + c)
            if dom.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return Poly._raw(out, self.vars, dom)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        dom = self.domain
        return Poly._raw({e: _reduce(dom, -c) for e, c in self._terms.items()}, self.vars, dom)

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        dom = self.domain
        if not isinstance(other, Poly):
            c = dom.convert(other)
            if dom.is_zero(c):
                return Poly._raw({}, self.vars, dom)
            out = {}
            for e, a in self._terms.items():
                v = _reduce(dom, a * c)
                if not dom.is_zero(v):
                    out[e] = v
            return Poly._raw(out, self.vars, dom)
        self._check(other)
        acc: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, dom.zero) + c1 * c2
        out = {}
        for e, c in acc.items():
            c = _reduce(dom, c)
            if not dom.is_zero(c):
                out[e] = c
        return Poly._raw(out, self.vars, dom)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        """Division by a scalar only; use exact_divide for polynomial divisors."""
        if isinstance(other, Poly):
            return NotImplemented
        dom = self.domain
        c = dom.convert(other)
        if dom.is_zero(c):
            raise DivisionByZero("division of a polynomial by zero")
        return self * dom.div(dom.convert(1), c)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(1, self.vars, self.domain)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            if self.vars != other.vars or self.domain != other.domain:
                return False
            if self.domain.exact:
                return self._terms == other._terms
            return (self - other).is_zero()
        if isinstance(other, Number):
            return self == Poly.constant(other, self.vars, self.domain)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self._terms.items())))

    # -- evaluation -------------------------------------------------------

    def __call__(self, *point):
        return self.eval(*point)

    def eval(self, *point):
        """Evaluate at a full point; coordinates may be numbers or polynomials."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        dom = self.domain
        if any(isinstance(x, Poly) for x in point):
            return self.substitute(dict(zip(self.vars, point)))
        if isinstance(dom, ModPrimePower):
            q = dom.modulus
            pt = [dom.convert(x) for x in point]
            total = 0
            for e, c in self._terms.items():
                t = c
                for x, k in zip(pt, e):
                    if k:
                        t = t * pow(x, k, q) % q
                total += t
            return total % q
        if self.nvars == 1:
            x = point[0]
            total = dom.zero
            for c in reversed(self.coeffs()):
                total = total * x + c
            return total
        total = dom.zero
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def substitute(self, values: Mapping[str, Any]) -> "Poly":
        """Substitute numbers or polynomials for some variables.

        Substituted variables are removed from the variable list unless a
        polynomial value brings its own variables, in which case the result
        lives over the value's variables.
        """
        polys = [v for v in values.values() if isinstance(v, Poly)]
        if polys:
            target_vars = polys[0].vars
            dom = polys[0].domain
            for q in polys[1:]:
                if q.vars != target_vars:
                    raise DomainMismatch("substituted polynomials must share variables")
            images = []
            for v in self.vars:
                if v in values:
                    val = values[v]
                    images.append(val if isinstance(val, Poly) else Poly.constant(val, target_vars, dom))
                else:
                    images.append(Poly.variable(v, target_vars, dom))
            result = Poly._raw({}, target_vars, dom)
            power_cache: dict = {}
            for e, c in self._terms.items():
                t = Poly.constant(c, target_vars, dom)
                for i, k in enumerate(e):
                    if k:
                        key = (i, k)
                        if key not in power_cache:
                            power_cache[key] = images[i] ** k
                        t = t * power_cache[key]
                result = result + t
            return result
        keep = [i for i, v in enumerate(self.vars) if v not in values]
        new_vars = tuple(self.vars[i] for i in keep)
        numeric = any(isinstance(v, complex) or isinstance(v, float) for v in values.values())
        dom = COMPLEX if (numeric and self.domain is RATIONAL) else self.domain
        acc: dict = {}
        for e, c in self._terms.items():
            t = c
            for i, v in enumerate(self.vars):
                if v in values and e[i]:
                    x = values[v]
                    if isinstance(dom, ModPrimePower):
                        t = t * pow(dom.convert(x), e[i], dom.modulus)
                    else:
                        t = t * x ** e[i]
            key = tuple(e[i] for i in keep)
            acc[key] = acc.get(key, 0) + t
        if not new_vars:
            new_vars = ("X",) if not self.vars else (self.vars[0],)
            acc = {(0,): sum(acc.values(), dom.zero)} if acc else {}
        return Poly(acc, new_vars, dom)

    # -- calculus ---------------------------------------------------------

    def derivative(self, var: str | None = None, order: int = 1) -> "Poly":
        """Formal partial derivative; coefficient of X^i in dP is (i+1) a_{i+1}."""
        if order < 0:
            raise ValueError("order must be non-negative")
        i = 0 if var is None else self.vars.index(var)
        dom = self.domain
        out: dict = {}
        for e, c in self._terms.items():
            k = e[i]
            if k < order:
                continue
            factor = 1
            for j in range(order):
                factor *= k - j
            v = _reduce(dom, c * factor)
            if not dom.is_zero(v):
                ne = list(e)
                ne[i] = k - order
                out[tuple(ne)] = v
        return Poly._raw(out, self.vars, dom)

    # -- conversion -------------------------------------------------------

    def with_domain(self, domain) -> "Poly":
        return Poly({e: domain.convert(c) for e, c in self._terms.items()}, self.vars, domain)

    def rename(self, vars: Sequence[str]) -> "Poly":
        vars = tuple(vars)
        if len(vars) != self.nvars:
            raise ValueError("wrong number of variable names")
        return Poly._raw(dict(self._terms), vars, self.domain)

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def to_dict(self) -> dict:
        """JSON-ready form with decimal-string integers."""
        if self.domain is COMPLEX:
            raise DomainMismatch("ComplexFloat polynomials have no exact serialization")
        terms = []
        for e, c in self.sorted_terms():
            c = Fraction(c)
            terms.append({"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)})
        out = {"vars": list(self.vars), "terms": terms}
        if isinstance(self.domain, ModPrimePower):
            out["modulus"] = {"p": self.domain.p, "N": self.domain.N}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Poly":
        dom = RATIONAL
        if "modulus" in data:
            dom = ModPrimePower(int(data["modulus"]["p"]), int(data["modulus"]["N"]))
        terms = {}
        for t in data["terms"]:
            c = Fraction(int(t["num"]), int(t.get("den", "1")))
            terms[tuple(t["exp"])] = c if dom is RATIONAL else dom.convert(c)
        return cls(terms, data["vars"], dom)

    @classmethod
    def from_json(cls, text: str) -> "Poly":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if isinstance(c, complex):
                cs = f"({c.real:.6g}{c.imag:+.6g}j)"
            else:
                cs = str(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1 and not isinstance(c, complex):
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


UniPoly = Poly
BiPoly = Poly
TriPoly = Poly


# ---------------------------------------------------------------------------
# functional interface


def poly_add(p: Poly, q: Poly) -> Poly:
    return p + q


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_eval(p: Poly, *point):
    """Evaluate ``p`` at ``point``; exact in exact domains."""
    return p.eval(*point)


def formal_derivative(p: Poly, order: int = 1, var: str | None = None) -> Poly:
    return p.derivative(var, order)


def compose(outer: Poly, inner: Poly) -> Poly:
    """``outer(inner)`` for univariate ``outer`` by Horner's scheme."""
    outer._require_univariate()
    if outer.domain != inner.domain:
        raise DomainMismatch(f"{outer.domain!r} vs {inner.domain!r}")
    if inner.domain is RATIONAL and inner._terms and all(sum(e) == 1 for e in inner._terms):
        return _compose_linear(outer, inner)
    result = Poly._raw({}, inner.vars, inner.domain)
    for c in reversed(outer.coeffs()):
        result = result * inner + c
    return result


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _compose_linear(outer: Poly, inner: Poly) -> Poly:
    # multinomial expansion of sum_j a_j (c_1 V_1 + ... + c_n V_n)^j; each
    # exponent comes from exactly one (j, split), so nothing accumulates
    n = inner.nvars
    lin = [inner._terms.get(tuple(int(i == v) for i in range(n)), 0) for v in range(n)]
    active = [v for v in range(n) if lin[v] != 0]
    lin = [int(c) if Fraction(c).denominator == 1 else c for c in lin]
    out: dict = {}
    for (j,), a in outer._terms.items():
        fj = factorial(j)
        for split in _compositions(j, len(active)):
            multinomial, scale = fj, 1
            exp = [0] * n
            for v, e in zip(active, split):
                if e:
                    multinomial //= factorial(e)
                    scale *= lin[v] ** e
                    exp[v] = e
            out[tuple(exp)] = a * (multinomial * scale)
    return Poly._raw(out, inner.vars, inner.domain)


def exact_divide(numerator: Poly, divisor: Poly) -> Poly:
    """Quotient of an exact polynomial division.

    Lexicographic leading-term division; for a single divisor that divides
    the numerator every step succeeds, so any surviving remainder term means
    the division is not exact and raises :class:`NotDivisible`.
    """
    numerator._check(divisor)
    if divisor.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    dom = numerator.domain
    vars = numerator.vars
    dterms = list(divisor._terms.items())
    lead = max(divisor._terms)
    lc = divisor._terms[lead]
    rem = dict(numerator._terms)
    heap = [tuple(-x for x in e) for e in rem]
    heapq.heapify(heap)
    quot: dict = {}
    while heap:
        e = tuple(-x for x in heapq.heappop(heap))
        c = rem.get(e)
        if c is None:
            continue
        if any(a < b for a, b in zip(e, lead)):
            raise NotDivisible(f"remainder term with exponent {e} cannot be cancelled")
        qe = tuple(a - b for a, b in zip(e, lead))
        qc = dom.div(c, lc)
        quot[qe] = qc
        for de, dc in dterms:
            key = tuple(a + b for a, b in zip(qe, de))
            v = _reduce(dom, rem.get(key, dom.zero) - qc * dc)
            if dom.is_zero(v):
                rem.pop(key, None)
            else:
                if key not in rem:
                    heapq.heappush(heap, tuple(-x for x in key))
                rem[key] = v
    return Poly._raw(quot, vars, dom)
