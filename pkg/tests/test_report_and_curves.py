import json
import math
from fractions import Fraction

import numpy as np
import pytest

from sodkit.algebra import Poly
from sodkit.curves import parse_phi, registry_poly, resolve_handle, resolve_poly
from sodkit.errors import DegreeTooLow
from sodkit.report import VerificationReport, dumps

T = Poly.variable("X")


def make(ratio, budget=0.0):
    return VerificationReport({"x": 1}, {"q": Fraction(1, 2)}, 2.0, "two", "words", ratio, budget, timing=1.5)


def test_pass_rule_includes_budget():
    assert make(2.0).passed
    assert not make(2.1).passed
    assert make(2.1, 0.2).passed


def test_report_serialization():
    d = make(1.0).to_dict()
    assert "timing" not in d and d["passed"] is True and d["quantities"]["q"] == 0.5
    assert "timing" in make(1.0).to_dict(include_timing=True)
    json.loads(make(1.0).to_json())


def test_dumps_special_values():
    text = dumps({"b": float("inf"), "a": complex(1, 2), "c": np.float64(0.5), "d": float("nan")})
    data = json.loads(text)
    assert data == {"a": {"re": 1.0, "im": 2.0}, "b": "inf", "c": 0.5, "d": "nan"}
    assert text.index('"a"') < text.index('"b"')


def test_parse_phi():
    assert parse_phi("2x^4 - 4x^2") == 2 * T**4 - 4 * T**2
    assert parse_phi("t**3 + t/2") == T**3 + T / 2
    assert parse_phi("7") == Poly.constant(7)
    for bad in ("x*y", "sin(x)", "x^", "1/x"):
        with pytest.raises(ValueError):
            parse_phi(bad)


def test_registry():
    assert registry_poly("parabola") == T**2
    assert registry_poly("jb:4") == 2 * T**4 - 4 * T**2
    assert registry_poly("monomial:5") == T**5
    with pytest.raises(DegreeTooLow):
        registry_poly("monomial:1")
    with pytest.raises(KeyError):
        registry_poly("spiral")
    with pytest.raises(ValueError):
        resolve_poly(None, None)
    h = resolve_handle(handle="cosh")
    assert h(0.0) == 0 and h.deriv(0.0, 2) == 1
    assert resolve_handle(phi="x^3").k == 3
    assert math.isclose(resolve_handle(handle="cubic")(0.5), 0.125)
