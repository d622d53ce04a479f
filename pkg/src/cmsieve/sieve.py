"""End-to-end special-point sieve for plane curves in Y(1)^2.

A curve is a primitive bivariate integer polynomial F(x, y).  After
stripping coordinate-fiber components (the Z' locus), the pipeline derives
the compositum-degree cap c9, runs the effective threshold c11, and scans
discriminant pairs (D1, D2) up to an enumeration cap: a special point
(j1, j2) on F with j_i of discriminant D_i exists exactly when

    gcd( Res_y(H_D2(y), F(x, y)), H_D1(x) )

is nontrivial, and that gcd is the exact certificate recorded with the
hit.  All polynomial arithmetic is exact (sympy over ZZ/QQ).

The rigorous c11 threshold is astronomically larger than any feasible
enumeration; reports therefore always state both the bound and the cap
actually scanned, and flag cap_below_bound rather than ever claiming
completeness the scan does not have.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from enum import Enum

import sympy
from sympy import ZZ, Poly, Symbol

from .bounds import AndreOortParams, BoundReport, andre_oort_c11
from .errors import CurveParseError, DegenerateCurveError, ResourceLimitError
from .hilbert import singular_moduli_up_to
from .quadform import Discriminant

X = Symbol("x")
Y = Symbol("y")

DEFAULT_SCAN_CAP = 10_000
MAX_SCAN_CAP = 100_000


@dataclass(frozen=True)
class CurveSpec:
    """A primitive integer polynomial cutting out a curve in Y(1)^2."""

    poly: Poly
    deg_x: int
    deg_y: int
    defining_field_degree: int = 1
    text: str = ""

    @classmethod
    def from_poly(cls, poly: Poly, defining_field_degree: int = 1, text: str = "") -> "CurveSpec":
        if poly.is_zero:
            raise CurveParseError("the zero polynomial does not define a curve")
        if defining_field_degree < 1:
            raise ValueError("defining_field_degree must be a positive integer")
        content, prim = poly.primitive()
        if prim.LC() < 0:
            prim = -prim
        if abs(content) > 1:
            warnings.warn(
                f"polynomial content {abs(content)} normalized away", stacklevel=3
            )
        return cls(
            poly=prim,
            deg_x=prim.degree(X),
            deg_y=prim.degree(Y),
            defining_field_degree=defining_field_degree,
            text=text or str(prim.as_expr()),
        )

    def expr(self):
        return self.poly.as_expr()


# ---------------------------------------------------------------------------
# polynomial grammar: integer literals, x, y, + - * ^, parentheses
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([xy])|([-+*^()])|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(4):
            raise CurveParseError(f"unexpected character {m.group(4)!r}", m.start(4))
        if m.group(1):
            tokens.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2):
            tokens.append(("var", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent onto sparse {(i, j): coeff} dictionaries."""

    MAX_EXPONENT = 512

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, symbol):
        kind, val, pos = self.peek()
        if kind != "op" or val != symbol:
            raise CurveParseError(f"expected {symbol!r}", pos)
        return self.advance()

    def parse(self):
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise CurveParseError(f"unexpected token {val!r}", pos)
        return result

    def expr(self):
        kind, val, pos = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.advance()
            if val == "-":
                sign = -1
        acc = _scale(self.term(), sign)
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                acc = _add(acc, _scale(rhs, 1 if val == "+" else -1))
            else:
                return acc

    def term(self):
        acc = self.power()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                acc = _mul(acc, self.power())
            else:
                return acc

    def power(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            kind, val, pos = self.peek()
            if kind != "int":
                raise CurveParseError("exponent must be an integer literal", pos)
            self.advance()
            if val > self.MAX_EXPONENT:
                raise CurveParseError(f"exponent {val} too large", pos)
            return _pow(base, val)
        return base

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "int":
            return {(0, 0): val} if val else {}
        if kind == "var":
            return {(1, 0): 1} if val == "x" else {(0, 1): 1}
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "op" and val == "-":
            return _scale(self.atom(), -1)
        raise CurveParseError(f"unexpected token {val!r}", pos)


def _add(p, q):
    out = dict(p)
    for k, v in q.items():
        w = out.get(k, 0) + v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _scale(p, s):
    if s == 1:
        return p
    return {k: s * v for k, v in p.items()}


def _mul(p, q):
    out = {}
    for (i1, j1), v1 in p.items():
        for (i2, j2), v2 in q.items():
            k = (i1 + i2, j1 + j2)
            w = out.get(k, 0) + v1 * v2
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    return out


def _pow(p, e):
    out = {(0, 0): 1}
    for _ in range(e):
        out = _mul(out, p)
    return out


def parse_curve(text: str, defining_field_degree: int = 1) -> CurveSpec:
    """Parse the documented grammar into a normalized primitive CurveSpec."""
    monomials = _Parser(text).parse()
    if not monomials:
        raise CurveParseError("the zero polynomial does not define a curve")
    expr = sympy.Add(
        *(c * X**i * Y**j for (i, j), c in sorted(monomials.items()))
    )
    poly = Poly(expr, X, Y, domain=ZZ)
    return CurveSpec.from_poly(poly, defining_field_degree, text=text.strip())


# ---------------------------------------------------------------------------
# degenerate fiber stripping (the Z' locus)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberComponent:
    """A coordinate-fiber component of the curve: an irreducible factor
    involving only one of the two variables."""

    variable: str
    factor: Poly
    multiplicity: int

    def __str__(self):
        return f"{self.factor.as_expr()} = 0"


def _one_variable_content(poly: Poly, main: Symbol, coeff_var: Symbol) -> Poly:
    """gcd of the coefficients of poly seen as a polynomial in `main` over
    Z[coeff_var]; this is the product of all coeff_var-only factors."""
    coeffs = [Poly(c, coeff_var, domain=ZZ) for c in poly.as_poly(main).all_coeffs()]
    g = coeffs[0]
    for c in coeffs[1:]:
        g = g.gcd(c)
    return g


def strip_degenerate(curve: CurveSpec):
    """Split off every component of the form p(x) = 0 or p(y) = 0.

    Returns (stripped_curve, components).  Raises DegenerateCurveError when
    nothing remains, i.e. the curve was entirely a union of fibers.
    """
    poly = curve.poly
    components: list[FiberComponent] = []
    for main, coeff_var, label in ((Y, X, "x"), (X, Y, "y")):
        content = _one_variable_content(poly, main, coeff_var)
        if content.degree() > 0:
            for factor, mult in content.factor_list()[1]:
                components.append(
                    FiberComponent(label, factor, mult)
                )
            poly = Poly(
                sympy.exquo(poly.as_expr(), content.as_expr()), X, Y, domain=ZZ
            )
    if poly.total_degree() == 0:
        raise DegenerateCurveError(
            "the curve is a union of coordinate fibers; every point is special"
        )
    for main, coeff_var in ((Y, X), (X, Y)):
        assert _one_variable_content(poly, main, coeff_var).degree() == 0
    stripped = CurveSpec.from_poly(
        poly, curve.defining_field_degree, text=str(poly.as_expr())
    )
    assert stripped.deg_x >= 1 and stripped.deg_y >= 1
    return stripped, tuple(components)


def derive_c9(curve: CurveSpec) -> int:
    """Compositum-degree cap for a stripped curve: either coordinate of a
    point determines the other up to max(deg_x, deg_y) choices, each
    defined over the field of definition."""
    return max(curve.deg_x, curve.deg_y) * curve.defining_field_degree


# ---------------------------------------------------------------------------
# exact special-point scan (the Z'' certificates)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialPointHit:
    """An exactly certified special point: the witness polynomial divides
    both H_D1(x) and the y-resultant of H_D2 with the curve, so each of its
    roots is the x-coordinate of a point on the curve whose coordinates are
    singular moduli of discriminants d1 and d2."""

    d1: Discriminant
    d2: Discriminant
    same_cm_field: bool
    witness: Poly

    def __post_init__(self):
        expected = self.d1.fundamental_part == self.d2.fundamental_part
        if self.same_cm_field != expected:
            raise ValueError("same_cm_field contradicts the fundamental parts")


class CapVsBound(Enum):
    CAP_REACHED_BOUND = "cap_reached_bound"
    CAP_BELOW_BOUND = "cap_below_bound"


@dataclass(frozen=True)
class SieveReport:
    curve: CurveSpec
    z_prime: tuple[FiberComponent, ...]
    c11: BoundReport
    enumeration_cap: int
    hits: tuple[SpecialPointHit, ...]
    cap_vs_bound: CapVsBound

    def __post_init__(self):
        if self.enumeration_cap < self.c11.threshold and (
            self.cap_vs_bound is not CapVsBound.CAP_BELOW_BOUND
        ):
            raise ValueError("cap below the rigorous bound must be flagged")


def special_point_scan(curve: CurveSpec, cap: int) -> tuple[SpecialPointHit, ...]:
    """Scan all discriminant pairs with |D_i| <= cap for special points on
    the curve; every hit carries an exact witness polynomial."""
    if cap < 3:
        raise ValueError("cap must be at least 3")
    if cap > MAX_SCAN_CAP:
        raise ResourceLimitError(
            f"scan cap {cap} exceeds the configured limit {MAX_SCAN_CAP}"
        )
    table = singular_moduli_up_to(cap)
    f_expr = curve.expr()
    hits = []
    for d2, h2 in table:
        h2_poly = Poly(h2.coefficients, Y, domain=ZZ)
        res = sympy.resultant(h2_poly.as_expr(), f_expr, Y)
        res_poly = Poly(res, X, domain=ZZ)
        assert not res_poly.is_zero, "stripped curves cannot contain a full fiber"
        for d1, h1 in table:
            h1_poly = Poly(h1.coefficients, X, domain=ZZ)
            g = sympy.gcd(res_poly.as_expr(), h1_poly.as_expr(), X)
            g_poly = Poly(g, X)
            if g_poly.degree() >= 1:
                witness = Poly(g_poly, X, domain=ZZ).primitive()[1]
                hits.append(
                    SpecialPointHit(
                        d1=d1,
                        d2=d2,
                        same_cm_field=d1.fundamental_part == d2.fundamental_part,
                        witness=witness,
                    )
                )
    hits.sort(key=lambda h: (-h.d1.value, -h.d2.value))
    return tuple(hits)


def sieve(
    curve,
    cap_override: int | None = None,
    defining_field_degree: int = 1,
    eps_grid=None,
) -> SieveReport:
    """Full pipeline: strip Z', derive c9, bound c11, scan up to the cap."""
    if isinstance(curve, str):
        curve = parse_curve(curve, defining_field_degree)
    stripped, z_prime = strip_degenerate(curve)
    c9 = derive_c9(stripped)
    report = andre_oort_c11(AndreOortParams(n=2, c9=c9), eps_grid)
    cap = min(report.threshold, cap_override if cap_override is not None else DEFAULT_SCAN_CAP)
    hits = special_point_scan(stripped, cap)
    flag = (
        CapVsBound.CAP_BELOW_BOUND
        if cap < report.threshold
        else CapVsBound.CAP_REACHED_BOUND
    )
    return SieveReport(
        curve=stripped,
        z_prime=z_prime,
        c11=report,
        enumeration_cap=cap,
        hits=hits,
        cap_vs_bound=flag,
    )


# ---------------------------------------------------------------------------
# JSON report schema: integers as decimal strings throughout
# ---------------------------------------------------------------------------


def _audit_to_json(report: BoundReport):
    out = []
    for entry in report.audit:
        value = entry.value
        if isinstance(value, int):
            value = str(value)
        out.append({"name": entry.name, "value": value, "formula": entry.formula})
    return out


def report_to_json(report: SieveReport) -> dict:
    return {
        "curve": {
            "poly": str(report.curve.expr()),
            "deg_x": str(report.curve.deg_x),
            "deg_y": str(report.curve.deg_y),
            "defining_field_degree": str(report.curve.defining_field_degree),
        },
        "z_prime": [
            {
                "variable": comp.variable,
                "factor": str(comp.factor.as_expr()),
                "multiplicity": str(comp.multiplicity),
            }
            for comp in report.z_prime
        ],
        "c11": {
            "threshold": str(report.c11.threshold),
            "epsilon1": report.c11.epsilon1,
            "epsilon2": report.c11.epsilon2,
            "audit": _audit_to_json(report.c11),
            "exceptional_field_caveat": report.c11.exceptional_field_caveat,
        },
        "cap": str(report.enumeration_cap),
        "cap_vs_bound": report.cap_vs_bound.value,
        "hits": [
            {
                "d1": str(hit.d1.value),
                "d2": str(hit.d2.value),
                "same_cm_field": hit.same_cm_field,
                "witness_poly": str(hit.witness.as_expr()),
            }
            for hit in report.hits
        ],
    }


def report_to_json_text(report: SieveReport) -> str:
    return json.dumps(report_to_json(report), indent=2)
