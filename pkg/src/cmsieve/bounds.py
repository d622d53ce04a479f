"""Effective discriminant-threshold pipelines.

Both pipelines compare two bounds on #Pic(O) for an imaginary quadratic
order O: from below, the Siegel-Tatuzawa bound c4(eps2) |D|^(1/2-eps2)
(valid outside at most one exceptional field K*); from above, an odd-part
cap times the genus bound on the even part,

    odd_cap * c8(eps1)^e * |D|^(eps1 * e),

where e caps the length of 2-power cyclic factors.  Since both sides are
monomials in |D|, they cross exactly once whenever 1/2 - eps2 > eps1 * e,
and any order violating the comparison must satisfy |D| < crossing.  The
crossing is located by bisection in log2 |D| over an epsilon grid and the
best grid point wins; every report carries a replayable audit trail and
the permanent caveat that K* can never be excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as iproduct

import mpmath

from .dirichlet import (
    genus_c8,
    log2_genus_c8,
    log2_tatuzawa_c4,
    tatuzawa_c4,
    tatuzawa_validity_threshold,
)
from .errors import InfeasibleGridError, ResourceLimitError

EPS_VALUES = (0.30, 0.20, 0.12, 0.07, 0.04, 0.02)

#: refuse to materialize thresholds beyond this many bits (8 MiB integers)
MAX_THRESHOLD_BITS = 1 << 26


def default_eps_grid() -> tuple[tuple[float, float], ...]:
    return tuple(iproduct(EPS_VALUES, EPS_VALUES))


def c7(r: int, c5c6: float) -> int:
    """(r+1) + floor(log2(c5 c6)): cap on the 2-power cyclic factor length
    in the Heegner-point pipeline."""
    if r < 1:
        raise ValueError("need r >= 1")
    if c5c6 < 1:
        raise ValueError("need c5*c6 >= 1")
    return (r + 1) + math.floor(math.log2(c5c6))


def c10(n: int, c9: float) -> int:
    """(n+1) + floor(log2(c9)): the same cap for the special-point pipeline."""
    if n < 2:
        raise ValueError("need n >= 2")
    if c9 < 1:
        raise ValueError("need c9 >= 1")
    return (n + 1) + math.floor(math.log2(c9))


def solve_crossing(
    log2_odd_cap: float,
    even_exponent: int,
    log2_c8: float,
    log2_c4: float,
    eps1: float,
    eps2: float,
) -> float:
    """log2 of the unique B with
    c4 B^(1/2-eps2) = odd_cap c8^e B^(eps1 e), found by bisection.

    Both sides are monomials, so f(t) = log-LHS - log-RHS is strictly
    increasing in t = log2 B when the exponent gap is positive.
    """
    gap = 0.5 - eps2 - eps1 * even_exponent
    if gap <= 0:
        raise ValueError("exponent gap must be positive")

    def f(t: float) -> float:
        lhs = log2_c4 + (0.5 - eps2) * t
        rhs = log2_odd_cap + even_exponent * log2_c8 + eps1 * even_exponent * t
        return lhs - rhs

    lo, hi = 0.0, 64.0
    while f(hi) < 0:
        hi *= 2
    while f(lo) > 0:
        lo = 2 * lo - 64 if lo else -64.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def crossing_closed_form(
    log2_odd_cap: float,
    even_exponent: int,
    log2_c8: float,
    log2_c4: float,
    eps1: float,
    eps2: float,
) -> float:
    """The same crossing in closed form (independent check of the bisection)."""
    gap = 0.5 - eps2 - eps1 * even_exponent
    if gap <= 0:
        raise ValueError("exponent gap must be positive")
    return (log2_odd_cap + even_exponent * log2_c8 - log2_c4) / gap


def ceil_pow2(log2_value: float) -> int:
    """ceil(2^log2_value) as an exact integer.

    Above the float range the mantissa is rounded up and shifted, which
    keeps the result deterministic and never below 2^log2_value.
    """
    if log2_value > MAX_THRESHOLD_BITS:
        raise ResourceLimitError(
            f"threshold of 2^{log2_value:.4g} cannot be materialized"
        )
    if log2_value <= 64:
        with mpmath.workprec(128):
            return int(mpmath.ceil(mpmath.power(2, mpmath.mpf(log2_value))))
    n = math.floor(log2_value)
    frac = log2_value - n
    mantissa = math.ceil(2.0**frac * (1 << 52))
    return mantissa << (n - 52)


@dataclass(frozen=True)
class AuditEntry:
    """One named value plus the expression that reproduces it.

    The formula is a Python expression over math, the replay helpers, and
    all previously defined entry names; replay_audit re-evaluates the
    chain and must land on the stored values bit for bit.
    """

    name: str
    value: object
    formula: str


@dataclass(frozen=True)
class BoundReport:
    threshold: int
    epsilon1: float
    epsilon2: float
    audit: tuple[AuditEntry, ...]
    exceptional_field_caveat: bool = True

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be positive")
        if not self.audit:
            raise ValueError("audit trail must be non-empty")
        if not self.exceptional_field_caveat:
            raise ValueError("the exceptional-field caveat can never be dropped")


@dataclass(frozen=True)
class HeegnerParams:
    """Inputs of the Heegner-independence pipeline: r CM points, the
    effective open-image constant c5 (supplied, not computed), and the
    parameterization degree c6."""

    r: int
    c5: float
    c6: int

    def __post_init__(self):
        if self.r < 2 or self.c5 < 1 or self.c6 < 1:
            raise ValueError("need r >= 2, c5 >= 1, c6 >= 1")


@dataclass(frozen=True)
class AndreOortParams:
    """Inputs of the special-point pipeline: ambient dimension n and the
    compositum-degree cap c9 derived from the curve."""

    n: int
    c9: float

    def __post_init__(self):
        if self.n < 2 or self.c9 < 1:
            raise ValueError("need n >= 2, c9 >= 1")


_REPLAY_ENV = {
    "math": math,
    "log2_genus_c8": log2_genus_c8,
    "log2_tatuzawa_c4": log2_tatuzawa_c4,
    "log2_tatuzawa_validity": lambda eps: math.log2(tatuzawa_validity_threshold(eps)),
    "solve_crossing": solve_crossing,
    "ceil_pow2": ceil_pow2,
    "max": max,
    "min": min,
}


def replay_audit(report: BoundReport) -> int:
    """Re-evaluate every audit formula in order; raises if any recomputed
    value differs from the stored one.  Returns the replayed threshold."""
    names: dict[str, object] = {}
    for entry in report.audit:
        value = eval(entry.formula, dict(_REPLAY_ENV), dict(names))
        if value != entry.value:
            raise AssertionError(
                f"audit entry {entry.name} replays to {value!r},"
                f" stored {entry.value!r}"
            )
        names[entry.name] = value
    if names["threshold"] != report.threshold:
        raise AssertionError("replayed threshold differs from the report")
    return report.threshold


def solve_disc_threshold(
    odd_cap: float,
    even_exponent: int,
    eps_grid=None,
    extra_audit: tuple[AuditEntry, ...] = (),
) -> BoundReport:
    """Minimize the crossing over the epsilon grid and package the result.

    Each admissible grid point is floored at the Tatuzawa validity
    threshold of its eps2; the minimum of the floored values wins.
    """
    if odd_cap <= 0:
        raise ValueError("odd_cap must be positive")
    if even_exponent < 0:
        raise ValueError("even_exponent must be nonnegative")
    grid = tuple(eps_grid) if eps_grid is not None else default_eps_grid()
    log2_odd = math.log2(odd_cap)
    best = None
    for eps1, eps2 in grid:
        gap = 0.5 - eps2 - eps1 * even_exponent
        if gap <= 0:
            continue
        lc8 = log2_genus_c8(eps1)
        lc4 = log2_tatuzawa_c4(eps2)
        lvalid = math.log2(tatuzawa_validity_threshold(eps2))
        t_cross = solve_crossing(log2_odd, even_exponent, lc8, lc4, eps1, eps2)
        t_eff = max(t_cross, lvalid)
        if best is None or t_eff < best[0]:
            best = (t_eff, eps1, eps2, lc8, lc4, lvalid, t_cross)
    if best is None:
        raise InfeasibleGridError(
            "no grid point satisfies 1/2 - eps2 > eps1 * even_exponent"
        )
    t_eff, eps1, eps2, lc8, lc4, lvalid, t_cross = best
    threshold = ceil_pow2(t_eff)
    audit = list(extra_audit)
    audit += [
        AuditEntry("odd_cap", odd_cap, repr(odd_cap)),
        AuditEntry("even_exponent", even_exponent, repr(even_exponent)),
        AuditEntry("epsilon1", eps1, repr(eps1)),
        AuditEntry("epsilon2", eps2, repr(eps2)),
        AuditEntry("log2_c8", lc8, "log2_genus_c8(epsilon1)"),
        AuditEntry("log2_c4", lc4, "log2_tatuzawa_c4(epsilon2)"),
        AuditEntry("log2_validity", lvalid, "log2_tatuzawa_validity(epsilon2)"),
        AuditEntry(
            "log2_crossing",
            t_cross,
            "solve_crossing(math.log2(odd_cap), even_exponent,"
            " log2_c8, log2_c4, epsilon1, epsilon2)",
        ),
        AuditEntry(
            "threshold",
            threshold,
            "ceil_pow2(max(log2_crossing, log2_validity))",
        ),
    ]
    return BoundReport(
        threshold=threshold,
        epsilon1=eps1,
        epsilon2=eps2,
        audit=tuple(audit),
    )


def heegner_c1(params: HeegnerParams, eps_grid=None) -> BoundReport:
    """Discriminant threshold for the Heegner-independence pipeline:
    odd part capped by c5 c6 (the odd quotient degree survives into
    K_r(n_r pi(P_r)) whose degree over K_r is a power of 2), even part
    capped through c7 cyclic factors."""
    cap = params.c5 * params.c6
    e = c7(params.r, cap)
    extra = (
        AuditEntry("r", params.r, repr(params.r)),
        AuditEntry("c5", params.c5, repr(params.c5)),
        AuditEntry("c6", params.c6, repr(params.c6)),
        AuditEntry("c7", e, "(r + 1) + math.floor(math.log2(c5 * c6))"),
        AuditEntry(
            "ring_class_tower_annihilator", 2 ** (params.r + 1), "2 ** (r + 1)"
        ),
    )
    return solve_disc_threshold(cap, e, eps_grid, extra_audit=extra)


def andre_oort_c11(params: AndreOortParams, eps_grid=None) -> BoundReport:
    """Discriminant threshold for the special-point pipeline: odd part
    capped by c9, even part capped through c10 cyclic factors."""
    e = c10(params.n, params.c9)
    extra = (
        AuditEntry("n", params.n, repr(params.n)),
        AuditEntry("c9", params.c9, repr(params.c9)),
        AuditEntry("c10", e, "(n + 1) + math.floor(math.log2(c9))"),
        AuditEntry(
            "ring_class_tower_annihilator", 2 ** (params.n + 1), "2 ** (n + 1)"
        ),
    )
    return solve_disc_threshold(params.c9, e, eps_grid, extra_audit=extra)
