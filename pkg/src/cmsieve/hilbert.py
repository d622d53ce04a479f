"""Singular moduli: high-precision j-invariants and exact class polynomials.

For a reduced form (a, b, c) of discriminant D < 0 the CM point is
tau = (-b + sqrt(D)) / (2a) and j(tau) is evaluated through

    j = E4(q)^3 / Delta(q),   q = exp(2 pi i tau),

with E4 as its sigma_3 q-series and Delta as the eta product
q prod (1-q^n)^24.  A reduced form has |q| <= exp(-pi sqrt(3)), so both
series converge geometrically and the truncation error is bounded by an
explicit, asserted tail estimate; no subtractive cancellation enters the
denominator.  The class polynomial prod (x - j_i) is accepted only when
every coefficient lands within 1/4 of an integer, retrying at doubled
precision otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import PrecisionError, ResourceLimitError
from .quadform import Discriminant, QuadForm, as_discriminant, class_group

#: singular_moduli_up_to refuses bounds past this many |D| by default
DEFAULT_ENUMERATION_BOUND = 100_000

_LN2 = math.log(2)


def _sigma3_upto(n: int) -> list[int]:
    out = [0] * (n + 1)
    for d in range(1, n + 1):
        d3 = d * d * d
        for m in range(d, n + 1, d):
            out[m] += d3
    return out


def _series_length(log_abs_q: float, bits: int) -> int:
    """Smallest N with both explicit tails below 2^-(bits+8).

    E4 tail:    240 zeta(3) sum_{n>N} n^3 |q|^n
                <= 289 (N+1)^3 |q|^(N+1) / (1 - rho),
                rho = |q| (1 + 1/(N+1))^3   (term-ratio bound)
    eta tail:   |log prod_{n>N} (1-q^n)^24| <= 25 |q|^(N+1) / (1 - |q|).
    """
    target = -(bits + 8) * _LN2
    N = max(4, int(target / log_abs_q) + 1)
    q_abs = math.exp(log_abs_q)
    while True:
        rho = q_abs * (1 + 1 / (N + 1)) ** 3
        assert rho < 1
        log_e4_tail = (
            math.log(289) + 3 * math.log(N + 1) + (N + 1) * log_abs_q - math.log(1 - rho)
        )
        log_eta_tail = math.log(25) + (N + 1) * log_abs_q - math.log(1 - q_abs)
        if log_e4_tail <= target and log_eta_tail <= target:
            return N
        N += max(4, N // 4)


def j_invariant(f: QuadForm, precision_bits: int = 128):
    """j(tau_f) for a reduced form f, accurate to +-2^-(precision_bits/2).

    precision_bits is the working precision; the accuracy guarantee costs
    roughly 2 log2|j| bits of it, so small budgets are rejected for large
    |D| rather than silently degraded.
    """
    if not f.is_reduced:
        raise ValueError(f"form {tuple(f)} is not reduced")
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    D = f.discriminant
    q_mag_bits = math.pi * math.sqrt(-D) / (f.a * _LN2)  # log2 |1/q| ~ log2 |j|
    if precision_bits < 2 * (q_mag_bits + 16):
        raise PrecisionError(
            f"precision_bits={precision_bits} is too low for |D|={-D}"
            f" (need at least {math.ceil(2 * (q_mag_bits + 16))})"
        )
    log_abs_q = -math.pi * math.sqrt(-D) / f.a
    N = _series_length(log_abs_q, precision_bits)
    sigma3 = _sigma3_upto(N)
    with mpmath.workprec(precision_bits + 16):
        sqrt_d = mpmath.sqrt(mpmath.mpc(D))
        tau = (-f.b + sqrt_d) / (2 * f.a)
        q = mpmath.exp(2j * mpmath.pi * tau)
        qn = q
        e4 = mpmath.mpc(1)
        eta24 = mpmath.mpc(1)
        for n in range(1, N + 1):
            e4 += 240 * sigma3[n] * qn
            one_minus = 1 - qn
            eta24 *= one_minus * one_minus
            qn *= q
        # prod (1-q^n)^24 = (prod (1-q^n)^2)^12
        delta = q * eta24**12
        return +(e4**3 / delta)


@dataclass(frozen=True)
class HilbertPoly:
    """Monic integer polynomial with the j-invariants of one discriminant
    as roots; coefficients in descending degree order."""

    discriminant: Discriminant
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if not self.coefficients or self.coefficients[0] != 1:
            raise ValueError("class polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def __str__(self):
        parts = []
        deg = self.degree
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            e = deg - i
            mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            mag = abs(c)
            body = mono if mag == 1 and mono else (f"{mag}*{mono}" if mono else str(mag))
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts) or "0"


def _default_precision(D: int, forms) -> int:
    """Working-precision heuristic: the coefficients of prod (x - j_i) have
    about pi sqrt|D| sum(1/a_i) / ln 2 bits; take 3.5x that plus headroom."""
    inv_a = sum(1.0 / f.a for f in forms)
    heuristic = int(3.5 * math.pi * math.sqrt(-D) * inv_a / _LN2) + 64
    per_form = max(
        math.ceil(2 * (math.pi * math.sqrt(-D) / (f.a * _LN2) + 16)) for f in forms
    )
    return max(heuristic, per_form, 128)


def hilbert_class_poly(D, precision_bits: int | None = None, max_retries: int = 10) -> HilbertPoly:
    """The class polynomial H_D = prod over reduced forms of (x - j(tau_f)),
    with exact integer coefficients certified by the integrality snap."""
    d = as_discriminant(D)
    forms = class_group(d).reduced_forms
    bits = precision_bits or _default_precision(d.value, forms)
    for _ in range(max_retries + 1):
        with mpmath.workprec(bits + 32):
            coeffs = [mpmath.mpc(1)]
            for f in forms:
                j = j_invariant(f, bits)
                coeffs.append(mpmath.mpc(0))
                for i in range(len(coeffs) - 1, 0, -1):
                    coeffs[i] = coeffs[i] - j * coeffs[i - 1]
            snapped = []
            ok = True
            for c in coeffs:
                re = mpmath.re(c)
                nearest = int(mpmath.nint(re))
                if abs(re - nearest) > 0.25 or abs(mpmath.im(c)) > 0.25:
                    ok = False
                    break
                snapped.append(nearest)
            if ok:
                return HilbertPoly(d, tuple(snapped))
        bits *= 2
    raise PrecisionError(
        f"integrality snap failed for D={d.value} after {max_retries} retries"
    )


def singular_moduli_up_to(bound: int, limit: int = DEFAULT_ENUMERATION_BOUND):
    """All (Discriminant, HilbertPoly) with |D| <= bound, ordered by |D|.

    Returns an empty list for bound < 3 (no valid discriminant exists).
    """
    if bound < 1:
        raise ValueError("bound must be a positive integer")
    if bound > limit:
        raise ResourceLimitError(
            f"enumeration bound {bound} exceeds the configured limit {limit}"
        )
    out = []
    for q in range(3, bound + 1):
        if (-q) % 4 in (0, 1):
            d = as_discriminant(-q)
            out.append((d, hilbert_class_poly(d)))
    return out
