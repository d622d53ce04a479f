"""Kronecker characters, L(1, chi), and explicit effective constants.

The real character chi_D(n) = (D/n) attached to a fundamental discriminant
D < 0 is odd and primitive of conductor |D|.  Its L-value at 1 admits the
finite closed form

    L(1, chi) = -(pi / q^(3/2)) * sum_{a=1}^{q-1} chi(a) * a,   q = |D|,

which this module evaluates exactly up to one floating multiplication.
On top of it sit the explicit constants of the effective class-number
machinery: the Siegel-Tatuzawa lower bound c4(eps) for #Pic(O) of an
arbitrary order (one possible exceptional field allowed), and the genus
bound c8(eps) for #Pic(O)[2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from sympy import factorint, nextprime

from .errors import PrecisionError
from .quadform import Discriminant, as_discriminant, class_group

# Siegel-Tatuzawa: for 0 < eps < 1/2 there is at most one imaginary
# quadratic field K* such that L(1, chi_d) > 0.655 * eps * d^(-eps) fails
# for some d = |disc| >= exp(max(1/eps, 11.2)).  The numerical constants
# are isolated here so a different published form can be swapped in.
TATUZAWA_COEFF = 0.655
TATUZAWA_LOG_FLOOR = 11.2

#: [O_K^* : O^*] never exceeds 3 (attained only for d_K = -3).
UNIT_INDEX_BOUND = 3

#: pi(x) < 1.25506 x / ln x for x > 1 (Rosser-Schoenfeld).
ROSSER_SCHOENFELD_PI = 1.25506

#: Exact primorial scans are refused past this stopping prime; an explicit
#: Chebyshev-type upper bound takes over (still a valid constant).  The
#: limit covers every epsilon >= 0.04, i.e. stopping primes up to 2^25.
C8_EXACT_SCAN_LIMIT = 2**25

#: Exact prefix length used inside the Chebyshev-type upper bound.
C8_PARTIAL_SCAN = 10**6


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) with the standard conventions at 2, -1, 0."""
    a = D
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    k = 1
    if v % 2 == 1 and a % 8 not in (1, 7):
        k = -1
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    a %= n
    while a:
        v = 0
        while a % 2 == 0:
            a //= 2
            v += 1
        if v % 2 == 1 and n % 8 in (3, 5):
            k = -k
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a, n = n % a, a
    return k if n == 1 else 0


# smallest-prime-factor sieve, grown on demand and shared by all characters
_SPF: list[int] = [0, 1]


def _spf_upto(n: int) -> list[int]:
    global _SPF
    if len(_SPF) <= n:
        size = max(n + 1, 2 * len(_SPF))
        spf = list(range(size))
        for p in range(2, math.isqrt(size - 1) + 1):
            if spf[p] == p:
                for m in range(p * p, size, p):
                    if spf[m] == m:
                        spf[m] = p
        _SPF = spf
    return _SPF


@dataclass(frozen=True)
class RealCharacter:
    """The primitive real character of conductor |D| attached to a
    fundamental discriminant D < 0."""

    modulus: int
    discriminant: Discriminant

    def __post_init__(self):
        if not self.discriminant.is_fundamental:
            raise ValueError(
                f"{self.discriminant.value} is not fundamental; the character"
                " would be imprimitive"
            )
        if self.modulus != -self.discriminant.value:
            raise ValueError("modulus must equal |D|")

    @classmethod
    def for_discriminant(cls, D) -> "RealCharacter":
        d = as_discriminant(D)
        return cls(-d.value, d)

    def __call__(self, n: int) -> int:
        return kronecker(self.discriminant.value, n)

    def values(self) -> list[int]:
        """chi(0), ..., chi(q-1), filled in multiplicatively from the primes."""
        q = self.modulus
        D = self.discriminant.value
        spf = _spf_upto(q)
        chi = [0] * q
        if q > 1:
            chi[1] = 1
        prime_vals: dict[int, int] = {}
        for n in range(2, q):
            p = spf[n]
            cp = prime_vals.get(p)
            if cp is None:
                cp = kronecker(D, p)
                prime_vals[p] = cp
            chi[n] = cp * chi[n // p]
        return chi

    def weighted_sum(self) -> int:
        """sum_{a=1}^{q-1} chi(a) * a, exactly."""
        return sum(a * c for a, c in enumerate(self.values()) if c)


def l_one(chi: RealCharacter, precision: float = 1e-12):
    """L(1, chi) to within +-precision, via the exact finite character sum.

    The only inexact step is the final multiplication by pi / q^(3/2),
    done in mpmath at a precision derived from the request.
    """
    if precision <= 0:
        raise ValueError("precision must be positive")
    q = chi.modulus
    S = chi.weighted_sum()
    bits = max(64, int(-math.log2(precision)) + 2 * max(1, q.bit_length()) + 32)
    with mpmath.workprec(bits):
        val = -mpmath.pi * S / mpmath.power(q, mpmath.mpf(3) / 2)
        if precision >= 1e-13:
            return float(val)
        return +val


def class_number_formula_check(D) -> bool:
    """True iff round(w sqrt|D| L(1,chi) / 2 pi) equals the enumerated h(D).

    The analytic side reduces exactly to w * (-S) / (2q) with S the finite
    character sum, so the comparison is a rational one; a rounding guard
    raises rather than ever returning a wrong boolean.
    """
    d = as_discriminant(D)
    if not d.is_fundamental:
        raise ValueError(f"{d.value} is not fundamental")
    q = -d.value
    w = {3: 6, 4: 4}.get(q, 2)
    S = RealCharacter.for_discriminant(d).weighted_sum()
    val = Fraction(w * (-S), 2 * q)
    nearest = round(val)
    if abs(val - nearest) > Fraction(1, 4):
        raise PrecisionError(
            f"formula value {float(val):.6f} is not safely roundable for D={d.value}"
        )
    return nearest == class_group(d).order


@dataclass(frozen=True)
class EffectiveConstant:
    """An explicit constant c with a validity threshold on |disc|.

    exceptional_allowance marks bounds that tolerate one exceptional
    imaginary quadratic field K*.  log2_value always holds a finite
    number even when value itself overflows a float.
    """

    name: str
    epsilon: float
    value: float
    log2_value: float
    validity_threshold: float
    exceptional_allowance: bool

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("constant must be positive")
        if self.validity_threshold < 3:
            raise ValueError("validity threshold below the smallest |D|")


@lru_cache(maxsize=None)
def totient_quotient_sup(delta: float) -> float:
    """sup_m m^(1-delta) / phi(m), for 0 < delta < 1.

    Appending a prime p multiplies the value by p^(1-delta)/(p-1), which is
    strictly decreasing in p, so the sup sits on a primorial; the scan stops
    at the first prime whose factor drops to 1 or below.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    best = val = 1.0
    p = 2
    while True:
        factor = p ** (1 - delta) / (p - 1)
        if factor <= 1:
            break
        val *= factor
        best = max(best, val)
        p = int(nextprime(p))
    return best


def tatuzawa_validity_threshold(epsilon: float) -> float:
    return math.exp(max(1.0 / epsilon, TATUZAWA_LOG_FLOOR))


@lru_cache(maxsize=None)
def log2_tatuzawa_c4(epsilon: float) -> float:
    """log2 of c4(eps); see tatuzawa_c4."""
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    T = tatuzawa_validity_threshold(epsilon)
    cphi = totient_quotient_sup(2 * epsilon)
    # Maximal orders with |d_K| >= T: Tatuzawa + class number formula (w >= 2,
    # unit index 1 there), then phi(f) >= f^(1-2eps)/cphi for the conductor.
    c_tatuzawa = TATUZAWA_COEFF * epsilon / math.pi / cphi
    # Orders whose field has |d_K| < T: h(d_K) >= 1 and f^2 > |D|/T carry
    # the bound alone; the unit index can be 3 here.
    c_small_field = T ** -(0.5 - epsilon) / (UNIT_INDEX_BOUND * cphi)
    return math.log2(min(c_tatuzawa, c_small_field))


def tatuzawa_c4(epsilon: float) -> EffectiveConstant:
    """Explicit c4(eps) with #Pic(O) > c4(eps) |disc O|^(1/2-eps) for every
    imaginary quadratic order not contained in the (at most one)
    exceptional field, once |disc O| exceeds the validity threshold."""
    log2v = log2_tatuzawa_c4(epsilon)
    return EffectiveConstant(
        name="c4",
        epsilon=epsilon,
        value=2.0**log2v,
        log2_value=log2v,
        validity_threshold=tatuzawa_validity_threshold(epsilon),
        exceptional_allowance=True,
    )


def tatuzawa_c2(epsilon: float) -> EffectiveConstant:
    """The raw L-value constant: L(1, chi) > c2(eps) |d|^(-eps)."""
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    v = TATUZAWA_COEFF * epsilon
    return EffectiveConstant(
        "c2", epsilon, v, math.log2(v), tatuzawa_validity_threshold(epsilon), True
    )


def tatuzawa_c3(epsilon: float) -> EffectiveConstant:
    """Maximal-order class numbers: h(d_K) > c3(eps) |d_K|^(1/2-eps)."""
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    v = TATUZAWA_COEFF * epsilon / math.pi
    return EffectiveConstant(
        "c3", epsilon, v, math.log2(v), tatuzawa_validity_threshold(epsilon), True
    )


_prime_scan_cache: dict[int, np.ndarray] = {}


def _primes_upto(limit: int) -> np.ndarray:
    cached = _prime_scan_cache.get(limit)
    if cached is not None:
        return cached
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    primes = np.nonzero(sieve)[0]
    _prime_scan_cache[limit] = primes
    return primes


@lru_cache(maxsize=None)
def log2_genus_c8(epsilon: float) -> float:
    """log2 of c8(eps) = sup_m 2^(omega(m)+1) / m^eps.

    The sup sits on a primorial and the scan stops at the first prime p
    with p^eps >= 2.  When that stopping prime exceeds the exact-scan limit
    the returned value is a rigorous upper bound instead, assembled from an
    exact partial scan plus the Rosser-Schoenfeld bound on pi(x); an upper
    bound is still a valid constant for every inequality downstream.
    """
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    inv = 1.0 / epsilon
    if inv <= math.log2(C8_EXACT_SCAN_LIMIT):
        primes = _primes_upto(C8_EXACT_SCAN_LIMIT if inv > 20 else int(2.0**inv) + 1)
        logs = np.log2(primes)
        terms = 1.0 - epsilon * logs[logs * epsilon < 1.0]
        # every retained term is positive, so the sup over primorial
        # prefixes is the full sum (m = 1 alone contributes the leading 1)
        return 1.0 + float(terms.sum())
    x0 = C8_PARTIAL_SCAN
    primes = _primes_upto(x0)
    n0 = len(primes)
    logsum0 = float(np.log2(primes).sum())
    stop = 2.0**inv
    # terms past x0 are each at most the x0 term and all positive
    tail_terms = max(0.0, ROSSER_SCHOENFELD_PI * stop / math.log(stop) - n0)
    per_term = 1 - epsilon * math.log2(x0)
    assert per_term > 0
    return 1 + (n0 - epsilon * logsum0) + tail_terms * per_term


def genus_c8(epsilon: float) -> EffectiveConstant:
    """Explicit c8(eps) with #Pic(O)[2] <= c8(eps) |disc O|^eps for every
    imaginary quadratic order (genus theory, no exceptions)."""
    log2v = log2_genus_c8(epsilon)
    value = 2.0**log2v if log2v < 1000 else math.inf
    return EffectiveConstant(
        name="c8",
        epsilon=epsilon,
        value=value,
        log2_value=log2v,
        validity_threshold=3.0,
        exceptional_allowance=False,
    )
