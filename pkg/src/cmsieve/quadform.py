"""Exact arithmetic of imaginary quadratic orders.

Primitive positive definite binary quadratic forms (a, b, c) of negative
discriminant D = b^2 - 4ac represent the ideal classes of the quadratic
order of discriminant D.  This module provides Gauss reduction, Dirichlet
composition (via united forms), enumeration of the full class group with
its elementary divisors, the genus-theory count of the 2-torsion, and the
conductor formula relating class numbers of non-maximal orders to the
maximal one.

Everything here is pure and exact; floats never enter.  All values are
immutable, so every function is safe to call concurrently.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint
from sympy.ntheory.modular import crt

from .errors import ResourceLimitError

#: Refuse class-group enumeration beyond this |D| unless overridden.
ENUMERATION_LIMIT = 10**8


@dataclass(frozen=True)
class Discriminant:
    """A negative quadratic discriminant with its conductor decomposition.

    value = conductor**2 * fundamental_part, where fundamental_part is a
    fundamental discriminant (squarefree and 1 mod 4, or 4m with m
    squarefree and 2 or 3 mod 4).
    """

    value: int
    fundamental_part: int
    conductor: int

    def __post_init__(self):
        if self.value >= 0 or self.value % 4 not in (0, 1):
            raise ValueError(f"{self.value} is not a negative discriminant")
        if self.conductor < 1:
            raise ValueError("conductor must be positive")
        if self.conductor**2 * self.fundamental_part != self.value:
            raise ValueError("inconsistent conductor decomposition")

    @classmethod
    def from_value(cls, value: int) -> "Discriminant":
        if value >= 0 or value % 4 not in (0, 1):
            raise ValueError(f"{value} is not a negative discriminant")
        s, m = 1, 1
        for p, e in factorint(-value).items():
            s *= p ** (e // 2)
            if e % 2:
                m *= p
        d = -m
        if d % 4 != 1:
            # fundamental part is 4*(-m); the square factor must absorb a 4
            d *= 4
            assert s % 2 == 0
            s //= 2
        return cls(value, d, s)

    @property
    def is_fundamental(self) -> bool:
        return self.conductor == 1

    def __int__(self) -> int:
        return self.value


def as_discriminant(D) -> Discriminant:
    """Coerce an int (or pass through a Discriminant)."""
    if isinstance(D, Discriminant):
        return D
    return Discriminant.from_value(int(D))


@dataclass(frozen=True)
class QuadForm:
    """Primitive positive definite integral binary quadratic form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.discriminant >= 0:
            raise ValueError(f"({self.a},{self.b},{self.c}) is not positive definite")
        if gcd(gcd(self.a, self.b), self.c) != 1:
            raise ValueError(f"({self.a},{self.b},{self.c}) is not primitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c


def principal_form(D) -> QuadForm:
    """The identity class: (1, 0, |D|/4) or (1, 1, (1+|D|)/4)."""
    v = int(as_discriminant(D).value) if not isinstance(D, int) else D
    if v >= 0 or v % 4 not in (0, 1):
        raise ValueError(f"{v} is not a negative discriminant")
    b0 = v & 1
    return QuadForm(1, b0, (b0 * b0 - v) // 4)


def reduce_form(f: QuadForm) -> QuadForm:
    """The unique reduced representative of the class of f (Gauss reduction)."""
    D = f.discriminant
    a, b, c = f.a, f.b, f.c
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b = b + 2 * r * a
            c = (b * b - D) // (4 * a)
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
        else:
            break
    out = QuadForm(a, b, c)
    assert out.is_reduced and out.discriminant == D
    return out


def inverse(f: QuadForm) -> QuadForm:
    """Reduced representative of the inverse class (the opposite form)."""
    return reduce_form(QuadForm(f.a, -f.b, f.c))


def _egcd(a: int, b: int):
    """Return (g, u, v) with u*a + v*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    return old_r, old_u, old_v


def _equivalent_prime_to(g: QuadForm, m: int) -> QuadForm:
    """A form equivalent to g whose leading coefficient is coprime to m.

    For each prime p | m one of g(1,0), g(0,1), g(1,1) is a unit mod p
    (else p would divide all three coefficients); CRT glues the choices.
    """
    primes = list(factorint(m))
    xs, ys = [], []
    for p in primes:
        if g.a % p:
            xp, yp = 1, 0
        elif g.c % p:
            xp, yp = 0, 1
        else:
            xp, yp = 1, 1
        xs.append(xp)
        ys.append(yp)
    x = int(crt(primes, xs)[0])
    y = int(crt(primes, ys)[0])
    d = gcd(x, y)
    if d > 1:
        x //= d
        y //= d
    if x == 0 and y == 0:
        # only possible when m = 1, which callers exclude
        x = 1
    t = g(x, y)
    assert gcd(t, m) == 1
    # complete (x, y) to a unimodular matrix [[x, -v], [y, u]]
    _, u, v = _egcd(x, y)
    b_new = 2 * g.a * x * (-v) + g.b * (x * u - v * y) + 2 * g.c * y * u
    c_new = g(-v, u)
    out = QuadForm(t, b_new, c_new)
    assert out.discriminant == g.discriminant
    return out


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Reduced representative of the product class (Dirichlet composition).

    g is first moved inside its class to a united form with leading
    coefficient coprime to f.a; the composite is then
    (a1*a2, B, (B^2-D)/(4 a1 a2)) with B = b1 mod 2a1 and B = b2 mod 2a2.
    """
    D = f.discriminant
    if g.discriminant != D:
        raise ValueError(
            f"discriminant mismatch: {D} vs {g.discriminant}"
        )
    a1, b1 = f.a, f.b
    if gcd(a1, g.a) != 1:
        g = _equivalent_prime_to(g, a1)
    a2, b2 = g.a, g.b
    # b1 and b2 share the parity of D, so their difference is even
    k = (((b2 - b1) // 2) * pow(a1, -1, a2)) % a2
    B = b1 + 2 * a1 * k
    A = a1 * a2
    assert (B * B - D) % (4 * A) == 0
    return reduce_form(QuadForm(A, B, (B * B - D) // (4 * A)))


def form_pow(f: QuadForm, n: int) -> QuadForm:
    """n-th power of the class of f (square and multiply)."""
    if n < 0:
        return form_pow(inverse(f), -n)
    result = principal_form(f.discriminant)
    base = reduce_form(f)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def reduced_forms(D) -> tuple[QuadForm, ...]:
    """All reduced primitive forms of discriminant D, sorted by (a, b)."""
    d = as_discriminant(D)
    q = -d.value
    parity = q & 1
    forms = []
    for a in range(1, isqrt(q // 3) + 1):
        a4 = 4 * a
        for b in range(parity, a + 1, 2):
            num = b * b + q
            if num % a4:
                continue
            c = num // a4
            if c < a:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
            if 0 < b < a < c:
                forms.append(QuadForm(a, -b, c))
    forms.sort(key=lambda f: (f.a, f.b))
    return tuple(forms)


def elementary_divisors_from_orders(orders) -> tuple[int, ...]:
    """Elementary divisor chain d1 | d2 | ... of a finite abelian group,
    recovered from the multiset of its element orders.

    For each prime p, the count N_j of elements killed by p^j equals
    p^(sum_i min(lambda_i, j)); the p-partition lambda follows from the
    successive differences of log_p N_j.
    """
    orders = list(orders)
    n = len(orders)
    if n == 1:
        return ()
    partitions = {}
    for p in factorint(n):
        by_val = Counter()
        for o in orders:
            v, t = 0, o
            while t % p == 0:
                t //= p
                v += 1
            if t == 1:
                by_val[v] += 1
        parts_ge = []
        cum = by_val[0]
        total = sum(by_val.values())
        s_prev, j = 0, 1
        while cum < total:
            cum += by_val[j]
            s_j = 0
            t = cum
            while t % p == 0:
                t //= p
                s_j += 1
            assert t == 1, "element-order statistics are not a p-group profile"
            parts_ge.append(s_j - s_prev)
            s_prev = s_j
            j += 1
        lam = [sum(1 for g in parts_ge if g > i) for i in range(parts_ge[0])]
        partitions[p] = lam
    k = max(len(lam) for lam in partitions.values())
    desc = []
    for i in range(k):
        d = 1
        for p, lam in partitions.items():
            if i < len(lam):
                d *= p ** lam[i]
        desc.append(d)
    chain = tuple(reversed(desc))
    assert math.prod(chain) == n
    return chain


@lru_cache(maxsize=None)
def _order_factorization(n: int):
    return tuple(factorint(n).items())


def _element_order(f: QuadForm, group_order: int, identity: QuadForm) -> int:
    o = group_order
    for p, e in _order_factorization(group_order):
        o //= p**e
        t = form_pow(f, o)
        while t != identity:
            t = form_pow(t, p)
            o *= p
    return o


class ClassGroupStructure:
    """Reduced forms of one discriminant, with the group structure on demand.

    order and reduced_forms are computed eagerly (pure enumeration); the
    elementary divisors are derived lazily from element orders under
    Dirichlet composition the first time they are requested.
    """

    def __init__(self, discriminant: Discriminant, forms: tuple[QuadForm, ...]):
        self.discriminant = discriminant
        self.reduced_forms = forms
        self.order = len(forms)
        self._divisors = None

    @property
    def identity(self) -> QuadForm:
        return principal_form(self.discriminant.value)

    @property
    def elementary_divisors(self) -> tuple[int, ...]:
        if self._divisors is None:
            if self.order == 1:
                self._divisors = ()
            else:
                ident = self.identity
                orders = [
                    _element_order(f, self.order, ident) for f in self.reduced_forms
                ]
                self._divisors = elementary_divisors_from_orders(orders)
        return self._divisors

    @property
    def two_torsion_size(self) -> int:
        return 2 ** sum(1 for d in self.elementary_divisors if d % 2 == 0)

    def __repr__(self):
        return (
            f"ClassGroupStructure(D={self.discriminant.value}, h={self.order})"
        )


@lru_cache(maxsize=None)
def _class_group_cached(d: Discriminant) -> ClassGroupStructure:
    return ClassGroupStructure(d, reduced_forms(d))


def class_group(D, limit: int = ENUMERATION_LIMIT) -> ClassGroupStructure:
    """Enumerate Pic(O) for the order of discriminant D.

    Refuses |D| beyond `limit` rather than stalling on a huge enumeration.
    """
    d = as_discriminant(D)
    if -d.value > limit:
        raise ResourceLimitError(
            f"|D| = {-d.value} exceeds the enumeration limit {limit}"
        )
    return _class_group_cached(d)


def two_torsion_size(D) -> int:
    """#Pic(O)[2] by the closed genus-theory count 2^(mu-1).

    mu counts ramified primes: with r odd primes dividing D, mu = r for
    D = 1 mod 4; for D = -4n, mu = r, r+1, r+1, r+2 according to
    n = 3 (4), n = 1,2 (4), n = 4 (8), n = 0 (8).
    """
    d = as_discriminant(D)
    v = d.value
    r = sum(1 for p in factorint(-v) if p != 2)
    if v % 4 == 1:
        mu = r
    else:
        n = -v // 4
        if n % 4 == 3:
            mu = r
        elif n % 4 in (1, 2):
            mu = r + 1
        elif n % 8 == 4:
            mu = r + 1
        else:
            mu = r + 2
    return 2 ** (mu - 1)


def unit_index(d_K: int, f: int) -> int:
    """[O_K^* : O^*] for the order of conductor f in the field of discriminant d_K."""
    if f == 1:
        return 1
    if d_K == -3:
        return 3
    if d_K == -4:
        return 2
    return 1


def order_class_number(d_K, f: int) -> int:
    """h(O) for the order of conductor f inside the maximal order of
    discriminant d_K, by the conductor formula

        h(O) = h(d_K) * f * prod_{p | f} (1 - chi_{d_K}(p)/p) / [O_K^* : O^*].
    """
    from .dirichlet import kronecker  # local import to avoid a cycle

    dk = as_discriminant(d_K)
    if not dk.is_fundamental:
        raise ValueError(f"{dk.value} is not a fundamental discriminant")
    if f < 1:
        raise ValueError("conductor must be positive")
    h = class_group(dk).order
    for p, e in factorint(f).items():
        h *= p ** (e - 1) * (p - kronecker(dk.value, p))
    u = unit_index(dk.value, f)
    assert h % u == 0
    return h // u
