"""Univariate polynomials over every coefficient domain in the package.

One dense-tuple engine serves prime fields and their quadratic extensions
(int-coded elements), the rationals (Fraction), and multi-quadratic towers
(TowerElem).  On top of it: elliptic division polynomials in x-only form,
exact factor extraction of low-degree rational factors via modular
factorization + Hensel lifting, and splitting fields of quadratics.

Polynomials are tuples, constant term first, no trailing zeros.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache

from . import ff
from .intutil import (
    integer_cubic_roots,
    is_prime,
    rational_is_square,
    squarefree_part,
)


class PolyError(ValueError):
    pass


class InexactDivision(PolyError):
    """Raised when exact_div is asked to divide by a non-divisor."""


# ---------------------------------------------------------------------------
# Coefficient domains
# ---------------------------------------------------------------------------


class RationalDomain:
    """Fractions."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def from_int(n):
        return Fraction(n)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def is_zero(a):
        return a == 0

    def __repr__(self):
        return "QQ"


QQ = RationalDomain()


class CodeDomain:
    """A finite field F_{p^k} with int-coded elements and table arithmetic.
    This is the fast path used by all curve enumeration."""

    def __init__(self, field: ff.FieldDesc):
        t = ff.tables(field)
        self.field = field
        self.tables = t
        self.q = t.q
        self.zero = 0
        self.one = 1
        self._add = t.add
        self._mul = t.mul
        self._neg = t.neg
        self._inv = t.inv

    def from_int(self, n):
        return n % self.tables.p

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return self._mul[a][self._inv[b]]

    def is_zero(self, a):
        return a == 0

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return f"Code({self.field!r})"


@lru_cache(maxsize=None)
def code_domain(field: ff.FieldDesc) -> CodeDomain:
    return CodeDomain(field)


class TowerDomain:
    """A MultiQuadField acting as a coefficient domain (TowerElem values)."""

    def __init__(self, K):
        self.K = K
        self.zero = K.zero()
        self.one = K.one()

    def from_int(self, n):
        return self.K.from_rational(Fraction(n))

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    def __repr__(self):
        return f"Tower({self.K!r})"


# ---------------------------------------------------------------------------
# Dense kernels (tuples, constant first)
# ---------------------------------------------------------------------------


def pnormalize(dom, cs):
    cs = list(cs)
    while cs and dom.is_zero(cs[-1]):
        cs.pop()
    return tuple(cs)


def pdegree(f):
    return len(f) - 1  # -1 for the zero polynomial


def padd(dom, f, g):
    n = max(len(f), len(g))
    z = dom.zero
    out = [dom.add(f[i] if i < len(f) else z, g[i] if i < len(g) else z) for i in range(n)]
    return pnormalize(dom, out)


def psub(dom, f, g):
    n = max(len(f), len(g))
    z = dom.zero
    out = [dom.sub(f[i] if i < len(f) else z, g[i] if i < len(g) else z) for i in range(n)]
    return pnormalize(dom, out)


def pneg(dom, f):
    return tuple(dom.neg(c) for c in f)


def pscale(dom, c, f):
    if dom.is_zero(c):
        return ()
    return pnormalize(dom, [dom.mul(c, a) for a in f])


def pmul(dom, f, g):
    if not f or not g:
        return ()
    out = [dom.zero] * (len(f) + len(g) - 1)
    add, mul = dom.add, dom.mul
    for i, a in enumerate(f):
        if dom.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = add(out[i + j], mul(a, b))
    return pnormalize(dom, out)


def pdivmod(dom, f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    q = [dom.zero] * max(0, len(f) - len(g) + 1)
    r = list(f)
    inv_lc = dom.div(dom.one, g[-1])
    dg = len(g) - 1
    while len(r) >= len(g):
        if dom.is_zero(r[-1]):
            r.pop()
            continue
        c = dom.mul(r[-1], inv_lc)
        k = len(r) - 1 - dg
        q[k] = c
        for i in range(len(g)):
            r[k + i] = dom.sub(r[k + i], dom.mul(c, g[i]))
        r.pop()
    return pnormalize(dom, q), pnormalize(dom, r)


def pmod(dom, f, g):
    return pdivmod(dom, f, g)[1]


def pexact_div(dom, f, g):
    q, r = pdivmod(dom, f, g)
    if r:
        raise InexactDivision("inexact polynomial division")
    return q


def pmonic(dom, f):
    if not f:
        return f
    inv = dom.div(dom.one, f[-1])
    return pscale(dom, inv, f)


def pgcd(dom, f, g):
    while g:
        f, g = g, pmod(dom, f, g)
    return pmonic(dom, f)


def pgcdext(dom, f, g):
    """(d, s, t) with s*f + t*g = d, d monic."""
    r0, r1 = f, g
    s0, s1 = (dom.one,), ()
    t0, t1 = (), (dom.one,)
    while r1:
        q, r = pdivmod(dom, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(dom, s0, pmul(dom, q, s1))
        t0, t1 = t1, psub(dom, t0, pmul(dom, q, t1))
    if not r0:
        return (), s0, t0
    inv = dom.div(dom.one, r0[-1])
    return pscale(dom, inv, r0), pscale(dom, inv, s0), pscale(dom, inv, t0)


def pderiv(dom, f):
    out = [dom.mul(dom.from_int(i), f[i]) for i in range(1, len(f))]
    return pnormalize(dom, out)


def peval(dom, f, x):
    acc = dom.zero
    for c in reversed(f):
        acc = dom.add(dom.mul(acc, x), c)
    return acc


def pcompose_linear(dom, f, a, b):
    """f(a*x + b)."""
    acc = ()
    lin = pnormalize(dom, (b, a))
    for c in reversed(f):
        acc = padd(dom, pmul(dom, acc, lin), (c,) if not dom.is_zero(c) else ())
    return acc


def ppow_mod(dom, f, e, m):
    out = (dom.one,)
    f = pmod(dom, f, m)
    while e:
        if e & 1:
            out = pmod(dom, pmul(dom, out, f), m)
        f = pmod(dom, pmul(dom, f, f), m)
        e >>= 1
    return out


def froots(dom, f):
    """Roots over a finite domain, by exhaustive evaluation."""
    return [x for x in dom.elements() if dom.is_zero(peval(dom, f, x))]


# ---------------------------------------------------------------------------
# Poly wrapper
# ---------------------------------------------------------------------------


class Poly:
    """Immutable dense polynomial over a domain."""

    __slots__ = ("domain", "coeffs")

    def __init__(self, domain, coeffs):
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeffs", pnormalize(domain, coeffs))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Poly is immutable")

    @classmethod
    def from_ints(cls, domain, ints):
        return cls(domain, [domain.from_int(n) for n in ints])

    @property
    def degree(self):
        return pdegree(self.coeffs)

    @property
    def lc(self):
        if not self.coeffs:
            raise PolyError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == self.domain.one

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.domain is other.domain
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.domain), self.coeffs))

    def _wrap(self, cs):
        return Poly(self.domain, cs)

    def __add__(self, other):
        return self._wrap(padd(self.domain, self.coeffs, other.coeffs))

    def __sub__(self, other):
        return self._wrap(psub(self.domain, self.coeffs, other.coeffs))

    def __neg__(self):
        return self._wrap(pneg(self.domain, self.coeffs))

    def __mul__(self, other):
        return self._wrap(pmul(self.domain, self.coeffs, other.coeffs))

    def __divmod__(self, other):
        q, r = pdivmod(self.domain, self.coeffs, other.coeffs)
        return self._wrap(q), self._wrap(r)

    def __mod__(self, other):
        return self._wrap(pmod(self.domain, self.coeffs, other.coeffs))

    def exact_div(self, other):
        return self._wrap(pexact_div(self.domain, self.coeffs, other.coeffs))

    def divides(self, other) -> bool:
        if self.is_zero():
            return other.is_zero()
        return not pdivmod(self.domain, other.coeffs, self.coeffs)[1]

    def monic(self):
        return self._wrap(pmonic(self.domain, self.coeffs))

    def gcd(self, other):
        return self._wrap(pgcd(self.domain, self.coeffs, other.coeffs))

    def derivative(self):
        return self._wrap(pderiv(self.domain, self.coeffs))

    def __call__(self, x):
        return peval(self.domain, self.coeffs, x)

    def resultant(self, other):
        return resultant(self.domain, self.coeffs, other.coeffs)

    def discriminant(self):
        return discriminant(self.domain, self.coeffs)

    def map_coeffs(self, domain, fn):
        return Poly(domain, [fn(c) for c in self.coeffs])

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


def resultant(dom, f, g):
    """res(f, g) via the Sylvester determinant with exact division-free Gauss.

    Sizes here are tiny (degrees <= 12), so the O(n^3) fraction elimination
    is more than fast enough and has no sign subtleties.
    """
    m, n = pdegree(f), pdegree(g)
    if m < 0 or n < 0:
        return dom.zero
    if m == 0:
        return _dpow(dom, f[0], n)
    if n == 0:
        return _dpow(dom, g[0], m)
    size = m + n
    rows = []
    for i in range(n):
        row = [dom.zero] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [dom.zero] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    det = dom.one
    for col in range(size):
        piv = next((r for r in range(col, size) if not dom.is_zero(rows[r][col])), None)
        if piv is None:
            return dom.zero
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = dom.neg(det)
        det = dom.mul(det, rows[col][col])
        inv = dom.div(dom.one, rows[col][col])
        for r in range(col + 1, size):
            if dom.is_zero(rows[r][col]):
                continue
            factor = dom.mul(rows[r][col], inv)
            for c in range(col, size):
                rows[r][c] = dom.sub(rows[r][c], dom.mul(factor, rows[col][c]))
    return det


def _dpow(dom, a, n):
    out = dom.one
    for _ in range(n):
        out = dom.mul(out, a)
    return out


def discriminant(dom, f):
    n = pdegree(f)
    if n < 1:
        raise PolyError("discriminant needs degree >= 1")
    res = resultant(dom, f, pderiv(dom, f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    out = dom.div(res, f[-1])
    return out if sign == 1 else dom.neg(out)


# ---------------------------------------------------------------------------
# Division polynomials (x-only) from the b-invariants of a long Weierstrass
# model.  For odd n the polynomial f_n below is psi_n itself; for even n it is
# psi_n / psi_2, and psi_2^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 is carried as T.
# ---------------------------------------------------------------------------


def two_torsion_cubic(b) -> Poly:
    b2, b4, b6, b8 = b
    return Poly(QQ, (b6, 2 * b4, b2, Fraction(4)))


@lru_cache(maxsize=None)
def _divpoly_f(b, n: int) -> tuple:
    b2, b4, b6, b8 = b
    T = two_torsion_cubic(b).coeffs
    if n == 0:
        return ()
    if n in (1, 2):
        return (Fraction(1),)
    if n == 3:
        return tuple(Fraction(c) for c in (b8, 3 * b6, 3 * b4, b2, 3))
    if n == 4:
        return tuple(
            Fraction(c)
            for c in (
                b4 * b8 - b6 * b6,
                b2 * b8 - b4 * b6,
                10 * b8,
                10 * b6,
                5 * b4,
                b2,
                2,
            )
        )
    m, rem = divmod(n, 2)
    fm = lambda k: _divpoly_f(b, k)
    mul = lambda f, g: pmul(QQ, f, g)
    if rem:  # n = 2m + 1
        a = mul(fm(m + 2), mul(fm(m), mul(fm(m), fm(m))))
        c = mul(fm(m - 1), mul(fm(m + 1), mul(fm(m + 1), fm(m + 1))))
        T2 = mul(T, T)
        if m % 2 == 0:
            return psub(QQ, mul(a, T2), c)
        return psub(QQ, a, mul(c, T2))
    # n = 2m
    inner = psub(
        QQ,
        mul(fm(m + 2), mul(fm(m - 1), fm(m - 1))),
        mul(fm(m - 2), mul(fm(m + 1), fm(m + 1))),
    )
    return mul(fm(m), inner)


def kill_poly(b, n: int) -> Poly:
    """Roots are exactly the x-coordinates of the nonzero points killed by n."""
    if n < 1:
        raise PolyError("n must be positive")
    f = Poly(QQ, _divpoly_f(b, n))
    if n % 2 == 0:
        return two_torsion_cubic(b) * f
    return f


@lru_cache(maxsize=None)
def primitive_kernel_poly_b(b, n: int) -> Poly:
    """Roots are the x-coordinates of points of exact order n (n >= 2)."""
    if n < 2:
        raise PolyError("n must be >= 2")
    out = kill_poly(b, n)
    for d in range(2, n):
        if n % d == 0:
            out = out.exact_div(primitive_kernel_poly_b(b, d))
    return out


# ---------------------------------------------------------------------------
# Arithmetic mod p on int-tuple polynomials (used by factor extraction and by
# irreducibility/rootlessness certificates).
# ---------------------------------------------------------------------------


def mp_norm(f, p):
    f = [c % p for c in f]
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def mp_mul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return mp_norm(out, p)


def mp_divmod(f, g, p):
    if not g:
        raise ZeroDivisionError
    inv = pow(g[-1], p - 2, p)
    q = [0] * max(0, len(f) - len(g) + 1)
    r = list(f)
    dg = len(g) - 1
    while len(r) >= len(g):
        if r[-1] % p == 0:
            r.pop()
            continue
        c = r[-1] * inv % p
        k = len(r) - 1 - dg
        q[k] = c
        for i in range(len(g)):
            r[k + i] = (r[k + i] - c * g[i]) % p
        r.pop()
    return mp_norm(q, p), mp_norm(r, p)


def mp_gcd(f, g, p):
    while g:
        f, g = g, mp_divmod(f, g, p)[1]
    if not f:
        return ()
    inv = pow(f[-1], p - 2, p)
    return mp_norm([c * inv for c in f], p)


def mp_gcdext(f, g, p):
    r0, r1 = mp_norm(f, p), mp_norm(g, p)
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    sub = lambda a, b: mp_norm(
        [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(max(len(a), len(b)))],
        p,
    )
    while r1:
        q, r = mp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mp_mul(q, s1, p))
        t0, t1 = t1, sub(t0, mp_mul(q, t1, p))
    inv = pow(r0[-1], p - 2, p)
    sc = lambda f: mp_norm([c * inv for c in f], p)
    return sc(r0), sc(s0), sc(t0)


def mp_pow_mod(f, e, m, p):
    out = (1,)
    f = mp_divmod(f, m, p)[1]
    while e:
        if e & 1:
            out = mp_divmod(mp_mul(out, f, p), m, p)[1]
        f = mp_divmod(mp_mul(f, f, p), m, p)[1]
        e >>= 1
    return out


def mp_eval(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def mp_factor_squarefree(f, p):
    """Irreducible monic factors of a squarefree monic f mod p (odd p)."""
    f = mp_norm(f, p)
    assert f and f[-1] == 1
    out = []
    x = (0, 1)
    w = x
    d = 0
    rest = f
    while len(rest) - 1 > 0:
        d += 1
        if 2 * d > len(rest) - 1:
            out.append(rest)
            break
        w = mp_pow_mod(w, p, rest, p)
        diff = mp_norm([(a - b) % p for a, b in _zippad(w, x)], p)
        g = mp_gcd(diff, rest, p) if diff else rest
        if len(g) > 1:
            out.extend(_equal_degree_split(g, d, p))
            rest = mp_divmod(rest, g, p)[0]
            w = mp_divmod(w, rest, p)[1]
    out.sort()
    return out


def _zippad(a, b):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0), (b[i] if i < len(b) else 0)) for i in range(n)]


def _equal_degree_split(f, d, p):
    """Cantor-Zassenhaus: split f (product of irreducibles of degree d) mod p.
    Seeded deterministically from the input, so output order is reproducible."""
    n = len(f) - 1
    if n == d:
        return [f]
    rng = random.Random(f"edf:{p}:{d}:{f}")
    while True:
        a = mp_norm([rng.randrange(p) for _ in range(n)], p)
        if len(a) < 2:
            continue
        g = mp_gcd(a, f, p)
        if not (1 <= len(g) - 1 < n):
            b = mp_pow_mod(a, (p**d - 1) // 2, f, p)
            b = mp_norm([(c - (1 if i == 0 else 0)) % p for i, c in enumerate(b or (0,))], p)
            if not b:
                continue
            g = mp_gcd(b, f, p)
            if not (1 <= len(g) - 1 < n):
                continue
        rest = mp_divmod(f, g, p)[0]
        return _equal_degree_split(g, d, p) + _equal_degree_split(rest, d, p)


# ---------------------------------------------------------------------------
# Hensel lifting and rational factor extraction (degrees 1..3 complete)
# ---------------------------------------------------------------------------


def _hensel_step(f, g, h, s, t, m):
    """One quadratic lift: from f = g*h, s*g + t*h = 1 (mod m) to mod m^2.
    All polynomials integer tuples; h monic, f monic."""
    mm = m * m
    mul = lambda a, b: _zmul(a, b, mm)
    sub = lambda a, b: _znorm([x - y for x, y in _zippad(a, b)], mm)
    add = lambda a, b: _znorm([x + y for x, y in _zippad(a, b)], mm)
    e = sub(f, mul(g, h))
    q, r = _zdivmod_monic(mul(s, e), h, mm)
    g1 = add(g, add(mul(t, e), mul(q, g)))
    h1 = add(h, r)
    b = sub(add(mul(s, g1), mul(t, h1)), (1,))
    c, d = _zdivmod_monic(mul(s, b), h1, mm)
    s1 = sub(s, d)
    t1 = sub(t, add(mul(t, b), mul(c, g1)))
    return g1, h1, s1, t1


def _znorm(f, m):
    f = [c % m for c in f]
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def _zmul(f, g, m):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % m
    return _znorm(out, m)


def _zdivmod_monic(f, g, m):
    assert g and g[-1] == 1
    q = [0] * max(0, len(f) - len(g) + 1)
    r = list(f)
    dg = len(g) - 1
    while len(r) >= len(g):
        if r[-1] % m == 0:
            r.pop()
            continue
        c = r[-1] % m
        k = len(r) - 1 - dg
        q[k] = c
        for i in range(len(g)):
            r[k + i] = (r[k + i] - c * g[i]) % m
        r.pop()
    return _znorm(q, m), _znorm(r, m)


def _lift_factors(F, factors, p, k):
    """Lift monic mod-p factors (product = F mod p) to mod p^(2^s) >= p^k,
    peeling one factor at a time."""
    M = p ** (1 << _ceil_log2(k))
    if len(factors) == 1:
        return [_znorm(F, M)]
    g = factors[0]
    h = factors[1]
    for extra in factors[2:]:
        h = mp_mul(h, extra, p)
    _, s, t = mp_gcdext(g, h, p)
    m = p
    G, H, S, T = g, h, s, t
    for _ in range(_ceil_log2(k)):
        G, H, S, T = _hensel_step(_znorm(F, m * m), G, H, S, T, m)
        m *= m
    return [G] + _lift_factors(H, factors[1:], p, k)


def _ceil_log2(k):
    n = 0
    while (1 << n) < k:
        n += 1
    return max(n, 1)


def _center(c, m):
    c %= m
    return c - m if c > m // 2 else c


def _int_coeffs(f: Poly) -> tuple[int, ...]:
    """Clear denominators and content: primitive integer coefficients."""
    if f.is_zero():
        raise PolyError("zero polynomial")
    den = math.lcm(*[c.denominator for c in f.coeffs])
    ints = [int(c * den) for c in f.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def _squarefree_parts(F: tuple[int, ...]) -> list[tuple[tuple[int, ...], int]]:
    """Yield (S_i, i) with F = prod S_i^i up to constant, S_i squarefree monic
    over Q (returned as primitive integer tuples)."""
    fq = Poly(QQ, [Fraction(c) for c in F]).monic()
    out = []
    i = 1
    while fq.degree > 0:
        g = fq.gcd(fq.derivative())
        part = fq.exact_div(g)  # product of primes dividing fq
        # primes with multiplicity exactly i: part / gcd(part, g)
        exact = part.exact_div(part.gcd(g))
        if exact.degree > 0:
            out.append((_int_coeffs(exact), i))
        fq = g
        i += 1
    return out


def _find_good_prime(S: tuple[int, ...]) -> int:
    p = 3
    while True:
        if is_prime(p) and S[-1] % p != 0:
            fp = mp_norm(S, p)
            if len(fp) == len(S) and len(mp_gcd(fp, mp_norm([i * c for i, c in enumerate(S)][1:], p), p)) == 1:
                return p
        p += 2


def low_degree_factors(f: Poly, max_degree: int = 2) -> list[Poly]:
    """All monic irreducible rational factors of f of degree <= max_degree
    (with multiplicity), found by modular factorization + Hensel lifting +
    trial division.  Complete for max_degree <= 3.

    Factors of a monic associate are searched, so denominators dividing the
    leading coefficient are handled exactly.
    """
    if f.is_zero():
        raise PolyError("zero polynomial")
    if max_degree > 4:
        raise PolyError("complete extraction implemented only for degree <= 4")
    if f.degree == 0:
        return []
    F = _int_coeffs(f)
    L = F[-1]
    # monic associate: G(x) = L^(n-1) F(x/L)
    n = len(F) - 1
    G = tuple(F[i] * L ** (n - 1 - i) for i in range(len(F)))
    assert G[-1] == 1
    found: list[tuple[Poly, int]] = []
    for S, mult in _squarefree_parts(G):
        for h in _low_degree_factors_squarefree(S, max_degree):
            found.append((h, mult))
    # map back through x -> L x and re-monic
    out = []
    for h, mult in found:
        coeffs = [Fraction(c) for c in h.coeffs]
        mapped = [coeffs[i] * Fraction(L) ** i for i in range(len(coeffs))]
        g = Poly(QQ, mapped).monic()
        out.extend([g] * mult)
    out.sort(key=lambda g: (g.degree, g.coeffs))
    # exactness check: the found factors divide f
    check = Poly(QQ, (Fraction(1),))
    for g in out:
        check = check * g
    if not check.divides(f):
        raise PolyError("internal factor extraction inconsistency")  # pragma: no cover
    return out


def _low_degree_factors_squarefree(S: tuple[int, ...], max_degree: int) -> list[Poly]:
    if len(S) - 1 <= 0:
        return []
    if len(S) - 1 <= max_degree:
        # S itself may be irreducible of allowed degree; recurse to split it
        pass
    p = _find_good_prime(S)
    fp = mp_norm(S, p)
    factors = mp_factor_squarefree(fp, p)
    if all(len(fac) - 1 > max_degree for fac in factors):
        return []
    # Landau-Mignotte-style bound for monic factors of degree <= 4
    l2 = math.isqrt(sum(c * c for c in S)) + 1
    B = 16 * (l2 + 1)
    k = 1
    while p**k <= 2 * B:
        k += 1
    lifted = _lift_factors(S, factors, p, k)
    M = p ** (1 << _ceil_log2(k))
    degs = [len(x) - 1 for x in lifted]
    out = []
    rem = Poly(QQ, [Fraction(c) for c in S])
    seen = set()
    idxs = range(len(lifted))
    import itertools

    for rsize in (1, 2, 3, 4):
        for combo in itertools.combinations(idxs, rsize):
            dsum = sum(degs[i] for i in combo)
            if dsum > max_degree:
                continue
            prod = (1,)
            for i in combo:
                prod = _zmul(prod, lifted[i], M)
            cand = tuple(_center(c, M) for c in prod)
            if cand in seen:
                continue
            seen.add(cand)
            g = Poly(QQ, [Fraction(c) for c in cand])
            if not _is_irreducible_low(g):
                continue
            if g.divides(rem):
                out.append(g)
    return out


def _is_irreducible_low(g: Poly) -> bool:
    """Irreducibility over Q for degree <= 4 monic integer polynomials."""
    d = g.degree
    if d == 1:
        return True
    if d == 2:
        disc = g.coeffs[1] ** 2 - 4 * g.coeffs[0]
        return not rational_is_square(disc)
    if d == 3:
        c = [int(x) for x in g.coeffs]
        return not integer_cubic_roots(c[2], c[1], c[0])
    if d == 4:
        return not low_degree_factors(g, 2)
    return False


def rational_roots(f: Poly) -> list[Fraction]:
    """All rational roots of f, via the linear factors."""
    return sorted(-g.coeffs[0] for g in low_degree_factors(f, 1) if g.degree == 1)


def splitting_quadratic_field(f: Poly) -> int:
    """Squarefree d with splitting field Q(sqrt(d)) of a rational quadratic;
    1 when the quadratic splits over Q (or is a perfect square)."""
    if f.degree != 2:
        raise PolyError("need a quadratic")
    a, b, c = f.coeffs[2], f.coeffs[1], f.coeffs[0]
    disc = b * b - 4 * a * c
    if disc == 0 or rational_is_square(disc):
        return 1
    return squarefree_part(disc.numerator * disc.denominator)


def rootless_mod_p_certificate(
    g: Poly, span: list[int], p_limit: int = 20000
) -> int | None:
    """A prime p, split in every Q(sqrt(d)) for d in span, with the monic
    associate of g rootless mod p.  Such a p certifies that g has no root in
    the multi-quadratic field spanned by `span`.  None if no prime < p_limit
    works (caller must treat the answer as inconclusive)."""
    from .intutil import kronecker

    F = _int_coeffs(g)
    L = F[-1]
    n = len(F) - 1
    G = tuple(F[i] * L ** (n - 1 - i) for i in range(len(F)))
    p = 3
    while p < p_limit:
        if is_prime(p) and G[-1] % p and all(d % p and kronecker(d, p) == 1 for d in span if d != 1):
            Gp = mp_norm(G, p)
            if len(Gp) == len(G) and not any(mp_eval(Gp, x, p) == 0 for x in range(p)):
                return p
        p += 2
    return None
