"""Elliptic curves over every coefficient domain in the package.

Long Weierstrass models y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with a
complete chord-tangent group law, finite-field group structure by full
enumeration + census, global minimal models over Q (Laska-Kraus-Connell),
quadratic twists, reduction at good odd primes (including curves with
coefficients in a quadratic field), exact rational torsion via Nagell-Lutz,
exact 2-primary torsion over multi-quadratic towers, and exhaustive scans of
all curves over a small field.

Points are None (infinity) or (x, y) pairs of domain elements.  All curve
objects are immutable; scans are embarrassingly parallel over the coefficient
space if a caller wants to partition them.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from . import ff, poly, qfield
from .groups import AbGroupStructure, GroupError, structure_from_elements
from .intutil import (
    factorize,
    integer_cubic_roots,
    is_prime,
    rational_sqrt,
    squarefree_part,
)
from .poly import QQ, Poly, TowerDomain, code_domain


class CurveError(ValueError):
    pass


class BadReduction(CurveError):
    def __init__(self, p):
        super().__init__(f"bad reduction at {p}")
        self.p = p


INF = None


class EllipticCurve:
    """A long Weierstrass model over a coefficient domain."""

    __slots__ = ("domain", "a", "label")

    def __init__(self, domain, ainvs, label: str | None = None):
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "a", tuple(ainvs))
        object.__setattr__(self, "label", label)
        if len(self.a) != 5:
            raise CurveError("need (a1, a2, a3, a4, a6)")
        if domain.is_zero(self.discriminant()):
            raise CurveError("singular model")

    def __setattr__(self, *args):  # pragma: no cover
        raise AttributeError("immutable")

    @classmethod
    def from_ints(cls, domain, ainvs, label=None):
        return cls(domain, [domain.from_int(n) for n in ainvs], label)

    def b_invariants(self):
        d = self.domain
        a1, a2, a3, a4, a6 = self.a
        m, add, sub = d.mul, d.add, d.sub
        b2 = add(m(a1, a1), m(d.from_int(4), a2))
        b4 = add(add(a4, a4), m(a1, a3))
        b6 = add(m(a3, a3), m(d.from_int(4), a6))
        b8 = sub(
            add(add(m(m(a1, a1), a6), m(m(d.from_int(4), a2), a6)),
                sub(m(a2, m(a3, a3)), m(m(a1, a3), a4))),
            m(a4, a4),
        )
        return b2, b4, b6, b8

    def c_invariants(self):
        d = self.domain
        b2, b4, b6, _ = self.b_invariants()
        c4 = d.sub(d.mul(b2, b2), d.mul(d.from_int(24), b4))
        c6 = d.sub(
            d.mul(d.from_int(36), d.mul(b2, b4)),
            d.add(d.mul(d.mul(b2, b2), b2), d.mul(d.from_int(216), b6)),
        )
        return c4, c6

    def discriminant(self):
        d = self.domain
        b2, b4, b6, b8 = self.b_invariants()
        m = d.mul
        t1 = d.neg(m(m(b2, b2), b8))
        t2 = d.neg(m(d.from_int(8), m(b4, m(b4, b4))))
        t3 = d.neg(m(d.from_int(27), m(b6, b6)))
        t4 = m(d.from_int(9), m(b2, m(b4, b6)))
        return d.add(d.add(t1, t2), d.add(t3, t4))

    def j_invariant(self):
        d = self.domain
        c4, _ = self.c_invariants()
        return d.div(d.mul(d.mul(c4, c4), c4), self.discriminant())

    # -- group law --------------------------------------------------------

    def on_curve(self, P) -> bool:
        if P is INF:
            return True
        d = self.domain
        x, y = P
        a1, a2, a3, a4, a6 = self.a
        lhs = d.add(d.mul(y, y), d.add(d.mul(d.mul(a1, x), y), d.mul(a3, y)))
        x2 = d.mul(x, x)
        rhs = d.add(d.add(d.mul(x2, x), d.mul(a2, x2)), d.add(d.mul(a4, x), a6))
        return d.is_zero(d.sub(lhs, rhs))

    def neg(self, P):
        if P is INF:
            return INF
        d = self.domain
        x, y = P
        a1, _, a3, _, _ = self.a
        return (x, d.sub(d.neg(y), d.add(d.mul(a1, x), a3)))

    def add(self, P, Q):
        if P is INF:
            return Q
        if Q is INF:
            return P
        d = self.domain
        a1, a2, a3, a4, _ = self.a
        x1, y1 = P
        x2, y2 = Q
        if d.is_zero(d.sub(x1, x2)):
            if d.is_zero(d.sub(y2, self.neg(P)[1])):
                return INF
            denom = d.add(d.add(y1, y1), d.add(d.mul(a1, x1), a3))
            num = d.add(
                d.sub(
                    d.add(d.mul(d.from_int(3), d.mul(x1, x1)),
                          d.mul(d.from_int(2), d.mul(a2, x1))),
                    d.mul(a1, y1),
                ),
                a4,
            )
            lam = d.div(num, denom)
        else:
            lam = d.div(d.sub(y2, y1), d.sub(x2, x1))
        nu = d.sub(y1, d.mul(lam, x1))
        x3 = d.sub(d.sub(d.sub(d.add(d.mul(lam, lam), d.mul(a1, lam)), a2), x1), x2)
        y3 = d.sub(d.neg(d.add(d.mul(d.add(lam, a1), x3), nu)), a3)
        return (x3, y3)

    def mul(self, n: int, P):
        if n < 0:
            return self.mul(-n, self.neg(P))
        out = INF
        base = P
        while n:
            if n & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            n >>= 1
        return out

    def point_order(self, P, bound: int = 100000) -> int:
        if P is INF:
            return 1
        acc = P
        for n in range(1, bound + 1):
            if acc is INF:
                return n
            acc = self.add(acc, P)
        raise CurveError(f"point order exceeds bound {bound}")

    def __repr__(self):
        return f"EllipticCurve({self.label or list(self.a)})"


# ---------------------------------------------------------------------------
# Finite fields: point enumeration and group structure
# ---------------------------------------------------------------------------


def points_over_code_domain(E: EllipticCurve) -> list:
    dom = E.domain
    t = dom.tables
    a1, a2, a3, a4, a6 = E.a
    add, mul, neg = t.add, t.mul, t.neg
    inv2 = t.inv[t.from_int(2)]
    pts = [INF]
    for x in range(t.q):
        x2 = mul[x][x]
        g = add[add[mul[x2][x]][mul[a2][x2]]][add[mul[a4][x]][a6]]
        hh = mul[add[mul[a1][x]][a3]][inv2]
        val = add[g][mul[hh][hh]]
        if val == 0:
            pts.append((x, neg[hh]))
        else:
            for ysh in t.sqrt[val]:
                pts.append((x, add[ysh][neg[hh]]))
    return pts


def group_structure(E: EllipticCurve) -> AbGroupStructure:
    """Invariant factors of E(F_q) by full enumeration + order census."""
    pts = points_over_code_domain(E)
    st = structure_from_elements(pts, E.add, INF, max_rank=2)
    q = E.domain.q
    if len(st.factors) == 2 and (q - 1) % st.factors[0] != 0:
        raise GroupError(f"Weil pairing violated: {st} over F_{q}")
    return st


# ---------------------------------------------------------------------------
# Integral models over Q: invariants, minimal models, reduction, twists
# ---------------------------------------------------------------------------


def _int_ainvs(E: EllipticCurve) -> tuple[int, ...]:
    out = []
    for c in E.a:
        f = Fraction(c)
        if f.denominator != 1:
            raise CurveError("model is not integral")
        out.append(int(f))
    return tuple(out)


def c4c6_disc(ainvs) -> tuple[int, int, int]:
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -(b2 * b2) * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    assert c4**3 - c6**2 == 1728 * disc
    return c4, c6, disc


def _valuation(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _kraus_ok(c4: int, c6: int) -> bool:
    if c6 != 0 and _valuation(c6, 3) == 2:
        return False
    if c6 % 4 == 3:
        return True
    return (c4 == 0 or _valuation(c4, 2) >= 4) and c6 % 32 in (0, 8)


def model_from_c4c6(c4: int, c6: int, label=None) -> EllipticCurve:
    """Connell's reconstruction of an integral model from Kraus-valid (c4, c6)."""
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    assert (b2 * b2 - c4) % 24 == 0
    b4 = (b2 * b2 - c4) // 24
    assert (-(b2**3) + 36 * b2 * b4 - c6) % 216 == 0
    b6 = (-(b2**3) + 36 * b2 * b4 - c6) // 216
    a1 = b2 % 2
    a2 = (b2 - a1) // 4
    a3 = b6 % 2
    a6 = (b6 - a3) // 4
    a4 = (b4 - a1 * a3) // 2
    assert (b2 - a1) % 4 == 0 and (b6 - a3) % 4 == 0 and (b4 - a1 * a3) % 2 == 0
    E = EllipticCurve.from_ints(QQ, (a1, a2, a3, a4, a6), label)
    assert c4c6_disc((a1, a2, a3, a4, a6))[:2] == (c4, c6)
    return E


def minimal_model(E: EllipticCurve, prime_hint: tuple[int, ...] = ()) -> EllipticCurve:
    """Global minimal model over Q (Laska-Kraus-Connell)."""
    c4, c6, disc = c4c6_disc(_int_ainvs(E))
    u = 1
    for p in factorize(disc, hint=prime_hint):
        m = min(_valuation(c4, p) // 4, _valuation(c6, p) // 6, _valuation(disc, p) // 12)
        u *= p**m
    while u > 1 and not _kraus_ok(c4 // u**4, c6 // u**6):
        if u % 2 == 0 and not _kraus_ok(c4 // u**4, c6 // u**6):
            if _kraus2_fails(c4 // u**4, c6 // u**6):
                u //= 2
                continue
        if u % 3 == 0:
            u //= 3
            continue
        break
    assert _kraus_ok(c4 // u**4, c6 // u**6)
    return model_from_c4c6(c4 // u**4, c6 // u**6, E.label)


def _kraus2_fails(c4: int, c6: int) -> bool:
    if c6 % 4 == 3:
        return False
    return not ((c4 == 0 or _valuation(c4, 2) >= 4) and c6 % 32 in (0, 8))


@lru_cache(maxsize=None)
def _minimal_cached(ainvs: tuple[int, ...]) -> tuple[int, int, int, int, int]:
    E = EllipticCurve.from_ints(QQ, ainvs)
    return _int_ainvs(minimal_model(E))


def minimal_disc(E: EllipticCurve) -> int:
    return c4c6_disc(_minimal_cached(_int_ainvs(E)))[2]


def good_odd_primes(E: EllipticCurve, limit: int) -> list[int]:
    disc = minimal_disc(E)
    return [p for p in range(3, limit) if is_prime(p) and disc % p != 0]


def reduce_mod_p(E: EllipticCurve, p: int, f: int = 1) -> EllipticCurve:
    """Reduction of a rational curve at an odd prime of good reduction,
    over the residue field F_{p^f}."""
    if p == 2:
        raise CurveError("even residue characteristic unsupported")
    amin = _minimal_cached(_int_ainvs(E))
    if c4c6_disc(amin)[2] % p == 0:
        raise BadReduction(p)
    dom = code_domain(ff.make_field(p, f))
    return EllipticCurve.from_ints(dom, amin, label=E.label)


def reduce_quadratic_curve(E: EllipticCurve, d: int, p: int, f: int) -> list[EllipticCurve]:
    """Reductions at the primes above odd p of a curve with coefficients in
    Q(sqrt(d)) (TowerElem entries); one curve per embedding of sqrt(d)."""
    if p == 2 or d % p == 0:
        raise BadReduction(p)
    dom = code_domain(ff.make_field(p, f))
    t = dom.tables
    roots = t.sqrt[t.from_int(d)]
    if not roots:
        raise BadReduction(p)
    out = []
    for s in sorted(set(roots)):
        ainvs = []
        try:
            for c in E.a:
                x = c.coords[0]
                y = c.coords[1] if len(c.coords) > 1 else Fraction(0)
                ainvs.append(t.add[_frac_mod(x, t)][t.mul[_frac_mod(y, t)][s]])
        except ZeroDivisionError as exc:
            raise BadReduction(p) from exc
        try:
            out.append(EllipticCurve(dom, ainvs, label=E.label))
        except CurveError as exc:
            raise BadReduction(p) from exc
    return out


def _frac_mod(x: Fraction, t) -> int:
    den = t.from_int(x.denominator)
    if den == 0:
        raise ZeroDivisionError
    return t.mul[t.from_int(x.numerator)][t.inv[den]]


def short_model(E: EllipticCurve) -> tuple[int, int]:
    """Integral (A, B) with E isomorphic over Q to y^2 = x^3 + Ax + B,
    normalized by removing common u^4 | A, u^6 | B."""
    c4, c6, _ = c4c6_disc(_int_ainvs(E))
    return _normalize_short(-27 * c4, -54 * c6)


def _normalize_short(A: int, B: int) -> tuple[int, int]:
    if A == 0 and B == 0:
        raise CurveError("singular")
    base = factorize(math.gcd(abs(A), abs(B)) or abs(A + B))
    for p in base:
        while A % p**4 == 0 and B % p**6 == 0:
            A //= p**4
            B //= p**6
    return A, B


def short_curve(A: int, B: int, label=None) -> EllipticCurve:
    return EllipticCurve.from_ints(QQ, (0, 0, 0, A, B), label)


def quadratic_twist(E: EllipticCurve, d: int) -> EllipticCurve:
    """The quadratic twist by squarefree d, as a normalized short model."""
    if d == 0:
        raise CurveError("twist parameter must be nonzero")
    A, B = short_model(E)
    A2, B2 = _normalize_short(A * d * d, B * d**3)
    label = f"{E.label}^({d})" if E.label else None
    return short_curve(A2, B2, label)


# ---------------------------------------------------------------------------
# Rational torsion, exact, via Nagell-Lutz
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def torsion_points_short(A: int, B: int, hint: tuple[int, ...] = ()) -> tuple:
    """All rational torsion points of y^2 = x^3 + Ax + B (integral).

    Torsion points on an integral short model are integral with y = 0 or
    y^2 | 16|4A^3 + 27B^2|; each candidate is certified or rejected by
    iteration (a non-torsion candidate must leave the finite candidate set)."""
    E = short_curve(A, B)
    D = 16 * abs(4 * A**3 + 27 * B**2)
    ys = [1]
    for p, e in factorize(D, hint=hint).items():
        ys = [y * p**i for y in ys for i in range(e // 2 + 1)]
    candidates: set = set()
    for x in integer_cubic_roots(0, A, B):
        candidates.add((Fraction(x), Fraction(0)))
    for y in ys:
        for x in integer_cubic_roots(0, A, B - y * y):
            candidates.add((Fraction(x), Fraction(y)))
            candidates.add((Fraction(x), Fraction(-y)))
    limit = len(candidates) + 1
    torsion = [INF]
    for P in candidates:
        acc = P
        for _ in range(limit):
            if acc is INF:
                torsion.append(P)
                break
            if acc not in candidates:
                break
            acc = E.add(acc, P)
    return tuple(sorted(torsion, key=lambda P: (0,) if P is INF else (1, P)))


def torsion_structure_q(E: EllipticCurve, hint=()) -> AbGroupStructure:
    A, B = short_model(E)
    pts = list(torsion_points_short(A, B, tuple(hint)))
    return structure_from_elements(pts, short_curve(A, B).add, INF, max_rank=2)


def division_polynomial(E: EllipticCurve, n: int) -> Poly:
    """The x-coordinate kill polynomial of multiplication by n on the
    normalized short model: roots are exactly the x-coordinates of the
    nonzero points killed by n (for even n this is psi_n/psi_2 times the
    universal two-torsion cubic 4x^3 + b2 x^2 + 2 b4 x + b6)."""
    A, B = short_model(E)
    b = tuple(Fraction(v) for v in (0, 2 * A, 4 * B, -A * A))
    return poly.kill_poly(b, n)


def primitive_kernel_poly(E: EllipticCurve, n: int) -> Poly:
    """Roots are the x-coordinates of the points of exact order n >= 2 on
    the normalized short model."""
    A, B = short_model(E)
    b = tuple(Fraction(v) for v in (0, 2 * A, 4 * B, -A * A))
    return poly.primitive_kernel_poly_b(b, n)


# ---------------------------------------------------------------------------
# 2-primary torsion over a multi-quadratic tower
# ---------------------------------------------------------------------------


def tower_short_curve(A: int, B: int, K) -> EllipticCurve:
    dom = TowerDomain(K)
    return EllipticCurve(dom, [dom.from_int(n) for n in (0, 0, 0, A, B)])


def _roots_in_tower(g: Poly, K) -> list:
    """Roots in K of a rational polynomial of degree <= 2 (monic)."""
    if g.degree == 1:
        return [K.from_rational(-g.coeffs[0])]
    d = poly.splitting_quadratic_field(g)
    disc = g.coeffs[1] ** 2 - 4 * g.coeffs[0]
    if d == 1:
        rs = rational_sqrt(disc)
        if rs is None:
            return []
        s = K.from_rational(rs)
    elif K.contains_sqrt(d):
        s = qfield.sqrt_in_tower(K.from_rational(disc))
        assert s is not None
    else:
        return []
    half = K.from_rational(Fraction(1, 2))
    mb = K.from_rational(-g.coeffs[1])
    roots = [(mb + s) * half, (mb - s) * half]
    return roots if roots[0] != roots[1] else roots[:1]


def two_torsion_roots_in_tower(A: int, B: int, K) -> list:
    """Roots of x^3 + Ax + B lying in K (complete: an irreducible cubic has
    no root in any multi-quadratic field)."""
    cubic = Poly.from_ints(QQ, [B, A, 0, 1])
    roots = []
    for g in poly.low_degree_factors(cubic, 2):
        roots.extend(_roots_in_tower(g, K))
    return roots


def halving_witness(A: int, B: int, K, t1):
    """A point P over K with 2P = (t1, 0) on y^2 = x^3 + Ax + B, or None.

    With the cofactor q(x) = x^2 + t1 x + (t1^2 + A), the halves of (t1, 0)
    have x = t1 +- m where m^2 = q(t1); P exists in E(K) iff m lies in K and
    the cubic value at one such x is a square in K.  Both directions exact.
    """
    E = tower_short_curve(A, B, K)
    q_t1 = t1 * t1 + t1 * t1 + t1 * t1 + K.from_rational(A)  # 3 t1^2 + A
    m = qfield.sqrt_in_tower(q_t1)
    if m is None:
        return None
    for mm in (m, -m):
        x = t1 + mm
        val = x * x * x + K.from_rational(A) * x + K.from_rational(B)
        y = qfield.sqrt_in_tower(val)
        if y is not None:
            P = (x, y)
            assert E.on_curve(P) and E.mul(2, P) == (t1, K.zero())
            return P
    return None


def _halves_over_tower(A: int, B: int, L, e_roots: list, P):
    """All points Q over L with 2Q = P on y^2 = x^3 + Ax + B, given the full
    set of 2-torsion roots e_roots in L.

    Classical: Q exists iff every x(P) - e_i is a square in L, and then
    x(Q) = x(P) + (+-s1)(+-s2) + (+-s2)(+-s3) + (+-s3)(+-s1) over sign
    choices, s_i^2 = x(P) - e_i.  Every candidate is verified by the group
    law, and every root of the halving quartic arises this way, so the
    returned list is complete."""
    E = tower_short_curve(A, B, L)
    x0, y0 = P
    ss = []
    for e in e_roots:
        s = qfield.sqrt_in_tower(x0 - e)
        if s is None:
            return []
        ss.append(s)
    s1, s2, s3 = ss
    out = []
    seen_x = []
    for sign2 in (1, -1):
        for sign3 in (1, -1):
            b = s2 if sign2 == 1 else -s2
            c = s3 if sign3 == 1 else -s3
            x = x0 + s1 * b + b * c + c * s1
            if x in seen_x:
                continue
            seen_x.append(x)
            val = x * x * x + L.from_rational(A) * x + L.from_rational(B)
            y = qfield.sqrt_in_tower(val)
            if y is None:
                continue
            for Q in ((x, y), (x, -y)):
                if E.mul(2, Q) == P:
                    out.append(Q)
                    break
    return out


def _two_torsion_field(A: int, B: int, K):
    """(L, e_roots): the compositum of K with the 2-torsion field, and the
    three cubic roots as elements of L (requires the cubic to have at least
    one rational root, which holds whenever E has a point of order 4 over a
    multi-quadratic field)."""
    cubic = Poly.from_ints(QQ, [B, A, 0, 1])
    factors = poly.low_degree_factors(cubic, 2)
    gens = list(K.gens)
    for g in factors:
        if g.degree == 2:
            d = poly.splitting_quadratic_field(g)
            if d != 1 and not K.contains_sqrt(d):
                gens.append(d)
    L = qfield.MultiQuadField(gens)
    e_roots = []
    for g in factors:
        e_roots.extend(_roots_in_tower(g, L))
    if len(e_roots) != 3:
        raise CurveError("2-torsion field is not multi-quadratic")
    return L, e_roots


def _lift_to(L, v):
    """Re-express a TowerElem of a subfield inside the larger field L."""
    K = v.field
    out = L.zero()
    for mask, c in enumerate(v.coords):
        if not c:
            continue
        term = L.from_rational(c)
        for i in range(mask.bit_length()):
            if mask >> i & 1:
                term = term * L.sqrt_gen(K.gens[i])
        out = out + term
    return out


def _lift_pt(L, P):
    return (_lift_to(L, P[0]), _lift_to(L, P[1]))


def _project_to(K, v):
    """Inverse of _lift_to, for elements of L that genuinely lie in K."""
    L = v.field
    out = K.zero()
    for mask, c in enumerate(v.coords):
        if not c:
            continue
        prod = 1
        for i in range(mask.bit_length()):
            if mask >> i & 1:
                prod *= L.gens[i]
        d = squarefree_part(prod)
        scale = rational_sqrt(Fraction(prod, d))
        assert scale is not None
        out = out + K.from_rational(c * scale) * K.sqrt_gen(d)
    return out


def _galois_over(L, K) -> list[tuple[int, ...]]:
    """The nontrivial elements of Gal(L/K) as sign tuples on L.gens."""
    n = len(L.gens)
    constraints = []
    for d in K.gens:
        # express sqrt(d) in L: find the generator subset whose product has
        # squarefree part d; the conjugation must fix it
        mask_found = None
        for mask in range(2**n):
            prod = 1
            for i in range(n):
                if mask >> i & 1:
                    prod *= L.gens[i]
            if (prod == 1 and d == 1) or (prod != 1 and squarefree_part(prod) == d):
                mask_found = mask
                break
        assert mask_found is not None
        constraints.append(mask_found)
    out = []
    for bits in range(1, 2**n):
        if all(bin(bits & m).count("1") % 2 == 0 for m in constraints):
            out.append(tuple(-1 if bits >> i & 1 else 1 for i in range(n)))
    return out


def _k_rational(galois, v) -> bool:
    return all(v.conjugate(signs) == v for signs in galois)


def two_primary_over_tower(A: int, B: int, K, probe16: bool = True):
    """(structure, witnesses, exact) for the 2-primary torsion of
    y^2 = x^3 + Ax + B over the multi-quadratic field K.

    2-torsion from the cubic roots in K (complete); order 4 by the halving
    iff-criterion; orders 8 and 16 by halving every lower-level class over
    the 2-torsion field and descending to K by Galois fixedness.  Exact up
    to order 16; a 16-torsion point sets exact=False (no probe beyond)."""
    roots = two_torsion_roots_in_tower(A, B, K)
    if not roots:
        return AbGroupStructure.trivial(), [], True
    if len(roots) not in (1, 3):
        raise CurveError("impossible 2-torsion root count")  # pragma: no cover
    witnesses = [(r, K.zero()) for r in roots]
    halvable = []
    for t1 in roots:
        P4 = halving_witness(A, B, K, t1)
        if P4 is not None:
            halvable.append(P4)
    if len(roots) == 3 and len(halvable) not in (0, 1, 3):
        raise CurveError("halvable 2-torsion is not a subgroup")  # pragma: no cover
    exact = True
    top = 2
    if halvable:
        witnesses.extend(halvable)
        top = 4
        L, e_roots = _two_torsion_field(A, B, K)
        galois = _galois_over(L, K)
        EK = tower_short_curve(A, B, K)
        for level in (8, 16):
            if level == 16 and not probe16:
                break
            found = None
            for P in _order_reps(EK, witnesses, level // 2):
                for Q in _halves_over_tower(A, B, L, e_roots, _lift_pt(L, P)):
                    if _k_rational(galois, Q[0]) and _k_rational(galois, Q[1]):
                        found = (_project_to(K, Q[0]), _project_to(K, Q[1]))
                        break
                if found:
                    break
            if found is None:
                break
            assert EK.on_curve(found)
            assert EK.mul(level // 2, found) is not INF and EK.mul(level, found) is INF
            witnesses.append(found)
            top = level
            if level == 16:
                exact = False
    if len(roots) == 1:
        st = AbGroupStructure.cyclic(top)
    else:
        second = 4 if len(halvable) == 3 else 2
        exps = sorted([second.bit_length() - 1, top.bit_length() - 1])
        st = AbGroupStructure.from_prime_exponents({2: exps})
    return st, witnesses, exact


def _order_reps(E: EllipticCurve, witnesses, order: int) -> list:
    """Elements of exact `order` in the span of the witnesses, one per +-pair."""
    from .groups import subgroup_span

    span = subgroup_span(witnesses, E.add, E.neg, INF, cap=512)
    if span is None:
        raise CurveError("2-primary span exceeded sanity cap")  # pragma: no cover
    reps = []
    seen = set()
    for P in span:
        if P is INF or P in seen:
            continue
        if E.point_order(P, 64) == order:
            reps.append(P)
            seen.add(P)
            seen.add(E.neg(P))
    return reps


def torsion_over_tower(E: EllipticCurve, K) -> AbGroupStructure:
    """Exact torsion of a rational curve over the multi-quadratic field K:
    odd part through the twist decomposition (Nagell-Lutz on each twist),
    2-part through the tower machinery."""
    A, B = short_model(E)
    hint = tuple(factorize(minimal_disc(E)))
    odd = AbGroupStructure.trivial()
    for d in K.twist_classes():
        Et = quadratic_twist(E, d)
        tw_hint = hint + tuple(factorize(d)) if d != 1 else hint
        odd = odd.direct_sum(torsion_structure_q(Et, hint=tw_hint).odd_part())
    two, _, exact = two_primary_over_tower(A, B, K)
    if not exact:
        raise CurveError("2-primary probe incomplete over this field")
    return odd.direct_sum(two)


# ---------------------------------------------------------------------------
# Exhaustive small-field scans
# ---------------------------------------------------------------------------


def exhaustive_small_field_scan(field: ff.FieldDesc, n: int):
    """Scan all nonsingular long Weierstrass curves over F_q for one with a
    point of order n.  Returns (witness curve or None, curves scanned)."""
    dom = code_domain(field)
    t = dom.tables
    q = t.q
    add, mul, neg = t.add, t.mul, t.neg
    four, eight, nine, twenty7 = (t.from_int(k) for k in (4, 8, 9, 27))
    inv2 = t.inv[t.from_int(2)]
    sqrt_t = t.sqrt
    scanned = 0
    witness = None
    for a1 in range(q):
        a1a1 = mul[a1][a1]
        for a2 in range(q):
            b2 = add[a1a1][mul[four][a2]]
            for a3 in range(q):
                a3a3 = mul[a3][a3]
                a1a3 = mul[a1][a3]
                for a4 in range(q):
                    b4 = add[add[a4][a4]][a1a3]
                    for a6 in range(q):
                        b6 = add[a3a3][mul[four][a6]]
                        b8 = add[add[mul[a1a1][a6]][mul[mul[four][a2]][a6]]][
                            add[neg[mul[a1a3][a4]]][mul[a2][a3a3]]
                        ]
                        b8 = add[b8][neg[mul[a4][a4]]]
                        t1 = add[neg[mul[mul[b2][b2]][b8]]][neg[mul[eight][mul[b4][mul[b4][b4]]]]]
                        t2 = add[neg[mul[twenty7][mul[b6][b6]]]][mul[nine][mul[b2][mul[b4][b6]]]]
                        if add[t1][t2] == 0:
                            continue
                        scanned += 1
                        # count points via the completed square
                        count = 1
                        for x in range(q):
                            x2 = mul[x][x]
                            g = add[add[mul[x2][x]][mul[a2][x2]]][add[mul[a4][x]][a6]]
                            hh = mul[add[mul[a1][x]][a3]][inv2]
                            val = add[g][mul[hh][hh]]
                            count += 1 if val == 0 else len(sqrt_t[val])
                        if count % n:
                            continue
                        E = EllipticCurve(dom, (a1, a2, a3, a4, a6))
                        st = structure_from_elements(
                            points_over_code_domain(E), E.add, INF, max_rank=2
                        )
                        if st.exponent % n == 0:
                            return E, scanned
    return witness, scanned
