"""Genus-2 hyperelliptic Jacobians: Mumford/Cantor arithmetic for degree-5
models and balanced degree-6 split models, a zeta-function counting oracle,
full group-structure censuses over small fields, the symmetric square with
its P^1 of x-fibers, Galois analysis of 2-torsion through Weierstrass
points, and quadratic-twist groups over F_p via the Frobenius kernel.

Divisor classes are triples (u, v, n): u monic of degree <= 2, v of lower
degree with v^2 = F mod u, and n the number of copies of the +infinity place
in the balanced representation of a degree-6 split model (n = 0 throughout
for degree-5 models, whose single infinite place is Weierstrass).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import ff, poly
from .groups import AbGroupStructure, GroupError, structure_from_elements
from .intutil import rational_sqrt
from .poly import (
    QQ,
    Poly,
    TowerDomain,
    pdegree,
    pexact_div,
    pgcdext,
    pmod,
    pmonic,
    pmul,
    pneg,
    pnormalize,
    psub,
    padd,
    peval,
)


class JacError(ValueError):
    pass


class BadHyperReduction(JacError):
    def __init__(self, p):
        super().__init__(f"bad reduction at {p}")
        self.p = p


class ZetaMismatch(JacError):
    """Enumerated class count disagrees with the zeta oracle."""


class HyperCurve:
    """y^2 = F(x), F squarefree of degree 5 or 6 over a field domain.

    Degree-6 models must have square leading coefficient over every field of
    use; all builtin models are monic, hence split everywhere."""

    __slots__ = ("domain", "F", "label", "Vp", "R")

    def __init__(self, domain, F, label=None):
        F = pnormalize(domain, F)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "label", label)
        if pdegree(F) not in (5, 6):
            raise JacError("degree must be 5 or 6")
        d, _, _ = pgcdext(domain, F, poly.pderiv(domain, F))
        if pdegree(d) != 0:
            raise JacError("model is singular")
        if pdegree(F) == 6:
            if F[-1] != domain.one:
                raise JacError("degree-6 models must be monic here")
            object.__setattr__(self, "Vp", _sqrt_series(domain, F))
            object.__setattr__(self, "R", psub(domain, F, pmul(domain, self.Vp, self.Vp)))
        else:
            object.__setattr__(self, "Vp", None)
            object.__setattr__(self, "R", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("immutable")

    @classmethod
    def from_ints(cls, domain, ints, label=None):
        return cls(domain, [domain.from_int(n) for n in ints], label)

    @property
    def degree(self):
        return pdegree(self.F)

    @property
    def genus(self):
        return 2

    def identity(self):
        return ((self.domain.one,), (), 1 if self.degree == 6 else 0)

    def __repr__(self):
        return f"HyperCurve({self.label or list(self.F)})"


def _sqrt_series(dom, F):
    """The monic cubic V with deg(F - V^2) <= 2 (char != 2)."""
    f5, f4, f3 = F[5], F[4], F[3]
    half = dom.div(dom.one, dom.from_int(2))
    c2 = dom.mul(f5, half)
    c1 = dom.mul(dom.sub(f4, dom.mul(c2, c2)), half)
    c0 = dom.mul(dom.sub(f3, dom.mul(dom.from_int(2), dom.mul(c1, c2))), half)
    return (c0, c1, c2, dom.one)


# ---------------------------------------------------------------------------
# The group law
# ---------------------------------------------------------------------------


def jac_neg(C: HyperCurve, D):
    u, v, n = D
    dom = C.domain
    vneg = pmod(dom, pneg(dom, v), u) if pdegree(u) > 0 else ()
    if C.degree == 6:
        return (u, vneg, 2 - pdegree(u) - n)
    return (u, vneg, 0)


def _compose(C: HyperCurve, D1, D2):
    dom = C.domain
    u1, v1, n1 = D1
    u2, v2, n2 = D2
    e, e1, e2 = pgcdext(dom, u1, u2)
    vsum = padd(dom, v1, v2)
    if vsum:
        d, c1, c2 = pgcdext(dom, e, vsum)
        s1 = pmul(dom, c1, e1)
        s2 = pmul(dom, c1, e2)
        s3 = c2
    else:
        d, s1, s2, s3 = e, e1, e2, ()
    dd = pmul(dom, d, d)
    u3 = pexact_div(dom, pmul(dom, u1, u2), dd)
    t = padd(
        dom,
        padd(dom, pmul(dom, pmul(dom, s1, u1), v2), pmul(dom, pmul(dom, s2, u2), v1)),
        pmul(dom, s3, padd(dom, pmul(dom, v1, v2), C.F)),
    )
    v3 = pmod(dom, pexact_div(dom, t, d), u3)
    return u3, v3, n1 + n2 + pdegree(d)


def _adjust_step(C: HyperCurve, u, v, Np, direction):
    """One principal-divisor move y - w with w = v (mod u), steered toward
    +infinity (direction +1) or -infinity (direction -1).  Returns the new
    (u, v, Np) of the running representation of total degree 4."""
    dom = C.domain
    Vdir = C.Vp if direction > 0 else pneg(dom, C.Vp)
    a = pmod(dom, psub(dom, Vdir, v), u)
    w = psub(dom, Vdir, a)
    num = psub(dom, C.F, pmul(dom, w, w))
    ut = pmonic(dom, pexact_div(dom, num, u))
    vt = pmod(dom, pneg(dom, w), ut) if pdegree(ut) > 0 else ()
    degR = pdegree(C.R)
    tp = psub(dom, C.Vp, w)
    tm = padd(dom, C.Vp, w)
    zp = (3 - degR) if not tp else -pdegree(tp)
    zm = (3 - degR) if not tm else -pdegree(tm)
    Np_new = Np - zp - pdegree(ut)
    return ut, vt, Np_new


def jac_add(C: HyperCurve, D1, D2):
    """Cantor composition + reduction; balanced weights on split sextics."""
    dom = C.domain
    ident = C.identity()
    if D1 == ident:
        return D2
    if D2 == ident:
        return D1
    u3, v3, Np = _compose(C, D1, D2)
    if C.degree == 5:
        while pdegree(u3) > 2:
            u3 = pmonic(dom, pexact_div(dom, psub(dom, C.F, pmul(dom, v3, v3)), u3))
            v3 = pmod(dom, pneg(dom, v3), u3) if pdegree(u3) > 0 else ()
        return (u3, v3, 0)
    while pdegree(u3) > 2:
        u3, v3, Np = _adjust_step(C, u3, v3, Np, +1)
    guard = 0
    while True:
        Nm = 4 - pdegree(u3) - Np
        if Np >= 1 and Nm >= 1:
            break
        direction = -1 if Np < 1 else +1
        u3, v3, Np = _adjust_step(C, u3, v3, Np, direction)
        guard += 1
        if guard > 8:  # pragma: no cover
            raise JacError("balanced reduction failed to converge")
    n = Np - 1
    assert 0 <= n <= 2 - pdegree(u3)
    return (u3, v3, n)


def jac_mul(C: HyperCurve, k: int, D):
    if k < 0:
        return jac_mul(C, -k, jac_neg(C, D))
    out = C.identity()
    base = D
    while k:
        if k & 1:
            out = jac_add(C, out, base)
        base = jac_add(C, base, base)
        k >>= 1
    return out


def jac_order(C: HyperCurve, D, bound: int = 100000) -> int:
    acc = D
    ident = C.identity()
    for k in range(1, bound + 1):
        if acc == ident:
            return k
        acc = jac_add(C, acc, D)
    raise JacError("order exceeds bound")


def is_valid_divisor(C: HyperCurve, D) -> bool:
    u, v, n = D
    dom = C.domain
    if not u or u[-1] != dom.one or pdegree(u) > 2:
        return False
    if v and pdegree(v) >= pdegree(u):
        return False
    if pmod(dom, psub(dom, pmul(dom, v, v), C.F), u):
        return False
    if C.degree == 6:
        return 0 <= n <= 2 - pdegree(u)
    return n == 0


@dataclass(frozen=True)
class MumfordDiv:
    """Public wrapper for a reduced divisor class."""

    curve: HyperCurve
    a: tuple
    b: tuple
    w: int

    def __post_init__(self):
        if not is_valid_divisor(self.curve, (self.a, self.b, self.w)):
            raise JacError("invalid Mumford data")

    def key(self):
        return (self.a, self.b, self.w)

    def __add__(self, other: "MumfordDiv") -> "MumfordDiv":
        if other.curve is not self.curve:
            raise JacError("divisors on different curves")
        return MumfordDiv(self.curve, *jac_add(self.curve, self.key(), other.key()))

    def __neg__(self) -> "MumfordDiv":
        return MumfordDiv(self.curve, *jac_neg(self.curve, self.key()))

    def __rmul__(self, k: int) -> "MumfordDiv":
        return MumfordDiv(self.curve, *jac_mul(self.curve, k, self.key()))

    def order(self, bound: int = 100000) -> int:
        return jac_order(self.curve, self.key(), bound)


# ---------------------------------------------------------------------------
# Specialized group law over int-coded fields (same algorithm, tables bound
# into locals; cross-validated against the generic path in the test suite)
# ---------------------------------------------------------------------------


def fast_jac_ops(C: HyperCurve):
    """(add, neg, identity) closures for a curve over a CodeDomain."""
    t = C.domain.tables
    ADD, MUL, NEG, INV = t.add, t.mul, t.neg, t.inv
    F = C.F
    sextic = C.degree == 6
    Vp = C.Vp
    R = C.R
    degR = pdegree(R) if sextic else 0
    Vm = tuple(NEG[c] for c in Vp) if sextic else None
    ident = C.identity()

    def norm(f):
        f = list(f)
        while f and f[-1] == 0:
            f.pop()
        return tuple(f)

    def sub(f, g):
        n = max(len(f), len(g))
        return norm(
            [ADD[f[i] if i < len(f) else 0][NEG[g[i] if i < len(g) else 0]] for i in range(n)]
        )

    def addp(f, g):
        n = max(len(f), len(g))
        return norm(
            [ADD[f[i] if i < len(f) else 0][g[i] if i < len(g) else 0] for i in range(n)]
        )

    def mul(f, g):
        if not f or not g:
            return ()
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                rowa = MUL[a]
                for j, b in enumerate(g):
                    if b:
                        out[i + j] = ADD[out[i + j]][rowa[b]]
        return norm(out)

    def divmod_(f, g):
        q = [0] * max(0, len(f) - len(g) + 1)
        r = list(f)
        ilc = INV[g[-1]]
        dg = len(g) - 1
        while len(r) >= len(g):
            if r[-1] == 0:
                r.pop()
                continue
            c = MUL[r[-1]][ilc]
            k = len(r) - 1 - dg
            q[k] = c
            rowc = MUL[c]
            for i in range(len(g)):
                r[k + i] = ADD[r[k + i]][NEG[rowc[g[i]]]]
            r.pop()
        return norm(q), norm(r)

    def gcdext(f, g):
        r0, r1 = f, g
        s0, s1 = (1,), ()
        t0, t1 = (), (1,)
        while r1:
            q, r = divmod_(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, sub(s0, mul(q, s1))
            t0, t1 = t1, sub(t0, mul(q, t1))
        ilc = INV[r0[-1]]
        sc = lambda h: norm([MUL[c][ilc] for c in h])
        return sc(r0), sc(s0), sc(t0)

    def monic(f):
        ilc = INV[f[-1]]
        return norm([MUL[c][ilc] for c in f])

    def adjust(u, v, Np, direction):
        Vdir = Vp if direction > 0 else Vm
        a = divmod_(sub(Vdir, v), u)[1]
        w = sub(Vdir, a)
        ut = monic(divmod_(sub(F, mul(w, w)), u)[0])
        vt = divmod_([NEG[c] for c in w], ut)[1]
        tp = sub(Vp, w)
        tm = addp(Vp, w)
        zp = (3 - degR) if not tp else -(len(tp) - 1)
        Np_new = Np - zp - (len(ut) - 1)
        return ut, vt, Np_new

    def add_cls(D1, D2):
        if D1 == ident:
            return D2
        if D2 == ident:
            return D1
        u1, v1, n1 = D1
        u2, v2, n2 = D2
        e, e1, e2 = gcdext(u1, u2)
        vsum = addp(v1, v2)
        if vsum:
            d, c1, c2 = gcdext(e, vsum)
            s1 = mul(c1, e1)
            s2 = mul(c1, e2)
            s3 = c2
        else:
            d, s1, s2, s3 = e, e1, e2, ()
        u3 = divmod_(mul(u1, u2), mul(d, d))[0]
        tt = addp(
            addp(mul(mul(s1, u1), v2), mul(mul(s2, u2), v1)),
            mul(s3, addp(mul(v1, v2), F)),
        )
        v3 = divmod_(divmod_(tt, d)[0], u3)[1]
        Np = n1 + n2 + len(d) - 1
        if not sextic:
            while len(u3) - 1 > 2:
                u3 = monic(divmod_(sub(F, mul(v3, v3)), u3)[0])
                v3 = divmod_([NEG[c] for c in v3], u3)[1]
            return (u3, v3, 0)
        while len(u3) - 1 > 2:
            u3, v3, Np = adjust(u3, v3, Np, +1)
        while True:
            Nm = 4 - (len(u3) - 1) - Np
            if Np >= 1 and Nm >= 1:
                break
            u3, v3, Np = adjust(u3, v3, Np, -1 if Np < 1 else +1)
        return (u3, v3, Np - 1)

    def neg_cls(D):
        u, v, n = D
        vneg = divmod_([NEG[c] for c in v], u)[1]
        if sextic:
            return (u, vneg, 2 - (len(u) - 1) - n)
        return (u, vneg, 0)

    return add_cls, neg_cls, ident


# ---------------------------------------------------------------------------
# Point counting and the zeta oracle
# ---------------------------------------------------------------------------


def _affine_count_code(C: HyperCurve) -> int:
    dom = C.domain
    t = dom.tables
    count = 0
    for x in range(t.q):
        val = peval(dom, C.F, x)
        count += 1 if val == 0 else len(t.sqrt[val])
    return count


def points_at_infinity(C: HyperCurve) -> int:
    dom = C.domain
    if C.degree == 5:
        return 1
    lc = C.F[-1]
    if hasattr(dom, "tables"):
        return 2 if dom.tables.is_sq[lc] else 0
    raise JacError("infinity counting needs a finite field")


def curve_count(C: HyperCurve) -> int:
    return _affine_count_code(C) + points_at_infinity(C)


def _count_over_quadratic_ext(C: HyperCurve) -> int:
    dom = C.domain
    ext = ff.quadratic_extension(dom.field)
    coeffs = [ext.embed(c) for c in C.F]
    count = 2 if C.degree == 6 else 1  # lc is always a square in F_{q^2}
    zero = ext.zero
    for x in ext.elements():
        acc = zero
        for c in reversed(coeffs):
            acc = ext.add(ext.mul(acc, x), c)
        if acc == zero:
            count += 1
        elif ext.is_square(acc):
            count += 2
    return count


def zeta_order(C: HyperCurve):
    """(N1, N2, L-polynomial coefficients, #J(F_q)) by direct point counts.

    The degree-4 L-polynomial is pinned by N1, N2 and the functional
    equation; #J = L(1).  Integer Weil inequalities are asserted."""
    q = C.domain.q
    N1 = curve_count(C)
    N2 = _count_over_quadratic_ext(C)
    s1 = q + 1 - N1
    s2 = q * q + 1 - N2
    assert (s1 * s1 - s2) % 2 == 0
    e1, e2 = s1, (s1 * s1 - s2) // 2
    assert e1 * e1 <= 16 * q and abs(e2) <= 6 * q
    L = (1, -e1, e2, -q * e1, q * q)
    nJ = 1 - e1 + e2 - q * e1 + q * q
    twisted = 1 + e1 + e2 + q * e1 + q * q  # L(-1), the quadratic-twist order
    return N1, N2, L, nJ, twisted


# ---------------------------------------------------------------------------
# Class enumeration and group structure
# ---------------------------------------------------------------------------


def rational_points_code(C: HyperCurve) -> list:
    """Affine points as (x, y) codes, plus synthetic infinity markers."""
    dom = C.domain
    t = dom.tables
    pts = []
    for x in range(t.q):
        val = peval(dom, C.F, x)
        if val == 0:
            pts.append((x, 0))
        else:
            for y in t.sqrt[val]:
                pts.append((x, y))
    if C.degree == 5:
        pts.append(("inf", 0))
    else:
        for s in (1, -1):
            pts.append(("inf", s))
    return pts


def _pair_to_class(C: HyperCurve, P, Q):
    """The class [P + Q - (canonical degree-2)] for rational points P, Q,
    or None when the pair lies on the line."""
    dom = C.domain
    t = dom.tables
    sextic = C.degree == 6
    if P[0] == "inf" and Q[0] == "inf":
        if not sextic:
            return None  # 2*infinity is the fiber at infinity
        if P[1] != Q[1]:
            return None  # the fiber at infinity
        return ((dom.one,), (), 2 if P[1] == 1 else 0)
    if P[0] == "inf" or Q[0] == "inf":
        if P[0] == "inf":
            P, Q = Q, P
        x, y = P
        u = (t.neg[x], 1)
        v = (y,)
        if not sextic:
            return (u, pmod(dom, v, u), 0)
        return (u, pmod(dom, v, u), 1 if Q[1] == 1 else 0)
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2:
        if y1 != y2:
            return None  # P + iota(P): the fiber at x1
        if y1 == 0:
            return None  # doubled Weierstrass point, also a fiber
        # tangent interpolation at a doubled point
        u = pmul(dom, (t.neg[x1], 1), (t.neg[x1], 1))
        fp = peval(dom, poly.pderiv(dom, C.F), x1)
        lam = dom.div(fp, t.add[y1][y1])
        v = padd(dom, (y1,), pmul(dom, (lam,), (t.neg[x1], 1)))
        return (u, pmod(dom, v, u), 0)
    u = pmul(dom, (t.neg[x1], 1), (t.neg[x2], 1))
    lam = dom.div(t.add[y2][t.neg[y1]], t.add[x2][t.neg[x1]])
    v = padd(dom, (y1,), pmul(dom, (lam,), (t.neg[x1], 1)))
    return (u, pmod(dom, v, u), 0)


def _conjugate_pair_classes(C: HyperCurve):
    """Classes from conjugate pairs of quadratic points (x not rational)."""
    dom = C.domain
    t = dom.tables
    ext = ff.quadratic_extension(dom.field)
    coeffs = [ext.embed(c) for c in C.F]
    out = []
    seen = set()
    for x in ext.elements():
        if x[1] == 0 or x in seen:
            continue
        seen.add(x)
        seen.add(ext.conj(x))
        acc = ext.zero
        for c in reversed(coeffs):
            acc = ext.add(ext.mul(acc, x), c)
        # minimal polynomial of x over F_q
        tr = t.add[x[0]][x[0]]  # x + conj(x) = 2*x0
        nm = t.add[t.mul[x[0]][x[0]]][t.neg[t.mul[t.mul[ext.r][x[1]]][x[1]]]]
        u = (nm, t.neg[tr], 1)
        if acc == ext.zero:
            out.append((u, (), 0))
            continue
        y = ext.sqrt(acc)
        if y is None:
            continue
        for yy in (y, ext.neg(y)):
            a = t.mul[yy[1]][t.inv[x[1]]]
            b = t.add[yy[0]][t.neg[t.mul[a][x[0]]]]
            v = pnormalize(dom, (b, a))
            assert not pmod(dom, psub(dom, pmul(dom, v, v), C.F), u)
            out.append((u, v, 0))
    return out


_CLASS_CACHE: dict = {}


def all_classes(C: HyperCurve) -> list:
    """Every reduced divisor class over F_q, cross-checked against zeta.
    Cached per (field, model) since enumeration dominates repeated censuses."""
    key = (id(C.domain), C.F)
    hit = _CLASS_CACHE.get(key)
    if hit is not None:
        return hit
    out = _all_classes_uncached(C)
    _CLASS_CACHE[key] = out
    return out


def _all_classes_uncached(C: HyperCurve) -> list:
    dom = C.domain
    pts = rational_points_code(C)
    classes = {C.identity()}
    for i, P in enumerate(pts):
        for Q in pts[i:]:
            cl = _pair_to_class(C, P, Q)
            if cl is not None:
                classes.add(cl)
    for cl in _conjugate_pair_classes(C):
        classes.add(cl)
    _, _, _, nJ, _ = zeta_order(C)
    if len(classes) != nJ:
        raise ZetaMismatch(f"{C}: enumerated {len(classes)} classes, zeta says {nJ}")
    return sorted(classes)


def jac_group_structure(C: HyperCurve) -> AbGroupStructure:
    """Invariant factors of J(F_q) by enumeration + order census; the
    cardinality must match the zeta oracle exactly."""
    classes = all_classes(C)
    fast_add, _, ident = fast_jac_ops(C)
    st = structure_from_elements(classes, fast_add, ident, max_rank=4)
    q = C.domain.q
    if len(st.factors) == 4 and (q - 1) % st.factors[0] != 0:
        raise GroupError(f"Weil constraint violated: {st} over F_{q}")
    return st


# ---------------------------------------------------------------------------
# Symmetric square and "the line"
# ---------------------------------------------------------------------------


def symmetric_square_points(C: HyperCurve):
    """(line, off_line, class_map): the F_q-points of the symmetric square,
    partitioned into the P^1 of x-fibers and the rest; off-line points are
    mapped to J(F_q) and checked injective, line points map to 0.

    Counts satisfy #line = q + 1 and
    #X^(2)(F_q) = N1(N1+1)/2 + (N2-N1)/2."""
    dom = C.domain
    t = dom.tables
    q = t.q
    pts = rational_points_code(C)
    line = []
    off = []
    class_map = {}
    for i, P in enumerate(pts):
        for Q in pts[i:]:
            cl = _pair_to_class(C, P, Q)
            if cl is None:
                line.append((P, Q))
            else:
                off.append((P, Q))
                class_map[(P, Q)] = cl
    # line points with non-rational y: fibers over x with F(x) a non-square
    for x in range(q):
        val = peval(dom, C.F, x)
        if val != 0 and not t.is_sq[val]:
            line.append(((x, "conj"), (x, "conj'")))
    if C.degree == 6 and points_at_infinity(C) == 0:  # pragma: no cover
        line.append((("inf", "conj"), ("inf", "conj'")))
    conj = _conjugate_pair_classes(C)
    N1, N2, _, nJ, _ = zeta_order(C)
    total = len(line) + len(off) + len(conj)
    assert len(line) == q + 1
    assert total == N1 * (N1 + 1) // 2 + (N2 - N1) // 2
    # injectivity off the line
    images = set(class_map.values()) | set(conj)
    assert len(images) == len(off) + len(conj)
    assert C.identity() not in images
    # arithmetic spot-check: rational line pairs compose to the identity
    for P, Q in line:
        if P[1] in ("conj", "conj'"):
            continue
        _assert_line_pair_is_zero(C, P, Q)
    return line, off + [("conj", cl) for cl in conj], class_map


def _assert_line_pair_is_zero(C: HyperCurve, P, Q):
    dom = C.domain
    sextic = C.degree == 6
    pieces = []
    for idx, point in enumerate((P, Q)):
        if point[0] == "inf":
            if sextic:
                pieces.append(((dom.one,), (), 1 + (1 if point[1] == 1 else -1)))
            else:
                pieces.append(C.identity())
        else:
            x, y = point
            t = dom.tables
            u = (t.neg[x], 1)
            n = 0 if not sextic else (1 if idx else 0)
            pieces.append((u, pmod(dom, (y,), u), n))
    total = jac_add(C, pieces[0], pieces[1])
    assert total == C.identity(), (P, Q)


# ---------------------------------------------------------------------------
# 2-torsion via Weierstrass points over a multi-quadratic field
# ---------------------------------------------------------------------------


def weierstrass_orbits(F: Poly, K) -> tuple[list[int], bool]:
    """Galois orbit sizes of the Weierstrass points of y^2 = F(x) over K,
    plus an exactness flag.

    Orbits come from the rational factorization of F (complete through
    degree 3; degree >= 4 irreducible cofactors are kept whole, which can
    only undercount K-rational classes, never overcount)."""
    deg = F.degree
    if deg not in (3, 4, 5, 6):
        raise JacError("degree must be in 3..6")
    d0, _, _ = pgcdext(QQ, F.coeffs, F.derivative().coeffs)
    if pdegree(d0) > 0:
        raise JacError("F must be squarefree")
    factors = poly.low_degree_factors(F, 3)
    cof = F
    for g in factors:
        cof = cof.exact_div(g)
    orbits = []
    exact_factors = True
    for g in factors:
        if g.degree == 1:
            orbits.append(1)
        elif g.degree == 2:
            d = poly.splitting_quadratic_field(g)
            if d == 1 or K.contains_sqrt(d):
                orbits += [1, 1]
            else:
                orbits.append(2)
        else:
            orbits.append(3)
    if cof.degree > 0:
        orbits.append(cof.degree)
        if cof.degree in (4, 6):
            exact_factors = False
    if deg % 2 == 1:
        orbits.append(1)  # the infinite Weierstrass point is rational
    assert sum(orbits) == (deg if deg % 2 == 0 else deg + 1)
    has_rational = any(s == 1 for s in orbits)
    return sorted(orbits), exact_factors and has_rational


def two_torsion_galois(F: Poly, K) -> tuple[AbGroupStructure, bool]:
    """(subgroup of J(K)[2] generated by K-rational even Weierstrass subsets,
    exactness flag).

    The group of 2-torsion classes is even-size subsets modulo complements;
    Galois-stable subsets are orbit unions, and the K-rational ones form an
    elementary 2-group whose rank is counted from the orbit sizes."""
    orbits, exact = weierstrass_orbits(F, K)
    m = len(orbits)
    dim_even = m if all(s % 2 == 0 for s in orbits) else m - 1
    dim = max(dim_even - 1, 0)
    return AbGroupStructure.from_prime_exponents({2: [1] * dim}), exact


# ---------------------------------------------------------------------------
# Quadratic twists over F_p through the Frobenius kernel
# ---------------------------------------------------------------------------


def frobenius_on_class(C: HyperCurve, D):
    """The p-power Frobenius on a class over F_{p^2} (split monic models fix
    both infinite places, so the weight is unchanged)."""
    t = C.domain.tables
    u, v, n = D
    return (tuple(t.frob[c] for c in u), tuple(t.frob[c] for c in v), n)


def twisted_jac_structure(C2: HyperCurve, p: int) -> AbGroupStructure:
    """Group structure of the quadratic twist's Jacobian over F_p, computed
    inside J(F_{p^2}) as the kernel of 1 + Frobenius.

    C2 must be the model over F_{p^2}; the twist order L(-1) from the zeta
    oracle over F_p is enforced as a cross-check by the caller."""
    classes = all_classes(C2)
    fast_add, _, ident = fast_jac_ops(C2)
    kernel = [D for D in classes if fast_add(D, frobenius_on_class(C2, D)) == ident]
    return structure_from_elements(kernel, fast_add, ident, max_rank=4)


# ---------------------------------------------------------------------------
# Rational and tower-level divisor utilities (lower bounds)
# ---------------------------------------------------------------------------


def search_rational_points(F: Poly, bound: int = 60) -> list:
    """Integer points (x, y) with y^2 = F(x), |x| <= bound, y >= 0."""
    out = []
    for x in range(-bound, bound + 1):
        val = F(Fraction(x))
        y = rational_sqrt(val)
        if y is not None:
            out.append((Fraction(x), y))
    return out


def rational_curve(F: Poly, label=None) -> HyperCurve:
    return HyperCurve(QQ, F.coeffs, label)


def classes_from_rational_points(C: HyperCurve, pts) -> list:
    """Divisor classes [P + infty_- - canonical] and [P + Q - canonical] from
    affine rational points, over any exact field domain."""
    dom = C.domain
    out = []
    sextic = C.degree == 6
    for i, (x1, y1) in enumerate(pts):
        u1 = pnormalize(dom, (-x1, dom.one))
        v1 = pmod(dom, (y1,), u1)
        if sextic:
            out.append((u1, v1, 0))
            out.append((u1, v1, 1))
        else:
            out.append((u1, v1, 0))
        for (x2, y2) in pts[i:]:
            if x1 == x2:
                continue
            u = pmul(dom, (-x1, dom.one), (-x2, dom.one))
            lam = dom.div(dom.sub(y2, y1), dom.sub(x2, x1))
            v = pmod(dom, padd(dom, (y1,), pmul(dom, (lam,), (-x1, dom.one))), u)
            out.append((u, v, 0))
    if sextic:
        out.append(((dom.one,), (), 0))
        out.append(((dom.one,), (), 2))
    return out


def tower_curve(F: Poly, K, label=None) -> HyperCurve:
    dom = TowerDomain(K)
    return HyperCurve(dom, [dom.K.from_rational(c) for c in F.coeffs], label)
