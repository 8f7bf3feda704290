"""Multi-quadratic number fields as F_2-spans of squarefree integers.

A field Q(sqrt(d_1), ..., sqrt(d_n)) is stored as the reduced row-echelon
basis of the d_i viewed as F_2-vectors over the coordinates (2, 3, 5, ...,
sign), which makes equality testing canonical.  Elements of the field are
exact: 2^n rational coordinates over the basis of square roots of products
of generators.

Everything is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .intutil import (
    factorize,
    is_squarefree,
    kronecker,
    rational_sqrt,
    squarefree_part,
)


class QFieldError(ValueError):
    pass


def _vector(d: int) -> frozenset:
    """d (squarefree, not 0 or 1) as a set of F_2 coordinates; -1 is the sign."""
    coords = set(factorize(abs(d)))
    if d < 0:
        coords.add(-1)
    return frozenset(coords)


def _unvector(v: frozenset) -> int:
    out = -1 if -1 in v else 1
    for p in v:
        if p != -1:
            out *= p
    return out


def _coord_key(c: int):
    # primes ascending, sign coordinate last
    return (1, 0) if c == -1 else (0, c)


def _echelon(vectors: list[frozenset]) -> list[frozenset]:
    """Reduced row echelon form over F_2; rows sorted by pivot."""
    rows: list[frozenset] = []
    for v in vectors:
        for r in rows:
            piv = min(r, key=_coord_key)
            if piv in v:
                v = v ^ r
        if v:
            rows.append(v)
            rows.sort(key=lambda r: _coord_key(min(r, key=_coord_key)))
            # re-reduce fully for uniqueness
            changed = True
            while changed:
                changed = False
                for i, ri in enumerate(rows):
                    piv = min(ri, key=_coord_key)
                    for j, rj in enumerate(rows):
                        if i != j and piv in rj:
                            rows[j] = rj ^ ri
                            changed = True
                rows = [r for r in rows if r]
                rows.sort(key=lambda r: _coord_key(min(r, key=_coord_key)))
    return rows


class MultiQuadField:
    """Q(sqrt(d) : d in gens).  Q itself is the empty field `QQ_FIELD`."""

    def __init__(self, gens=()):
        vecs = []
        for d in gens:
            if d in (0, 1):
                raise QFieldError(f"generator {d} not allowed")
            if not is_squarefree(d):
                raise QFieldError(f"generator {d} is not squarefree")
            vecs.append(_vector(d))
        rows = _echelon(vecs)
        self.gens: tuple[int, ...] = tuple(
            sorted((_unvector(r) for r in rows), key=lambda d: (abs(d), d < 0))
        )
        self._rows = _echelon([_vector(d) for d in self.gens])

    @property
    def degree(self) -> int:
        return 2 ** len(self.gens)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiQuadField) and self.gens == other.gens

    def __hash__(self) -> int:
        return hash(self.gens)

    def __repr__(self) -> str:
        if not self.gens:
            return "Q"
        return "Q(" + ", ".join(f"sqrt({d})" for d in self.gens) + ")"

    def contains_sqrt(self, d: int) -> bool:
        """True iff sqrt(d) lies in the field (d squarefree, nonzero)."""
        if d == 0 or not is_squarefree(d):
            raise QFieldError(f"{d} is not a nonzero squarefree integer")
        if d == 1:
            return True
        v = _vector(d)
        for r in self._rows:
            if min(r, key=_coord_key) in v:
                v = v ^ r
        return not v

    def span(self) -> list[int]:
        """All squarefree d with sqrt(d) in the field, including 1.
        Sorted by (|d|, sign); cardinality 2^n."""
        out = []
        n = len(self.gens)
        for mask in range(2**n):
            d = 1
            for i in range(n):
                if mask >> i & 1:
                    d *= self.gens[i]
            out.append(squarefree_part(d) if d != 1 else 1)
        return sorted(set(out), key=lambda d: (abs(d), d < 0))

    def signature(self) -> tuple[int, ...]:
        """Canonical identity of the field: its full sorted span."""
        return tuple(self.span())

    def subfield_of(self, other: "MultiQuadField") -> bool:
        return all(other.contains_sqrt(d) for d in self.gens)

    # -- number-theoretic structure -------------------------------------

    def cyclotomic_intersection(self, n: int) -> "MultiQuadField":
        """The subfield of elements lying in the n-th cyclotomic field.

        Q(sqrt(d)) lies in Q(zeta_n) iff |disc| divides n, where
        disc = d for d = 1 mod 4 and 4d otherwise.
        """
        if n < 1:
            raise QFieldError("n must be positive")
        keep = []
        for d in self.span():
            if d == 1:
                continue
            disc = d if d % 4 == 1 else 4 * d
            if n % abs(disc) == 0:
                keep.append(d)
        return MultiQuadField(keep)

    def residue_degree(self, p: int) -> tuple[int, bool]:
        """(f, ramified) for any prime of the field above the odd prime p.

        f = 2 iff some d in the span with p not dividing d is a non-residue
        mod p; ramified iff p divides some d in the span.
        """
        if p == 2 or not _is_odd_prime(p):
            raise QFieldError(f"{p} is not an odd prime")
        ramified = any(d % p == 0 for d in self.span() if d != 1)
        f = 1
        for d in self.span():
            if d != 1 and d % p != 0 and kronecker(d, p) == -1:
                f = 2
                break
        return f, ramified

    def twist_classes(self) -> list[int]:
        """The full span including the trivial twist 1."""
        return self.span()

    # -- elements --------------------------------------------------------

    def zero(self) -> "TowerElem":
        return TowerElem(self, (Fraction(0),) * self.degree)

    def one(self) -> "TowerElem":
        return self.from_rational(Fraction(1))

    def from_rational(self, x) -> "TowerElem":
        coords = [Fraction(0)] * self.degree
        coords[0] = Fraction(x)
        return TowerElem(self, tuple(coords))

    def sqrt_gen(self, d: int) -> "TowerElem":
        """The element sqrt(d) for d in the span (d squarefree)."""
        if d == 1:
            return self.one()
        if not self.contains_sqrt(d):
            raise QFieldError(f"sqrt({d}) not in {self}")
        # find the subset of generators whose product has squarefree part d,
        # then sqrt(d) = sqrt(prod) / sqrt(prod/d) with rational cofactor
        n = len(self.gens)
        for mask in range(2**n):
            prod = 1
            for i in range(n):
                if mask >> i & 1:
                    prod *= self.gens[i]
            if prod != 1 and squarefree_part(prod) == d or (prod == 1 and d == 1):
                cof = rational_sqrt(Fraction(prod, d))
                assert cof is not None
                coords = [Fraction(0)] * self.degree
                coords[mask] = 1 / cof
                return TowerElem(self, tuple(coords))
        raise QFieldError(f"sqrt({d}) not found")  # pragma: no cover


QQ_FIELD = MultiQuadField(())


def _is_odd_prime(p: int) -> bool:
    from .intutil import is_prime

    return p % 2 == 1 and is_prime(p)


@dataclass(frozen=True)
class TowerElem:
    """Element of a MultiQuadField: coords[S] multiplies prod_{i in S} sqrt(g_i),
    S running over bitmasks of the generator list."""

    field: MultiQuadField
    coords: tuple[Fraction, ...]

    def _check(self, other: "TowerElem") -> None:
        if self.field != other.field:
            raise QFieldError("mixed-field arithmetic")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise QFieldError("not a rational element")
        return self.coords[0]

    def __add__(self, other):
        self._check(other)
        return TowerElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return TowerElem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return TowerElem(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        self._check(other)
        n = self.field.degree
        gens = self.field.gens
        out = [Fraction(0)] * n
        nz_self = [(s, c) for s, c in enumerate(self.coords) if c]
        nz_other = [(t, c) for t, c in enumerate(other.coords) if c]
        for s, cs in nz_self:
            for t, ct in nz_other:
                m = s & t
                scale = cs * ct
                for i in range(m.bit_length()):
                    if m >> i & 1:
                        scale *= gens[i]
                out[s ^ t] += scale
        return TowerElem(self.field, tuple(out))

    def conjugate(self, signs: tuple[int, ...]) -> "TowerElem":
        """Galois conjugation; signs[i] = -1 flips sqrt(gens[i])."""
        if len(signs) != len(self.field.gens) or any(s not in (1, -1) for s in signs):
            raise QFieldError("signs must be a tuple of +-1 per generator")
        out = list(self.coords)
        for mask in range(self.field.degree):
            flip = 1
            for i in range(len(signs)):
                if mask >> i & 1 and signs[i] == -1:
                    flip = -flip
            if flip == -1:
                out[mask] = -out[mask]
        return TowerElem(self.field, tuple(out))

    def inverse(self) -> "TowerElem":
        if self.is_zero():
            raise QFieldError("division by zero")
        # norm down one generator at a time: a = x + y*sqrt(d_top)
        return _inverse_rec(self, len(self.field.gens))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> "TowerElem":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def norm_to_q(self) -> Fraction:
        """Product of all Galois conjugates."""
        out = self.field.one()
        n = len(self.field.gens)
        for mask in range(2**n):
            signs = tuple(-1 if mask >> i & 1 else 1 for i in range(n))
            out = out * self.conjugate(signs)
        assert out.is_rational()
        return out.rational_value()

    def support_gens(self) -> "MultiQuadField":
        """Smallest multi-quadratic subfield containing this element."""
        ds = []
        gens = self.field.gens
        for mask, c in enumerate(self.coords):
            if c and mask:
                prod = 1
                for i in range(mask.bit_length()):
                    if mask >> i & 1:
                        prod *= gens[i]
                ds.append(squarefree_part(prod))
        return MultiQuadField(ds)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        gens = self.field.gens
        for mask, c in enumerate(self.coords):
            if not c:
                continue
            if mask == 0:
                parts.append(str(c))
            else:
                prod = 1
                for i in range(mask.bit_length()):
                    if mask >> i & 1:
                        prod *= gens[i]
                mon = f"sqrt({prod})"
                parts.append(mon if c == 1 else f"{c}*{mon}")
        return " + ".join(parts)


def _split_top(a: TowerElem, level: int) -> tuple[TowerElem, TowerElem]:
    """Write a = x + y*sqrt(g_level) with x, y in the subfield of lower gens."""
    sub = MultiQuadField(a.field.gens[:level])
    half = 2**level
    x = TowerElem(sub, tuple(a.coords[:half]))
    y = TowerElem(sub, tuple(a.coords[half : 2 * half]))
    return x, y


def _join_top(x: TowerElem, y: TowerElem, field: MultiQuadField) -> TowerElem:
    return TowerElem(field, tuple(x.coords) + tuple(y.coords))


def _inverse_rec(a: TowerElem, level: int) -> TowerElem:
    if level == 0:
        return TowerElem(a.field, (1 / a.coords[0],))
    x, y = _split_top(a, level - 1)
    d = a.field.gens[level - 1]
    sub = x.field
    dd = sub.from_rational(d)
    norm = x * x - dd * (y * y)
    ninv = _inverse_rec(norm, level - 1)
    num_x = x * ninv
    num_y = -(y * ninv)
    return _join_top(num_x, num_y, a.field)


def sqrt_in_tower(v: TowerElem) -> TowerElem | None:
    """A square root of v in its own field, or None.

    Recursive over the tower: in F(sqrt(d)), v = x + y*sqrt(d) is a square iff
    either y = 0 and x or x/d is a square below, or norm(v) = m^2 below and one
    of (x+m)/2, (x-m)/2 is a square u^2 below (then v = (u + y/(2u) sqrt(d))^2).
    Branches are explored in a fixed order; the first witness wins.
    """
    return _sqrt_rec(v, len(v.field.gens))


def _sqrt_rec(v: TowerElem, level: int) -> TowerElem | None:
    field = v.field
    if level == 0:
        r = rational_sqrt(v.coords[0])
        return None if r is None else TowerElem(field, (r,))
    x, y = _split_top(v, level - 1)
    sub = x.field
    d = field.gens[level - 1]
    dd = sub.from_rational(d)
    if y.is_zero():
        s = _sqrt_rec(x, level - 1)
        if s is not None:
            return _join_top(s, sub.zero(), field)
        s = _sqrt_rec(x / dd, level - 1)
        if s is not None:
            return _join_top(sub.zero(), s, field)
        return None
    norm = x * x - dd * (y * y)
    m = _sqrt_rec(norm, level - 1)
    if m is None:
        return None
    two = sub.from_rational(2)
    for mm in (m, -m):
        t = (x + mm) / two
        u = _sqrt_rec(t, level - 1)
        if u is not None and not u.is_zero():
            w = y / (two * u)
            cand = _join_top(u, w, field)
            if cand * cand == v:
                return cand
    return None


def hyperplane_avoiding(n: int, x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    """A linear functional phi over F_2 with phi(x) = phi(y) = 1.

    Its kernel is a hyperplane through 0 missing both x and y; exists for any
    distinct nonzero x, y in F_2^n, n >= 2.
    """
    if n < 2 or len(x) != n or len(y) != n:
        raise QFieldError("need n >= 2 and vectors of length n")
    x = tuple(c & 1 for c in x)
    y = tuple(c & 1 for c in y)
    if not any(x) or not any(y):
        raise QFieldError("vectors must be nonzero")
    if x == y:
        raise QFieldError("vectors must be distinct")
    phi = [0] * n
    shared = [j for j in range(n) if x[j] and y[j]]
    if shared:
        phi[shared[0]] = 1
    else:
        phi[next(j for j in range(n) if x[j])] = 1
        phi[next(j for j in range(n) if y[j])] = 1
    return tuple(phi)


def parse_field(literal: str) -> MultiQuadField:
    """Parse a CLI/config field literal: "Q" or comma-separated generators."""
    s = literal.strip()
    if s in ("Q", "q", ""):
        return QQ_FIELD
    try:
        gens = [int(part) for part in s.split(",")]
    except ValueError as exc:
        raise QFieldError(f"bad field literal {literal!r}") from exc
    return MultiQuadField(gens)


def all_subfields(gens: tuple[int, ...]) -> list[MultiQuadField]:
    """Every distinct multi-quadratic field spanned by a subset of gens."""
    seen = {}
    for r in range(len(gens) + 1):
        for combo in combinations(gens, r):
            K = MultiQuadField(combo)
            seen.setdefault(K.signature(), K)
    return [seen[k] for k in sorted(seen)]
