"""Exact arithmetic in F_p and F_{p^2} for odd primes p.

F_{p^2} is realized as F_p[t]/(t^2 - r) where r is the first quadratic
non-residue in the scan order -1, 2, 3, ..., so element printing and
enumeration are reproducible.  A generic degree-2 extension of an arbitrary
finite field (needed to count points over F_{q^2} when q is already p^2)
is provided by `quadratic_extension`.

All values are immutable; everything here is safe to share between threads,
and element enumeration may be partitioned freely for parallel scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .intutil import is_prime


class FieldError(ValueError):
    """Bad field construction, mixed-field arithmetic, or division by zero."""


@dataclass(frozen=True)
class FieldDesc:
    """A prime field (k=1) or its quadratic extension (k=2, t^2 = r)."""

    p: int
    k: int
    r: int | None = None

    @property
    def order(self) -> int:
        return self.p**self.k

    def zero(self) -> "FqElem":
        return FqElem(self, 0, 0)

    def one(self) -> "FqElem":
        return FqElem(self, 1, 0)

    def gen(self) -> "FqElem":
        if self.k != 2:
            raise FieldError("t exists only in quadratic extensions")
        return FqElem(self, 0, 1)

    def elem(self, c0: int, c1: int = 0) -> "FqElem":
        if self.k == 1 and c1 % self.p != 0:
            raise FieldError("prime field element with t component")
        return FqElem(self, c0 % self.p, c1 % self.p)

    def from_int(self, n: int) -> "FqElem":
        return FqElem(self, n % self.p, 0)

    def elements(self):
        """All p^k elements, c1-major then c0."""
        if self.k == 1:
            for c0 in range(self.p):
                yield FqElem(self, c0, 0)
        else:
            for c1 in range(self.p):
                for c0 in range(self.p):
                    yield FqElem(self, c0, c1)

    def __repr__(self) -> str:
        if self.k == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^2(t^2={self.r})"


def make_field(p: int, k: int) -> FieldDesc:
    """Construct F_{p^k} for odd prime p and k in {1, 2}."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if p == 2:
        raise FieldError("even characteristic unsupported")
    if k not in (1, 2):
        raise FieldError(f"extension degree {k} not in {{1, 2}}")
    if k == 1:
        return FieldDesc(p, 1)
    for r in (-1, *range(2, p)):
        if pow(r % p, (p - 1) // 2, p) == p - 1:
            return FieldDesc(p, 2, r)
    raise FieldError(f"no quadratic non-residue mod {p}")  # pragma: no cover


@dataclass(frozen=True)
class FqElem:
    """Element c0 + c1*t of F_{p^k} (c1 = 0 when k = 1)."""

    field: FieldDesc
    c0: int
    c1: int

    def _check(self, other: "FqElem") -> None:
        if not isinstance(other, FqElem) or other.field != self.field:
            raise FieldError("mixed-field arithmetic")

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def __add__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        p = self.field.p
        return FqElem(self.field, (self.c0 + other.c0) % p, (self.c1 + other.c1) % p)

    def __sub__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        p = self.field.p
        return FqElem(self.field, (self.c0 - other.c0) % p, (self.c1 - other.c1) % p)

    def __neg__(self) -> "FqElem":
        p = self.field.p
        return FqElem(self.field, -self.c0 % p, -self.c1 % p)

    def __mul__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        p = self.field.p
        if self.field.k == 1:
            return FqElem(self.field, self.c0 * other.c0 % p, 0)
        r = self.field.r % p
        c0 = (self.c0 * other.c0 + r * self.c1 * other.c1) % p
        c1 = (self.c0 * other.c1 + self.c1 * other.c0) % p
        return FqElem(self.field, c0, c1)

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise FieldError("division by zero")
        p = self.field.p
        if self.field.k == 1:
            return FqElem(self.field, pow(self.c0, p - 2, p), 0)
        r = self.field.r % p
        norm = (self.c0 * self.c0 - r * self.c1 * self.c1) % p
        ninv = pow(norm, p - 2, p)
        return FqElem(self.field, self.c0 * ninv % p, -self.c1 * ninv % p)

    def __truediv__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> "FqElem":
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

    def frobenius(self) -> "FqElem":
        """x -> x^p; conjugation c0 - c1*t on F_{p^2}, identity on F_p."""
        return FqElem(self.field, self.c0, -self.c1 % self.field.p)

    def __repr__(self) -> str:
        if self.field.k == 1 or self.c1 == 0:
            return f"{self.c0}"
        if self.c0 == 0:
            return f"{self.c1}t"
        return f"{self.c0}+{self.c1}t"


def arith(a: FqElem, b: FqElem | None, op: str) -> FqElem:
    """String-dispatched arithmetic; `frobenius` ignores b."""
    if op == "frobenius":
        return a.frobenius()
    if b is None:
        raise FieldError(f"operation {op} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        if b.c1 != 0:
            raise FieldError("exponent must lie in the prime field")
        return a ** b.c0
    raise FieldError(f"unknown operation {op}")


def is_square(a: FqElem) -> bool:
    """Euler criterion in F_p; norm-then-base test in F_{p^2}."""
    if a.is_zero():
        return True
    p = a.field.p
    if a.field.k == 1:
        return pow(a.c0, (p - 1) // 2, p) == 1
    r = a.field.r % p
    norm = (a.c0 * a.c0 - r * a.c1 * a.c1) % p
    return pow(norm, (p - 1) // 2, p) == 1


def _sqrt_mod_p(a: int, p: int) -> int | None:
    """Tonelli-Shanks; returns one root or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p-1 = q * 2^s
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, rt = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, rt = t * c % p, rt * b % p
    return rt


def sqrt(a: FqElem) -> tuple[FqElem, FqElem] | None:
    """Both square roots (s, -s) of a, or None.  s is the root whose
    enumeration code is smallest, so the result is deterministic."""
    field = a.field
    p = field.p
    if a.is_zero():
        return (field.zero(), field.zero())
    if field.k == 1:
        s = _sqrt_mod_p(a.c0, p)
        if s is None:
            return None
        root = FqElem(field, s, 0)
    else:
        r = field.r % p
        if a.c1 == 0:
            s = _sqrt_mod_p(a.c0, p)
            if s is not None:
                root = FqElem(field, s, 0)
            else:
                # a = (w t)^2 with w^2 = a / r; a, r both non-residues
                w = _sqrt_mod_p(a.c0 * pow(r, p - 2, p) % p, p)
                if w is None:
                    return None
                root = FqElem(field, 0, w)
        else:
            norm = (a.c0 * a.c0 - r * a.c1 * a.c1) % p
            n = _sqrt_mod_p(norm, p)
            if n is None:
                return None
            inv2 = pow(2, p - 2, p)
            root = None
            for nn in (n, (-n) % p):
                x2 = (a.c0 + nn) * inv2 % p
                x = _sqrt_mod_p(x2, p)
                if x is not None and x != 0:
                    y = a.c1 * inv2 % p * pow(x, p - 2, p) % p
                    root = FqElem(field, x, y)
                    break
            if root is None:
                return None
    neg = -root
    if _code(neg) < _code(root):
        root, neg = neg, root
    assert (root * root) == a
    return (root, neg)


def _code(a: FqElem) -> int:
    return a.c0 + a.c1 * a.field.p


# ---------------------------------------------------------------------------
# Int-coded tables: the fast computation layer used by the curve modules.
# Elements of F_{p^k} are coded as c0 + c1*p, matching enumeration order.
# ---------------------------------------------------------------------------


class Tables:
    """Precomputed arithmetic tables for one F_{p^k}, q <= a few hundred."""

    def __init__(self, field: FieldDesc):
        self.field = field
        q = field.order
        self.q = q
        p = field.p
        self.p = p
        elems = list(field.elements())
        self.elems = elems
        self.add = [[_code(a + b) for b in elems] for a in elems]
        self.mul = [[_code(a * b) for b in elems] for a in elems]
        self.neg = [_code(-a) for a in elems]
        self.inv = [0] + [_code(a.inverse()) for a in elems[1:]]
        self.frob = [_code(a.frobenius()) for a in elems]
        self.sqrt: list[tuple[int, ...]] = [() for _ in range(q)]
        for a in elems:
            s = _code(a * a)
            cur = self.sqrt[s]
            if _code(a) not in cur:
                self.sqrt[s] = tuple(sorted((*cur, _code(a))))
        self.is_sq = [bool(self.sqrt[i]) or i == 0 for i in range(q)]

    def code(self, a: FqElem) -> int:
        return _code(a)

    def decode(self, i: int) -> FqElem:
        return self.elems[i]

    def from_int(self, n: int) -> int:
        return n % self.p

    def pow(self, a: int, n: int) -> int:
        out = 1
        mul = self.mul
        while n:
            if n & 1:
                out = mul[out][a]
            a = mul[a][a]
            n >>= 1
        return out


@lru_cache(maxsize=None)
def tables(field: FieldDesc) -> Tables:
    return Tables(field)


class QuadExt:
    """Degree-2 extension of a table field, elements coded as (a, b) pairs
    meaning a + b*u with u^2 = r, r a fixed non-residue of the base.

    Only what point counting needs: ring ops, squares, square roots, and the
    base-Frobenius conjugation.  Orders up to 169^2 stay comfortably exact.
    """

    def __init__(self, base: Tables):
        self.base = base
        self.order = base.q**2
        r = None
        for i in range(1, base.q):
            if not base.is_sq[i]:
                r = i
                break
        if r is None:
            raise FieldError("base field has no non-residue")  # pragma: no cover
        self.r = r
        self.zero = (0, 0)
        self.one = (1, 0)
        sqrts: dict[tuple[int, int], tuple[int, int]] = {}
        for x in self.elements():
            s = self.mul(x, x)
            if s not in sqrts:
                sqrts[s] = x
        self._sqrts = sqrts

    def elements(self):
        for b in range(self.base.q):
            for a in range(self.base.q):
                yield (a, b)

    def embed(self, a: int) -> tuple[int, int]:
        return (a, 0)

    def add(self, x, y):
        ba = self.base.add
        return (ba[x[0]][y[0]], ba[x[1]][y[1]])

    def neg(self, x):
        bn = self.base.neg
        return (bn[x[0]], bn[x[1]])

    def mul(self, x, y):
        ba, bm = self.base.add, self.base.mul
        a, b = x
        c, d = y
        return (ba[bm[a][c]][bm[self.r][bm[b][d]]], ba[bm[a][d]][bm[b][c]])

    def is_square(self, x) -> bool:
        return x in self._sqrts or x == (0, 0)

    def sqrt(self, x):
        if x == (0, 0):
            return (0, 0)
        return self._sqrts.get(x)

    def conj(self, x):
        """The base-field Frobenius x -> x^q: a + b*u -> a - b*u."""
        return (x[0], self.base.neg[x[1]])


@lru_cache(maxsize=None)
def quadratic_extension(field: FieldDesc) -> QuadExt:
    return QuadExt(tables(field))
