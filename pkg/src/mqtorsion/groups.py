"""Invariant-factor decompositions of finite abelian groups, and the census
that recovers them from explicit element enumerations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .intutil import factorize


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class AbGroupStructure:
    """[d1, d2, ...] with d1 | d2 | ... ; the trivial group is []."""

    factors: tuple[int, ...]

    def __post_init__(self):
        fs = self.factors
        if any(d < 2 for d in fs):
            raise GroupError("invariant factors must be >= 2")
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise GroupError(f"{list(fs)} is not a divisibility chain")

    @classmethod
    def trivial(cls) -> "AbGroupStructure":
        return cls(())

    @classmethod
    def cyclic(cls, n: int) -> "AbGroupStructure":
        return cls((n,)) if n > 1 else cls(())

    @classmethod
    def from_summands(cls, ns) -> "AbGroupStructure":
        """Canonicalize an arbitrary direct sum of Z/n's."""
        prime_exps: dict[int, list[int]] = {}
        for n in ns:
            if n == 1:
                continue
            for p, e in factorize(n).items():
                prime_exps.setdefault(p, []).append(e)
        return cls.from_prime_exponents(prime_exps)

    @classmethod
    def from_prime_exponents(cls, prime_exps: dict[int, list[int]]) -> "AbGroupStructure":
        """prime_exps[p] = exponent multiset of the p-Sylow decomposition."""
        cleaned = {p: sorted(e for e in es if e > 0) for p, es in prime_exps.items()}
        cleaned = {p: es for p, es in cleaned.items() if es}
        width = max((len(es) for es in cleaned.values()), default=0)
        factors = []
        for i in range(width):
            d = 1
            for p, es in cleaned.items():
                # align largest exponents into the last slot
                j = len(es) - width + i
                if j >= 0:
                    d *= p ** es[j]
            factors.append(d)
        return cls(tuple(f for f in factors if f > 1))

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.factors, 1)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    def rank(self) -> int:
        return len(self.factors)

    def prime_exponents(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for d in self.factors:
            for p, e in factorize(d).items():
                out.setdefault(p, []).append(e)
        return {p: sorted(es) for p, es in out.items()}

    def ell_part(self, ell: int) -> "AbGroupStructure":
        es = self.prime_exponents().get(ell, [])
        return AbGroupStructure.from_prime_exponents({ell: es})

    def odd_part(self) -> "AbGroupStructure":
        pe = {p: es for p, es in self.prime_exponents().items() if p != 2}
        return AbGroupStructure.from_prime_exponents(pe)

    def embeds_in(self, other: "AbGroupStructure") -> bool:
        """Componentwise prime-power comparison of sorted exponent vectors."""
        mine = self.prime_exponents()
        theirs = other.prime_exponents()
        for p, es in mine.items():
            os = theirs.get(p, [])
            if len(es) > len(os):
                return False
            for a, b in zip(reversed(es), reversed(os)):
                if a > b:
                    return False
        return True

    def direct_sum(self, other: "AbGroupStructure") -> "AbGroupStructure":
        return AbGroupStructure.from_summands(self.factors + other.factors)

    def __str__(self) -> str:
        return "[" + ", ".join(str(d) for d in self.factors) + "]"


def structure_from_elements(
    elements, add, identity, expected_order: int | None = None, max_rank: int | None = None
) -> AbGroupStructure:
    """Invariant factors of a finite abelian group given all its elements.

    Counts, for each prime ell | order and each i, the ell^i-torsion by
    repeatedly applying multiplication-by-ell with memoized layers; the counts
    determine the ell-Sylow partition.  Exact, no randomness.
    """
    n = len(elements)
    if expected_order is not None and n != expected_order:
        raise GroupError(f"element count {n} != expected order {expected_order}")
    prime_exps: dict[int, list[int]] = {}
    for ell, e_max in factorize(n).items():
        if e_max == 1:
            prime_exps[ell] = [1]
            continue
        counts = [1]  # |G[ell^0]|
        layer: dict = {}
        for x in elements:
            layer[x] = layer.get(x, 0) + 1
        for _ in range(e_max):
            nxt: dict = {}
            for x, c in layer.items():
                y = _scalar(ell, x, add, identity)
                nxt[y] = nxt.get(y, 0) + c
            layer = nxt
            counts.append(layer.get(identity, 0))
            if counts[-1] == counts[-2]:
                break
        # counts[i] = ell^{sum_j min(i, lam_j)}; differences give the partition
        ranks = []
        for i in range(1, len(counts)):
            ratio = counts[i] // counts[i - 1]
            r = 0
            while ratio > 1:
                ratio //= ell
                r += 1
            ranks.append(r)  # number of lam_j >= i
        partition: list[int] = []
        for i, r in enumerate(ranks, start=1):
            while len(partition) < r:
                partition.append(0)
            for j in range(r):
                partition[j] = i
        prime_exps[ell] = sorted(partition)
    out = AbGroupStructure.from_prime_exponents(prime_exps)
    if out.order != n:
        raise GroupError(f"census inconsistent: structure {out} vs order {n}")
    if max_rank is not None and out.rank() > max_rank:
        raise GroupError(f"rank {out.rank()} exceeds bound {max_rank}")
    return out


def _scalar(n, x, add, identity):
    if n == 0:
        return identity
    base = x
    while not n & 1:
        base = add(base, base)
        n >>= 1
    out = base
    n >>= 1
    while n:
        base = add(base, base)
        if n & 1:
            out = add(out, base)
        n >>= 1
    return out


def subgroup_span(generators, add, neg, identity, cap: int | None = None):
    """All elements generated by `generators`; None if the span exceeds cap."""
    seen = {identity}
    frontier = [identity]
    gens = []
    for g in generators:
        gens.append(g)
        gens.append(neg(g))
    for g in gens:
        if g not in seen:
            seen.add(g)
            frontier.append(g)
    changed = True
    while changed:
        changed = False
        for g in gens:
            for x in list(seen):
                y = add(x, g)
                if y not in seen:
                    seen.add(y)
                    changed = True
                    if cap is not None and len(seen) > cap:
                        return None
    return seen
