"""Existence criteria for elliptic curves with prescribed torsion over a
multi-quadratic field, conditioned on Jacobian rank data through the twist
decomposition, plus the finitely many exceptional curves over quadratic
fields and their independent verification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import ellcurve, mwtors, poly
from .groups import AbGroupStructure
from .intutil import factorize, is_prime, kronecker
from .poly import QQ, Poly, TowerDomain
from .qfield import MultiQuadField, sqrt_in_tower


class ClassifyError(ValueError):
    pass


class VerificationError(RuntimeError):
    """An exceptional-curve check failed; carries the offending step."""


TARGETS = {
    "11": "X1(11)",
    "13": "X1(13)",
    "14": "X1(14)",
    "15": "X1(15)",
    "16": "X1(16)",
    "18": "X1(18)",
    "2x10": "X1(2,10)",
    "2x12": "X1(2,12)",
    "3x9": "X1(3,9)",
    "4x8": "X1(4,8)",
    "6x6": "X1(6,6)",
}

ONE_WAY = {"13", "16", "18"}  # existence implies positive rank, not conversely


def target_group(spec: str) -> AbGroupStructure:
    if "x" in spec:
        a, b = spec.split("x")
        return AbGroupStructure.from_summands([int(a), int(b)])
    return AbGroupStructure.cyclic(int(spec))


# ---------------------------------------------------------------------------
# Rank tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankTable:
    """(jacobian label, squarefree twist) -> rank, with mandatory sources."""

    entries: tuple

    @classmethod
    def from_records(cls, records) -> "RankTable":
        seen = {}
        for rec in records:
            if "source" not in rec or not str(rec["source"]).strip():
                raise ClassifyError("rank entries must carry a source")
            if rec["rank"] < 0:
                raise ClassifyError("ranks are nonnegative")
            seen[(rec["jacobian"], rec["twist"])] = (int(rec["rank"]), rec["source"])
        return cls(tuple(sorted(seen.items())))

    def lookup(self, label: str, d: int):
        for (lab, twist), (rank, _) in self.entries:
            if lab == label and twist == d:
                return rank
        return None

    def merged_with(self, records) -> "RankTable":
        base = [
            {"jacobian": lab, "twist": tw, "rank": r, "source": s}
            for (lab, tw), (r, s) in self.entries
        ]
        return RankTable.from_records(base + list(records))


@lru_cache(maxsize=None)
def default_ranks() -> RankTable:
    with open(mwtors._data_path("ranks.json")) as fh:
        return RankTable.from_records(json.load(fh)["ranks"])


def load_rank_file(path: str) -> RankTable:
    with open(path) as fh:
        return default_ranks().merged_with(json.load(fh)["ranks"])


def rank_from_table(label: str, K, table: RankTable):
    """rank J(K) = sum of twist ranks over Q; None when any entry is missing
    (never guessed)."""
    total = 0
    for d in K.twist_classes():
        r = table.lookup(label, d)
        if r is None:
            return None
        total += r
    return total


# ---------------------------------------------------------------------------
# Exceptional curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExceptionalCurve:
    target: int
    base_d: int
    name: str
    ainvs: tuple  # pairs (rational part, sqrt-part) as Fractions

    def field(self) -> MultiQuadField:
        return MultiQuadField([self.base_d])

    def curve(self) -> ellcurve.EllipticCurve:
        K = self.field()
        dom = TowerDomain(K)
        s = K.sqrt_gen(self.base_d)
        coeffs = [K.from_rational(a) + K.from_rational(b) * s for a, b in self.ainvs]
        return ellcurve.EllipticCurve(dom, coeffs, self.name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "torsion_target": self.target,
            "base_field": self.base_d,
            "ainvs": [[str(a), str(b)] for a, b in self.ainvs],
        }


@lru_cache(maxsize=None)
def exceptional_registry() -> tuple[ExceptionalCurve, ...]:
    with open(mwtors._data_path("exceptional.json")) as fh:
        raw = json.load(fh)
    out = []
    for rec in raw["curves"]:
        out.append(
            ExceptionalCurve(
                rec["target"],
                rec["base_d"],
                rec["name"],
                tuple((Fraction(a), Fraction(b)) for a, b in rec["ainvs"]),
            )
        )
    return tuple(out)


def exceptional_curves(target: str, K) -> list[ExceptionalCurve]:
    """The shipped curves for Z/14 or Z/15 whose quadratic field lies in K."""
    n = int(target) if "x" not in target else None
    if n not in (14, 15):
        raise ClassifyError("exceptional curves exist only for targets 14 and 15")
    return [
        c for c in exceptional_registry() if c.target == n and K.contains_sqrt(c.base_d)
    ]


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    target: str
    field_signature: tuple[int, ...]
    rank_value: int | None
    existence: str  # none | exactly | at_least | infinitely_many | no_conclusion
    count: int | None
    equivalence_direction: str  # iff | one_way
    exceptional: tuple = ()
    condition: str | None = None
    annotations: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "field": list(self.field_signature),
            "rank": self.rank_value,
            "existence": self.existence,
            "count": self.count,
            "equivalence_direction": self.equivalence_direction,
            "exceptional_curves": [c.to_json() for c in self.exceptional],
            "condition": self.condition,
            "annotations": list(self.annotations),
        }


def unconditional_floor(target: str, K) -> int:
    """Curves that exist regardless of the rank."""
    if target == "14":
        return 2 if K.contains_sqrt(-7) else 0
    if target == "15":
        in5 = K.contains_sqrt(5)
        in15 = K.contains_sqrt(-15)
        if in5 and in15:
            return 2
        if in5 or in15:
            return 1
        return 0
    return 0


def classify(target: str, K, table: RankTable | None = None) -> Verdict:
    """Decide existence of elliptic curves over K whose Mordell-Weil group
    contains the target torsion, from the Jacobian rank over K.

    Equivalence targets (11, 14, 15 and the four product cases): positive
    rank means infinitely many curves, rank zero means exactly the
    unconditional floor.  One-way targets (13, 16, 18): rank zero still
    means none, but positive rank yields no conclusion."""
    if target not in TARGETS:
        raise ClassifyError(f"unsupported target {target!r}; known: {sorted(TARGETS)}")
    table = table or default_ranks()
    label = TARGETS[target]
    model = mwtors.get_model(label)
    mwtors.check_zeta_precondition(model, K)
    rank = rank_from_table(label, K, table)
    floor = unconditional_floor(target, K)
    direction = "one_way" if target in ONE_WAY else "iff"
    exceptional = tuple(exceptional_curves(target, K)) if target in ("14", "15") and floor else ()
    annotations: list[str] = []
    if rank == 0:
        if floor:
            annotations.append(
                f"with rank 0, every curve over K with Z/{target} torsion is "
                f"defined over the listed quadratic field(s)"
            )
            verdict = Verdict(
                target, K.signature(), 0, "exactly", floor, direction,
                exceptional, None, tuple(annotations),
            )
        else:
            verdict = Verdict(
                target, K.signature(), 0, "none", 0, direction, (), None, ()
            )
        return verdict
    rank_expr = (
        f"rank J_{label}(K) = sum of the ranks of the {len(K.twist_classes())} "
        f"quadratic twists over Q"
    )
    if rank is None:
        existence = "at_least" if floor else "no_conclusion"
        return Verdict(
            target, K.signature(), None, existence, floor if floor else None,
            direction, exceptional,
            f"conditional: resolve {rank_expr}", tuple(annotations),
        )
    # rank >= 1
    if target in ONE_WAY:
        return Verdict(
            target, K.signature(), rank, "no_conclusion", None, direction, (),
            "positive rank is necessary but not known sufficient for existence",
            (),
        )
    return Verdict(
        target, K.signature(), rank, "infinitely_many", None, direction,
        exceptional, None, tuple(annotations),
    )


# ---------------------------------------------------------------------------
# Independent verification of the exceptional curves
# ---------------------------------------------------------------------------


def _tower_poly_norm(coeffs, K) -> Poly:
    """Norm of a polynomial over a quadratic field down to Q (degree 1 tower)."""
    assert len(K.gens) == 1
    conj = [c.conjugate((-1,)) for c in coeffs]
    dom = TowerDomain(K)
    prod = poly.pmul(dom, tuple(coeffs), tuple(conj))
    out = []
    for c in prod:
        if not c.is_rational():
            raise ClassifyError("norm is not rational")  # pragma: no cover
        out.append(c.rational_value())
    return Poly(QQ, out)


def _tower_poly_roots(coeffs, K) -> list:
    """All roots in the quadratic field K of a polynomial with coefficients
    in K, via degree <= 2 factors of its norm to Q."""
    dom = TowerDomain(K)
    norm = _tower_poly_norm(coeffs, K)
    roots = []
    for g in poly.low_degree_factors(norm, 2):
        for a in ellcurve._roots_in_tower(g, K):
            if poly.peval(dom, tuple(coeffs), a).is_zero():
                if a not in roots:
                    roots.append(a)
    return roots


def _division_poly_tower(E: ellcurve.EllipticCurve, n: int):
    """x-only kill polynomial over the curve's tower domain."""
    dom = E.domain
    b2, b4, b6, b8 = E.b_invariants()
    T = (b6, dom.add(b4, b4), b2, dom.from_int(4))
    cache = {0: (), 1: (dom.one,), 2: (dom.one,)}
    psi3 = (b8, dom.mul(dom.from_int(3), b6), dom.mul(dom.from_int(3), b4), b2, dom.from_int(3))
    cache[3] = poly.pnormalize(dom, psi3)
    b2b8 = dom.mul(b2, b8)
    b4b6 = dom.mul(b4, b6)
    psi4 = (
        dom.sub(dom.mul(b4, b8), dom.mul(b6, b6)),
        dom.sub(b2b8, b4b6),
        dom.mul(dom.from_int(10), b8),
        dom.mul(dom.from_int(10), b6),
        dom.mul(dom.from_int(5), b4),
        b2,
        dom.from_int(2),
    )
    cache[4] = poly.pnormalize(dom, psi4)

    def f(k):
        if k in cache:
            return cache[k]
        m, rem = divmod(k, 2)
        mul = lambda a, b: poly.pmul(dom, a, b)
        if rem:
            a = mul(f(m + 2), mul(f(m), mul(f(m), f(m))))
            c = mul(f(m - 1), mul(f(m + 1), mul(f(m + 1), f(m + 1))))
            T2 = mul(T, T)
            out = poly.psub(dom, mul(a, T2), c) if m % 2 == 0 else poly.psub(dom, a, mul(c, T2))
        else:
            inner = poly.psub(
                dom,
                mul(f(m + 2), mul(f(m - 1), f(m - 1))),
                mul(f(m - 2), mul(f(m + 1), f(m + 1))),
            )
            out = mul(f(m), inner)
        cache[k] = out
        return out

    kill = f(n)
    if n % 2 == 0:
        kill = poly.pmul(dom, T, kill)
    return kill


def _torsion_point_in_tower(E: ellcurve.EllipticCurve, n: int, K):
    """A point of exact order n on a curve over a quadratic field, found from
    the kill polynomial's roots in K, or None."""
    kill = _division_poly_tower(E, n)
    dom = E.domain
    a1, a2, a3, a4, a6 = E.a
    for x in _tower_poly_roots(kill, K):
        # y from the completed square: (2y + a1 x + a3)^2 = T(x)
        b2, b4, b6, _ = E.b_invariants()
        Tval = poly.peval(dom, (b6, dom.add(b4, b4), b2, dom.from_int(4)), x)
        s = sqrt_in_tower(Tval)
        if s is None:
            continue
        half = K.from_rational(Fraction(1, 2))
        y = (s - (a1 * x + a3)) * half
        P = (x, y)
        if not E.on_curve(P):  # pragma: no cover
            continue
        if E.mul(n, P) is ellcurve.INF:
            order = E.point_order(P, n)
            if order == n:
                return P
    return None


def verify_exceptional(curve: ExceptionalCurve, n: int | None = None) -> dict:
    """Certify a shipped curve: every good split prime p < 200 has
    n | #E(F_p); for n = 15 an explicit order-15 point is constructed from
    the division polynomials and the tower square roots; for n = 14 the
    rational 2-torsion point is exhibited.  Raises on any failure."""
    n = n or curve.target
    report = {"name": curve.name, "n": n, "primes_checked": [], "steps": []}
    if n == 1:
        report["steps"].append("vacuous")
        return report
    K = curve.field()
    E = curve.curve()
    d = curve.base_d
    dom = E.domain
    disc_norm = E.discriminant().norm_to_q()
    bad = set()
    for c in E.a:
        for co in c.coords:
            bad |= set(factorize(co.denominator))
    bad |= set(factorize(disc_norm.numerator * disc_norm.denominator))
    for p in range(3, 200):
        if not is_prime(p) or p in bad or d % p == 0 or kronecker(d, p) != 1:
            continue
        for red in ellcurve.reduce_quadratic_curve(E, d, p, 1):
            count = len(ellcurve.points_over_code_domain(red))
            if count % n:
                raise VerificationError(
                    f"{curve.name}: #E(F_{p}) = {count} not divisible by {n}"
                )
        report["primes_checked"].append(p)
    if not report["primes_checked"]:
        raise VerificationError(f"{curve.name}: no usable split primes")
    report["steps"].append(f"{n} divides #E(F_p) at every good split p < 200")
    if n == 15:
        P3 = _torsion_point_in_tower(E, 3, K)
        P5 = _torsion_point_in_tower(E, 5, K)
        if P3 is None or P5 is None:
            raise VerificationError(f"{curve.name}: 3- or 5-torsion not found")
        P15 = E.add(P3, P5)
        if E.point_order(P15, 20) != 15:
            raise VerificationError(f"{curve.name}: combined point is not order 15")
        report["steps"].append("explicit order-15 point constructed and verified")
        report["point_x"] = repr(P15[0])
    if n == 14:
        P2 = _torsion_point_in_tower(E, 2, K)
        if P2 is None:
            raise VerificationError(f"{curve.name}: 2-torsion point not found")
        report["steps"].append("rational 2-torsion point exhibited; 7-part by counting")
        report["point_x"] = repr(P2[0])
    return report
