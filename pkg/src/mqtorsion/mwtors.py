"""The torsion-bound engine.

Combines residue-field reductions, the quadratic-twist decomposition of odd
torsion, Weierstrass 2-torsion analysis and explicit halving/division-
polynomial witnesses into two-sided bounds on J(K)_tors for the eleven
builtin modular Jacobians, over any multi-quadratic field K.  `derive` mode
recomputes everything from the models; `table` mode answers from the shipped
classification tables keyed on the cyclotomic intersection, and the two are
cross-checked whenever both are available.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import ellcurve, ff, hyperjac, poly, qfield
from .groups import AbGroupStructure, subgroup_span
from .intutil import crt_pair, factorize, is_prime, kronecker, rational_reconstruct
from .poly import QQ, Poly, code_domain


class ModelError(ValueError):
    pass


class PreconditionError(ValueError):
    """A theorem hypothesis (e.g. zeta_M in K) is violated."""


class CrossCheckError(RuntimeError):
    """Derived and tabulated answers disagree: data-integrity failure."""


class DataIntegrityError(RuntimeError):
    """A shipped model contradicts its recorded fingerprints."""


# ---------------------------------------------------------------------------
# Model registry
# ---------------------------------------------------------------------------

_ZETA_GEN = {1: None, 2: None, 3: -3, 4: -1, 6: -3}

DEFAULT_PRIMES = {
    "X1(11)": (3, 5),
    "X1(13)": (3, 5),
    "X1(14)": (3, 13),
    "X1(15)": (7, 13),
    "X1(16)": (3, 5),
    "X1(18)": (7, 11),
    "X1(2,10)": (3, 7),
    "X1(2,12)": (5, 7),
    "X1(3,9)": (5, 7),
    "X1(4,8)": (3, 5),
    "X1(6,6)": (5, 7),
}

# the cyclotomic level whose intersection with K drives each classification
TABLE_LEVEL = {
    "X1(11)": 11,
    "X1(13)": 13,
    "X1(14)": 14,
    "X1(15)": 15,
    "X1(16)": 16,
    "X1(18)": 18,
    "X1(2,10)": 10,
    "X1(2,12)": 12,
    "X1(3,9)": 9,
    "X1(4,8)": 8,
    "X1(6,6)": 6,
}

# J(K)_tors keyed by the signature of K_(N); () means any K
TORSION_TABLE = {
    "X1(11)": {None: (5,)},
    "X1(13)": {None: (19,)},
    "X1(14)": {(1,): (6,), (1, -7): (2, 6)},
    "X1(15)": {
        (1,): (4,),
        (1, -3): (8,),
        (1, 5): (8,),
        (1, -15): (2, 4),
        (1, -3, 5, -15): (2, 8),
    },
    "X1(16)": {
        (1,): (2, 10),
        (1, -2): (2, 10),
        (1, -1): (2, 2, 10),
        (1, 2): (2, 2, 10),
        (1, -1, 2, -2): (2, 2, 2, 10),
    },
    "X1(18)": {(1,): (21,), (1, -3): (3, 21)},
    "X1(2,10)": {(1,): (6,), (1, 5): (2, 6)},
    "X1(2,12)": {
        (1,): (4,),
        (1, -1): (8,),
        (1, 3): (8,),
        (1, -3): (2, 4),
        (1, -1, 3, -3): (2, 8),
    },
    "X1(3,9)": {None: (3, 3)},
    "X1(4,8)": {(1, -1): (2, 4), (1, -1, 2, -2): (4, 4)},
    "X1(6,6)": {None: (2, 6)},
}


@dataclass(frozen=True)
class CurveModel:
    label: str
    level: tuple[int, int]
    genus: int
    base_d: int | None  # squarefree d of the theorem base field, None for Q
    ainvs: tuple[int, ...] | None
    f_coeffs: tuple[int, ...] | None
    source: str
    checks: dict = field(compare=False, hash=False, default_factory=dict)

    @property
    def zeta_gen(self) -> int | None:
        return _ZETA_GEN[self.level[0]]

    def base_field(self) -> qfield.MultiQuadField:
        if self.base_d is None:
            return qfield.QQ_FIELD
        return qfield.MultiQuadField([self.base_d])

    def elliptic(self) -> ellcurve.EllipticCurve:
        if self.genus != 1:
            raise ModelError(f"{self.label} is not genus 1")
        return ellcurve.EllipticCurve.from_ints(QQ, self.ainvs, self.label)

    def hyper_poly(self) -> Poly:
        if self.genus != 2:
            raise ModelError(f"{self.label} is not genus 2")
        return Poly.from_ints(QQ, self.f_coeffs)


def _data_path(name: str) -> str:
    base = os.environ.get("MQTORSION_DATA")
    if base is None:
        base = os.path.join(os.path.dirname(__file__), "data")
    return os.path.join(base, name)


@lru_cache(maxsize=None)
def model_registry() -> dict[str, CurveModel]:
    with open(_data_path("models.json")) as fh:
        raw = json.load(fh)
    out = {}
    for entry in raw["models"]:
        base = entry["base_field"]
        out[entry["label"]] = CurveModel(
            label=entry["label"],
            level=tuple(entry["level"]),
            genus=entry["genus"],
            base_d=None if base == "Q" else int(base),
            ainvs=tuple(entry["coeffs"]) if "coeffs" in entry else None,
            f_coeffs=tuple(entry["f_coeffs"]) if "f_coeffs" in entry else None,
            source=entry["source"],
            checks=entry.get("checks", {}),
        )
    return out


def get_model(label: str) -> CurveModel:
    reg = model_registry()
    if label not in reg:
        raise ModelError(f"unknown model {label!r}; known: {sorted(reg)}")
    return reg[label]


def load_model_file(path: str) -> CurveModel:
    with open(path) as fh:
        entry = json.load(fh)
    base = entry["base_field"]
    return CurveModel(
        label=entry["label"],
        level=tuple(entry["level"]),
        genus=entry["genus"],
        base_d=None if base == "Q" else int(base),
        ainvs=tuple(entry["coeffs"]) if "coeffs" in entry else None,
        f_coeffs=tuple(entry["f_coeffs"]) if "f_coeffs" in entry else None,
        source=entry.get("source", path),
        checks=entry.get("checks", {}),
    )


def verify_model_integrity(model: CurveModel) -> None:
    """Check the shipped fingerprints: base torsion and quoted finite-field
    structures.  Guards against transcription slips in the model data."""
    checks = model.checks
    if "torsion_base" in checks:
        expect = AbGroupStructure.from_summands(checks["torsion_base"])
        got = derive_torsion(model, model.base_field())
        if not got.closed or got.lower != expect:
            raise DataIntegrityError(
                f"{model.label}: base torsion {got.lower}/{got.upper} != {expect}"
            )
    for key, summands in checks.get("structures", {}).items():
        p, f = (int(t) for t in key.split(","))
        expect = AbGroupStructure.from_summands(summands)
        if jac_structure(model, p, f) != expect:
            raise DataIntegrityError(f"{model.label}: J(F_{p}^{f}) != {expect}")
    if "minimal_disc_support" in checks:
        support = set(checks["minimal_disc_support"])
        disc = ellcurve.minimal_disc(model.elliptic())
        if set(factorize(disc)) != support:
            raise DataIntegrityError(f"{model.label}: minimal disc support")


# ---------------------------------------------------------------------------
# Reduction structures (cached) and the meet
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def jac_structure(model: CurveModel, p: int, f: int) -> AbGroupStructure:
    """J(F_{p^f}) for a builtin model; raises on bad reduction."""
    if p == 2 or not is_prime(p):
        raise ModelError(f"{p} is not an odd prime")
    if model.genus == 1:
        return ellcurve.group_structure(ellcurve.reduce_mod_p(model.elliptic(), p, f))
    dom = code_domain(ff.make_field(p, f))
    try:
        C = hyperjac.HyperCurve.from_ints(dom, model.f_coeffs, model.label)
    except hyperjac.JacError as exc:
        raise ellcurve.BadReduction(p) from exc
    return hyperjac.jac_group_structure(C)


def group_meet(
    A: AbGroupStructure,
    B: AbGroupStructure,
    exclude_a: frozenset | set = frozenset(),
    exclude_b: frozenset | set = frozenset(),
) -> AbGroupStructure:
    """Prime-by-prime componentwise minimum of sorted exponent vectors,
    skipping a side at its own residue characteristic."""
    return meet_many([(A, exclude_a), (B, exclude_b)])


def meet_many(sides) -> AbGroupStructure:
    sides = [(s, frozenset(ex)) for s, ex in sides]
    primes = set()
    for s, _ in sides:
        primes |= set(s.prime_exponents())
    out = {}
    for ell in primes:
        vectors = [
            s.prime_exponents().get(ell, [])
            for s, ex in sides
            if ell not in ex
        ]
        if not vectors:
            continue  # no side carries information at ell
        width = min(len(v) for v in vectors)
        if width == 0:
            continue
        mins = []
        for i in range(1, width + 1):
            mins.append(min(v[len(v) - i] for v in vectors))
        out[ell] = sorted(mins)
    return AbGroupStructure.from_prime_exponents(out)


def reduction_bound(model: CurveModel, K, primes) -> AbGroupStructure:
    """Upper bound on J(K)_tors from reductions at the given odd primes, with
    residue degrees computed from K."""
    if not primes:
        raise ModelError("empty prime list")
    sides = []
    for p in primes:
        f, _ = K.residue_degree(p)
        sides.append((jac_structure(model, p, f), frozenset({p})))
    return meet_many(sides)


# ---------------------------------------------------------------------------
# Twists: upper bounds at every prime, exact for genus 1, witnesses for
# genus 2
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def genus1_twist_torsion(model: CurveModel, d: int) -> AbGroupStructure:
    E = model.elliptic()
    hint = tuple(factorize(ellcurve.minimal_disc(E))) + tuple(factorize(d))
    return ellcurve.torsion_structure_q(ellcurve.quadratic_twist(E, d), hint=hint)


@lru_cache(maxsize=None)
def _hyper_curve_ff(model: CurveModel, p: int, f: int) -> hyperjac.HyperCurve:
    dom = code_domain(ff.make_field(p, f))
    return hyperjac.HyperCurve.from_ints(dom, model.f_coeffs, model.label)


def genus2_twist_reduction(model: CurveModel, d: int, p: int) -> AbGroupStructure:
    """Structure of the d-twisted Jacobian over F_p: the base reduction when
    d is a square mod p, else the kernel of 1 + Frobenius inside J(F_{p^2}).
    Twists in the same square class mod p share the computation."""
    if d % p == 0:
        raise ellcurve.BadReduction(p)
    if kronecker(d, p) == 1:
        return jac_structure(model, p, 1)
    return _inert_twist_structure(model, p)


@lru_cache(maxsize=None)
def _inert_kernel(model: CurveModel, p: int) -> tuple:
    """Classes of ker(1 + Frobenius) on J(F_{p^2}): the twisted Jacobian over
    F_p for every non-square twist class."""
    C2 = _hyper_curve_ff(model, p, 2)
    fadd, _, ident = hyperjac.fast_jac_ops(C2)
    kernel = tuple(
        D
        for D in hyperjac.all_classes(C2)
        if fadd(D, hyperjac.frobenius_on_class(C2, D)) == ident
    )
    expected = hyperjac.zeta_order(_hyper_curve_ff(model, p, 1))[4]
    if len(kernel) != expected:
        raise CrossCheckError(
            f"{model.label} inert twist at {p}: kernel {len(kernel)} != zeta {expected}"
        )
    return kernel


@lru_cache(maxsize=None)
def _inert_twist_structure(model: CurveModel, p: int) -> AbGroupStructure:
    C2 = _hyper_curve_ff(model, p, 2)
    fadd, _, ident = hyperjac.fast_jac_ops(C2)
    from .groups import structure_from_elements

    return structure_from_elements(list(_inert_kernel(model, p)), fadd, ident, max_rank=4)


@lru_cache(maxsize=None)
def genus2_rational_torsion_bounds(model: CurveModel, primes: tuple = ()):
    """(lower, upper) for J(Q)_tors of a genus-2 model: classes generated by
    small rational points against the reduction meet at the given primes."""
    F = model.hyper_poly()
    C = hyperjac.rational_curve(F, model.label)
    upper = reduction_bound(
        model, qfield.QQ_FIELD, primes or DEFAULT_PRIMES[model.label]
    )
    gens = hyperjac.classes_from_rational_points(
        C, hyperjac.search_rational_points(F, 40)
    )
    good = []
    for D in gens:
        try:
            k = hyperjac.jac_order(C, D, upper.exponent)
        except hyperjac.JacError:
            continue
        if k > 1:
            good.append(D)
    span = subgroup_span(
        good,
        lambda a, b: hyperjac.jac_add(C, a, b),
        lambda a: hyperjac.jac_neg(C, a),
        C.identity(),
        cap=upper.order,
    )
    if span is None:  # pragma: no cover
        raise CrossCheckError(f"{model.label}: rational span exceeds reduction bound")
    from .groups import structure_from_elements

    lower = structure_from_elements(
        sorted(span), lambda a, b: hyperjac.jac_add(C, a, b), C.identity()
    )
    return lower, upper


@lru_cache(maxsize=None)
def genus2_twist_witness(model: CurveModel, d: int, ell: int):
    """A verified ell-torsion divisor of the d-twist over Q, reconstructed by
    CRT from twisted ell-torsion at several primes and certified over the
    tower Q(sqrt(d)); None when reconstruction fails.

    The returned witness is a divisor class on the base curve over Q(sqrt d)
    anti-fixed by conjugation, i.e. a genuine twisted class."""
    K = qfield.MultiQuadField([d])
    F = model.hyper_poly()
    CK = hyperjac.tower_curve(F, K, model.label)
    s = K.sqrt_gen(d)
    sinv = K.one() / s
    primes = [p for p in (3, 5, 7, 11, 13, 17, 19) if _good_twist_prime(model, d, p)]
    per_prime = []
    for p in primes[:4]:
        data = _twisted_ell_torsion_data(model, d, p, ell)
        if data:
            per_prime.append((p, data))
        if len(per_prime) >= 3:
            break
    if len(per_prime) < 2:
        return None
    # CRT all pairings of candidates across the collected primes
    (p1, d1), (p2, d2) = per_prime[0], per_prime[1]
    extra = per_prime[2:] if len(per_prime) > 2 else []
    for cand1 in d1:
        for cand2 in d2:
            rec = _crt_and_reconstruct(cand1, p1, cand2, p2, extra)
            if rec is None:
                continue
            u_q, vd_q = rec
            # lift to the tower: v = v_d / sqrt(d)
            u = tuple(K.from_rational(c) for c in u_q)
            v = tuple(K.from_rational(c) * sinv for c in vd_q)
            D = (u, v, 0)
            if not hyperjac.is_valid_divisor(CK, D):
                continue
            try:
                if hyperjac.jac_order(CK, D, ell) != ell:
                    continue
            except hyperjac.JacError:
                continue
            signs = (-1,)  # the conjugation negating sqrt(d)
            Dsig = (
                tuple(c.conjugate(signs) for c in u),
                tuple(c.conjugate(signs) for c in v),
                0,
            )
            if Dsig != hyperjac.jac_neg(CK, D):
                continue
            return D
    return None


def _good_twist_prime(model: CurveModel, d: int, p: int) -> bool:
    if d % p == 0:
        return False
    try:
        _hyper_curve_ff(model, p, 1)
    except hyperjac.JacError:
        return False
    return True


@lru_cache(maxsize=None)
def _split_ell_classes(model: CurveModel, p: int, ell: int) -> tuple:
    """(u, v) of the nontrivial ell-torsion of J(F_p) with deg u = 2, n = 0."""
    from .groups import _scalar

    C = _hyper_curve_ff(model, p, 1)
    fadd, _, ident = hyperjac.fast_jac_ops(C)
    out = []
    for D in hyperjac.all_classes(C):
        if D != ident and _scalar(ell, D, fadd, ident) == ident:
            u, v, n = D
            if len(u) - 1 == 2 and n == 0:
                out.append((u, v))
    return tuple(out)


@lru_cache(maxsize=None)
def _inert_ell_classes(model: CurveModel, p: int, ell: int) -> tuple:
    """(u, v) over F_{p^2} of the nontrivial ell-torsion of the inert-twist
    kernel, deg u = 2, n = 0."""
    from .groups import _scalar

    C = _hyper_curve_ff(model, p, 2)
    fadd, _, ident = hyperjac.fast_jac_ops(C)
    out = []
    for D in _inert_kernel(model, p):
        if D != ident and _scalar(ell, D, fadd, ident) == ident:
            u, v, n = D
            if len(u) - 1 == 2 and n == 0:
                out.append((u, v))
    return tuple(out)


@lru_cache(maxsize=None)
def _zeta_orders(model: CurveModel, p: int) -> tuple[int, int]:
    """(#J(F_p), twisted order L(-1)) from the zeta oracle; cheap."""
    C = _hyper_curve_ff(model, p, 1)
    z = hyperjac.zeta_order(C)
    return z[3], z[4]


@lru_cache(maxsize=None)
def twist_ell_upper(model: CurveModel, d: int, ell: int, primes: tuple) -> AbGroupStructure:
    """Upper bound on the ell-part of the d-twist's rational torsion.

    An order screen over a pool of good primes usually kills it outright
    (ell does not divide the twisted group order at some prime); otherwise
    the structure meet over the supplied primes is returned."""
    for p in range(3, 48, 2):
        if not is_prime(p) or d % p == 0:
            continue
        try:
            orders = _zeta_orders(model, p)
        except hyperjac.JacError:
            continue
        order = orders[0] if kronecker(d, p) == 1 else orders[1]
        if order % ell:
            return AbGroupStructure.trivial()
    sides = []
    for p in primes:
        try:
            sides.append((genus2_twist_reduction(model, d, p), frozenset({p})))
        except ellcurve.BadReduction:
            continue
    if not sides:
        return None  # no usable evidence for this summand
    return meet_many(sides).ell_part(ell)


def _twisted_ell_torsion_data(model: CurveModel, d: int, p: int, ell: int):
    """Twisted Mumford pairs (u, v_d) over F_p of the nontrivial ell-torsion
    classes of the d-twisted Jacobian, with deg u = 2 and weight 0."""
    out = []
    if kronecker(d, p) == 1:
        t = _hyper_curve_ff(model, p, 1).domain.tables
        s = t.sqrt[t.from_int(d)][0]
        for u, v in _split_ell_classes(model, p, ell):
            out.append((u, tuple(t.mul[s][c] for c in v), p))
    else:
        t = _hyper_curve_ff(model, p, 2).domain.tables
        s = t.sqrt[t.from_int(d)][0]
        for u, v in _inert_ell_classes(model, p, ell):
            vd = tuple(t.mul[s][c] for c in v)
            if all(t.frob[c] == c for c in u) and all(t.frob[c] == c for c in vd):
                out.append((u, vd, p))
    return out


def _crt_and_reconstruct(cand1, p1, cand2, p2, extra):
    """Rationally reconstruct (u, v_d) from per-prime data; None on failure."""
    u1, v1, _ = cand1
    u2, v2, _ = cand2
    if len(u1) != len(u2) or len(v1) != len(v2):
        return None
    m = p1 * p2
    residues_u = [crt_pair(a, p1, b, p2) for a, b in zip(u1, u2)]
    residues_v = [crt_pair(a, p1, b, p2) for a, b in zip(v1, v2)]
    for p3, data3 in extra:
        matched = None
        for u3, v3, _ in data3:
            if len(u3) == len(u1) and len(v3) == len(v1):
                matched = (u3, v3)
                break
        if matched:
            residues_u = [crt_pair(a, m, b, p3) for a, b in zip(residues_u, matched[0])]
            residues_v = [crt_pair(a, m, b, p3) for a, b in zip(residues_v, matched[1])]
            m *= p3
    u_q = [rational_reconstruct(r, m) for r in residues_u]
    v_q = [rational_reconstruct(r, m) for r in residues_v]
    if any(c is None for c in u_q) or any(c is None for c in v_q):
        return None
    if u_q[-1] != 1:
        return None
    return tuple(u_q), tuple(v_q)


# ---------------------------------------------------------------------------
# The derive pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionResult:
    label: str
    field_signature: tuple[int, ...]
    lower: AbGroupStructure
    upper: AbGroupStructure
    closed: bool
    trace: tuple = ()

    def __post_init__(self):
        if not self.lower.embeds_in(self.upper):
            raise CrossCheckError(f"lower {self.lower} does not embed in {self.upper}")

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "field": list(self.field_signature),
            "lower": list(self.lower.factors),
            "upper": list(self.upper.factors),
            "closed": self.closed,
            "trace": [dict(t) for t in self.trace],
        }


def check_zeta_precondition(model: CurveModel, K) -> None:
    g = model.zeta_gen
    if g is not None and not K.contains_sqrt(g):
        raise PreconditionError(
            f"{model.label} needs sqrt({g}) in K (cyclotomic base field)"
        )


def derive_torsion(model: CurveModel, K, primes=None) -> TorsionResult:
    check_zeta_precondition(model, K)
    if primes is None:
        primes = DEFAULT_PRIMES.get(model.label)
        if primes is None:
            raise ModelError(f"no default reduction primes for {model.label}; supply them")
    primes = tuple(primes)
    trace = []
    upper = reduction_bound(model, K, primes)
    for p in primes:
        f, ram = K.residue_degree(p)
        trace.append(
            {"step": "reduction", "p": p, "f": f,
             "structure": list(jac_structure(model, p, f).factors)}
        )
    if model.genus == 1:
        exact = ellcurve.torsion_over_tower(model.elliptic(), K)
        trace.append({"step": "tower-torsion-exact", "structure": list(exact.factors)})
        if not exact.embeds_in(upper):
            raise CrossCheckError(
                f"{model.label}/{K}: torsion {exact} escapes reduction bound {upper}"
            )
        return TorsionResult(model.label, K.signature(), exact, exact, True, tuple(trace))
    return _derive_genus2(model, K, primes, upper, trace)


def _derive_genus2(model, K, primes, upper, trace) -> TorsionResult:
    # 2-part: Weierstrass orbit analysis (exact whenever a rational
    # Weierstrass point exists and every factor has degree <= 3)
    two_lower, two_exact = hyperjac.two_torsion_galois(model.hyper_poly(), K)
    trace.append(
        {"step": "two-torsion-orbits", "structure": list(two_lower.factors),
         "exact": two_exact}
    )
    two_upper = _capped_two_part(upper, two_lower) if two_exact else upper.ell_part(2)
    # odd part: rational classes first; witnesses from twists only while a
    # gap against the reduction bound remains
    q_lower, q_upper = genus2_rational_torsion_bounds(model, primes)
    trace.append(
        {"step": "rational-classes", "lower": list(q_lower.factors),
         "upper": list(q_upper.factors)}
    )
    odd_lower = q_lower.odd_part()
    odd_upper = upper.odd_part()
    if odd_lower != odd_upper:
        # tighten the upper prime by prime with the twist-sum bound
        refined = {}
        for ell, es in odd_upper.prime_exponents().items():
            if es == odd_lower.prime_exponents().get(ell, []):
                refined[ell] = es
                continue
            total = AbGroupStructure.trivial()
            ok = True
            for d in K.twist_classes():
                part = (
                    q_upper.ell_part(ell)
                    if d == 1
                    else twist_ell_upper(model, d, ell, primes)
                )
                if part is None:
                    ok = False
                    break
                total = total.direct_sum(part)
            if ok:
                merged = meet_many(
                    [
                        (AbGroupStructure.from_prime_exponents({ell: es}), frozenset()),
                        (total, frozenset()),
                    ]
                )
                refined[ell] = merged.prime_exponents().get(ell, [])
            else:
                refined[ell] = es
        odd_upper = AbGroupStructure.from_prime_exponents(refined)
        trace.append({"step": "twist-sum-upper", "upper": list(odd_upper.factors)})
    if odd_lower != odd_upper:
        # hunt for twisted torsion witnesses to close the remaining gap
        for d in K.twist_classes():
            if d == 1 or odd_lower == odd_upper:
                continue
            for ell, es in odd_upper.prime_exponents().items():
                if es == odd_lower.prime_exponents().get(ell, []):
                    continue
                witness = genus2_twist_witness(model, d, ell)
                if witness is not None:
                    odd_lower = odd_lower.direct_sum(AbGroupStructure.cyclic(ell))
                    trace.append({"step": "twist-witness", "d": d, "ell": ell})
    lower = two_lower.direct_sum(odd_lower)
    upper_ref = two_upper.direct_sum(odd_upper)
    closed = lower == upper_ref
    trace.append(
        {"step": "assembled", "lower": list(lower.factors),
         "upper": list(upper_ref.factors)}
    )
    return TorsionResult(model.label, K.signature(), lower, upper_ref, closed, tuple(trace))


def _capped_two_part(upper: AbGroupStructure, two_exact_group: AbGroupStructure):
    """With J(K)[2] known exactly, cap the 2-part of the reduction bound:
    the rank cannot exceed the 2-torsion rank."""
    exps = upper.prime_exponents().get(2, [])
    rank = len(two_exact_group.prime_exponents().get(2, []))
    exps = sorted(exps)[len(exps) - min(rank, len(exps)):] if rank else []
    return AbGroupStructure.from_prime_exponents({2: exps})


# ---------------------------------------------------------------------------
# Division-polynomial criteria and the classification table surface
# ---------------------------------------------------------------------------


def twist_odd_torsion(model: CurveModel, K, ell: int):
    """(structure, closed) for J(K)[ell^infinity], ell odd, through the twist
    decomposition: the direct sum over the twist classes of K of the
    ell-primary torsion of each twist over Q.

    Genus-1 summands are exact (Nagell-Lutz).  Genus-2 summands pair a
    reduction upper bound with an explicit divisor-witness lower bound and
    the result is flagged open when any summand fails to close."""
    if ell == 2 or not is_prime(ell):
        raise ModelError("ell must be an odd prime")
    if model.base_d is not None and not K.contains_sqrt(model.base_d):
        raise PreconditionError(f"{model.label} twists decompose over {model.base_field()}")
    total = AbGroupStructure.trivial()
    closed = True
    primes = DEFAULT_PRIMES.get(model.label, (3, 5))
    for d in K.twist_classes():
        if model.genus == 1:
            total = total.direct_sum(genus1_twist_torsion(model, d).ell_part(ell))
            continue
        if d == 1:
            low, up = genus2_rational_torsion_bounds(model, primes)
            low, up = low.ell_part(ell), up.ell_part(ell)
        else:
            up = twist_ell_upper(model, d, ell, primes)
            low = AbGroupStructure.trivial()
            if up is None:
                closed = False
                continue
            if up.order > 1 and genus2_twist_witness(model, d, ell) is not None:
                low = AbGroupStructure.cyclic(ell)
        total = total.direct_sum(low)
        if low != up:
            closed = False
    return total, closed


def eight_torsion_criterion(model: CurveModel, K):
    """(has_8_torsion, witness) for a genus-1 model: scans the degree <= 2
    rational factors of the exact-order-8 kernel polynomial for a root a in
    K with the cubic value a square in K; the witness records the root, the
    point, and the quadratic subfield that supplied it."""
    if model.genus != 1:
        raise ModelError("criterion applies to genus-1 models")
    A, B = ellcurve.short_model(model.elliptic())
    b = tuple(Fraction(v) for v in (0, 2 * A, 4 * B, -A * A))
    kernel = poly.primitive_kernel_poly_b(b, 8)
    for g in poly.low_degree_factors(kernel, 2):
        d = poly.splitting_quadratic_field(g) if g.degree == 2 else 1
        if d != 1 and not K.contains_sqrt(d):
            continue
        for a in ellcurve._roots_in_tower(g, K):
            val = a * a * a + K.from_rational(A) * a + K.from_rational(B)
            y = qfield.sqrt_in_tower(val)
            if y is None:
                continue
            E = ellcurve.tower_short_curve(A, B, K)
            P = (a, y)
            assert E.on_curve(P)
            assert E.mul(4, P) is not None and E.mul(8, P) is None
            y_field = y.support_gens()
            return True, {
                "factor": [c for c in g.coeffs],
                "splitting_d": d,
                "sqrt_subfield": y_field.signature(),
                "order": 8,
            }
    return False, None


def torsion_table(label: str, K, mode: str = "derive", primes=None) -> TorsionResult:
    """J(K)_tors for a builtin Jacobian: mode="derive" recomputes from the
    model; mode="table" reads the shipped classification; a disagreement
    between a closed derivation and the table is a hard error."""
    model = get_model(label)
    if mode not in ("derive", "table"):
        raise ModelError(f"unknown mode {mode!r}")
    tabled = table_lookup(label, K)
    if mode == "table":
        check_zeta_precondition(model, K)
        if tabled is None:  # pragma: no cover
            raise CrossCheckError(f"no tabulated case for {label} over {K}")
        st = AbGroupStructure.from_summands(tabled)
        return TorsionResult(label, K.signature(), st, st, True,
                             ({"step": "table", "structure": list(st.factors)},))
    result = derive_torsion(model, K, primes)
    if result.closed and tabled is not None:
        expect = AbGroupStructure.from_summands(tabled)
        if result.lower != expect:
            raise CrossCheckError(
                f"{label}/{K}: derived {result.lower} but table says {expect}"
            )
    return result


def table_lookup(label: str, K) -> tuple[int, ...] | None:
    table = TORSION_TABLE[label]
    if None in table:
        return table[None]
    level = TABLE_LEVEL[label]
    key = K.cyclotomic_intersection(level).signature()
    return table.get(key)
