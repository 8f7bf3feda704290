import random
from fractions import Fraction as Fr

import pytest

from mqtorsion import ff
from mqtorsion.ellcurve import (
    INF,
    division_polynomial,
    primitive_kernel_poly,
    BadReduction,
    CurveError,
    EllipticCurve,
    exhaustive_small_field_scan,
    good_odd_primes,
    group_structure,
    halving_witness,
    minimal_disc,
    minimal_model,
    points_over_code_domain,
    quadratic_twist,
    reduce_mod_p,
    reduce_quadratic_curve,
    short_model,
    torsion_over_tower,
    torsion_structure_q,
    two_primary_over_tower,
)
from mqtorsion.groups import AbGroupStructure
from mqtorsion.poly import QQ, code_domain
from mqtorsion.qfield import MultiQuadField, QQ_FIELD

X11 = (0, -1, -1, 0, 0)  # y^2 - y = x^3 - x^2
X14 = (0, 0, 0, -675, 13662)
X15 = (0, 0, 0, -27, 8694)
M210 = (0, 1, 0, -1, 0)
M212 = (0, -1, 0, 1, 0)
M39 = (0, 0, 1, 0, 0)
M48 = (0, 0, 0, 4, 0)
M66 = (0, 0, 0, 0, 1)


def E(ainvs, label=None):
    return EllipticCurve.from_ints(QQ, ainvs, label)


class TestGroupLaw:
    def test_identity_and_negation(self):
        c = E(X11)
        P = (Fr(0), Fr(0))
        assert c.add(P, INF) == P
        assert c.add(P, c.neg(P)) is INF
        x, y = c.neg(P)
        # -(x, y) = (x, -y - a1 x - a3)
        assert (x, y) == (Fr(0), Fr(1))

    def test_x11_point_order_five(self):
        c = E(X11)
        assert c.point_order((Fr(0), Fr(0))) == 5

    def test_on_curve(self):
        c = E(X11)
        assert c.on_curve((Fr(0), Fr(0)))
        assert not c.on_curve((Fr(2), Fr(1)))

    def test_associativity_random(self):
        c = E((1, -1, 1, -3, 3))
        cf = reduce_mod_p(c, 11)
        pts = points_over_code_domain(cf)
        rng = random.Random(4)
        for _ in range(150):
            P, Q, R = (rng.choice(pts) for _ in range(3))
            assert cf.add(cf.add(P, Q), R) == cf.add(P, cf.add(Q, R))

    def test_singular_rejected(self):
        with pytest.raises(CurveError):
            E((0, 0, 0, 0, 0))


class TestGroupStructure:
    @pytest.mark.parametrize(
        "ainvs,p,f,expect",
        [
            (X11, 3, 2, [15]),
            (X11, 5, 2, [35]),
            (M212, 7, 2, [8, 8]),
            (M212, 5, 2, [2, 16]),
            (X14, 3, 2, [2, 6]),
            (X14, 13, 2, [2, 90]),
            (X15, 7, 2, [8, 8]),
            (X15, 13, 2, [2, 96]),
            (M210, 3, 2, [2, 6]),
            (M210, 7, 2, [2, 30]),
            (M39, 5, 2, [6, 6]),
            (M39, 7, 2, [3, 21]),
            (M48, 3, 2, [4, 4]),
            (M48, 5, 2, [4, 8]),
            (M66, 5, 2, [6, 6]),
            (M66, 7, 2, [4, 12]),
        ],
    )
    def test_reductions_match_known_structures(self, ainvs, p, f, expect):
        st = group_structure(reduce_mod_p(E(ainvs), p, f))
        assert st == AbGroupStructure.from_summands(expect)

    def test_hasse_bound_exhaustive_f3(self):
        dom = code_domain(ff.make_field(3, 1))
        q = 3
        count = 0
        for a1 in range(q):
            for a2 in range(q):
                for a3 in range(q):
                    for a4 in range(q):
                        for a6 in range(q):
                            try:
                                c = EllipticCurve(dom, (a1, a2, a3, a4, a6))
                            except CurveError:
                                continue
                            n = len(points_over_code_domain(c))
                            assert (n - q - 1) ** 2 <= 4 * q
                            count += 1
        assert count > 0

    def test_weil_divisibility_property(self):
        for p, f in [(5, 1), (7, 1), (3, 2), (5, 2)]:
            st = group_structure(reduce_mod_p(E(M48), p, f))
            if len(st.factors) == 2:
                import math

                assert st.factors[0] % math.gcd(st.factors[0], p**f - 1) == 0
                assert (p**f - 1) % st.factors[0] == 0


class TestMinimalModels:
    def test_x14_good_at_three(self):
        # the cubic model has a non-minimal factor at 3; the minimal model
        # must have discriminant supported on {2, 7}
        d = minimal_disc(E(X14))
        assert d == -28

    def test_invariants_preserved(self):
        for ainvs in (X11, X14, X15, M210, M212, M39, M48, M66):
            c = E(ainvs)
            m = minimal_model(c)
            assert m.j_invariant() == c.j_invariant()

    def test_minimal_disc_divides(self):
        from mqtorsion.ellcurve import c4c6_disc, _int_ainvs

        for ainvs in (X14, X15):
            c = E(ainvs)
            big = c4c6_disc(_int_ainvs(c))[2]
            small = minimal_disc(c)
            assert big % small == 0


class TestReduction:
    def test_bad_prime_raises(self):
        with pytest.raises(BadReduction):
            reduce_mod_p(E(X11), 11)

    def test_even_prime_rejected(self):
        with pytest.raises(CurveError):
            reduce_mod_p(E(X11), 2)

    def test_quadratic_coefficients(self):
        # a curve over Q(sqrt 5): y^2 = x^3 + sqrt(5) x
        K = MultiQuadField([5])
        from mqtorsion.poly import TowerDomain

        dom = TowerDomain(K)
        s5 = K.sqrt_gen(5)
        c = EllipticCurve(dom, (K.zero(), K.zero(), K.zero(), s5, K.one()))
        reds = reduce_quadratic_curve(c, 5, 11, 1)
        assert len(reds) == 2  # split prime: two embeddings
        for r in reds:
            assert len(points_over_code_domain(r)) > 0
        inert = reduce_quadratic_curve(c, 5, 3, 2)  # sqrt(5) exists in F_9
        assert len(inert) >= 1
        with pytest.raises(BadReduction):
            reduce_quadratic_curve(c, 5, 5, 1)  # ramified


class TestTwists:
    def test_trivial_twist(self):
        c = E(M48)
        assert short_model(quadratic_twist(c, 1)) == short_model(c)

    def test_j_invariant_preserved(self):
        c = E(X15)
        for d in (-1, 2, -3, 5, -15):
            assert quadratic_twist(c, d).j_invariant() == c.j_invariant()

    def test_twist_involution(self):
        c = E(M210)
        for d in (-1, 2, -7):
            assert short_model(quadratic_twist(quadratic_twist(c, d), d)) == short_model(c)

    def test_trace_flip(self):
        """#E(F_p) + #E^(d)(F_p) = 2p + 2 for (d/p) = -1."""
        from mqtorsion.intutil import kronecker

        for ainvs in (X11, X14, M210, M48):
            c = E(ainvs)
            for d in (-1, 2, 5, -7):
                for p in good_odd_primes(c, 14):
                    if d % p == 0 or kronecker(d, p) != -1:
                        continue
                    ct = quadratic_twist(c, d)
                    if p in good_odd_primes(ct, p + 1):
                        n1 = len(points_over_code_domain(reduce_mod_p(c, p)))
                        n2 = len(points_over_code_domain(reduce_mod_p(ct, p)))
                        assert n1 + n2 == 2 * p + 2


class TestTorsionQ:
    @pytest.mark.parametrize(
        "ainvs,expect",
        [
            (X11, [5]),
            (X14, [6]),
            (X15, [4]),
            (M210, [6]),
            (M212, [4]),
            (M39, [3]),
            (M48, [4]),
            (M66, [6]),
        ],
    )
    def test_rational_torsion(self, ainvs, expect):
        assert torsion_structure_q(E(ainvs)) == AbGroupStructure.from_summands(expect)

    def test_two_independent_paths_agree(self):
        for ainvs in (X11, X14, X15, M210, M212, M39, M48, M66):
            assert torsion_structure_q(E(ainvs)) == torsion_over_tower(E(ainvs), QQ_FIELD)


class TestTowerTorsion:
    @pytest.mark.parametrize(
        "ainvs,gens,expect",
        [
            (M210, (5,), [2, 6]),
            (M210, (), [6]),
            (M48, (-1, 2), [4, 4]),
            (M48, (-1,), [2, 4]),
            (X15, (-3, 5), [2, 8]),
            (X15, (-3,), [8]),
            (X15, (5,), [8]),
            (X15, (-15,), [2, 4]),
            (X15, (2,), [4]),
            (M212, (-1,), [8]),
            (M212, (3,), [8]),
            (M212, (-3,), [2, 4]),
            (M212, (-1, 3), [2, 8]),
            (X14, (-7,), [2, 6]),
            (X14, (-1, 7), [2, 6]),
            (X14, (5,), [6]),
            (X11, (2, 3), [5]),
            (M39, (-3,), [3, 3]),
            (M66, (-3,), [2, 6]),
        ],
    )
    def test_matches_known_tables(self, ainvs, gens, expect):
        K = MultiQuadField(gens) if gens else QQ_FIELD
        assert torsion_over_tower(E(ainvs), K) == AbGroupStructure.from_summands(expect)

    def test_halving_witness_order(self):
        K = MultiQuadField([-1])
        P = halving_witness(4, 0, K, K.zero())
        assert P is not None
        from mqtorsion.ellcurve import tower_short_curve

        c = tower_short_curve(4, 0, K)
        assert c.point_order(P, 16) == 4

    def test_witnesses_verified(self):
        st, witnesses, exact = two_primary_over_tower(-27, 8694, MultiQuadField([-3, 5]))
        assert exact and st == AbGroupStructure((2, 8))
        from mqtorsion.ellcurve import tower_short_curve

        c = tower_short_curve(-27, 8694, MultiQuadField([-3, 5]))
        orders = sorted(c.point_order(P, 64) for P in witnesses)
        assert 8 in orders and all(o in (2, 4, 8) for o in orders)


class TestDivisionPolynomialSurface:
    def test_kill_and_primitive_wrappers(self):
        c = E(X15)
        assert division_polynomial(c, 1).degree == 0
        two = division_polynomial(c, 2)
        assert two.degree == 3 and primitive_kernel_poly(c, 2) == two
        assert primitive_kernel_poly(c, 8).degree == 24

    def test_found_torsion_x_kills_kernel_poly(self):
        """x(P) of every rational point of exact order n is a root of the
        exact-order-n kernel polynomial."""
        from mqtorsion.ellcurve import short_curve, short_model, torsion_points_short

        for ainvs in (X11, X14, X15, M210, M212, M39, M48, M66):
            c = E(ainvs)
            A, B = short_model(c)
            cs = short_curve(A, B)
            for P in torsion_points_short(A, B):
                if P is INF:
                    continue
                n = cs.point_order(P, 20)
                assert primitive_kernel_poly(c, n)(P[0]) == 0


class TestScan:
    def test_no_order_16_over_f9(self):
        witness, scanned = exhaustive_small_field_scan(ff.make_field(3, 2), 16)
        assert witness is None
        assert scanned > 50000

    def test_no_order_17_over_f9(self):
        witness, _ = exhaustive_small_field_scan(ff.make_field(3, 2), 17)
        assert witness is None

    def test_order_15_witness_over_f9(self):
        witness, _ = exhaustive_small_field_scan(ff.make_field(3, 2), 15)
        assert witness is not None
        st = group_structure(witness)
        assert st.exponent % 15 == 0

    def test_hasse_sampled_f25_f49(self):
        rng = random.Random(17)
        for p, f in ((5, 2), (7, 2)):
            dom = code_domain(ff.make_field(p, f))
            q = p**f
            done = 0
            while done < 120:
                ainvs = tuple(rng.randrange(q) for _ in range(5))
                try:
                    c = EllipticCurve(dom, ainvs)
                except CurveError:
                    continue
                n = len(points_over_code_domain(c))
                assert (n - q - 1) ** 2 <= 4 * q
                done += 1
