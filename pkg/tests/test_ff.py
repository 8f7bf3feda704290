import pytest

from mqtorsion.ff import (
    FieldError,
    FqElem,
    arith,
    is_square,
    make_field,
    quadratic_extension,
    sqrt,
    tables,
)

SMALL_FIELDS = [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (11, 2), (13, 1), (13, 2)]


def euler_nonresidue(r, p):
    return pow(r % p, (p - 1) // 2, p) == p - 1


class TestMakeField:
    def test_f9_nonresidue_is_minus_one(self):
        F = make_field(3, 2)
        assert F.r == -1
        assert euler_nonresidue(-1, 3)

    def test_f5_prime_field(self):
        F = make_field(5, 1)
        assert F.order == 5 and F.r is None

    def test_even_characteristic_rejected(self):
        with pytest.raises(FieldError):
            make_field(2, 1)

    def test_nonprime_rejected(self):
        with pytest.raises(FieldError):
            make_field(9, 1)

    def test_bad_degree_rejected(self):
        with pytest.raises(FieldError):
            make_field(5, 3)

    @pytest.mark.parametrize("p,k", [(p, 2) for p, k in SMALL_FIELDS if k == 2])
    def test_r_is_smallest_nonresidue(self, p, k):
        F = make_field(p, k)
        scan = [-1] + list(range(2, p))
        expected = next(r for r in scan if euler_nonresidue(r, p))
        assert F.r == expected


class TestArith:
    def test_t_squared_is_minus_one_in_f9(self):
        F = make_field(3, 2)
        t = F.gen()
        assert t * t == F.from_int(-1)

    def test_inverse_of_two_in_f5(self):
        F = make_field(5, 1)
        assert F.from_int(2).inverse() == F.from_int(3)

    def test_frobenius_of_t_in_f9(self):
        # t^3 = t * t^2 = -t
        F = make_field(3, 2)
        t = F.gen()
        assert t ** 3 == -t
        assert arith(t, None, "frobenius") == -t

    def test_mixed_field_rejected(self):
        a = make_field(3, 1).one()
        b = make_field(5, 1).one()
        with pytest.raises(FieldError):
            a + b

    def test_division_by_zero(self):
        F = make_field(7, 1)
        with pytest.raises(FieldError):
            F.one() / F.zero()

    @pytest.mark.parametrize("p,k", SMALL_FIELDS)
    def test_field_axioms_sampled(self, p, k):
        F = make_field(p, k)
        els = list(F.elements())
        sample = els[:: max(1, len(els) // 7)]
        for a in sample:
            for b in sample:
                assert a + b == b + a
                assert a * b == b * a
                for c in sample[:3]:
                    assert (a + b) + c == a + (b + c)
                    assert a * (b + c) == a * b + a * c
                if not b.is_zero():
                    assert (a / b) * b == a


class TestSqrt:
    def test_sqrt_of_minus_one_in_f5(self):
        F = make_field(5, 1)
        got = sqrt(F.from_int(-1))
        assert got is not None and set(got) == {F.from_int(2), F.from_int(3)}

    def test_sqrt_of_minus_one_in_f9(self):
        F = make_field(3, 2)
        got = sqrt(F.from_int(-1))
        assert got is not None and set(got) == {F.gen(), -F.gen()}

    def test_three_is_not_square_in_f7(self):
        # Euler: 3^3 = 27 = -1 mod 7
        assert pow(3, 3, 7) == 7 - 1
        F = make_field(7, 1)
        assert sqrt(F.from_int(3)) is None
        assert not is_square(F.from_int(3))

    @pytest.mark.parametrize("p,k", SMALL_FIELDS)
    def test_square_census(self, p, k):
        """Exactly (q-1)/2 nonzero squares; sqrt succeeds exactly on those."""
        F = make_field(p, k)
        squares = {a * a for a in F.elements() if not a.is_zero()}
        assert len(squares) == (F.order - 1) // 2
        for a in F.elements():
            got = sqrt(a)
            if a.is_zero():
                assert got == (F.zero(), F.zero())
            elif a in squares:
                assert got is not None and got[0] * got[0] == a and got[1] * got[1] == a
            else:
                assert got is None and not is_square(a)


class TestEnumerate:
    @pytest.mark.parametrize(
        "p,k,n", [(5, 1, 5), (3, 2, 9), (13, 2, 169)]
    )
    def test_counts_and_distinctness(self, p, k, n):
        els = list(make_field(p, k).elements())
        assert len(els) == n == len(set(els))


class TestProperties:
    @pytest.mark.parametrize("p,k", SMALL_FIELDS)
    def test_fermat_exhaustive(self, p, k):
        F = make_field(p, k)
        q = F.order
        for a in F.elements():
            if not a.is_zero():
                assert a ** (q - 1) == F.one()

    @pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
    def test_frobenius_automorphism(self, p):
        F = make_field(p, 2)
        els = list(F.elements())
        for a in els:
            for b in els[:: max(1, len(els) // 9)]:
                assert (a + b).frobenius() == a.frobenius() + b.frobenius()
                assert (a * b).frobenius() == a.frobenius() * b.frobenius()
        fixed = [a for a in els if a.frobenius() == a]
        assert len(fixed) == p  # exactly the prime subfield
        for a in els:
            assert a.frobenius().frobenius() == a


class TestTables:
    @pytest.mark.parametrize("p,k", [(3, 2), (5, 1), (7, 2), (13, 2)])
    def test_tables_agree_with_elements(self, p, k):
        F = make_field(p, k)
        T = tables(F)
        els = T.elems
        step = max(1, len(els) // 11)
        for i in range(0, len(els), step):
            for j in range(0, len(els), step):
                assert T.decode(T.add[i][j]) == els[i] + els[j]
                assert T.decode(T.mul[i][j]) == els[i] * els[j]
            assert T.decode(T.neg[i]) == -els[i]
            if i:
                assert T.decode(T.inv[i]) == els[i].inverse()
            assert T.decode(T.frob[i]) == els[i].frobenius()
            assert T.is_sq[i] == is_square(els[i])


class TestQuadraticExtension:
    @pytest.mark.parametrize("p,k", [(3, 1), (3, 2), (5, 2)])
    def test_is_a_field_of_square_order(self, p, k):
        base = make_field(p, k)
        E = quadratic_extension(base)
        assert E.order == base.order ** 2
        els = list(E.elements())
        assert len(els) == E.order == len(set(els))
        one = E.one
        # nonzero squares count, Frobenius fixes exactly the base copy
        sq = {E.mul(x, x) for x in els if x != E.zero}
        assert len(sq) == (E.order - 1) // 2
        fixed = [x for x in els if E.conj(x) == x]
        assert len(fixed) == base.order
        for s in list(sq)[:: max(1, len(sq) // 23)]:
            r = E.sqrt(s)
            assert r is not None and E.mul(r, r) == s
