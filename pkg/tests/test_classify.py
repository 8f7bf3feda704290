import pytest

from mqtorsion.classify import (
    ClassifyError,
    RankTable,
    VerificationError,
    classify,
    default_ranks,
    exceptional_curves,
    exceptional_registry,
    rank_from_table,
    target_group,
    unconditional_floor,
    verify_exceptional,
)
from mqtorsion.groups import AbGroupStructure
from mqtorsion.qfield import MultiQuadField, QQ_FIELD, all_subfields


def with_ranks(records):
    return default_ranks().merged_with(records)


class TestRankTable:
    def test_shipped_defaults(self):
        table = default_ranks()
        assert rank_from_table("X1(14)", MultiQuadField([-7]), table) == 0
        assert rank_from_table("X1(15)", MultiQuadField([-3, 5]), table) == 0
        assert rank_from_table("X1(16)", MultiQuadField([-1, 2]), table) == 0
        assert rank_from_table("X1(18)", MultiQuadField([-3]), table) == 0

    def test_unknown_when_missing(self):
        assert rank_from_table("X1(11)", MultiQuadField([2]), default_ranks()) is None

    def test_anonymous_rank_refused(self):
        with pytest.raises(ClassifyError):
            RankTable.from_records([{"jacobian": "X1(11)", "twist": 1, "rank": 0, "source": " "}])

    def test_negative_rank_refused(self):
        with pytest.raises(ClassifyError):
            RankTable.from_records([{"jacobian": "X1(11)", "twist": 1, "rank": -1, "source": "x"}])


class TestTargets:
    def test_target_groups(self):
        assert target_group("14") == AbGroupStructure.cyclic(14)
        assert target_group("2x12") == AbGroupStructure((2, 12))

    def test_unsupported(self):
        with pytest.raises(ClassifyError):
            classify("17", QQ_FIELD)

    def test_zeta_precondition(self):
        from mqtorsion.mwtors import PreconditionError

        with pytest.raises(PreconditionError):
            classify("6x6", MultiQuadField([2]))


class TestFloors:
    def test_floor_14(self):
        assert unconditional_floor("14", MultiQuadField([-7])) == 2
        assert unconditional_floor("14", MultiQuadField([5])) == 0

    def test_floor_15(self):
        assert unconditional_floor("15", MultiQuadField([5])) == 1
        assert unconditional_floor("15", MultiQuadField([-15])) == 1
        assert unconditional_floor("15", MultiQuadField([-3, 5])) == 2
        assert unconditional_floor("15", MultiQuadField([-3])) == 0


class TestClassifyGoldens:
    def test_14_exactly_two(self):
        v = classify("14", MultiQuadField([-7]))
        assert v.existence == "exactly" and v.count == 2
        assert sorted(c.name for c in v.exceptional) == ["14-I", "14-II"]

    def test_15_exactly_two(self):
        v = classify("15", MultiQuadField([-3, 5]))
        assert v.existence == "exactly" and v.count == 2

    def test_13_none_with_rank_zero(self):
        table = with_ranks(
            [{"jacobian": "X1(13)", "twist": d, "rank": 0, "source": "t"} for d in (1, -3, 5, -15)]
        )
        v = classify("13", MultiQuadField([-3, 5]), table)
        assert v.existence == "none"

    def test_16_18_none_with_rank_zero(self):
        for target, gens in (("16", (-2,)), ("18", (2,))):
            label = {"16": "X1(16)", "18": "X1(18)"}[target]
            K = MultiQuadField(gens)
            table = with_ranks(
                [{"jacobian": label, "twist": d, "rank": 0, "source": "t"} for d in K.twist_classes()]
            )
            v = classify(target, K, table)
            assert v.existence == "none" and v.equivalence_direction == "one_way"

    def test_11_infinitely_many(self):
        table = with_ranks([{"jacobian": "X1(11)", "twist": 1, "rank": 1, "source": "t"}])
        v = classify("11", QQ_FIELD, table)
        assert v.existence == "infinitely_many"

    def test_one_way_never_overclaims(self):
        for target in ("13", "16", "18"):
            label = f"X1({target})"
            table = with_ranks([{"jacobian": label, "twist": 1, "rank": 2, "source": "t"}])
            v = classify(target, QQ_FIELD, table)
            assert v.existence == "no_conclusion"

    def test_products_iff(self):
        table = with_ranks(
            [{"jacobian": "X1(2,10)", "twist": d, "rank": r, "source": "t"}
             for d, r in ((1, 1), (5, 0))]
        )
        v = classify("2x10", MultiQuadField([5]), table)
        assert v.existence == "infinitely_many" and v.equivalence_direction == "iff"

    def test_unknown_rank_conditional(self):
        v = classify("14", MultiQuadField([5]))
        assert v.existence == "no_conclusion" and v.condition
        v = classify("15", MultiQuadField([5, 7]))  # floor 1, rank unknown
        assert v.existence == "at_least" and v.count == 1 and v.condition

    def test_monotone_in_rank_data(self):
        """Adding entries only moves unknown verdicts to determined ones."""
        strength = {"none": 2, "exactly": 2, "infinitely_many": 2,
                    "at_least": 1, "no_conclusion": 0}
        K = MultiQuadField([2])
        before = classify("11", K)
        table = with_ranks(
            [{"jacobian": "X1(11)", "twist": d, "rank": 0, "source": "t"} for d in (1, 2)]
        )
        after = classify("11", K, table)
        assert strength[after.existence] >= strength[before.existence]

    def test_exhaustive_logic_table(self):
        """Every target x subfield of Q(sqrt(-1),sqrt(2),sqrt(-3),sqrt(5),sqrt(-7))
        x rank scenario produces exactly a licensed verdict shape."""
        from mqtorsion.mwtors import PreconditionError

        fields = all_subfields((-1, 2, -3, 5, -7))
        targets = ["11", "13", "14", "15", "16", "18", "2x10", "2x12", "3x9", "4x8", "6x6"]
        one_way = {"13", "16", "18"}
        for target in targets:
            label = {"11": "X1(11)", "13": "X1(13)", "14": "X1(14)", "15": "X1(15)",
                     "16": "X1(16)", "18": "X1(18)", "2x10": "X1(2,10)",
                     "2x12": "X1(2,12)", "3x9": "X1(3,9)", "4x8": "X1(4,8)",
                     "6x6": "X1(6,6)"}[target]
            for K in fields:
                for rank in (0, 1, None):
                    if rank is None:
                        table = RankTable(())
                    else:
                        table = with_ranks(
                            [{"jacobian": label, "twist": d, "rank": rank if d == 1 else 0,
                              "source": "t"} for d in K.twist_classes()]
                        )
                    try:
                        v = classify(target, K, table)
                    except PreconditionError:
                        continue
                    floor = unconditional_floor(target, K)
                    if rank == 0:
                        assert v.existence == ("exactly" if floor else "none")
                        if floor:
                            assert v.count == floor
                    elif rank == 1 and target in one_way:
                        assert v.existence == "no_conclusion"
                    elif rank == 1:
                        assert v.existence == "infinitely_many"
                    else:
                        assert v.existence in ("at_least", "no_conclusion")
                        assert v.existence != "none" and v.existence != "infinitely_many"


class TestExceptionalCurves:
    def test_14_over_q_sqrt_minus7(self):
        assert len(exceptional_curves("14", MultiQuadField([-7]))) == 2

    def test_15_over_compositum(self):
        got = exceptional_curves("15", MultiQuadField([5, -15]))
        assert sorted(c.name for c in got) == ["15-I", "15-II"]

    def test_14_empty_without_sqrt_minus7(self):
        assert exceptional_curves("14", MultiQuadField([5])) == []

    def test_curves_are_nonsingular_and_distinct(self):
        seen = set()
        for c in exceptional_registry():
            E = c.curve()
            assert not E.domain.is_zero(E.discriminant())
            seen.add((c.target, c.name))
        assert len(seen) == 4


class TestVerifyExceptional:
    @pytest.mark.parametrize("name", ["14-I", "14-II", "15-I", "15-II"])
    def test_certification(self, name):
        curve = next(c for c in exceptional_registry() if c.name == name)
        report = verify_exceptional(curve)
        assert len(report["primes_checked"]) >= 15
        if curve.target == 15:
            assert any("order-15" in s for s in report["steps"])

    def test_vacuous_n1(self):
        curve = exceptional_registry()[0]
        assert verify_exceptional(curve, 1)["steps"] == ["vacuous"]

    def test_failure_detected(self):
        # n = 9 does not divide the point counts of the 14-curves
        curve = next(c for c in exceptional_registry() if c.name == "14-I")
        with pytest.raises(VerificationError):
            verify_exceptional(curve, 9)
