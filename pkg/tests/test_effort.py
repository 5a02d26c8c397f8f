from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from robointegrate.effort import (
    CONDITIONS,
    Condition,
    ConditionScores,
    DegeneratePriorityError,
    EffortCoefficient,
    EffortLevel,
    EfMode,
    PriorityProfile,
    TimeRange,
    add_time_ranges,
    compute_effort_coefficient,
    effort_level_to_range,
    predict_low_level_time,
    shift_time_range,
)

CASE_PRIORITIES = PriorityProfile.of(1, 1, 0.5, 0.5, 0.5)

# no subnormal-scale values: products of two of them underflow to zero
unit = st.one_of(st.just(0.0), st.floats(1e-6, 1.0))
scores_st = st.lists(st.one_of(st.just(0.0), st.floats(1e-6, 3.0)), min_size=5, max_size=5).map(lambda v: ConditionScores.of(*v))
priorities_st = (
    st.lists(unit, min_size=5, max_size=5)
    .filter(lambda v: any(x > 0 for x in v))
    .map(lambda v: PriorityProfile.of(*v))
)
modes = st.sampled_from(list(EfMode))


def weighted_oracle(scores, priorities):
    # written out term by term, independent of the library's loop
    s, p = scores, priorities
    num = p[0] * s[0] + p[1] * s[1] + p[2] * s[2] + p[3] * s[3] + p[4] * s[4]
    den = 3 * (p[0] + p[1] + p[2] + p[3] + p[4])
    return num / den


class TestEffortCoefficient:
    @pytest.mark.parametrize(
        "scores, expected",
        [
            ((2.0, 0, 0, 0, 1.5), 0.333),  # ARMAR-6 Hand ROS driver
            ((3.0, 0, 0, 1.0, 1.5), 0.524),  # MaskRCNN
            ((0, 0, 0, 0.5, 0.5), 0.095),  # ROS ecosystem
        ],
    )
    def test_legacy_reproduces_case_study(self, scores, expected):
        ef = compute_effort_coefficient(ConditionScores.of(*scores), CASE_PRIORITIES, EfMode.LEGACY)
        assert ef.value == pytest.approx(expected, abs=1e-3)
        assert ef.c_max == pytest.approx(10.5)

    def test_literal_armar(self):
        # hand evaluation: (1*2.0 + 0.5*1.5) / (3*(1+1+0.5+0.5+0.5)) = 2.75 / 10.5
        expected = weighted_oracle((2.0, 0, 0, 0, 1.5), (1, 1, 0.5, 0.5, 0.5))
        assert expected == pytest.approx(2.75 / 10.5, abs=1e-15)
        ef = compute_effort_coefficient(ConditionScores.of(2.0, 0, 0, 0, 1.5), CASE_PRIORITIES)
        assert ef.mode is EfMode.LITERAL
        assert ef.value == pytest.approx(0.2619047619, abs=1e-9)
        assert ef.c_total == pytest.approx(2.75)

    @pytest.mark.parametrize("mode", list(EfMode))
    def test_all_zero_scores(self, mode):
        ef = compute_effort_coefficient(ConditionScores.of(0, 0, 0, 0, 0), CASE_PRIORITIES, mode)
        assert ef.value == 0.0

    def test_all_max_equal_priorities(self):
        ef = compute_effort_coefficient(ConditionScores.of(3, 3, 3, 3, 3), PriorityProfile.of(*[0.7] * 5))
        assert ef.value == pytest.approx(1.0, abs=1e-15)

    def test_degenerate_priorities(self):
        with pytest.raises(DegeneratePriorityError, match="degenerate priority profile"):
            PriorityProfile.of(0, 0, 0, 0, 0)

    @pytest.mark.parametrize("bad", [-0.1, 3.01, float("nan")])
    def test_score_range_validated(self, bad):
        with pytest.raises(ValueError):
            ConditionScores.of(bad, 0, 0, 0, 0)

    def test_priority_range_validated(self):
        with pytest.raises(ValueError, match="priority out of"):
            PriorityProfile.of(1.5, 1, 1, 1, 1)

    def test_missing_condition(self):
        with pytest.raises(ValueError, match="missing score"):
            ConditionScores({Condition.INTERFACE: 1.0})

    def test_string_keys_accepted(self):
        s = ConditionScores({c.value: 1.0 for c in CONDITIONS})
        assert s.as_tuple() == (1.0,) * 5

    def test_override_rejects_negative(self):
        with pytest.raises(ValueError):
            EffortCoefficient.override(-0.1)


class TestEffortProperties:
    @given(scores_st, priorities_st)
    def test_literal_in_unit_interval(self, scores, priorities):
        ef = compute_effort_coefficient(scores, priorities, EfMode.LITERAL)
        assert 0.0 <= ef.value <= 1.0 + 1e-12

    @given(scores_st, priorities_st)
    def test_literal_matches_oracle(self, scores, priorities):
        ef = compute_effort_coefficient(scores, priorities, EfMode.LITERAL)
        assert math.isclose(ef.value, weighted_oracle(scores.as_tuple(), priorities.as_tuple()), rel_tol=1e-12, abs_tol=1e-15)

    @given(scores_st, priorities_st, st.floats(1e-3, 1e3))
    def test_literal_scale_invariance(self, scores, priorities, c):
        scaled = [p * c for p in priorities.as_tuple()]
        top = max(scaled)
        if top > 1:  # keep the scaled profile valid; rescale both sides by the same factor
            scaled = [p / top for p in scaled]
        a = compute_effort_coefficient(scores, priorities, EfMode.LITERAL).value
        b = compute_effort_coefficient(scores, PriorityProfile.of(*scaled), EfMode.LITERAL).value
        assert abs(a - b) <= 1e-12

    @given(scores_st, priorities_st, modes, st.integers(0, 4), st.floats(0, 3))
    def test_monotone_in_each_score(self, scores, priorities, mode, idx, bump):
        cond = CONDITIONS[idx]
        if priorities[cond] == 0:
            return
        raised = list(scores.as_tuple())
        raised[idx] = min(3.0, raised[idx] + bump)
        before = compute_effort_coefficient(scores, priorities, mode).value
        after = compute_effort_coefficient(ConditionScores.of(*raised), priorities, mode).value
        assert after >= before

    @given(scores_st, priorities_st)
    def test_zero_iff_weighted_scores_zero(self, scores, priorities):
        ef = compute_effort_coefficient(scores, priorities, EfMode.LITERAL)
        all_zero = all(scores[c] == 0 for c in CONDITIONS if priorities[c] > 0)
        assert (ef.value == 0) == all_zero

    @given(st.floats(0, 2), st.floats(0, 2))
    def test_rounding_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert predict_low_level_time(lo) <= predict_low_level_time(hi)


class TestLowLevelTime:
    @pytest.mark.parametrize(
        "ef, days", [(0.095, 1), (0.333, 3), (0.524, 5), (0.571, 6), (0.0, 0), (0.05, 1), (0.35, 4), (0.25, 3)]
    )
    def test_round_half_up(self, ef, days):
        assert predict_low_level_time(EffortCoefficient.override(ef)) == days

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            predict_low_level_time(-0.5)


ranges_st = st.one_of(
    st.tuples(st.integers(0, 50), st.integers(0, 50)).map(lambda t: TimeRange.closed(min(t), max(t))),
    st.integers(0, 50).map(TimeRange.above),
)


class TestTimeRange:
    @pytest.mark.parametrize(
        "level, text", [(EffortLevel.LOW, "0-2"), (EffortLevel.MEDIUM, "3-6"), (EffortLevel.HIGH, ">6")]
    )
    def test_level_ranges(self, level, text):
        assert str(effort_level_to_range(level)) == text

    def test_addition_examples(self):
        low, high = effort_level_to_range(EffortLevel.LOW), effort_level_to_range(EffortLevel.HIGH)
        assert add_time_ranges(low, low) == TimeRange.closed(0, 4)
        assert add_time_ranges(high, low) == TimeRange.above(6)
        assert add_time_ranges(TimeRange.closed(0, 0), TimeRange.closed(3, 6)) == TimeRange.closed(3, 6)

    def test_shift_examples(self):
        assert shift_time_range(TimeRange.closed(0, 4), 1) == TimeRange.closed(1, 5)
        assert str(shift_time_range(TimeRange.above(6), 3)) == ">9"
        assert shift_time_range(TimeRange.closed(0, 4), 0) == TimeRange.closed(0, 4)
        with pytest.raises(ValueError):
            shift_time_range(TimeRange.closed(0, 4), -1)

    def test_invalid(self):
        with pytest.raises(ValueError):
            TimeRange.closed(5, 3)

    def test_contains(self):
        r = TimeRange.closed(5, 9)
        assert r.contains(5) and r.contains(9) and not r.contains(4)
        assert r.contains(4, slack=1)
        assert TimeRange.above(9).contains(10)
        assert not TimeRange.above(9).contains(9)

    @given(ranges_st, ranges_st)
    def test_commutative(self, a, b):
        assert a + b == b + a

    @given(ranges_st, ranges_st, ranges_st)
    def test_associative(self, a, b, c):
        assert (a + b) + c == a + (b + c)

    @given(ranges_st, st.integers(0, 50))
    def test_unbounded_absorbs(self, a, lo):
        assert not (a + TimeRange.above(lo)).bounded

    @given(ranges_st)
    def test_dict_round_trip(self, r):
        assert TimeRange.from_dict(r.to_dict()) == r
