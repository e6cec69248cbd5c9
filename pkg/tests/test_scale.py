"""Scale laws and combination rules, checked against interval-midpoint oracles."""
from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from argbench.scale import (
    BalancedProbability,
    Direction,
    DirectionalValue,
    ProbabilityLabel as L,
    ScaleError,
    complement_phrase,
    demote,
    inferential_force,
    label_from_percentage,
    max_combine,
    min_combine,
    on_balance,
    parse_label,
)

labels = st.sampled_from(list(L))
label_lists = st.lists(labels, min_size=1, max_size=7)


def midpoint(label: L) -> float:
    lo, hi = label.interval
    return (lo + hi) / 2


class TestScaleDefinition:
    def test_seven_total_ordered_values(self):
        assert len(list(L)) == 7
        ranks = [label.rank for label in L]
        assert ranks == sorted(ranks) == list(range(7))

    def test_intervals_contiguous_and_cover_0_100(self):
        ordered = sorted(L, key=lambda l: l.rank)
        assert ordered[0].interval[0] == 0
        assert ordered[-1].interval == (100, 100)
        for lower, upper in zip(ordered, ordered[1:]):
            assert lower.interval[1] == upper.interval[0]

    def test_rank_order_agrees_with_interval_order(self):
        ordered = sorted(L, key=lambda l: l.rank)
        los = [label.interval[0] for label in ordered]
        assert los == sorted(los)

    def test_exact_intervals(self):
        assert L.LACKING_SUPPORT.interval == (0, 50)
        assert L.BARELY_LIKELY.interval == (50, 55)
        assert L.LIKELY.interval == (55, 70)
        assert L.MORE_THAN_LIKELY.interval == (70, 80)
        assert L.VERY_LIKELY.interval == (80, 95)
        assert L.ALMOST_CERTAIN.interval == (95, 100)
        assert L.CERTAIN.interval == (100, 100)

    def test_tokens_round_trip(self):
        for label in L:
            assert parse_label(label.token) is label
            assert parse_label(label.name.lower()) is label
            assert parse_label(label.display_name) is label

    def test_bad_tokens_rejected(self):
        for bad in ("probable", "likely[50,70)", "", "certainly"):
            with pytest.raises(ScaleError):
                parse_label(bad)


class TestLabelFromPercentage:
    def test_paper_examples(self):
        assert label_from_percentage(60) is L.LIKELY
        assert label_from_percentage(100) is L.CERTAIN

    def test_boundaries_belong_to_higher_label(self):
        assert label_from_percentage(50) is L.BARELY_LIKELY
        assert label_from_percentage(55) is L.LIKELY
        assert label_from_percentage(70) is L.MORE_THAN_LIKELY
        assert label_from_percentage(80) is L.VERY_LIKELY
        assert label_from_percentage(95) is L.ALMOST_CERTAIN

    def test_out_of_range_rejected(self):
        for p in (-1, 100.5, 1e9):
            with pytest.raises(ScaleError):
                label_from_percentage(p)

    @given(st.floats(min_value=0, max_value=100, allow_nan=False))
    def test_total_on_domain(self, p):
        label = label_from_percentage(p)
        lo, hi = label.interval
        assert lo <= p and (p < hi or label is L.CERTAIN)


class TestMinMaxLaws:
    def test_examples(self):
        assert min_combine([L.VERY_LIKELY, L.CERTAIN]) is L.VERY_LIKELY
        assert min_combine([L.CERTAIN, L.CERTAIN]) is L.CERTAIN
        assert min_combine([L.LIKELY, L.MORE_THAN_LIKELY, L.VERY_LIKELY]) is L.LIKELY
        assert max_combine([L.LACKING_SUPPORT, L.LIKELY]) is L.LIKELY
        assert max_combine([L.BARELY_LIKELY, L.VERY_LIKELY]) is L.VERY_LIKELY
        assert max_combine([L.MORE_THAN_LIKELY]) is L.MORE_THAN_LIKELY

    def test_empty_rejected(self):
        with pytest.raises(ScaleError):
            min_combine([])
        with pytest.raises(ScaleError):
            max_combine([])

    @given(a=labels, b=labels)
    def test_commutative(self, a, b):
        assert min_combine([a, b]) is min_combine([b, a])
        assert max_combine([a, b]) is max_combine([b, a])

    @given(a=labels, b=labels, c=labels)
    def test_associative(self, a, b, c):
        assert min_combine([min_combine([a, b]), c]) is min_combine([a, min_combine([b, c])])
        assert max_combine([max_combine([a, b]), c]) is max_combine([a, max_combine([b, c])])

    @given(a=labels)
    def test_idempotent(self, a):
        assert min_combine([a, a]) is a
        assert max_combine([a, a]) is a

    @given(xs=label_lists)
    def test_bounds(self, xs):
        low, high = min_combine(xs), max_combine(xs)
        assert all(low <= x <= high for x in xs)

    @given(a=labels, b=labels)
    def test_midpoint_oracle(self, a, b):
        # numeric min/max on interval midpoints recovers the same labels
        assert label_from_percentage(min(midpoint(a), midpoint(b))) is min_combine([a, b])
        assert label_from_percentage(max(midpoint(a), midpoint(b))) is max_combine([a, b])


class TestInferentialForce:
    def test_paper_examples(self):
        assert inferential_force(L.VERY_LIKELY, L.CERTAIN) is L.VERY_LIKELY
        assert inferential_force(L.VERY_LIKELY, L.LIKELY) is L.LIKELY
        assert inferential_force(L.CERTAIN, L.CERTAIN) is L.CERTAIN

    def test_all_49_pairs_against_midpoint_oracle(self):
        for cred in L:
            for rel in L:
                expected = label_from_percentage(min(midpoint(cred), midpoint(rel)))
                assert inferential_force(cred, rel) is expected

    @given(a=labels, b=labels, c=labels)
    def test_monotone_and_bounded(self, a, b, c):
        force = inferential_force(a, b)
        assert force <= a and force <= b
        if c >= a:
            assert inferential_force(c, b) >= force
        if c >= b:
            assert inferential_force(a, c) >= force


class TestOnBalance:
    def test_stated_cases(self):
        assert on_balance(BalancedProbability(L.VERY_LIKELY, L.LACKING_SUPPORT)) == (
            DirectionalValue(Direction.FOR, L.VERY_LIKELY)
        )
        assert on_balance(BalancedProbability(L.LACKING_SUPPORT, L.MORE_THAN_LIKELY)) == (
            DirectionalValue(Direction.AGAINST, L.MORE_THAN_LIKELY)
        )
        assert on_balance(BalancedProbability(L.VERY_LIKELY, L.LIKELY)) == (
            DirectionalValue(Direction.FOR, L.MORE_THAN_LIKELY)
        )
        tie = BalancedProbability(L.LIKELY, L.LIKELY)
        assert on_balance(tie) == DirectionalValue(Direction.NEUTRAL, L.LACKING_SUPPORT)
        assert tie.dissonant

    def test_bottom_tie_is_neutral_not_dissonant(self):
        both_ls = BalancedProbability(L.LACKING_SUPPORT, L.LACKING_SUPPORT)
        assert on_balance(both_ls).direction is Direction.NEUTRAL
        assert not both_ls.dissonant

    @given(f=labels, d=labels)
    def test_direction_reflects_dominance(self, f, d):
        value = on_balance(BalancedProbability(f, d))
        assert value.strength <= max(f, d)
        if value.direction is Direction.FOR:
            assert f > d
        elif value.direction is Direction.AGAINST:
            assert d > f
        else:
            assert f == d

    @given(f=labels, d=labels)
    def test_dissonance_flag(self, f, d):
        pair = BalancedProbability(f, d)
        assert pair.dissonant == (f == d and f > L.LACKING_SUPPORT)


class TestComplement:
    def test_report_phrases(self):
        assert complement_phrase(L.VERY_LIKELY) == "very unlikely (5-20%)"
        assert complement_phrase(L.ALMOST_CERTAIN) == "almost no chance (1-5%)"
        assert complement_phrase(L.CERTAIN) == "no chance (0%)"
        assert complement_phrase(L.LIKELY) == "unlikely (30-45%)"
        assert complement_phrase(L.MORE_THAN_LIKELY) == "not likely (20-30%)"

    def test_below_likely_not_renderable(self):
        for label in (L.LACKING_SUPPORT, L.BARELY_LIKELY):
            with pytest.raises(ScaleError):
                complement_phrase(label)

    def test_intervals_reflect_displayed_ranges(self):
        # complement range is the reflection of the displayed range:
        # lo' = 100 - hi, hi' = 100 - lo
        for label in (L.LIKELY, L.MORE_THAN_LIKELY, L.VERY_LIKELY, L.ALMOST_CERTAIN):
            shown = label.display_range.rstrip("%")
            lo, hi = (int(x) for x in shown.split("-"))
            reflected = f"{100 - hi}-{100 - lo}%"
            assert complement_phrase(label).endswith(f"({reflected})")
        assert complement_phrase(L.CERTAIN).endswith("(0%)")


class TestDemote:
    @given(a=labels)
    def test_demote_floors_at_bottom(self, a):
        lowered = demote(a)
        assert lowered.rank == max(a.rank - 1, 0)
