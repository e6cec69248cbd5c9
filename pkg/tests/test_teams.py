"""Team formation policies under an injected clock."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from argbench.teams import (
    HOUR,
    ClockRegressionError,
    Roster,
    RosterError,
    TeamParameters,
    form_random_teams,
    join,
    parse_duration,
    random_fixed_roster,
    tick,
)


def adhoc() -> Roster:
    return Roster(policy="ad-hoc", parameters=TeamParameters())


def join_many(roster: Roster, names: list[str], at: float) -> Roster:
    for name in names:
        roster, _ = join(roster, name, at)
    return roster


class TestAdHocScenarios:
    def test_full_team_closes_at_cap(self):
        # (a) 12 joins by 3h -> closes at 12 members
        roster = adhoc()
        for i in range(12):
            roster, team_id = join(roster, f"P{i}", i * 0.25 * HOUR)
        team = roster.teams[0]
        assert team.status == "closed"
        assert team.size == 12
        assert team.closed_at == 11 * 0.25 * HOUR

    def test_seven_members_close_at_six_hours(self):
        # (b) 7 members at 6h -> closes at 6h
        roster = join_many(adhoc(), [f"P{i}" for i in range(7)], 0.0)
        roster = tick(roster, 6 * HOUR)
        team = roster.teams[0]
        assert team.status == "closed"
        assert team.size == 7
        assert team.closed_at == 6 * HOUR

    def test_small_team_waits_for_sixth(self):
        # (c) 3 members at 6h, 3 more at 9h -> closes at 9h with 6
        roster = join_many(adhoc(), ["P1", "P2", "P3"], 0.0)
        roster = tick(roster, 6 * HOUR)
        assert roster.teams[0].status == "open"
        roster = join_many(roster, ["P4", "P5", "P6"], 9 * HOUR)
        team = roster.teams[0]
        assert team.status == "closed"
        assert team.size == 6
        assert team.closed_at == 9 * HOUR

    def test_tiny_team_closes_at_twelve_hours(self):
        # (d) 4 members at 12h -> closes at 12h with 4
        roster = join_many(adhoc(), ["P1", "P2", "P3", "P4"], 0.0)
        roster = tick(roster, 12 * HOUR)
        team = roster.teams[0]
        assert team.status == "closed"
        assert team.size == 4
        assert team.closed_at == 12 * HOUR


class TestAdHocMechanics:
    def test_first_join_opens_team(self):
        roster, team_id = join(adhoc(), "P1", 0.0)
        assert team_id == "T1"
        assert roster.teams[0].status == "open"
        assert roster.teams[0].size == 1

    def test_duplicate_join_rejected(self):
        roster, _ = join(adhoc(), "P1", 0.0)
        with pytest.raises(RosterError):
            join(roster, "P1", 1.0)

    def test_join_after_close_opens_fresh_team(self):
        roster = join_many(adhoc(), [f"P{i}" for i in range(12)], 0.0)
        roster, team_id = join(roster, "P99", 1 * HOUR)
        assert team_id == "T2"
        assert roster.open_team().id == "T2"

    def test_join_at_boundary_wins_over_closure(self):
        # 5 members during the first window; the 6th arrives exactly at 6h
        roster = join_many(adhoc(), [f"P{i}" for i in range(5)], 0.0)
        roster, team_id = join(roster, "P5", 6 * HOUR)
        team = roster.teams[0]
        assert team_id == "T1"
        assert team.status == "closed"
        assert team.size == 6
        assert team.closed_at == 6 * HOUR

    def test_late_join_goes_to_new_team_when_window_passed(self):
        roster = join_many(adhoc(), [f"P{i}" for i in range(6)], 0.0)
        # nobody ticked at 6h, but the team factually closed then
        roster, team_id = join(roster, "P99", 7 * HOUR)
        assert team_id == "T2"
        assert roster.teams[0].status == "closed"
        assert roster.teams[0].closed_at == 6 * HOUR

    def test_tick_idempotent_at_fixed_time(self):
        roster = join_many(adhoc(), [f"P{i}" for i in range(7)], 0.0)
        once = tick(roster, 6 * HOUR)
        twice = tick(once, 6 * HOUR)
        from argbench.teams import roster_view

        assert roster_view(once) == roster_view(twice)

    def test_clock_regression_rejected(self):
        roster = tick(adhoc(), 10.0)
        with pytest.raises(ClockRegressionError):
            tick(roster, 5.0)
        with pytest.raises(ClockRegressionError):
            join(roster, "P1", 5.0)

    def test_open_team_never_past_twelve_hours(self):
        roster = join_many(adhoc(), ["P1"], 0.0)
        roster = tick(roster, 12 * HOUR + 1)
        assert roster.teams[0].status == "closed"
        assert roster.teams[0].closed_at == 12 * HOUR


class TestRandomPolicy:
    def test_twelve_participants_three_teams_of_four(self):
        teams = form_random_teams([f"P{i}" for i in range(12)], seed=1)
        assert sorted(len(t) for t in teams) == [4, 4, 4]

    def test_seven_participants_within_range(self):
        teams = form_random_teams([f"P{i}" for i in range(7)], seed=1)
        assert sorted(len(t) for t in teams) == [3, 4]

    def test_same_seed_same_assignment(self):
        people = [f"P{i}" for i in range(17)]
        assert form_random_teams(people, seed=9) == form_random_teams(people, seed=9)

    def test_partition_is_exact(self):
        people = [f"P{i}" for i in range(23)]
        teams = form_random_teams(people, seed=3)
        flat = [p for team in teams for p in team]
        assert sorted(flat) == sorted(people)

    @settings(max_examples=50, deadline=None)
    @given(n=st.integers(min_value=3, max_value=60), seed=st.integers(0, 999))
    def test_sizes_in_range_for_reasonable_headcounts(self, n, seed):
        teams = form_random_teams([f"P{i}" for i in range(n)], seed=seed)
        for team in teams:
            assert 3 <= len(team) <= 6
        flat = [p for team in teams for p in team]
        assert len(flat) == n and len(set(flat)) == n

    def test_random_fixed_roster_is_closed(self):
        roster = random_fixed_roster([f"P{i}" for i in range(9)], seed=2)
        assert all(team.status == "closed" for team in roster.teams)
        assert roster.team_of("P3") is not None


class TestNoDoubleMembership:
    def test_participant_on_single_team(self):
        roster = adhoc()
        for i in range(25):
            roster, _ = join(roster, f"P{i}", i * HOUR)
        seen: set[str] = set()
        for team in roster.teams:
            for name in team.participant_names():
                assert name not in seen
                seen.add(name)


def test_parse_duration():
    assert parse_duration("6h") == 6 * HOUR
    assert parse_duration("30m") == 1800.0
    assert parse_duration("45s") == 45.0
    assert parse_duration(90) == 90.0
