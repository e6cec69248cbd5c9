"""Team assignment policies.

Two policies: fixed random teams (drawn once with a seed and never
changed), and ad-hoc timed teams where an open team accepts joiners until
it hits the cap, closes at the six-hour mark when at least six people
showed up, and otherwise lingers up to twelve hours waiting for a sixth.
Time is always injected by the caller; nothing in here reads a wall
clock, so every scenario can be replayed deterministically.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

HOUR = 3600.0


class RosterError(ValueError):
    pass


class ClockRegressionError(RosterError):
    pass


@dataclass(frozen=True)
class TeamParameters:
    """Window and size parameters, times in seconds."""

    max_size: int = 12
    window1: float = 6 * HOUR
    fallback_size: int = 6
    window2: float = 12 * HOUR
    internal_min: int = 3
    internal_max: int = 6


@dataclass
class Team:
    id: str
    opened_at: float
    members: list[tuple[str, float]] = field(default_factory=list)
    status: str = "open"  # open | closed
    closed_at: float | None = None

    @property
    def size(self) -> int:
        return len(self.members)

    def size_at(self, when: float) -> int:
        return sum(1 for (_, joined) in self.members if joined <= when)

    def participant_names(self) -> list[str]:
        return [p for (p, _) in self.members]


@dataclass
class Roster:
    policy: str = "ad-hoc"  # ad-hoc | random-fixed
    parameters: TeamParameters = field(default_factory=TeamParameters)
    teams: list[Team] = field(default_factory=list)
    last_event_at: float = float("-inf")

    def open_team(self) -> Team | None:
        for team in self.teams:
            if team.status == "open":
                return team
        return None

    def team_of(self, participant: str) -> Team | None:
        for team in self.teams:
            if participant in team.participant_names():
                return team
        return None

    def copy(self) -> Roster:
        import copy as _copy

        return _copy.deepcopy(self)


def _check_clock(roster: Roster, now: float) -> None:
    if now < roster.last_event_at:
        raise ClockRegressionError(
            f"clock went backwards: {now} < {roster.last_event_at}"
        )


def _deadline_close(team: Team, params: TeamParameters, now: float, *, strict: bool) -> None:
    """Close an open team whose time window has elapsed.

    With ``strict`` the boundary instant itself stays open, so a join
    arriving exactly at a deadline is processed before the closure.
    """
    if team.status != "open":
        return
    w1_end = team.opened_at + params.window1
    w2_end = team.opened_at + params.window2

    def passed(deadline: float) -> bool:
        return now > deadline if strict else now >= deadline

    if passed(w1_end) and team.size_at(w1_end) >= params.fallback_size:
        team.status = "closed"
        team.closed_at = w1_end
    elif passed(w2_end):
        team.status = "closed"
        team.closed_at = w2_end


def join(roster: Roster, participant: str, now: float) -> tuple[Roster, str]:
    """Add a participant under the ad-hoc policy; returns the team id.

    Creates a new team when none is open, closes the team at the cap,
    and closes a past-the-first-window team as soon as it reaches the
    fallback size.
    """
    if roster.policy != "ad-hoc":
        raise RosterError("join applies to the ad-hoc policy only")
    _check_clock(roster, now)
    if roster.team_of(participant) is not None:
        raise RosterError(f"{participant} already belongs to a team")

    out = roster.copy()
    out.last_event_at = max(out.last_event_at, now)
    params = out.parameters

    team = out.open_team()
    if team is not None:
        _deadline_close(team, params, now, strict=True)
        if team.status != "open":
            team = None
    if team is None:
        team = Team(id=f"T{len(out.teams) + 1}", opened_at=now)
        out.teams.append(team)

    team.members.append((participant, now))

    if team.size >= params.max_size:
        team.status = "closed"
        team.closed_at = now
    else:
        w1_end = team.opened_at + params.window1
        if now >= w1_end:
            if team.size_at(w1_end) >= params.fallback_size:
                team.status = "closed"
                team.closed_at = w1_end
            elif team.size >= params.fallback_size:
                team.status = "closed"
                team.closed_at = now
            else:
                _deadline_close(team, params, now, strict=False)
    return out, team.id


def tick(roster: Roster, now: float) -> Roster:
    """Advance injected time, closing any team whose window has elapsed.

    Idempotent at a fixed instant.
    """
    _check_clock(roster, now)
    out = roster.copy()
    out.last_event_at = max(out.last_event_at, now)
    team = out.open_team()
    if team is not None:
        _deadline_close(team, out.parameters, now, strict=False)
    return out


def form_random_teams(
    participants: list[str],
    seed: int,
    size_range: tuple[int, int] = (3, 6),
) -> list[list[str]]:
    """Partition participants into fixed teams of 3 to 6 members.

    Deterministic under the seed.  Team count targets groups of four; a
    remainder group smaller than the minimum merges into the previous
    team, which may then exceed the preferred size but stays as close to
    the range as the head count allows.
    """
    if not participants:
        raise RosterError("at least one participant is required")
    lo, hi = size_range
    preferred = max(lo, min(hi, (lo + hi + 1) // 2))
    pool = sorted(participants)
    random.Random(seed).shuffle(pool)

    count = max(1, math.ceil(len(pool) / preferred))
    base, extra = divmod(len(pool), count)
    sizes = [base + 1 if i < extra else base for i in range(count)]
    if len(sizes) > 1 and sizes[-1] < lo:
        sizes[-2] += sizes[-1]
        sizes.pop()

    teams: list[list[str]] = []
    cursor = 0
    for size in sizes:
        teams.append(pool[cursor : cursor + size])
        cursor += size
    return teams


def random_fixed_roster(
    participants: list[str],
    seed: int,
    now: float = 0.0,
    size_range: tuple[int, int] = (3, 6),
) -> Roster:
    """Roster under the random-fixed policy: teams drawn once, closed."""
    roster = Roster(policy="random-fixed")
    for assignment in form_random_teams(participants, seed, size_range):
        team = Team(
            id=f"T{len(roster.teams) + 1}",
            opened_at=now,
            members=[(p, now) for p in assignment],
            status="closed",
            closed_at=now,
        )
        roster.teams.append(team)
    roster.last_event_at = now
    return roster


def parse_duration(value: float | int | str) -> float:
    """Duration in seconds from a number or an ``Nh``/``Nm``/``Ns`` string."""
    if isinstance(value, (int, float)):
        return float(value)
    text = value.strip().lower()
    units = {"h": HOUR, "m": 60.0, "s": 1.0}
    if text and text[-1] in units:
        return float(text[:-1]) * units[text[-1]]
    return float(text)


def roster_view(roster: Roster) -> dict:
    return {
        "policy": roster.policy,
        "parameters": {
            "max_size": roster.parameters.max_size,
            "window1_hours": roster.parameters.window1 / HOUR,
            "fallback_size": roster.parameters.fallback_size,
            "window2_hours": roster.parameters.window2 / HOUR,
        },
        "teams": [
            {
                "id": team.id,
                "status": team.status,
                "opened_at": team.opened_at,
                "closed_at": team.closed_at,
                "members": [
                    {"participant": p, "joined_at": at} for (p, at) in team.members
                ],
            }
            for team in roster.teams
        ],
    }
