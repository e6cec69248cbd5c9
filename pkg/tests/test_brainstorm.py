"""Brainstorming protocol: events, votes, pruning, checklist, transcript replay."""
from __future__ import annotations

import random
import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from argbench import brainstorm as bs
from argbench import fileformat
from argbench.brainstorm import (
    CredibilityBallot,
    Event,
    ItemKind,
    NonMemberError,
    ProtocolError,
    aggregate_credibility,
    apply_event,
    new_state,
    next_task,
    prune_zero_vote_versions,
    team_version,
)
from argbench.scale import ProbabilityLabel as L

MEMBERS = ["P1", "P2", "P3"]


def fresh() -> bs.BrainstormState:
    return new_state("problem text", "What happened?", MEMBERS)


def ev(kind: str, actor: str, at: float = 0.0, **payload) -> Event:
    return Event(kind=kind, actor=actor, payload=payload, at=at)


def replay_transcript():
    state, events = fileformat.parse_brainstorm_script(
        open("fixtures/cesium_brainstorm.jsonl", encoding="utf-8").read()
    )
    for event in events:
        state = apply_event(state, event)
    return state


class TestEventMachinery:
    def test_propose_carries_author_vote(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="Was stolen"))
        item = state.items["a1"]
        assert item.versions[0].votes == {"P1"}
        assert state.flags_for("P2") == ["a1"] and state.flags_for("P3") == ["a1"]

    def test_reformulate_moves_vote_and_flags_others(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="Was stolen"))
        state = apply_event(
            state,
            ev("reformulate", "P2", item_id="a1", text="The cesium-137 canister was stolen"),
        )
        item = state.items["a1"]
        assert [v.text for v in item.versions] == [
            "Was stolen",
            "The cesium-137 canister was stolen",
        ]
        assert item.versions[0].votes == {"P1"}
        assert item.versions[1].votes == {"P2"}
        assert state.flags_for("P1") == ["a1"] and state.flags_for("P3") == ["a1"]
        assert state.flags_for("P2") == []

    def test_vote_moves_between_versions(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state = apply_event(state, ev("reformulate", "P2", item_id="a1", text="y"))
        state = apply_event(state, ev("vote", "P3", item_id="a1", version_id="v2"))
        assert state.items["a1"].versions[1].votes == {"P2", "P3"}
        state = apply_event(state, ev("vote", "P3", item_id="a1", version_id="v1"))
        assert state.items["a1"].versions[0].votes == {"P1", "P3"}
        assert state.items["a1"].versions[1].votes == {"P2"}

    def test_vote_idempotent(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        again = apply_event(state, ev("vote", "P1", item_id="a1", version_id="v1"))
        assert again.items["a1"].versions[0].votes == {"P1"}

    def test_vote_for_missing_version_rejected(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        with pytest.raises(ProtocolError):
            apply_event(state, ev("vote", "P2", item_id="a1", version_id="v9"))

    def test_non_member_rejected(self):
        with pytest.raises(NonMemberError):
            apply_event(fresh(), ev("propose", "P9", item_kind="answer", text="x"))

    def test_dead_item_rejected(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state.items["a1"].deleted = True
        with pytest.raises(ProtocolError):
            apply_event(state, ev("vote", "P2", item_id="a1", version_id="v1"))

    def test_reject_withdraws_vote_and_flags(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state = apply_event(state, ev("reject", "P1", item_id="a1", justification="concede"))
        assert state.items["a1"].versions[0].votes == set()
        assert state.items["a1"].rejected_by == [("P1", "concede")]
        assert state.flags_for("P2") == ["a1"]

    def test_apply_event_is_pure(self):
        state = fresh()
        apply_event(state, ev("propose", "P1", item_kind="answer", text="x"))
        assert state.items == {} and state.seq == 0


class TestPruning:
    def test_pruning_deferred_while_flagged(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state = apply_event(state, ev("reformulate", "P1", item_id="a1", text="better"))
        # P1's vote moved to v2, v1 is empty, but P2/P3 have not reviewed yet
        assert [v.version_id for v in state.items["a1"].versions] == ["v1", "v2"]
        state = apply_event(state, ev("mark_reviewed", "P2", target="a1"))
        assert [v.version_id for v in state.items["a1"].versions] == ["v1", "v2"]
        state = apply_event(state, ev("mark_reviewed", "P3", target="a1"))
        assert [v.version_id for v in state.items["a1"].versions] == ["v2"]

    def test_version_with_vote_retained(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state = prune_zero_vote_versions(state)
        assert len(state.items["a1"].versions) == 1

    def test_conceded_item_deleted(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state = apply_event(state, ev("reject", "P1", item_id="a1", justification="mine, withdrawn"))
        state = apply_event(state, ev("mark_reviewed", "P2", target="a1"))
        state = apply_event(state, ev("mark_reviewed", "P3", target="a1"))
        assert state.items["a1"].deleted
        assert state.items["a1"].versions == []


class TestTeamVersion:
    def test_most_votes_wins(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x", at=1))
        state = apply_event(state, ev("reformulate", "P2", item_id="a1", text="y", at=2))
        state = apply_event(state, ev("vote", "P3", item_id="a1", version_id="v2", at=3))
        assert team_version(state.items["a1"]).text == "y"

    def test_tie_broken_by_earliest_creation(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x", at=1))
        state = apply_event(state, ev("reformulate", "P2", item_id="a1", text="y", at=2))
        assert team_version(state.items["a1"]).text == "x"

    def test_empty_item_has_no_team_version(self):
        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="x"))
        state.items["a1"].versions = []
        assert team_version(state.items["a1"]) is None


class TestAggregateCredibility:
    def test_paper_example(self):
        ballot = CredibilityBallot(
            "E1", {"P1": L.LIKELY, "P2": L.MORE_THAN_LIKELY, "P3": L.BARELY_LIKELY}
        )
        assert aggregate_credibility(ballot) is L.LIKELY

    def test_singleton(self):
        assert aggregate_credibility(CredibilityBallot("E1", {"P1": L.LIKELY})) is L.LIKELY

    def test_even_count_takes_lower_middle(self):
        ballot = CredibilityBallot("E1", {"P1": L.LIKELY, "P2": L.MORE_THAN_LIKELY})
        assert aggregate_credibility(ballot) is L.LIKELY

    def test_empty_ballot_rejected(self):
        with pytest.raises(ProtocolError):
            aggregate_credibility(CredibilityBallot("E1", {}))

    def test_500_random_ballots_match_median_oracle(self):
        rng = random.Random(42)
        labels = list(L)
        for _ in range(500):
            n = rng.randint(1, 9)
            ballot = CredibilityBallot(
                "E1", {f"P{i}": rng.choice(labels) for i in range(n)}
            )
            expected = L(statistics.median_low(sorted(v.rank for v in ballot.assessments.values())))
            got = aggregate_credibility(ballot)
            assert got is expected
            ranks = [v.rank for v in ballot.assessments.values()]
            assert min(ranks) <= got.rank <= max(ranks)


class TestChecklist:
    def test_fresh_participant_reads_problem_first(self):
        assert next_task(fresh(), "P1").task == "read-problem"

    def test_review_comes_before_everything_after_edits(self):
        state = apply_event(fresh(), ev("mark_reviewed", "P1", target="problem"))
        state = apply_event(state, ev("propose", "P2", item_kind="answer", text="x"))
        task = next_task(state, "P1")
        assert task.task == "review-updates"
        assert task.targets == ("a1",)

    def test_propose_answers_when_none(self):
        state = apply_event(fresh(), ev("mark_reviewed", "P1", target="problem"))
        assert next_task(state, "P1").task == "propose-answers"

    def test_non_member_rejected(self):
        with pytest.raises(NonMemberError):
            next_task(fresh(), "P9")

    def test_transcript_ends_done_for_everyone(self):
        state = replay_transcript()
        for member in MEMBERS:
            assert next_task(state, member).done


class TestTranscriptReplay:
    def test_final_listing_matches_transcript(self):
        state = replay_transcript()
        answers = state.live_items(ItemKind.ANSWER)
        assert len(answers) == 3
        texts = {team_version(a).text for a in answers}
        assert texts == {
            "The cesium-137 canister was stolen",
            "The cesium-137 canister was misplaced",
            "The cesium-137 canister is being used in a project of the XYZ "
            "Company without having been checked out from XYZ warehouse.",
        }
        for answer in answers:
            tv = team_version(answer)
            assert tv.votes == {"P1", "P2", "P3"}
            # zero-vote originals are pruned: one surviving version each
            assert len(answer.versions) == 1

    def test_was_lost_removed(self):
        state = replay_transcript()
        assert state.items["a3"].deleted
        assert state.items["a3"].versions == []

    def test_no_zero_vote_versions_survive(self):
        state = replay_transcript()
        for item in state.live_items():
            for version in item.versions:
                assert version.votes

    def test_team_credibilities(self):
        state = replay_transcript()
        assert aggregate_credibility(state.ballots["E1"]) is L.LIKELY
        assert aggregate_credibility(state.ballots["E2"]) is L.ALMOST_CERTAIN
        assert aggregate_credibility(state.ballots["E3"]) is L.VERY_LIKELY
        assert aggregate_credibility(state.ballots["E4"]) is L.MORE_THAN_LIKELY
        assert aggregate_credibility(state.ballots["E5"]) is L.LIKELY

    def test_replay_is_deterministic(self):
        first = bs.to_view(replay_transcript())
        second = bs.to_view(replay_transcript())
        assert first == second


class TestImportInformal:
    def test_cesium_import_builds_skeleton(self):
        from argbench.model import import_informal

        state = replay_transcript()
        tree = import_informal(state, "P1")
        assert len(tree.tops) == 3
        assert tree.question == "What happened to the cesium-137 canister?"
        assert tree.evidence["E1"].credibility is L.LIKELY
        assert set(tree.evidence) == {"E1", "E2", "E3", "E4", "E5"}
        # every link's relevance awaits the analyst
        assert all(link.relevance is None for link in tree.links.values())
        from argbench.model import validate

        assert validate(tree) == []

    def test_import_before_team_versions_not_ready(self):
        from argbench.model import NotReadyError, import_informal

        with pytest.raises(NotReadyError):
            import_informal(fresh(), "P1")

    def test_single_hypothesis_import(self):
        from argbench.model import import_informal

        state = apply_event(fresh(), ev("propose", "P1", item_kind="answer", text="only one"))
        tree = import_informal(state, "P1")
        assert len(tree.tops) == 1


# ---------------------------------------------------------------------------
# randomized protocol properties
# ---------------------------------------------------------------------------


def random_walk(seed: int, steps: int) -> tuple[bs.BrainstormState, list[Event]]:
    rng = random.Random(seed)
    state = fresh()
    events: list[Event] = []
    clock = 0.0
    for _ in range(steps):
        clock += 1.0
        actor = rng.choice(MEMBERS)
        live = state.live_items()
        choices = ["propose"]
        if live:
            choices += ["vote", "reformulate", "reject", "mark_reviewed"]
        answers = state.live_items(ItemKind.ANSWER)
        arguments = state.live_items(ItemKind.ARGUMENT)
        if arguments:
            choices.append("associate_evidence")
        tags = sorted(
            {i.evidence_tag for i in state.live_items(ItemKind.EVIDENCE) if i.evidence_tag}
        )
        if tags:
            choices.append("assess_credibility")
        kind = rng.choice(choices)
        if kind == "propose":
            if answers and rng.random() < 0.5:
                event = ev(
                    "propose", actor, clock,
                    item_kind="informal-argument",
                    parent_id=rng.choice(answers).id,
                    text=f"argument {clock}",
                )
            else:
                event = ev("propose", actor, clock, item_kind="answer", text=f"answer {clock}")
        elif kind == "vote":
            item = rng.choice(live)
            if not item.versions:
                continue
            version = rng.choice(item.versions)
            event = ev("vote", actor, clock, item_id=item.id, version_id=version.version_id)
        elif kind == "reformulate":
            item = rng.choice(live)
            event = ev("reformulate", actor, clock, item_id=item.id, text=f"text {clock}")
        elif kind == "reject":
            item = rng.choice(live)
            event = ev("reject", actor, clock, item_id=item.id, justification="because")
        elif kind == "mark_reviewed":
            item = rng.choice(live)
            event = ev("mark_reviewed", actor, clock, target=item.id)
        elif kind == "associate_evidence":
            arg = rng.choice(arguments)
            tag = f"E{rng.randint(1, 5)}"
            event = ev(
                "associate_evidence", actor, clock,
                argument_id=arg.id, tag=tag, name=f"item {tag}", polarity=rng.choice(
                    ["favoring", "disfavoring"]
                ),
            )
        else:
            event = ev(
                "assess_credibility", actor, clock,
                tag=rng.choice(tags), label=rng.choice(list(L)),
            )
        state = apply_event(state, event)
        events.append(event)
    return state, events


class TestProtocolProperties:
    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_one_vote_per_participant_per_item(self, seed):
        state, _ = random_walk(seed, 40)
        for item in state.items.values():
            voters = [p for v in item.versions for p in v.votes]
            assert len(voters) == len(set(voters))
            assert len(voters) <= len(MEMBERS)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_replaying_log_reproduces_state(self, seed):
        state, events = random_walk(seed, 40)
        replayed = fresh()
        for event in events:
            replayed = apply_event(replayed, event)
        assert bs.to_view(replayed) == bs.to_view(state)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_pruning_safety(self, seed):
        # after a full review sweep, no zero-vote version survives
        state, _ = random_walk(seed, 30)
        clock = 1000.0
        for member in MEMBERS:
            for item_id in list(state.flags_for(member)):
                clock += 1
                if state.items[item_id].deleted:
                    continue
                state = apply_event(state, ev("mark_reviewed", member, clock, target=item_id))
        for item in state.live_items():
            for version in item.versions:
                assert version.votes

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_checklist_terminates(self, seed):
        # a bot that always does what next_task suggests reaches "done"
        state, _ = random_walk(seed, 20)
        clock = 2000.0
        for member in MEMBERS:
            for _ in range(200):
                task = next_task(state, member)
                if task.done:
                    break
                clock += 1
                if task.task == "read-problem":
                    event = ev("mark_reviewed", member, clock, target="problem")
                elif task.task == "review-updates":
                    event = ev("mark_reviewed", member, clock, target=task.targets[0])
                elif task.task == "reformulate-question":
                    event = ev("mark_reviewed", member, clock, target=task.targets[0])
                elif task.task == "propose-answers":
                    if task.targets:
                        event = ev("mark_reviewed", member, clock, target=task.targets[0])
                    else:
                        event = ev("propose", member, clock, item_kind="answer", text="bot answer")
                elif task.task == "argue-answers":
                    target = task.targets[0]
                    if target.startswith("a"):
                        event = ev(
                            "propose", member, clock,
                            item_kind="informal-argument", parent_id=target,
                            text="bot argument",
                        )
                    else:
                        event = ev("mark_reviewed", member, clock, target=target)
                elif task.task == "associate-evidence":
                    target = task.targets[0]
                    if target.startswith("g"):
                        event = ev(
                            "associate_evidence", member, clock,
                            argument_id=target, tag="E1", name="bot item",
                        )
                    else:
                        event = ev("mark_reviewed", member, clock, target=target)
                elif task.task == "assess-credibility":
                    event = ev(
                        "assess_credibility", member, clock,
                        tag=task.targets[0], label=L.LIKELY,
                    )
                else:
                    raise AssertionError(f"unexpected task {task}")
                state = apply_event(state, event)
            else:
                raise AssertionError(f"checklist did not terminate for {member}")
            assert next_task(state, member).done
