"""Asynchronous team brainstorming over versioned, voted items.

Participants propose answers to the problem's question, then informal
arguments for each answer, then evidence for each argument, and finally
individual credibility assessments that aggregate into a team value.
Every text item is versioned; a participant holds at most one vote per
item and the vote follows them between versions.  Changes made by one
member flag the item as incomplete for the others, whose guided checklist
surfaces it for review.  Once everyone has reviewed an item, versions
left without votes are pruned, and a rejected item whose votes are all
withdrawn is deleted.

All mutations are events applied in a single total order; ``apply_event``
is a pure transition (the input state is never modified), so replaying a
log reproduces the state exactly.
"""
from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field

from .scale import ProbabilityLabel

PROBLEM_TARGET = "problem"

PHASES = ("question", "answers", "arguments", "evidence", "credibility")


class ProtocolError(ValueError):
    """An event was malformed or not allowed in the current state."""


class NonMemberError(ProtocolError):
    """The acting participant is not on the team."""


class ItemKind(enum.Enum):
    QUESTION = "question"
    ANSWER = "answer"
    ARGUMENT = "informal-argument"
    EVIDENCE = "evidence-association"

    @property
    def id_prefix(self) -> str:
        return {"question": "q", "answer": "a", "informal-argument": "g",
                "evidence-association": "ev"}[self.value]


_PARENT_KIND: dict[ItemKind, ItemKind | None] = {
    ItemKind.QUESTION: None,
    ItemKind.ANSWER: None,  # answers belong to the problem's question
    ItemKind.ARGUMENT: ItemKind.ANSWER,
    ItemKind.EVIDENCE: ItemKind.ARGUMENT,
}


@dataclass
class ItemVersion:
    version_id: str
    text: str
    author: str
    created_at: float
    votes: set[str] = field(default_factory=set)


@dataclass
class BrainstormItem:
    id: str
    kind: ItemKind
    proposed_by: str
    parent_id: str | None = None
    versions: list[ItemVersion] = field(default_factory=list)
    rejected_by: list[tuple[str, str]] = field(default_factory=list)
    deleted: bool = False
    version_counter: int = 0
    # evidence-association metadata
    evidence_tag: str | None = None
    evidence_name: str | None = None
    evidence_body: str | None = None
    evidence_polarity: str | None = None

    def version(self, version_id: str) -> ItemVersion:
        for v in self.versions:
            if v.version_id == version_id:
                return v
        raise ProtocolError(f"item {self.id} has no version {version_id}")

    def voter_version(self, participant: str) -> ItemVersion | None:
        for v in self.versions:
            if participant in v.votes:
                return v
        return None


@dataclass
class CredibilityBallot:
    evidence_tag: str
    assessments: dict[str, ProbabilityLabel] = field(default_factory=dict)


@dataclass(frozen=True)
class Event:
    """One brainstorming action as recorded in the event log."""

    kind: str
    actor: str
    payload: dict
    at: float = 0.0


@dataclass(frozen=True)
class Task:
    """Checklist step descriptor returned by :func:`next_task`."""

    task: str
    targets: tuple[str, ...] = ()

    @property
    def done(self) -> bool:
        return self.task == "done"


@dataclass
class BrainstormState:
    problem: str
    question: str
    members: list[str]
    items: dict[str, BrainstormItem] = field(default_factory=dict)
    ballots: dict[str, CredibilityBallot] = field(default_factory=dict)
    # (participant, item_id): the item changed since this participant last saw it
    flags: set[tuple[str, str]] = field(default_factory=set)
    # (participant, item_id): the participant has acted on or reviewed the item
    engaged: set[tuple[str, str]] = field(default_factory=set)
    # participant -> explicitly completed checklist markers
    phase_marks: dict[str, set[str]] = field(default_factory=dict)
    seq: int = 0
    item_counters: dict[str, int] = field(default_factory=dict)

    def copy(self) -> BrainstormState:
        return copy.deepcopy(self)

    def live_items(self, kind: ItemKind | None = None) -> list[BrainstormItem]:
        return [
            item
            for item in self.items.values()
            if not item.deleted and (kind is None or item.kind is kind)
        ]

    def live_children(self, parent_id: str, kind: ItemKind) -> list[BrainstormItem]:
        return [
            item
            for item in self.live_items(kind)
            if item.parent_id == parent_id
        ]

    def item(self, item_id: str) -> BrainstormItem:
        item = self.items.get(item_id)
        if item is None:
            raise ProtocolError(f"unknown item id: {item_id}")
        return item

    def live_item(self, item_id: str) -> BrainstormItem:
        item = self.item(item_id)
        if item.deleted:
            raise ProtocolError(f"item {item_id} has been deleted")
        return item

    def flags_for(self, participant: str) -> list[str]:
        return sorted(item_id for (p, item_id) in self.flags if p == participant)


def new_state(problem: str, question: str, members: list[str]) -> BrainstormState:
    return BrainstormState(problem=problem, question=question, members=list(members))


def with_members(state: BrainstormState, members: list[str]) -> BrainstormState:
    """Roster changes arrive from outside the brainstorm stream."""
    out = state.copy()
    for m in members:
        if m not in out.members:
            out.members.append(m)
    return out


# ---------------------------------------------------------------------------
# event application
# ---------------------------------------------------------------------------


def apply_event(state: BrainstormState, event: Event) -> BrainstormState:
    """Apply one event, returning the successor state.

    Raises :class:`ProtocolError` for malformed events, references to dead
    items, or non-member actors; in that case the input state stands.
    """
    if event.actor not in state.members:
        raise NonMemberError(f"{event.actor} is not a member of this team")

    out = state.copy()
    handler = _HANDLERS.get(event.kind)
    if handler is None:
        raise ProtocolError(f"unknown event kind: {event.kind}")
    handler(out, event)
    out.seq += 1
    _prune(out)
    return out


def _flag_others(state: BrainstormState, item_id: str, actor: str) -> None:
    for member in state.members:
        if member != actor:
            state.flags.add((member, item_id))
    state.flags.discard((actor, item_id))


def _engage(state: BrainstormState, actor: str, item_id: str) -> None:
    state.engaged.add((actor, item_id))
    state.flags.discard((actor, item_id))


def _next_item_id(state: BrainstormState, kind: ItemKind) -> str:
    n = state.item_counters.get(kind.id_prefix, 0) + 1
    state.item_counters[kind.id_prefix] = n
    return f"{kind.id_prefix}{n}"


def _new_version(item: BrainstormItem, text: str, author: str, at: float) -> ItemVersion:
    item.version_counter += 1
    version = ItemVersion(
        version_id=f"v{item.version_counter}",
        text=text,
        author=author,
        created_at=at,
        votes={author},
    )
    item.versions.append(version)
    return version


def _move_vote(item: BrainstormItem, participant: str, version: ItemVersion) -> None:
    for v in item.versions:
        v.votes.discard(participant)
    version.votes.add(participant)


def _apply_propose(state: BrainstormState, event: Event) -> None:
    try:
        kind = ItemKind(event.payload["item_kind"])
        text = event.payload["text"]
    except (KeyError, ValueError) as exc:
        raise ProtocolError(f"malformed propose event: {exc}") from None
    if kind is ItemKind.EVIDENCE:
        raise ProtocolError("evidence is proposed through associate_evidence")
    parent_id = event.payload.get("parent_id")
    parent_kind = _PARENT_KIND[kind]
    if parent_kind is not None:
        if parent_id is None:
            raise ProtocolError(f"a {kind.value} item needs a parent")
        parent = state.live_item(parent_id)
        if parent.kind is not parent_kind:
            raise ProtocolError(
                f"a {kind.value} item belongs under a {parent_kind.value}, "
                f"not {parent.kind.value}"
            )
    item_id = _next_item_id(state, kind)
    item = BrainstormItem(
        id=item_id, kind=kind, proposed_by=event.actor, parent_id=parent_id
    )
    state.items[item_id] = item
    _new_version(item, text, event.actor, event.at)
    _flag_others(state, item_id, event.actor)
    _engage(state, event.actor, item_id)


def _apply_reformulate(state: BrainstormState, event: Event) -> None:
    item = state.live_item(event.payload["item_id"])
    text = event.payload.get("text")
    if not text:
        raise ProtocolError("reformulation needs text")
    version = _new_version(item, text, event.actor, event.at)
    _move_vote(item, event.actor, version)
    _flag_others(state, item.id, event.actor)
    _engage(state, event.actor, item.id)


def _apply_vote(state: BrainstormState, event: Event) -> None:
    item = state.live_item(event.payload["item_id"])
    version = item.version(event.payload["version_id"])
    _move_vote(item, event.actor, version)
    _engage(state, event.actor, item.id)


def _apply_reject(state: BrainstormState, event: Event) -> None:
    item = state.live_item(event.payload["item_id"])
    justification = event.payload.get("justification", "")
    item.rejected_by = [
        (p, j) for (p, j) in item.rejected_by if p != event.actor
    ] + [(event.actor, justification)]
    # Rejecting withdraws the participant's vote from the item.
    for v in item.versions:
        v.votes.discard(event.actor)
    _flag_others(state, item.id, event.actor)
    _engage(state, event.actor, item.id)


def _apply_associate_evidence(state: BrainstormState, event: Event) -> None:
    payload = event.payload
    try:
        argument_id = payload["argument_id"]
        tag = payload["tag"]
        name = payload["name"]
        polarity = payload.get("polarity", "favoring")
    except KeyError as exc:
        raise ProtocolError(f"malformed associate_evidence event: missing {exc}") from None
    if polarity not in ("favoring", "disfavoring"):
        raise ProtocolError(f"bad polarity: {polarity}")
    parent = state.live_item(argument_id)
    if parent.kind is not ItemKind.ARGUMENT:
        raise ProtocolError("evidence associates to an informal argument")
    item_id = _next_item_id(state, ItemKind.EVIDENCE)
    item = BrainstormItem(
        id=item_id,
        kind=ItemKind.EVIDENCE,
        proposed_by=event.actor,
        parent_id=argument_id,
        evidence_tag=tag,
        evidence_name=name,
        evidence_body=payload.get("body", ""),
        evidence_polarity=polarity,
    )
    state.items[item_id] = item
    text = payload.get("text") or f"{tag} {name}"
    _new_version(item, text, event.actor, event.at)
    _flag_others(state, item_id, event.actor)
    _engage(state, event.actor, item_id)
    state.ballots.setdefault(tag, CredibilityBallot(evidence_tag=tag))


def _apply_assess_credibility(state: BrainstormState, event: Event) -> None:
    tag = event.payload.get("tag")
    label = event.payload.get("label")
    if not tag or label is None:
        raise ProtocolError("credibility assessment needs a tag and a label")
    if not isinstance(label, ProbabilityLabel):
        raise ProtocolError("credibility label must be a probability label")
    known = {
        item.evidence_tag
        for item in state.live_items(ItemKind.EVIDENCE)
        if item.evidence_tag
    }
    if tag not in known:
        raise ProtocolError(f"no live evidence association carries tag {tag}")
    ballot = state.ballots.setdefault(tag, CredibilityBallot(evidence_tag=tag))
    ballot.assessments[event.actor] = label


def _apply_mark_reviewed(state: BrainstormState, event: Event) -> None:
    target = event.payload.get("target")
    if target == PROBLEM_TARGET:
        state.phase_marks.setdefault(event.actor, set()).add(PROBLEM_TARGET)
    elif target in PHASES:
        state.phase_marks.setdefault(event.actor, set()).add(target)
    elif target in state.items:
        state.live_item(target)
        _engage(state, event.actor, target)
    else:
        raise ProtocolError(f"nothing to review under target {target!r}")


_HANDLERS = {
    "propose": _apply_propose,
    "reformulate": _apply_reformulate,
    "vote": _apply_vote,
    "reject": _apply_reject,
    "associate_evidence": _apply_associate_evidence,
    "assess_credibility": _apply_assess_credibility,
    "mark_reviewed": _apply_mark_reviewed,
}


# ---------------------------------------------------------------------------
# pruning and consensus
# ---------------------------------------------------------------------------


def _prune(state: BrainstormState) -> None:
    for item in state.items.values():
        if item.deleted:
            continue
        if any(item.id == flagged for (_, flagged) in state.flags):
            continue  # someone still has to review the latest changes
        item.versions = [v for v in item.versions if v.votes]
        if not item.versions and item.rejected_by:
            rejecters = {p for (p, _) in item.rejected_by}
            majority = len(rejecters) * 2 > len(state.members)
            conceded = item.proposed_by in rejecters
            if majority or conceded:
                item.deleted = True
                state.flags = {
                    (p, iid) for (p, iid) in state.flags if iid != item.id
                }


def prune_zero_vote_versions(state: BrainstormState) -> BrainstormState:
    """Drop zero-vote versions of fully reviewed items; delete conceded items.

    Runs automatically after every event; exposed for explicit sweeps.
    """
    out = state.copy()
    _prune(out)
    return out


def team_version(item: BrainstormItem) -> ItemVersion | None:
    """The consensus formulation: most votes, earliest creation on ties."""
    if item.deleted or not item.versions:
        return None
    return min(
        item.versions,
        key=lambda v: (-len(v.votes), v.created_at, int(v.version_id[1:])),
    )


def aggregate_credibility(ballot: CredibilityBallot) -> ProbabilityLabel:
    """Ordinal median of the individual assessments.

    With an even count the lower of the two middle labels wins, keeping
    the team value conservative.
    """
    if not ballot.assessments:
        raise ProtocolError(f"ballot for {ballot.evidence_tag} has no assessments")
    ranks = sorted(label.rank for label in ballot.assessments.values())
    return ProbabilityLabel(ranks[(len(ranks) - 1) // 2])


# ---------------------------------------------------------------------------
# guided checklist
# ---------------------------------------------------------------------------


def next_task(state: BrainstormState, participant: str) -> Task:
    """The first incomplete checklist step for this participant.

    Fixed order: read the problem independently, review items flagged
    incomplete, question reformulation, answers, informal arguments per
    answer, evidence per argument, credibility per evidence item.  The
    checklist is advisory; events are legal in any order.
    """
    if participant not in state.members:
        raise NonMemberError(f"{participant} is not a member of this team")

    marks = state.phase_marks.get(participant, set())
    if PROBLEM_TARGET not in marks:
        return Task("read-problem")

    flagged = state.flags_for(participant)
    if flagged:
        return Task("review-updates", tuple(flagged))

    def unengaged(items: list[BrainstormItem]) -> list[str]:
        return sorted(
            item.id for item in items if (participant, item.id) not in state.engaged
        )

    if "question" not in marks:
        pending = unengaged(state.live_items(ItemKind.QUESTION))
        if pending:
            return Task("reformulate-question", tuple(pending))

    answers = state.live_items(ItemKind.ANSWER)
    if "answers" not in marks:
        if not answers:
            return Task("propose-answers")
        pending = unengaged(answers)
        if pending:
            return Task("propose-answers", tuple(pending))

    if "arguments" not in marks:
        bare = sorted(
            a.id for a in answers if not state.live_children(a.id, ItemKind.ARGUMENT)
        )
        if bare:
            return Task("argue-answers", tuple(bare))
        pending = unengaged(state.live_items(ItemKind.ARGUMENT))
        if pending:
            return Task("argue-answers", tuple(pending))

    arguments = state.live_items(ItemKind.ARGUMENT)
    if "evidence" not in marks:
        bare = sorted(
            g.id for g in arguments if not state.live_children(g.id, ItemKind.EVIDENCE)
        )
        if bare:
            return Task("associate-evidence", tuple(bare))
        pending = unengaged(state.live_items(ItemKind.EVIDENCE))
        if pending:
            return Task("associate-evidence", tuple(pending))

    if "credibility" not in marks:
        tags = sorted(
            {
                item.evidence_tag
                for item in state.live_items(ItemKind.EVIDENCE)
                if item.evidence_tag
            }
        )
        unassessed = [
            tag
            for tag in tags
            if participant not in state.ballots.get(tag, CredibilityBallot(tag)).assessments
        ]
        if unassessed:
            return Task("assess-credibility", tuple(unassessed))

    return Task("done")


# ---------------------------------------------------------------------------
# views
# ---------------------------------------------------------------------------


def to_view(state: BrainstormState) -> dict:
    """JSON-ready snapshot used by the service and the replay command."""
    items = []
    for item in state.items.values():
        tv = team_version(item)
        items.append(
            {
                "id": item.id,
                "kind": item.kind.value,
                "parent_id": item.parent_id,
                "deleted": item.deleted,
                "proposed_by": item.proposed_by,
                "rejected_by": [
                    {"participant": p, "justification": j} for p, j in item.rejected_by
                ],
                "team_version": tv.version_id if tv else None,
                "versions": [
                    {
                        "version_id": v.version_id,
                        "text": v.text,
                        "author": v.author,
                        "created_at": v.created_at,
                        "votes": sorted(v.votes),
                    }
                    for v in item.versions
                ],
                "evidence_tag": item.evidence_tag,
                "evidence_name": item.evidence_name,
                "evidence_polarity": item.evidence_polarity,
            }
        )
    ballots = {}
    for tag, ballot in sorted(state.ballots.items()):
        entry: dict = {
            "assessments": {
                p: label.token for p, label in sorted(ballot.assessments.items())
            }
        }
        if ballot.assessments:
            entry["team_credibility"] = aggregate_credibility(ballot).token
        ballots[tag] = entry
    return {
        "problem": state.problem,
        "question": state.question,
        "members": list(state.members),
        "sequence": state.seq,
        "items": items,
        "ballots": ballots,
        "incomplete": {
            member: state.flags_for(member) for member in state.members
        },
    }
