"""Event-sourced persistence: append-only logs per stream, replay on open.

Each problem owns three kinds of streams: ``roster`` (joins and clock
ticks), ``brainstorm`` (the team protocol), and ``analysis:<participant>``
(one per member, isolated).  Events are validated by applying them to a
copy of the current state; only successful transitions are written, one
JSON record per line, flushed and fsynced before the new state is
published.  Opening a store replays every log, so a crash or restart
reconstructs exactly the state that was acknowledged.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field

from . import brainstorm as bs
from . import teams
from .config import WorkbenchConfig
from .fileformat import event_from_dict, tree_from_dict, tree_to_dict
from .model import (
    AnalysisTree,
    NodeKind,
    Polarity,
    SourceKind,
    add_argument,
    add_evidence,
    add_hypothesis,
    add_link,
    assess_credibility,
    assess_relevance,
    import_informal,
    set_assumption,
    set_headline_template,
)
from .scale import parse_label

_PID_RE = re.compile(r"^[a-z0-9][a-z0-9-]{0,63}$")


class StorageError(RuntimeError):
    pass


class ConflictError(StorageError):
    """Optimistic-concurrency failure; carries the stream's current sequence."""

    def __init__(self, current_sequence: int):
        self.current_sequence = current_sequence
        super().__init__(f"stale sequence; stream is at {current_sequence}")


class UnknownProblemError(StorageError):
    pass


@dataclass(frozen=True)
class EventRecord:
    problem_id: str
    stream: str
    sequence: int
    timestamp: float
    actor: str
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "sequence": self.sequence,
                "timestamp": self.timestamp,
                "actor": self.actor,
                "kind": self.kind,
                "payload": self.payload,
            },
            ensure_ascii=False,
            sort_keys=True,
        )


@dataclass
class AnalysisState:
    tree: AnalysisTree
    report_edits: list[dict] = field(default_factory=list)
    no_assumptions_marked: bool = False


@dataclass
class ProblemState:
    problem_id: str
    question: str
    description: str = ""
    roster: teams.Roster = field(default_factory=teams.Roster)
    brainstorm: bs.BrainstormState = field(
        default_factory=lambda: bs.new_state("", "", [])
    )
    analyses: dict[str, AnalysisState] = field(default_factory=dict)
    tokens: dict[str, str] = field(default_factory=dict)  # token -> participant
    sequences: dict[str, int] = field(default_factory=dict)  # stream -> last seq

    def members(self) -> list[str]:
        seen: list[str] = []
        for team in self.roster.teams:
            for name in team.participant_names():
                if name not in seen:
                    seen.append(name)
        return seen


# ---------------------------------------------------------------------------
# per-stream transitions (pure: state in, state out)
# ---------------------------------------------------------------------------


def _apply_roster(state: ProblemState, record: EventRecord) -> None:
    if record.kind == "join":
        participant = record.payload["participant"]
        roster, _team_id = teams.join(state.roster, participant, record.timestamp)
        state.roster = roster
        token = record.payload.get("token")
        if token:
            state.tokens[token] = participant
        state.brainstorm = bs.with_members(state.brainstorm, [participant])
    elif record.kind == "tick":
        state.roster = teams.tick(state.roster, record.timestamp)
    else:
        raise StorageError(f"unknown roster event kind: {record.kind}")


def _apply_brainstorm(state: ProblemState, record: EventRecord) -> None:
    event = event_from_dict(
        {
            "kind": record.kind,
            "actor": record.actor,
            "at": record.timestamp,
            **record.payload,
        }
    )
    state.brainstorm = bs.apply_event(state.brainstorm, event)


def _analysis_label(payload: dict, key: str = "label"):
    value = payload.get(key)
    return parse_label(value) if value is not None else None


def _apply_analysis(state: ProblemState, participant: str, record: EventRecord) -> None:
    kind = record.kind
    payload = record.payload
    if kind == "import":
        # snapshot taken at import time keeps replay deterministic
        tree = tree_from_dict(payload["document"])
        state.analyses[participant] = AnalysisState(tree=tree)
        return
    analysis = state.analyses.get(participant)
    if analysis is None:
        raise StorageError(
            f"no formal analysis for {participant}; import the informal "
            f"analysis first"
        )
    tree = analysis.tree
    if kind == "assess_credibility":
        analysis.tree = assess_credibility(
            tree,
            payload["evidence_id"],
            _analysis_label(payload),
            payload.get("justification", ""),
        )
    elif kind == "assess_relevance":
        analysis.tree = assess_relevance(
            tree,
            payload["target_id"],
            _analysis_label(payload),
            payload.get("justification", ""),
        )
    elif kind == "set_assumption":
        analysis.tree = set_assumption(
            tree,
            payload["hypothesis_id"],
            _analysis_label(payload),
            payload.get("justification", ""),
        )
    elif kind == "add_evidence":
        analysis.tree = add_evidence(
            tree,
            payload["evidence_id"],
            payload.get("name", payload["evidence_id"]),
            payload.get("body", ""),
            SourceKind(payload["source_kind"]) if payload.get("source_kind") else None,
        )
    elif kind == "add_hypothesis":
        analysis.tree, _ = add_hypothesis(
            tree,
            payload["statement"],
            hypothesis_id=payload.get("hypothesis_id"),
            kind=NodeKind(payload.get("node_kind", "intermediate")),
            parent_argument=payload.get("parent_argument"),
            headline_template=payload.get("headline_template"),
        )
    elif kind == "add_argument":
        analysis.tree, _ = add_argument(
            tree,
            payload["hypothesis_id"],
            Polarity(payload.get("polarity", "favoring")),
            list(payload["sub_hypotheses"]),
            argument_id=payload.get("argument_id"),
            summary=payload.get("summary", ""),
        )
    elif kind == "add_link":
        analysis.tree, _ = add_link(
            tree,
            payload["evidence_id"],
            payload["hypothesis_id"],
            Polarity(payload.get("polarity", "favoring")),
            link_id=payload.get("link_id"),
            fact_leaf=bool(payload.get("fact_leaf", False)),
        )
    elif kind == "set_headline_template":
        analysis.tree = set_headline_template(
            tree, payload["hypothesis_id"], payload["template"]
        )
    elif kind == "edit_report":
        # validated against the generated report at append time (service);
        # replay trusts the stored record
        analysis.report_edits.append(
            {
                "section_id": payload["section_id"],
                "text": payload["text"],
                "author": record.actor,
                "at": record.timestamp,
            }
        )
    elif kind == "mark_no_assumptions":
        analysis.no_assumptions_marked = True
    else:
        raise StorageError(f"unknown analysis event kind: {kind}")


def apply_record(state: ProblemState, record: EventRecord) -> ProblemState:
    """Pure transition: returns the successor state, input untouched."""
    import copy

    out = copy.deepcopy(state)
    if record.stream == "roster":
        _apply_roster(out, record)
    elif record.stream == "brainstorm":
        _apply_brainstorm(out, record)
    elif record.stream.startswith("analysis:"):
        _apply_analysis(out, record.stream.split(":", 1)[1], record)
    else:
        raise StorageError(f"unknown stream: {record.stream}")
    out.sequences[record.stream] = record.sequence
    return out


# ---------------------------------------------------------------------------
# the store
# ---------------------------------------------------------------------------


class ProblemStore:
    """Directory-backed store; one subdirectory per problem."""

    def __init__(self, root: str, config: WorkbenchConfig | None = None):
        self.root = root
        self.config = config or WorkbenchConfig()
        self.states: dict[str, ProblemState] = {}
        os.makedirs(self._problems_dir(), exist_ok=True)
        self._replay_all()

    def _problems_dir(self) -> str:
        return os.path.join(self.root, "problems")

    def _problem_dir(self, problem_id: str) -> str:
        return os.path.join(self._problems_dir(), problem_id)

    def _stream_path(self, problem_id: str, stream: str) -> str:
        return os.path.join(
            self._problem_dir(problem_id), stream.replace(":", "-") + ".log"
        )

    # -- lifecycle -------------------------------------------------------

    def create_problem(
        self, problem_id: str, question: str, description: str = ""
    ) -> ProblemState:
        if not _PID_RE.match(problem_id):
            raise StorageError(
                f"problem id {problem_id!r} must be lowercase alphanumeric/hyphens"
            )
        if problem_id in self.states:
            raise StorageError(f"problem {problem_id} already exists")
        directory = self._problem_dir(problem_id)
        os.makedirs(directory, exist_ok=False)
        meta = {"problem_id": problem_id, "question": question, "description": description}
        with open(os.path.join(directory, "problem.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, ensure_ascii=False, indent=2)
            fh.flush()
            os.fsync(fh.fileno())
        state = ProblemState(problem_id=problem_id, question=question, description=description)
        state.brainstorm = bs.new_state(description or question, question, [])
        self.states[problem_id] = state
        return state

    def state(self, problem_id: str) -> ProblemState:
        try:
            return self.states[problem_id]
        except KeyError:
            raise UnknownProblemError(f"unknown problem: {problem_id}") from None

    def problem_ids(self) -> list[str]:
        return sorted(self.states)

    # -- appends ---------------------------------------------------------

    def append(
        self,
        problem_id: str,
        stream: str,
        *,
        kind: str,
        actor: str,
        payload: dict,
        timestamp: float,
        expected_sequence: int | None = None,
    ) -> tuple[int, ProblemState]:
        """Validate, persist, publish.  Returns (sequence, new state).

        ``expected_sequence`` is the optimistic-concurrency guard: it must
        equal the stream's current sequence.  A retry that lost its
        acknowledgment is recognized by an identical record already
        sitting at ``expected_sequence + 1`` and returns successfully
        without a second write.
        """
        state = self.state(problem_id)
        current = state.sequences.get(stream, 0)
        if expected_sequence is not None and expected_sequence != current:
            if expected_sequence == current - 1:
                stored = self._read_stream(problem_id, stream)
                previous = stored[-1]
                if (
                    previous.kind == kind
                    and previous.actor == actor
                    and previous.payload == payload
                ):
                    return previous.sequence, state
            raise ConflictError(current)
        record = EventRecord(
            problem_id=problem_id,
            stream=stream,
            sequence=current + 1,
            timestamp=timestamp,
            actor=actor,
            kind=kind,
            payload=payload,
        )
        new_state = apply_record(state, record)  # raises on invalid events
        path = self._stream_path(problem_id, stream)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(record.to_json() + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self.states[problem_id] = new_state
        return record.sequence, new_state

    # -- replay ----------------------------------------------------------

    def _read_stream(self, problem_id: str, stream: str) -> list[EventRecord]:
        path = self._stream_path(problem_id, stream)
        if not os.path.exists(path):
            return []
        records = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                raw = json.loads(line)
                records.append(
                    EventRecord(
                        problem_id=problem_id,
                        stream=stream,
                        sequence=raw["sequence"],
                        timestamp=raw["timestamp"],
                        actor=raw["actor"],
                        kind=raw["kind"],
                        payload=raw["payload"],
                    )
                )
        return records

    def _streams_of(self, problem_id: str) -> list[str]:
        directory = self._problem_dir(problem_id)
        streams = []
        for name in sorted(os.listdir(directory)):
            if not name.endswith(".log"):
                continue
            stem = name[: -len(".log")]
            if stem.startswith("analysis-"):
                streams.append("analysis:" + stem[len("analysis-"):])
            else:
                streams.append(stem)
        # roster first (membership), then brainstorm, then analyses
        order = {"roster": 0, "brainstorm": 1}
        return sorted(streams, key=lambda s: (order.get(s, 2), s))

    def _replay_all(self) -> None:
        for problem_id in sorted(os.listdir(self._problems_dir())):
            meta_path = os.path.join(self._problem_dir(problem_id), "problem.json")
            if not os.path.exists(meta_path):
                continue
            with open(meta_path, "r", encoding="utf-8") as fh:
                meta = json.load(fh)
            state = ProblemState(
                problem_id=problem_id,
                question=meta["question"],
                description=meta.get("description", ""),
            )
            state.brainstorm = bs.new_state(
                meta.get("description") or meta["question"], meta["question"], []
            )
            for stream in self._streams_of(problem_id):
                for record in self._read_stream(problem_id, stream):
                    state = apply_record(state, record)
            self.states[problem_id] = state


def import_snapshot(state: ProblemState, participant: str) -> dict:
    """Build the import event's payload: the skeleton captured right now."""
    skeleton = import_informal(state.brainstorm, participant)
    return {"document": tree_to_dict(skeleton)}
