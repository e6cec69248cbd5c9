"""HTTP service exposing the whole workflow to clients.

Thin layer over the event store: every mutation is an append guarded by
an expected sequence number (stale writers get 409 plus the current
sequence), reads serve snapshots, and per-participant analysis streams
are reachable only with that participant's token, so nobody can touch a
teammate's formal analysis.
"""
from __future__ import annotations

import time
import uuid
from typing import Any

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import analytics, brainstorm as bs, engine, report as report_mod, teams
from .fileformat import (
    DocumentError,
    computed_to_dict,
    finding_to_dict,
    tree_to_dict,
)
from .model import NotReadyError, TreeError, UnknownIdError
from .scale import ProbabilityLabel, ScaleError, parse_label
from .storage import (
    AnalysisState,
    ConflictError,
    ProblemStore,
    StorageError,
    UnknownProblemError,
    import_snapshot,
)


class CreateProblem(BaseModel):
    problem_id: str
    question: str
    description: str = ""


class JoinRequest(BaseModel):
    participant: str
    at: float | None = None


class TickRequest(BaseModel):
    at: float


class BrainstormEvent(BaseModel):
    expected_sequence: int
    kind: str
    payload: dict[str, Any] = Field(default_factory=dict)
    at: float | None = None


class AnalysisEvent(BaseModel):
    expected_sequence: int
    kind: str
    payload: dict[str, Any] = Field(default_factory=dict)
    at: float | None = None


class ImportRequest(BaseModel):
    expected_sequence: int = 0
    at: float | None = None


class WhatIfRequest(BaseModel):
    overrides: dict[str, str]


def create_app(store: ProblemStore) -> FastAPI:
    app = FastAPI(title="argbench", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def now_or(at: float | None) -> float:
        return time.time() if at is None else at

    def state_of(problem_id: str):
        try:
            return store.state(problem_id)
        except UnknownProblemError as exc:
            raise HTTPException(404, str(exc)) from None

    def participant_of(
        problem_id: str, authorization: str | None = Header(default=None)
    ) -> str:
        state = state_of(problem_id)
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(401, "participant token required")
        token = authorization[len("Bearer "):].strip()
        participant = state.tokens.get(token)
        if participant is None:
            raise HTTPException(403, "token does not belong to this problem's team")
        return participant

    def guard_owner(participant: str, owner: str) -> None:
        if participant != owner:
            raise HTTPException(
                403, "formal analyses are per participant; this one is not yours"
            )

    def append(problem_id: str, stream: str, **kwargs):
        try:
            return store.append(problem_id, stream, **kwargs)
        except ConflictError as exc:
            raise HTTPException(
                409,
                {
                    "error": "stale sequence",
                    "current_sequence": exc.current_sequence,
                },
            ) from None
        except (bs.NonMemberError,) as exc:
            raise HTTPException(403, str(exc)) from None
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        except (
            bs.ProtocolError,
            TreeError,
            teams.RosterError,
            ScaleError,
            DocumentError,
            StorageError,
        ) as exc:
            raise HTTPException(400, str(exc)) from None

    # -- scale -----------------------------------------------------------

    @app.get("/scale")
    def scale() -> dict:
        return {
            "labels": [
                {
                    "token": label.token,
                    "name": label.display_name,
                    "rank": label.rank,
                    "phrase": label.phrase,
                }
                for label in ProbabilityLabel
            ]
        }

    # -- problems ---------------------------------------------------------

    @app.post("/problems", status_code=201)
    def create_problem(body: CreateProblem) -> dict:
        try:
            state = store.create_problem(body.problem_id, body.question, body.description)
        except StorageError as exc:
            raise HTTPException(400, str(exc)) from None
        return {"problem_id": state.problem_id}

    @app.get("/problems")
    def list_problems() -> dict:
        return {
            "problems": [
                {
                    "problem_id": pid,
                    "question": store.state(pid).question,
                }
                for pid in store.problem_ids()
            ]
        }

    @app.get("/problems/{problem_id}")
    def get_problem(problem_id: str) -> dict:
        state = state_of(problem_id)
        return {
            "problem_id": state.problem_id,
            "question": state.question,
            "description": state.description,
            "members": state.members(),
        }

    # -- roster ------------------------------------------------------------

    @app.post("/problems/{problem_id}/join")
    def join_problem(problem_id: str, body: JoinRequest) -> dict:
        state = state_of(problem_id)
        token = uuid.uuid4().hex
        sequence, new_state = append(
            problem_id,
            "roster",
            kind="join",
            actor=body.participant,
            payload={"participant": body.participant, "token": token},
            timestamp=now_or(body.at),
        )
        team = new_state.roster.team_of(body.participant)
        return {
            "sequence": sequence,
            "participant": body.participant,
            "team_id": team.id if team else None,
            "token": token,
        }

    @app.post("/problems/{problem_id}/roster/tick")
    def roster_tick(problem_id: str, body: TickRequest) -> dict:
        state_of(problem_id)
        sequence, new_state = append(
            problem_id,
            "roster",
            kind="tick",
            actor="clock",
            payload={},
            timestamp=body.at,
        )
        return {"sequence": sequence, "roster": teams.roster_view(new_state.roster)}

    @app.get("/problems/{problem_id}/roster")
    def get_roster(problem_id: str) -> dict:
        return teams.roster_view(state_of(problem_id).roster)

    # -- brainstorm ---------------------------------------------------------

    @app.get("/problems/{problem_id}/brainstorm")
    def get_brainstorm(
        problem_id: str, participant: str = Depends(participant_of)
    ) -> dict:
        return bs.to_view(state_of(problem_id).brainstorm)

    @app.post("/problems/{problem_id}/brainstorm/events")
    def post_brainstorm_event(
        problem_id: str,
        body: BrainstormEvent,
        participant: str = Depends(participant_of),
    ) -> dict:
        sequence, _ = append(
            problem_id,
            "brainstorm",
            kind=body.kind,
            actor=participant,
            payload=body.payload,
            timestamp=now_or(body.at),
            expected_sequence=body.expected_sequence,
        )
        return {"sequence": sequence}

    @app.get("/problems/{problem_id}/brainstorm/next-task")
    def get_next_task(
        problem_id: str, participant: str = Depends(participant_of)
    ) -> dict:
        state = state_of(problem_id)
        try:
            task = bs.next_task(state.brainstorm, participant)
        except bs.NonMemberError as exc:
            raise HTTPException(403, str(exc)) from None
        return {"task": task.task, "targets": list(task.targets), "done": task.done}

    # -- formal analyses ------------------------------------------------------

    def analysis_of(problem_id: str, owner: str) -> AnalysisState:
        state = state_of(problem_id)
        analysis = state.analyses.get(owner)
        if analysis is None:
            raise HTTPException(
                404, f"{owner} has not imported a formal analysis yet"
            )
        return analysis

    @app.post("/problems/{problem_id}/analyses/{owner}/import")
    def import_analysis(
        problem_id: str,
        owner: str,
        body: ImportRequest,
        participant: str = Depends(participant_of),
    ) -> dict:
        guard_owner(participant, owner)
        state = state_of(problem_id)
        try:
            payload = import_snapshot(state, owner)
        except NotReadyError as exc:
            raise HTTPException(409, str(exc)) from None
        sequence, new_state = append(
            problem_id,
            f"analysis:{owner}",
            kind="import",
            actor=owner,
            payload=payload,
            timestamp=now_or(body.at),
            expected_sequence=body.expected_sequence,
        )
        return {
            "sequence": sequence,
            "analysis": tree_to_dict(new_state.analyses[owner].tree),
        }

    @app.get("/problems/{problem_id}/analyses/{owner}")
    def get_analysis(
        problem_id: str,
        owner: str,
        participant: str = Depends(participant_of),
        computed: bool = Query(default=False),
    ) -> dict:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        tree = analysis.tree
        if computed:
            tree = _propagated(tree)
        doc = tree_to_dict(tree, include_computed=computed)
        doc["sequence"] = store.state(problem_id).sequences.get(f"analysis:{owner}", 0)
        return doc

    @app.post("/problems/{problem_id}/analyses/{owner}/events")
    def post_analysis_event(
        problem_id: str,
        owner: str,
        body: AnalysisEvent,
        participant: str = Depends(participant_of),
    ) -> dict:
        guard_owner(participant, owner)
        if body.kind == "edit_report":
            _validate_report_edit(problem_id, owner, body.payload)
        sequence, _ = append(
            problem_id,
            f"analysis:{owner}",
            kind=body.kind,
            actor=owner,
            payload=body.payload,
            timestamp=now_or(body.at),
            expected_sequence=body.expected_sequence,
        )
        return {"sequence": sequence}

    def _propagated(tree):
        try:
            return engine.propagate(tree)
        except engine.StructuralError as exc:
            raise HTTPException(
                400,
                {
                    "error": "structural errors",
                    "issues": [
                        {"target": i.target, "message": i.message} for i in exc.issues
                    ],
                },
            ) from None

    @app.post("/problems/{problem_id}/analyses/{owner}/propagate")
    def propagate_analysis(
        problem_id: str, owner: str, participant: str = Depends(participant_of)
    ) -> dict:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        tree = _propagated(analysis.tree)
        return {
            "computed": computed_to_dict(tree),
            "warnings": list(tree.propagation_warnings),
        }

    @app.post("/problems/{problem_id}/analyses/{owner}/what-if")
    def what_if_analysis(
        problem_id: str,
        owner: str,
        body: WhatIfRequest,
        participant: str = Depends(participant_of),
    ) -> dict:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        try:
            overrides = {
                target: parse_label(value) for target, value in body.overrides.items()
            }
            probed = engine.what_if(analysis.tree, overrides)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        except (TreeError, ScaleError) as exc:
            raise HTTPException(400, str(exc)) from None
        except engine.StructuralError as exc:
            raise HTTPException(400, str(exc)) from None
        return {
            "computed": computed_to_dict(probed),
            "warnings": list(probed.propagation_warnings),
        }

    @app.get("/problems/{problem_id}/analyses/{owner}/findings")
    def get_findings(
        problem_id: str, owner: str, participant: str = Depends(participant_of)
    ) -> dict:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        findings = analytics.run_checks(analysis.tree, store.config.analytics)
        return {
            "findings": [finding_to_dict(f) for f in findings],
            "rendered": [f.render() for f in findings],
        }

    def _build_report(analysis: AnalysisState) -> report_mod.Report:
        tree = _propagated(analysis.tree)
        built = report_mod.generate_report(tree)
        for edit in analysis.report_edits:
            try:
                built = report_mod.edit_section(
                    built, edit["section_id"], edit["text"], edit["author"], edit["at"]
                )
            except report_mod.ReportError:
                continue  # section disappeared after regeneration; edit retired
        if analysis.no_assumptions_marked:
            built = report_mod.mark_no_assumptions(built, author="analyst")
        return built

    def _validate_report_edit(problem_id: str, owner: str, payload: dict) -> None:
        analysis = analysis_of(problem_id, owner)
        built = _build_report(analysis)
        try:
            report_mod.edit_section(
                built,
                payload.get("section_id", ""),
                payload.get("text", ""),
                author=owner,
            )
        except report_mod.LockedTokenError as exc:
            raise HTTPException(409, str(exc)) from None
        except report_mod.ReportError as exc:
            raise HTTPException(404, str(exc)) from None

    @app.get("/problems/{problem_id}/analyses/{owner}/report")
    def get_report(
        problem_id: str, owner: str, participant: str = Depends(participant_of)
    ) -> dict:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        built = _build_report(analysis)
        return {
            "question": built.question,
            "lead_sentence": built.lead_sentence,
            "alternative_sentences": built.alternative_sentences,
            "sections": [
                {
                    "id": section.id,
                    "kind": section.kind,
                    "text": built.section_text(section.id),
                    "template": built.overrides.get(section.id, section.text),
                    "tokens": section.tokens,
                    "evidence_ids": section.evidence_ids,
                    "fragment_id": section.fragment_id,
                }
                for section in built.sections
            ],
            "fragments": [
                {"id": f.id, "title": f.title, "lines": f.lines} for f in built.fragments
            ],
            "evidence": [
                {
                    "id": e.id,
                    "tag": e.tag,
                    "name": e.name,
                    "body": e.body,
                    "source_kind": e.source_kind,
                    "credibility": e.credibility,
                    "justification": e.justification,
                }
                for e in built.evidence_entries
            ],
            "no_assumptions_marked": built.no_assumptions_marked,
            "edit_history": [
                {"section_id": r.section_id, "author": r.author, "at": r.at}
                for r in built.edit_history
            ],
        }

    @app.get(
        "/problems/{problem_id}/analyses/{owner}/report/render",
        response_class=PlainTextResponse,
    )
    def render_report(
        problem_id: str,
        owner: str,
        participant: str = Depends(participant_of),
        format: str = Query(default="plain"),
    ) -> str:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        built = _build_report(analysis)
        try:
            return report_mod.render(built, format)
        except report_mod.ReportError as exc:
            raise HTTPException(400, str(exc)) from None

    @app.get("/problems/{problem_id}/analyses/{owner}/quality")
    def get_quality(
        problem_id: str, owner: str, participant: str = Depends(participant_of)
    ) -> dict:
        guard_owner(participant, owner)
        analysis = analysis_of(problem_id, owner)
        built = _build_report(analysis)
        tree = _propagated(analysis.tree)
        return {
            "checklist": [
                {
                    "number": entry.number,
                    "criterion": entry.criterion,
                    "status": entry.status,
                    "detail": entry.detail,
                }
                for entry in report_mod.quality_checklist(tree, built)
            ]
        }

    return app


def seed_demo(
    store: ProblemStore, script_path: str, problem_id: str = "cesium"
) -> dict[str, str]:
    """Create a problem and replay a brainstorm script through the store.

    Returns participant -> token for the seeded members, so a client can
    act as any of them.
    """
    from .fileformat import event_to_dict, parse_brainstorm_script

    with open(script_path, "r", encoding="utf-8") as fh:
        initial, events = parse_brainstorm_script(fh.read())

    store.create_problem(problem_id, initial.question, initial.problem)
    tokens: dict[str, str] = {}
    base = 0.0
    for i, member in enumerate(initial.members):
        token = uuid.uuid4().hex
        tokens[member] = token
        store.append(
            problem_id,
            "roster",
            kind="join",
            actor=member,
            payload={"participant": member, "token": token},
            timestamp=base + i * 60.0,
        )
    for event in events:
        raw = event_to_dict(event)
        payload = {
            k: v for k, v in raw.items() if k not in ("kind", "actor", "at")
        }
        store.append(
            problem_id,
            "brainstorm",
            kind=event.kind,
            actor=event.actor,
            payload=payload,
            timestamp=3600.0 + event.at,
        )
    return tokens
