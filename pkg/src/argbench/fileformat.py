"""Serialization of analysis documents, event scripts and findings.

An analysis document is a single self-describing JSON object (schema
``analysis/1``) holding the question, all evidence, hypotheses,
arguments and links with their assessments and justifications.
Computed values and findings may be written for human consumption but
are derived data: they are ignored on load and recomputed on demand.
Probability labels serialize as snake-case tokens with their interval,
e.g. ``likely[55,70)``.
"""
from __future__ import annotations

import json
from typing import Any, TextIO

from . import brainstorm as bs
from .analytics import Finding, Severity
from .model import (
    AnalysisTree,
    ArgumentNode,
    EvidenceItem,
    EvidenceLink,
    HypothesisNode,
    NodeKind,
    Polarity,
    SourceKind,
)
from .scale import ProbabilityLabel, parse_label

ANALYSIS_SCHEMA = "analysis/1"


class DocumentError(ValueError):
    """The document does not parse against the published schema."""


def _label_out(label: ProbabilityLabel | None) -> str | None:
    return label.token if label is not None else None


def _label_in(value: Any, context: str) -> ProbabilityLabel | None:
    if value is None:
        return None
    try:
        return parse_label(str(value))
    except ValueError as exc:
        raise DocumentError(f"{context}: {exc}") from None


def _enum_in(enum_cls, value: Any, context: str):
    if value is None:
        return None
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise DocumentError(
            f"{context}: {value!r} is not one of [{allowed}]"
        ) from None


# ---------------------------------------------------------------------------
# analysis documents
# ---------------------------------------------------------------------------


def tree_to_dict(
    tree: AnalysisTree,
    *,
    include_computed: bool = False,
    findings: list[Finding] | None = None,
) -> dict:
    doc: dict[str, Any] = {
        "schema": ANALYSIS_SCHEMA,
        "question": tree.question,
        "tops": list(tree.tops),
        "evidence": [
            {
                "id": item.id,
                "name": item.name,
                "body": item.body,
                "source_kind": item.source_kind.value if item.source_kind else None,
                "credibility": _label_out(item.credibility),
                "credibility_justification": item.credibility_justification,
            }
            for item in tree.evidence.values()
        ],
        "hypotheses": [
            {
                "id": node.id,
                "statement": node.statement,
                "kind": node.kind.value,
                "children": list(node.children),
                "evidence_links": list(node.evidence_links),
                "assumed_probability": _label_out(node.assumed_probability),
                "assumption_justification": node.assumption_justification,
                "headline_template": node.headline_template,
            }
            for node in tree.hypotheses.values()
        ],
        "arguments": [
            {
                "id": arg.id,
                "polarity": arg.polarity.value,
                "summary": arg.summary,
                "relevance": _label_out(arg.relevance),
                "relevance_justification": arg.relevance_justification,
                "sub_hypotheses": list(arg.sub_hypotheses),
            }
            for arg in tree.arguments.values()
        ],
        "links": [
            {
                "id": link.id,
                "evidence_id": link.evidence_id,
                "hypothesis_id": link.hypothesis_id,
                "polarity": link.polarity.value,
                "fact_leaf": link.fact_leaf,
                "relevance": _label_out(link.relevance),
                "relevance_justification": link.relevance_justification,
            }
            for link in tree.links.values()
        ],
    }
    if include_computed and tree.computed:
        doc["computed"] = computed_to_dict(tree)
        doc["propagation_warnings"] = list(tree.propagation_warnings)
    if findings is not None:
        doc["findings"] = [finding_to_dict(f) for f in findings]
    return doc


def computed_to_dict(tree: AnalysisTree) -> dict:
    return {
        node_id: {
            "support_for": value.balanced.support_for.token,
            "support_against": value.balanced.support_against.token,
            "dissonant": value.balanced.dissonant,
            "direction": value.scalar.direction.value,
            "strength": value.scalar.strength.token,
        }
        for node_id, value in sorted(tree.computed.items())
    }


def finding_to_dict(finding: Finding) -> dict:
    return {
        "severity": finding.severity.value,
        "code": finding.code,
        "target": finding.target,
        "message": finding.message,
    }


def finding_from_dict(data: dict) -> Finding:
    return Finding(
        severity=Severity(data["severity"]),
        code=data["code"],
        target=data["target"],
        message=data["message"],
    )


def tree_from_dict(doc: dict) -> AnalysisTree:
    if not isinstance(doc, dict):
        raise DocumentError("analysis document must be a JSON object")
    if doc.get("schema") != ANALYSIS_SCHEMA:
        raise DocumentError(
            f"unsupported schema {doc.get('schema')!r}; expected {ANALYSIS_SCHEMA!r}"
        )
    if "question" not in doc:
        raise DocumentError("analysis document needs a question")

    tree = AnalysisTree(question=doc["question"], tops=list(doc.get("tops", [])))

    for raw in doc.get("evidence", []):
        eid = raw.get("id")
        if not eid:
            raise DocumentError("evidence item without an id")
        if eid in tree.evidence:
            raise DocumentError(f"duplicate evidence id {eid}")
        tree.evidence[eid] = EvidenceItem(
            id=eid,
            name=raw.get("name", eid),
            body=raw.get("body", ""),
            source_kind=_enum_in(SourceKind, raw.get("source_kind"), f"evidence {eid}"),
            credibility=_label_in(raw.get("credibility"), f"evidence {eid}"),
            credibility_justification=raw.get("credibility_justification", ""),
        )

    for raw in doc.get("hypotheses", []):
        hid = raw.get("id")
        if not hid:
            raise DocumentError("hypothesis without an id")
        if hid in tree.hypotheses:
            raise DocumentError(f"duplicate hypothesis id {hid}")
        kind = _enum_in(NodeKind, raw.get("kind", "intermediate"), f"hypothesis {hid}")
        tree.hypotheses[hid] = HypothesisNode(
            id=hid,
            statement=raw.get("statement", ""),
            kind=kind or NodeKind.INTERMEDIATE,
            children=list(raw.get("children", [])),
            evidence_links=list(raw.get("evidence_links", [])),
            assumed_probability=_label_in(
                raw.get("assumed_probability"), f"hypothesis {hid}"
            ),
            assumption_justification=raw.get("assumption_justification", ""),
            headline_template=raw.get("headline_template"),
        )

    for raw in doc.get("arguments", []):
        aid = raw.get("id")
        if not aid:
            raise DocumentError("argument without an id")
        if aid in tree.arguments:
            raise DocumentError(f"duplicate argument id {aid}")
        polarity = _enum_in(Polarity, raw.get("polarity", "favoring"), f"argument {aid}")
        tree.arguments[aid] = ArgumentNode(
            id=aid,
            polarity=polarity or Polarity.FAVORING,
            sub_hypotheses=list(raw.get("sub_hypotheses", [])),
            summary=raw.get("summary", ""),
            relevance=_label_in(raw.get("relevance"), f"argument {aid}"),
            relevance_justification=raw.get("relevance_justification", ""),
        )

    for raw in doc.get("links", []):
        lid = raw.get("id")
        if not lid:
            raise DocumentError("link without an id")
        if lid in tree.links:
            raise DocumentError(f"duplicate link id {lid}")
        polarity = _enum_in(Polarity, raw.get("polarity", "favoring"), f"link {lid}")
        tree.links[lid] = EvidenceLink(
            id=lid,
            evidence_id=raw.get("evidence_id", ""),
            hypothesis_id=raw.get("hypothesis_id", ""),
            polarity=polarity or Polarity.FAVORING,
            fact_leaf=bool(raw.get("fact_leaf", False)),
            relevance=_label_in(raw.get("relevance"), f"link {lid}"),
            relevance_justification=raw.get("relevance_justification", ""),
        )

    # computed values and findings are derived; ignored on load
    return tree


def load_tree(path_or_file: str | TextIO) -> AnalysisTree:
    if isinstance(path_or_file, str):
        with open(path_or_file, "r", encoding="utf-8") as handle:
            raw = handle.read()
    else:
        raw = path_or_file.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from None
    return tree_from_dict(doc)


def save_tree(
    tree: AnalysisTree,
    path: str,
    *,
    include_computed: bool = False,
    findings: list[Finding] | None = None,
) -> None:
    doc = tree_to_dict(tree, include_computed=include_computed, findings=findings)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, ensure_ascii=False)
        handle.write("\n")


# ---------------------------------------------------------------------------
# brainstorm event scripts (JSON lines: header, then one event per line)
# ---------------------------------------------------------------------------


def parse_brainstorm_script(text: str) -> tuple[bs.BrainstormState, list[bs.Event]]:
    """Parse a line-delimited brainstorm script.

    The first non-empty line is a header with ``problem``, ``question``
    and ``members``; every following line is an event record with
    ``kind``, ``actor``, ``at`` and the event's payload fields.
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DocumentError("empty brainstorm script")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DocumentError(f"bad script header: {exc}") from None
    for key in ("question", "members"):
        if key not in header:
            raise DocumentError(f"script header needs {key!r}")
    state = bs.new_state(
        problem=header.get("problem", header["question"]),
        question=header["question"],
        members=list(header["members"]),
    )
    events = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"line {lineno}: {exc}") from None
        events.append(event_from_dict(raw, context=f"line {lineno}"))
    return state, events


def event_from_dict(raw: dict, context: str = "event") -> bs.Event:
    try:
        kind = raw["kind"]
        actor = raw["actor"]
    except KeyError as exc:
        raise DocumentError(f"{context}: missing {exc}") from None
    payload = {
        k: v for k, v in raw.items() if k not in ("kind", "actor", "at")
    }
    if kind == "assess_credibility" and "label" in payload:
        payload["label"] = _label_in(payload["label"], context)
    return bs.Event(kind=kind, actor=actor, payload=payload, at=float(raw.get("at", 0.0)))


def event_to_dict(event: bs.Event) -> dict:
    payload = dict(event.payload)
    if isinstance(payload.get("label"), ProbabilityLabel):
        payload["label"] = payload["label"].token
    return {"kind": event.kind, "actor": event.actor, "at": event.at, **payload}
