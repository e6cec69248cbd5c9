"""Structured production reports generated from a propagated analysis.

The generated report states each competing hypothesis with its computed
probability phrase, walks through the main arguments with their
justifications and evidence, lists assumptions with a collection note,
and closes with an appendix of argumentation fragments and evidence
items that body anchors point into.  Analysts edit the prose freely, but
computed probability phrases live in locked tokens that only
regeneration can change, so a report can never silently disagree with
its argumentation.
"""
from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field

from .model import AnalysisTree, Polarity
from .scale import (
    Direction,
    LACKING_SUPPORT_PHRASE,
    ProbabilityLabel,
    complement_is_nominal,
    complement_phrase,
)

RENDER_FORMATS = ("plain", "markup", "print-ready")

_DETERMINERS = {"the", "a", "an", "this", "that", "it", "its", "their", "his", "her"}


class ReportError(ValueError):
    pass


class LockedTokenError(ReportError):
    """An edit tried to remove or alter a computed probability token."""


@dataclass
class ReportSection:
    id: str
    kind: str  # headline | argument | assumptions
    text: str  # prose with {prob:<node>} placeholders
    tokens: dict[str, str] = field(default_factory=dict)
    evidence_ids: list[str] = field(default_factory=list)
    fragment_id: str | None = None


@dataclass
class AppendixFragment:
    id: str
    title: str
    lines: list[str]


@dataclass
class AppendixEvidence:
    id: str  # anchor id, evidence-<tag>
    tag: str
    name: str
    body: str
    source_kind: str | None
    credibility: str | None
    justification: str


@dataclass(frozen=True)
class EditRecord:
    section_id: str
    author: str
    at: float


@dataclass
class Report:
    question: str
    lead_sentence: str
    alternative_sentences: list[str]
    sections: list[ReportSection]
    fragments: list[AppendixFragment]
    evidence_entries: list[AppendixEvidence]
    overrides: dict[str, str] = field(default_factory=dict)
    edit_history: list[EditRecord] = field(default_factory=list)
    no_assumptions_marked: bool = False

    def section(self, section_id: str) -> ReportSection:
        for section in self.sections:
            if section.id == section_id:
                return section
        raise ReportError(f"unknown report section: {section_id}")

    def section_text(self, section_id: str) -> str:
        """Current prose for a section with its tokens substituted."""
        section = self.section(section_id)
        text = self.overrides.get(section_id, section.text)
        for placeholder, phrase in section.tokens.items():
            text = text.replace(placeholder, phrase)
        return text

    def copy(self) -> Report:
        return copy.deepcopy(self)


@dataclass(frozen=True)
class ChecklistEntry:
    number: int
    criterion: str
    status: str  # pass | attention
    detail: str


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


def _decap(statement: str) -> str:
    first = statement.split(" ", 1)[0]
    if first.lower() in _DETERMINERS:
        return statement[0].lower() + statement[1:]
    return statement


def _strip_period(text: str) -> str:
    return text[:-1] if text.endswith(".") else text


def _positive_phrase(value) -> str:
    if value.direction is Direction.FOR:
        return value.strength.phrase
    if (
        value.direction is Direction.AGAINST
        and value.strength >= ProbabilityLabel.LIKELY
    ):
        return complement_phrase(value.strength)
    return LACKING_SUPPORT_PHRASE


def _ordered_tops(tree: AnalysisTree) -> list[str]:
    """Descending by signed scalar; document order breaks exact ties."""
    indexed = list(enumerate(tree.tops))
    return [
        top_id
        for _, top_id in sorted(
            indexed, key=lambda pair: (-tree.computed[pair[1]].scalar.signed_rank, pair[0])
        )
    ]


def generate_report(tree: AnalysisTree, previous: Report | None = None) -> Report:
    """Build the structured report for a propagated tree.

    With ``previous`` given, analyst prose edits carry over to sections
    that still exist; every probability token is refreshed from the
    current computed values.
    """
    missing = [t for t in tree.tops if t not in tree.computed]
    if not tree.tops or missing:
        raise ReportError(
            "report generation needs a propagated analysis (missing computed "
            "values for: " + ", ".join(missing or ["all tops"]) + ")"
        )

    ordered = _ordered_tops(tree)
    sections: list[ReportSection] = []
    fragments: list[AppendixFragment] = []
    evidence_entries: list[AppendixEvidence] = []
    cited: list[str] = []

    # headline -------------------------------------------------------------
    tokens: dict[str, str] = {}
    lead_id = ordered[0]
    lead_node = tree.hypotheses[lead_id]
    lead_token = f"{{prob:{lead_id}}}"
    tokens[lead_token] = _positive_phrase(tree.computed[lead_id].scalar)
    template = lead_node.headline_template or (
        "It is {probability} that " + _decap(_strip_period(lead_node.statement)) + "."
    )
    lead_text = template.replace("{probability}", lead_token)

    alt_texts: list[str] = []
    for top_id in ordered[1:]:
        node = tree.hypotheses[top_id]
        value = tree.computed[top_id].scalar
        token = f"{{prob:{top_id}}}"
        tokens[token] = _positive_phrase(value)
        nominal = (
            value.direction is Direction.AGAINST
            and value.strength >= ProbabilityLabel.LIKELY
            and complement_is_nominal(value.strength)
        )
        statement = _decap(_strip_period(node.statement))
        if nominal:
            alt_texts.append(f"We assess that there is {token} that {statement}.")
        else:
            alt_texts.append(f"We assess it is {token} that {statement}.")

    headline_text = " ".join([lead_text] + alt_texts)
    sections.append(
        ReportSection(id="headline", kind="headline", text=headline_text, tokens=tokens)
    )

    # argument sections ------------------------------------------------------
    for top_id in ordered:
        top = tree.hypotheses[top_id]
        for aid in top.children:
            arg = tree.arguments[aid]
            evidence_ids = _argument_evidence(tree, aid)
            parts: list[str] = []
            stance = "supports" if arg.polarity is Polarity.FAVORING else "weighs against"
            if arg.summary:
                parts.append(_strip_period(arg.summary) + ".")
            parts.append(
                f"This {arg.polarity.value} argument {stance} the hypothesis "
                f"that {_decap(_strip_period(top.statement))}."
            )
            if arg.relevance_justification.strip():
                parts.append(_strip_period(arg.relevance_justification.strip()) + ".")
            if evidence_ids:
                names = "; ".join(
                    f"{eid} {tree.evidence[eid].name}" for eid in evidence_ids
                )
                parts.append(f"It rests on: {names}.")
            arg_token = f"{{prob:{aid}}}"
            arg_tokens = {}
            if aid in tree.computed:
                arg_tokens[arg_token] = tree.computed[aid].scalar.strength.phrase
                parts.append(f"Computed inferential force: {arg_token}.")
            fragment_id = f"fragment-{aid}"
            sections.append(
                ReportSection(
                    id=aid,
                    kind="argument",
                    text=" ".join(parts),
                    tokens=arg_tokens,
                    evidence_ids=evidence_ids,
                    fragment_id=fragment_id,
                )
            )
            fragments.append(
                AppendixFragment(
                    id=fragment_id,
                    title=f"Argumentation fragment for {aid}",
                    lines=_fragment_lines(tree, aid),
                )
            )
            for eid in evidence_ids:
                if eid not in cited:
                    cited.append(eid)

    for eid in cited:
        item = tree.evidence[eid]
        evidence_entries.append(
            AppendixEvidence(
                id=f"evidence-{eid}",
                tag=eid,
                name=item.name,
                body=item.body,
                source_kind=item.source_kind.value if item.source_kind else None,
                credibility=item.credibility.phrase if item.credibility else None,
                justification=item.credibility_justification,
            )
        )

    # assumptions ----------------------------------------------------------
    assumption_lines: list[str] = []
    for hid in sorted(tree.hypotheses, key=_natural_key):
        node = tree.hypotheses[hid]
        if not node.is_assumption:
            continue
        label = node.assumed_probability
        phrase = label.phrase if label else LACKING_SUPPORT_PHRASE
        justification = node.assumption_justification.strip() or "(no justification given)"
        assumption_lines.append(
            f"- {_strip_period(node.statement)}: assumed {phrase}. "
            f"Justification: {_strip_period(justification)}. Collect information "
            f"that would corroborate or contradict this assumption."
        )
    if assumption_lines:
        assumptions_text = "\n".join(assumption_lines)
    elif previous is not None and previous.no_assumptions_marked:
        assumptions_text = "No assumptions made."
    else:
        assumptions_text = "No assumptions recorded."
    sections.append(
        ReportSection(id="assumptions", kind="assumptions", text=assumptions_text)
    )

    report = Report(
        question=tree.question,
        lead_sentence=_substitute(lead_text, tokens),
        alternative_sentences=[_substitute(t, tokens) for t in alt_texts],
        sections=sections,
        fragments=fragments,
        evidence_entries=evidence_entries,
        no_assumptions_marked=previous.no_assumptions_marked if previous else False,
    )
    if previous is not None:
        section_ids = {s.id for s in report.sections}
        for section_id, text in previous.overrides.items():
            if section_id in section_ids:
                report.overrides[section_id] = text
        report.edit_history = list(previous.edit_history)
    return report


def _substitute(text: str, tokens: dict[str, str]) -> str:
    for placeholder, phrase in tokens.items():
        text = text.replace(placeholder, phrase)
    return text


def _natural_key(target: str) -> tuple:
    return tuple(
        int(part) if part.isdigit() else part for part in re.split(r"(\d+)", target)
    )


def _argument_evidence(tree: AnalysisTree, aid: str) -> list[str]:
    """Evidence tags cited anywhere under an argument, in tag order."""
    seen: list[str] = []
    arg = tree.arguments[aid]
    for sub in arg.sub_hypotheses:
        for hid in tree.subtree_hypotheses(sub):
            for lid in tree.hypotheses[hid].evidence_links:
                link = tree.links.get(lid)
                if link and link.evidence_id not in seen:
                    seen.append(link.evidence_id)
    return sorted(seen, key=_natural_key)


def _fragment_lines(tree: AnalysisTree, aid: str) -> list[str]:
    """Indented outline of an argument subtree with computed phrases."""
    lines: list[str] = []

    def phrase_for(node_id: str) -> str:
        value = tree.computed.get(node_id)
        if value is None:
            return ""
        scalar = value.scalar
        if scalar.direction is Direction.NEUTRAL:
            return f" [{LACKING_SUPPORT_PHRASE}]"
        return f" [{scalar.direction.value}: {scalar.strength.phrase}]"

    def walk_hypothesis(hid: str, depth: int) -> None:
        node = tree.hypotheses[hid]
        marker = "assumption: " if node.is_assumption else ""
        lines.append("  " * depth + f"{hid}: {marker}{node.statement}{phrase_for(hid)}")
        for lid in node.evidence_links:
            link = tree.links.get(lid)
            if not link:
                continue
            item = tree.evidence[link.evidence_id]
            relevance = link.effective_relevance()
            rel_text = relevance.phrase if relevance else "unassessed"
            lines.append(
                "  " * (depth + 1)
                + f"({link.polarity.value}) {item.id} {item.name} "
                f"[relevance: {rel_text}]"
            )
        for child in node.children:
            walk_argument(child, depth + 1)

    def walk_argument(arg_id: str, depth: int) -> None:
        arg = tree.arguments[arg_id]
        relevance = arg.relevance.phrase if arg.relevance else "unassessed"
        lines.append(
            "  " * depth
            + f"{arg_id}: {arg.polarity.value} argument [relevance: {relevance}]"
        )
        for sub in arg.sub_hypotheses:
            walk_hypothesis(sub, depth + 1)

    walk_argument(aid, 0)
    return lines


# ---------------------------------------------------------------------------
# edits
# ---------------------------------------------------------------------------


def edit_section(
    report: Report, section_id: str, new_text: str, author: str, at: float = 0.0
) -> Report:
    """Replace a section's prose, keeping every locked probability token.

    The placeholders (``{prob:<node>}``) must survive the edit verbatim;
    their rendered values only change when the report is regenerated.
    """
    section = report.section(section_id)
    for placeholder in section.tokens:
        if placeholder not in new_text:
            raise LockedTokenError(
                f"edit would drop locked probability token {placeholder}; "
                f"keep the placeholder in the text"
            )
    out = report.copy()
    out.overrides[section_id] = new_text
    out.edit_history.append(EditRecord(section_id=section_id, author=author, at=at))
    return out


def mark_no_assumptions(report: Report, author: str, at: float = 0.0) -> Report:
    """Explicit analyst statement that the analysis rests on no assumptions."""
    out = report.copy()
    out.no_assumptions_marked = True
    section = out.section("assumptions")
    if not section.text.startswith("-"):
        section.text = "No assumptions made."
    out.edit_history.append(EditRecord(section_id="assumptions", author=author, at=at))
    return out


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render(
    report: Report,
    format: str = "plain",
    figure_paths: dict[str, str] | None = None,
) -> str:
    """Serialize the report; byte-identical for identical inputs.

    ``markup`` carries working in-document anchors from each paragraph to
    its argumentation fragment and evidence entries; ``print-ready``
    embeds the relevant appendix material directly beneath each
    paragraph.
    """
    if format not in RENDER_FORMATS:
        raise ReportError(f"unknown render format: {format}")
    figure_paths = figure_paths or {}
    markup = format == "markup"
    embed = format == "print-ready"
    lines: list[str] = []

    def heading(text: str, level: int = 1) -> None:
        if markup:
            lines.append("#" * level + " " + text)
        else:
            lines.append(text)
            lines.append(("=" if level == 1 else "-") * len(text))
        lines.append("")

    heading(report.question)

    paragraph_no = 0
    evidence_by_tag = {entry.tag: entry for entry in report.evidence_entries}

    for section in report.sections:
        paragraph_no += 1
        body = report.section_text(section.id)
        if section.kind == "assumptions":
            heading("Assumptions and missing information", 2)
            lines.append(body)
            lines.append("")
            continue
        if markup:
            lines.append(f'<a id="{section.id}"></a>')
        lines.append(body)
        if section.kind == "argument":
            refs: list[str] = []
            if section.fragment_id:
                if markup:
                    refs.append(
                        f"[Figure for Paragraph {paragraph_no}](#{section.fragment_id})"
                    )
                else:
                    refs.append(
                        f"Figure for Paragraph {paragraph_no} ({section.fragment_id})"
                    )
            if section.evidence_ids:
                if markup:
                    targets = ", ".join(
                        f"[{eid}](#evidence-{eid})" for eid in section.evidence_ids
                    )
                    refs.append(f"Evidence for Paragraph {paragraph_no}: {targets}")
                else:
                    targets = ", ".join(
                        f"evidence-{eid}" for eid in section.evidence_ids
                    )
                    refs.append(f"Evidence for Paragraph {paragraph_no} ({targets})")
            if refs and not embed:
                lines.append("")
                lines.append(" ; ".join(refs))
            if embed:
                fragment = _fragment_by_id(report, section.fragment_id)
                if fragment:
                    lines.append("")
                    lines.append(f"[{fragment.title}]")
                    lines.extend("    " + text for text in fragment.lines)
                for eid in section.evidence_ids:
                    entry = evidence_by_tag.get(eid)
                    if entry:
                        lines.append("")
                        lines.extend(_evidence_lines(entry))
        lines.append("")

    if not embed:
        heading("Appendix", 2)
        heading("Evidence", 3)
        for entry in report.evidence_entries:
            if markup:
                lines.append(f'<a id="{entry.id}"></a>')
            lines.extend(_evidence_lines(entry))
            lines.append("")
        heading("Argumentation fragments", 3)
        for fragment in report.fragments:
            if markup:
                lines.append(f'<a id="{fragment.id}"></a>')
            lines.append(f"{fragment.title}:")
            figure = figure_paths.get(fragment.id)
            if figure:
                if markup:
                    lines.append(f"![{fragment.title}]({figure})")
                else:
                    lines.append(f"(figure: {figure})")
            lines.extend("    " + text for text in fragment.lines)
            lines.append("")

    return "\n".join(lines).rstrip() + "\n"


def _fragment_by_id(report: Report, fragment_id: str | None) -> AppendixFragment | None:
    for fragment in report.fragments:
        if fragment.id == fragment_id:
            return fragment
    return None


def _evidence_lines(entry: AppendixEvidence) -> list[str]:
    lines = [f"{entry.tag} {entry.name}"]
    if entry.body:
        lines.append(f"    {entry.body}")
    details = []
    if entry.source_kind:
        details.append(f"source: {entry.source_kind}")
    if entry.credibility:
        details.append(f"credibility: {entry.credibility}")
    if entry.justification:
        details.append(f"justification: {entry.justification}")
    if details:
        lines.append("    " + "; ".join(details))
    return lines


# ---------------------------------------------------------------------------
# quality-of-reasoning checklist
# ---------------------------------------------------------------------------


def quality_checklist(tree: AnalysisTree, report: Report) -> list[ChecklistEntry]:
    """Four-point review of the analysis behind a report."""
    from . import analytics

    entries: list[ChecklistEntry] = []

    developed = [
        top_id
        for top_id in tree.tops
        if top_id in tree.hypotheses
        and (
            tree.hypotheses[top_id].children
            or tree.hypotheses[top_id].evidence_links
            or tree.hypotheses[top_id].is_assumption
        )
    ]
    ok = len(developed) >= 2
    entries.append(
        ChecklistEntry(
            1,
            "Hypotheses generation and accuracy of solution",
            "pass" if ok else "attention",
            f"{len(developed)} of {len(tree.tops)} alternative hypotheses are developed",
        )
    )

    findings = analytics.run_checks(tree)
    structural = [f for f in findings if f.severity is analytics.Severity.ERROR]
    biased = [f for f in findings if f.code == "confirmation-bias"]
    ok = not structural and not biased
    detail = "no structural errors and no confirmation-bias warnings"
    if structural:
        detail = f"{len(structural)} structural error(s)"
    elif biased:
        detail = f"confirmation-bias warning on {', '.join(f.target for f in biased)}"
    entries.append(
        ChecklistEntry(
            2, "Argumentation structure and reasoning", "pass" if ok else "attention", detail
        )
    )

    incomplete = [
        eid
        for eid, item in sorted(tree.evidence.items(), key=lambda kv: _natural_key(kv[0]))
        if item.source_kind is None
        or item.credibility is None
        or not item.credibility_justification.strip()
    ]
    entries.append(
        ChecklistEntry(
            3,
            "Identification of sources and assessment of credibility of evidence",
            "pass" if not incomplete else "attention",
            "every evidence item has a source kind, credibility and justification"
            if not incomplete
            else "incomplete evidence records: " + ", ".join(incomplete),
        )
    )

    has_assumptions = any(n.is_assumption for n in tree.hypotheses.values())
    ok = has_assumptions or report.no_assumptions_marked
    entries.append(
        ChecklistEntry(
            4,
            "Identification of key missing information and assumptions",
            "pass" if ok else "attention",
            "assumptions section is populated"
            if has_assumptions
            else (
                "analyst confirmed no assumptions were made"
                if report.no_assumptions_marked
                else "no assumptions recorded and none explicitly ruled out"
            ),
        )
    )
    return entries
