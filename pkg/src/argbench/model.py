"""Formal argumentation trees: hypotheses, arguments, evidence, links.

A tree decomposes each top-level hypothesis into conjunctions of simpler
hypotheses via argument nodes, down to leaves assessed from evidence or
taken as assumptions.  Trees behave as immutable values: every operation
returns a new tree and leaves its input untouched, so snapshots can be
read concurrently without coordination.
"""
from __future__ import annotations

import copy
import enum
import re
from dataclasses import dataclass, field

from .scale import (
    BalancedProbability,
    DirectionalValue,
    ProbabilityLabel,
)

EVIDENCE_ID_RE = re.compile(r"^E\d+$")


class UnknownIdError(KeyError):
    """An operation referenced an id that does not exist in the tree."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return self.args[0] if self.args else ""


class TreeError(ValueError):
    """An operation violated a structural precondition."""


class NotReadyError(RuntimeError):
    """The informal analysis is not far enough along to import."""


class Polarity(enum.Enum):
    FAVORING = "favoring"
    DISFAVORING = "disfavoring"


class NodeKind(enum.Enum):
    TOP = "top"
    INTERMEDIATE = "intermediate"
    FACT_LEAF = "fact-leaf"
    ASSUMPTION = "assumption"


class SourceKind(enum.Enum):
    HUMAN_SOURCE = "human source"
    INTERCEPTED_COMMUNICATION = "intercepted communication"
    DOCUMENTARY = "documentary"
    OTHER = "other"


@dataclass
class EvidenceItem:
    id: str  # tag of the form E<number>
    name: str
    body: str = ""
    source_kind: SourceKind | None = None
    credibility: ProbabilityLabel | None = None
    credibility_justification: str = ""


@dataclass
class EvidenceLink:
    """Attachment of an evidence item to a hypothesis.

    ``fact_leaf`` marks a link from evidence about a fact to the fact
    itself; such links have certain relevance by definition and cannot be
    re-assessed.
    """

    id: str
    evidence_id: str
    hypothesis_id: str
    polarity: Polarity
    fact_leaf: bool = False
    relevance: ProbabilityLabel | None = None
    relevance_justification: str = ""

    def effective_relevance(self) -> ProbabilityLabel | None:
        if self.fact_leaf:
            return ProbabilityLabel.CERTAIN
        return self.relevance


@dataclass
class ArgumentNode:
    """A reason for or against a hypothesis, read as a conjunction of
    sub-hypotheses."""

    id: str
    polarity: Polarity
    sub_hypotheses: list[str]
    summary: str = ""
    relevance: ProbabilityLabel | None = None
    relevance_justification: str = ""


@dataclass
class HypothesisNode:
    id: str
    statement: str
    kind: NodeKind = NodeKind.INTERMEDIATE
    children: list[str] = field(default_factory=list)  # ArgumentNode ids
    evidence_links: list[str] = field(default_factory=list)  # EvidenceLink ids
    assumed_probability: ProbabilityLabel | None = None
    assumption_justification: str = ""
    # Optional report template for top nodes; "{probability}" is replaced
    # by the computed phrase when the headline renders.
    headline_template: str | None = None

    @property
    def is_assumption(self) -> bool:
        return self.kind is NodeKind.ASSUMPTION


@dataclass(frozen=True)
class ComputedValue:
    balanced: BalancedProbability
    scalar: DirectionalValue


@dataclass(frozen=True)
class StructureIssue:
    target: str
    message: str


@dataclass
class AnalysisTree:
    """A whole analysis: the question, competing top hypotheses, and every
    node, link and evidence item by id.

    ``computed`` and ``propagation_warnings`` are derived data; any
    structural or assessment change clears them.
    """

    question: str
    tops: list[str] = field(default_factory=list)
    hypotheses: dict[str, HypothesisNode] = field(default_factory=dict)
    arguments: dict[str, ArgumentNode] = field(default_factory=dict)
    evidence: dict[str, EvidenceItem] = field(default_factory=dict)
    links: dict[str, EvidenceLink] = field(default_factory=dict)
    computed: dict[str, ComputedValue] = field(default_factory=dict)
    propagation_warnings: list[str] = field(default_factory=list)

    # -- lookups ---------------------------------------------------------

    def hypothesis(self, hid: str) -> HypothesisNode:
        try:
            return self.hypotheses[hid]
        except KeyError:
            raise UnknownIdError(f"unknown hypothesis id: {hid}") from None

    def argument(self, aid: str) -> ArgumentNode:
        try:
            return self.arguments[aid]
        except KeyError:
            raise UnknownIdError(f"unknown argument id: {aid}") from None

    def evidence_item(self, eid: str) -> EvidenceItem:
        try:
            return self.evidence[eid]
        except KeyError:
            raise UnknownIdError(f"unknown evidence id: {eid}") from None

    def link(self, lid: str) -> EvidenceLink:
        try:
            return self.links[lid]
        except KeyError:
            raise UnknownIdError(f"unknown link id: {lid}") from None

    def copy(self) -> AnalysisTree:
        return copy.deepcopy(self)

    def _invalidate(self) -> None:
        self.computed = {}
        self.propagation_warnings = []

    # -- traversal -------------------------------------------------------

    def subtree_hypotheses(self, top_id: str) -> list[str]:
        """Hypothesis ids reachable from ``top_id`` (inclusive), depth-first."""
        seen: list[str] = []
        stack = [top_id]
        visited: set[str] = set()
        while stack:
            hid = stack.pop()
            if hid in visited or hid not in self.hypotheses:
                continue
            visited.add(hid)
            seen.append(hid)
            for aid in reversed(self.hypotheses[hid].children):
                arg = self.arguments.get(aid)
                if arg:
                    stack.extend(reversed(arg.sub_hypotheses))
        return seen

    def subtree_arguments(self, top_id: str) -> list[str]:
        out: list[str] = []
        for hid in self.subtree_hypotheses(top_id):
            for aid in self.hypotheses[hid].children:
                if aid in self.arguments and aid not in out:
                    out.append(aid)
        return out

    def subtree_links(self, top_id: str) -> list[str]:
        out: list[str] = []
        for hid in self.subtree_hypotheses(top_id):
            for lid in self.hypotheses[hid].evidence_links:
                if lid in self.links and lid not in out:
                    out.append(lid)
        return out

    def links_of(self, hid: str) -> list[EvidenceLink]:
        return [
            self.links[lid]
            for lid in self.hypothesis(hid).evidence_links
            if lid in self.links
        ]

    def next_id(self, prefix: str) -> str:
        pools: dict[str, dict] = {
            "H": self.hypotheses,
            "A": self.arguments,
            "L": self.links,
        }
        pool = pools[prefix]
        n = 1
        while f"{prefix}{n}" in pool:
            n += 1
        return f"{prefix}{n}"


# ---------------------------------------------------------------------------
# structural validation
# ---------------------------------------------------------------------------


def validate(tree: AnalysisTree) -> list[StructureIssue]:
    """Check structural well-formedness; an empty list means the tree is sound.

    Reports cycles, dangling ids, malformed assumptions, empty
    conjunctions, bad evidence tags and inconsistent fact-leaf markers.
    """
    issues: list[StructureIssue] = []

    def issue(target: str, message: str) -> None:
        issues.append(StructureIssue(target, message))

    for top_id in tree.tops:
        if top_id not in tree.hypotheses:
            issue(top_id, f"top hypothesis id {top_id} does not resolve")
        elif tree.hypotheses[top_id].kind not in (NodeKind.TOP, NodeKind.ASSUMPTION):
            # A top assessed purely by assumption keeps its place in the
            # alternatives list; other kinds may not head the analysis.
            issue(top_id, f"hypothesis {top_id} is listed as a top but has kind "
                          f"'{tree.hypotheses[top_id].kind.value}'")

    for eid, item in tree.evidence.items():
        if eid != item.id:
            issue(eid, f"evidence item keyed {eid} carries id {item.id}")
        if not EVIDENCE_ID_RE.match(item.id):
            issue(eid, f"evidence id {item.id} does not match E<number>")

    for hid, node in tree.hypotheses.items():
        if hid != node.id:
            issue(hid, f"hypothesis keyed {hid} carries id {node.id}")
        for aid in node.children:
            if aid not in tree.arguments:
                issue(hid, f"hypothesis {hid} references missing argument {aid}")
        for lid in node.evidence_links:
            if lid not in tree.links:
                issue(hid, f"hypothesis {hid} references missing link {lid}")
        if node.is_assumption:
            if node.children or node.evidence_links:
                issue(hid, f"assumption {hid} must not have arguments or evidence")
            if node.assumed_probability is None:
                issue(hid, f"assumption {hid} has no assumed probability")

    for aid, arg in tree.arguments.items():
        if aid != arg.id:
            issue(aid, f"argument keyed {aid} carries id {arg.id}")
        if not arg.sub_hypotheses:
            issue(aid, f"argument {aid} is an empty conjunction")
        for hid in arg.sub_hypotheses:
            if hid not in tree.hypotheses:
                issue(aid, f"argument {aid} references missing hypothesis {hid}")

    for lid, link in tree.links.items():
        if lid != link.id:
            issue(lid, f"link keyed {lid} carries id {link.id}")
        if link.evidence_id not in tree.evidence:
            issue(lid, f"dangling evidence id {link.evidence_id} on link {lid}")
        if link.hypothesis_id not in tree.hypotheses:
            issue(lid, f"link {lid} targets missing hypothesis {link.hypothesis_id}")
        else:
            target = tree.hypotheses[link.hypothesis_id]
            if lid not in target.evidence_links:
                issue(lid, f"link {lid} is not listed by its hypothesis "
                           f"{link.hypothesis_id}")
            if link.fact_leaf and target.kind is not NodeKind.FACT_LEAF:
                issue(lid, f"link {lid} is marked fact-leaf but "
                           f"{link.hypothesis_id} is not a fact-leaf hypothesis")

    for hid, node in tree.hypotheses.items():
        if node.kind is NodeKind.FACT_LEAF:
            has_fact_link = any(
                tree.links[lid].fact_leaf
                for lid in node.evidence_links
                if lid in tree.links
            )
            if not has_fact_link:
                issue(hid, f"fact-leaf {hid} has no evidence link marked as "
                           f"stating the fact")

    issues.extend(_find_cycles(tree))
    return issues


def _find_cycles(tree: AnalysisTree) -> list[StructureIssue]:
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[str, int] = {hid: WHITE for hid in tree.hypotheses}
    issues: list[StructureIssue] = []

    def visit(hid: str, path: list[str]) -> None:
        color[hid] = GREY
        for aid in tree.hypotheses[hid].children:
            arg = tree.arguments.get(aid)
            if not arg:
                continue
            for sub in arg.sub_hypotheses:
                if sub not in tree.hypotheses:
                    continue
                if color[sub] == GREY:
                    issues.append(StructureIssue(sub, f"cycle at {sub} (via {aid})"))
                elif color[sub] == WHITE:
                    visit(sub, path + [sub])
        color[hid] = BLACK

    for hid in tree.hypotheses:
        if color[hid] == WHITE:
            visit(hid, [hid])
    return issues


# ---------------------------------------------------------------------------
# assessment operations (copy-on-write)
# ---------------------------------------------------------------------------


def assess_credibility(
    tree: AnalysisTree,
    evidence_id: str,
    label: ProbabilityLabel,
    justification: str = "",
) -> AnalysisTree:
    """Record how strongly the evidence item may be believed."""
    tree.evidence_item(evidence_id)
    out = tree.copy()
    item = out.evidence[evidence_id]
    item.credibility = label
    item.credibility_justification = justification
    out._invalidate()
    return out


def assess_relevance(
    tree: AnalysisTree,
    target_id: str,
    label: ProbabilityLabel,
    justification: str = "",
) -> AnalysisTree:
    """Record the relevance of an evidence link or an argument.

    A link from evidence to its own fact is certain by definition and
    cannot be overridden.
    """
    if target_id in tree.links:
        if tree.links[target_id].fact_leaf:
            raise TreeError(
                f"link {target_id} states the fact itself; its relevance is "
                f"certain and cannot be overridden"
            )
        out = tree.copy()
        link = out.links[target_id]
        link.relevance = label
        link.relevance_justification = justification
    elif target_id in tree.arguments:
        out = tree.copy()
        arg = out.arguments[target_id]
        arg.relevance = label
        arg.relevance_justification = justification
    else:
        raise UnknownIdError(f"unknown link or argument id: {target_id}")
    out._invalidate()
    return out


def set_assumption(
    tree: AnalysisTree,
    hypothesis_id: str,
    label: ProbabilityLabel,
    justification: str = "",
) -> AnalysisTree:
    """Turn a bare hypothesis into an assumption with the given probability."""
    node = tree.hypothesis(hypothesis_id)
    if node.children or node.evidence_links:
        raise TreeError(
            f"hypothesis {hypothesis_id} has arguments or evidence below it "
            f"and cannot be treated as an assumption"
        )
    out = tree.copy()
    target = out.hypotheses[hypothesis_id]
    target.kind = NodeKind.ASSUMPTION
    target.assumed_probability = label
    target.assumption_justification = justification
    out._invalidate()
    return out


# ---------------------------------------------------------------------------
# structure edits
# ---------------------------------------------------------------------------


def add_evidence(
    tree: AnalysisTree,
    evidence_id: str,
    name: str,
    body: str = "",
    source_kind: SourceKind | None = None,
) -> AnalysisTree:
    if evidence_id in tree.evidence:
        raise TreeError(f"duplicate evidence id {evidence_id}")
    if not EVIDENCE_ID_RE.match(evidence_id):
        raise TreeError(f"evidence id {evidence_id} does not match E<number>")
    out = tree.copy()
    out.evidence[evidence_id] = EvidenceItem(
        id=evidence_id, name=name, body=body, source_kind=source_kind
    )
    out._invalidate()
    return out


def add_hypothesis(
    tree: AnalysisTree,
    statement: str,
    *,
    hypothesis_id: str | None = None,
    kind: NodeKind = NodeKind.INTERMEDIATE,
    parent_argument: str | None = None,
    headline_template: str | None = None,
) -> tuple[AnalysisTree, str]:
    out = tree.copy()
    hid = hypothesis_id or out.next_id("H")
    if hid in out.hypotheses:
        raise TreeError(f"duplicate hypothesis id {hid}")
    out.hypotheses[hid] = HypothesisNode(
        id=hid, statement=statement, kind=kind, headline_template=headline_template
    )
    if kind is NodeKind.TOP:
        out.tops.append(hid)
    if parent_argument is not None:
        out.argument(parent_argument).sub_hypotheses.append(hid)
    out._invalidate()
    return out, hid


def add_argument(
    tree: AnalysisTree,
    hypothesis_id: str,
    polarity: Polarity,
    sub_hypotheses: list[str],
    *,
    argument_id: str | None = None,
    summary: str = "",
) -> tuple[AnalysisTree, str]:
    tree.hypothesis(hypothesis_id)
    if not sub_hypotheses:
        raise TreeError("an argument needs at least one sub-hypothesis")
    for sub in sub_hypotheses:
        tree.hypothesis(sub)
    out = tree.copy()
    aid = argument_id or out.next_id("A")
    if aid in out.arguments:
        raise TreeError(f"duplicate argument id {aid}")
    out.arguments[aid] = ArgumentNode(
        id=aid, polarity=polarity, sub_hypotheses=list(sub_hypotheses), summary=summary
    )
    out.hypotheses[hypothesis_id].children.append(aid)
    out._invalidate()
    return out, aid


def add_link(
    tree: AnalysisTree,
    evidence_id: str,
    hypothesis_id: str,
    polarity: Polarity,
    *,
    link_id: str | None = None,
    fact_leaf: bool = False,
) -> tuple[AnalysisTree, str]:
    tree.evidence_item(evidence_id)
    node = tree.hypothesis(hypothesis_id)
    if node.is_assumption:
        raise TreeError(f"assumption {hypothesis_id} cannot take evidence")
    out = tree.copy()
    lid = link_id or out.next_id("L")
    if lid in out.links:
        raise TreeError(f"duplicate link id {lid}")
    out.links[lid] = EvidenceLink(
        id=lid,
        evidence_id=evidence_id,
        hypothesis_id=hypothesis_id,
        polarity=polarity,
        fact_leaf=fact_leaf,
    )
    target = out.hypotheses[hypothesis_id]
    target.evidence_links.append(lid)
    if fact_leaf:
        target.kind = NodeKind.FACT_LEAF
    out._invalidate()
    return out, lid


def set_headline_template(
    tree: AnalysisTree, hypothesis_id: str, template: str
) -> AnalysisTree:
    tree.hypothesis(hypothesis_id)
    if "{probability}" not in template:
        raise TreeError("headline template must contain a {probability} slot")
    out = tree.copy()
    out.hypotheses[hypothesis_id].headline_template = template
    return out


# ---------------------------------------------------------------------------
# import from the informal (brainstormed) analysis
# ---------------------------------------------------------------------------


def import_informal(informal, participant: str) -> AnalysisTree:
    """Build a formal-analysis skeleton from a brainstormed state.

    One top hypothesis per team-version answer, one favoring argument per
    informal argument (wrapping a single sub-hypothesis that restates it),
    evidence copied with the team-aggregated credibility prefilled, and
    every relevance left unset for the analyst to assess.
    """
    from . import brainstorm as bs

    answers = [
        item
        for item in informal.live_items(bs.ItemKind.ANSWER)
        if bs.team_version(item) is not None
    ]
    if not answers:
        raise NotReadyError(
            "the brainstorm has no team-version hypotheses to import yet"
        )

    question_item = next(
        (
            item
            for item in informal.live_items(bs.ItemKind.QUESTION)
            if bs.team_version(item) is not None
        ),
        None,
    )
    question = (
        bs.team_version(question_item).text if question_item else informal.question
    )

    tree = AnalysisTree(question=question)
    h_count = 0

    def fresh_hid() -> str:
        nonlocal h_count
        h_count += 1
        return f"H{h_count}"

    a_count = 0
    l_count = 0

    for answer in answers:
        top_id = fresh_hid()
        tree.hypotheses[top_id] = HypothesisNode(
            id=top_id,
            statement=bs.team_version(answer).text,
            kind=NodeKind.TOP,
        )
        tree.tops.append(top_id)

        for arg_item in informal.live_children(answer.id, bs.ItemKind.ARGUMENT):
            version = bs.team_version(arg_item)
            if version is None:
                continue
            a_count += 1
            aid = f"A{a_count}"
            sub_id = fresh_hid()
            tree.hypotheses[sub_id] = HypothesisNode(
                id=sub_id, statement=version.text, kind=NodeKind.INTERMEDIATE
            )
            tree.arguments[aid] = ArgumentNode(
                id=aid,
                polarity=Polarity.FAVORING,
                sub_hypotheses=[sub_id],
                summary=version.text,
            )
            tree.hypotheses[top_id].children.append(aid)

            for assoc in informal.live_children(arg_item.id, bs.ItemKind.EVIDENCE):
                tag = assoc.evidence_tag
                if tag and tag not in tree.evidence:
                    ballot = informal.ballots.get(tag)
                    credibility = (
                        bs.aggregate_credibility(ballot) if ballot and ballot.assessments else None
                    )
                    tree.evidence[tag] = EvidenceItem(
                        id=tag,
                        name=assoc.evidence_name or tag,
                        body=assoc.evidence_body or "",
                        credibility=credibility,
                    )
                if tag:
                    l_count += 1
                    lid = f"L{l_count}"
                    tree.links[lid] = EvidenceLink(
                        id=lid,
                        evidence_id=tag,
                        hypothesis_id=sub_id,
                        polarity=Polarity(assoc.evidence_polarity or "favoring"),
                    )
                    tree.hypotheses[sub_id].evidence_links.append(lid)

    return tree
