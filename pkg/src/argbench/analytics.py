"""Analytics assistant: structural errors and reasoning warnings.

Each check is a pure function from a tree snapshot to findings; the
combined run concatenates them in a fixed order and sorts each check's
findings by target, so the same tree always yields the same list.
Warnings point at reasoning habits worth a second look (confirmation
bias, satisficing, thin evidence, missing justifications, wide-open
assessments); errors are structural defects that block propagation.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from . import engine
from .model import AnalysisTree, Polarity, validate
from .scale import ProbabilityLabel

LS = ProbabilityLabel.LACKING_SUPPORT

CONFIRMATION_BIAS_MESSAGE = (
    "This hypothesis has only favoring arguments and each argument has only "
    "favoring evidence. It seems that you may be biased toward confirming "
    "your hypothesis. Carefully re-analyze the hypothesis, using all the "
    "relevant evidence."
)


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    target: str
    message: str

    def render(self) -> str:
        return f"{self.severity.value} {self.code} {self.target}: {self.message}"


@dataclass(frozen=True)
class AnalyticsConfig:
    """Trigger thresholds for the judgment-call checks."""

    min_developed_hypotheses: int = 2
    min_evidence_per_leaf: int = 2


DEFAULT_CONFIG = AnalyticsConfig()


def _natural_key(target: str) -> tuple:
    return tuple(
        int(part) if part.isdigit() else part
        for part in re.split(r"(\d+)", target)
    )


def _sorted(findings: list[Finding]) -> list[Finding]:
    return sorted(findings, key=lambda f: _natural_key(f.target))


def _is_developed(tree: AnalysisTree, hid: str) -> bool:
    node = tree.hypotheses[hid]
    return bool(node.children) or bool(node.evidence_links)


def _evidence_display(tree: AnalysisTree, evidence_id: str) -> str:
    item = tree.evidence.get(evidence_id)
    return f"{evidence_id} {item.name}" if item is not None else evidence_id


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def check_confirmation_bias(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """A developed top whose whole subtree pushes one way only."""
    findings = []
    for top_id in tree.tops:
        if top_id not in tree.hypotheses:
            continue
        argument_ids = tree.subtree_arguments(top_id)
        if not argument_ids:
            continue  # nothing argued yet; the structure check owns this
        all_args_favoring = all(
            tree.arguments[aid].polarity is Polarity.FAVORING for aid in argument_ids
        )
        all_links_favoring = all(
            tree.links[lid].polarity is Polarity.FAVORING
            for lid in tree.subtree_links(top_id)
        )
        if all_args_favoring and all_links_favoring:
            findings.append(
                Finding(
                    Severity.WARNING,
                    "confirmation-bias",
                    top_id,
                    CONFIRMATION_BIAS_MESSAGE,
                )
            )
    return _sorted(findings)


def check_satisficing(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """Fewer alternatives developed than the analysis ought to weigh."""
    developed = [
        top_id
        for top_id in tree.tops
        if top_id in tree.hypotheses and _is_developed(tree, top_id)
    ]
    if len(developed) >= config.min_developed_hypotheses or not tree.tops:
        return []
    target = developed[0] if developed else tree.tops[0]
    n = len(developed)
    counted = f"only {n} is" if n == 1 else f"only {n} are"
    return [
        Finding(
            Severity.WARNING,
            "satisficing",
            target,
            f"Fewer than {config.min_developed_hypotheses} alternative "
            f"hypotheses are developed ({counted}). You may be settling on "
            f"the first answer that looks good enough; identify all "
            f"plausible alternatives and analyze each against the evidence.",
        )
    ]


def check_absence_of_evidence(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """Leaves resting on a single item, and assumptions nobody justified."""
    findings = []
    for hid, node in tree.hypotheses.items():
        if node.is_assumption:
            if not node.assumption_justification.strip():
                findings.append(
                    Finding(
                        Severity.WARNING,
                        "absence-of-evidence",
                        hid,
                        "This assumption has no justification. Explain why the "
                        "statement may be taken to be true, and consider what "
                        "evidence could corroborate or contradict it.",
                    )
                )
            continue
        if node.children:
            continue
        link_count = len([lid for lid in node.evidence_links if lid in tree.links])
        if 0 < link_count < config.min_evidence_per_leaf:
            findings.append(
                Finding(
                    Severity.WARNING,
                    "absence-of-evidence",
                    hid,
                    f"This hypothesis is assessed from {link_count} item of "
                    f"evidence. Consider how complete the available evidence "
                    f"is and look for corroborating or contradicting items.",
                )
            )
    return _sorted(findings)


def check_justifications(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """Assessments recorded without the reasoning behind them.

    Relevance below certain needs an explanation; links that state the
    fact itself are certain by definition and exempt.
    """
    findings = []
    for lid, link in tree.links.items():
        if link.fact_leaf or link.relevance is None:
            continue
        if (
            link.relevance < ProbabilityLabel.CERTAIN
            and not link.relevance_justification.strip()
        ):
            findings.append(
                Finding(
                    Severity.WARNING,
                    "relevance-justification",
                    lid,
                    "Relevance lacking justification: "
                    + _evidence_display(tree, link.evidence_id),
                )
            )
    for aid, arg in tree.arguments.items():
        if arg.relevance is None:
            continue
        if (
            arg.relevance < ProbabilityLabel.CERTAIN
            and not arg.relevance_justification.strip()
        ):
            findings.append(
                Finding(
                    Severity.WARNING,
                    "relevance-justification",
                    aid,
                    f"Relevance lacking justification: argument {aid}",
                )
            )
    credibility = []
    for eid, item in tree.evidence.items():
        if item.credibility is not None and not item.credibility_justification.strip():
            credibility.append(
                Finding(
                    Severity.WARNING,
                    "credibility-justification",
                    eid,
                    "Credibility lacking justification: "
                    + _evidence_display(tree, eid),
                )
            )
    return _sorted(findings) + _sorted(credibility)


def check_imprecise_assessment(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """A developed top stuck at lacking support, the widest interval.

    Requires a structurally sound tree; computed values are derived on a
    working copy when missing.
    """
    if validate(tree):
        return []
    computed_tree = tree if tree.computed else engine.propagate(tree)
    findings = []
    for top_id in tree.tops:
        node = tree.hypotheses.get(top_id)
        if node is None:
            continue
        if not (_is_developed(tree, top_id) or node.is_assumption):
            continue
        value = computed_tree.computed.get(top_id)
        if value is None:
            continue
        if value.scalar.strength == LS:
            findings.append(
                Finding(
                    Severity.WARNING,
                    "imprecise-assessment",
                    top_id,
                    "Imprecise assessment: the probability of this hypothesis "
                    "is lacking support (0-50%), the widest interval on the "
                    "scale. Assess the missing credibilities and relevances "
                    "to narrow it.",
                )
            )
    return _sorted(findings)


def check_structure(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """Structural defects: everything validate reports, undeveloped tops,
    and nodes unreachable from any top."""
    findings = [
        Finding(Severity.ERROR, "structure", issue.target, issue.message)
        for issue in validate(tree)
    ]
    for top_id in tree.tops:
        node = tree.hypotheses.get(top_id)
        if node is None:
            continue
        if not node.children and not node.evidence_links and not node.is_assumption:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "structure",
                    top_id,
                    f"top hypothesis {top_id} has no arguments, evidence or "
                    f"assumption",
                )
            )
    reachable: set[str] = set()
    for top_id in tree.tops:
        reachable.update(tree.subtree_hypotheses(top_id))
        reachable.update(tree.subtree_arguments(top_id))
    for hid in tree.hypotheses:
        if hid not in reachable:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "structure",
                    hid,
                    f"hypothesis {hid} is not reachable from any top hypothesis",
                )
            )
    for aid in tree.arguments:
        if aid not in reachable:
            findings.append(
                Finding(
                    Severity.ERROR,
                    "structure",
                    aid,
                    f"argument {aid} is not reachable from any top hypothesis",
                )
            )
    return _sorted(findings)


ALL_CHECKS = (
    check_confirmation_bias,
    check_satisficing,
    check_absence_of_evidence,
    check_justifications,
    check_imprecise_assessment,
    check_structure,
)


def run_checks(
    tree: AnalysisTree, config: AnalyticsConfig = DEFAULT_CONFIG
) -> list[Finding]:
    """Run every check in fixed order; deterministic for a given tree."""
    findings: list[Finding] = []
    for check in ALL_CHECKS:
        findings.extend(check(tree, config))
    return findings


def has_errors(findings: list[Finding]) -> bool:
    return any(f.severity is Severity.ERROR for f in findings)
