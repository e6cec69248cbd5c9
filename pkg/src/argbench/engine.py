"""Bottom-up probability propagation over an analysis tree.

Every evidence link transmits the minimum of its credibility and
relevance; a leaf's favoring and disfavoring pools each take the maximum
of what reaches them; an argument is the minimum of its conjunction and
its own relevance; and the two pools of a hypothesis are fused into one
directional value.  Unset assessments fall back to lacking support and
are reported as warnings rather than blocking the computation, so a
half-finished analysis can still be inspected.
"""
from __future__ import annotations

from .model import (
    AnalysisTree,
    ComputedValue,
    NodeKind,
    Polarity,
    StructureIssue,
    TreeError,
    UnknownIdError,
    validate,
)
from .scale import (
    BalancedProbability,
    Direction,
    DirectionalValue,
    ProbabilityLabel,
    inferential_force,
    max_combine,
    min_combine,
    on_balance,
)

LS = ProbabilityLabel.LACKING_SUPPORT


class StructuralError(ValueError):
    """Propagation refused to run on a structurally broken tree."""

    def __init__(self, issues: list[StructureIssue]):
        self.issues = issues
        lines = "; ".join(f"{i.target}: {i.message}" for i in issues)
        super().__init__(f"analysis tree has structural errors: {lines}")


def propagate(tree: AnalysisTree) -> AnalysisTree:
    """Return a copy of the tree with computed values on every node.

    Raises :class:`StructuralError` when :func:`validate` reports issues.
    Deterministic and idempotent: recomputing an already-computed tree
    yields identical values.
    """
    issues = validate(tree)
    if issues:
        raise StructuralError(issues)

    out = tree.copy()
    out.computed = {}
    warnings: list[str] = []
    hyp_cache: dict[str, DirectionalValue] = {}
    arg_cache: dict[str, ProbabilityLabel] = {}

    def link_force(link_id: str) -> ProbabilityLabel:
        link = out.links[link_id]
        item = out.evidence[link.evidence_id]
        credibility = item.credibility
        if credibility is None:
            warnings.append(
                f"credibility of {item.id} is not assessed; using lacking support"
            )
            credibility = LS
        relevance = link.effective_relevance()
        if relevance is None:
            warnings.append(
                f"relevance of link {link.id} ({item.id} -> "
                f"{link.hypothesis_id}) is not assessed; using lacking support"
            )
            relevance = LS
        return inferential_force(credibility, relevance)

    def eval_argument(aid: str) -> ProbabilityLabel:
        if aid in arg_cache:
            return arg_cache[aid]
        arg = out.arguments[aid]
        sub_values = [eval_hypothesis(hid) for hid in arg.sub_hypotheses]
        if any(v.direction is not Direction.FOR for v in sub_values):
            conjunction = LS
        else:
            conjunction = min_combine(v.strength for v in sub_values)
        relevance = arg.relevance
        if relevance is None:
            warnings.append(
                f"relevance of argument {aid} is not assessed; using lacking support"
            )
            relevance = LS
        force = min_combine((relevance, conjunction))
        arg_cache[aid] = force
        direction = Direction.FOR if force > LS else Direction.NEUTRAL
        out.computed[aid] = ComputedValue(
            balanced=BalancedProbability(force, LS),
            scalar=DirectionalValue(direction, force),
        )
        return force

    def eval_hypothesis(hid: str) -> DirectionalValue:
        if hid in hyp_cache:
            return hyp_cache[hid]
        node = out.hypotheses[hid]
        if node.kind is NodeKind.ASSUMPTION:
            assumed = node.assumed_probability
            if assumed is None:
                warnings.append(
                    f"assumption {hid} has no assumed probability; using "
                    f"lacking support"
                )
                assumed = LS
            balanced = BalancedProbability(assumed, LS)
        else:
            favoring: list[ProbabilityLabel] = []
            disfavoring: list[ProbabilityLabel] = []
            for lid in node.evidence_links:
                force = link_force(lid)
                link = out.links[lid]
                (favoring if link.polarity is Polarity.FAVORING else disfavoring).append(force)
            for aid in node.children:
                force = eval_argument(aid)
                arg = out.arguments[aid]
                (favoring if arg.polarity is Polarity.FAVORING else disfavoring).append(force)
            if not favoring and not disfavoring and node.kind is not NodeKind.ASSUMPTION:
                warnings.append(
                    f"hypothesis {hid} has no evidence, arguments or assumption; "
                    f"using lacking support"
                )
            support_for = max_combine(favoring) if favoring else LS
            support_against = max_combine(disfavoring) if disfavoring else LS
            balanced = BalancedProbability(support_for, support_against)
        scalar = on_balance(balanced)
        hyp_cache[hid] = scalar
        out.computed[hid] = ComputedValue(balanced=balanced, scalar=scalar)
        return scalar

    for hid in out.hypotheses:
        eval_hypothesis(hid)

    out.propagation_warnings = warnings
    return out


def what_if(
    tree: AnalysisTree, overrides: dict[str, ProbabilityLabel]
) -> AnalysisTree:
    """Propagate under temporary overrides without touching the stored tree.

    Override targets by id: an evidence item overrides its credibility, a
    link or argument its relevance, and an assumption hypothesis its
    assumed probability.  Fact-stating links keep certain relevance and
    cannot be overridden.
    """
    working = tree.copy()
    for target_id, label in overrides.items():
        if target_id in working.evidence:
            working.evidence[target_id].credibility = label
        elif target_id in working.links:
            link = working.links[target_id]
            if link.fact_leaf:
                raise TreeError(
                    f"link {target_id} states the fact itself; its relevance "
                    f"is fixed at certain"
                )
            link.relevance = label
        elif target_id in working.arguments:
            working.arguments[target_id].relevance = label
        elif target_id in working.hypotheses:
            node = working.hypotheses[target_id]
            if node.kind is not NodeKind.ASSUMPTION:
                raise TreeError(
                    f"hypothesis {target_id} is computed from its structure; "
                    f"only assumptions can be overridden"
                )
            node.assumed_probability = label
        else:
            raise UnknownIdError(f"unknown override target: {target_id}")
    return propagate(working)
