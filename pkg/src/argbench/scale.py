"""Ordinal probability scale and its combination rules.

The workbench expresses all uncertainty on a seven-point ordered scale
running from ``lacking support`` up to ``certain``.  Everything combines
by rank: conjunctions take the minimum, disjunctions the maximum, and the
force an item of evidence transmits upward is the minimum of its
credibility and its relevance.  There is no numeric arithmetic on the
percentages; the intervals exist for classification and display only.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "ProbabilityLabel",
    "BalancedProbability",
    "Direction",
    "DirectionalValue",
    "ScaleError",
    "label_from_percentage",
    "min_combine",
    "max_combine",
    "inferential_force",
    "demote",
    "on_balance",
    "complement_phrase",
    "parse_label",
]


class ScaleError(ValueError):
    """Raised when an operation falls outside the scale's domain."""


class ProbabilityLabel(enum.IntEnum):
    """The seven ordered probability values.

    The integer value doubles as the rank, so ``min``/``max`` and the
    comparison operators agree with the scale order.
    """

    LACKING_SUPPORT = 0
    BARELY_LIKELY = 1
    LIKELY = 2
    MORE_THAN_LIKELY = 3
    VERY_LIKELY = 4
    ALMOST_CERTAIN = 5
    CERTAIN = 6

    @property
    def rank(self) -> int:
        return int(self)

    @property
    def display_name(self) -> str:
        """Lowercase name as written in prose, e.g. ``more than likely``."""
        return self.name.lower().replace("_", " ")

    @property
    def interval(self) -> tuple[int, int]:
        """Classification interval ``[lo, hi)`` in percent (``certain`` is [100, 100])."""
        return _INTERVALS[self]

    @property
    def display_range(self) -> str:
        """The percent range as printed in reports, e.g. ``55-70%``."""
        return _DISPLAY_RANGES[self]

    @property
    def phrase(self) -> str:
        """Report phrase with interval, e.g. ``likely (55-70%)``."""
        return f"{self.display_name} ({self.display_range})"

    @property
    def token(self) -> str:
        """Serialized form: snake-case name plus interval, e.g. ``likely[55,70)``."""
        lo, hi = self.interval
        close = "]" if self is ProbabilityLabel.CERTAIN else ")"
        return f"{self.name.lower()}[{lo},{hi}{close}"


_INTERVALS: dict[ProbabilityLabel, tuple[int, int]] = {
    ProbabilityLabel.LACKING_SUPPORT: (0, 50),
    ProbabilityLabel.BARELY_LIKELY: (50, 55),
    ProbabilityLabel.LIKELY: (55, 70),
    ProbabilityLabel.MORE_THAN_LIKELY: (70, 80),
    ProbabilityLabel.VERY_LIKELY: (80, 95),
    ProbabilityLabel.ALMOST_CERTAIN: (95, 100),
    ProbabilityLabel.CERTAIN: (100, 100),
}

# Percent ranges as they appear in prose.  "almost certain" prints as
# 95-99% (its complement, "almost no chance", prints as 1-5%).
_DISPLAY_RANGES: dict[ProbabilityLabel, str] = {
    ProbabilityLabel.LACKING_SUPPORT: "0-50%",
    ProbabilityLabel.BARELY_LIKELY: "50-55%",
    ProbabilityLabel.LIKELY: "55-70%",
    ProbabilityLabel.MORE_THAN_LIKELY: "70-80%",
    ProbabilityLabel.VERY_LIKELY: "80-95%",
    ProbabilityLabel.ALMOST_CERTAIN: "95-99%",
    ProbabilityLabel.CERTAIN: "100%",
}

# Complements are rendered only for strengths >= likely; weaker values
# fall back to "lacking support (0-50%)" on the caller's side.
_COMPLEMENT_PHRASES: dict[ProbabilityLabel, str] = {
    ProbabilityLabel.LIKELY: "unlikely (30-45%)",
    ProbabilityLabel.MORE_THAN_LIKELY: "not likely (20-30%)",
    ProbabilityLabel.VERY_LIKELY: "very unlikely (5-20%)",
    ProbabilityLabel.ALMOST_CERTAIN: "almost no chance (1-5%)",
    ProbabilityLabel.CERTAIN: "no chance (0%)",
}

# Complement phrases that read as a noun ("there is almost no chance
# that ...") rather than an adjective ("it is very unlikely that ...").
_NOMINAL_COMPLEMENTS = frozenset(
    {ProbabilityLabel.ALMOST_CERTAIN, ProbabilityLabel.CERTAIN}
)

LACKING_SUPPORT_PHRASE = "lacking support (0-50%)"

_TOKEN_RE = re.compile(r"^([a-z_ ]+?)(?:\[\d+,\d+[)\]])?$")

_BY_NAME = {label.name.lower(): label for label in ProbabilityLabel}
_BY_NAME.update({label.display_name: label for label in ProbabilityLabel})


def parse_label(text: str) -> ProbabilityLabel:
    """Parse a serialized label.

    Accepts the full token (``likely[55,70)``), the snake-case name
    (``likely``) or the prose name (``more than likely``).
    """
    match = _TOKEN_RE.match(text.strip().lower())
    if match and match.group(1) in _BY_NAME:
        label = _BY_NAME[match.group(1)]
        if text.strip().lower() in (label.token, label.name.lower(), label.display_name):
            return label
    raise ScaleError(f"not a probability label: {text!r}")


def label_from_percentage(p: float) -> ProbabilityLabel:
    """Classify a percentage into its label.

    A boundary percentage belongs to the higher label (50 is barely
    likely, 55 is likely, ..., 100 is certain).
    """
    if not 0 <= p <= 100:
        raise ScaleError(f"percentage out of range [0, 100]: {p}")
    for label in reversed(ProbabilityLabel):
        if p >= label.interval[0]:
            return label
    raise AssertionError("unreachable: intervals cover [0, 100]")


def min_combine(labels: Iterable[ProbabilityLabel]) -> ProbabilityLabel:
    """Conjunction rule: the weakest label wins."""
    labels = list(labels)
    if not labels:
        raise ScaleError("min_combine requires at least one label")
    return min(labels)


def max_combine(labels: Iterable[ProbabilityLabel]) -> ProbabilityLabel:
    """Disjunction / multiple-argument rule: the strongest label wins."""
    labels = list(labels)
    if not labels:
        raise ScaleError("max_combine requires at least one label")
    return max(labels)


def inferential_force(
    credibility: ProbabilityLabel, relevance: ProbabilityLabel
) -> ProbabilityLabel:
    """Force an item transmits upward: the smaller of credibility and relevance."""
    return min_combine((credibility, relevance))


def demote(label: ProbabilityLabel, steps: int = 1) -> ProbabilityLabel:
    """Lower a label by ``steps`` ranks, floored at lacking support."""
    return ProbabilityLabel(max(label.rank - steps, 0))


class Direction(enum.Enum):
    FOR = "for"
    AGAINST = "against"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class BalancedProbability:
    """Total favoring support paired with total disfavoring support."""

    support_for: ProbabilityLabel
    support_against: ProbabilityLabel

    @property
    def dissonant(self) -> bool:
        """Equal, non-trivial pull in both directions."""
        return (
            self.support_for == self.support_against
            and self.support_for > ProbabilityLabel.LACKING_SUPPORT
        )


@dataclass(frozen=True)
class DirectionalValue:
    """One-sided projection of a balanced probability.

    ``signed_rank`` orders values for display: supported hypotheses sort
    above neutral ones, which sort above refuted ones, and a more firmly
    refuted hypothesis sorts below a mildly refuted one.
    """

    direction: Direction
    strength: ProbabilityLabel

    def __post_init__(self) -> None:
        if (
            self.direction is Direction.NEUTRAL
            and self.strength != ProbabilityLabel.LACKING_SUPPORT
        ):
            raise ScaleError("neutral direction requires lacking-support strength")

    @property
    def signed_rank(self) -> int:
        if self.direction is Direction.FOR:
            return self.strength.rank
        if self.direction is Direction.AGAINST:
            return -self.strength.rank
        return 0


NEUTRAL_VALUE = DirectionalValue(Direction.NEUTRAL, ProbabilityLabel.LACKING_SUPPORT)


def on_balance(pair: BalancedProbability) -> DirectionalValue:
    """Fuse favoring and disfavoring support into one directional value.

    The stronger side wins and is demoted one rank when genuinely
    contested; an exact tie is neutral.  This fusion rule is a local
    convention, chosen to be monotone and symmetric, and is deliberately
    isolated here so it can be swapped out.
    """
    f, d = pair.support_for, pair.support_against
    bottom = ProbabilityLabel.LACKING_SUPPORT
    if f == d:
        return NEUTRAL_VALUE
    if d == bottom:
        return DirectionalValue(Direction.FOR, f)
    if f == bottom:
        return DirectionalValue(Direction.AGAINST, d)
    if f > d:
        return DirectionalValue(Direction.FOR, demote(f))
    return DirectionalValue(Direction.AGAINST, demote(d))


def complement_phrase(label: ProbabilityLabel) -> str:
    """Report phrase for the complement of a strength >= likely.

    The printed interval is the reflection of the label's display range
    (e.g. very likely, 80-95%, reflects to very unlikely, 5-20%).
    """
    if label < ProbabilityLabel.LIKELY:
        raise ScaleError(
            f"no complement phrase below 'likely': {label.display_name}"
        )
    return _COMPLEMENT_PHRASES[label]


def complement_is_nominal(label: ProbabilityLabel) -> bool:
    """True when the complement phrase is a noun phrase ("almost no chance")."""
    return label in _NOMINAL_COMPLEMENTS
