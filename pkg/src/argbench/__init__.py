"""Collaborative evidence-based argumentation workbench.

Core pieces: the seven-point ordinal probability scale with min-max
combination (:mod:`argbench.scale`), argumentation trees and bottom-up
propagation (:mod:`argbench.model`, :mod:`argbench.engine`), reasoning
analytics (:mod:`argbench.analytics`), the team brainstorming protocol
(:mod:`argbench.brainstorm`), team formation (:mod:`argbench.teams`),
report generation (:mod:`argbench.report`), and the event-sourced
service (:mod:`argbench.storage`, :mod:`argbench.service`).
"""
from .scale import (
    BalancedProbability,
    Direction,
    DirectionalValue,
    ProbabilityLabel,
    complement_phrase,
    inferential_force,
    label_from_percentage,
    max_combine,
    min_combine,
    on_balance,
)

__version__ = "0.1.0"

__all__ = [
    "BalancedProbability",
    "Direction",
    "DirectionalValue",
    "ProbabilityLabel",
    "complement_phrase",
    "inferential_force",
    "label_from_percentage",
    "max_combine",
    "min_combine",
    "on_balance",
    "__version__",
]
