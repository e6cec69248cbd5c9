"""Workbench configuration: service binding, storage, team windows, thresholds.

Sources, in increasing precedence: built-in defaults, a YAML or JSON
config file, environment variables (``ARGBENCH_*``).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml

from .analytics import AnalyticsConfig
from .teams import HOUR, TeamParameters


@dataclass(frozen=True)
class WorkbenchConfig:
    addr: str = "127.0.0.1:8440"
    storage_dir: str = "./argbench-data"
    team: TeamParameters = field(default_factory=TeamParameters)
    analytics: AnalyticsConfig = field(default_factory=AnalyticsConfig)


class ConfigError(ValueError):
    pass


def _team_from_mapping(data: dict, base: TeamParameters) -> TeamParameters:
    def hours(key: str, default: float) -> float:
        if key in data:
            return float(data[key]) * HOUR
        return default

    return TeamParameters(
        max_size=int(data.get("max_size", base.max_size)),
        window1=hours("window1_hours", base.window1),
        fallback_size=int(data.get("fallback_size", base.fallback_size)),
        window2=hours("window2_hours", base.window2),
        internal_min=int(data.get("internal_min", base.internal_min)),
        internal_max=int(data.get("internal_max", base.internal_max)),
    )


def load_config(path: str | None = None, env: dict | None = None) -> WorkbenchConfig:
    env = os.environ if env is None else env
    config = WorkbenchConfig()

    if path:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file does not parse: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a mapping")
        service = data.get("service", {})
        analytics = data.get("analytics", {})
        config = WorkbenchConfig(
            addr=service.get("addr", config.addr),
            storage_dir=service.get("storage_dir", config.storage_dir),
            team=_team_from_mapping(data.get("team", {}), config.team),
            analytics=AnalyticsConfig(
                min_developed_hypotheses=int(
                    analytics.get(
                        "min_developed_hypotheses",
                        config.analytics.min_developed_hypotheses,
                    )
                ),
                min_evidence_per_leaf=int(
                    analytics.get(
                        "min_evidence_per_leaf", config.analytics.min_evidence_per_leaf
                    )
                ),
            ),
        )

    team_env = {}
    if "ARGBENCH_TEAM_MAX_SIZE" in env:
        team_env["max_size"] = env["ARGBENCH_TEAM_MAX_SIZE"]
    if "ARGBENCH_TEAM_WINDOW1_HOURS" in env:
        team_env["window1_hours"] = env["ARGBENCH_TEAM_WINDOW1_HOURS"]
    if "ARGBENCH_TEAM_FALLBACK_SIZE" in env:
        team_env["fallback_size"] = env["ARGBENCH_TEAM_FALLBACK_SIZE"]
    if "ARGBENCH_TEAM_WINDOW2_HOURS" in env:
        team_env["window2_hours"] = env["ARGBENCH_TEAM_WINDOW2_HOURS"]

    return WorkbenchConfig(
        addr=env.get("ARGBENCH_ADDR", config.addr),
        storage_dir=env.get("ARGBENCH_STORAGE_DIR", config.storage_dir),
        team=_team_from_mapping(team_env, config.team),
        analytics=config.analytics,
    )
