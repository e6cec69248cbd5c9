"""Command-line front door.

Subcommands: ``serve`` (run the HTTP service), ``replay`` (apply a
brainstorm event script), ``analyze`` (propagate an analysis file),
``check`` (print analytics findings), ``report`` (render the production
report plus argument figures), ``simulate-teams`` (run a timed roster
scenario).

Exit codes: 0 success (warnings included), 1 domain errors (structural
findings), 2 usage errors (bad flags, unreadable or ill-formed input).
"""
from __future__ import annotations

import json
import os
import sys

import click
import yaml

from . import analytics, brainstorm as bs, engine, fileformat, report as report_mod, teams
from .config import ConfigError, load_config
from .scale import Direction
from .storage import ProblemStore


def _load_tree_or_usage(path: str):
    try:
        return fileformat.load_tree(path)
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}")
    except fileformat.DocumentError as exc:
        raise click.UsageError(f"{path}: {exc}")


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}")


@click.group()
def main() -> None:
    """Evidence-based argumentation workbench."""


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------


@main.command()
@click.option("--addr", default=None, help="listen address host:port")
@click.option("--storage-dir", default=None, type=click.Path(), help="event-log root")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option(
    "--seed-demo",
    default=None,
    type=click.Path(exists=True),
    help="brainstorm script to seed as the 'cesium' demo problem",
)
def serve(addr, storage_dir, config_path, seed_demo) -> None:
    """Run the collaboration service."""
    import uvicorn

    from .service import create_app, seed_demo as seed

    try:
        config = load_config(config_path)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    if addr:
        config = type(config)(
            addr=addr,
            storage_dir=storage_dir or config.storage_dir,
            team=config.team,
            analytics=config.analytics,
        )
    elif storage_dir:
        config = type(config)(
            addr=config.addr,
            storage_dir=storage_dir,
            team=config.team,
            analytics=config.analytics,
        )
    store = ProblemStore(config.storage_dir, config)
    if seed_demo and "cesium" not in store.problem_ids():
        tokens = seed(store, seed_demo)
        for participant, token in sorted(tokens.items()):
            click.echo(f"seeded token {participant}: {token}")
    host, _, port = config.addr.rpartition(":")
    app = create_app(store)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
def replay(input_path, output_path) -> None:
    """Apply a brainstorm event script and print the final state."""
    text = _read_text(input_path)
    try:
        state, events = fileformat.parse_brainstorm_script(text)
        for event in events:
            state = bs.apply_event(state, event)
    except (fileformat.DocumentError,) as exc:
        raise click.UsageError(str(exc))
    except bs.ProtocolError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    click.echo(state.question)
    click.echo("")
    for item in state.live_items(bs.ItemKind.ANSWER):
        tv = bs.team_version(item)
        if tv is None:
            continue
        voters = ", ".join(sorted(tv.votes))
        count = len(tv.votes)
        plural = "vote" if count == 1 else "votes"
        click.echo(f"Team version: {tv.text} ({count} {plural}: {voters})")
        for version in item.versions:
            if version is tv:
                continue
            voters = ", ".join(sorted(version.votes))
            click.echo(f"    {version.author}: {version.text} ({len(version.votes)} vote: {voters})")
    deleted = [i for i in state.items.values() if i.deleted]
    if deleted:
        click.echo("")
        for item in deleted:
            reasons = "; ".join(f"{p}: {j}" for p, j in item.rejected_by)
            click.echo(f"Deleted {item.kind.value} {item.id} ({reasons})")
    if state.ballots:
        click.echo("")
        click.echo("Team credibility:")
        for tag in sorted(state.ballots):
            ballot = state.ballots[tag]
            if not ballot.assessments:
                continue
            label = bs.aggregate_credibility(ballot)
            click.echo(f"  {tag}: {label.phrase}")
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            json.dump(bs.to_view(state), fh, indent=2, ensure_ascii=False)
            fh.write("\n")


# ---------------------------------------------------------------------------
# analyze / check / report
# ---------------------------------------------------------------------------


def _print_structural(error: engine.StructuralError) -> None:
    for issue in error.issues:
        click.echo(f"error structure {issue.target}: {issue.message}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
def analyze(input_path, output_path) -> None:
    """Propagate an analysis file and print the computed top values."""
    tree = _load_tree_or_usage(input_path)
    try:
        computed = engine.propagate(tree)
    except engine.StructuralError as exc:
        _print_structural(exc)
        sys.exit(1)

    def value_text(node_id: str) -> str:
        value = computed.computed[node_id].scalar
        if value.direction is Direction.NEUTRAL:
            return "lacking support (0-50%)"
        return f"{value.direction.value}, {value.strength.phrase}"

    printed: set[str] = set()

    def show_hypothesis(hid: str, depth: int) -> None:
        node = computed.hypotheses[hid]
        click.echo(f"{'  ' * depth}{hid} {node.statement}: {value_text(hid)}")
        if hid in printed:
            return
        printed.add(hid)
        for aid in node.children:
            argument = computed.arguments[aid]
            click.echo(
                f"{'  ' * (depth + 1)}{aid} ({argument.polarity.value} argument): "
                f"{value_text(aid)}"
            )
            for sub in argument.sub_hypotheses:
                show_hypothesis(sub, depth + 2)

    for top_id in computed.tops:
        show_hypothesis(top_id, 0)
    if computed.propagation_warnings:
        click.echo("warnings:")
        for warning in computed.propagation_warnings:
            click.echo(f"  - {warning}")
    if output_path:
        fileformat.save_tree(computed, output_path, include_computed=True)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def check(input_path, config_path) -> None:
    """Run the analytics assistant and print findings in stable order."""
    tree = _load_tree_or_usage(input_path)
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    findings = analytics.run_checks(tree, config.analytics)
    for finding in findings:
        click.echo(finding.render())
    if analytics.has_errors(findings):
        sys.exit(1)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
@click.option("--format", "fmt", default="plain", type=click.Choice(["plain", "markup"]))
@click.option(
    "--figures-dir",
    default=None,
    type=click.Path(),
    help="directory for argument-fragment figures (default: <output>_figures)",
)
@click.option("--no-figures", is_flag=True, help="skip figure rendering")
def report(input_path, output_path, fmt, figures_dir, no_figures) -> None:
    """Generate and render the production report (text plus figures)."""
    tree = _load_tree_or_usage(input_path)
    try:
        computed = engine.propagate(tree)
    except engine.StructuralError as exc:
        _print_structural(exc)
        sys.exit(1)
    built = report_mod.generate_report(computed)

    figure_paths: dict[str, str] = {}
    if not no_figures and (figures_dir or output_path):
        from .figures import render_report_figures

        target_dir = figures_dir or (os.path.splitext(output_path)[0] + "_figures")
        rendered = render_report_figures(computed, target_dir)
        if output_path:
            base = os.path.dirname(os.path.abspath(output_path))
            figure_paths = {
                key: os.path.relpath(path, base) for key, path in rendered.items()
            }
        else:
            figure_paths = rendered

    text = report_mod.render(built, fmt, figure_paths=figure_paths)
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"report written to {output_path}")
        for key in sorted(figure_paths):
            click.echo(f"figure {key}: {figure_paths[key]}")
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# simulate-teams
# ---------------------------------------------------------------------------


@main.command("simulate-teams")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--seed", default=0, type=int, help="seed for the random-fixed policy")
def simulate_teams(input_path, seed) -> None:
    """Run a (time, event) roster scenario and print the timeline."""
    try:
        scenario = yaml.safe_load(_read_text(input_path))
    except yaml.YAMLError as exc:
        raise click.UsageError(f"{input_path}: {exc}")
    if not isinstance(scenario, dict):
        raise click.UsageError("scenario must be a mapping")

    policy = scenario.get("policy", "ad-hoc")
    if policy == "random-fixed":
        participants = scenario.get("participants", [])
        roster = teams.random_fixed_roster(
            participants, seed=scenario.get("seed", seed)
        )
        for team in roster.teams:
            names = ", ".join(team.participant_names())
            click.echo(f"{team.id} closed (size {team.size}): {names}")
        return

    params = teams.TeamParameters()
    raw_params = scenario.get("parameters", {})
    if raw_params:
        params = teams.TeamParameters(
            max_size=int(raw_params.get("max_size", params.max_size)),
            window1=teams.parse_duration(raw_params.get("window1", params.window1)),
            fallback_size=int(raw_params.get("fallback_size", params.fallback_size)),
            window2=teams.parse_duration(raw_params.get("window2", params.window2)),
        )
    roster = teams.Roster(policy="ad-hoc", parameters=params)

    def closures(before: teams.Roster, after: teams.Roster) -> list[str]:
        lines = []
        before_status = {t.id: t.status for t in before.teams}
        for team in after.teams:
            if team.status == "closed" and before_status.get(team.id) != "closed":
                lines.append(
                    f"{team.id} closed at {team.closed_at / teams.HOUR:g}h "
                    f"(size {team.size})"
                )
        return lines

    for entry in scenario.get("events", []):
        at = teams.parse_duration(entry.get("at", 0))
        stamp = f"t={at / teams.HOUR:g}h"
        try:
            if "join" in entry:
                before = roster
                roster, team_id = teams.join(roster, entry["join"], at)
                team = next(t for t in roster.teams if t.id == team_id)
                click.echo(
                    f"{stamp} join {entry['join']} -> {team_id} "
                    f"({team.status}, size {team.size})"
                )
                for line in closures(before, roster):
                    click.echo(f"{stamp} {line}")
            elif "tick" in entry:
                before = roster
                roster = teams.tick(roster, at)
                click.echo(f"{stamp} tick")
                for line in closures(before, roster):
                    click.echo(f"{stamp} {line}")
            else:
                raise click.UsageError(f"scenario entry needs 'join' or 'tick': {entry}")
        except teams.RosterError as exc:
            click.echo(f"{stamp} error: {exc}", err=True)
            sys.exit(1)

    click.echo("final roster:")
    for team in roster.teams:
        names = ", ".join(team.participant_names())
        closed = (
            f"closed at {team.closed_at / teams.HOUR:g}h"
            if team.closed_at is not None
            else "open"
        )
        click.echo(f"  {team.id} {closed} (size {team.size}): {names}")


if __name__ == "__main__":
    main()
