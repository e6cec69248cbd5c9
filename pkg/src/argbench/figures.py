"""Argumentation-fragment figures rendered with matplotlib.

The report pipeline drops one PNG per top-level argument next to the
rendered text, mirroring the report's "Figure for Paragraph N" links.
Layout is a plain recursive tree walk (subtree widths decide x, depth
decides y), so identical trees always draw identically.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import FancyBboxPatch

from .model import AnalysisTree, Polarity
from .scale import Direction

FAVORING_COLOR = "#2e7d32"
DISFAVORING_COLOR = "#c62828"
NODE_FACE = "#f4f6f8"
EVIDENCE_FACE = "#fff8e1"
ASSUMPTION_FACE = "#ede7f6"

_BOX_W = 2.6
_BOX_H = 0.9
_X_GAP = 0.4
_Y_GAP = 1.6


def _wrap(text: str, width: int = 26) -> str:
    words = text.split()
    lines: list[str] = []
    current = ""
    for word in words:
        candidate = f"{current} {word}".strip()
        if len(candidate) > width and current:
            lines.append(current)
            current = word
        else:
            current = candidate
    if current:
        lines.append(current)
    return "\n".join(lines[:4])


def _value_text(tree: AnalysisTree, node_id: str) -> str:
    value = tree.computed.get(node_id)
    if value is None:
        return ""
    scalar = value.scalar
    if scalar.direction is Direction.NEUTRAL:
        return "lacking support"
    return f"{scalar.direction.value}: {scalar.strength.display_name}"


class _Layout:
    """Bottom-up width computation, then top-down x placement."""

    def __init__(self, tree: AnalysisTree):
        self.tree = tree
        self.positions: dict[tuple[str, str], tuple[float, float]] = {}
        self.widths: dict[tuple[str, str], float] = {}

    def width_of_hypothesis(self, hid: str) -> float:
        key = ("H", hid)
        if key in self.widths:
            return self.widths[key]
        node = self.tree.hypotheses[hid]
        children = [self.width_of_argument(aid) for aid in node.children]
        children += [_BOX_W + _X_GAP for _ in node.evidence_links]
        width = max(_BOX_W + _X_GAP, sum(children))
        self.widths[key] = width
        return width

    def width_of_argument(self, aid: str) -> float:
        key = ("A", aid)
        if key in self.widths:
            return self.widths[key]
        arg = self.tree.arguments[aid]
        width = max(
            _BOX_W + _X_GAP,
            sum(self.width_of_hypothesis(h) for h in arg.sub_hypotheses),
        )
        self.widths[key] = width
        return width

    def place_hypothesis(self, hid: str, x: float, depth: int) -> None:
        width = self.width_of_hypothesis(hid)
        self.positions[("H", hid)] = (x + width / 2, -depth * _Y_GAP)
        node = self.tree.hypotheses[hid]
        cursor = x
        for aid in node.children:
            self.place_argument(aid, cursor, depth + 1)
            cursor += self.width_of_argument(aid)
        for lid in node.evidence_links:
            self.positions[("L", lid)] = (cursor + (_BOX_W + _X_GAP) / 2, -(depth + 1) * _Y_GAP)
            cursor += _BOX_W + _X_GAP

    def place_argument(self, aid: str, x: float, depth: int) -> None:
        width = self.width_of_argument(aid)
        self.positions[("A", aid)] = (x + width / 2, -depth * _Y_GAP)
        cursor = x
        for hid in self.tree.arguments[aid].sub_hypotheses:
            self.place_hypothesis(hid, cursor, depth + 1)
            cursor += self.width_of_hypothesis(hid)


def _draw_box(ax, x, y, text, face, edge) -> None:
    box = FancyBboxPatch(
        (x - _BOX_W / 2, y - _BOX_H / 2),
        _BOX_W,
        _BOX_H,
        boxstyle="round,pad=0.08",
        facecolor=face,
        edgecolor=edge,
        linewidth=1.2,
    )
    ax.add_patch(box)
    ax.text(x, y, text, ha="center", va="center", fontsize=7)


def render_argument_figure(tree: AnalysisTree, argument_id: str, path: str) -> str:
    """Draw one argument subtree to ``path`` (PNG) and return the path."""
    arg = tree.arguments[argument_id]
    layout = _Layout(tree)
    layout.place_argument(argument_id, 0.0, 0)

    fig, ax = plt.subplots(figsize=(max(4.0, layout.width_of_argument(argument_id) * 1.1), 6.0))
    ax.axis("off")

    # edges first, boxes on top
    def connect(a: tuple[float, float], b: tuple[float, float], color: str) -> None:
        ax.plot([a[0], b[0]], [a[1] - _BOX_H / 2, b[1] + _BOX_H / 2], color=color, linewidth=1.0)

    def walk_argument(aid: str) -> None:
        pos = layout.positions[("A", aid)]
        for hid in tree.arguments[aid].sub_hypotheses:
            connect(pos, layout.positions[("H", hid)], "#607d8b")
            walk_hypothesis(hid)

    def walk_hypothesis(hid: str) -> None:
        pos = layout.positions[("H", hid)]
        node = tree.hypotheses[hid]
        for aid in node.children:
            child_arg = tree.arguments[aid]
            color = (
                FAVORING_COLOR
                if child_arg.polarity is Polarity.FAVORING
                else DISFAVORING_COLOR
            )
            connect(pos, layout.positions[("A", aid)], color)
            walk_argument(aid)
        for lid in node.evidence_links:
            link = tree.links[lid]
            color = (
                FAVORING_COLOR if link.polarity is Polarity.FAVORING else DISFAVORING_COLOR
            )
            connect(pos, layout.positions[("L", lid)], color)

    walk_argument(argument_id)

    for (kind, node_id), (x, y) in sorted(layout.positions.items()):
        if kind == "A":
            arg_node = tree.arguments[node_id]
            rel = arg_node.relevance.display_name if arg_node.relevance else "unassessed"
            text = _wrap(f"{node_id} ({arg_node.polarity.value}, relevance {rel})")
            edge = (
                FAVORING_COLOR
                if arg_node.polarity is Polarity.FAVORING
                else DISFAVORING_COLOR
            )
            _draw_box(ax, x, y, text, NODE_FACE, edge)
        elif kind == "H":
            node = tree.hypotheses[node_id]
            label = _value_text(tree, node_id)
            text = _wrap(node.statement)
            if label:
                text += f"\n[{label}]"
            face = ASSUMPTION_FACE if node.is_assumption else NODE_FACE
            _draw_box(ax, x, y, text, face, "#37474f")
        else:
            link = tree.links[node_id]
            item = tree.evidence[link.evidence_id]
            rel = link.effective_relevance()
            text = _wrap(
                f"{item.id} {item.name}\n(relevance {rel.display_name if rel else 'unassessed'})"
            )
            _draw_box(ax, x, y, text, EVIDENCE_FACE, "#8d6e63")

    ax.relim()
    ax.autoscale_view()
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": "argbench"})
    plt.close(fig)
    return path


def render_report_figures(tree: AnalysisTree, out_dir: str) -> dict[str, str]:
    """One figure per top-level argument; returns fragment id -> file path."""
    os.makedirs(out_dir, exist_ok=True)
    paths: dict[str, str] = {}
    for top_id in tree.tops:
        top = tree.hypotheses.get(top_id)
        if top is None:
            continue
        for aid in top.children:
            if aid not in tree.arguments:
                continue
            path = os.path.join(out_dir, f"{aid}.png")
            render_argument_figure(tree, aid, path)
            paths[f"fragment-{aid}"] = path
    return paths
