/**
 * Argumentation canvas: the tree as SVG with per-node direction and
 * strength labels, inline assessment editors, and a what-if mode that
 * shows the service's recomputed values side by side without saving.
 *
 * Every label shown comes from a service response (the analysis
 * document, the computed map, or a what-if response); layout positions
 * are the only thing decided here, and they persist separately.
 */
import { AnalysisDoc, ComputedValue } from "./api.js";
import { el, svgEl } from "./dom.js";
import { CanvasLayout } from "./state.js";

const NODE_W = 180;
const NODE_H = 54;
const X_GAP = 16;
const Y_GAP = 96;

export interface NodePosition {
  x: number;
  y: number;
}

/** Deterministic layered layout: subtree width decides x, depth decides y. */
export function computeLayout(doc: AnalysisDoc, saved?: CanvasLayout): Record<string, NodePosition> {
  const hypotheses = new Map(doc.hypotheses.map((h) => [h.id, h]));
  const argumentsById = new Map(doc.arguments.map((a) => [a.id, a]));
  const widths = new Map<string, number>();

  const hypothesisWidth = (hid: string): number => {
    const key = `H:${hid}`;
    const cached = widths.get(key);
    if (cached !== undefined) return cached;
    widths.set(key, NODE_W + X_GAP); // cycle-safe placeholder
    const node = hypotheses.get(hid);
    if (!node) return NODE_W + X_GAP;
    let total = 0;
    for (const aid of node.children) total += argumentWidth(aid);
    total += node.evidence_links.length * (NODE_W + X_GAP);
    const width = Math.max(NODE_W + X_GAP, total);
    widths.set(key, width);
    return width;
  };

  const argumentWidth = (aid: string): number => {
    const key = `A:${aid}`;
    const cached = widths.get(key);
    if (cached !== undefined) return cached;
    widths.set(key, NODE_W + X_GAP);
    const argument = argumentsById.get(aid);
    if (!argument) return NODE_W + X_GAP;
    let total = 0;
    for (const hid of argument.sub_hypotheses) total += hypothesisWidth(hid);
    const width = Math.max(NODE_W + X_GAP, total);
    widths.set(key, width);
    return width;
  };

  const positions: Record<string, NodePosition> = {};
  const placed = new Set<string>();

  const placeHypothesis = (hid: string, x: number, depth: number): void => {
    if (placed.has(hid)) return;
    placed.add(hid);
    const width = hypothesisWidth(hid);
    positions[hid] = { x: x + width / 2, y: depth * Y_GAP };
    const node = hypotheses.get(hid);
    if (!node) return;
    let cursor = x;
    for (const aid of node.children) {
      placeArgument(aid, cursor, depth + 1);
      cursor += argumentWidth(aid);
    }
    for (const lid of node.evidence_links) {
      positions[lid] = { x: cursor + (NODE_W + X_GAP) / 2, y: (depth + 1) * Y_GAP };
      cursor += NODE_W + X_GAP;
    }
  };

  const placeArgument = (aid: string, x: number, depth: number): void => {
    if (placed.has(aid)) return;
    placed.add(aid);
    const width = argumentWidth(aid);
    positions[aid] = { x: x + width / 2, y: depth * Y_GAP };
    const argument = argumentsById.get(aid);
    if (!argument) return;
    let cursor = x;
    for (const hid of argument.sub_hypotheses) {
      placeHypothesis(hid, cursor, depth + 1);
      cursor += hypothesisWidth(hid);
    }
  };

  let cursor = 0;
  for (const top of doc.tops) {
    placeHypothesis(top, cursor, 0);
    cursor += hypothesisWidth(top);
  }
  // user-dragged overrides win over the computed spots
  if (saved) {
    for (const [id, position] of Object.entries(saved.positions)) {
      if (positions[id]) positions[id] = position;
    }
  }
  return positions;
}

export function valueLabel(value: ComputedValue | undefined): string {
  if (!value) return "";
  if (value.direction === "neutral") return "lacking support";
  return `${value.direction}: ${value.strength}`;
}

export interface CanvasOptions {
  computed?: Record<string, ComputedValue>;
  whatIf?: Record<string, ComputedValue>;
  structuralBadges?: { target: string; message: string }[];
  findingBadges?: { target: string; message: string }[];
}

export function renderCanvas(doc: AnalysisDoc, options: CanvasOptions = {}, saved?: CanvasLayout): SVGElement {
  const positions = computeLayout(doc, saved);
  const entries = Object.values(positions);
  const width = Math.max(...entries.map((p) => p.x), 0) + NODE_W;
  const height = Math.max(...entries.map((p) => p.y), 0) + NODE_H * 2;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: "canvas",
  });

  const badgeTargets = new Map<string, string>();
  for (const badge of options.structuralBadges ?? []) {
    badgeTargets.set(badge.target, badge.message);
  }
  for (const badge of options.findingBadges ?? []) {
    if (!badgeTargets.has(badge.target)) badgeTargets.set(badge.target, badge.message);
  }

  const edge = (from: NodePosition, to: NodePosition, color: string): void => {
    svg.append(
      svgEl("line", {
        x1: String(from.x),
        y1: String(from.y + NODE_H / 2),
        x2: String(to.x),
        y2: String(to.y - NODE_H / 2),
        stroke: color,
        "stroke-width": "1.5",
      }),
    );
  };

  const polarityColor = (polarity: string): string =>
    polarity === "favoring" ? "#2e7d32" : "#c62828";

  for (const hypothesis of doc.hypotheses) {
    const from = positions[hypothesis.id];
    if (!from) continue;
    for (const aid of hypothesis.children) {
      const argument = doc.arguments.find((a) => a.id === aid);
      const to = positions[aid];
      if (argument && to) edge(from, to, polarityColor(argument.polarity));
    }
    for (const lid of hypothesis.evidence_links) {
      const link = doc.links.find((l) => l.id === lid);
      const to = positions[lid];
      if (link && to) edge(from, to, polarityColor(link.polarity));
    }
  }
  for (const argument of doc.arguments) {
    const from = positions[argument.id];
    if (!from) continue;
    for (const hid of argument.sub_hypotheses) {
      const to = positions[hid];
      if (to) edge(from, to, "#607d8b");
    }
  }

  const box = (
    id: string,
    position: NodePosition,
    lines: string[],
    cls: string,
  ): void => {
    const group = svgEl("g", { class: cls, "data-node": id });
    group.append(
      svgEl("rect", {
        x: String(position.x - NODE_W / 2),
        y: String(position.y - NODE_H / 2),
        width: String(NODE_W),
        height: String(NODE_H),
        rx: "6",
      }),
    );
    lines.slice(0, 3).forEach((line, index) => {
      group.append(
        svgEl(
          "text",
          {
            x: String(position.x),
            y: String(position.y - 10 + index * 15),
            "text-anchor": "middle",
            "font-size": "9",
          },
          [line.length > 40 ? line.slice(0, 39) + "…" : line],
        ),
      );
    });
    if (badgeTargets.has(id)) {
      const badge = svgEl("g", { class: "badge", "data-badge": id });
      badge.append(
        svgEl("circle", {
          cx: String(position.x + NODE_W / 2 - 6),
          cy: String(position.y - NODE_H / 2 + 6),
          r: "7",
          fill: "#ff8f00",
        }),
      );
      badge.append(svgEl("title", {}, [badgeTargets.get(id) as string]));
      svg.append(badge);
      group.append(badge);
    }
    svg.append(group);
  };

  for (const hypothesis of doc.hypotheses) {
    const position = positions[hypothesis.id];
    if (!position) continue;
    const lines = [hypothesis.statement];
    const base = valueLabel(options.computed?.[hypothesis.id]);
    const probe = valueLabel(options.whatIf?.[hypothesis.id]);
    if (base) lines.push(base);
    if (probe && probe !== base) lines.push(`what-if: ${probe}`);
    if (hypothesis.kind === "assumption" && hypothesis.assumed_probability) {
      lines.push(`assumed ${hypothesis.assumed_probability}`);
    }
    box(hypothesis.id, position, lines, `node hypothesis-${hypothesis.kind}`);
  }
  for (const argument of doc.arguments) {
    const position = positions[argument.id];
    if (!position) continue;
    const lines = [
      `${argument.id} (${argument.polarity})`,
      `relevance: ${argument.relevance ?? "unassessed"}`,
    ];
    const probe = valueLabel(options.whatIf?.[argument.id]);
    if (probe) lines.push(`what-if: ${probe}`);
    box(argument.id, position, lines, "node argument");
  }
  for (const link of doc.links) {
    const position = positions[link.id];
    if (!position) continue;
    const evidence = doc.evidence.find((e) => e.id === link.evidence_id);
    const relevance = link.fact_leaf
      ? "certain (stated fact)"
      : link.relevance ?? "unassessed";
    box(
      link.id,
      position,
      [`${link.evidence_id} ${evidence?.name ?? ""}`, `relevance: ${relevance}`],
      `node evidence-link${link.fact_leaf ? " fact-leaf" : ""}`,
    );
  }
  return svg;
}

/** Inline editor descriptors the canvas offers for a selected node. */
export interface EditorSpec {
  target: string;
  kind: "credibility" | "relevance" | "assumption";
  label: string | null;
  justification: string;
  editable: boolean;
}

export function editorFor(doc: AnalysisDoc, nodeId: string): EditorSpec | null {
  const evidence = doc.evidence.find((e) => e.id === nodeId);
  if (evidence) {
    return {
      target: nodeId,
      kind: "credibility",
      label: evidence.credibility,
      justification: evidence.credibility_justification,
      editable: true,
    };
  }
  const link = doc.links.find((l) => l.id === nodeId);
  if (link) {
    return {
      target: nodeId,
      kind: "relevance",
      label: link.fact_leaf ? "certain[100,100]" : link.relevance,
      justification: link.relevance_justification,
      editable: !link.fact_leaf, // evidence about the fact itself: fixed
    };
  }
  const argument = doc.arguments.find((a) => a.id === nodeId);
  if (argument) {
    return {
      target: nodeId,
      kind: "relevance",
      label: argument.relevance,
      justification: argument.relevance_justification,
      editable: true,
    };
  }
  const hypothesis = doc.hypotheses.find((h) => h.id === nodeId);
  if (hypothesis && hypothesis.kind === "assumption") {
    return {
      target: nodeId,
      kind: "assumption",
      label: hypothesis.assumed_probability,
      justification: hypothesis.assumption_justification,
      editable: true,
    };
  }
  return null;
}

export function renderEditor(
  spec: EditorSpec,
  labels: string[],
  onSubmit: (label: string, justification: string) => void,
): HTMLElement {
  const select = el("select", { "data-field": "label" });
  for (const token of labels) {
    const option = el("option", { value: token }, [token]);
    if (token === spec.label) option.setAttribute("selected", "selected");
    select.append(option);
  }
  const justification = el("textarea", { "data-field": "justification" }, [
    spec.justification,
  ]);
  const submit = el("button", {}, ["Save assessment"]);
  const form = el("div", { class: `editor editor-${spec.kind}`, "data-target": spec.target }, [
    el("h4", {}, [`${spec.kind} of ${spec.target}`]),
    select,
    justification,
    submit,
  ]);
  if (!spec.editable) {
    select.setAttribute("disabled", "disabled");
    justification.setAttribute("disabled", "disabled");
    submit.setAttribute("disabled", "disabled");
    form.append(
      el("p", { class: "fixed-note" }, [
        "Relevance is certain by definition: this link states the fact itself.",
      ]),
    );
  } else {
    submit.addEventListener("click", () =>
      onSubmit((select as HTMLSelectElement).value, (justification as HTMLTextAreaElement).value),
    );
  }
  return form;
}
