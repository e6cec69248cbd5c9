/** View rendering against recorded API fixtures: values appear verbatim. */
import { describe, expect, it } from "vitest";

import { renderFindings } from "../src/analytics.js";
import { AnalysisDoc, FindingView, ReportView, TaskView } from "../src/api.js";
import { computeLayout, editorFor, renderCanvas, valueLabel } from "../src/canvas.js";
import { renderItem, renderTask } from "../src/checklist.js";
import { renderReport } from "../src/report.js";

// recorded from GET /problems/cesium/analyses/P1 after import (abridged)
const doc: AnalysisDoc = {
  schema: "analysis/1",
  question: "What happened to the cesium-137 canister?",
  tops: ["H1", "H2"],
  evidence: [
    {
      id: "E1",
      name: "Washington Gazette",
      body: "press report",
      source_kind: "documentary",
      credibility: "likely[55,70)",
      credibility_justification: "",
    },
  ],
  hypotheses: [
    {
      id: "H1",
      statement: "The cesium-137 canister was stolen",
      kind: "top",
      children: ["A1"],
      evidence_links: [],
      assumed_probability: null,
      assumption_justification: "",
      headline_template: null,
    },
    {
      id: "H2",
      statement: "The cesium-137 canister was misplaced",
      kind: "top",
      children: [],
      evidence_links: ["L2"],
      assumed_probability: null,
      assumption_justification: "",
      headline_template: null,
    },
    {
      id: "H3",
      statement: "A truck left with the canister",
      kind: "fact-leaf",
      children: [],
      evidence_links: ["L1"],
      assumed_probability: null,
      assumption_justification: "",
      headline_template: null,
    },
  ],
  arguments: [
    {
      id: "A1",
      polarity: "favoring",
      summary: "trucked out",
      relevance: "more_than_likely[70,80)",
      relevance_justification: "",
      sub_hypotheses: ["H3"],
    },
  ],
  links: [
    {
      id: "L1",
      evidence_id: "E1",
      hypothesis_id: "H3",
      polarity: "favoring",
      fact_leaf: true,
      relevance: null,
      relevance_justification: "",
    },
    {
      id: "L2",
      evidence_id: "E1",
      hypothesis_id: "H2",
      polarity: "disfavoring",
      fact_leaf: false,
      relevance: "barely_likely[50,55)",
      relevance_justification: "weak tie",
    },
  ],
  sequence: 1,
};

const computed = {
  H1: {
    support_for: "likely[55,70)",
    support_against: "lacking_support[0,50)",
    dissonant: false,
    direction: "for",
    strength: "likely[55,70)",
  },
  H2: {
    support_for: "lacking_support[0,50)",
    support_against: "barely_likely[50,55)",
    dissonant: false,
    direction: "against",
    strength: "barely_likely[50,55)",
  },
};

describe("argumentation canvas", () => {
  it("layout is deterministic and covers every node", () => {
    const first = computeLayout(doc);
    const second = computeLayout(doc);
    expect(first).toEqual(second);
    for (const id of ["H1", "H2", "H3", "A1", "L1", "L2"]) {
      expect(first[id]).toBeDefined();
    }
  });

  it("saved positions override computed ones", () => {
    const layout = computeLayout(doc, { positions: { H1: { x: 5, y: 7 } } });
    expect(layout.H1).toEqual({ x: 5, y: 7 });
  });

  it("shows the service's direction and strength verbatim", () => {
    const svg = renderCanvas(doc, { computed });
    const text = svg.textContent ?? "";
    expect(text).toContain("for: likely[55,70)");
    expect(text).toContain("against: barely_likely[50,55)");
  });

  it("shows what-if values side by side without replacing the saved ones", () => {
    const probe = {
      H1: { ...computed.H1, direction: "neutral", strength: "lacking_support[0,50)" },
    };
    const svg = renderCanvas(doc, { computed, whatIf: probe });
    const text = svg.textContent ?? "";
    expect(text).toContain("for: likely[55,70)");
    expect(text).toContain("what-if: lacking support");
  });

  it("fact-stating links are shown as certain and not editable", () => {
    const svg = renderCanvas(doc, { computed });
    expect(svg.textContent).toContain("certain (stated fact)");
    const spec = editorFor(doc, "L1");
    expect(spec?.editable).toBe(false);
    const editable = editorFor(doc, "L2");
    expect(editable?.editable).toBe(true);
    expect(editable?.label).toBe("barely_likely[50,55)");
  });

  it("badges mark flagged nodes", () => {
    const svg = renderCanvas(doc, {
      computed,
      findingBadges: [{ target: "H1", message: "only favoring material" }],
    });
    expect(svg.querySelector('[data-badge="H1"]')).not.toBeNull();
  });

  it("neutral values render as lacking support", () => {
    expect(
      valueLabel({
        support_for: "lacking_support[0,50)",
        support_against: "lacking_support[0,50)",
        dissonant: false,
        direction: "neutral",
        strength: "lacking_support[0,50)",
      }),
    ).toBe("lacking support");
  });
});

describe("checklist view", () => {
  it("renders the read-problem gate for a fresh session", () => {
    const task: TaskView = { task: "read-problem", targets: [], done: false };
    const box = renderTask(task);
    expect(box.getAttribute("data-task")).toBe("read-problem");
    expect(box.textContent).toContain("Read the problem statement independently");
  });

  it("offers the import action when everything is done", () => {
    const box = renderTask({ task: "done", targets: [], done: true });
    expect(box.querySelector("[data-action=import]")).not.toBeNull();
  });

  it("renders team versions with vote counts verbatim", () => {
    const item = {
      id: "a1",
      kind: "answer",
      parent_id: null,
      deleted: false,
      proposed_by: "P1",
      rejected_by: [],
      team_version: "v2",
      versions: [
        { version_id: "v1", text: "Was stolen", author: "P1", created_at: 1, votes: ["P1"] },
        {
          version_id: "v2",
          text: "The cesium-137 canister was stolen",
          author: "P2",
          created_at: 2,
          votes: ["P2", "P3"],
        },
      ],
      evidence_tag: null,
      evidence_name: null,
      evidence_polarity: null,
    };
    const card = renderItem(item, true);
    expect(card.textContent).toContain(
      "Team version: The cesium-137 canister was stolen (2 votes: P2, P3)",
    );
    expect(card.textContent).toContain("P1: Was stolen (1 votes: P1)");
    expect(card.className).toContain("flagged");
  });
});

describe("analytics panel", () => {
  it("shows every finding message verbatim", () => {
    const findings: FindingView[] = [
      {
        severity: "warning",
        code: "confirmation-bias",
        target: "H1",
        message:
          "This hypothesis has only favoring arguments and each argument has only favoring evidence. It seems that you may be biased toward confirming your hypothesis. Carefully re-analyze the hypothesis, using all the relevant evidence.",
      },
      {
        severity: "warning",
        code: "credibility-justification",
        target: "E1",
        message: "Credibility lacking justification: E1 Washington Gazette",
      },
    ];
    const rendered = findings.map(
      (f) => `${f.severity} ${f.code} ${f.target}: ${f.message}`,
    );
    const panel = renderFindings(findings, rendered);
    for (const finding of findings) {
      expect(panel.textContent).toContain(finding.message);
      expect(panel.querySelector(`[data-target="${finding.target}"]`)).not.toBeNull();
    }
    expect(panel.textContent).toContain(rendered[0]);
  });

  it("says so when there is nothing to report", () => {
    const panel = renderFindings([], []);
    expect(panel.textContent).toContain("No findings.");
  });
});

describe("report editor", () => {
  const report: ReportView = {
    question: "What happened to the cesium-137 canister?",
    lead_sentence: "The cesium-137 canister likely (55-70%) was stolen.",
    alternative_sentences: [],
    sections: [
      {
        id: "headline",
        kind: "headline",
        text: "The cesium-137 canister likely (55-70%) was stolen.",
        template: "The cesium-137 canister {prob:H1} was stolen.",
        tokens: { "{prob:H1}": "likely (55-70%)" },
        evidence_ids: [],
        fragment_id: null,
      },
      {
        id: "A1",
        kind: "argument",
        text: "Trucked out. It rests on: E1 Washington Gazette.",
        template: "Trucked out. It rests on: E1 Washington Gazette.",
        tokens: {},
        evidence_ids: ["E1"],
        fragment_id: "fragment-A1",
      },
    ],
    fragments: [{ id: "fragment-A1", title: "Argumentation fragment for A1", lines: ["A1: favoring"] }],
    evidence: [
      {
        id: "evidence-E1",
        tag: "E1",
        name: "Washington Gazette",
        body: "press report",
        source_kind: "documentary",
        credibility: "likely (55-70%)",
        justification: "",
      },
    ],
    no_assumptions_marked: false,
    edit_history: [],
  };

  it("renders section text and locked tokens verbatim", () => {
    const view = renderReport(report, {
      onEdit: async () => null,
      onExport: async () => undefined,
    });
    expect(view.textContent).toContain(report.lead_sentence);
    expect(view.textContent).toContain("{prob:H1} = likely (55-70%)");
  });

  it("anchors point into the appendix", () => {
    const view = renderReport(report, {
      onEdit: async () => null,
      onExport: async () => undefined,
    });
    const anchor = view.querySelector(".fragment-anchor") as HTMLAnchorElement;
    expect(anchor.getAttribute("href")).toBe("#fragment-A1");
    expect(view.querySelector("#fragment-A1")).not.toBeNull();
    const evidenceAnchor = view.querySelector(".evidence-anchor") as HTMLAnchorElement;
    expect(evidenceAnchor.getAttribute("href")).toBe("#evidence-E1");
    expect(view.querySelector("#evidence-E1")).not.toBeNull();
  });

  it("shows the server's refusal when a locked token would be dropped", async () => {
    const view = renderReport(report, {
      onEdit: async () => "edit would drop locked probability token {prob:H1}",
      onExport: async () => undefined,
    });
    const section = view.querySelector('[data-section="headline"]') as HTMLElement;
    (section.querySelector(".save-section") as HTMLButtonElement).click();
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(section.querySelector(".edit-error")?.textContent).toContain(
      "edit would drop locked probability token",
    );
  });
});
