/**
 * App shell: join screen, then tabs for Brainstorm, Argument canvas,
 * Analytics, and Report, mirroring the workflow order. All mutations go
 * through the event endpoints; stale-sequence conflicts refresh and
 * retry once.
 */
import { AnalysisDoc, ApiClient, ApiError, ComputedValue } from "./api.js";
import { renderFindings } from "./analytics.js";
import { editorFor, renderCanvas, renderEditor } from "./canvas.js";
import { ChecklistView } from "./checklist.js";
import { clear, el } from "./dom.js";
import { renderReport } from "./report.js";
import { ViewState } from "./state.js";

export class App {
  api: ApiClient;
  state: ViewState;
  root: HTMLElement;
  labels: string[] = [];
  checklist: ChecklistView | null = null;

  constructor(root: HTMLElement, api: ApiClient, state?: ViewState) {
    this.root = root;
    this.api = api;
    this.state = state ?? new ViewState();
  }

  async start(): Promise<void> {
    const scale = await this.api.scale();
    this.labels = scale.labels.map((label) => label.token);
    this.renderJoin();
  }

  renderJoin(): void {
    clear(this.root);
    const problemInput = el("input", { value: "cesium", "data-field": "problem" });
    const nameInput = el("input", { placeholder: "your name", "data-field": "participant" });
    const button = el("button", {}, ["Join"]);
    const error = el("p", { class: "join-error" });
    button.addEventListener("click", async () => {
      clear(error);
      try {
        await this.join(
          (problemInput as HTMLInputElement).value,
          (nameInput as HTMLInputElement).value,
        );
      } catch (exc) {
        error.append(exc instanceof Error ? exc.message : String(exc));
      }
    });
    this.root.append(
      el("div", { class: "join-screen" }, [
        el("h1", {}, ["Evidence workbench"]),
        problemInput,
        nameInput,
        button,
        error,
      ]),
    );
  }

  async join(problemId: string, participant: string): Promise<void> {
    await this.api.join(problemId, participant);
    this.state.problemId = problemId;
    this.state.participant = participant;
    this.state.token = this.api.token;
    await this.renderWorkspace();
  }

  async renderWorkspace(): Promise<void> {
    clear(this.root);
    const tabs = el("nav", { class: "tabs" });
    const body = el("main", { class: "tab-body" });
    const sections: Record<string, () => Promise<void>> = {
      Brainstorm: () => this.showBrainstorm(body),
      Argument: () => this.showCanvas(body),
      Analytics: () => this.showAnalytics(body),
      Report: () => this.showReport(body),
    };
    for (const name of Object.keys(sections)) {
      const button = el("button", { class: "tab", "data-tab": name }, [name]);
      button.addEventListener("click", () => {
        this.state.activeTab = name.toLowerCase();
        void sections[name]();
      });
      tabs.append(button);
    }
    this.root.append(tabs, body);
    await this.showBrainstorm(body);
  }

  async showBrainstorm(body: HTMLElement): Promise<void> {
    clear(body);
    const container = el("div", { class: "brainstorm" });
    body.append(container);
    const problemId = this.state.problemId as string;
    const participant = this.state.participant as string;
    this.checklist = new ChecklistView(container, this.api, problemId, participant, {
      onEvent: async (kind, payload) => {
        const view = this.checklist?.view;
        const sequence = view ? view.sequence : 0;
        await this.api.postBrainstormEventWithRetry(problemId, sequence, kind, payload);
        await this.checklist?.refresh();
      },
      onImport: async () => {
        await this.api.importAnalysis(problemId, participant);
        await this.showCanvas(body);
      },
    });
    await this.checklist.refresh();
  }

  async showCanvas(body: HTMLElement): Promise<void> {
    clear(body);
    const problemId = this.state.problemId as string;
    const participant = this.state.participant as string;
    const doc = await this.api.analysis(problemId, participant);
    let computed: Record<string, ComputedValue> = {};
    let warnings: string[] = [];
    let structuralBadges: { target: string; message: string }[] = [];
    try {
      const result = await this.api.propagate(problemId, participant);
      computed = result.computed;
      warnings = result.warnings;
    } catch (error) {
      if (error instanceof ApiError && error.status === 400) {
        const detail = error.detail as { issues?: { target: string; message: string }[] };
        structuralBadges = detail.issues ?? [];
      } else {
        throw error;
      }
    }
    const findings = await this.api.findings(problemId, participant);
    const container = el("div", { class: "canvas-view" });
    body.append(container);
    this.renderCanvasInto(container, doc, computed, warnings, structuralBadges, findings.findings);
  }

  renderCanvasInto(
    container: HTMLElement,
    doc: AnalysisDoc,
    computed: Record<string, ComputedValue>,
    warnings: string[],
    structuralBadges: { target: string; message: string }[],
    findings: { target: string; message: string; severity?: string }[],
    whatIf?: Record<string, ComputedValue>,
  ): void {
    clear(container);
    const svg = renderCanvas(
      doc,
      {
        computed,
        whatIf,
        structuralBadges,
        findingBadges: findings,
      },
      this.state.loadLayout(),
    );
    container.append(svg);
    if (warnings.length) {
      container.append(
        el("div", { class: "propagation-warnings" }, [
          el("h4", {}, ["Unset assessments (defaulting to lacking support)"]),
          el("ul", {}, warnings.map((w) => el("li", {}, [w]))),
        ]),
      );
    }

    const sidebar = el("div", { class: "sidebar" });
    container.append(sidebar);
    svg.addEventListener("click", (event) => {
      const target = (event.target as Element).closest("[data-node]");
      if (!target) return;
      const nodeId = target.getAttribute("data-node") as string;
      this.openEditor(sidebar, doc, nodeId, container, computed, warnings, structuralBadges, findings);
    });

    const whatIfBox = el("div", { class: "what-if" }, [
      el("h4", {}, ["What-if probe (not saved)"]),
    ]);
    const idInput = el("input", { placeholder: "node id (e.g. E1)", "data-field": "what-if-id" });
    const labelSelect = el("select", { "data-field": "what-if-label" });
    for (const token of this.labels) labelSelect.append(el("option", { value: token }, [token]));
    const probeButton = el("button", {}, ["Probe"]);
    const clearButton = el("button", {}, ["Clear"]);
    probeButton.addEventListener("click", async () => {
      const overrides: Record<string, string> = {
        [(idInput as HTMLInputElement).value]: (labelSelect as HTMLSelectElement).value,
      };
      const probe = await this.api.whatIf(
        this.state.problemId as string,
        this.state.participant as string,
        overrides,
      );
      this.renderCanvasInto(container, doc, computed, warnings, structuralBadges, findings, probe.computed);
    });
    clearButton.addEventListener("click", () =>
      this.renderCanvasInto(container, doc, computed, warnings, structuralBadges, findings),
    );
    whatIfBox.append(idInput, labelSelect, probeButton, clearButton);
    container.append(whatIfBox);
  }

  openEditor(
    sidebar: HTMLElement,
    doc: AnalysisDoc,
    nodeId: string,
    container: HTMLElement,
    computed: Record<string, ComputedValue>,
    warnings: string[],
    structuralBadges: { target: string; message: string }[],
    findings: { target: string; message: string }[],
  ): void {
    clear(sidebar);
    const spec = editorFor(doc, nodeId);
    if (!spec) {
      sidebar.append(el("p", {}, [`${nodeId}: computed from its structure.`]));
      return;
    }
    sidebar.append(
      renderEditor(spec, this.labels, async (label, justification) => {
        const problemId = this.state.problemId as string;
        const participant = this.state.participant as string;
        const sequence = doc.sequence;
        const kindMap = {
          credibility: ["assess_credibility", { evidence_id: spec.target }],
          relevance: ["assess_relevance", { target_id: spec.target }],
          assumption: ["set_assumption", { hypothesis_id: spec.target }],
        } as const;
        const [kind, idPayload] = kindMap[spec.kind];
        await this.api.postAnalysisEvent(problemId, participant, sequence, kind, {
          ...idPayload,
          label,
          justification,
        });
        await this.showCanvas(container.parentElement as HTMLElement);
      }),
    );
  }

  async showAnalytics(body: HTMLElement): Promise<void> {
    clear(body);
    const problemId = this.state.problemId as string;
    const participant = this.state.participant as string;
    const findings = await this.api.findings(problemId, participant);
    body.append(renderFindings(findings.findings, findings.rendered));
  }

  async showReport(body: HTMLElement): Promise<void> {
    clear(body);
    const problemId = this.state.problemId as string;
    const participant = this.state.participant as string;
    const report = await this.api.report(problemId, participant);
    const quality = await this.api.quality(problemId, participant);
    const view = renderReport(report, {
      onEdit: async (sectionId, text) => {
        const doc = await this.api.analysis(problemId, participant);
        try {
          await this.api.postAnalysisEvent(problemId, participant, doc.sequence, "edit_report", {
            section_id: sectionId,
            text,
          });
          await this.showReport(body);
          return null;
        } catch (error) {
          if (error instanceof ApiError && error.status === 409) {
            return String(error.detail);
          }
          throw error;
        }
      },
      onExport: async () => {
        const text = await this.api.renderReport(problemId, participant, "print-ready");
        const pre = el("pre", { class: "print-export-output" }, [text]);
        body.append(pre);
      },
    });
    body.append(view);
    const panel = el("div", { class: "quality-panel" }, [
      el("h3", {}, ["Quality of reasoning"]),
    ]);
    for (const entry of quality.checklist) {
      panel.append(
        el("p", { class: `quality-${entry.status}`, "data-criterion": String(entry.number) }, [
          `${entry.number}. ${entry.criterion}: ${entry.status} (${entry.detail})`,
        ]),
      );
    }
    body.append(panel);
  }
}

export function boot(): void {
  const base = (window as unknown as { ARGBENCH_API?: string }).ARGBENCH_API ?? "";
  const app = new App(document.getElementById("app") as HTMLElement, new ApiClient(base));
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
