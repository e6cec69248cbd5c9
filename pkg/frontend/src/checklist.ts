/**
 * Guided checklist view for the brainstorming phase.
 *
 * Renders the service's next-task descriptor and the live item list;
 * submitting a step posts the matching event and re-fetches. Items the
 * service flags as incomplete for this participant are surfaced first.
 */
import { ApiClient, BrainstormItemView, BrainstormView, TaskView } from "./api.js";
import { clear, el } from "./dom.js";

export interface ChecklistCallbacks {
  onEvent(kind: string, payload: Record<string, unknown>): Promise<void>;
  onImport(): Promise<void>;
}

const TASK_PROMPTS: Record<string, string> = {
  "read-problem": "Read the problem statement independently, then confirm.",
  "review-updates": "Teammates changed these items; review each one.",
  "reformulate-question": "Consider reformulating the question (or accept it).",
  "propose-answers": "Propose possible answers, or weigh in on the existing ones.",
  "argue-answers": "Add informal arguments for each answer.",
  "associate-evidence": "Associate favoring and disfavoring evidence with each argument.",
  "assess-credibility": "Assess the credibility of each evidence item.",
  done: "Brainstorming complete.",
};

export function renderTask(task: TaskView): HTMLElement {
  const box = el("div", { class: "task-box", "data-task": task.task }, [
    el("h3", {}, ["Next step"]),
    el("p", { class: "task-name" }, [TASK_PROMPTS[task.task] ?? task.task]),
  ]);
  if (task.targets.length) {
    box.append(
      el("p", { class: "task-targets" }, [`Waiting on: ${task.targets.join(", ")}`]),
    );
  }
  if (task.done) {
    box.append(
      el("button", { class: "import-button", "data-action": "import" }, [
        "Import into formal analysis",
      ]),
    );
  }
  return box;
}

function versionLine(item: BrainstormItemView, versionId: string): string {
  const version = item.versions.find((v) => v.version_id === versionId);
  if (!version) return "";
  const votes = version.votes.join(", ");
  return `${version.text} (${version.votes.length} votes: ${votes})`;
}

export function renderItem(
  item: BrainstormItemView,
  flaggedForMe: boolean,
): HTMLElement {
  const node = el("div", {
    class: `item item-${item.kind}${flaggedForMe ? " flagged" : ""}`,
    "data-item": item.id,
  });
  const heading = item.team_version
    ? `Team version: ${versionLine(item, item.team_version)}`
    : "(no team version)";
  node.append(el("h4", {}, [`[${item.id}] ${heading}`]));
  for (const version of item.versions) {
    if (version.version_id === item.team_version) continue;
    node.append(
      el("p", { class: "other-version" }, [
        `${version.author}: ${versionLine(item, version.version_id)}`,
      ]),
    );
  }
  for (const rejection of item.rejected_by) {
    node.append(
      el("p", { class: "rejection" }, [
        `rejected by ${rejection.participant}: ${rejection.justification}`,
      ]),
    );
  }
  return node;
}

export class ChecklistView {
  root: HTMLElement;
  private api: ApiClient;
  private problemId: string;
  private participant: string;
  private callbacks: ChecklistCallbacks;
  view: BrainstormView | null = null;
  task: TaskView | null = null;

  constructor(
    root: HTMLElement,
    api: ApiClient,
    problemId: string,
    participant: string,
    callbacks: ChecklistCallbacks,
  ) {
    this.root = root;
    this.api = api;
    this.problemId = problemId;
    this.participant = participant;
    this.callbacks = callbacks;
  }

  async refresh(): Promise<void> {
    this.view = await this.api.brainstorm(this.problemId);
    this.task = await this.api.nextTask(this.problemId);
    this.render();
  }

  render(): void {
    if (!this.view || !this.task) return;
    clear(this.root);
    this.root.append(el("h2", {}, [this.view.question]));
    const taskBox = renderTask(this.task);
    const importButton = taskBox.querySelector("[data-action=import]");
    if (importButton) {
      importButton.addEventListener("click", () => void this.callbacks.onImport());
    }
    this.root.append(taskBox);

    const flagged = new Set(this.view.incomplete[this.participant] ?? []);
    const items = [...this.view.items].filter((item) => !item.deleted);
    items.sort((a, b) => Number(flagged.has(b.id)) - Number(flagged.has(a.id)));
    const list = el("div", { class: "item-list" });
    for (const item of items) {
      const card = renderItem(item, flagged.has(item.id));
      if (flagged.has(item.id)) {
        const button = el("button", { "data-action": "mark-reviewed" }, ["Mark reviewed"]);
        button.addEventListener("click", () =>
          void this.callbacks.onEvent("mark_reviewed", { target: item.id }),
        );
        card.append(button);
      }
      list.append(card);
    }
    this.root.append(list);

    const ballots = el("div", { class: "ballots" });
    for (const [tag, ballot] of Object.entries(this.view.ballots)) {
      if (ballot.team_credibility) {
        ballots.append(
          el("p", { class: "ballot", "data-tag": tag }, [
            `${tag}: team credibility ${ballot.team_credibility}`,
          ]),
        );
      }
    }
    this.root.append(ballots);
  }
}
