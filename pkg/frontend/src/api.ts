/**
 * Typed client for the workbench HTTP API.
 *
 * The client moves data verbatim: no probability math, no check logic,
 * no label rewriting happens on this side. Sequence conflicts surface
 * as ApiError with the server's current sequence so callers can
 * refresh and retry.
 */

export interface ScaleLabel {
  token: string;
  name: string;
  rank: number;
  phrase: string;
}

export interface ItemVersionView {
  version_id: string;
  text: string;
  author: string;
  created_at: number;
  votes: string[];
}

export interface BrainstormItemView {
  id: string;
  kind: string;
  parent_id: string | null;
  deleted: boolean;
  proposed_by: string;
  rejected_by: { participant: string; justification: string }[];
  team_version: string | null;
  versions: ItemVersionView[];
  evidence_tag: string | null;
  evidence_name: string | null;
  evidence_polarity: string | null;
}

export interface BrainstormView {
  problem: string;
  question: string;
  members: string[];
  sequence: number;
  items: BrainstormItemView[];
  ballots: Record<string, { assessments: Record<string, string>; team_credibility?: string }>;
  incomplete: Record<string, string[]>;
}

export interface TaskView {
  task: string;
  targets: string[];
  done: boolean;
}

export interface EvidenceView {
  id: string;
  name: string;
  body: string;
  source_kind: string | null;
  credibility: string | null;
  credibility_justification: string;
}

export interface HypothesisView {
  id: string;
  statement: string;
  kind: string;
  children: string[];
  evidence_links: string[];
  assumed_probability: string | null;
  assumption_justification: string;
  headline_template: string | null;
}

export interface ArgumentView {
  id: string;
  polarity: string;
  summary: string;
  relevance: string | null;
  relevance_justification: string;
  sub_hypotheses: string[];
}

export interface LinkView {
  id: string;
  evidence_id: string;
  hypothesis_id: string;
  polarity: string;
  fact_leaf: boolean;
  relevance: string | null;
  relevance_justification: string;
}

export interface ComputedValue {
  support_for: string;
  support_against: string;
  dissonant: boolean;
  direction: string;
  strength: string;
}

export interface AnalysisDoc {
  schema: string;
  question: string;
  tops: string[];
  evidence: EvidenceView[];
  hypotheses: HypothesisView[];
  arguments: ArgumentView[];
  links: LinkView[];
  computed?: Record<string, ComputedValue>;
  propagation_warnings?: string[];
  sequence: number;
}

export interface FindingView {
  severity: string;
  code: string;
  target: string;
  message: string;
}

export interface ReportSectionView {
  id: string;
  kind: string;
  text: string;
  template: string;
  tokens: Record<string, string>;
  evidence_ids: string[];
  fragment_id: string | null;
}

export interface ReportView {
  question: string;
  lead_sentence: string;
  alternative_sentences: string[];
  sections: ReportSectionView[];
  fragments: { id: string; title: string; lines: string[] }[];
  evidence: {
    id: string;
    tag: string;
    name: string;
    body: string;
    source_kind: string | null;
    credibility: string | null;
    justification: string;
  }[];
  no_assumptions_marked: boolean;
  edit_history: { section_id: string; author: string; at: number }[];
}

export interface ChecklistEntryView {
  number: number;
  criterion: string;
  status: string;
  detail: string;
}

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
    this.status = status;
    this.detail = detail;
  }

  /** Server's current sequence on a 409, when it sent one. */
  currentSequence(): number | null {
    const detail = this.detail as { current_sequence?: number } | undefined;
    if (detail && typeof detail === "object" && typeof detail.current_sequence === "number") {
      return detail.current_sequence;
    }
    return null;
  }
}

export class ApiClient {
  base: string;
  token: string | null = null;

  constructor(base: string) {
    this.base = base.replace(/\/$/, "");
  }

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let parsed: unknown = text;
    const contentType = response.headers.get("content-type") ?? "";
    if (contentType.includes("application/json") && text) {
      parsed = JSON.parse(text);
    }
    if (!response.ok) {
      const detail =
        parsed && typeof parsed === "object" && "detail" in (parsed as object)
          ? (parsed as { detail: unknown }).detail
          : parsed;
      throw new ApiError(response.status, detail);
    }
    return parsed as T;
  }

  scale(): Promise<{ labels: ScaleLabel[] }> {
    return this.request("GET", "/scale");
  }

  problems(): Promise<{ problems: { problem_id: string; question: string }[] }> {
    return this.request("GET", "/problems");
  }

  createProblem(problemId: string, question: string, description = ""): Promise<{ problem_id: string }> {
    return this.request("POST", "/problems", {
      problem_id: problemId,
      question,
      description,
    });
  }

  async join(problemId: string, participant: string, at?: number): Promise<{ team_id: string; token: string }> {
    const result = await this.request<{ team_id: string; token: string }>(
      "POST",
      `/problems/${problemId}/join`,
      { participant, at },
    );
    this.token = result.token;
    return result;
  }

  brainstorm(problemId: string): Promise<BrainstormView> {
    return this.request("GET", `/problems/${problemId}/brainstorm`);
  }

  nextTask(problemId: string): Promise<TaskView> {
    return this.request("GET", `/problems/${problemId}/brainstorm/next-task`);
  }

  postBrainstormEvent(
    problemId: string,
    expectedSequence: number,
    kind: string,
    payload: Record<string, unknown>,
  ): Promise<{ sequence: number }> {
    return this.request("POST", `/problems/${problemId}/brainstorm/events`, {
      expected_sequence: expectedSequence,
      kind,
      payload,
    });
  }

  /**
   * Post an event, refreshing once on a stale-sequence conflict.
   * Returns the new sequence. Other errors pass through.
   */
  async postBrainstormEventWithRetry(
    problemId: string,
    expectedSequence: number,
    kind: string,
    payload: Record<string, unknown>,
  ): Promise<number> {
    try {
      const result = await this.postBrainstormEvent(problemId, expectedSequence, kind, payload);
      return result.sequence;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        const current = error.currentSequence();
        if (current !== null) {
          const result = await this.postBrainstormEvent(problemId, current, kind, payload);
          return result.sequence;
        }
      }
      throw error;
    }
  }

  importAnalysis(problemId: string, owner: string): Promise<{ sequence: number; analysis: AnalysisDoc }> {
    return this.request("POST", `/problems/${problemId}/analyses/${owner}/import`, {
      expected_sequence: 0,
    });
  }

  analysis(problemId: string, owner: string, computed = false): Promise<AnalysisDoc> {
    const query = computed ? "?computed=true" : "";
    return this.request("GET", `/problems/${problemId}/analyses/${owner}${query}`);
  }

  postAnalysisEvent(
    problemId: string,
    owner: string,
    expectedSequence: number,
    kind: string,
    payload: Record<string, unknown>,
  ): Promise<{ sequence: number }> {
    return this.request("POST", `/problems/${problemId}/analyses/${owner}/events`, {
      expected_sequence: expectedSequence,
      kind,
      payload,
    });
  }

  propagate(problemId: string, owner: string): Promise<{ computed: Record<string, ComputedValue>; warnings: string[] }> {
    return this.request("POST", `/problems/${problemId}/analyses/${owner}/propagate`);
  }

  whatIf(
    problemId: string,
    owner: string,
    overrides: Record<string, string>,
  ): Promise<{ computed: Record<string, ComputedValue>; warnings: string[] }> {
    return this.request("POST", `/problems/${problemId}/analyses/${owner}/what-if`, { overrides });
  }

  findings(problemId: string, owner: string): Promise<{ findings: FindingView[]; rendered: string[] }> {
    return this.request("GET", `/problems/${problemId}/analyses/${owner}/findings`);
  }

  report(problemId: string, owner: string): Promise<ReportView> {
    return this.request("GET", `/problems/${problemId}/analyses/${owner}/report`);
  }

  renderReport(problemId: string, owner: string, format: string): Promise<string> {
    return this.request("GET", `/problems/${problemId}/analyses/${owner}/report/render?format=${format}`);
  }

  quality(problemId: string, owner: string): Promise<{ checklist: ChecklistEntryView[] }> {
    return this.request("GET", `/problems/${problemId}/analyses/${owner}/quality`);
  }
}
