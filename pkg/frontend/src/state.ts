/**
 * Client-side view state.
 *
 * Holds only presentation concerns: who we are, which problem is open,
 * canvas node positions, and unsent edit buffers. Canvas layout is
 * persisted separately from the analysis (per problem and participant),
 * so the analysis semantics never depend on it. Every domain value
 * rendered in the views comes from a service response.
 */

export interface CanvasLayout {
  positions: Record<string, { x: number; y: number }>;
}

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.has(key) ? (this.data.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
}

export class ViewState {
  problemId: string | null = null;
  participant: string | null = null;
  token: string | null = null;
  activeTab = "brainstorm";
  /** Unsent text per edit target (assessment justifications, report prose). */
  pendingEdits = new Map<string, string>();
  private store: KeyValueStore;

  constructor(store?: KeyValueStore) {
    this.store =
      store ?? (typeof localStorage === "undefined" ? new MemoryStore() : localStorage);
  }

  private layoutKey(): string {
    return `argbench-layout:${this.problemId}:${this.participant}`;
  }

  loadLayout(): CanvasLayout {
    const raw = this.store.getItem(this.layoutKey());
    if (!raw) return { positions: {} };
    try {
      return JSON.parse(raw) as CanvasLayout;
    } catch {
      return { positions: {} };
    }
  }

  saveLayout(layout: CanvasLayout): void {
    this.store.setItem(this.layoutKey(), JSON.stringify(layout));
  }

  setPending(target: string, text: string): void {
    this.pendingEdits.set(target, text);
  }

  takePending(target: string): string | null {
    const text = this.pendingEdits.get(target) ?? null;
    this.pendingEdits.delete(target);
    return text;
  }
}
