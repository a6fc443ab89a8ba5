/** Session store: the UI's only mutable state.
 *
 * Holds the latest server state plus view preferences (candidate visibility,
 * selection). Every mutation round-trips through the service and replaces the
 * local copy, so reloading and refetching always reproduces the same view.
 */

import { SessionApi } from "./api.js";
import type { ReportDoc, SceneDoc, SessionStateDoc, TrajectoryDoc } from "./types.js";

export interface ViewState {
  sessionId: string | null;
  state: SessionStateDoc | null;
  visibleAgents: Set<string>;
  selectedAgent: string | null;
  lastError: string | null;
  busy: boolean;
}

type Listener = (view: ViewState) => void;

export class SessionStore {
  private view: ViewState = {
    sessionId: null,
    state: null,
    visibleAgents: new Set(),
    selectedAgent: null,
    lastError: null,
    busy: false,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: SessionApi) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.view);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  get current(): ViewState {
    return this.view;
  }

  private update(patch: Partial<ViewState>) {
    this.view = { ...this.view, ...patch };
    for (const listener of this.listeners) listener(this.view);
  }

  private setState(state: SessionStateDoc) {
    const agents = new Set(state.pending.map((r) => r.agent));
    const selected =
      this.view.selectedAgent && agents.has(this.view.selectedAgent)
        ? this.view.selectedAgent
        : null;
    this.update({
      state,
      visibleAgents: agents, // all candidates visible by default
      selectedAgent: selected,
      lastError: null,
    });
  }

  private async guarded<T>(op: () => Promise<T>): Promise<T | null> {
    this.update({ busy: true, lastError: null });
    try {
      return await op();
    } catch (err) {
      this.update({ lastError: err instanceof Error ? err.message : String(err) });
      return null;
    } finally {
      this.update({ busy: false });
    }
  }

  async createSession(scene: SceneDoc, trajectory: TrajectoryDoc): Promise<boolean> {
    const ok = await this.guarded(async () => {
      const sessionId = await this.api.createSession(scene, trajectory);
      this.update({ sessionId });
      this.setState(await this.api.getState(sessionId));
      return true;
    });
    return ok === true;
  }

  async refresh(): Promise<void> {
    const { sessionId } = this.view;
    if (!sessionId) return;
    await this.guarded(async () => this.setState(await this.api.getState(sessionId)));
  }

  /** Post a command; on interpretation errors the session state is untouched
   * and the message is surfaced verbatim. */
  async submitCommand(text: string): Promise<boolean> {
    const { sessionId } = this.view;
    if (!sessionId) return false;
    const ok = await this.guarded(async () => {
      const response = await this.api.sendCommand(sessionId, text);
      this.setState(await this.api.getState(sessionId));
      this.update({ selectedAgent: response.best_agent });
      return true;
    });
    return ok === true;
  }

  async accept(agent: string): Promise<boolean> {
    const { sessionId } = this.view;
    if (!sessionId) return false;
    const ok = await this.guarded(async () => {
      this.setState(await this.api.accept(sessionId, agent));
      return true;
    });
    return ok === true;
  }

  async undo(): Promise<boolean> {
    const { sessionId } = this.view;
    if (!sessionId) return false;
    const ok = await this.guarded(async () => {
      this.setState(await this.api.undo(sessionId));
      return true;
    });
    return ok === true;
  }

  toggleAgent(agent: string) {
    const visible = new Set(this.view.visibleAgents);
    if (visible.has(agent)) {
      visible.delete(agent);
    } else {
      visible.add(agent);
    }
    this.update({ visibleAgents: visible });
  }

  select(agent: string | null) {
    this.update({ selectedAgent: agent });
  }

  pendingReports(): ReportDoc[] {
    return this.view.state?.pending ?? [];
  }
}
