/** Thin typed client over the session endpoints. Errors carry the service's
 * detail message so the UI can show them verbatim. */

import type {
  CommandResponseDoc,
  SceneDoc,
  SessionStateDoc,
  TrajectoryDoc,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class SessionApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        headers: { "Content-Type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new ServiceError(`service unreachable: ${String(err)}`, 0);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body === "object" && body !== null && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ServiceError(detail, response.status);
    }
    return body as T;
  }

  async createSession(scene: SceneDoc, trajectory: TrajectoryDoc): Promise<string> {
    const body = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
      body: JSON.stringify({ scene, trajectory }),
    });
    return body.session_id;
  }

  getState(sessionId: string): Promise<SessionStateDoc> {
    return this.request(`/sessions/${sessionId}`);
  }

  sendCommand(sessionId: string, text: string): Promise<CommandResponseDoc> {
    return this.request(`/sessions/${sessionId}/command`, {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  accept(sessionId: string, agent: string): Promise<SessionStateDoc> {
    return this.request(`/sessions/${sessionId}/accept`, {
      method: "POST",
      body: JSON.stringify({ agent }),
    });
  }

  undo(sessionId: string): Promise<SessionStateDoc> {
    return this.request(`/sessions/${sessionId}/undo`, { method: "POST" });
  }
}
