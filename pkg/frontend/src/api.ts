/** Thin client for the session service; every mutation goes through here. */

import type { ActionBody, SessionEvent, Snapshot } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, init);
    if (!resp.ok) {
      const detail = await resp.text();
      throw new Error(`${resp.status}: ${detail}`);
    }
    return (await resp.json()) as T;
  }

  createSession(body: {
    text?: string;
    image_ref?: string;
    xml?: string;
    benchmark?: string;
  }): Promise<Snapshot> {
    return this.json("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getSnapshot(sessionId: string): Promise<Snapshot> {
    return this.json(`/sessions/${sessionId}`);
  }

  postAction(sessionId: string, action: ActionBody): Promise<Snapshot> {
    return this.json(`/sessions/${sessionId}/actions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(action),
    });
  }

  postPostproc(sessionId: string, text: string): Promise<Snapshot> {
    return this.json(`/sessions/${sessionId}/postproc`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  listEvents(sessionId: string, since = 0): Promise<SessionEvent[]> {
    return this.json(`/sessions/${sessionId}/events/list?since=${since}`);
  }

  async artifactText(sessionId: string, name: string): Promise<string> {
    const resp = await this.fetchImpl(
      `${this.base}/sessions/${sessionId}/artifacts/${name}`,
    );
    if (!resp.ok) {
      throw new Error(`artifact ${name}: ${resp.status}`);
    }
    return resp.text();
  }

  artifactUrl(sessionId: string, name: string): string {
    return `${this.base}/sessions/${sessionId}/artifacts/${name}`;
  }
}
