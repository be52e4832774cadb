/** Session console wiring: service client + event stream -> reducer -> DOM. */

import { ServiceClient } from "./api.js";
import { initialState, reduce } from "./state.js";
import { subscribeEvents, type SubscribeFn } from "./sse.js";
import {
  bindHandlers,
  renderArtifactInto,
  renderShell,
  renderState,
} from "./view.js";
import type { SessionEvent, ViewState } from "./types.js";

export interface ConsoleDeps {
  client: ServiceClient;
  subscribe?: SubscribeFn;
}

export class SessionConsole {
  state: ViewState;
  events: SessionEvent[] = [];
  connected = false;
  private stream: { close(): void } | null = null;
  private renderedArtifacts = new Set<string>();
  private readonly subscribe: SubscribeFn;

  constructor(
    private readonly root: HTMLElement,
    private readonly deps: ConsoleDeps,
    public sessionId = "",
  ) {
    this.subscribe = deps.subscribe ?? subscribeEvents;
    this.state = initialState(sessionId);
    renderShell(root);
    bindHandlers(root, {
      onMessage: (text) => this.post({ kind: "message", text }),
      onDirectEdit: (xml) => this.post({ kind: "direct_edit", xml }),
      onApprove: () => this.post({ kind: "approve" }),
      onRestart: () => this.post({ kind: "restart" }),
      onAsk: (text) => this.ask(text),
    });
    this.render();
  }

  /** Create a new session from an input envelope, then follow it live. */
  async start(envelope: { text?: string; image_ref?: string; xml?: string }) {
    const snapshot = await this.deps.client.createSession(envelope);
    this.connect(snapshot.session_id);
  }

  /** Attach to an existing session's event stream from the beginning. */
  connect(sessionId: string): void {
    this.sessionId = sessionId;
    this.state = initialState(sessionId);
    this.events = [];
    this.stream?.close();
    this.stream = this.subscribe(
      "",
      sessionId,
      0,
      (event) => this.onEvent(event),
      (up) => {
        this.connected = up;
        this.render();
      },
    );
  }

  close(): void {
    this.stream?.close();
  }

  private onEvent(event: SessionEvent): void {
    this.events.push(event);
    this.state = reduce(this.state, event);
    this.render();
    if (event.kind === "draft_ready" || event.kind === "tool_result") {
      void this.refreshGallery();
    }
  }

  private async post(action: {
    kind: "message" | "direct_edit" | "approve" | "restart";
    text?: string;
    xml?: string;
  }) {
    try {
      await this.deps.client.postAction(this.sessionId, action);
    } catch (err) {
      this.showError(String(err));
    }
  }

  private async ask(text: string) {
    try {
      await this.deps.client.postPostproc(this.sessionId, text);
    } catch (err) {
      this.showError(String(err));
    }
  }

  private showError(message: string): void {
    const node = this.root.querySelector<HTMLElement>("#composer");
    if (node) {
      let err = node.querySelector<HTMLElement>(".error");
      if (!err) {
        err = document.createElement("div");
        err.className = "error";
        node.appendChild(err);
      }
      err.textContent = message;
    }
  }

  private render(): void {
    renderState(this.root, this.state, this.connected);
    this.renderPreview();
  }

  private renderPreview(): void {
    const box = this.root.querySelector<HTMLElement>("#preview")!;
    const name = this.state.preview;
    if (!name) {
      box.innerHTML = "";
      return;
    }
    if (box.dataset.current === name) return;
    box.dataset.current = name;
    void this.deps.client
      .artifactText(this.sessionId, name)
      .then((svg) => {
        box.innerHTML = svg;
      })
      .catch(() => {
        box.textContent = `preview ${name} unavailable`;
      });
  }

  /** Pull artifact contents for anything new and inline it in the gallery. */
  private async refreshGallery(): Promise<void> {
    const gallery = this.root.querySelector<HTMLElement>("#gallery")!;
    for (const name of this.state.artifacts) {
      if (this.renderedArtifacts.has(name)) continue;
      this.renderedArtifacts.add(name);
      const url = this.deps.client.artifactUrl(this.sessionId, name);
      let content: string | null = null;
      if (name.endsWith(".svg") || name.endsWith(".csv")) {
        try {
          content = await this.deps.client.artifactText(this.sessionId, name);
        } catch {
          content = null;
        }
      }
      renderArtifactInto(gallery, name, content, url);
    }
    if (!this.state.artifacts.length) {
      gallery.textContent = "no artifacts yet";
    }
  }
}
