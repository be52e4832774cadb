/** DOM rendering: the static parts are a pure function of the view state. */

import { approveEnabled } from "./state.js";
import { lineChartSvg, parseSeriesCsv } from "./charts.js";
import type { ViewState } from "./types.js";

export interface Handlers {
  onMessage(text: string): void;
  onDirectEdit(xml: string): void;
  onApprove(): void;
  onRestart(): void;
  onAsk(text: string): void;
}

export function renderShell(root: HTMLElement): void {
  root.innerHTML = `
    <header>
      <span id="phase-badge" class="badge"></span>
      <span id="round-counter"></span>
      <span id="converged-tag"></span>
      <span id="progress"></span>
    </header>
    <section id="validation">
      <h3>Validation</h3>
      <ul id="findings"></ul>
    </section>
    <section id="preview-box">
      <h3>Preview</h3>
      <div id="preview"></div>
    </section>
    <section>
      <h3>Transcript</h3>
      <ol id="transcript"></ol>
    </section>
    <section id="actions">
      <input id="message-text" type="text" placeholder="ask for a change..."/>
      <button id="send-message">send</button>
      <input id="attach-file" type="file" accept=".xml,image/*"/>
      <button id="approve" disabled>approve &amp; run</button>
      <button id="restart">start over</button>
    </section>
    <section id="composer">
      <input id="ask-text" type="text" placeholder="analysis request..."/>
      <button id="ask">analyze</button>
    </section>
    <section>
      <h3>Artifacts</h3>
      <div id="gallery"></div>
    </section>`;
}

export function bindHandlers(root: HTMLElement, handlers: Handlers): void {
  const byId = <T extends HTMLElement>(id: string) =>
    root.querySelector<T>(`#${id}`)!;
  byId<HTMLButtonElement>("send-message").addEventListener("click", () => {
    const input = byId<HTMLInputElement>("message-text");
    if (input.value.trim()) {
      handlers.onMessage(input.value.trim());
      input.value = "";
    }
  });
  byId<HTMLInputElement>("attach-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    if (file.name.endsWith(".xml")) {
      handlers.onDirectEdit(await file.text());
    } else {
      handlers.onMessage(`(attached sketch ${file.name})`);
    }
    input.value = "";
  });
  byId<HTMLButtonElement>("approve").addEventListener("click", handlers.onApprove);
  byId<HTMLButtonElement>("restart").addEventListener("click", handlers.onRestart);
  byId<HTMLButtonElement>("ask").addEventListener("click", () => {
    const input = byId<HTMLInputElement>("ask-text");
    if (input.value.trim()) {
      handlers.onAsk(input.value.trim());
      input.value = "";
    }
  });
}

export function renderState(
  root: HTMLElement,
  state: ViewState,
  connected: boolean,
): void {
  const byId = <T extends HTMLElement>(id: string) =>
    root.querySelector<T>(`#${id}`)!;

  const badge = byId("phase-badge");
  badge.textContent = state.phase + (connected ? "" : " (stale)");
  badge.className = `badge phase-${state.phase.toLowerCase()}` +
    (connected ? "" : " stale");

  byId("round-counter").textContent = `rounds: ${state.rounds}`;
  byId("converged-tag").textContent = state.converged ? "" : "over interaction cap";
  byId("progress").textContent = state.progress
    ? `t = ${state.progress.time} s (${Math.round(state.progress.fraction * 100)}%)`
    : "";

  const findings = byId("findings");
  findings.innerHTML = "";
  if (state.validationPassed === true) {
    findings.innerHTML = "<li class='pass'>no findings</li>";
  }
  for (const f of state.findings) {
    const li = document.createElement("li");
    li.className = `finding ${f.mode.toLowerCase()}`;
    li.textContent = `${f.mode} ${f.component}: ${f.evidence}`;
    findings.appendChild(li);
  }

  const transcript = byId("transcript");
  transcript.innerHTML = "";
  for (const line of state.transcript) {
    const li = document.createElement("li");
    li.dataset.kind = line.kind;
    li.textContent = line.text;
    transcript.appendChild(li);
  }

  byId<HTMLButtonElement>("approve").disabled = !approveEnabled(state, connected);
}

/** Inline an artifact into the gallery: SVG as-is, time-series CSV as a
 * line chart, anything else as a download link. */
export function renderArtifactInto(
  container: HTMLElement,
  name: string,
  content: string | null,
  downloadUrl: string,
): void {
  const box = document.createElement("figure");
  box.dataset.artifact = name;
  const caption = document.createElement("figcaption");
  caption.textContent = name;
  if (content !== null && name.endsWith(".svg")) {
    box.innerHTML = content;
  } else if (content !== null && name.endsWith(".csv")) {
    try {
      box.innerHTML = lineChartSvg(parseSeriesCsv(content));
    } catch {
      appendLink(box, name, downloadUrl);
    }
  } else {
    appendLink(box, name, downloadUrl);
  }
  box.appendChild(caption);
  container.appendChild(box);
}

function appendLink(box: HTMLElement, name: string, url: string): void {
  const a = document.createElement("a");
  a.href = url;
  a.textContent = `download ${name}`;
  box.appendChild(a);
}
