/**
 * Server-sent-events subscription with reconnect.
 *
 * Events are delivered strictly in sequence order; after a drop the client
 * reconnects with exponential backoff from the next unseen sequence number,
 * and the console shows a stale badge while disconnected.
 */

import type { SessionEvent } from "./types.js";

export type SubscribeFn = (
  base: string,
  sessionId: string,
  since: number,
  onEvent: (event: SessionEvent) => void,
  onStatus: (connected: boolean) => void,
) => { close(): void };

const BACKOFF_START_MS = 1000;
const BACKOFF_CAP_MS = 15000;

export const subscribeEvents: SubscribeFn = (
  base,
  sessionId,
  since,
  onEvent,
  onStatus,
) => {
  let closed = false;
  let source: EventSource | null = null;
  let cursor = since;
  let backoff = BACKOFF_START_MS;

  const open = () => {
    if (closed) return;
    source = new EventSource(
      `${base}/sessions/${sessionId}/events?since=${cursor}`,
    );
    source.addEventListener("open", () => {
      backoff = BACKOFF_START_MS;
      onStatus(true);
    });
    source.addEventListener("session", (msg) => {
      const data = JSON.parse((msg as MessageEvent).data) as {
        kind: string;
        payload: Record<string, unknown>;
      };
      const seq = Number((msg as MessageEvent).lastEventId);
      if (seq < cursor) return; // replayed duplicate after reconnect
      cursor = seq + 1;
      onEvent({ seq, kind: data.kind, payload: data.payload });
    });
    source.addEventListener("error", () => {
      onStatus(false);
      source?.close();
      if (!closed) {
        setTimeout(open, backoff);
        backoff = Math.min(backoff * 2, BACKOFF_CAP_MS);
      }
    });
  };

  open();
  return {
    close() {
      closed = true;
      source?.close();
      onStatus(false);
    },
  };
};
