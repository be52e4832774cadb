/**
 * Pure view-state reducer.
 *
 * The console renders strictly from (initial snapshot, ordered event log);
 * replaying the same log always reproduces the identical state. No client
 * side simulation state exists: phases, counters, and findings all come
 * from server events.
 */

import type {
  Finding,
  Phase,
  RunProgress,
  SessionEvent,
  TranscriptLine,
  ViewState,
} from "./types.js";

export function initialState(sessionId: string): ViewState {
  return {
    sessionId,
    phase: "Drafting",
    rounds: 0,
    converged: true,
    validationPassed: null,
    findings: [],
    nParticles: null,
    preview: null,
    artifacts: [],
    transcript: [],
    progress: null,
    lastSeq: -1,
  };
}

const PHASE_BY_EVENT: Record<string, Phase> = {
  session_created: "Drafting",
  draft_failed: "Drafting",
  restarted: "Drafting",
  draft_ready: "AwaitingApproval",
  semantic_issues: "AwaitingApproval",
  generation_failed: "AwaitingApproval",
  approved: "Simulating",
  run_started: "Simulating",
  run_completed: "PostProcessing",
  run_failed: "Revising",
  instability: "Revising",
  closed: "Closed",
};

export function describeEvent(event: SessionEvent): string {
  const p = event.payload;
  switch (event.kind) {
    case "session_created":
      return `session opened: ${String(p.text ?? "")}`;
    case "draft_proposed":
      return `planner drafted a case (${String(p.rationale ?? "")})`;
    case "draft_revised":
      return `planner revised the draft (${String(p.rationale ?? "")})`;
    case "draft_repaired":
      return "planner repaired a syntax failure";
    case "parse_failed":
      return `draft failed to parse: ${String(p.message ?? "")}`;
    case "draft_failed":
      return "draft unusable after the repair round";
    case "semantic_issues":
      return `draft has semantic issues (${(p.issues as string[])?.length ?? 0})`;
    case "generation_failed":
      return `particle generation failed: ${String(p.reason ?? "")}`;
    case "draft_ready":
      return `draft ready: ${String(p.n_particles)} particles, validation ` +
        (p.validation_passed ? "passed" : "found problems");
    case "user_message":
      return `you: ${String(p.text ?? "")}`;
    case "user_edit":
      return "you replaced the draft document";
    case "approved":
      return "approved; simulation starting";
    case "restarted":
      return "starting over";
    case "hitl_cap_exceeded":
      return `interaction cap (${String(p.cap)}) exceeded`;
    case "run_started":
      return "simulation running";
    case "run_progress":
      return `progress: t = ${String(p.time)} s`;
    case "run_completed":
      return `simulation done: ${String(p.frames_written)} frames`;
    case "run_failed":
      return `run failed: ${String(p.reason ?? "")}`;
    case "instability":
      return "run went unstable; back to revision";
    case "postproc_request":
      return `you asked: ${String(p.text ?? "")}`;
    case "tool_selected":
      return `planner chose ${String(p.tool)} (${String(p.rationale ?? "")})`;
    case "tool_retry":
      return `retrying with ${String(p.tool)} after: ${String(p.error ?? "")}`;
    case "tool_error":
      return `analysis failed: ${String(p.error ?? "")}`;
    case "tool_result":
      return `result from ${String(p.tool)}: ${String(p.summary ?? "")}`;
    case "closed":
      return "session closed";
    default:
      return event.kind;
  }
}

export function reduce(state: ViewState, event: SessionEvent): ViewState {
  const next: ViewState = {
    ...state,
    findings: state.findings,
    artifacts: state.artifacts,
    transcript: [...state.transcript, {
      seq: event.seq,
      kind: event.kind,
      text: describeEvent(event),
    }],
    lastSeq: event.seq,
  };

  const phase = PHASE_BY_EVENT[event.kind];
  if (phase !== undefined) {
    next.phase = phase;
  }

  const p = event.payload;
  switch (event.kind) {
    case "draft_ready": {
      next.validationPassed = Boolean(p.validation_passed);
      next.findings = (p.findings as Finding[]) ?? [];
      next.nParticles = Number(p.n_particles);
      const preview = p.preview as string | undefined;
      if (preview) {
        next.preview = preview;
        next.artifacts = appendUnique(state.artifacts, [preview]);
      }
      next.progress = null;
      break;
    }
    case "semantic_issues":
    case "generation_failed":
      next.validationPassed = false;
      next.findings = [];
      break;
    case "user_message":
    case "user_edit":
      next.rounds = Number(p.round ?? state.rounds + 1);
      break;
    case "hitl_cap_exceeded":
      next.converged = false;
      break;
    case "restarted":
      next.rounds = state.rounds;
      next.validationPassed = null;
      next.findings = [];
      next.preview = null;
      break;
    case "run_progress":
      next.progress = {
        fraction: Number(p.fraction),
        time: Number(p.time),
      } as RunProgress;
      break;
    case "tool_result":
      next.artifacts = appendUnique(state.artifacts, (p.artifacts as string[]) ?? []);
      break;
    default:
      break;
  }
  return next;
}

function appendUnique(existing: string[], incoming: string[]): string[] {
  const out = [...existing];
  for (const name of incoming) {
    if (!out.includes(name)) {
      out.push(name);
    }
  }
  return out;
}

export function replay(sessionId: string, events: SessionEvent[]): ViewState {
  let state = initialState(sessionId);
  for (const event of events) {
    state = reduce(state, event);
  }
  return state;
}

/** Approval is a server-confirmed transition; the control is live only in
 * AwaitingApproval (and only while the stream is connected). */
export function approveEnabled(state: ViewState, connected: boolean): boolean {
  return connected && state.phase === "AwaitingApproval";
}
