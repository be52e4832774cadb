export type Phase =
  | "Drafting"
  | "AwaitingApproval"
  | "Simulating"
  | "PostProcessing"
  | "Revising"
  | "Closed";

export interface SessionEvent {
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface Finding {
  mode: string;
  component: string;
  evidence: string;
  severity: string;
}

export interface Snapshot {
  session_id: string;
  phase: string;
  hitl_rounds: number;
  converged: boolean;
  has_draft: boolean;
  validation_passed: boolean | null;
  findings: Finding[];
  n_events: number;
  artifacts: string[];
}

export interface TranscriptLine {
  seq: number;
  kind: string;
  text: string;
}

export interface RunProgress {
  fraction: number;
  time: number;
}

/** Everything the console shows; a pure function of the event log. */
export interface ViewState {
  sessionId: string;
  phase: Phase;
  rounds: number;
  converged: boolean;
  validationPassed: boolean | null;
  findings: Finding[];
  nParticles: number | null;
  preview: string | null; // latest preview artifact name
  artifacts: string[]; // gallery artifact names, in arrival order
  transcript: TranscriptLine[];
  progress: RunProgress | null;
  lastSeq: number;
}

export interface ActionBody {
  kind: "message" | "direct_edit" | "approve" | "restart";
  text?: string;
  xml?: string;
}
