/** Wire types for the session service. Field names mirror the JSON exactly. */

export interface PlanSummary {
  plan_id: string;
  root: string;
  h: number;
  p: number;
  ec: number;
}

export interface Prompt {
  /** "replace" | "inspect" | "check" */
  action: string;
  component: string;
  /** Event kind that resolves this prompt: "status_result" | "inspect_result". */
  pending: string;
  /** Plan-tree breadcrumb, outermost unit first. */
  path: string[];
}

export interface SessionView {
  session_id: string;
  done: boolean;
  accumulated_cost: number;
  expected_remaining_cost?: number;
  actions_taken?: number;
  prompt?: Prompt;
}

export interface TranscriptEvent {
  kind: string;
  outcome: string;
}

export interface Transcript {
  session_id: string;
  plan_id: string;
  events: TranscriptEvent[];
  accumulated_cost: number;
  actions_taken: number;
  done: boolean;
}

export type Outcome = "ok" | "broken";
