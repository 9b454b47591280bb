/** Wire types of the session service. The UI only ever sees these shapes:
 * no learner knowledge, no utilities, no scores. */

export type Edge = [number, number];

export interface GraphPayload {
  graph_id: string;
  layers: number[][];
  rewards: Record<string, number>;
  edges: Edge[];
}

export interface SessionHead {
  session_id: string;
  n_trials: number;
}

export interface SessionStatus {
  session_id: string;
  experiment: string;
  condition: Record<string, string>;
  cursor: number;
  n_trials: number;
  state: "active" | "complete" | "abandoned";
}

export interface TrialPayload {
  session_id: string;
  n: number;
  n_trials: number;
  phase: "train" | "test";
  scaffold_kind: "inference" | "reward" | null;
  graph: GraphPayload;
  trajectory: Edge[];
}

export interface ChoiceAck {
  ok: boolean;
  next: number | null;
}

export interface SessionRequest {
  experiment: "baseline" | "scaffold";
  condition: Record<string, string> | null;
  seed: number;
  participant?: string;
}

export function edgeKey(e: Edge): string {
  return `${e[0]}-${e[1]}`;
}

export function sameEdge(a: Edge, b: Edge): boolean {
  return a[0] === b[0] && a[1] === b[1];
}
