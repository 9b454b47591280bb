/** Session driver: the trial-by-trial loop shared by the browser app and
 * the scripted tests. It owns no DOM; callers supply hooks for rendering
 * and edge selection. Resuming is just "ask the service for the cursor". */

import { ApiClient } from "./api.js";
import { chooseEdge, newTrialState, teachUnlocked, toggleScaffold,
         TrialState } from "./model.js";
import type { ChoiceAck, Edge, TrialPayload } from "./types.js";

export interface TeacherStrategy {
  /** Pick exactly three scaffold edges for a scaffolded trial. */
  pickScaffold(payload: TrialPayload): Edge[];
  /** Pick the one edge to teach. */
  pickEdge(payload: TrialPayload): Edge;
}

export interface DriverHooks {
  onTrial?(state: TrialState): void | Promise<void>;
  onAck?(ack: ChoiceAck): void;
}

/** Complete a session from its current cursor to the end, returning every
 * taught edge in order (for replay checks against the export). */
export async function completeSession(
  api: ApiClient, sessionId: string, strategy: TeacherStrategy,
  hooks: DriverHooks = {},
): Promise<{ clicked: Edge[]; scaffolds: (Edge[] | null)[] }> {
  const clicked: Edge[] = [];
  const scaffolds: (Edge[] | null)[] = [];
  let status = await api.status(sessionId);
  let n = status.cursor;
  while (status.state === "active") {
    const payload = await api.getTrial(sessionId, n);
    let state = newTrialState(payload);
    if (hooks.onTrial) await hooks.onTrial(state);

    let scaffold: Edge[] | undefined;
    if (state.scaffoldNeeded) {
      for (const e of strategy.pickScaffold(payload)) {
        state = toggleScaffold(state, e);
      }
      if (!teachUnlocked(state)) {
        throw new Error("scaffold step incomplete; teach stays locked");
      }
      scaffold = state.scaffoldPicks;
    }
    state = chooseEdge(state, strategy.pickEdge(payload));
    if (!state.chosen) {
      throw new Error("strategy picked an edge outside the trial's graph");
    }
    const ack = await api.postChoice(sessionId, n, state.chosen, scaffold);
    hooks.onAck?.(ack);
    clicked.push(state.chosen);
    scaffolds.push(scaffold ?? null);
    if (ack.next === null) break;
    n = ack.next;
  }
  status = await api.status(sessionId);
  if (status.state !== "complete") {
    throw new Error(`session ended in state ${status.state}`);
  }
  return { clicked, scaffolds };
}

/** Deterministic strategy used by scripted runs: cycle through the edge
 * list by trial index, scaffold with the first three edges. */
export function cyclingStrategy(): TeacherStrategy {
  return {
    pickScaffold: (p) => p.graph.edges.slice(0, 3) as Edge[],
    pickEdge: (p) => {
      const edge = p.graph.edges[p.n % p.graph.edges.length];
      if (!edge) throw new Error("empty edge list");
      return edge;
    },
  };
}
