/** Pure view-model: graph layout and the per-trial interaction state.
 *
 * Everything here is renderer-agnostic and fully unit-testable. The layout
 * places layers top to bottom and centers each layer horizontally; the
 * trial state machine gates the teach click behind the scaffold step
 * (exactly 3 toggles) when the trial demands one.
 */

import type { Edge, GraphPayload, TrialPayload } from "./types.js";
import { edgeKey, sameEdge } from "./types.js";

export interface NodeView {
  id: number;
  x: number;
  y: number;
  reward: number;
  terminal: boolean;
}

export interface EdgeView {
  edge: Edge;
  key: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  onTrajectory: boolean;
  trajectoryStep: number; // -1 when off the observed path
}

export interface GraphView {
  width: number;
  height: number;
  nodes: NodeView[];
  edges: EdgeView[];
}

export const LAYOUT = {
  width: 520,
  nodeGapX: 130,
  nodeGapY: 120,
  marginY: 70,
};

export function layoutGraph(graph: GraphPayload, trajectory: Edge[]): GraphView {
  const pos = new Map<number, { x: number; y: number }>();
  const nodes: NodeView[] = [];
  const lastLayer = graph.layers.length - 1;
  graph.layers.forEach((layer, k) => {
    layer.forEach((id, p) => {
      const x = LAYOUT.width / 2 + (p - (layer.length - 1) / 2) * LAYOUT.nodeGapX;
      const y = LAYOUT.marginY + k * LAYOUT.nodeGapY;
      pos.set(id, { x, y });
      nodes.push({
        id, x, y,
        reward: graph.rewards[String(id)] ?? 0,
        terminal: k === lastLayer,
      });
    });
  });
  const edges: EdgeView[] = graph.edges.map((edge) => {
    const a = pos.get(edge[0]);
    const b = pos.get(edge[1]);
    if (!a || !b) throw new Error(`edge ${edgeKey(edge)} references unknown node`);
    const step = trajectory.findIndex((t) => sameEdge(t, edge));
    return {
      edge,
      key: edgeKey(edge),
      x1: a.x, y1: a.y, x2: b.x, y2: b.y,
      onTrajectory: step >= 0,
      trajectoryStep: step,
    };
  });
  const height = LAYOUT.marginY * 2 + lastLayer * LAYOUT.nodeGapY;
  return { width: LAYOUT.width, height, nodes, edges };
}

export interface TrialState {
  payload: TrialPayload;
  view: GraphView;
  scaffoldNeeded: boolean;
  scaffoldPicks: Edge[];
  chosen: Edge | null;
  submitting: boolean;
}

export function newTrialState(payload: TrialPayload): TrialState {
  return {
    payload,
    view: layoutGraph(payload.graph, payload.trajectory),
    scaffoldNeeded: payload.scaffold_kind !== null,
    scaffoldPicks: [],
    chosen: null,
    submitting: false,
  };
}

/** The teach click stays locked until the scaffold step is complete. */
export function teachUnlocked(state: TrialState): boolean {
  return !state.scaffoldNeeded || state.scaffoldPicks.length === 3;
}

export function inGraph(state: TrialState, edge: Edge): boolean {
  return state.payload.graph.edges.some((e) => sameEdge(e, edge));
}

/** Toggle one scaffold pick; a fourth distinct pick is ignored. */
export function toggleScaffold(state: TrialState, edge: Edge): TrialState {
  if (!state.scaffoldNeeded || state.submitting || !inGraph(state, edge)) {
    return state;
  }
  const already = state.scaffoldPicks.some((e) => sameEdge(e, edge));
  let picks;
  if (already) {
    picks = state.scaffoldPicks.filter((e) => !sameEdge(e, edge));
  } else if (state.scaffoldPicks.length < 3) {
    picks = [...state.scaffoldPicks, edge];
  } else {
    return state;
  }
  return { ...state, scaffoldPicks: picks };
}

/** Commit the taught edge; only legal once unlocked and only for edges the
 * payload actually offered. */
export function chooseEdge(state: TrialState, edge: Edge): TrialState {
  if (!teachUnlocked(state) || state.submitting || !inGraph(state, edge)) {
    return state;
  }
  return { ...state, chosen: edge };
}

export function scaffoldPrompt(kind: "inference" | "reward"): string {
  return kind === "inference"
    ? "Select three edges you think the student does not know, then teach."
    : "Select three edges connected to the largest value nodes, then teach.";
}

export function phaseBanner(payload: TrialPayload): string {
  const tag = payload.phase === "test" ? "Test" : "Training";
  return `${tag} trial ${payload.n + 1} of ${payload.n_trials}`;
}
