/** SVG rendering of one trial. Pure DOM construction from the view model;
 * interaction wiring stays in main.ts via the callbacks. Edge click
 * targets get a wide invisible overlay line so thin edges are easy to hit. */

import type { EdgeView, GraphView, TrialState } from "./model.js";
import { teachUnlocked } from "./model.js";
import { edgeKey, sameEdge } from "./types.js";
import type { Edge } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderCallbacks {
  onEdgeClick(edge: Edge): void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    el.setAttribute(k, String(v));
  }
  return el;
}

function edgeClasses(state: TrialState, ev: EdgeView): string {
  const classes = ["edge"];
  if (ev.onTrajectory) classes.push("trajectory");
  if (state.scaffoldPicks.some((e) => sameEdge(e, ev.edge))) classes.push("scaffolded");
  if (state.chosen && sameEdge(state.chosen, ev.edge)) classes.push("chosen");
  return classes.join(" ");
}

export function renderTrial(
  root: HTMLElement, state: TrialState, cb: RenderCallbacks,
  animateMs = 350,
): SVGSVGElement {
  const view: GraphView = state.view;
  root.textContent = "";
  const svg = svgEl("svg", {
    viewBox: `0 0 ${view.width} ${view.height}`,
    width: view.width,
    height: view.height,
    role: "img",
  });

  for (const ev of view.edges) {
    const line = svgEl("line", {
      x1: ev.x1, y1: ev.y1, x2: ev.x2, y2: ev.y2,
      class: edgeClasses(state, ev),
      "data-edge": ev.key,
    });
    if (ev.onTrajectory && animateMs > 0) {
      // observe-then-teach: the path lights up step by step before input
      line.setAttribute(
        "style", `animation: edge-reveal 0.01s both; ` +
                 `animation-delay: ${ev.trajectoryStep * animateMs}ms`);
    }
    svg.appendChild(line);
    const hit = svgEl("line", {
      x1: ev.x1, y1: ev.y1, x2: ev.x2, y2: ev.y2,
      class: "edge-hit",
      "data-edge": ev.key,
    });
    hit.addEventListener("click", () => cb.onEdgeClick(ev.edge));
    svg.appendChild(hit);
  }

  for (const nv of view.nodes) {
    const g = svgEl("g", { class: nv.terminal ? "node terminal" : "node" });
    g.appendChild(svgEl("circle", { cx: nv.x, cy: nv.y, r: 26 }));
    const label = svgEl("text", {
      x: nv.x, y: nv.y + 6, "text-anchor": "middle", class: "reward",
    });
    label.textContent = String(nv.reward);
    g.appendChild(label);
    svg.appendChild(g);
  }

  root.appendChild(svg);
  return svg;
}

export function renderStatus(el: HTMLElement, state: TrialState, banner: string,
                             scaffoldLine: string | null): void {
  const picks = state.scaffoldPicks.map(edgeKey).join(", ");
  el.textContent = "";
  const head = document.createElement("div");
  head.className = "banner";
  head.textContent = banner;
  el.appendChild(head);
  if (scaffoldLine) {
    const p = document.createElement("div");
    p.className = "scaffold-line";
    p.textContent = `${scaffoldLine} Selected: ${picks || "none"} ` +
      `(${state.scaffoldPicks.length}/3)`;
    el.appendChild(p);
  }
  const hint = document.createElement("div");
  hint.className = "hint";
  hint.textContent = state.submitting
    ? "Submitting..."
    : teachUnlocked(state)
      ? "Click an edge to teach it."
      : "Complete the selection step to unlock teaching.";
  el.appendChild(hint);
}
