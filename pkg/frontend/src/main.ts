/** Browser entry point: briefing -> trials -> completion.
 *
 * All state beyond the current DOM lives server-side; the only thing kept
 * locally is the session id, so a refresh resumes at the service's cursor.
 */

import { ApiClient } from "./api.js";
import { chooseEdge, newTrialState, phaseBanner, scaffoldPrompt,
         teachUnlocked, toggleScaffold, TrialState } from "./model.js";
import { renderStatus, renderTrial } from "./render.js";
import { BRIEFING_HTML, completionHtml } from "./screens.js";
import type { Edge } from "./types.js";

const STORAGE_KEY = "graphteach-session";
const ANIMATE_MS = 350;

const api = new ApiClient(window.location.origin);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const stored = window.localStorage.getItem(STORAGE_KEY);
  if (stored) {
    try {
      const status = await api.status(stored);
      if (status.state === "active") {
        runFrom(stored, status.cursor);
        return;
      }
      if (status.state === "complete") {
        showCompletion(stored);
        return;
      }
    } catch {
      window.localStorage.removeItem(STORAGE_KEY);
    }
  }
  showBriefing();
}

function showBriefing(): void {
  el("screen").innerHTML = BRIEFING_HTML;
  const form = document.createElement("div");
  form.className = "start-form";
  form.innerHTML = `
    <label>Experiment
      <select id="experiment">
        <option value="baseline">baseline</option>
        <option value="scaffold">scaffold</option>
      </select>
    </label>
    <label>Scaffolding
      <select id="scaffolding">
        <option value="none">none</option>
        <option value="inference">inference</option>
        <option value="reward">reward</option>
      </select>
    </label>
    <label>Training
      <select id="training">
        <option value="incongruent">incongruent</option>
        <option value="congruent">congruent</option>
      </select>
    </label>
    <label>Participant <input id="participant" placeholder="optional"></label>
    <button id="start">Start</button>`;
  el("screen").appendChild(form);
  el("start").addEventListener("click", async () => {
    const experiment = (el("experiment") as HTMLSelectElement).value as
      "baseline" | "scaffold";
    const condition: Record<string, string> = experiment === "scaffold"
      ? { scaffolding: (el("scaffolding") as HTMLSelectElement).value,
          training: (el("training") as HTMLSelectElement).value }
      : { scaffolding: "none" };
    const head = await api.createSession({
      experiment, condition,
      seed: Math.floor(Math.random() * 1e9),
      participant: (el("participant") as HTMLInputElement).value,
    });
    window.localStorage.setItem(STORAGE_KEY, head.session_id);
    runFrom(head.session_id, 0);
  });
}

async function runFrom(sessionId: string, n: number): Promise<void> {
  const payload = await api.getTrial(sessionId, n);
  let state = newTrialState(payload);
  el("screen").innerHTML =
    `<div id="status"></div><div id="board"></div>`;

  const redraw = (animate: boolean) => {
    renderTrial(el("board"), state, { onEdgeClick }, animate ? ANIMATE_MS : 0);
    renderStatus(el("status"), state, phaseBanner(payload),
                 payload.scaffold_kind ? scaffoldPrompt(payload.scaffold_kind) : null);
  };

  async function onEdgeClick(edge: Edge): Promise<void> {
    if (state.submitting) return;
    if (state.scaffoldNeeded && !teachUnlocked(state)) {
      state = toggleScaffold(state, edge);
      redraw(false);
      return;
    }
    // scaffold picks may still be toggled until the teach click happens
    if (state.scaffoldNeeded &&
        state.scaffoldPicks.some((e) => e[0] === edge[0] && e[1] === edge[1])) {
      state = toggleScaffold(state, edge);
      redraw(false);
      return;
    }
    const next = chooseEdge(state, edge);
    if (next.chosen === null) return;
    state = { ...next, submitting: true };
    redraw(false);
    try {
      const ack = await api.postChoice(
        sessionId, payload.n, state.chosen as Edge,
        state.scaffoldNeeded ? state.scaffoldPicks : undefined);
      if (ack.next === null) {
        window.localStorage.setItem(STORAGE_KEY, sessionId);
        showCompletion(sessionId);
      } else {
        runFrom(sessionId, ack.next);
      }
    } catch (err) {
      state = { ...state, submitting: false, chosen: null };
      redraw(false);
      const status = el("status");
      const warn = document.createElement("div");
      warn.className = "error";
      warn.textContent = `Could not submit (${String(err)}). Try again.`;
      status.appendChild(warn);
    }
  }

  redraw(true);
}

function showCompletion(sessionId: string): void {
  el("screen").innerHTML = completionHtml(sessionId);
}

boot();
