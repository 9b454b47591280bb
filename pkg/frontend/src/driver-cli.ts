/** Scripted session runner for round-trip checks against a live service.
 *
 * Usage: node dist/driver-cli.js <base-url> <experiment> <scaffolding> <seed>
 * Creates a session, completes every trial with the deterministic cycling
 * strategy through the same state machine the browser uses, and prints
 * {session_id, clicked, scaffolds} as JSON.
 */

import { ApiClient } from "./api.js";
import { completeSession, cyclingStrategy } from "./driver.js";
import { teachUnlocked } from "./model.js";

const FORBIDDEN = ["learner_knowledge", "utilities", "utility", "score",
                   "scores", "teaching_score", "congruency"];

function assertHygienic(value: unknown, where: string): void {
  if (Array.isArray(value)) {
    value.forEach((v) => assertHygienic(v, where));
  } else if (value && typeof value === "object") {
    for (const [k, v] of Object.entries(value)) {
      if (FORBIDDEN.includes(k)) {
        throw new Error(`payload leak: key ${k} in ${where}`);
      }
      assertHygienic(v, where);
    }
  }
}

async function main(): Promise<void> {
  const [baseUrl, experiment = "baseline", scaffolding = "none", seedArg = "1"] =
    process.argv.slice(2);
  if (!baseUrl) {
    console.error("usage: driver-cli <base-url> [experiment] [scaffolding] [seed]");
    process.exit(2);
  }
  const api = new ApiClient(baseUrl);
  const condition: Record<string, string> = { scaffolding };
  if (experiment === "scaffold") condition.training = "incongruent";
  const head = await api.createSession({
    experiment: experiment as "baseline" | "scaffold",
    condition,
    seed: Number(seedArg),
    participant: "driver-cli",
  });
  const result = await completeSession(api, head.session_id, cyclingStrategy(), {
    onTrial: (state) => {
      assertHygienic(state.payload, `trial ${state.payload.n}`);
      if (state.scaffoldNeeded && teachUnlocked(state)) {
        throw new Error("teach unlocked before the scaffold step");
      }
    },
    onAck: (ack) => assertHygienic(ack, "ack"),
  });
  console.log(JSON.stringify({
    session_id: head.session_id,
    n_trials: head.n_trials,
    clicked: result.clicked,
    scaffolds: result.scaffolds,
  }));
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
