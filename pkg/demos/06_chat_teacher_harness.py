"""Drive a (mock) chat teacher through the scaffold experiment.

The harness sends the full instruction briefing once, then per training
trial a scaffold prompt (mark three edges) followed by the teaching prompt,
keeping the whole conversation in context; test trials get the teaching
prompt only. A scripted endpoint stands in for a real API here; swap in an
HttpChatEndpoint from a JSON config to run a live model. The resulting
dataset goes straight into scoring and model comparison.
"""

import re

from graphteach import compare, score_series
from graphteach.llm import MockEndpoint, run_teacher
from graphteach.prompts import build_instruction_prompt, build_trial_prompt
from graphteach.stimuli import build_scaffold_set, generate_pool

train_pool = generate_pool(10, seed=21)
test_pool = generate_pool(5, seed=22, congruency="incongruent")
sequence = build_scaffold_set(train_pool, test_pool, seed=23)

print("instruction preamble starts:")
print("  " + build_instruction_prompt("inference").splitlines()[0])
print("first trial prompt:")
print("  " + build_trial_prompt(sequence[0], "teach").splitlines()[0], "...\n")


EDGE = re.compile(r"\((\d+),(\d+)\)")
REWARD = re.compile(r"(\d+):(\d+)")


def scripted(messages):
    """A teacher that marks the first three edges and teaches greedily by
    endpoint rewards, with some chatter around the final answer."""
    last = messages[-1]["content"]
    lines = last.splitlines()
    edges = [(int(a), int(b)) for a, b in EDGE.findall(lines[1])]
    rewards = {int(n): int(r) for n, r in REWARD.findall(lines[2])}
    if last.startswith("Select three edges"):
        trio = ",".join(f"({a},{b})" for a, b in edges[:3])
        return f"My three picks are [{trio}]"
    best = max(edges, key=lambda e: rewards[e[0]] + rewards[e[1]])
    return f"Considering the rewards, I teach ({best[0]},{best[1]})"


ds = run_teacher(MockEndpoint(fn=scripted), sequence,
                 condition={"scaffolding": "inference", "training": "incongruent"},
                 teacher_id="demo-teacher")

n_scaffold = sum(1 for t in ds.trials if t.scaffold_selection)
print(f"trials: {len(ds.trials)}, scaffolded: {n_scaffold}, "
      f"usable: {len(ds.usable())}")
series = score_series([ds])
print(f"mean teaching score: {sum(r.score for r in series) / len(series):.3f}")

comp = compare(ds, ("bayes_optimal", "reward", "q_value"))
print(f"best-fitting model: {comp.best_model} "
      f"(delta-BIC reward vs expected-gain: {comp.delta_bic:+.1f})")
