"""Score the same trial with every teacher model.

Eight scoring rules see the tutorial trial: three Bayesian variants that
average the learner's value gain over inferred knowledge states, two
feature heuristics, their linear combination, and two utilities that plan
on the full graph without modeling the learner at all. The printout shows
how differently they rank the candidate edges, and what softmax choice
probabilities follow.
"""

from graphteach import MODELS, choice_distribution, utilities
from graphteach.stimuli import tutorial_example

stim = tutorial_example()
g, traj = stim.graph, stim.trajectory

print(f"trajectory: {traj.pairs(g)}\n")
header = f"{'edge':>8}" + "".join(f"{m[:12]:>14}" for m in MODELS)
print(header)
vectors = {m: utilities(g, traj, m, weights=(1.0, 0.5) if m == "reward_depth" else None)
           for m in MODELS}
for e, pair in enumerate(g.edges):
    row = f"{str(pair):>8}"
    for m in MODELS:
        row += f"{vectors[m].values[e]:>14.3f}"
    print(row)

print("\nargmax edge per model:")
for m in MODELS:
    best = [g.edges[i] for i in vectors[m].argmax_indices()]
    print(f"  {m:>14}: {best}")

print("\nsoftmax choice probabilities at beta=3 (expected-gain teacher):")
dist = choice_distribution(vectors["bayes_optimal"], beta=3.0)
for e, p in sorted(dist.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {g.edges[e]}: {p:.3f}")
