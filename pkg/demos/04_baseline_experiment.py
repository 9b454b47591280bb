"""Run simulated teachers through the 40-trial baseline design.

Twenty random graphs and their horizontal flips, shuffled, are shown to
softmax teachers of different stripes. Teaching scores (chosen edge's
expected gain over the trial maximum) summarize performance; the
trial-number correlation shows there is nothing to learn across trials,
and graph-wise profiles show which environments are hard for whom.
"""

import numpy as np

from graphteach import (build_baseline_set, correlate, graphwise_profile,
                        learning_curve, score_series, simulate_subject)
from graphteach.stimuli import generate_pool

pool = generate_pool(20, seed=11)
sequence = build_baseline_set(pool, seed=12)
print(f"baseline sequence: {len(sequence)} trials over "
      f"{len({s.graph.graph_id for s in sequence})} unique graphs\n")

teachers = {
    "expected-gain, beta=5": ("bayes_optimal", 5.0),
    "expected-gain, beta=1": ("bayes_optimal", 1.0),
    "reward heuristic, beta=5": ("reward", 5.0),
    "uniform random": ("reward", 0.0),
}

profiles = {}
for label, (model, beta) in teachers.items():
    datasets = [simulate_subject(sequence, model, {"beta": beta}, seed=s,
                                 subject_id=f"{label}-{s}") for s in range(8)]
    series = score_series(datasets)
    means, r = learning_curve(series)
    profiles[label] = graphwise_profile(series)
    avg = np.mean([row.score for row in series])
    print(f"{label:>26}: mean score {avg:.3f}, trial-score r = {r:+.3f}")

print("\ngraph-wise profile correlations (do models struggle on the same graphs?)")
labels = list(profiles)
for i, a in enumerate(labels):
    for b in labels[i + 1:]:
        r, p = correlate(profiles[a], profiles[b])
        print(f"  {a} vs {b}: r = {r:+.2f} (p = {p:.2g})")
