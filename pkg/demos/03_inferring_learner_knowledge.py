"""What does the teacher believe the learner is missing?

Inverting the learner's planning over all 2^17 knowledge subsets gives a
posterior over what the learner knows. Three likelihoods are compared:
full inverse planning (the path must have been optimal), bare feasibility
(the path merely had to be walkable), and the flat prior (the path is
ignored). The per-edge marginal "probably unknown" mass is what the
inference-scaffolding step asks teachers to produce.
"""

from graphteach import posterior, unknown_edge_marginals
from graphteach.stimuli import tutorial_example

stim = tutorial_example()
g, traj = stim.graph, stim.trajectory
truly_unknown = set(g.edges) - set(stim.learner_knowledge.pairs(g))

for mode in ("inverse_planning", "feasibility", "prior_only"):
    post = posterior(g, traj, mode)
    print(f"{mode}: support {post.support_size} of {1 << g.n_edges} states")

print("\nP(edge unknown | trajectory), inverse-planning posterior:")
marg = unknown_edge_marginals(g, traj)
for e, pair in enumerate(g.edges):
    tag = "truly unknown" if pair in truly_unknown else "known to learner"
    bar = "#" * int(round(20 * marg[e]))
    print(f"  {pair}: {marg[e]:.3f} {bar:<20} ({tag})")

print("\nedges on the observed path are known for certain; the model's"
      "\nhigh-marginal edges are good candidates for the scaffold step")
