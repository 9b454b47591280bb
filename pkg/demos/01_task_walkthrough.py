"""Walk through the teaching task on the tutorial graph.

A learner sits on a layered graph of rewards, knowing only some of the
edges, and walks the best path it can see. The teacher watches that one
path and reveals a single edge. This script replays the worked example
from the task instructions: the learner earns 4 points, and the right
reveal lifts it to 6 while a useless one changes nothing.
"""

from graphteach import EdgeSet, optimal_trajectories, trajectory_return, value
from graphteach.stimuli import tutorial_example

stim = tutorial_example()
g = stim.graph

print("layers:", [list(l) for l in g.layers])
print("rewards:", g.rewards)
print("teacher edges:", list(g.edges))
print("learner knows:", stim.learner_knowledge.pairs(g))

v = value(g, stim.learner_knowledge)
print("\nlearner's optimal value at the start:", v[g.start])
print("observed trajectory:", stim.trajectory.pairs(g),
      "-> earns", trajectory_return(g, stim.trajectory), "points")

for reveal in [(5, 7), (5, 9), (4, 7)]:
    plus = stim.learner_knowledge.with_index(g.edge_index[reveal])
    new_paths = optimal_trajectories(g, plus)
    new_return = g.rewards[g.start] + value(g, plus)[g.start]
    print(f"reveal {reveal}: learner replans to "
          f"{new_paths[0].pairs(g)} earning {new_return}")

full = EdgeSet.full(g)
best = optimal_trajectories(g, full)[0]
print("\nwith full knowledge the learner would take", best.pairs(g),
      "for", trajectory_return(g, best), "points")
