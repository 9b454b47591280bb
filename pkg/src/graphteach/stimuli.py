"""Stimulus generation: random lattice graphs, learner states, trajectories,
flips, congruency screening, and the two experiment trial sequences.

A trial stimulus bundles the environment with a hidden learner knowledge
state (used only for generation) and the trajectory that state produces.
Generated trials always admit a strictly useful teaching choice: states
where no edge improves the learner are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import teachers
from .graphs import (EdgeSet, GraphError, TaskGraph, Trajectory, flip,
                     flip_edge_set, flip_trajectory, make_graph)
from .planning import optimal_trajectories, reachable_terminal

CONGRUENCY = ("congruent", "incongruent", "unscreened")
ROLES = ("train", "test")

DEFAULT_LAYERS = (1, 3, 3, 3)
DEFAULT_REWARD_RANGE = (0, 3)
INCONGRUENCY_THRESHOLD = 0.5


@dataclass(frozen=True)
class TrialStimulus:
    """One teaching trial: graph, hidden learner knowledge, observed path."""

    graph: TaskGraph
    learner_knowledge: EdgeSet
    trajectory: Trajectory
    congruency: str = "unscreened"
    role: str = "train"
    flipped: bool = False

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "learner_knowledge": [list(p) for p in self.learner_knowledge.pairs(self.graph)],
            "trajectory": [list(p) for p in self.trajectory.pairs(self.graph)],
            "congruency": self.congruency,
            "role": self.role,
            "flipped": self.flipped,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialStimulus":
        graph = TaskGraph.from_dict(d["graph"])
        return cls(
            graph=graph,
            learner_knowledge=EdgeSet.from_pairs(graph, d["learner_knowledge"]),
            trajectory=Trajectory.from_pairs(graph, d["trajectory"]),
            congruency=d.get("congruency", "unscreened"),
            role=d.get("role", "train"),
            flipped=bool(d.get("flipped", False)),
        )


def tutorial_example() -> TrialStimulus:
    """The worked example from the task instructions: the learner knows 9 of
    the 17 edges and earns 4 points; revealing (5,7) lifts it to 6."""
    graph = make_graph(
        "tutorial",
        layers=[[0], [1, 2, 3], [4, 5, 6], [7, 8, 9]],
        rewards={0: 0, 1: 2, 2: 1, 3: 0, 4: 0, 5: 1, 6: 0, 7: 3, 8: 1, 9: 0},
        edges=[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 4), (2, 5), (2, 6),
               (3, 5), (3, 6), (4, 7), (4, 8), (5, 7), (5, 8), (5, 9), (6, 8), (6, 9)],
    )
    knowledge = EdgeSet.from_pairs(
        graph, [(0, 1), (0, 2), (1, 5), (2, 4), (2, 5), (2, 6), (5, 8), (5, 9), (6, 9)])
    traj = Trajectory.from_pairs(graph, [(0, 1), (1, 5), (5, 8)])
    return TrialStimulus(graph, knowledge, traj)


def lattice_edges(layers) -> list[tuple[int, int]]:
    """Every straight-down/diagonal edge between consecutive layers; a lone
    apex node reaches all of the next layer."""
    ids, nid = [], 0
    for size in layers:
        ids.append(list(range(nid, nid + size)))
        nid += size
    edges = []
    for upper, lower in zip(ids, ids[1:]):
        for p, a in enumerate(upper):
            for q, b in enumerate(lower):
                if len(upper) == 1 or abs(p - q) <= 1:
                    edges.append((a, b))
    return edges


def generate_graph(seed: int, layer_sizes=DEFAULT_LAYERS,
                   reward_range=DEFAULT_REWARD_RANGE, graph_id=None) -> TaskGraph:
    """Random reward assignment on the complete down/diagonal lattice."""
    if layer_sizes[0] != 1:
        raise GraphError("layer_sizes[0] must be 1 (single start node)")
    rng = np.random.default_rng(seed)
    ids, nid = [], 0
    for size in layer_sizes:
        ids.append(list(range(nid, nid + size)))
        nid += size
    lo, hi = reward_range
    rewards = {n: int(rng.integers(lo, hi + 1)) for layer in ids for n in layer}
    return make_graph(graph_id or f"g{seed}", ids, rewards, lattice_edges(layer_sizes))


def sample_stimulus(graph: TaskGraph, seed: int, include_prob: float = 0.5,
                    max_tries: int = 500) -> TrialStimulus:
    """Sample a learner state and its optimal trajectory.

    Each edge is known independently with ``include_prob``; states with no
    complete path, or where no reveal can improve the learner, are
    rejected and resampled.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        bits = 0
        for i in range(graph.n_edges):
            if rng.random() < include_prob:
                bits |= 1 << i
        knowledge = EdgeSet(bits, graph.graph_id)
        if not reachable_terminal(graph, knowledge):
            continue
        options = optimal_trajectories(graph, knowledge)
        if not options:
            continue
        traj = options[rng.integers(len(options))]
        u = teachers.utilities(graph, traj, "bayes_optimal")
        if u.max() <= 0:
            continue
        return TrialStimulus(graph, knowledge, traj)
    raise GraphError(f"no usable stimulus for {graph.graph_id!r} in {max_tries} tries")


def screen_congruency(stim: TrialStimulus,
                      threshold: float = INCONGRUENCY_THRESHOLD) -> str:
    """congruent when the reward heuristic and the Bayes-optimal teacher
    point at the same (unique) edge; incongruent when the heuristic's pick
    scores at or below ``threshold`` of the best expected gain."""
    u_bot = teachers.utilities(stim.graph, stim.trajectory, "bayes_optimal")
    u_reward = teachers.utilities(stim.graph, stim.trajectory, "reward")
    r_arg = u_reward.argmax_indices()
    b_arg = u_bot.argmax_indices()
    if len(r_arg) != 1:
        return "unscreened"
    if len(b_arg) == 1 and r_arg == b_arg:
        return "congruent"
    top = u_bot.max()
    score = 1.0 if top <= 0 else u_bot.values[r_arg[0]] / top
    if score <= threshold:
        return "incongruent"
    return "unscreened"


def screened_stimulus(stim: TrialStimulus) -> TrialStimulus:
    return replace(stim, congruency=screen_congruency(stim))


def flip_stimulus(stim: TrialStimulus) -> TrialStimulus:
    """Mirror the whole trial; utilities are flip-equivariant so the
    congruency label carries over."""
    flipped_graph = flip(stim.graph)
    return TrialStimulus(
        graph=flipped_graph,
        learner_knowledge=flip_edge_set(stim.graph, stim.learner_knowledge, flipped_graph),
        trajectory=flip_trajectory(stim.graph, stim.trajectory, flipped_graph),
        congruency=stim.congruency,
        role=stim.role,
        flipped=not stim.flipped,
    )


def generate_pool(size: int, seed: int, congruency=None,
                  layer_sizes=DEFAULT_LAYERS, reward_range=DEFAULT_REWARD_RANGE,
                  threshold=INCONGRUENCY_THRESHOLD, max_attempts=None) -> list[TrialStimulus]:
    """Generate ``size`` screened stimuli, optionally keeping only one
    congruency class. Deterministic per seed."""
    if congruency is not None and congruency not in CONGRUENCY:
        raise ValueError(f"congruency must be one of {CONGRUENCY}")
    rng = np.random.default_rng(seed)
    pool: list[TrialStimulus] = []
    attempts = 0
    budget = max_attempts or 1000 * size
    while len(pool) < size:
        if attempts >= budget:
            raise GraphError(
                f"generated only {len(pool)}/{size} stimuli in {budget} attempts")
        attempts += 1
        sub = int(rng.integers(1 << 31))
        graph = generate_graph(sub, layer_sizes, reward_range,
                               graph_id=f"g{seed}-{attempts}")
        try:
            stim = sample_stimulus(graph, sub + 1)
        except GraphError:
            continue
        label = screen_congruency(stim, threshold)
        if congruency is None or label == congruency:
            pool.append(replace(stim, congruency=label))
    return pool


def build_baseline_set(pool: list[TrialStimulus], seed: int) -> list[TrialStimulus]:
    """40-trial baseline sequence: 20 stimuli plus their flips, shuffled."""
    if len(pool) < 20:
        raise ValueError(f"baseline pool needs >= 20 stimuli, got {len(pool)}")
    rng = np.random.default_rng(seed)
    if len(pool) > 20:
        picks = rng.choice(len(pool), size=20, replace=False)
        chosen = [pool[i] for i in picks]
    else:
        chosen = list(pool)
    trials = chosen + [flip_stimulus(s) for s in chosen]
    order = rng.permutation(len(trials))
    return [trials[i] for i in order]


def build_scaffold_set(train_pool: list[TrialStimulus],
                       test_pool: list[TrialStimulus], seed: int) -> list[TrialStimulus]:
    """20-trial scaffold sequence: 5 selected training stimuli, their flips,
    the same 5 again, then the shared test block in fixed order."""
    if len(train_pool) < 5:
        raise ValueError(f"training pool needs >= 5 stimuli, got {len(train_pool)}")
    if len(test_pool) != 5:
        raise ValueError(f"test pool must hold exactly 5 stimuli, got {len(test_pool)}")
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(train_pool), size=5, replace=False)
    selected = [replace(train_pool[i], role="train") for i in picks]
    trials = selected + [flip_stimulus(s) for s in selected] + list(selected)
    trials += [replace(s, role="test") for s in test_pool]
    return trials


def save_stimuli(stimuli, path):
    with open(path, "w") as f:
        json.dump([s.to_dict() for s in stimuli], f, indent=1)


def load_stimuli(path) -> list[TrialStimulus]:
    with open(path) as f:
        data = json.load(f)
    return [TrialStimulus.from_dict(d) for d in data]
