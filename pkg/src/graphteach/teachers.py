"""Teacher models: per-edge utilities and softmax choice distributions.

Eight scoring rules over the candidate set (every teacher edge):

* bayes_optimal  - infers which edges the learner knows by inverting the
  learner's planning (only knowledge states under which the observed path
  is optimal get likelihood), then scores an edge by its expected gain in
  the learner's optimal start value.
* feasibility    - same expected gain, but the inference step is weakened to
  bare feasibility: every knowledge state that makes the path walkable is
  equally likely, optimal or not.
* prior_only     - expected gain under the flat prior alone; the observed
  path is ignored entirely.
* reward         - sum of the edge's endpoint rewards.
* depth          - the child node's layer index (deeper edges score higher).
* reward_depth   - linear combination of the reward and depth features.
* q_value        - full-knowledge state-action value R(child) + V(child).
* path_average   - mean return over all complete paths through the edge.

Knowledge states are enumerated exactly as bitmask subsets of the edge set;
the per-subset planning recursion is vectorized with numpy over the whole
subset space. Where a conditioning trajectory pins its own edges as known
(the likelihood is zero without them), only the free edges are enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graphs import EdgeSet, GraphError, TaskGraph, Trajectory, trajectory_return
from .planning import complete_paths_through, q_values

MODELS = (
    "bayes_optimal",
    "feasibility",
    "prior_only",
    "reward",
    "depth",
    "reward_depth",
    "q_value",
    "path_average",
)

# short spellings accepted on the command line
MODEL_ALIASES = {
    "bot": "bayes_optimal",
    "noip": "feasibility",
    "noip_bayes": "feasibility",
    "prior": "prior_only",
    "reward_heuristic": "reward",
    "depth_heuristic": "depth",
    "qvalue": "q_value",
    "path_averaged": "path_average",
}

POSTERIOR_MODES = ("inverse_planning", "feasibility", "prior_only")

# enumeration is exact; beyond this many free edges the subset space no
# longer fits comfortably in memory
MAX_FREE_EDGES = 22

ARGMAX_TOL = 1e-9


def normalize_model(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = MODEL_ALIASES.get(key, key)
    if key not in MODELS:
        raise ValueError(f"unknown model {name!r}; expected one of {MODELS}")
    return key


@dataclass(frozen=True)
class UtilityVector:
    """Model utility for every candidate edge, keyed by canonical index."""

    model: str
    graph_id: str
    values: dict[int, float]

    def max(self) -> float:
        return max(self.values.values())

    def argmax_indices(self, tol: float = ARGMAX_TOL) -> tuple[int, ...]:
        top = self.max()
        return tuple(i for i in sorted(self.values) if top - self.values[i] <= tol)

    def as_array(self) -> np.ndarray:
        return np.array([self.values[i] for i in sorted(self.values)])


@dataclass(frozen=True)
class FeatureVector:
    """Per-edge heuristic features: endpoint-reward sum and child depth."""

    graph_id: str
    reward_feature: dict[int, int]
    depth_feature: dict[int, int]


class _MaskTables:
    """Vectorized start values over a subset space of the free edges.

    Subset i of the space corresponds to the knowledge bitmask
    forced_bits | scatter(i), where bit j of i toggles edge free[j].
    """

    def __init__(self, graph: TaskGraph, forced_bits: int):
        free = [e for e in range(graph.n_edges) if not forced_bits >> e & 1]
        if len(free) > MAX_FREE_EDGES:
            raise GraphError(
                f"{len(free)} free edges is beyond exact enumeration "
                f"(limit {MAX_FREE_EDGES})")
        self.graph = graph
        self.forced_bits = forced_bits
        self.free = tuple(free)
        self.free_pos = {e: j for j, e in enumerate(free)}
        self.size = 1 << len(free)
        idx = np.arange(self.size, dtype=np.int64)
        self._known = {e: (idx >> j & 1).astype(bool) for j, e in enumerate(free)}
        self.values = self._all_values()
        self.start_values = self.values[graph.start]

    def known(self, edge_idx: int):
        """Boolean membership of an edge across the space (True if forced)."""
        if self.forced_bits >> edge_idx & 1:
            return True
        return self._known[edge_idx]

    def _all_values(self) -> dict[int, np.ndarray]:
        g = self.graph
        v = {n: np.zeros(self.size) for n in g.terminals}
        for layer in reversed(g.layers[:-1]):
            for node in layer:
                acc = np.zeros(self.size)
                for eidx, child in g.out_edges[node]:
                    val = g.rewards[child] + v[child]
                    k = self.known(eidx)
                    if k is True:
                        np.maximum(acc, val, out=acc)
                    else:
                        np.maximum(acc, np.where(k, val, 0.0), out=acc)
                v[node] = acc
        return v

    def greedy_path_counts(self) -> np.ndarray:
        """Number of complete greedy continuations from the start node."""
        g = self.graph
        n = {t: np.ones(self.size) for t in g.terminals}
        for layer in reversed(g.layers[:-1]):
            for node in layer:
                acc = np.zeros(self.size)
                for eidx, child in g.out_edges[node]:
                    best = g.rewards[child] + self.values[child] == self.values[node]
                    k = self.known(eidx)
                    if k is not True:
                        best = best & k
                    acc += np.where(best, n[child], 0.0)
                n[node] = acc
        return n[g.start]

    def terminal_reachable(self) -> np.ndarray:
        g = self.graph
        r = {t: np.ones(self.size, bool) for t in g.terminals}
        for layer in reversed(g.layers[:-1]):
            for node in layer:
                acc = np.zeros(self.size, bool)
                for eidx, child in g.out_edges[node]:
                    k = self.known(eidx)
                    acc |= r[child] if k is True else k & r[child]
                r[node] = acc
        return r[g.start]

    def masks(self) -> np.ndarray:
        """Full knowledge bitmask of every subset in the space."""
        idx = np.arange(self.size, dtype=np.int64)
        out = np.full(self.size, self.forced_bits, dtype=np.int64)
        for j, e in enumerate(self.free):
            out |= (idx >> j & 1) << e
        return out


@lru_cache(maxsize=8)
def _mask_tables(graph: TaskGraph, forced_bits: int) -> _MaskTables:
    return _MaskTables(graph, forced_bits)


@dataclass(frozen=True)
class Posterior:
    """Distribution over the learner's possible knowledge states.

    Weights live on the subset space of ``tables``; ``probs[i]`` is the
    probability of knowledge bitmask ``tables.masks()[i]``.
    """

    graph_id: str
    mode: str
    tables: _MaskTables
    probs: np.ndarray
    trajectory: Trajectory | None

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.probs))

    def weight(self, knowledge) -> float:
        """Probability of one knowledge state (an EdgeSet or raw bitmask)."""
        bits = knowledge.bits if isinstance(knowledge, EdgeSet) else int(knowledge)
        t = self.tables
        full = t.forced_bits
        for e in t.free:
            full |= 1 << e
        if bits & t.forced_bits != t.forced_bits or bits & ~full:
            return 0.0
        i = 0
        for j, e in enumerate(t.free):
            i |= (bits >> e & 1) << j
        return float(self.probs[i])

    def items(self):
        """Yield (knowledge bitmask, probability) over the support."""
        masks = self.tables.masks()
        for i in np.nonzero(self.probs)[0]:
            yield int(masks[i]), float(self.probs[i])


def posterior(graph: TaskGraph, traj: Trajectory | None, mode: str) -> Posterior:
    """Posterior over knowledge states given an observed trajectory.

    inverse_planning: flat prior; a state's likelihood is 1/|optimal paths|
      when the trajectory is among that state's optimal paths, else 0.
    feasibility: equal likelihood for every state containing the
      trajectory's edges, optimal or not.
    prior_only: uniform over every state admitting a complete path; the
      trajectory is ignored.
    """
    if mode not in POSTERIOR_MODES:
        raise ValueError(f"unknown posterior mode {mode!r}")
    if mode == "prior_only":
        tables = _mask_tables(graph, 0)
        reach = tables.terminal_reachable()
        total = reach.sum()
        if total == 0:
            raise GraphError("no knowledge state admits a complete path")
        return Posterior(graph.graph_id, mode, tables, reach / total, None)

    if traj is None or traj.graph_id != graph.graph_id:
        raise GraphError("conditioning trajectory missing or bound to another graph")
    zeta_bits = traj.edge_set(graph).bits
    tables = _mask_tables(graph, zeta_bits)

    if mode == "feasibility":
        probs = np.full(tables.size, 1.0 / tables.size)
        return Posterior(graph.graph_id, mode, tables, probs, traj)

    v = tables.values
    ok = np.ones(tables.size, bool)
    for a, b in traj.pairs(graph):
        ok &= v[a] == graph.rewards[b] + v[b]
    counts = tables.greedy_path_counts()
    like = np.divide(1.0, counts, out=np.zeros(tables.size), where=ok)
    like[~ok] = 0.0
    total = like.sum()
    if total == 0:
        raise GraphError("empty posterior support")  # unreachable for a valid trajectory
    return Posterior(graph.graph_id, mode, tables, like / total, traj)


def expected_gain_utilities(graph: TaskGraph, traj: Trajectory | None,
                            mode: str = "inverse_planning") -> UtilityVector:
    """Expected improvement of the learner's optimal start value from
    revealing each edge, averaged over the posterior knowledge states."""
    post = posterior(graph, traj, mode)
    t = post.tables
    vstart = t.start_values
    idx = np.arange(t.size, dtype=np.int64)
    out = {}
    for e in range(graph.n_edges):
        if t.forced_bits >> e & 1:
            out[e] = 0.0  # already known in every supported state
            continue
        with_e = vstart[idx | (1 << t.free_pos[e])]
        out[e] = float(post.probs @ (with_e - vstart))
    model = {"inverse_planning": "bayes_optimal",
             "feasibility": "feasibility",
             "prior_only": "prior_only"}[mode]
    return UtilityVector(model, graph.graph_id, out)


def unknown_edge_marginals(graph: TaskGraph, traj: Trajectory,
                           mode: str = "inverse_planning") -> dict[int, float]:
    """Per-edge marginal probability that the learner does not know it."""
    post = posterior(graph, traj, mode)
    t = post.tables
    out = {}
    for e in range(graph.n_edges):
        if t.forced_bits >> e & 1:
            out[e] = 0.0
        else:
            out[e] = float(post.probs[~t.known(e)].sum())
    return out


def heuristic_features(graph: TaskGraph) -> FeatureVector:
    """Reward feature R(parent) + R(child) and depth feature (child layer)."""
    reward = {i: graph.rewards[a] + graph.rewards[b] for i, (a, b) in enumerate(graph.edges)}
    depth = {i: graph.node_layer[b] for i, (_, b) in enumerate(graph.edges)}
    return FeatureVector(graph.graph_id, reward, depth)


@lru_cache(maxsize=2048)
def _base_utilities(graph: TaskGraph, traj: Trajectory | None, model: str) -> tuple[float, ...]:
    """Utilities of the weight-free models as a tuple ordered by edge index.

    Cached by content: experiment sequences revisit the same trial many
    times across subjects and fits, and the Bayesian models pay a full
    subset-space enumeration per call.
    """
    if model == "bayes_optimal":
        u = expected_gain_utilities(graph, traj, "inverse_planning").values
    elif model == "feasibility":
        u = expected_gain_utilities(graph, traj, "feasibility").values
    elif model == "prior_only":
        u = expected_gain_utilities(graph, None, "prior_only").values
    elif model == "reward":
        u = heuristic_features(graph).reward_feature
    elif model == "depth":
        u = heuristic_features(graph).depth_feature
    elif model == "q_value":
        u = q_values(graph)
    elif model == "path_average":
        u = {}
        for e in range(graph.n_edges):
            paths = complete_paths_through(graph, e)
            u[e] = (sum(trajectory_return(graph, p) for p in paths) / len(paths)
                    if paths else 0.0)
    else:
        raise ValueError(f"model {model!r} has no parameter-free utilities")
    return tuple(float(u[e]) for e in range(graph.n_edges))


def utilities(graph: TaskGraph, traj: Trajectory | None, model: str,
              weights=None) -> UtilityVector:
    """Utility vector of any model; ``weights=(w_reward, w_depth)`` is
    required for (and only for) reward_depth."""
    model = normalize_model(model)
    if model == "reward_depth":
        if weights is None:
            raise ValueError("reward_depth requires weights=(w_reward, w_depth)")
        w_r, w_d = float(weights[0]), float(weights[1])
        f = heuristic_features(graph)
        vals = {e: w_r * f.reward_feature[e] + w_d * f.depth_feature[e]
                for e in range(graph.n_edges)}
        return UtilityVector(model, graph.graph_id, vals)
    if weights is not None:
        raise ValueError(f"model {model!r} takes no weights")
    # trajectory-independent models cache under traj=None
    needs_traj = model in ("bayes_optimal", "feasibility")
    base = _base_utilities(graph, traj if needs_traj else None, model)
    return UtilityVector(model, graph.graph_id, dict(enumerate(base)))


def bot_utilities(graph: TaskGraph, traj: Trajectory,
                  mode: str = "inverse_planning") -> UtilityVector:
    """Expected-gain utilities of the Bayesian family (see ``posterior``)."""
    return expected_gain_utilities(graph, traj, mode)


def choice_distribution(u: UtilityVector, beta: float) -> dict[int, float]:
    """Softmax choice probabilities P(e) = exp(beta*U(e)) / sum, computed
    with max-subtraction; beta=inf means argmax (uniform over ties)."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    keys = sorted(u.values)
    vals = np.array([u.values[k] for k in keys])
    if math.isinf(beta):
        # exact float equality: argmax play always attains the stored
        # maximum, so the teaching-score ratio of such a choice is 1.0
        mask = vals == vals.max()
        p = mask / mask.sum()
    else:
        z = beta * vals
        z -= z.max()
        ez = np.exp(z)
        p = ez / ez.sum()
    return {k: float(pk) for k, pk in zip(keys, p)}
