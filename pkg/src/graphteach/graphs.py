"""Layered task graphs: representation, validation, flips, serialization.

The environment is a layered DAG with one start node on top, terminal nodes
at the bottom, and a non-negative integer reward on every node. Moves go
straight down or diagonally down one layer. Edges are kept in a canonical
order (sorted by (parent, child)); that order defines the bit positions used
by EdgeSet masks and by every file format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class GraphError(ValueError):
    """Invalid graph, edge set, or trajectory input."""


@dataclass(frozen=True, eq=False)
class TaskGraph:
    """Immutable layered reward-annotated DAG.

    layers[0] is the single start node; the last layer holds the terminals.
    ``edges`` is the full transition set available to a teacher. Derived
    lookups (edge indices, per-node out-edges, positions) are built once at
    construction.
    """

    graph_id: str
    layers: tuple[tuple[int, ...], ...]
    rewards: dict[int, int]
    edges: tuple[tuple[int, int], ...]

    # derived, filled in __post_init__
    node_layer: dict[int, int] = field(init=False, repr=False)
    node_pos: dict[int, int] = field(init=False, repr=False)
    edge_index: dict[tuple[int, int], int] = field(init=False, repr=False)
    out_edges: dict[int, tuple[tuple[int, int], ...]] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(l) for l in self.layers))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        object.__setattr__(self, "rewards", {int(k): int(v) for k, v in self.rewards.items()})
        node_layer, node_pos = {}, {}
        for k, layer in enumerate(self.layers):
            for p, node in enumerate(layer):
                node_layer[node] = k
                node_pos[node] = p
        edge_index = {e: i for i, e in enumerate(self.edges)}
        out_edges: dict[int, list] = {n: [] for n in node_layer}
        for i, (a, b) in enumerate(self.edges):
            if a in out_edges:
                out_edges[a].append((i, b))
        object.__setattr__(self, "node_layer", node_layer)
        object.__setattr__(self, "node_pos", node_pos)
        object.__setattr__(self, "edge_index", edge_index)
        object.__setattr__(self, "out_edges", {n: tuple(v) for n, v in out_edges.items()})

    # content key: graphs compare and hash by what they contain, so they can
    # key caches even when deserialized into distinct objects
    @property
    def key(self):
        return (self.graph_id, self.layers, tuple(sorted(self.rewards.items())), self.edges)

    def __eq__(self, other):
        return isinstance(other, TaskGraph) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def start(self) -> int:
        return self.layers[0][0]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def nodes(self):
        return tuple(n for layer in self.layers for n in layer)

    @property
    def terminals(self):
        return self.layers[-1]

    def is_terminal(self, node: int) -> bool:
        return self.node_layer[node] == len(self.layers) - 1

    def to_dict(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "layers": [list(l) for l in self.layers],
            "rewards": {str(n): r for n, r in sorted(self.rewards.items())},
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskGraph":
        g = cls(
            graph_id=d["graph_id"],
            layers=tuple(tuple(l) for l in d["layers"]),
            rewards={int(k): int(v) for k, v in d["rewards"].items()},
            edges=tuple((int(a), int(b)) for a, b in d["edges"]),
        )
        problems = validate(g)
        if problems:
            raise GraphError(f"invalid graph {d.get('graph_id')!r}: {problems}")
        return g


def make_graph(graph_id, layers, rewards, edges) -> TaskGraph:
    """Build a TaskGraph with edges canonicalized, and insist it is valid."""
    g = TaskGraph(graph_id, tuple(tuple(l) for l in layers), dict(rewards),
                  tuple(sorted((int(a), int(b)) for a, b in edges)))
    problems = validate(g)
    if problems:
        raise GraphError(f"invalid graph {graph_id!r}: {problems}")
    return g


def validate(graph: TaskGraph) -> list[str]:
    """Check every structural invariant; return violations (empty == valid).

    Violations are strings starting with a stable code, e.g.
    ``"negative-reward: node 5"``.
    """
    problems = []
    if len(graph.layers) == 0 or len(graph.layers[0]) != 1:
        problems.append("start-layer-size: layer 0 must hold exactly one node")
    seen = set()
    for layer in graph.layers:
        for n in layer:
            if n in seen:
                problems.append(f"duplicate-node: {n}")
            seen.add(n)
    for n in seen:
        if n not in graph.rewards:
            problems.append(f"missing-reward: node {n}")
    for n, r in graph.rewards.items():
        if r < 0:
            problems.append(f"negative-reward: node {n}")
        if n not in seen:
            problems.append(f"unknown-reward-node: {n}")
    if list(graph.edges) != sorted(set(graph.edges)):
        if len(set(graph.edges)) != len(graph.edges):
            problems.append("duplicate-edge: edge list has repeats")
        else:
            problems.append("edge-order: edge list is not canonically sorted")
    for a, b in graph.edges:
        if a not in seen or b not in seen:
            problems.append(f"unknown-node: edge ({a},{b})")
            continue
        la, lb = graph.node_layer[a], graph.node_layer[b]
        if lb != la + 1:
            problems.append(f"layer-skip: edge ({a},{b}) spans layers {la}->{lb}")
            continue
        # straight down or one diagonal step; a lone node over a wider layer
        # (the start apex) may reach every child
        if len(graph.layers[la]) > 1 and abs(graph.node_pos[a] - graph.node_pos[b]) > 1:
            problems.append(f"diagonal-violation: edge ({a},{b})")
    return problems


def flip_node_map(graph: TaskGraph) -> dict[int, int]:
    """Node relabeling of the horizontal mirror: position p -> width-1-p."""
    m = {}
    for layer in graph.layers:
        w = len(layer)
        for p, n in enumerate(layer):
            m[n] = layer[w - 1 - p]
    return m


def flip(graph: TaskGraph) -> TaskGraph:
    """Horizontally mirrored graph: same layers and id, rewards and edges
    remapped through the position mirror. flip(flip(g)) == g."""
    problems = validate(graph)
    if problems:
        raise GraphError(f"cannot flip invalid graph: {problems}")
    m = flip_node_map(graph)
    return make_graph(
        graph.graph_id,
        graph.layers,
        {m[n]: r for n, r in graph.rewards.items()},
        [(m[a], m[b]) for a, b in graph.edges],
    )


@dataclass(frozen=True)
class EdgeSet:
    """Subset of a graph's edges as a bitmask over canonical edge indices."""

    bits: int
    graph_id: str

    @classmethod
    def from_pairs(cls, graph: TaskGraph, pairs) -> "EdgeSet":
        bits = 0
        for pair in pairs:
            pair = (int(pair[0]), int(pair[1]))
            if pair not in graph.edge_index:
                raise GraphError(f"edge {pair} not in graph {graph.graph_id!r}")
            bits |= 1 << graph.edge_index[pair]
        return cls(bits, graph.graph_id)

    @classmethod
    def full(cls, graph: TaskGraph) -> "EdgeSet":
        return cls((1 << graph.n_edges) - 1, graph.graph_id)

    @classmethod
    def empty(cls, graph: TaskGraph) -> "EdgeSet":
        return cls(0, graph.graph_id)

    def _check(self, other: "EdgeSet"):
        if self.graph_id != other.graph_id:
            raise GraphError(
                f"edge sets bound to different graphs: {self.graph_id!r} vs {other.graph_id!r}")

    def union(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.bits | other.bits, self.graph_id)

    def issubset(self, other: "EdgeSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def with_index(self, i: int) -> "EdgeSet":
        return EdgeSet(self.bits | (1 << i), self.graph_id)

    def has_index(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.bits.bit_length()) if self.bits >> i & 1)

    def pairs(self, graph: TaskGraph) -> list[tuple[int, int]]:
        return [graph.edges[i] for i in self.indices()]

    def __len__(self):
        return bin(self.bits).count("1")


@dataclass(frozen=True)
class Trajectory:
    """An observed learner path: a chained edge sequence from start to a
    terminal, stored as canonical edge indices."""

    edge_indices: tuple[int, ...]
    graph_id: str

    @classmethod
    def from_pairs(cls, graph: TaskGraph, pairs) -> "Trajectory":
        pairs = [(int(a), int(b)) for a, b in pairs]
        if not pairs:
            raise GraphError("trajectory must contain at least one edge")
        for pair in pairs:
            if pair not in graph.edge_index:
                raise GraphError(f"trajectory edge {pair} not in graph {graph.graph_id!r}")
        if pairs[0][0] != graph.start:
            raise GraphError(f"trajectory must leave the start node {graph.start}")
        for (_, b1), (a2, _) in zip(pairs, pairs[1:]):
            if b1 != a2:
                raise GraphError(f"trajectory edges do not chain at node {b1}")
        if not graph.is_terminal(pairs[-1][1]):
            raise GraphError(f"trajectory ends at non-terminal node {pairs[-1][1]}")
        return cls(tuple(graph.edge_index[p] for p in pairs), graph.graph_id)

    def pairs(self, graph: TaskGraph) -> list[tuple[int, int]]:
        return [graph.edges[i] for i in self.edge_indices]

    def nodes(self, graph: TaskGraph) -> list[int]:
        ps = self.pairs(graph)
        return [ps[0][0]] + [b for _, b in ps]

    def edge_set(self, graph: TaskGraph) -> EdgeSet:
        bits = 0
        for i in self.edge_indices:
            bits |= 1 << i
        return EdgeSet(bits, self.graph_id)


def trajectory_return(graph: TaskGraph, traj: Trajectory) -> int:
    """Sum of rewards over every visited node, start node included."""
    if traj.graph_id != graph.graph_id:
        raise GraphError("trajectory bound to a different graph")
    return sum(graph.rewards[n] for n in traj.nodes(graph))


def flip_pairs(graph: TaskGraph, pairs) -> list[tuple[int, int]]:
    """Mirror a list of (parent, child) pairs of ``graph`` into flip(graph)."""
    m = flip_node_map(graph)
    return [(m[a], m[b]) for a, b in pairs]


def flip_trajectory(graph: TaskGraph, traj: Trajectory, flipped: TaskGraph) -> Trajectory:
    return Trajectory.from_pairs(flipped, flip_pairs(graph, traj.pairs(graph)))


def flip_edge_set(graph: TaskGraph, es: EdgeSet, flipped: TaskGraph) -> EdgeSet:
    return EdgeSet.from_pairs(flipped, flip_pairs(graph, es.pairs(graph)))


def load_graphs(path) -> list[TaskGraph]:
    """Read a JSON array of graph objects (or a single object)."""
    with open(path) as f:
        data = json.load(f)
    if isinstance(data, dict):
        data = [data]
    return [TaskGraph.from_dict(d) for d in data]


def dump_graphs(graphs, path):
    with open(path, "w") as f:
        json.dump([g.to_dict() for g in graphs], f, indent=1)
