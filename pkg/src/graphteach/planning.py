"""Learner-side planning under partial edge knowledge.

The learner knows only a subset of the true edges and walks down the graph
along a value-optimal path. A non-terminal node with no known outgoing edge
is a dead end worth 0 (the episode just stops there); all rewards are
non-negative, so values are too.
"""

from __future__ import annotations

from .graphs import EdgeSet, GraphError, TaskGraph, Trajectory


class NoCompletePathError(GraphError):
    """The knowledge state admits no start-to-terminal path."""


def value(graph: TaskGraph, knowledge: EdgeSet) -> dict[int, int]:
    """Expected remaining points at every node under ``knowledge``.

    Backward pass over layers: V(terminal) = 0, V(s) = max over known
    outgoing edges of R(child) + V(child), and 0 at stuck nodes.
    """
    if knowledge.graph_id != graph.graph_id:
        raise GraphError("knowledge bound to a different graph")
    v: dict[int, int] = {n: 0 for n in graph.terminals}
    for layer in reversed(graph.layers[:-1]):
        for node in layer:
            best = 0
            for idx, child in graph.out_edges[node]:
                if knowledge.has_index(idx):
                    cand = graph.rewards[child] + v[child]
                    if cand > best:
                        best = cand
            v[node] = best
    return v


def reachable_terminal(graph: TaskGraph, knowledge: EdgeSet) -> bool:
    """True iff at least one complete start-to-terminal path is known."""
    ok = {n: True for n in graph.terminals}
    for layer in reversed(graph.layers[:-1]):
        for node in layer:
            ok[node] = any(knowledge.has_index(idx) and ok[child]
                           for idx, child in graph.out_edges[node])
    return ok[graph.start]


def optimal_trajectories(graph: TaskGraph, knowledge: EdgeSet) -> tuple[Trajectory, ...]:
    """Every start-to-terminal trajectory achieving the optimal return.

    All argmax continuations are followed, so ties are enumerated rather
    than broken. Paths that dead-end before the terminal layer are dropped.
    Raises NoCompletePathError when the knowledge state admits no complete
    path at all.
    """
    if not reachable_terminal(graph, knowledge):
        raise NoCompletePathError(
            f"no complete path under knowledge state on {graph.graph_id!r}")
    v = value(graph, knowledge)
    results = []

    def walk(node, acc):
        if graph.is_terminal(node):
            results.append(Trajectory(tuple(acc), graph.graph_id))
            return
        for idx, child in graph.out_edges[node]:
            if knowledge.has_index(idx) and graph.rewards[child] + v[child] == v[node]:
                acc.append(idx)
                walk(child, acc)
                acc.pop()

    walk(graph.start, [])
    return tuple(sorted(results, key=lambda t: t.edge_indices))


def q_values(graph: TaskGraph) -> dict[int, int]:
    """Per-edge state-action values under full knowledge:
    Q((s,c)) = R(c) + V(c)."""
    v = value(graph, EdgeSet.full(graph))
    return {i: graph.rewards[c] + v[c] for i, (_, c) in enumerate(graph.edges)}


def complete_paths_through(graph: TaskGraph, edge) -> list[Trajectory]:
    """All full-knowledge start-to-terminal paths containing ``edge``
    (a (parent, child) pair or a canonical edge index)."""
    if isinstance(edge, int):
        if not 0 <= edge < graph.n_edges:
            raise GraphError(f"edge index {edge} out of range")
        target = edge
    else:
        pair = (int(edge[0]), int(edge[1]))
        if pair not in graph.edge_index:
            raise GraphError(f"edge {pair} not in graph {graph.graph_id!r}")
        target = graph.edge_index[pair]

    results = []

    def walk(node, acc, seen_target):
        if graph.is_terminal(node):
            if seen_target:
                results.append(Trajectory(tuple(acc), graph.graph_id))
            return
        for idx, child in graph.out_edges[node]:
            acc.append(idx)
            walk(child, acc, seen_target or idx == target)
            acc.pop()

    walk(graph.start, [], False)
    return results
