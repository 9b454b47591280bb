"""Graph representation, validation, flips, returns, serialization."""

import json

import pytest

from graphteach import graphs
from graphteach.graphs import (EdgeSet, GraphError, TaskGraph, Trajectory,
                               flip, make_graph, trajectory_return, validate)


def test_tutorial_graph_is_valid(tutorial):
    assert validate(tutorial.graph) == []


def test_validate_flags_wide_diagonal(tutorial):
    g = tutorial.graph
    bad = TaskGraph(g.graph_id, g.layers, g.rewards,
                    tuple(sorted(g.edges + ((1, 6),))))  # skips two positions
    assert any(v.startswith("diagonal-violation") for v in validate(bad))


def test_validate_flags_negative_reward(tutorial):
    g = tutorial.graph
    rewards = dict(g.rewards)
    rewards[5] = -1
    bad = TaskGraph(g.graph_id, g.layers, rewards, g.edges)
    assert any(v.startswith("negative-reward") for v in validate(bad))


def test_validate_flags_structure_problems(tutorial):
    g = tutorial.graph
    two_starts = TaskGraph("x", ((0, 1), (2,)), {0: 0, 1: 0, 2: 0}, ((0, 2), (1, 2)))
    assert any(v.startswith("start-layer-size") for v in validate(two_starts))
    dup = TaskGraph(g.graph_id, g.layers, g.rewards, g.edges + (g.edges[0],))
    assert any(v.startswith("duplicate-edge") for v in validate(dup))
    unsorted = TaskGraph(g.graph_id, g.layers, g.rewards, tuple(reversed(g.edges)))
    assert any(v.startswith("edge-order") for v in validate(unsorted))
    skip = TaskGraph(g.graph_id, g.layers, g.rewards, tuple(sorted(g.edges + ((0, 7),))))
    assert any(v.startswith("layer-skip") for v in validate(skip))


def test_apex_reaches_all_children(tutorial):
    # the lone start node legally connects to all three layer-1 nodes
    assert {(0, 1), (0, 2), (0, 3)} <= set(tutorial.graph.edges)


def test_flip_mirrors_edges_and_rewards(tutorial):
    g = tutorial.graph
    f = flip(g)
    assert (0, 3) in f.edge_index          # mirror of (0,1)
    assert (5, 8) in f.edge_index          # both centered: fixed point
    assert f.rewards[1] == g.rewards[3] == 0
    assert f.rewards[3] == g.rewards[1] == 2
    assert validate(f) == []


def test_flip_is_involution(tutorial):
    g = tutorial.graph
    assert flip(flip(g)) == g
    for seed in range(10):
        from graphteach.stimuli import generate_graph
        g = generate_graph(seed)
        assert flip(flip(g)) == g


def test_trajectory_return_matches_walkthrough(tutorial):
    g = tutorial.graph
    assert trajectory_return(g, tutorial.trajectory) == 4
    better = Trajectory.from_pairs(g, [(0, 1), (1, 5), (5, 7)])
    assert trajectory_return(g, better) == 6


def test_trajectory_return_zero_rewards(tutorial):
    g = tutorial.graph
    zero = make_graph("zero", g.layers, {n: 0 for n in g.nodes}, g.edges)
    traj = Trajectory.from_pairs(zero, [(0, 1), (1, 5), (5, 8)])
    assert trajectory_return(zero, traj) == 0


def test_trajectory_return_flip_invariant(tutorial):
    g = tutorial.graph
    f = flip(g)
    mirrored = graphs.flip_trajectory(g, tutorial.trajectory, f)
    assert trajectory_return(f, mirrored) == trajectory_return(g, tutorial.trajectory)


def test_trajectory_validation(tutorial):
    g = tutorial.graph
    with pytest.raises(GraphError):
        Trajectory.from_pairs(g, [(1, 5), (5, 8)])        # does not leave start
    with pytest.raises(GraphError):
        Trajectory.from_pairs(g, [(0, 1), (2, 5), (5, 8)])  # broken chain
    with pytest.raises(GraphError):
        Trajectory.from_pairs(g, [(0, 1), (1, 5)])          # stops mid-graph
    with pytest.raises(GraphError):
        Trajectory.from_pairs(g, [(0, 1), (1, 6), (6, 9)])  # unknown edge


def test_edge_set_binding_and_ops(tutorial):
    g = tutorial.graph
    a = EdgeSet.from_pairs(g, [(0, 1), (5, 8)])
    b = EdgeSet.from_pairs(g, [(0, 2)])
    assert len(a.union(b)) == 3
    assert a.issubset(EdgeSet.full(g))
    other = EdgeSet(1, "different-graph")
    with pytest.raises(GraphError):
        a.union(other)
    with pytest.raises(GraphError):
        EdgeSet.from_pairs(g, [(1, 6)])


def test_serialization_round_trip_preserves_edge_indices(tutorial, tmp_path):
    g = tutorial.graph
    path = tmp_path / "graphs.json"
    graphs.dump_graphs([g], path)
    loaded = graphs.load_graphs(path)[0]
    assert loaded == g
    assert loaded.edge_index == g.edge_index
    # canonical order is stable through the wire format
    raw = json.loads(path.read_text())[0]
    assert [tuple(e) for e in raw["edges"]] == list(g.edges)


def test_from_dict_rejects_invalid():
    with pytest.raises(GraphError):
        TaskGraph.from_dict({"graph_id": "bad", "layers": [[0], [1]],
                             "rewards": {"0": 0, "1": -2}, "edges": [[0, 1]]})
