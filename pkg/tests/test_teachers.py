"""Teacher models: posteriors, expected-gain utilities, heuristics, softmax."""

import math

import numpy as np
import pytest

import oracles
from graphteach import teachers
from graphteach.graphs import EdgeSet, flip, flip_trajectory
from graphteach.teachers import (UtilityVector, bot_utilities,
                                 choice_distribution, heuristic_features,
                                 normalize_model, posterior,
                                 unknown_edge_marginals, utilities)


def test_posterior_modes_normalize(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    for mode in ("inverse_planning", "feasibility", "prior_only"):
        post = posterior(g, traj, mode)
        assert abs(post.probs.sum() - 1.0) <= 1e-12


def test_feasibility_support_counts_supersets(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    post = posterior(g, traj, "feasibility")
    assert post.support_size == 2 ** (g.n_edges - len(traj.edge_indices))
    # uniform weight on each superset
    assert np.allclose(post.probs, 2.0 ** -(g.n_edges - 3))


def test_inverse_planning_support_within_feasibility(random_stimuli):
    for stim in random_stimuli[:8]:
        g, traj = stim.graph, stim.trajectory
        ip = posterior(g, traj, "inverse_planning")
        zeta_bits = traj.edge_set(g).bits
        for mask, w in ip.items():
            assert w >= 0
            assert mask & zeta_bits == zeta_bits  # optimality implies feasibility


def test_prior_only_ignores_trajectory(tutorial):
    g = tutorial.graph
    from graphteach.graphs import Trajectory
    other = Trajectory.from_pairs(g, [(0, 2), (2, 6), (6, 9)])
    a = posterior(g, tutorial.trajectory, "prior_only")
    b = posterior(g, other, "prior_only")
    assert np.array_equal(a.probs, b.probs)


def test_posterior_weight_lookup(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    post = posterior(g, traj, "feasibility")
    zeta = traj.edge_set(g)
    assert post.weight(zeta) == pytest.approx(2.0 ** -(g.n_edges - 3))
    assert post.weight(EdgeSet.empty(g)) == 0.0  # not a superset


def test_bot_argmax_matches_good_advice(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    u = bot_utilities(g, traj, "inverse_planning")
    assert [g.edges[i] for i in u.argmax_indices()] == [(5, 7)]


def test_zeta_edges_have_zero_utility_under_feasibility(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    u = bot_utilities(g, traj, "feasibility")
    for i in traj.edge_indices:
        assert u.values[i] == 0.0


def test_expected_gain_nonnegative(random_stimuli):
    for stim in random_stimuli[:8]:
        for mode in ("inverse_planning", "feasibility", "prior_only"):
            u = bot_utilities(stim.graph, stim.trajectory, mode)
            assert all(x >= -1e-15 for x in u.values.values())


def test_bot_utilities_match_brute_force(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    for mode in ("inverse_planning", "feasibility", "prior_only"):
        fast = bot_utilities(g, traj, mode)
        slow = oracles.brute_expected_gain(g, traj, mode)
        for e in range(g.n_edges):
            assert fast.values[e] == pytest.approx(slow[e], abs=1e-9)


def test_posterior_matches_likelihood_enumeration(tutorial):
    # the scalar-DP oracle agrees with raw path enumeration on a mask
    # sample, and the production posterior agrees with the full oracle
    g, traj = tutorial.graph, tutorial.trajectory
    fast_like = oracles._fast_mask_likelihoods(g, traj, "inverse_planning")
    brute = oracles.brute_posterior(g, traj, "inverse_planning")
    post = posterior(g, traj, "inverse_planning")
    for m in range(0, 1 << g.n_edges, 997):
        raw = oracles.mask_likelihood(g, traj, "inverse_planning", m)
        assert fast_like[m] == pytest.approx(raw, abs=1e-12)
        assert post.weight(m) == pytest.approx(brute[m], abs=1e-12)


def test_heuristic_features_fixture(tutorial):
    g = tutorial.graph
    f = heuristic_features(g)
    assert f.reward_feature[g.edge_index[(5, 7)]] == 4   # 1 + 3
    assert f.reward_feature[g.edge_index[(0, 1)]] == 2   # 0 + 2
    assert f.depth_feature[g.edge_index[(5, 7)]] == 3
    assert f.depth_feature[g.edge_index[(0, 1)]] == 1


def test_utilities_dispatch(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    pa = utilities(g, traj, "path_average")
    assert pa.values[g.edge_index[(5, 9)]] == pytest.approx(2.0)  # mean of 3,2,1
    qv = utilities(g, traj, "q_value")
    assert qv.values[g.edge_index[(0, 1)]] == 6
    rd = utilities(g, traj, "reward_depth", weights=(1.0, 0.0))
    rw = utilities(g, traj, "reward")
    assert rd.values == pytest.approx(rw.values)
    with pytest.raises(ValueError):
        utilities(g, traj, "reward_depth")        # weights required
    with pytest.raises(ValueError):
        utilities(g, traj, "nonsense")
    with pytest.raises(ValueError):
        utilities(g, traj, "reward", weights=(1, 2))


def test_model_aliases():
    assert normalize_model("bot") == "bayes_optimal"
    assert normalize_model("NoIP") == "feasibility"
    assert normalize_model("prior") == "prior_only"
    assert normalize_model("qvalue") == "q_value"
    assert normalize_model("path_averaged") == "path_average"


def test_choice_distribution_basics():
    u = UtilityVector("reward", "g", {0: 1.0, 1: 0.0})
    p = choice_distribution(u, 1.0)
    assert p[0] == pytest.approx(1.0 / (1.0 + math.exp(-1.0)))
    uni = choice_distribution(u, 0.0)
    assert uni == {0: 0.5, 1: 0.5}
    hot = choice_distribution(u, 200.0)
    assert hot[0] > 1 - 1e-12
    arg = choice_distribution(u, math.inf)
    assert arg == {0: 1.0, 1: 0.0}
    with pytest.raises(ValueError):
        choice_distribution(u, -1.0)


def test_choice_distribution_shift_invariant_and_normalized(random_stimuli):
    for stim in random_stimuli[:5]:
        u = utilities(stim.graph, stim.trajectory, "bayes_optimal")
        p = choice_distribution(u, 2.5)
        assert abs(sum(p.values()) - 1.0) <= 1e-12
        shifted = UtilityVector(u.model, u.graph_id,
                                {e: x + 7.25 for e, x in u.values.items()})
        q = choice_distribution(shifted, 2.5)
        for e in p:
            assert p[e] == pytest.approx(q[e], abs=1e-12)


def test_softmax_argmax_matches_utility_argmax(random_stimuli):
    for stim in random_stimuli[:5]:
        u = utilities(stim.graph, stim.trajectory, "bayes_optimal")
        if len(u.argmax_indices()) != 1:
            continue
        p = choice_distribution(u, 4.0)
        assert max(p, key=p.get) == u.argmax_indices()[0]


def test_unknown_edge_marginals(tutorial):
    g, traj = tutorial.graph, tutorial.trajectory
    # under feasibility every non-observed edge is a coin flip
    marg = unknown_edge_marginals(g, traj, "feasibility")
    for e in range(g.n_edges):
        if e in traj.edge_indices:
            assert marg[e] == 0.0
        else:
            assert marg[e] == pytest.approx(0.5)
    # default mode agrees with the brute force and complements known mass
    marg_ip = unknown_edge_marginals(g, traj)
    brute = oracles.brute_unknown_marginals(g, traj)
    post = teachers.posterior(g, traj, "inverse_planning")
    for e in range(g.n_edges):
        assert marg_ip[e] == pytest.approx(brute[e], abs=1e-9)
        known_mass = sum(w for m, w in post.items() if m >> e & 1)
        assert marg_ip[e] + known_mass == pytest.approx(1.0, abs=1e-9)


def test_utilities_flip_equivariant(random_stimuli):
    for stim in random_stimuli[:6]:
        g, traj = stim.graph, stim.trajectory
        f = flip(g)
        ftraj = flip_trajectory(g, traj, f)
        from graphteach.graphs import flip_pairs
        mirror = dict(zip(g.edges, flip_pairs(g, g.edges)))
        for model in ("bayes_optimal", "feasibility", "prior_only", "reward",
                      "depth", "q_value", "path_average"):
            u = utilities(g, traj, model)
            uf = utilities(f, ftraj, model)
            for e, pair in enumerate(g.edges):
                fe = f.edge_index[mirror[pair]]
                assert u.values[e] == pytest.approx(uf.values[fe], abs=1e-9), model


def test_optimized_matches_naive_on_random_graphs(random_stimuli):
    for stim in random_stimuli[:3]:
        fast = bot_utilities(stim.graph, stim.trajectory, "inverse_planning")
        slow = oracles.brute_expected_gain(stim.graph, stim.trajectory,
                                           "inverse_planning")
        for e in range(stim.graph.n_edges):
            assert fast.values[e] == pytest.approx(slow[e], abs=1e-9)
