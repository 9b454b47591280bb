"""Graph teaching task: environments, teacher models, fitting, harnesses.

Layered reward-annotated DAGs where a learner with partial edge knowledge
walks an optimal path and a teacher, seeing only that path, reveals one
edge. The package implements the task, a family of cognitive teacher
models (Bayesian expected-gain variants, feature heuristics, and
non-mentalizing utilities), softmax likelihood fitting with BIC comparison,
stimulus/experiment builders, a chat-model harness, and an HTTP service for
interactive play.
"""

from .graphs import (EdgeSet, GraphError, TaskGraph, Trajectory, flip,
                     make_graph, trajectory_return, validate)
from .planning import (NoCompletePathError, complete_paths_through,
                       optimal_trajectories, q_values, value)
from .teachers import (MODELS, FeatureVector, Posterior, UtilityVector,
                       bot_utilities, choice_distribution, heuristic_features,
                       posterior, unknown_edge_marginals, utilities)
from .stimuli import (TrialStimulus, build_baseline_set, build_scaffold_set,
                      generate_graph, generate_pool, sample_stimulus,
                      screen_congruency, tutorial_example)
from .fitting import (FitResult, SubjectDataset, TrialRecord, compare,
                      fit_reward_depth, fit_softmax, simulate_subject)
from .analysis import (condition_summary, correlate, graphwise_profile,
                       learning_curve, scaffold_selection_curve, score_series,
                       teaching_score)

__all__ = [
    "EdgeSet", "GraphError", "TaskGraph", "Trajectory", "flip", "make_graph",
    "trajectory_return", "validate",
    "NoCompletePathError", "complete_paths_through", "optimal_trajectories",
    "q_values", "value",
    "MODELS", "FeatureVector", "Posterior", "UtilityVector", "bot_utilities",
    "choice_distribution", "heuristic_features", "posterior",
    "unknown_edge_marginals", "utilities",
    "TrialStimulus", "build_baseline_set", "build_scaffold_set",
    "generate_graph", "generate_pool", "sample_stimulus", "screen_congruency",
    "tutorial_example",
    "FitResult", "SubjectDataset", "TrialRecord", "compare",
    "fit_reward_depth", "fit_softmax", "simulate_subject",
    "condition_summary", "correlate", "graphwise_profile", "learning_curve",
    "scaffold_selection_curve", "score_series", "teaching_score",
]

__version__ = "0.1.0"
