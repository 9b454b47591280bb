"""Scores and figure-level statistics.

The central metric is the teaching score: the expected-gain utility of the
chosen edge divided by the trial's maximum, in [0, 1]. On top of it sit the
figure-style aggregates: per-trial learning curves, per-graph performance
profiles with Pearson correlations, per-subject score distributions,
best-fit model fractions, scaffold-selection rank curves, and condition
summaries with normal-approximation CIs.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import fitting, teachers
from .graphs import GraphError, TaskGraph, Trajectory

DEFAULT_FIT_MODELS = ("bayes_optimal", "feasibility", "prior_only", "reward",
                      "depth", "reward_depth", "q_value", "path_average")


def teaching_score(graph: TaskGraph, traj: Trajectory, chosen_edge,
                   utility_vector=None) -> float:
    """Expected-gain utility of the chosen edge over the trial maximum.

    Trials where no edge helps at all (max utility 0) score 1.0: every
    choice is vacuously best. Generated stimulus pools exclude such trials.
    """
    chosen_edge = (int(chosen_edge[0]), int(chosen_edge[1]))
    if chosen_edge not in graph.edge_index:
        raise GraphError(f"chosen edge {chosen_edge} not in graph {graph.graph_id!r}")
    u = utility_vector or teachers.utilities(graph, traj, "bayes_optimal")
    top = u.max()
    if top <= 0:
        return 1.0
    return u.values[graph.edge_index[chosen_edge]] / top


@dataclass(frozen=True)
class ScoreRow:
    subject_id: str
    trial_index: int
    graph_id: str
    score: float
    condition: dict = field(default_factory=dict)


def score_series(datasets) -> list[ScoreRow]:
    """Teaching score of every usable trial across subjects."""
    rows = []
    for ds in datasets:
        for t in ds.trials:
            if t.missing:
                continue
            s = teaching_score(t.stimulus.graph, t.stimulus.trajectory, t.chosen_edge)
            rows.append(ScoreRow(ds.subject_id, t.trial_index,
                                 t.stimulus.graph.graph_id, s, t.condition))
    return rows


def _pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0:
        return 0.0
    return float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))


def learning_curve(series) -> tuple[dict[int, float], float]:
    """Mean score per trial index, plus the Pearson r between trial number
    and score over all (trial, score) points."""
    if len(series) < 2:
        raise ValueError("learning curve needs at least two scored trials")
    by_trial: dict[int, list] = {}
    for row in series:
        by_trial.setdefault(row.trial_index, []).append(row.score)
    means = {t: float(np.mean(v)) for t, v in sorted(by_trial.items())}
    r = _pearson([row.trial_index for row in series], [row.score for row in series])
    return means, r


def graphwise_profile(series) -> dict[str, float]:
    """Mean score per graph id; flips share their original's id and pool."""
    by_graph: dict[str, list] = {}
    for row in series:
        by_graph.setdefault(row.graph_id, []).append(row.score)
    return {g: float(np.mean(v)) for g, v in sorted(by_graph.items())}


def correlate(profile_a: dict, profile_b: dict) -> tuple[float, float]:
    """Pearson r between two graph-wise profiles over their shared ids, and
    its two-sided p-value from the Fisher z-transform
    (z = atanh(r) * sqrt(n-3), normal reference)."""
    ids = sorted(set(profile_a) & set(profile_b))
    n = len(ids)
    if n < 4:
        raise ValueError(f"need at least 4 shared graph ids, got {n}")
    r = _pearson([profile_a[g] for g in ids], [profile_b[g] for g in ids])
    if abs(r) >= 1.0:
        return r, 0.0
    z = math.atanh(r) * math.sqrt(n - 3)
    p = 2.0 * float(stats.norm.sf(abs(z)))
    return r, p


def scaffold_selection_curve(datasets, ordering: str) -> np.ndarray:
    """Per-rank probability that an edge was among the three selected.

    Ranks order the trial's edges ascending by the chosen criterion
    (``bot_unknown``: inferred probability the learner lacks the edge;
    ``reward_rank``: endpoint-reward sum), ties broken by canonical edge
    index, so the rightmost ranks are the instruction-consistent picks.
    Trials without a selection are excluded from the denominators.
    """
    if ordering not in ("bot_unknown", "reward_rank"):
        raise ValueError(f"unknown ordering {ordering!r}")
    counts = None
    n_trials = 0
    for ds in datasets:
        for t in ds.trials:
            if not t.scaffold_selection:
                continue
            g = t.stimulus.graph
            if ordering == "bot_unknown":
                key = teachers.unknown_edge_marginals(g, t.stimulus.trajectory)
            else:
                key = teachers.heuristic_features(g).reward_feature
            order = sorted(range(g.n_edges), key=lambda e: (key[e], e))
            if counts is None:
                counts = np.zeros(g.n_edges)
            elif len(counts) != g.n_edges:
                raise ValueError("scaffold curve needs a uniform candidate count")
            selected = {g.edge_index[p] for p in t.scaffold_selection
                        if p in g.edge_index}
            for rank, e in enumerate(order):
                if e in selected:
                    counts[rank] += 1
            n_trials += 1
    if not n_trials:
        raise ValueError("no scaffold selections in the datasets")
    return counts / n_trials


@dataclass(frozen=True)
class ConditionCell:
    scaffolding: str
    training: str
    phase: str
    mean: float
    ci_halfwidth: float | None  # None when a single subject makes it undefined
    n_subjects: int


def condition_summary(datasets) -> list[ConditionCell]:
    """Mean teaching score with a 95% CI over subject means, per
    (scaffolding, training congruency, phase) cell."""
    cells: dict[tuple, dict[str, list]] = {}
    for ds in datasets:
        scaff = ds.condition.get("scaffolding", "none")
        training = ds.condition.get("training", "na")
        for t in ds.trials:
            if t.missing:
                continue
            s = teaching_score(t.stimulus.graph, t.stimulus.trajectory, t.chosen_edge)
            key = (scaff, training, t.phase)
            cells.setdefault(key, {}).setdefault(ds.subject_id, []).append(s)
    out = []
    for (scaff, training, phase), per_subject in sorted(cells.items()):
        means = np.array([np.mean(v) for v in per_subject.values()])
        n = len(means)
        ci = None
        if n > 1:
            ci = 1.96 * float(means.std(ddof=1)) / math.sqrt(n)
        out.append(ConditionCell(scaff, training, phase, float(means.mean()), ci, n))
    return out


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def write_report(datasets, report_dir, fit_models=DEFAULT_FIT_MODELS,
                 fit_phase: str | None = None) -> dict:
    """Write the plot-ready CSV tables and a JSON summary; returns the
    summary dict."""
    os.makedirs(report_dir, exist_ok=True)
    series = score_series(datasets)
    summary: dict = {"n_subjects": len(datasets),
                     "n_scored_trials": len(series)}

    if len(series) >= 2:
        means, r = learning_curve(series)
        _write_csv(os.path.join(report_dir, "learning_curve.csv"),
                   ["trial_index", "mean_score"], sorted(means.items()))
        summary["trial_score_correlation"] = r

    profile = graphwise_profile(series)
    _write_csv(os.path.join(report_dir, "graphwise_profile.csv"),
               ["graph_id", "mean_score"], sorted(profile.items()))

    per_subject = []
    for ds in datasets:
        scores = [row.score for row in series if row.subject_id == ds.subject_id]
        if scores:
            per_subject.append((ds.subject_id, ds.provenance,
                                float(np.mean(scores)), len(scores)))
    _write_csv(os.path.join(report_dir, "score_distribution.csv"),
               ["subject_id", "provenance", "mean_score", "n_trials"], per_subject)
    summary["mean_score"] = (float(np.mean([m for _, _, m, _ in per_subject]))
                             if per_subject else None)

    if fit_models:
        fit_rows, best_counts, deltas = [], {}, []
        for ds in datasets:
            if not ds.usable(fit_phase):
                continue
            comp = fitting.compare(ds, fit_models, phase=fit_phase)
            for r_ in comp.results:
                fit_rows.append((ds.subject_id, r_.model, json.dumps(r_.params),
                                 r_.log_likelihood, r_.n_trials, r_.k_params,
                                 r_.bic, r_.model == comp.best_model))
            best_counts[comp.best_model] = best_counts.get(comp.best_model, 0) + 1
            if comp.delta_bic is not None:
                deltas.append((ds.subject_id, comp.delta_bic))
        _write_csv(os.path.join(report_dir, "model_fits.csv"),
                   ["subject_id", "model", "params", "log_likelihood",
                    "n_trials", "k_params", "bic", "best"], fit_rows)
        total = sum(best_counts.values())
        _write_csv(os.path.join(report_dir, "best_fit_fractions.csv"),
                   ["model", "count", "fraction"],
                   [(m, c, c / total) for m, c in sorted(best_counts.items())])
        if deltas:
            _write_csv(os.path.join(report_dir, "delta_bic.csv"),
                       ["subject_id", "delta_bic"], deltas)
            summary["median_delta_bic"] = float(np.median([d for _, d in deltas]))
        summary["best_fit_counts"] = best_counts

    for ordering, scaff in (("bot_unknown", "inference"), ("reward_rank", "reward")):
        subset = [ds for ds in datasets
                  if ds.condition.get("scaffolding") == scaff]
        if any(t.scaffold_selection for ds in subset for t in ds.trials):
            curve = scaffold_selection_curve(subset, ordering)
            _write_csv(os.path.join(report_dir, f"scaffold_selection_{scaff}.csv"),
                       ["rank", "p_selected"], list(enumerate(curve)))

    cells = condition_summary(datasets)
    _write_csv(os.path.join(report_dir, "condition_summary.csv"),
               ["scaffolding", "training", "phase", "mean_score",
                "ci95_halfwidth", "n_subjects"],
               [(c.scaffolding, c.training, c.phase, c.mean,
                 "" if c.ci_halfwidth is None else c.ci_halfwidth, c.n_subjects)
                for c in cells])

    with open(os.path.join(report_dir, "summary.json"), "w") as f:
        json.dump(summary, f, indent=1, sort_keys=True)
    return summary
