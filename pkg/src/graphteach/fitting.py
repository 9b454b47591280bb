"""Per-subject choice datasets, maximum-likelihood fits, and BIC comparison.

Every teacher (simulated model, chat model, or human) produces a
SubjectDataset of trial records. Single-utility models are fit by a 1-D
softmax-temperature search; the two-feature model is a conditional logit
whose weights absorb the temperature. Models are compared per subject with
BIC = k*ln(n) - 2*logL over the usable (non-missing) trials.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import teachers
from .graphs import GraphError
from .stimuli import TrialStimulus

BETA_MAX = 50.0
BETA_GRID_SIZE = 200
BETA_TOL = 1e-6
WEIGHT_BOUND = 50.0
PROVENANCES = ("llm", "human", "simulated")


@dataclass(frozen=True)
class TrialRecord:
    """One teaching decision with its stimulus and condition tags."""

    trial_index: int
    stimulus: TrialStimulus
    chosen_edge: tuple[int, int] | None
    scaffold_selection: tuple[tuple[int, int], ...] | None = None
    condition: dict = field(default_factory=dict)
    raw_text: str | None = None

    @property
    def missing(self) -> bool:
        return self.chosen_edge is None

    @property
    def phase(self) -> str:
        return self.condition.get("phase", self.stimulus.role)

    def chosen_index(self) -> int:
        return self.stimulus.graph.edge_index[self.chosen_edge]

    def to_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "stimulus": self.stimulus.to_dict(),
            "chosen_edge": list(self.chosen_edge) if self.chosen_edge else None,
            "scaffold_selection": ([list(p) for p in self.scaffold_selection]
                                   if self.scaffold_selection else None),
            "condition": self.condition,
            "raw_text": self.raw_text,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        stim = TrialStimulus.from_dict(d["stimulus"])
        chosen = d.get("chosen_edge")
        scaffold = d.get("scaffold_selection")
        return cls(
            trial_index=int(d["trial_index"]),
            stimulus=stim,
            chosen_edge=tuple(chosen) if chosen else None,
            scaffold_selection=(tuple(tuple(p) for p in scaffold) if scaffold else None),
            condition=dict(d.get("condition", {})),
            raw_text=d.get("raw_text"),
        )


def make_record(trial_index, stimulus, chosen_edge, scaffold_selection=None,
                condition=None, raw_text=None) -> TrialRecord:
    """Build a record, demoting out-of-graph choices to missing."""
    cond = dict(condition or {})
    cond.setdefault("phase", stimulus.role)
    if chosen_edge is not None:
        chosen_edge = (int(chosen_edge[0]), int(chosen_edge[1]))
        if chosen_edge not in stimulus.graph.edge_index:
            cond["invalid_choice"] = list(chosen_edge)
            chosen_edge = None
    if scaffold_selection is not None:
        scaffold_selection = tuple((int(a), int(b)) for a, b in scaffold_selection)
    return TrialRecord(trial_index, stimulus, chosen_edge, scaffold_selection,
                       cond, raw_text)


@dataclass
class SubjectDataset:
    """Ordered trial records of one simulated teacher."""

    subject_id: str
    provenance: str
    trials: list[TrialRecord]
    condition: dict = field(default_factory=dict)

    def usable(self, phase: str | None = None) -> list[TrialRecord]:
        """Trials that enter likelihoods: non-missing, optionally one phase."""
        out = [t for t in self.trials if not t.missing]
        if phase is not None:
            out = [t for t in out if t.phase == phase]
        return out

    def to_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "provenance": self.provenance,
            "condition": self.condition,
            "trials": [t.to_dict() for t in self.trials],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SubjectDataset":
        return cls(
            subject_id=d["subject_id"],
            provenance=d["provenance"],
            trials=[TrialRecord.from_dict(t) for t in d["trials"]],
            condition=dict(d.get("condition", {})),
        )

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def save_datasets(datasets, path):
    with open(path, "w") as f:
        json.dump([d.to_dict() for d in datasets], f, indent=1)


def load_datasets(path) -> list[SubjectDataset]:
    """Read a JSON array of datasets, or JSONL with one dataset per line."""
    with open(path) as f:
        text = f.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        data = json.loads(text)
    else:
        data = [json.loads(line) for line in text.splitlines() if line.strip()]
    return [SubjectDataset.from_dict(d) for d in data]


@dataclass(frozen=True)
class FitResult:
    subject_id: str
    model: str
    params: dict
    log_likelihood: float
    n_trials: int
    k_params: int
    bic: float
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "model": self.model,
            "params": self.params,
            "log_likelihood": self.log_likelihood,
            "n_trials": self.n_trials,
            "k_params": self.k_params,
            "bic": self.bic,
            "flags": list(self.flags),
        }


def _bic(k: int, n: int, loglik: float) -> float:
    return k * math.log(n) - 2.0 * loglik


def trial_utilities(trials, model: str, weights=None) -> list[np.ndarray]:
    """Utility array (ordered by canonical edge index) for every trial."""
    model = teachers.normalize_model(model)
    return [teachers.utilities(t.stimulus.graph, t.stimulus.trajectory,
                               model, weights).as_array()
            for t in trials]


def uniform_loglik(trials) -> float:
    """Log-likelihood floor at beta=0: uniform over each candidate set."""
    return -sum(math.log(t.stimulus.graph.n_edges) for t in trials)


def softmax_loglik(utility_arrays, chosen, beta: float) -> float:
    """Sum over trials of log softmax probability of the chosen edge."""
    total = 0.0
    for u, c in zip(utility_arrays, chosen):
        z = beta * u
        m = z.max()
        total += z[c] - m - math.log(np.exp(z - m).sum())
    return float(total)


def _golden_section(f, lo, hi, tol=BETA_TOL):
    """Maximize a unimodal f on [lo, hi] to within tol."""
    inv_phi = (math.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
    x = (a + b) / 2
    return x, f(x)


def fit_softmax(dataset: SubjectDataset, model: str, phase: str | None = None) -> FitResult:
    """MLE of the inverse temperature for one single-utility model.

    Global 1-D search: beta=0 plus a 200-point log grid on [1e-3, 50],
    then golden-section refinement around the best grid point.
    """
    model = teachers.normalize_model(model)
    if model == "reward_depth":
        raise ValueError("reward_depth is fit by fit_reward_depth")
    trials = dataset.usable(phase)
    if not trials:
        raise GraphError(f"no usable trials for subject {dataset.subject_id!r}")
    utils = trial_utilities(trials, model)
    chosen = [t.chosen_index() for t in trials]

    # evaluate the whole grid in one batch per candidate width
    grid = np.concatenate([[0.0], np.geomspace(1e-3, BETA_MAX, BETA_GRID_SIZE)])
    scores = np.zeros(len(grid))
    for u, c in zip(utils, chosen):
        z = np.outer(grid, u)
        m = z.max(axis=1)
        scores += z[:, c] - m - np.log(np.exp(z - m[:, None]).sum(axis=1))

    if np.ptp(scores) == 0:  # utilities constant: every beta is the floor
        n = len(trials)
        return FitResult(dataset.subject_id, model, {"beta": 0.0},
                         float(scores[0]), n, 1, _bic(1, n, scores[0]),
                         ("flat_likelihood",))
    # ties (e.g. the exp-underflow plateau of perfectly predicted data)
    # resolve toward the largest beta, so argmax-consistent choices report
    # the boundary
    best = len(scores) - 1 - int(np.argmax(scores[::-1]))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    if hi > lo:
        beta, loglik = _golden_section(
            lambda b: softmax_loglik(utils, chosen, b), lo, hi)
    else:
        beta, loglik = grid[best], scores[best]
    if scores[best] >= loglik:  # keep the grid point if refinement lost it
        beta, loglik = grid[best], float(scores[best])

    flags = ()
    if beta >= BETA_MAX - 10 * BETA_TOL:
        flags = ("beta_at_bound",)
    n = len(trials)
    return FitResult(dataset.subject_id, model, {"beta": float(beta)},
                     float(loglik), n, 1, _bic(1, n, loglik), flags)


def conditional_logit_nll(features, chosen, w) -> tuple[float, np.ndarray]:
    """Negative log-likelihood and gradient of the two-feature logit.

    ``features``: list of (n_candidates, 2) arrays; ``chosen``: per-trial
    index; ``w``: weight vector (w_reward, w_depth).
    """
    w = np.asarray(w, dtype=float)
    nll = 0.0
    grad = np.zeros_like(w)
    for f, c in zip(features, chosen):
        z = f @ w
        m = z.max()
        ez = np.exp(z - m)
        denom = ez.sum()
        nll -= z[c] - m - math.log(denom)
        p = ez / denom
        grad -= f[c] - p @ f
    return float(nll), grad


def trial_features(trials) -> list[np.ndarray]:
    out = []
    for t in trials:
        fv = teachers.heuristic_features(t.stimulus.graph)
        n = t.stimulus.graph.n_edges
        out.append(np.array([[fv.reward_feature[e], fv.depth_feature[e]]
                             for e in range(n)], dtype=float))
    return out


def fit_reward_depth(dataset: SubjectDataset, phase: str | None = None) -> FitResult:
    """Conditional-logit MLE of the linear reward+depth weighting (k=2).

    The objective is concave; BFGS with the analytic gradient converges to
    gradient norm < 1e-8. Perfect separation drives weights to the bound,
    which is capped at |w| <= 50 and flagged.
    """
    trials = dataset.usable(phase)
    if not trials:
        raise GraphError(f"no usable trials for subject {dataset.subject_id!r}")
    feats = trial_features(trials)
    chosen = [t.chosen_index() for t in trials]
    n = len(trials)

    degenerate = all(np.ptp(f, axis=0).max() == 0 for f in feats)
    if degenerate:
        loglik = uniform_loglik(trials)
        return FitResult(dataset.subject_id, "reward_depth",
                         {"w_reward": 0.0, "w_depth": 0.0},
                         loglik, n, 2, _bic(2, n, loglik), ("degenerate_features",))

    res = minimize(lambda w: conditional_logit_nll(feats, chosen, w),
                   x0=np.zeros(2), jac=True, method="BFGS",
                   options={"gtol": 1e-8, "maxiter": 500})
    w = res.x
    flags = []
    if np.abs(w).max() > WEIGHT_BOUND:
        w = np.clip(w, -WEIGHT_BOUND, WEIGHT_BOUND)
        flags.append("weight_bound")
    elif not res.success:
        flags.append("no_converge")
    nll, _ = conditional_logit_nll(feats, chosen, w)
    loglik = -nll
    return FitResult(dataset.subject_id, "reward_depth",
                     {"w_reward": float(w[0]), "w_depth": float(w[1])},
                     loglik, n, 2, _bic(2, n, loglik), tuple(flags))


@dataclass
class ModelComparison:
    results: list[FitResult]
    best_model: str
    tie: bool
    delta_bic: float | None  # BIC(reward) - BIC(bayes_optimal) when both fit


def compare(dataset: SubjectDataset, models, phase: str | None = None) -> ModelComparison:
    """Fit every model and rank by BIC; ties break by the given order."""
    models = [teachers.normalize_model(m) for m in models]
    if len(models) < 2:
        raise ValueError("compare needs at least two models")
    results = []
    for m in models:
        if m == "reward_depth":
            results.append(fit_reward_depth(dataset, phase))
        else:
            results.append(fit_softmax(dataset, m, phase))
    best = min(results, key=lambda r: r.bic)
    tie = sum(1 for r in results if r.bic == best.bic) > 1
    by_model = {r.model: r for r in results}
    delta = None
    if "reward" in by_model and "bayes_optimal" in by_model:
        delta = by_model["reward"].bic - by_model["bayes_optimal"].bic
    return ModelComparison(results, best.model, tie, delta)


def simulate_subject(stimulus_sequence, model: str, params: dict, seed: int,
                     subject_id: str | None = None, condition: dict | None = None) -> SubjectDataset:
    """Sample one synthetic teacher through a trial sequence.

    params carries ``beta`` (math.inf for argmax) for single-utility
    models, or ``w_reward``/``w_depth`` for the two-feature model.
    """
    model = teachers.normalize_model(model)
    rng = np.random.default_rng(seed)
    records = []
    for i, stim in enumerate(stimulus_sequence):
        if model == "reward_depth":
            u = teachers.utilities(stim.graph, stim.trajectory, model,
                                   weights=(params["w_reward"], params["w_depth"]))
            beta = float(params.get("beta", 1.0))
        else:
            u = teachers.utilities(stim.graph, stim.trajectory, model)
            beta = float(params["beta"])
        dist = teachers.choice_distribution(u, beta)
        edges = sorted(dist)
        probs = np.array([dist[e] for e in edges])
        pick = edges[rng.choice(len(edges), p=probs / probs.sum())]
        records.append(make_record(i, stim, stim.graph.edges[pick],
                                   condition=dict(condition or {})))
    sid = subject_id or f"{model}-seed{seed}"
    return SubjectDataset(sid, "simulated", records, dict(condition or {}))


def write_fit_results(results, path):
    """JSONL, one record per (subject, model)."""
    with open(path, "w") as f:
        for r in results:
            f.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
