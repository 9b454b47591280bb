"""HTTP session service for interactive (human) teachers.

Serves trials one at a time and records choices, never revealing what the
learner knows, any utility, or any score. Sessions persist as append-only
JSONL files (one per session) and survive restarts. Completed sessions
export in the exact dataset format the fitting and analysis modules
consume.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import stimuli as stim_mod
from .fitting import SubjectDataset, make_record
from .graphs import GraphError
from .stimuli import TrialStimulus

EXPERIMENTS = ("baseline", "scaffold")
DEFAULT_POOL_SEED = 7201


@dataclass
class StimulusLibrary:
    """Pools the service builds sequences from."""

    baseline: list[TrialStimulus]
    train_congruent: list[TrialStimulus]
    train_incongruent: list[TrialStimulus]
    test: list[TrialStimulus]

    @classmethod
    def load_or_generate(cls, pool_dir, seed=DEFAULT_POOL_SEED) -> "StimulusLibrary":
        """Read pool files from ``pool_dir``; any missing pool is generated
        deterministically from ``seed`` and written back for next boot."""
        os.makedirs(pool_dir, exist_ok=True)
        specs = {
            "baseline": ("baseline.json", lambda: stim_mod.generate_pool(20, seed)),
            "train_congruent": ("train_congruent.json",
                                lambda: stim_mod.generate_pool(10, seed + 1, "congruent")),
            "train_incongruent": ("train_incongruent.json",
                                  lambda: stim_mod.generate_pool(10, seed + 2, "incongruent")),
            "test": ("test.json",
                     lambda: stim_mod.generate_pool(5, seed + 3, "incongruent")),
        }
        pools = {}
        for key, (fname, gen) in specs.items():
            path = os.path.join(pool_dir, fname)
            if os.path.exists(path):
                pools[key] = stim_mod.load_stimuli(path)
            else:
                pools[key] = gen()
                stim_mod.save_stimuli(pools[key], path)
        return cls(**pools)

    def build_sequence(self, experiment, condition, seed) -> list[TrialStimulus]:
        if experiment == "baseline":
            return stim_mod.build_baseline_set(self.baseline, seed)
        if experiment == "scaffold":
            training = condition.get("training")
            pool = {"congruent": self.train_congruent,
                    "incongruent": self.train_incongruent}.get(training)
            if pool is None:
                raise GraphError(f"training condition must be congruent or "
                                 f"incongruent, got {training!r}")
            return stim_mod.build_scaffold_set(pool, self.test, seed)
        raise GraphError(f"unknown experiment {experiment!r}")


@dataclass
class Session:
    session_id: str
    participant: str
    experiment: str
    condition: dict
    sequence: list[TrialStimulus]
    cursor: int = 0
    choices: list[dict] = field(default_factory=list)
    state: str = "active"

    @property
    def n_trials(self) -> int:
        return len(self.sequence)

    def scaffold_kind(self, n: int) -> str | None:
        kind = self.condition.get("scaffolding", "none")
        if kind != "none" and self.sequence[n].role == "train":
            return kind
        return None

    def trial_payload(self, n: int) -> dict:
        """What the participant may see: the environment and the observed
        trajectory only. Never the learner's knowledge or any utility."""
        stim = self.sequence[n]
        return {
            "session_id": self.session_id,
            "n": n,
            "n_trials": self.n_trials,
            "phase": stim.role,
            "scaffold_kind": self.scaffold_kind(n),
            "graph": stim.graph.to_dict(),
            "trajectory": [list(p) for p in stim.trajectory.pairs(stim.graph)],
        }


class SessionStore:
    """Disk-backed session registry; one writer lock per session."""

    def __init__(self, data_dir, library: StimulusLibrary):
        self.data_dir = data_dir
        self.sessions_dir = os.path.join(data_dir, "sessions")
        os.makedirs(self.sessions_dir, exist_ok=True)
        self.library = library
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}
        self._create_lock = threading.Lock()
        self._reload()

    def _path(self, sid):
        return os.path.join(self.sessions_dir, f"{sid}.jsonl")

    def _reload(self):
        for fname in sorted(os.listdir(self.sessions_dir)):
            if not fname.endswith(".jsonl"):
                continue
            with open(os.path.join(self.sessions_dir, fname)) as f:
                lines = [json.loads(line) for line in f if line.strip()]
            if not lines or lines[0].get("type") != "session":
                continue
            head = lines[0]
            sess = Session(
                session_id=head["session_id"],
                participant=head.get("participant", ""),
                experiment=head["experiment"],
                condition=head.get("condition", {}),
                sequence=[TrialStimulus.from_dict(d) for d in head["sequence"]],
            )
            for rec in lines[1:]:
                if rec.get("type") == "choice":
                    sess.choices.append(rec)
                    sess.cursor = rec["n"] + 1
            if sess.cursor >= sess.n_trials:
                sess.state = "complete"
            self.sessions[sess.session_id] = sess
            self.locks[sess.session_id] = threading.Lock()

    def _append(self, sid, record):
        with open(self._path(sid), "a") as f:
            f.write(json.dumps(record, sort_keys=True) + "\n")

    def create(self, experiment, condition, seed, participant="") -> Session:
        sequence = self.library.build_sequence(experiment, condition or {}, seed)
        sid = uuid.uuid4().hex
        sess = Session(sid, participant, experiment, dict(condition or {}), sequence)
        with self._create_lock:
            self.sessions[sid] = sess
            self.locks[sid] = threading.Lock()
        self._append(sid, {
            "type": "session", "session_id": sid, "participant": participant,
            "experiment": experiment, "condition": sess.condition, "seed": seed,
            "sequence": [s.to_dict() for s in sequence],
        })
        return sess

    def get(self, sid) -> Session:
        sess = self.sessions.get(sid)
        if sess is None:
            raise KeyError(sid)
        return sess

    def post_choice(self, sid, n, edge, scaffold) -> dict:
        sess = self.get(sid)
        with self.locks[sid]:
            if n < sess.cursor:
                prior = sess.choices[n]
                if prior["edge"] == list(edge) and prior.get("scaffold") == scaffold:
                    return {"ok": True, "next": prior["next"]}  # idempotent replay
                raise ValueError(f"trial {n} already answered differently")
            if n != sess.cursor:
                raise ValueError(f"trial {n} is not the current trial ({sess.cursor})")
            if sess.state != "active":
                raise ValueError("session is not active")
            stim = sess.sequence[n]
            edge = (int(edge[0]), int(edge[1]))
            if edge not in stim.graph.edge_index:
                raise GraphError(f"edge {edge} not in this trial's graph")
            needs_scaffold = sess.scaffold_kind(n) is not None
            if needs_scaffold:
                if not scaffold or len(scaffold) != 3:
                    raise GraphError("this trial requires exactly 3 scaffold edges")
                for pair in scaffold:
                    if (int(pair[0]), int(pair[1])) not in stim.graph.edge_index:
                        raise GraphError(f"scaffold edge {pair} not in graph")
            elif scaffold:
                raise GraphError("this trial takes no scaffold selection")
            nxt = n + 1 if n + 1 < sess.n_trials else None
            rec = {"type": "choice", "n": n, "edge": list(edge),
                   "scaffold": [list(p) for p in scaffold] if scaffold else None,
                   "next": nxt}
            self._append(sid, rec)
            sess.choices.append(rec)
            sess.cursor = n + 1
            if nxt is None:
                sess.state = "complete"
            return {"ok": True, "next": nxt}

    def export(self, state="complete", experiment=None) -> list[SubjectDataset]:
        out = []
        for sess in self.sessions.values():
            if state and sess.state != state:
                continue
            if experiment and sess.experiment != experiment:
                continue
            records = []
            for rec in sess.choices:
                stim = sess.sequence[rec["n"]]
                cond = dict(sess.condition)
                cond["experiment"] = sess.experiment
                cond["phase"] = stim.role
                records.append(make_record(
                    rec["n"], stim, tuple(rec["edge"]),
                    scaffold_selection=([tuple(p) for p in rec["scaffold"]]
                                        if rec.get("scaffold") else None),
                    condition=cond))
            ds_cond = dict(sess.condition)
            ds_cond["experiment"] = sess.experiment
            out.append(SubjectDataset(sess.session_id, "human", records, ds_cond))
        return out


class CreateSessionBody(BaseModel):
    experiment: str
    condition: dict | None = None
    seed: int
    participant: str = ""


class ChoiceBody(BaseModel):
    edge: list[int]
    scaffold: list[list[int]] | None = None


def create_app(data_dir, library: StimulusLibrary | None = None,
               static_dir=None) -> FastAPI:
    library = library or StimulusLibrary.load_or_generate(os.path.join(data_dir, "pools"))
    store = SessionStore(data_dir, library)
    app = FastAPI(title="graphteach session service")
    app.state.store = store

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if body.experiment not in EXPERIMENTS:
            raise HTTPException(422, f"experiment must be one of {EXPERIMENTS}")
        try:
            sess = store.create(body.experiment, body.condition, body.seed,
                                body.participant)
        except GraphError as exc:
            raise HTTPException(422, str(exc))
        return {"session_id": sess.session_id, "n_trials": sess.n_trials}

    @app.get("/sessions/{sid}")
    def session_status(sid: str):
        try:
            sess = store.get(sid)
        except KeyError:
            raise HTTPException(404, "unknown session")
        return {"session_id": sid, "experiment": sess.experiment,
                "condition": sess.condition, "cursor": sess.cursor,
                "n_trials": sess.n_trials, "state": sess.state}

    @app.get("/sessions/{sid}/trials/{n}")
    def get_trial(sid: str, n: int):
        try:
            sess = store.get(sid)
        except KeyError:
            raise HTTPException(404, "unknown session")
        if n != sess.cursor or sess.state != "active":
            raise HTTPException(409, f"current trial is {sess.cursor} "
                                     f"(session {sess.state})")
        return sess.trial_payload(n)

    @app.post("/sessions/{sid}/trials/{n}/choice")
    def post_choice(sid: str, n: int, body: ChoiceBody):
        try:
            return store.post_choice(sid, n, tuple(body.edge), body.scaffold)
        except KeyError:
            raise HTTPException(404, "unknown session")
        except GraphError as exc:
            raise HTTPException(422, str(exc))
        except ValueError as exc:
            raise HTTPException(409, str(exc))

    @app.get("/export")
    def export(state: str = "complete", experiment: str | None = None):
        datasets = store.export(state=state or None, experiment=experiment)
        return [d.to_dict() for d in datasets]

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve(port: int, data_dir: str, static_dir=None, host="127.0.0.1"):
    import uvicorn
    app = create_app(data_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)
