"""Session service: trial flow, idempotency, hygiene, persistence, export."""

import json

import pytest
from fastapi.testclient import TestClient

from graphteach import fitting, service
from graphteach.service import SessionStore, StimulusLibrary, create_app


@pytest.fixture()
def library(random_stimuli):
    return StimulusLibrary(
        baseline=random_stimuli[:20],
        train_congruent=random_stimuli[:10],
        train_incongruent=random_stimuli[10:20],
        test=random_stimuli[20:25],
    )


@pytest.fixture()
def client(tmp_path, library):
    app = create_app(str(tmp_path), library=library)
    with TestClient(app) as c:
        yield c


def _create(client, experiment="baseline", condition=None, seed=1):
    r = client.post("/sessions", json={"experiment": experiment,
                                       "condition": condition, "seed": seed})
    assert r.status_code == 200, r.text
    return r.json()


FORBIDDEN_KEYS = {"learner_knowledge", "utilities", "utility", "score",
                  "scores", "teaching_score", "congruency"}


def _assert_hygienic(payload):
    """No learner knowledge, utility, or score ever reaches a client."""
    if isinstance(payload, dict):
        for k, v in payload.items():
            assert k not in FORBIDDEN_KEYS, f"leaked key {k!r}"
            _assert_hygienic(v)
    elif isinstance(payload, list):
        for v in payload:
            _assert_hygienic(v)


def test_baseline_session_flow(client):
    head = _create(client, seed=3)
    sid, n_trials = head["session_id"], head["n_trials"]
    assert n_trials == 40
    for n in range(n_trials):
        trial = client.get(f"/sessions/{sid}/trials/{n}").json()
        _assert_hygienic(trial)
        assert trial["n"] == n
        assert trial["scaffold_kind"] is None
        edge = trial["graph"]["edges"][0]
        ack = client.post(f"/sessions/{sid}/trials/{n}/choice",
                          json={"edge": edge}).json()
        _assert_hygienic(ack)
        assert ack["ok"] is True
        assert ack["next"] == (n + 1 if n + 1 < n_trials else None)
    status = client.get(f"/sessions/{sid}").json()
    assert status["state"] == "complete"


def test_same_seed_same_sequence(client):
    a = _create(client, seed=11)
    b = _create(client, seed=11)
    ta = client.get(f"/sessions/{a['session_id']}/trials/0").json()
    tb = client.get(f"/sessions/{b['session_id']}/trials/0").json()
    assert ta["graph"] == tb["graph"]
    assert ta["trajectory"] == tb["trajectory"]


def test_scaffold_session_shape(client):
    head = _create(client, "scaffold",
                   {"scaffolding": "inference", "training": "incongruent"}, seed=5)
    sid = head["session_id"]
    assert head["n_trials"] == 20
    for n in range(20):
        trial = client.get(f"/sessions/{sid}/trials/{n}").json()
        _assert_hygienic(trial)
        if n < 15:
            assert trial["phase"] == "train"
            assert trial["scaffold_kind"] == "inference"
            scaffold = [list(e) for e in trial["graph"]["edges"][:3]]
        else:
            assert trial["phase"] == "test"
            assert trial["scaffold_kind"] is None
            scaffold = None
        body = {"edge": trial["graph"]["edges"][0]}
        if scaffold:
            body["scaffold"] = scaffold
        r = client.post(f"/sessions/{sid}/trials/{n}/choice", json=body)
        assert r.status_code == 200, r.text


def test_out_of_order_and_validation(client):
    sid = _create(client, seed=1)["session_id"]
    assert client.get(f"/sessions/{sid}/trials/3").status_code == 409
    trial = client.get(f"/sessions/{sid}/trials/0").json()
    # edge not in the graph is rejected and the cursor stays put
    r = client.post(f"/sessions/{sid}/trials/0/choice", json={"edge": [97, 98]})
    assert r.status_code == 422
    assert client.get(f"/sessions/{sid}").json()["cursor"] == 0
    # scaffold on a non-scaffold trial is rejected
    edge = trial["graph"]["edges"][0]
    r = client.post(f"/sessions/{sid}/trials/0/choice",
                    json={"edge": edge, "scaffold": [edge, edge, edge]})
    assert r.status_code == 422
    assert client.get(f"/sessions/{sid}/trials/0").status_code == 200


def test_scaffold_required_when_demanded(client):
    head = _create(client, "scaffold",
                   {"scaffolding": "reward", "training": "congruent"}, seed=2)
    sid = head["session_id"]
    trial = client.get(f"/sessions/{sid}/trials/0").json()
    assert trial["scaffold_kind"] == "reward"
    r = client.post(f"/sessions/{sid}/trials/0/choice",
                    json={"edge": trial["graph"]["edges"][0]})
    assert r.status_code == 422
    r = client.post(f"/sessions/{sid}/trials/0/choice",
                    json={"edge": trial["graph"]["edges"][0],
                          "scaffold": [list(e) for e in trial["graph"]["edges"][:2]]})
    assert r.status_code == 422  # two edges are not three


def test_idempotent_replay(client):
    sid = _create(client, seed=7)["session_id"]
    trial = client.get(f"/sessions/{sid}/trials/0").json()
    edge = trial["graph"]["edges"][0]
    first = client.post(f"/sessions/{sid}/trials/0/choice", json={"edge": edge}).json()
    replay = client.post(f"/sessions/{sid}/trials/0/choice", json={"edge": edge})
    assert replay.status_code == 200
    assert replay.json() == first
    # a different edge for an answered trial is a conflict, not an overwrite
    other = trial["graph"]["edges"][1]
    r = client.post(f"/sessions/{sid}/trials/0/choice", json={"edge": other})
    assert r.status_code == 409
    assert client.get(f"/sessions/{sid}").json()["cursor"] == 1


def test_unknown_session_404(client):
    assert client.get("/sessions/nope/trials/0").status_code == 404
    assert client.post("/sessions/nope/trials/0/choice",
                       json={"edge": [0, 1]}).status_code == 404


def test_persistence_survives_restart(tmp_path, library):
    app = create_app(str(tmp_path), library=library)
    with TestClient(app) as c:
        sid = _create(c, seed=9)["session_id"]
        trial = c.get(f"/sessions/{sid}/trials/0").json()
        c.post(f"/sessions/{sid}/trials/0/choice",
               json={"edge": trial["graph"]["edges"][0]})
    # a fresh store over the same directory resumes at the stored cursor
    app2 = create_app(str(tmp_path), library=library)
    with TestClient(app2) as c2:
        status = c2.get(f"/sessions/{sid}").json()
        assert status["cursor"] == 1
        assert status["state"] == "active"
        nxt = c2.get(f"/sessions/{sid}/trials/1")
        assert nxt.status_code == 200


def test_export_round_trip_feeds_fitting(tmp_path, library, client):
    sid = _create(client, seed=13)["session_id"]
    clicked = []
    for n in range(40):
        trial = client.get(f"/sessions/{sid}/trials/{n}").json()
        edge = trial["graph"]["edges"][n % len(trial["graph"]["edges"])]
        clicked.append(tuple(edge))
        client.post(f"/sessions/{sid}/trials/{n}/choice", json={"edge": edge})
    exported = client.get("/export").json()
    _assert_hygienic_export(exported)
    datasets = [fitting.SubjectDataset.from_dict(d) for d in exported]
    mine = [d for d in datasets if d.subject_id == sid]
    assert len(mine) == 1
    ds = mine[0]
    assert ds.provenance == "human"
    assert [t.chosen_edge for t in ds.trials] == clicked
    fit = fitting.fit_softmax(ds, "reward")
    assert fit.n_trials == 40
    # abandoned sessions stay out by default
    other = _create(client, seed=14)["session_id"]
    after = client.get("/export").json()
    assert all(d["subject_id"] != other for d in after)
    # lossless round trip through the dataset file format
    path = tmp_path / "export.json"
    fitting.save_datasets(datasets, path)
    again = fitting.load_datasets(path)
    assert [d.canonical_json() for d in again] == [d.canonical_json() for d in datasets]


def _assert_hygienic_export(payload):
    # exported datasets do carry the hidden stimulus (they are analysis
    # inputs, not participant-facing), but never utilities or scores
    text = json.dumps(payload)
    assert "utilit" not in text
    assert "teaching_score" not in text


def test_store_reload_marks_complete(tmp_path, library):
    store = SessionStore(str(tmp_path), library)
    sess = store.create("baseline", {}, seed=21)
    for n in range(sess.n_trials):
        store.post_choice(sess.session_id, n, sess.sequence[n].graph.edges[0], None)
    store2 = SessionStore(str(tmp_path), library)
    assert store2.sessions[sess.session_id].state == "complete"
    exported = store2.export()
    assert [d.subject_id for d in exported] == [sess.session_id]
