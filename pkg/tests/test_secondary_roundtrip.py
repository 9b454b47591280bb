"""Round trip of the browser front end's logic against the live service.

Boots the real HTTP service, then lets the compiled TypeScript driver (the
same state machine the browser runs) complete whole sessions over the
wire. Verifies the exported datasets replay the clicked edges exactly and
feed the fitting module unchanged. Skipped unless the front end has been
built (frontend/dist) and node is on PATH.
"""

import json
import shutil
import socket
import subprocess
import threading
import time
from pathlib import Path

import httpx
import pytest

from graphteach import fitting, service

DRIVER = Path(__file__).parent.parent / "frontend" / "dist" / "driver-cli.js"

pytestmark = pytest.mark.skipif(
    not DRIVER.exists() or shutil.which("node") is None,
    reason="frontend not built or node unavailable")


@pytest.fixture()
def live_service(tmp_path, random_stimuli):
    import uvicorn

    library = service.StimulusLibrary(
        baseline=random_stimuli[:20],
        train_congruent=random_stimuli[:10],
        train_incongruent=random_stimuli[10:20],
        test=random_stimuli[20:25],
    )
    app = service.create_app(str(tmp_path), library=library)
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def _drive(url, experiment, scaffolding, seed):
    proc = subprocess.run(
        ["node", str(DRIVER), url, experiment, scaffolding, str(seed)],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_baseline_ui_round_trip(live_service):
    result = _drive(live_service, "baseline", "none", 5)
    assert result["n_trials"] == 40
    assert len(result["clicked"]) == 40

    exported = httpx.get(f"{live_service}/export").json()
    datasets = [fitting.SubjectDataset.from_dict(d) for d in exported]
    mine = [d for d in datasets if d.subject_id == result["session_id"]]
    assert len(mine) == 1
    ds = mine[0]
    assert ds.provenance == "human"
    assert len(ds.trials) == 40
    # the exported choices replay the driver's clicks exactly, in order
    assert [list(t.chosen_edge) for t in ds.trials] == result["clicked"]
    assert all(t.scaffold_selection is None for t in ds.trials)
    # and the dataset satisfies every fitting precondition unchanged
    assert len(ds.usable()) == 40
    fit = fitting.fit_softmax(ds, "reward")
    assert fit.n_trials == 40
    comp = fitting.compare(ds, ("bayes_optimal", "reward"))
    assert comp.delta_bic is not None


def test_scaffold_ui_round_trip(live_service):
    result = _drive(live_service, "scaffold", "inference", 9)
    assert result["n_trials"] == 20
    scaffolds = result["scaffolds"]
    assert [s is not None for s in scaffolds] == [True] * 15 + [False] * 5

    exported = httpx.get(f"{live_service}/export").json()
    ds = next(fitting.SubjectDataset.from_dict(d) for d in exported
              if d["subject_id"] == result["session_id"])
    with_scaffold = [t for t in ds.trials if t.scaffold_selection]
    assert len(with_scaffold) == 15
    assert all(t.phase == "train" for t in with_scaffold)
    assert all(len(t.scaffold_selection) == 3 for t in with_scaffold)
    fit = fitting.fit_softmax(ds, "bayes_optimal", phase="test")
    assert fit.n_trials == 5


def test_trial_payloads_hygienic_over_the_wire(live_service):
    # belt and braces beyond the driver's own per-payload scan
    head = httpx.post(f"{live_service}/sessions",
                      json={"experiment": "baseline", "condition": None,
                            "seed": 77}).json()
    trial = httpx.get(
        f"{live_service}/sessions/{head['session_id']}/trials/0").json()
    text = json.dumps(trial)
    for needle in ("learner_knowledge", "utilit", "score", "congruency"):
        assert needle not in text
