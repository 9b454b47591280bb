import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from graphteach import stimuli


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        label = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {status}: {label}", flush=True)


@pytest.fixture(scope="session")
def tutorial():
    """The instructions' worked example: graph, learner knowledge, path."""
    return stimuli.tutorial_example()


@pytest.fixture(scope="session")
def random_stimuli():
    """25 screened random lattice stimuli, shared across tests."""
    return [_stimulus(seed) for seed in range(25)]


def _stimulus(seed):
    graph = stimuli.generate_graph(1000 + seed, graph_id=f"rnd{seed}")
    return stimuli.sample_stimulus(graph, 2000 + seed)
