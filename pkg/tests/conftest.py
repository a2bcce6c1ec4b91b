import json

import numpy as np
import pytest
import scipy.sparse as sp

from provdistill import distill, ingest, synthgen
from provdistill.graph import build_graph


def entity(eid, etype, attrs=()):
    return json.dumps({"record_type": "entity", "entity_id": eid, "entity_type": etype,
                       "attrs": [list(a) for a in attrs]})


def event(eid, subj, obj, ts, op):
    return json.dumps({"record_type": "event", "event_id": eid, "subject": subj, "object": obj,
                       "ts": ts, "op": op})


def graph_from_lines(lines, **kw):
    return build_graph(ingest.ingest_stream(lines), **kw)


def random_dataset(rng, n_classes=3, per_class=(5, 30), d=4, p_edge=0.05):
    sizes = rng.integers(per_class[0], per_class[1] + 1, size=n_classes)
    y = np.repeat(np.arange(n_classes), sizes)
    X = rng.normal(size=(len(y), d)) + y[:, None]
    A = sp.random(len(y), len(y), density=p_edge, random_state=np.random.RandomState(int(rng.integers(1 << 31))),
                  format="csr")
    A.data[:] = 1.0
    A.setdiag(0)
    A.eliminate_zeros()
    return distill.GraphDataset(X, A, y, {c: f"T{c}" for c in range(n_classes)})


@pytest.fixture(scope="session")
def small_synth():
    cfg = synthgen.SynthConfig(n_processes=60, n_files=500, n_sockets=60, benign_events=6000,
                               attack_chains=2, chain_length=3, seed=3)
    lines, truth = synthgen.generate(cfg)
    return cfg, lines, truth


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
