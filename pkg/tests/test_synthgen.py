import json
from dataclasses import replace

import numpy as np
import pytest

from provdistill import ingest, synthgen
from provdistill.errors import BoundaryOutOfRange, InvalidConfig
from provdistill.graph import build_graph

SMALL = synthgen.SynthConfig(n_processes=40, n_files=300, n_sockets=40, benign_events=3000, seed=1)


def test_no_chains_no_truth():
    _, truth = synthgen.generate(replace(SMALL, attack_chains=0))
    assert truth.malicious == set() and truth.chains == []


def test_one_entity_per_chain_step():
    _, truth = synthgen.generate(replace(SMALL, attack_chains=2, chain_length=3))
    assert len(truth.malicious) == 6 and len(truth.chains) == 2


def test_lines_are_well_formed(small_synth):
    _, lines, truth = small_synth
    res = ingest.ingest_stream(lines)
    assert res.errors == []
    assert truth.malicious <= set(res.entities)
    for ev in res.events:
        assert ev.subject_id in res.entities and ev.object_id in res.entities


def test_deterministic_per_seed():
    a = synthgen.generate(SMALL)
    b = synthgen.generate(SMALL)
    assert a[0] == b[0] and a[1].to_json() == b[1].to_json()
    assert synthgen.generate(replace(SMALL, seed=2))[0] != a[0]


@pytest.mark.parametrize("bad", [
    {"n_files": -1},
    {"class_mix": {synthgen.FILE: 0.5, synthgen.PIPE: 0.4}},
    {"class_mix": {"BOGUS": 1.0}},
    {"attack_start": 1.5},
    {"n_processes": 0},
])
def test_invalid_config(bad):
    with pytest.raises(InvalidConfig):
        synthgen.generate(replace(SMALL, **bad))


def test_class_mix_tolerance():
    mix = {synthgen.FILE: 0.5 + 1e-10, synthgen.PIPE: 0.5}
    replace(SMALL, class_mix=mix).validate()


def _ts(lines):
    return [json.loads(x)["ts"] for x in lines if '"event"' in x]


def test_split_partitions(small_synth):
    cfg, lines, truth = small_synth
    boundary = int(cfg.duration_ns * 0.6)
    train, evals = synthgen.split(lines, boundary)
    assert sorted(train + evals) == sorted(lines) and len(train) + len(evals) == len(lines)
    assert max(_ts(train)) <= boundary < min(_ts(evals))
    train_ids = set(ingest.ingest_stream(train).entities)
    assert not (train_ids & truth.malicious)


def test_split_at_max_leaves_eval_empty(small_synth):
    _, lines, _ = small_synth
    train, evals = synthgen.split(lines, max(_ts(lines)))
    assert evals == [] and len(train) == len(lines)


def test_split_out_of_range(small_synth):
    _, lines, _ = small_synth
    with pytest.raises(BoundaryOutOfRange):
        synthgen.split(lines, max(_ts(lines)) + 1)
    with pytest.raises(BoundaryOutOfRange):
        synthgen.split(lines, -5)


def test_ground_truth_json_roundtrip(small_synth):
    truth = small_synth[2]
    assert synthgen.GroundTruth.from_json(json.loads(json.dumps(truth.to_json()))).to_json() == truth.to_json()


# -- separability oracle ---------------------------------------------------------------------


def _bigram_sets(g, pairs):
    """Boolean matrix: which consecutive edge-type pairs occur in each node's time-ordered sequence."""
    last = [None] * g.n_nodes
    seen = [set() for _ in range(g.n_nodes)]
    for e in range(g.n_edges):  # edges are already in (t, eid) order
        op = g.etype_names[g.etype_code[e]]
        for v in {int(g.src[e]), int(g.dst[e])}:
            if last[v] is not None:
                seen[v].add(pairs.setdefault((last[v], op), len(pairs)))
            last[v] = op
    return seen


def _to_matrix(sets, width):
    M = np.zeros((len(sets), width), dtype=np.float64)
    for i, s in enumerate(sets):
        M[i, list(s)] = 1.0
    return M


def test_template_separability_one_nearest_neighbor():
    """Benign-only 1-NN on edge-type sequences already exposes the attack entities.

    Each eval node takes the type of its nearest training node under Jaccard
    distance between bigram sets of the exact edge-type sequence, and is
    flagged when that type differs from its own.
    """
    cfg = synthgen.SynthConfig(n_processes=100, n_files=800, n_sockets=100, benign_events=10000,
                               attack_chains=4, chain_length=3, seed=7)
    lines, truth = synthgen.generate(cfg)
    train, evals = synthgen.split(lines, int(cfg.duration_ns * 0.6))
    tr = ingest.ingest_stream(train)
    g_tr = build_graph(tr)
    g_ev = build_graph(ingest.ingest_stream(evals), entity_pool=tr.entities)
    pairs = {}
    ref_sets = _bigram_sets(g_tr, pairs)
    ev_sets = _bigram_sets(g_ev, pairs)
    R, E = _to_matrix(ref_sets, len(pairs)), _to_matrix(ev_sets, len(pairs))
    ref_types = np.array([n.ntype for n in g_tr.nodes])
    inter = E @ R.T
    union = E.sum(1)[:, None] + R.sum(1)[None, :] - inter
    dist = 1.0 - np.divide(inter, union, out=np.ones_like(inter), where=union > 0)
    nearest = ref_types[dist.argmin(axis=1)]
    flagged = nearest != np.array([n.ntype for n in g_ev.nodes])
    bad = np.array([n.nid in truth.malicious for n in g_ev.nodes])
    assert bad.sum() == len(truth.malicious)
    assert flagged[bad].mean() >= 0.9
    assert (~flagged[~bad]).mean() >= 0.9
