"""Provenance graph construction, labels, adjacency views and on-disk format.

Nodes get dense indices in first-seen order; edges are stored column-wise and
sorted by ``(t, eid)`` so that an edge's index is also its temporal rank.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import scipy.sparse as sp

from . import kernels
from .binio import sha256_file, verify_checksums
from .errors import EmptyGraph, FormatError, MissingArtifact
from .ingest import Attrs, EntityRecord, IngestResult

logger = logging.getLogger(__name__)

UNKNOWN_TYPE = "UNKNOWN"


@dataclass(frozen=True)
class NodeRecord:
    index: int
    nid: str
    ntype: str
    nattrs: Attrs = ()


@dataclass(frozen=True)
class EdgeRecord:
    eid: str
    etype: str
    src: int
    dst: int
    t: int
    eattrs: Attrs = ()


@dataclass(frozen=True)
class CSR:
    """Row-compressed edge index: row ``v`` owns ``col[indptr[v]:indptr[v+1]]``."""

    indptr: np.ndarray
    col: np.ndarray
    edge: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.indptr) - 1

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


class ProvenanceGraph:
    """Typed nodes plus timestamped directed edges (subject -> object).

    Edge columns (``eid``, ``etype_code``, ``src``, ``dst``, ``t``) are parallel
    arrays sorted by ``(t, eid)``. Parallel edges are kept.
    """

    def __init__(self, nodes, eid, etype_code, etype_names, src, dst, t, eattrs=None,
                 dropped_events=0, synthesized_nodes=0):
        self.nodes: list[NodeRecord] = list(nodes)
        self.eid = np.asarray(eid, dtype=str) if len(eid) else np.zeros(0, dtype="<U1")
        self.etype_code = np.asarray(etype_code, dtype=np.int32)
        self.etype_names: list[str] = list(etype_names)
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.t = np.asarray(t, dtype=np.int64)
        self.eattrs: list[Attrs] = list(eattrs) if eattrs is not None else [()] * len(self.src)
        self.dropped_events = int(dropped_events)
        self.synthesized_nodes = int(synthesized_nodes)
        n = len(self.nodes)
        self.out_adj = CSR(*kernels.csr_build(self.src, self.dst, n))
        self.in_adj = CSR(*kernels.csr_build(self.dst, self.src, n))
        self.type_vocab: dict[str, int] = {
            name: i for i, name in enumerate(sorted({nd.ntype for nd in self.nodes}))
        }

    @classmethod
    def from_arrays(cls, nodes, eid, etype, src, dst, t, eattrs=None, **kw) -> "ProvenanceGraph":
        """Build from unsorted edge columns; sorts by ``(t, eid)``, stable on ties."""
        eid = np.asarray(eid, dtype=str) if len(eid) else np.zeros(0, dtype="<U1")
        t = np.asarray(t, dtype=np.int64)
        order = np.lexsort((eid, t)) if len(t) else np.zeros(0, dtype=np.int64)
        etype = np.asarray(etype, dtype=str) if len(etype) else np.zeros(0, dtype="<U1")
        names, codes = np.unique(etype, return_inverse=True)
        codes = codes.astype(np.int32).reshape(-1)
        if eattrs is not None:
            eattrs = [eattrs[i] for i in order]
        return cls(
            nodes,
            eid[order],
            codes[order],
            [str(x) for x in names],
            np.asarray(src, dtype=np.int64)[order],
            np.asarray(dst, dtype=np.int64)[order],
            t[order],
            eattrs,
            **kw,
        )

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def edge(self, i: int) -> EdgeRecord:
        return EdgeRecord(
            str(self.eid[i]), self.etype_names[self.etype_code[i]],
            int(self.src[i]), int(self.dst[i]), int(self.t[i]), self.eattrs[i],
        )

    @property
    def edges(self) -> list[EdgeRecord]:
        return [self.edge(i) for i in range(self.n_edges)]

    def node_index(self) -> dict[str, int]:
        return {nd.nid: nd.index for nd in self.nodes}


def build_graph(
    ingest: IngestResult,
    dangling_policy: str = "drop",
    entity_pool: Optional[Mapping[str, EntityRecord]] = None,
) -> ProvenanceGraph:
    """Turn an ingest result into a :class:`ProvenanceGraph`.

    Declared entities are indexed in declaration order. An event endpoint that
    was not declared is looked up in ``entity_pool`` first (e.g. the training
    log's entity table when building an evaluation graph); if still missing it
    is either dropped with its event (``"drop"``) or replaced by a placeholder
    node of type ``UNKNOWN`` (``"synthesize"``).
    """
    if dangling_policy not in ("drop", "synthesize"):
        raise ValueError(f"unknown dangling_policy {dangling_policy!r}")
    pool = entity_pool or {}
    nodes: list[NodeRecord] = []
    index: dict[str, int] = {}

    def add(nid: str, ntype: str, attrs: Attrs) -> int:
        i = len(nodes)
        nodes.append(NodeRecord(i, nid, ntype, attrs))
        index[nid] = i
        return i

    for rec in ingest.entities.values():
        add(rec.entity_id, rec.entity_type, rec.attrs)

    synthesized = 0

    def resolve(nid: str) -> Optional[int]:
        nonlocal synthesized
        i = index.get(nid)
        if i is not None:
            return i
        rec = pool.get(nid)
        if rec is not None:
            return add(rec.entity_id, rec.entity_type, rec.attrs)
        if dangling_policy == "synthesize":
            synthesized += 1
            return add(nid, UNKNOWN_TYPE, ())
        return None

    eid, etype, src, dst, t, eattrs = [], [], [], [], [], []
    dropped = 0
    for ev in ingest.events:
        u = resolve(ev.subject_id)
        v = resolve(ev.object_id)
        if u is None or v is None:
            dropped += 1
            continue
        eid.append(ev.event_id)
        etype.append(ev.operation)
        src.append(u)
        dst.append(v)
        t.append(ev.timestamp_ns)
        eattrs.append(ev.attrs)
    if not nodes:
        raise EmptyGraph("no nodes after resolving entities and events")
    if dropped:
        logger.warning("dropped %d events with unresolved endpoints", dropped)
    return ProvenanceGraph.from_arrays(
        nodes, eid, etype, src, dst, t, eattrs,
        dropped_events=dropped, synthesized_nodes=synthesized,
    )


@dataclass(frozen=True)
class LabelVector:
    y: np.ndarray
    class_names: dict[int, str]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)


def node_labels(graph: ProvenanceGraph) -> LabelVector:
    vocab = graph.type_vocab
    y = np.fromiter((vocab[nd.ntype] for nd in graph.nodes), dtype=np.int64, count=graph.n_nodes)
    return LabelVector(y, {i: name for name, i in vocab.items()})


class AdjacencyView:
    """Read-only sparse adjacency over a graph's out-CSR.

    ``binary`` collapses parallel edges to 1; ``multi`` keeps multiplicities.
    """

    def __init__(self, matrix: sp.csr_matrix, mode: str):
        self._m = matrix
        self.mode = mode

    @property
    def shape(self) -> tuple[int, int]:
        return self._m.shape

    @property
    def nnz(self) -> int:
        return self._m.nnz

    def __getitem__(self, key) -> float:
        i, j = key
        return self._m[i, j]

    def out_degree(self) -> np.ndarray:
        return np.asarray(self._m.sum(axis=1)).ravel()

    def in_degree(self) -> np.ndarray:
        return np.asarray(self._m.sum(axis=0)).ravel()

    def to_scipy(self) -> sp.csr_matrix:
        return self._m.copy()

    def to_dense(self) -> np.ndarray:
        return self._m.toarray()


def adjacency(graph: ProvenanceGraph, mode: str = "binary") -> AdjacencyView:
    if mode not in ("binary", "multi"):
        raise ValueError(f"unknown adjacency mode {mode!r}")
    n = graph.n_nodes
    csr = graph.out_adj
    m = sp.csr_matrix(
        (np.ones(len(csr.col), dtype=np.float64), csr.col.copy(), csr.indptr.copy()), shape=(n, n)
    )
    m.sum_duplicates()
    if mode == "binary":
        m.data[:] = 1.0
    return AdjacencyView(m, mode)


# -- serialization -----------------------------------------------------------


def write_csr_blob(path, indptr, col, edge) -> None:
    """Little-endian u32 row offsets, then u32 column indices, then u32 edge ids."""
    with open(path, "wb") as fh:
        for arr in (indptr, col, edge):
            fh.write(np.asarray(arr, dtype="<u4").tobytes())


def read_csr_blob(path, n_rows: int, nnz: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    raw = np.fromfile(path, dtype="<u4")
    if len(raw) != (n_rows + 1) + 2 * nnz:
        raise FormatError(f"{path}: expected {(n_rows + 1) + 2 * nnz} u32 words, got {len(raw)}")
    indptr = raw[: n_rows + 1].astype(np.int64)
    col = raw[n_rows + 1: n_rows + 1 + nnz].astype(np.int64)
    edge = raw[n_rows + 1 + nnz:].astype(np.int64)
    return indptr, col, edge


def write_graph(graph: ProvenanceGraph, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "nodes.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for nd in graph.nodes:
            fh.write(json.dumps(
                {"index": nd.index, "nid": nd.nid, "ntype": nd.ntype, "nattrs": [list(kv) for kv in nd.nattrs]},
                separators=(",", ":"), ensure_ascii=False,
            ) + "\n")
    with open(directory / "edges.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for i in range(graph.n_edges):
            fh.write(json.dumps(
                {
                    "eid": str(graph.eid[i]),
                    "etype": graph.etype_names[graph.etype_code[i]],
                    "src": int(graph.src[i]),
                    "dst": int(graph.dst[i]),
                    "t": int(graph.t[i]),
                    "eattrs": [list(kv) for kv in graph.eattrs[i]],
                },
                separators=(",", ":"), ensure_ascii=False,
            ) + "\n")
    write_csr_blob(directory / "adjacency.csr", graph.out_adj.indptr, graph.out_adj.col, graph.out_adj.edge)
    files = ("nodes.jsonl", "edges.jsonl", "adjacency.csr")
    manifest = {
        "n_nodes": graph.n_nodes,
        "n_edges": graph.n_edges,
        "dropped_events": graph.dropped_events,
        "synthesized_nodes": graph.synthesized_nodes,
        "checksums": {f: sha256_file(directory / f) for f in files},
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_graph(directory) -> ProvenanceGraph:
    directory = Path(directory)
    mpath = directory / "manifest.json"
    if not mpath.exists():
        raise MissingArtifact(str(mpath))
    manifest = json.loads(mpath.read_text())
    verify_checksums(directory, manifest["checksums"])
    nodes = []
    with open(directory / "nodes.jsonl", encoding="utf-8") as fh:
        for line in fh:
            o = json.loads(line)
            nodes.append(NodeRecord(o["index"], o["nid"], o["ntype"], tuple(tuple(kv) for kv in o["nattrs"])))
    eid, etype, src, dst, t, eattrs = [], [], [], [], [], []
    with open(directory / "edges.jsonl", encoding="utf-8") as fh:
        for line in fh:
            o = json.loads(line)
            eid.append(o["eid"])
            etype.append(o["etype"])
            src.append(o["src"])
            dst.append(o["dst"])
            t.append(o["t"])
            eattrs.append(tuple(tuple(kv) for kv in o["eattrs"]))
    g = ProvenanceGraph.from_arrays(
        nodes, eid, etype, src, dst, t, eattrs,
        dropped_events=manifest["dropped_events"],
        synthesized_nodes=manifest["synthesized_nodes"],
    )
    indptr, col, edge = read_csr_blob(directory / "adjacency.csr", g.n_nodes, g.n_edges)
    if not (np.array_equal(indptr, g.out_adj.indptr) and np.array_equal(col, g.out_adj.col)
            and np.array_equal(edge, g.out_adj.edge)):
        raise FormatError(f"{directory}: adjacency.csr disagrees with edges.jsonl")
    return g
