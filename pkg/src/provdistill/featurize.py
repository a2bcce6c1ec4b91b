"""Node features: token sentences, skip-gram embeddings and positional encoding.

A node's sentence is its attribute values followed by the types of every
incident edge (both directions) in ``(t, eid)`` order. Each token is embedded
with a skip-gram model trained on benign sentences, shifted by a sinusoidal
position code, and the node feature is the mean over positions.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .binio import read_json_blob, write_json_blob
from .errors import EmptyCorpus, FormatError, OddDimension, ShapeMismatch
from .graph import ProvenanceGraph

logger = logging.getLogger(__name__)

EMPTY_TOKEN = "EMPTY"
OOV_ID = 0
MAX_TOKENS = 512
_BLOCK_TOKENS = 50_000


@dataclass(frozen=True)
class NodeSentence:
    node_index: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class SkipGramConfig:
    dim: int = 32
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    seed: int = 0


@dataclass
class EmbeddingModel:
    """Token vocabulary plus one embedding row per token; row 0 is the OOV zero row."""

    vocab: dict[str, int]
    vectors: np.ndarray
    config: SkipGramConfig
    loss_trace: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def lookup(self, token: str) -> int:
        return self.vocab.get(token, OOV_ID)

    def embed(self, token: str) -> np.ndarray:
        return self.vectors[self.lookup(token)]


@dataclass(frozen=True)
class FeatureMatrix:
    X: np.ndarray

    @property
    def dim(self) -> int:
        return self.X.shape[1]


# -- sentences ---------------------------------------------------------------


def _attr_tokens(graph: ProvenanceGraph, i: int) -> list[str]:
    return [v for _, v in graph.nodes[i].nattrs]


def _incident_edges(graph: ProvenanceGraph, caps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    o, n = graph.out_adj, graph.in_adj
    return kernels.incident_merge(o.indptr, o.edge, n.indptr, n.edge, np.asarray(caps, dtype=np.int64))


def build_sentence(graph: ProvenanceGraph, node_index: int, max_tokens: int = MAX_TOKENS) -> NodeSentence:
    attrs = _attr_tokens(graph, node_index)[:max_tokens]
    o, n = graph.out_adj, graph.in_adj
    out_e = o.edge[o.indptr[node_index]:o.indptr[node_index + 1]]
    in_e = n.edge[n.indptr[node_index]:n.indptr[node_index + 1]]
    # edge indices are (t, eid) ranks, so sorting indices sorts by time
    incident = np.union1d(out_e, in_e)[: max_tokens - len(attrs)]
    tokens = attrs + [graph.etype_names[graph.etype_code[e]] for e in incident]
    return NodeSentence(node_index, tuple(tokens) if tokens else (EMPTY_TOKEN,))


def build_sentences(graph: ProvenanceGraph, max_tokens: int = MAX_TOKENS) -> list[NodeSentence]:
    attrs = [_attr_tokens(graph, i)[:max_tokens] for i in range(graph.n_nodes)]
    caps = np.array([max_tokens - len(a) for a in attrs], dtype=np.int64)
    ptr, inc = _incident_edges(graph, caps)
    names = graph.etype_names
    etypes = [names[c] for c in graph.etype_code[inc]]
    out = []
    for i in range(graph.n_nodes):
        tokens = attrs[i] + etypes[ptr[i]:ptr[i + 1]]
        out.append(NodeSentence(i, tuple(tokens) if tokens else (EMPTY_TOKEN,)))
    return out


# -- skip-gram ---------------------------------------------------------------


def build_vocab(corpus: Iterable[Sequence[str]]) -> dict[str, int]:
    """Ids ordered by descending frequency, then token; id 0 is reserved for OOV."""
    counts: dict[str, int] = {}
    for sent in corpus:
        for tok in sent:
            counts[tok] = counts.get(tok, 0) + 1
    ordered = sorted(counts, key=lambda t: (-counts[t], t))
    return {tok: i + 1 for i, tok in enumerate(ordered)}


def init_vectors(n_rows: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    vec = (rng.random((n_rows, dim)) - 0.5) / dim
    vec[OOV_ID] = 0.0
    return vec


def _tokens_of(item) -> Sequence[str]:
    return item.tokens if isinstance(item, NodeSentence) else item


def train_skipgram(corpus, dim: int = 32, window: int = 5, negatives: int = 5, epochs: int = 5,
                   lr: float = 0.025, seed: int = 0) -> EmbeddingModel:
    """Skip-gram with negative sampling.

    Each center token predicts the tokens within a randomly shrunk window
    ``b ~ U{1..window}``; negatives come from the unigram distribution raised to
    3/4; the learning rate decays linearly to ``lr * 1e-4`` over all epochs.
    All random draws are made up front per block with numpy so the compiled and
    pure-Python kernels consume identical streams.

    The returned vectors are input plus output embeddings, which places tokens
    that co-occur close together (input vectors alone only group tokens that
    share contexts).
    """
    sentences = [list(_tokens_of(s)) for s in corpus]
    sentences = [s for s in sentences if s]
    if not sentences:
        raise EmptyCorpus("skip-gram corpus has no tokens")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    config = SkipGramConfig(dim, window, negatives, epochs, lr, seed)
    vocab = build_vocab(sentences)
    rng = np.random.default_rng(seed)
    syn0 = init_vectors(len(vocab) + 1, dim, rng)
    syn1 = np.zeros_like(syn0)

    ids = np.fromiter((vocab[t] for s in sentences for t in s), dtype=np.int32)
    lengths = np.fromiter((len(s) for s in sentences), dtype=np.int64, count=len(sentences))
    sent_ptr = np.zeros(len(sentences) + 1, dtype=np.int64)
    np.cumsum(lengths, out=sent_ptr[1:])
    freq = np.bincount(ids, minlength=len(vocab) + 1)[1:].astype(np.float64) ** 0.75
    cum = np.cumsum(freq / freq.sum())
    cum[-1] = 1.0

    # block boundaries on sentence edges
    blocks = [0]
    for s in range(1, len(sentences) + 1):
        if sent_ptr[s] - sent_ptr[blocks[-1]] >= _BLOCK_TOKENS or s == len(sentences):
            blocks.append(s)
    total = int(sent_ptr[-1]) * max(epochs, 1)
    min_alpha = lr * 1e-4
    done = 0
    trace: list[float] = []
    for _ in range(epochs):
        loss_sum, pairs = 0.0, 0
        for b0, b1 in zip(blocks[:-1], blocks[1:]):
            base = sent_ptr[b0]
            tok = ids[base:sent_ptr[b1]]
            bptr = sent_ptr[b0:b1 + 1] - base
            win = rng.integers(1, window + 1, size=len(tok)).astype(np.int32)
            sent_of = np.repeat(np.arange(b1 - b0), np.diff(bptr))
            pos = np.arange(len(tok))
            lo = np.maximum(pos - win, bptr[sent_of])
            hi = np.minimum(pos + win + 1, bptr[sent_of + 1])
            n_pairs = int((hi - lo - 1).sum())
            negs = (np.searchsorted(cum, rng.random((n_pairs, negatives)), side="right") + 1)
            negs = np.minimum(negs, len(vocab)).astype(np.int32)
            ls, pc = kernels.sgns_block(
                syn0, syn1, tok, bptr, win, np.ascontiguousarray(negs),
                float(lr), float(min_alpha), int(done), int(total),
            )
            done += len(tok)
            loss_sum += ls
            pairs += pc
        trace.append(loss_sum / pairs if pairs else 0.0)
        logger.debug("skip-gram epoch %d loss %.5f", len(trace), trace[-1])
    vectors = (syn0 + syn1).astype(np.float32)
    vectors[OOV_ID] = 0.0
    return EmbeddingModel(vocab, vectors, config, trace)


def save_embedding(model: EmbeddingModel, path) -> None:
    tokens = sorted(model.vocab, key=model.vocab.__getitem__)
    header = {
        "kind": "embedding",
        "oov_id": OOV_ID,
        "vocab": tokens,
        "config": asdict(model.config),
        "loss_trace": model.loss_trace,
    }
    write_json_blob(path, header, [model.vectors])


def load_embedding(path) -> EmbeddingModel:
    header, arrays = read_json_blob(path)
    if header.get("kind") != "embedding" or len(arrays) != 1:
        raise FormatError(f"{path}: not an embedding model file")
    vocab = {tok: i + 1 for i, tok in enumerate(header["vocab"])}
    return EmbeddingModel(vocab, arrays[0], SkipGramConfig(**header["config"]), list(header["loss_trace"]))


# -- positional encoding and pooling -------------------------------------------


def positional_encoding(pos: int, dim: int) -> np.ndarray:
    """Transformer sinusoid: sin at even slots, cos at odd, base 10000."""
    if pos < 0:
        raise ValueError("pos must be >= 0")
    return pe_table(pos + 1, dim)[pos]


def pe_table(n_pos: int, dim: int) -> np.ndarray:
    if dim % 2:
        raise OddDimension(f"positional encoding needs an even dimension, got {dim}")
    pos = np.arange(n_pos, dtype=np.float64)[:, None]
    freq = 10000.0 ** (np.arange(0, dim, 2, dtype=np.float64) / dim)
    angle = pos / freq
    out = np.empty((n_pos, dim), dtype=np.float64)
    out[:, 0::2] = np.sin(angle)
    out[:, 1::2] = np.cos(angle)
    return out


def featurize_node(model: EmbeddingModel, sentence: NodeSentence) -> np.ndarray:
    tokens = sentence.tokens or (EMPTY_TOKEN,)
    emb = model.vectors.astype(np.float64)[[model.lookup(t) for t in tokens]]
    return (emb + pe_table(len(tokens), model.dim)).mean(axis=0)


def featurize_sentences(model: EmbeddingModel, sentences: Sequence[NodeSentence]) -> FeatureMatrix:
    d = model.dim
    if not sentences:
        return FeatureMatrix(np.zeros((0, d), dtype=np.float32))
    lengths = np.array([len(s.tokens) for s in sentences], dtype=np.int64)
    ids = np.fromiter((model.lookup(t) for s in sentences for t in s.tokens), dtype=np.int64,
                      count=int(lengths.sum()))
    starts = np.zeros(len(sentences), dtype=np.int64)
    np.cumsum(lengths[:-1], out=starts[1:])
    emb_sum = np.add.reduceat(model.vectors.astype(np.float64)[ids], starts, axis=0)
    pe_cum = np.cumsum(pe_table(int(lengths.max()), d), axis=0)
    X = (emb_sum + pe_cum[lengths - 1]) / lengths[:, None]
    if not np.all(np.isfinite(X)):
        raise FloatingPointError("non-finite feature values")
    return FeatureMatrix(X.astype(np.float32))


def featurize_graph(graph: ProvenanceGraph, model: EmbeddingModel, max_tokens: int = MAX_TOKENS) -> FeatureMatrix:
    return featurize_sentences(model, build_sentences(graph, max_tokens))


# -- standardization -------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureScaler:
    """Per-dimension z-score fit on benign training features.

    Averaged sentence features have very unequal spreads across dimensions
    (the positional part dominates for long sentences); rescaling gives each
    dimension comparable weight in the coreset distances and the classifier.
    """

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.mean):
            raise ShapeMismatch(f"features have shape {X.shape}, scaler expects {len(self.mean)} columns")
        return ((X - self.mean) / self.scale).astype(np.float32)


def fit_scaler(X, min_scale: float = 1e-6) -> FeatureScaler:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ShapeMismatch("cannot fit a scaler on an empty feature matrix")
    sd = X.std(axis=0)
    return FeatureScaler(X.mean(axis=0), np.where(sd < min_scale, 1.0, sd))


def identity_scaler(dim: int) -> FeatureScaler:
    return FeatureScaler(np.zeros(dim), np.ones(dim))


def save_scaler(scaler: FeatureScaler, path) -> None:
    # f64 on purpose: the blob helper stores f32, so keep exact values in the header
    write_json_blob(path, {"kind": "scaler", "mean": scaler.mean.tolist(), "scale": scaler.scale.tolist()}, [])


def load_scaler(path) -> FeatureScaler:
    header, _ = read_json_blob(path)
    if header.get("kind") != "scaler":
        raise FormatError(f"{path}: not a scaler file")
    return FeatureScaler(np.array(header["mean"], dtype=np.float64), np.array(header["scale"], dtype=np.float64))
