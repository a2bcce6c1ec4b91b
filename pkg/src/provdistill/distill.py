"""Graph condensation: rare-class filtering, per-class budgets and five strategies.

Selection strategies (``random``, ``herding``, ``kcenter``) keep literal rows of
the original feature matrix and the induced subgraph. Synthesis strategies
(``gcdm`` distribution matching, ``gcond`` gradient matching) optimize new
feature rows; ``gcond`` also learns a symmetric adjacency.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .binio import canonical_json, read_feature_matrix, sha256_file, verify_checksums, write_feature_matrix
from .errors import AllClassesRemoved, MissingArtifact, NonFiniteLoss, ShapeMismatch, StrategyNotImplemented
from .gnn import neighbor_mean_operator
from .graph import AdjacencyView, read_csr_blob, write_csr_blob

logger = logging.getLogger(__name__)

METHODS = ("random", "herding", "kcenter", "gcdm", "gcond")
DECLARED_SLOTS = ("sgdd",)


@dataclass
class GraphDataset:
    """Features ``X`` (m x d), binary adjacency ``A`` (sparse m x m), labels ``y``."""

    X: np.ndarray
    A: sp.csr_matrix
    y: np.ndarray
    class_names: dict[int, str]
    node_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if isinstance(self.A, AdjacencyView):
            self.A = self.A.to_scipy()
        self.A = sp.csr_matrix(self.A, dtype=np.float64)
        m = len(self.y)
        if self.X.shape[0] != m or self.A.shape != (m, m):
            raise ShapeMismatch(f"X {self.X.shape}, A {self.A.shape}, y {self.y.shape} disagree")
        if self.node_ids is None:
            self.node_ids = np.arange(m, dtype=np.int64)

    @property
    def n_nodes(self) -> int:
        return len(self.y)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)


@dataclass(frozen=True)
class DistillConfig:
    r: float = 0.01
    method: str = "random"
    seed: int = 0
    rare_class_threshold: float = 0.01
    iterations: int = 50
    lr_feat: float = 0.001
    lr_adj: float = 0.03
    lr_model: float = 0.3
    inner_steps: int = 5
    encoder_width: int = 64
    batch_per_class: int = 256
    n_probes: int = 1
    theta_refresh: int = 10

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise ValueError(f"reduction rate must lie in (0, 1], got {self.r}")
        if not 0 <= self.rare_class_threshold < 1:
            raise ValueError("rare_class_threshold must lie in [0, 1)")


@dataclass
class DistilledGraph:
    Xp: np.ndarray
    Ap: sp.csr_matrix
    Yp: np.ndarray
    class_names: dict[int, str]
    origin: Optional[np.ndarray] = None
    provenance: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.Yp)

    # shared with GraphDataset so trainers accept either
    @property
    def X(self) -> np.ndarray:
        return self.Xp

    @property
    def A(self) -> sp.csr_matrix:
        return self.Ap

    @property
    def y(self) -> np.ndarray:
        return self.Yp

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


# -- filtering and budgets -------------------------------------------------------


def rare_classes(counts: Mapping, threshold: float = 0.01) -> list:
    """Keys whose count is strictly below ``threshold`` times the total."""
    total = sum(counts.values())
    return [k for k, c in counts.items() if c < threshold * total]


def filter_rare_classes(T: GraphDataset, threshold: float = 0.01) -> tuple[GraphDataset, list[str]]:
    """Drop every class holding fewer than ``threshold * |V|`` nodes.

    Kept classes are renumbered in their original id order; the adjacency is
    restricted to the surviving nodes.
    """
    if T.n_nodes == 0:
        raise AllClassesRemoved("empty dataset")
    counts = T.class_counts
    removed_ids = rare_classes({c: int(counts[c]) for c in range(T.n_classes)}, threshold)
    kept_ids = [c for c in range(T.n_classes) if c not in removed_ids]
    if not kept_ids:
        raise AllClassesRemoved("every class is below the rarity threshold")
    remap = np.full(T.n_classes, -1, dtype=np.int64)
    remap[kept_ids] = np.arange(len(kept_ids))
    keep = np.flatnonzero(remap[T.y] >= 0)
    out = GraphDataset(
        T.X[keep],
        T.A[keep][:, keep],
        remap[T.y[keep]],
        {i: T.class_names[c] for i, c in enumerate(kept_ids)},
        T.node_ids[keep],
    )
    return out, [T.class_names[c] for c in removed_ids]


def class_budgets(class_counts: Sequence[int], r: float) -> np.ndarray:
    """``max(1, round_half_even(r * count))`` per class, computed in exact decimal."""
    rd = Decimal(str(r))
    return np.array(
        [max(1, int((rd * int(c)).quantize(Decimal(1), rounding=ROUND_HALF_EVEN))) for c in class_counts],
        dtype=np.int64,
    )


# -- helpers -----------------------------------------------------------------------


def _members(T: GraphDataset, c: int) -> np.ndarray:
    return np.flatnonzero(T.y == c)


def _induced(A: sp.csr_matrix, idx: np.ndarray) -> sp.csr_matrix:
    sub = sp.csr_matrix(A[idx][:, idx])
    sub.setdiag(0)
    sub.eliminate_zeros()
    sub.data[:] = 1.0
    return sub


def _selection_result(T: GraphDataset, picked: list[np.ndarray], config: DistillConfig,
                      budgets: np.ndarray, extra: Optional[dict] = None) -> DistilledGraph:
    idx = np.concatenate(picked).astype(np.int64) if picked else np.zeros(0, dtype=np.int64)
    prov = {"config": asdict(config), "budgets": budgets.tolist()}
    prov.update(extra or {})
    return DistilledGraph(
        T.X[idx].copy(), _induced(T.A, idx), T.y[idx].copy(), dict(T.class_names),
        origin=T.node_ids[idx].copy(), provenance=prov,
    )


def herding_select(F: np.ndarray, k: int) -> np.ndarray:
    """Greedy mean matching; returns positions into ``F`` in selection order."""
    n = len(F)
    k = min(k, n)
    mu = F.mean(axis=0)
    chosen = np.zeros(n, dtype=bool)
    acc = np.zeros(F.shape[1])
    order = []
    for step in range(k):
        err = np.linalg.norm(mu - (acc + F) / (step + 1), axis=1)
        err[chosen] = np.inf
        j = int(np.argmin(err))
        order.append(j)
        chosen[j] = True
        acc += F[j]
    return np.array(order, dtype=np.int64)


def kcenter_select(F: np.ndarray, k: int) -> np.ndarray:
    """Mean-nearest seed, then repeated farthest-point insertion."""
    n = len(F)
    k = min(k, n)
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    mu = F.mean(axis=0)
    first = int(np.argmin(np.linalg.norm(F - mu, axis=1)))
    order = [first]
    dist = np.linalg.norm(F - F[first], axis=1)
    dist[first] = -1.0
    for _ in range(k - 1):
        j = int(np.argmax(dist))
        order.append(j)
        dist = np.minimum(dist, np.linalg.norm(F - F[j], axis=1))
        dist[order] = -1.0
    return np.array(order, dtype=np.int64)


# -- selection strategies --------------------------------------------------------------


def distill_random(T: GraphDataset, config: DistillConfig) -> DistilledGraph:
    budgets = class_budgets(T.class_counts, config.r)
    rng = np.random.default_rng(config.seed)
    picked = []
    for c in range(T.n_classes):
        mem = _members(T, c)
        picked.append(np.sort(rng.choice(mem, size=min(budgets[c], len(mem)), replace=False)))
    return _selection_result(T, picked, config, budgets)


def distill_herding(T: GraphDataset, config: DistillConfig) -> DistilledGraph:
    budgets = class_budgets(T.class_counts, config.r)
    picked = []
    for c in range(T.n_classes):
        mem = _members(T, c)
        picked.append(mem[herding_select(T.X[mem], budgets[c])])
    return _selection_result(T, picked, config, budgets)


def distill_kcenter(T: GraphDataset, config: DistillConfig) -> DistilledGraph:
    budgets = class_budgets(T.class_counts, config.r)
    picked = []
    for c in range(T.n_classes):
        mem = _members(T, c)
        picked.append(mem[kcenter_select(T.X[mem], budgets[c])])
    return _selection_result(T, picked, config, budgets)


# -- shared relaxed encoder ------------------------------------------------------------


def propagation_matrix(A) -> sp.csr_matrix:
    """Row-normalized ``D^-1 (A + I)`` with ``D`` the row degree of ``A + I``."""
    A = sp.csr_matrix(A, dtype=np.float64)
    At = A + sp.identity(A.shape[0], format="csr")
    deg = np.asarray(At.sum(axis=1)).ravel()
    return sp.csr_matrix(sp.diags(1.0 / deg) @ At)


def gnn_encoder(X: np.ndarray, A, W: np.ndarray) -> np.ndarray:
    """``relu(D^-1 (A + I) X W)``; ``A`` may be dense or sparse."""
    X = np.asarray(X, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if A.shape != (X.shape[0], X.shape[0]) or X.shape[1] != W.shape[0]:
        raise ShapeMismatch(f"X {X.shape}, A {A.shape}, W {W.shape}")
    return np.maximum(propagation_matrix(A) @ X @ W, 0.0)


def _init_from_real(T: GraphDataset, budgets: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    idx = []
    for c in range(T.n_classes):
        mem = _members(T, c)
        idx.append(np.sort(rng.choice(mem, size=min(budgets[c], len(mem)), replace=False)))
    idx = np.concatenate(idx)
    return T.X[idx].copy(), idx


def _labels_from_budgets(budgets: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(len(budgets)), budgets)


def _check_finite(value: float, what: str) -> None:
    if not np.isfinite(value):
        raise NonFiniteLoss(f"{what} became non-finite; lower the learning rate")


# -- distribution matching -------------------------------------------------------------


def _class_means(H: np.ndarray, y: np.ndarray, n_classes: int) -> np.ndarray:
    sums = np.zeros((n_classes, H.shape[1]))
    np.add.at(sums, y, H)
    return sums / np.bincount(y, minlength=n_classes)[:, None]


def gcdm_loss_and_grad(Xp: np.ndarray, Yp: np.ndarray, real_means: np.ndarray, W: np.ndarray):
    """Loss ``sum_c ||real_mean_c - mean_c(relu(Xp W))||^2`` and its gradient in ``Xp``.

    Synthetic nodes carry no edges, so the encoder reduces to ``relu(Xp W)``.
    """
    n_classes = real_means.shape[0]
    Z = Xp @ W
    H = np.maximum(Z, 0.0)
    diff = _class_means(H, Yp, n_classes) - real_means
    loss = float(np.sum(diff * diff))
    counts = np.bincount(Yp, minlength=n_classes)
    dH = 2.0 * diff[Yp] / counts[Yp][:, None]
    grad = (dH * (Z > 0)) @ W.T
    return loss, grad


def distill_gcdm(T: GraphDataset, config: DistillConfig, init_features: Optional[np.ndarray] = None) -> DistilledGraph:
    """Optimize synthetic features so per-class mean embeddings match the real graph.

    Every iteration draws a fresh random encoder ``W`` and takes one momentum
    gradient step on ``Xp``. The recorded loss trace is the same objective
    averaged over ``n_probes`` fixed encoders, evaluated before the first step
    and after each iteration.
    """
    budgets = class_budgets(T.class_counts, config.r)
    rng = np.random.default_rng(config.seed)
    Yp = _labels_from_budgets(budgets)
    if init_features is None:
        Xp, _ = _init_from_real(T, budgets, rng)
    else:
        Xp = np.array(init_features, dtype=np.float64)
        if Xp.shape != (len(Yp), T.X.shape[1]):
            raise ShapeMismatch(f"init_features must be {(len(Yp), T.X.shape[1])}, got {Xp.shape}")
    d, width = T.X.shape[1], config.encoder_width
    PX = propagation_matrix(T.A) @ T.X
    probe_rng = np.random.default_rng([config.seed, 1])
    probes = [probe_rng.standard_normal((d, width)) / np.sqrt(d) for _ in range(config.n_probes)]
    probe_means = [_class_means(np.maximum(PX @ W, 0.0), T.y, T.n_classes) for W in probes]

    def probe_loss(X):
        return float(np.mean([gcdm_loss_and_grad(X, Yp, m, W)[0] for W, m in zip(probes, probe_means)]))

    trace = [probe_loss(Xp)]
    velocity = np.zeros_like(Xp)
    for _ in range(config.iterations):
        W = rng.standard_normal((d, width)) / np.sqrt(d)
        real = _class_means(np.maximum(PX @ W, 0.0), T.y, T.n_classes)
        loss, grad = gcdm_loss_and_grad(Xp, Yp, real, W)
        _check_finite(loss, "distribution-matching loss")
        velocity = 0.9 * velocity - config.lr_feat * grad
        Xp = Xp + velocity
        trace.append(probe_loss(Xp))
        _check_finite(trace[-1], "distribution-matching loss")
    n = len(Yp)
    return DistilledGraph(
        Xp, sp.csr_matrix((n, n), dtype=np.float64), Yp, dict(T.class_names),
        provenance={"config": asdict(config), "budgets": budgets.tolist(), "loss_trace": trace},
    )


# -- gradient matching -------------------------------------------------------------------


def _torch():
    import torch

    return torch


def soft_adjacency(Z):
    """Symmetric ``sigmoid`` adjacency with a zero diagonal."""
    torch = _torch()
    S = torch.sigmoid(Z)
    S = 0.5 * (S + S.T)
    return S * (1.0 - torch.eye(S.shape[0], dtype=S.dtype))


def soft_neighbor_mean(S, X, min_degree: float = 1.0):
    """Weighted neighbor mean ``S X / max(rowsum(S), min_degree)``.

    On a binary adjacency this equals the classifier's neighbor mean for every
    node with at least one edge; weak soft edges fade instead of being
    renormalized into a global average.
    """
    deg = S.sum(dim=1, keepdim=True).clamp(min=min_degree)
    return (S @ X) / deg


def classifier_loss(X, MX, y, theta, n_classes: int):
    """Class-balanced cross-entropy of ``relu(X W_self + MX W_neigh) W_cls + b``.

    The hidden layer has the same self/neighbor split as the downstream
    classifier, so matched gradients constrain raw features and neighbor
    means separately.
    """
    torch = _torch()
    W_self, W_neigh, W_cls, b = theta
    logits = torch.relu(X @ W_self + MX @ W_neigh) @ W_cls + b
    per_node = torch.nn.functional.cross_entropy(logits, y, reduction="none")
    counts = torch.bincount(y, minlength=n_classes).to(per_node.dtype)
    present = counts > 0
    weights = torch.where(present, 1.0 / counts.clamp(min=1), torch.zeros_like(counts))[y]
    return (per_node * weights).sum() / present.sum()


def matching_distance(g_real, g_syn, eps: float = 1e-12):
    """Sum over parameter tensors of ``1 - cos(g_real, g_syn)``."""
    total = 0.0
    for a, b in zip(g_real, g_syn):
        a, b = a.reshape(-1), b.reshape(-1)
        total = total + 1.0 - (a * b).sum() / (a.norm() * b.norm() + eps)
    return total


def gcond_matching_loss(Xp, Z, Yp, X_real, MX_real, y_real, theta, n_classes: int):
    """Gradient-matching loss; differentiable in ``Xp`` and ``Z``."""
    torch = _torch()
    loss_real = classifier_loss(X_real, MX_real, y_real, theta, n_classes)
    g_real = [g.detach() for g in torch.autograd.grad(loss_real, theta)]
    MXs = soft_neighbor_mean(soft_adjacency(Z), Xp)
    loss_syn = classifier_loss(Xp, MXs, Yp, theta, n_classes)
    g_syn = torch.autograd.grad(loss_syn, theta, create_graph=True)
    return matching_distance(g_real, g_syn)


def draw_theta(gen, d: int, width: int, n_classes: int):
    torch = _torch()
    W_self = torch.randn(d, width, generator=gen, dtype=torch.float64) * np.sqrt(1.0 / d)
    W_neigh = torch.randn(d, width, generator=gen, dtype=torch.float64) * np.sqrt(1.0 / d)
    W_cls = torch.randn(width, n_classes, generator=gen, dtype=torch.float64) * np.sqrt(1.0 / width)
    b = torch.zeros(n_classes, dtype=torch.float64)
    return [p.requires_grad_(True) for p in (W_self, W_neigh, W_cls, b)]


def _balanced_batch(y: np.ndarray, n_classes: int, per_class: int, rng: np.random.Generator) -> np.ndarray:
    out = []
    for c in range(n_classes):
        mem = np.flatnonzero(y == c)
        out.append(mem if len(mem) <= per_class else np.sort(rng.choice(mem, per_class, replace=False)))
    return np.concatenate(out)


def distill_gcond(T: GraphDataset, config: DistillConfig, init_features: Optional[np.ndarray] = None,
                  init_logits: Optional[np.ndarray] = None, logit_scale: float = 3.0) -> DistilledGraph:
    """Gradient matching over synthetic features ``Xp`` and adjacency logits ``Z``.

    Per outer iteration: draw fresh classifier parameters, take one Adam step
    on ``(Xp, Z)`` against the matching loss, then ``inner_steps`` SGD steps of
    the classifier on the synthetic graph. ``Z`` starts from the induced
    subgraph of the sampled seed nodes (``+-logit_scale``). The output
    adjacency thresholds the symmetric sigmoid at 0.5.
    """
    torch = _torch()
    budgets = class_budgets(T.class_counts, config.r)
    rng = np.random.default_rng(config.seed)
    Yp_np = _labels_from_budgets(budgets)
    n, d, C = len(Yp_np), T.X.shape[1], T.n_classes
    if init_features is None:
        X0, seed_idx = _init_from_real(T, budgets, rng)
        A0 = _induced(T.A, seed_idx)
        A0 = ((A0 + A0.T) > 0).toarray().astype(np.float64)
        Z0 = logit_scale * (2.0 * A0 - 1.0)
    else:
        X0 = np.array(init_features, dtype=np.float64)
        Z0 = np.full((n, n), -logit_scale) if init_logits is None else np.array(init_logits, dtype=np.float64)
    if X0.shape != (n, d) or Z0.shape != (n, n):
        raise ShapeMismatch(f"init shapes {X0.shape}, {Z0.shape} do not fit n={n}, d={d}")

    gen = torch.Generator().manual_seed(int(config.seed))
    Xp = torch.tensor(X0, dtype=torch.float64, requires_grad=True)
    Z = torch.tensor(Z0, dtype=torch.float64, requires_grad=True)
    Yp = torch.tensor(Yp_np)
    X_real = torch.tensor(T.X, dtype=torch.float64)
    MX_real = torch.tensor(neighbor_mean_operator(T.A) @ T.X, dtype=torch.float64)
    y_real = torch.tensor(T.y)
    opt = torch.optim.Adam([{"params": [Xp], "lr": config.lr_feat}, {"params": [Z], "lr": config.lr_adj}])

    probe_gen = torch.Generator().manual_seed(int(config.seed) + 7919)
    probe_rng = np.random.default_rng([config.seed, 2])
    probes = []
    for _ in range(config.n_probes):
        theta = draw_theta(probe_gen, d, config.encoder_width, C)
        batch = torch.tensor(_balanced_batch(T.y, C, config.batch_per_class, probe_rng))
        probes.append((theta, batch))

    def probe_loss() -> float:
        vals = [float(gcond_matching_loss(Xp, Z, Yp, X_real[b], MX_real[b], y_real[b], th, C).detach()) for th, b in probes]
        return float(np.mean(vals))

    trace = [probe_loss()]
    _check_finite(trace[0], "gradient-matching loss")
    theta = None
    for it in range(config.iterations):
        if it % config.theta_refresh == 0:
            theta = draw_theta(gen, d, config.encoder_width, C)
        batch = torch.tensor(_balanced_batch(T.y, C, config.batch_per_class, rng))
        loss = gcond_matching_loss(Xp, Z, Yp, X_real[batch], MX_real[batch], y_real[batch], theta, C)
        _check_finite(float(loss.detach()), "gradient-matching loss")
        opt.zero_grad()
        loss.backward()
        opt.step()
        with torch.no_grad():
            Xs = Xp.detach().clone()
            MXs = soft_neighbor_mean(soft_adjacency(Z), Xs)
        for _ in range(config.inner_steps):
            inner = classifier_loss(Xs, MXs, Yp, theta, C)
            grads = torch.autograd.grad(inner, theta)
            with torch.no_grad():
                for p, g in zip(theta, grads):
                    p -= config.lr_model * g
        trace.append(probe_loss())
        _check_finite(trace[-1], "gradient-matching loss")

    with torch.no_grad():
        Ap = (soft_adjacency(Z) > 0.5).numpy().astype(np.float64)
    np.fill_diagonal(Ap, 0.0)
    return DistilledGraph(
        Xp.detach().numpy().copy(), sp.csr_matrix(Ap), Yp_np, dict(T.class_names),
        provenance={"config": asdict(config), "budgets": budgets.tolist(), "loss_trace": trace},
    )


_STRATEGIES = {
    "random": distill_random,
    "herding": distill_herding,
    "kcenter": distill_kcenter,
    "gcdm": distill_gcdm,
    "gcond": distill_gcond,
}


def distill(T: GraphDataset, config: DistillConfig) -> DistilledGraph:
    """Filter rare classes, then run ``config.method`` on what remains."""
    if config.method in DECLARED_SLOTS:
        raise StrategyNotImplemented(config.method)
    if config.method not in _STRATEGIES:
        raise ValueError(f"unknown distillation method {config.method!r}")
    kept, removed = filter_rare_classes(T, config.rare_class_threshold)
    out = _STRATEGIES[config.method](kept, config)
    out.provenance["removed_classes"] = removed
    out.provenance["kept_nodes"] = kept.n_nodes
    return out


# -- serialization -------------------------------------------------------------------------


def write_distilled(S: DistilledGraph, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_feature_matrix(directory / "features.bin", S.Xp)
    with open(directory / "labels.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for j, c in enumerate(S.Yp.tolist()):
            fh.write(json.dumps({"index": j, "label": c, "class": S.class_names[c]}) + "\n")
    A = sp.csr_matrix(S.Ap)
    A.sort_indices()
    write_csr_blob(directory / "adjacency.csr", A.indptr, A.indices, np.arange(A.nnz))
    prov = dict(S.provenance)
    prov["class_names"] = {str(k): v for k, v in S.class_names.items()}
    prov["n_nodes"] = S.n_nodes
    prov["n_edges"] = int(A.nnz)
    if S.origin is not None:
        prov["origin"] = S.origin.tolist()
    prov["checksums"] = {f: sha256_file(directory / f) for f in ("features.bin", "labels.jsonl", "adjacency.csr")}
    path = directory / "provenance.json"
    path.write_text(canonical_json(prov))
    return path


def read_distilled(directory) -> DistilledGraph:
    directory = Path(directory)
    ppath = directory / "provenance.json"
    if not ppath.exists():
        raise MissingArtifact(str(ppath))
    prov = json.loads(ppath.read_text())
    verify_checksums(directory, prov.pop("checksums"))
    X = read_feature_matrix(directory / "features.bin").astype(np.float64)
    with open(directory / "labels.jsonl", encoding="utf-8") as fh:
        y = np.array([json.loads(line)["label"] for line in fh], dtype=np.int64)
    n = prov.pop("n_nodes")
    nnz = prov.pop("n_edges")
    indptr, col, _ = read_csr_blob(directory / "adjacency.csr", n, nnz)
    A = sp.csr_matrix((np.ones(nnz), col, indptr), shape=(n, n))
    names = {int(k): v for k, v in prov.pop("class_names").items()}
    origin = prov.pop("origin", None)
    return DistilledGraph(X, A, y, names, None if origin is None else np.array(origin, dtype=np.int64), prov)
