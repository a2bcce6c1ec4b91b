"""Two-layer mean-aggregation node-type classifier and misclassification detector.

Layer ``l`` computes ``H W_self + meanN(H) W_neigh + b`` where ``meanN`` averages
over in- and out-neighbors (zero for isolated nodes). Gradients are written out
by hand; ``tests/test_gnn.py`` checks them against central differences.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .binio import read_json_blob, write_json_blob
from .errors import FormatError, NonFiniteLoss, ShapeMismatch, SingleClass

PARAM_ORDER = ("W_self_1", "W_neigh_1", "b_1", "W_self_2", "W_neigh_2", "b_2")
MOMENTUM = 0.9


@dataclass(frozen=True)
class TrainConfig:
    hidden: int = 64
    epochs: int = 25
    lr: float = 0.1
    weight_decay: float = 5e-4
    seed: int = 0


@dataclass
class SageModel:
    params: dict[str, np.ndarray]
    class_names: dict[int, str]
    config: TrainConfig = field(default_factory=TrainConfig)

    @property
    def in_dim(self) -> int:
        return self.params["W_self_1"].shape[0]

    @property
    def n_classes(self) -> int:
        return self.params["b_2"].shape[0]


def init_model(in_dim: int, class_names: dict[int, str], config: TrainConfig = TrainConfig()) -> SageModel:
    """Glorot-uniform self weights; neighbor weights and biases start at zero.

    Zero neighbor weights keep a model trained on an edge-less condensed graph
    from applying untrained random projections to real neighborhoods later.
    """
    rng = np.random.default_rng(config.seed)
    C, h = len(class_names), config.hidden

    def glorot(fan_in, fan_out):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, size=(fan_in, fan_out))

    params = {
        "W_self_1": glorot(in_dim, h),
        "W_neigh_1": np.zeros((in_dim, h)),
        "b_1": np.zeros(h),
        "W_self_2": glorot(h, C),
        "W_neigh_2": np.zeros((h, C)),
        "b_2": np.zeros(C),
    }
    return SageModel(params, dict(class_names), config)


def neighbor_mean_operator(A) -> sp.csr_matrix:
    """Sparse ``M`` with ``M @ H`` = mean over in+out neighbors (parallel directions counted)."""
    A = sp.csr_matrix(A, dtype=np.float64)
    B = sp.csr_matrix(A + A.T)
    deg = np.asarray(B.sum(axis=1)).ravel()
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    return sp.csr_matrix(sp.diags(inv) @ B)


def _forward(params, X, M):
    MX = M @ X
    Z1 = X @ params["W_self_1"] + MX @ params["W_neigh_1"] + params["b_1"]
    H1 = np.maximum(Z1, 0.0)
    MH1 = M @ H1
    logits = H1 @ params["W_self_2"] + MH1 @ params["W_neigh_2"] + params["b_2"]
    return logits, (MX, Z1, H1, MH1)


def forward(model: SageModel, X, A, M: Optional[sp.csr_matrix] = None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.in_dim:
        raise ShapeMismatch(f"X has shape {X.shape}, model expects {model.in_dim} columns")
    if M is None:
        if A.shape != (X.shape[0], X.shape[0]):
            raise ShapeMismatch(f"A has shape {A.shape}, expected {(X.shape[0], X.shape[0])}")
        M = neighbor_mean_operator(A)
    return _forward(model.params, X, M)[0]


def _softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grads(params, X, M, y, weight_decay: float = 0.0):
    """Mean cross-entropy plus ``weight_decay/2 * sum ||W||^2`` (weights only) and its gradient."""
    n = len(y)
    logits, (MX, Z1, H1, MH1) = _forward(params, X, M)
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -logp[np.arange(n), y].mean()
    dL = np.exp(logp)
    dL[np.arange(n), y] -= 1.0
    dL /= n

    g = {
        "W_self_2": H1.T @ dL,
        "W_neigh_2": MH1.T @ dL,
        "b_2": dL.sum(axis=0),
    }
    dH1 = dL @ params["W_self_2"].T + M.T @ (dL @ params["W_neigh_2"].T)
    dZ1 = dH1 * (Z1 > 0)
    g["W_self_1"] = X.T @ dZ1
    g["W_neigh_1"] = MX.T @ dZ1
    g["b_1"] = dZ1.sum(axis=0)
    if weight_decay:
        for k in ("W_self_1", "W_neigh_1", "W_self_2", "W_neigh_2"):
            loss += 0.5 * weight_decay * float(np.sum(params[k] ** 2))
            g[k] = g[k] + weight_decay * params[k]
    return float(loss), g


def train(model_init: Optional[SageModel], data, epochs: Optional[int] = None, lr: Optional[float] = None,
          weight_decay: Optional[float] = None, seed: Optional[int] = None,
          config: Optional[TrainConfig] = None):
    """Full-batch gradient descent with momentum 0.9 on softmax cross-entropy.

    ``data`` is anything exposing ``X``, ``A``, ``y`` and ``class_names``
    (a ``GraphDataset`` or ``DistilledGraph``). Explicit keyword arguments
    override ``config``. Returns ``(model, loss_trace, wall_clock_s)`` where the
    trace holds ``epochs + 1`` losses: before each update and after the last.
    """
    cfg = config or (model_init.config if model_init is not None else TrainConfig())
    overrides = {k: v for k, v in
                 {"epochs": epochs, "lr": lr, "weight_decay": weight_decay, "seed": seed}.items()
                 if v is not None}
    cfg = TrainConfig(**{**asdict(cfg), **overrides})
    y = np.asarray(data.y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise SingleClass("training labels cover fewer than two classes")
    X = np.asarray(data.X, dtype=np.float64)
    model = model_init if model_init is not None else init_model(X.shape[1], data.class_names, cfg)
    if X.shape[1] != model.in_dim:
        raise ShapeMismatch(f"features have {X.shape[1]} columns, model expects {model.in_dim}")
    params = {k: v.astype(np.float64, copy=True) for k, v in model.params.items()}
    velocity = {k: np.zeros_like(v) for k, v in params.items()}

    start = time.perf_counter()
    M = neighbor_mean_operator(data.A)
    trace = []
    for _ in range(cfg.epochs):
        loss, grads = loss_and_grads(params, X, M, y, cfg.weight_decay)
        if not np.isfinite(loss):
            raise NonFiniteLoss("classifier loss became non-finite; lower the learning rate")
        trace.append(loss)
        for k in PARAM_ORDER:
            velocity[k] = MOMENTUM * velocity[k] - cfg.lr * grads[k]
            params[k] = params[k] + velocity[k]
    final, _ = loss_and_grads(params, X, M, y, cfg.weight_decay)
    if not np.isfinite(final):
        raise NonFiniteLoss("classifier loss became non-finite; lower the learning rate")
    trace.append(final)
    elapsed = time.perf_counter() - start
    return SageModel(params, dict(model.class_names), cfg), trace, elapsed


def predict(model: SageModel, data, M: Optional[sp.csr_matrix] = None) -> np.ndarray:
    """Argmax of the logits; ``np.argmax`` already resolves ties to the lowest class id."""
    logits = forward(model, data.X, data.A, M)
    return np.argmax(logits, axis=1)


# -- detection -----------------------------------------------------------------------


@dataclass(frozen=True)
class NodeVerdict:
    index: int
    nid: str
    true_type: str
    predicted_class: str
    malicious: bool


@dataclass
class DetectionReport:
    verdicts: list[NodeVerdict]
    confusion: Optional[object] = None
    metrics: Optional[object] = None

    @property
    def flags(self) -> np.ndarray:
        return np.array([v.malicious for v in self.verdicts], dtype=bool)

    def flagged_ids(self) -> list[str]:
        return [v.nid for v in self.verdicts if v.malicious]


def detect(predictions: Sequence[int], true_types: Sequence[str], class_names: dict[int, str],
           removed_classes: Sequence[str] = (), node_ids: Optional[Sequence[str]] = None) -> DetectionReport:
    """Flag a node malicious when its predicted class differs from its recorded type.

    Nodes whose type the model never saw (filtered out as rare, or absent from
    training altogether) cannot be predicted correctly and are always flagged.
    """
    if len(predictions) != len(true_types):
        raise ShapeMismatch("predictions and true types differ in length")
    name_to_id = {name: i for i, name in class_names.items()}
    removed = set(removed_classes)
    if node_ids is None:
        node_ids = [str(i) for i in range(len(true_types))]
    verdicts = []
    for i, (pred, ttype) in enumerate(zip(predictions, true_types)):
        true_id = name_to_id.get(ttype)
        flag = ttype in removed or true_id is None or int(pred) != true_id
        verdicts.append(NodeVerdict(i, node_ids[i], ttype, class_names[int(pred)], bool(flag)))
    return DetectionReport(verdicts)


# -- model file ------------------------------------------------------------------------


def save_model(model: SageModel, path) -> None:
    header = {
        "kind": "sage",
        "in_dim": model.in_dim,
        "hidden": model.config.hidden,
        "n_classes": model.n_classes,
        "class_names": {str(k): v for k, v in model.class_names.items()},
        "config": asdict(model.config),
        "param_order": list(PARAM_ORDER),
    }
    write_json_blob(path, header, [model.params[k] for k in PARAM_ORDER])


def load_model(path) -> SageModel:
    header, arrays = read_json_blob(path)
    if header.get("kind") != "sage" or len(arrays) != len(PARAM_ORDER):
        raise FormatError(f"{path}: not a classifier model file")
    params = {k: a.astype(np.float64) for k, a in zip(header["param_order"], arrays)}
    names = {int(k): v for k, v in header["class_names"].items()}
    return SageModel(params, names, TrainConfig(**header["config"]))
