"""Two-layer graph convolutional role classifier with manual backprop.

Each layer computes ReLU(S H W) where S = D^{-1/2} (A + I) D^{-1/2} is the
self-loop-normalized adjacency; a linear head maps the second layer's 64
hidden units to 5 class logits. Dropout (inverted) acts on the hidden
activations between the layers, during training only.

Neighbor aggregation sums each node's messages in ascending value order
(canonical summation). Floating-point addition then sees an identical
sequence regardless of how nodes are labeled, which makes the forward pass
exactly equivariant under node permutations, not just up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .._rng import stream
from ..graph import TemporalGraph
from .common import Adam, TrainReport, f1_scores, init_uniform, softmax


@dataclass(frozen=True)
class GcnConfig:
    in_features: int = 3  # degree centrality, local clustering, neighbor count
    hidden: int = 64
    dropout: float = 0.3
    classes: int = 5
    learning_rate: float = 0.01
    epochs: int = 50

    def __post_init__(self):
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must be in [0, 1)")
        if min(self.in_features, self.hidden, self.classes, self.epochs) < 1:
            raise ValueError("dimensions and epochs must be positive")


class StratificationError(ValueError):
    pass


@dataclass
class NormalizedAdjacency:
    """S = D^{-1/2} (A + I) D^{-1/2} in COO form, entries sorted by row."""

    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    n: int
    row_starts: np.ndarray  # first entry index per row (every row has >= 1)


def normalized_adjacency(graph: TemporalGraph) -> NormalizedAdjacency:
    n = graph.node_count
    if n == 0:
        raise ValueError("empty graph")
    counts = np.diff(graph.indptr)
    rows = np.concatenate([np.repeat(np.arange(n), counts), np.arange(n)])
    cols = np.concatenate([graph.indices, np.arange(n)])
    vals = np.concatenate([graph.weights, np.ones(n)])
    deg = np.zeros(n)
    np.add.at(deg, rows, vals)
    inv_sqrt = 1.0 / np.sqrt(deg)
    vals = vals * inv_sqrt[rows] * inv_sqrt[cols]
    order = np.argsort(rows, kind="stable")
    rows, cols, vals = rows[order], cols[order], vals[order]
    row_starts = np.searchsorted(rows, np.arange(n), side="left")
    return NormalizedAdjacency(rows=rows, cols=cols, vals=vals, n=n,
                               row_starts=row_starts)


def _aggregate(adj: NormalizedAdjacency, m: np.ndarray) -> np.ndarray:
    """S @ m with per-node messages summed in ascending value order.

    Sorting the summands canonicalizes the float addition sequence, so the
    result is invariant under any relabeling of the graph's nodes.
    """
    contrib = adj.vals[:, None] * m[adj.cols]
    out = np.empty((adj.n, m.shape[1]))
    for d in range(m.shape[1]):
        order = np.lexsort((contrib[:, d], adj.rows))
        out[:, d] = np.add.reduceat(contrib[order, d], adj.row_starts)
    return out


def init_gcn_params(config: GcnConfig, seed: int = 0) -> dict[str, np.ndarray]:
    rng = stream(seed, "gcn-init")
    p = {
        "W0": init_uniform(rng, (config.in_features, config.hidden), config.in_features),
        "W1": init_uniform(rng, (config.hidden, config.hidden), config.hidden),
        "W2": init_uniform(rng, (config.hidden, config.classes), config.hidden),
        "b2": init_uniform(rng, (config.classes,), config.hidden),
    }
    return p


def gcn_forward(config: GcnConfig, params: dict[str, np.ndarray],
                adj: NormalizedAdjacency, features: np.ndarray,
                dropout_rng: Optional[np.random.Generator] = None,
                ) -> tuple[np.ndarray, dict]:
    """Class logits per node, plus the cache for backprop.

    Dropout is active only when ``dropout_rng`` is supplied (training mode).
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[1] != config.in_features:
        raise ValueError(
            f"feature matrix must be N x {config.in_features}, got {X.shape}")
    if X.shape[0] != adj.n:
        raise ValueError("feature rows must match graph nodes")
    z0 = _aggregate(adj, X @ params["W0"])
    h1 = np.maximum(z0, 0.0)
    if dropout_rng is not None and config.dropout > 0:
        keep = 1.0 - config.dropout
        mask = (dropout_rng.random(h1.shape) < keep) / keep
    else:
        mask = np.ones_like(h1)
    h1d = h1 * mask
    z1 = _aggregate(adj, h1d @ params["W1"])
    h2 = np.maximum(z1, 0.0)
    logits = h2 @ params["W2"] + params["b2"]
    cache = {"X": X, "z0": z0, "h1": h1, "mask": mask, "h1d": h1d,
             "z1": z1, "h2": h2}
    return logits, cache


def gcn_loss(logits: np.ndarray, labels: np.ndarray,
             subset: Optional[np.ndarray] = None) -> float:
    """Mean cross-entropy over ``subset`` (default: all nodes)."""
    if subset is None:
        subset = np.arange(len(labels))
    probs = softmax(logits[subset])
    picked = probs[np.arange(len(subset)), labels[subset]]
    return float(-np.log(np.maximum(picked, 1e-300)).mean())


def gcn_backward(config: GcnConfig, params: dict[str, np.ndarray],
                 cache: dict, logits: np.ndarray, labels: np.ndarray,
                 adj: NormalizedAdjacency,
                 subset: Optional[np.ndarray] = None) -> dict[str, np.ndarray]:
    """Gradients of the subset-mean cross-entropy for every parameter."""
    n = len(labels)
    if subset is None:
        subset = np.arange(n)
    dlogits = np.zeros_like(logits)
    probs = softmax(logits[subset])
    probs[np.arange(len(subset)), labels[subset]] -= 1.0
    dlogits[subset] = probs / len(subset)

    grads = {}
    grads["W2"] = cache["h2"].T @ dlogits
    grads["b2"] = dlogits.sum(axis=0)
    dh2 = dlogits @ params["W2"].T
    dz1 = dh2 * (cache["z1"] > 0)
    dm1 = _aggregate(adj, dz1)  # S is symmetric
    grads["W1"] = cache["h1d"].T @ dm1
    dh1d = dm1 @ params["W1"].T
    dh1 = dh1d * cache["mask"]
    dz0 = dh1 * (cache["z0"] > 0)
    dm0 = _aggregate(adj, dz0)
    grads["W0"] = cache["X"].T @ dm0
    return grads


# -- splits and training ---------------------------------------------------------

def stratified_split(labels: np.ndarray, seed: int,
                     fractions: tuple[float, float, float] = (0.7, 0.15, 0.15),
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeded 70/15/15 split, stratified by class.

    Each class present in ``labels`` contributes proportionally to each
    split, with at least one member kept for training. A class that cannot
    be represented in the training split raises ``StratificationError``.
    """
    rng = stream(seed, "gcn-split")
    train, val, test = [], [], []
    for c in np.unique(labels):
        members = np.nonzero(labels == c)[0]
        members = members[rng.permutation(len(members))]
        n_c = len(members)
        n_train = max(1, int(round(fractions[0] * n_c)))
        n_val = int(round(fractions[1] * n_c))
        n_val = min(n_val, n_c - n_train)
        train.extend(members[:n_train])
        val.extend(members[n_train:n_train + n_val])
        test.extend(members[n_train + n_val:])
    train_idx = np.sort(np.array(train, dtype=np.int64))
    if len(np.unique(labels[train_idx])) != len(np.unique(labels)):
        raise StratificationError("a class is absent from the training split")
    return (train_idx, np.sort(np.array(val, dtype=np.int64)),
            np.sort(np.array(test, dtype=np.int64)))


def standardize_features(features: np.ndarray) -> np.ndarray:
    """Column z-scores; zero-variance columns map to zeros."""
    X = np.asarray(features, dtype=float)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd == 0, 1.0, sd)
    return (X - mu) / sd


def gcn_train(config: GcnConfig, graph: TemporalGraph, features: np.ndarray,
              labels: np.ndarray, seed: int = 0,
              ) -> tuple[dict[str, np.ndarray], TrainReport]:
    """Full-batch Adam training; reports test accuracy, macro-F1, and
    per-class F1. Deterministic for a fixed seed."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != graph.node_count:
        raise ValueError("labels must cover all nodes")
    adj = normalized_adjacency(graph)
    X = standardize_features(features)
    train_idx, val_idx, test_idx = stratified_split(labels, seed)
    params = init_gcn_params(config, seed)
    opt = Adam(params, lr=config.learning_rate)
    drop_rng = stream(seed, "gcn-dropout")
    loss_curve = []
    for _ in range(config.epochs):
        logits, cache = gcn_forward(config, params, adj, X, dropout_rng=drop_rng)
        loss_curve.append(gcn_loss(logits, labels, train_idx))
        grads = gcn_backward(config, params, cache, logits, labels, adj, train_idx)
        opt.step(params, grads)

    logits, _ = gcn_forward(config, params, adj, X)
    pred = logits.argmax(axis=1)
    per_class = f1_scores(labels[test_idx], pred[test_idx], config.classes)
    present = [f for f in per_class if f is not None]
    metrics = {
        "accuracy": float((pred[test_idx] == labels[test_idx]).mean()),
        "val_accuracy": float((pred[val_idx] == labels[val_idx]).mean()) if len(val_idx) else None,
        "macro_f1": float(np.mean(present)) if present else None,
        "per_class_f1": per_class,
        "train_size": int(len(train_idx)),
        "val_size": int(len(val_idx)),
        "test_size": int(len(test_idx)),
    }
    return params, TrainReport(loss_curve=loss_curve, metrics=metrics, seed=seed)
