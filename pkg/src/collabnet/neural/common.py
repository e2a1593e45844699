"""Shared pieces for the desk-scale neural models: initialization, Adam,
activation helpers, train reports, and flat-binary checkpoints."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class TrainReport:
    loss_curve: list[float]
    metrics: dict
    seed: int


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def init_uniform(rng: np.random.Generator, shape: tuple[int, ...],
                 fan_in: int) -> np.ndarray:
    """Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Adam:
    """Adam with the conventional moment defaults, applied to a parameter
    dict in sorted-key order so updates are reproducible."""

    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray],
             grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for k in sorted(params):
            g = grads[k]
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g
            m_hat = self.m[k] / b1t
            v_hat = self.v[k] / b2t
            params[k] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def save_params(params: dict[str, np.ndarray], bin_path: str | Path,
                manifest_path: str | Path) -> None:
    """Checkpoint as one flat float64 binary plus a JSON shape manifest."""
    names = sorted(params)
    flat = np.concatenate([params[k].ravel().astype(np.float64) for k in names])
    flat.tofile(str(bin_path))
    manifest = {k: list(params[k].shape) for k in names}
    Path(manifest_path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_params(bin_path: str | Path, manifest_path: str | Path,
                ) -> dict[str, np.ndarray]:
    manifest = json.loads(Path(manifest_path).read_text())
    flat = np.fromfile(str(bin_path), dtype=np.float64)
    params = {}
    pos = 0
    for k in sorted(manifest):
        shape = tuple(manifest[k])
        size = int(np.prod(shape)) if shape else 1
        params[k] = flat[pos:pos + size].reshape(shape)
        pos += size
    if pos != len(flat):
        raise ValueError("checkpoint size does not match manifest")
    return params


def f1_scores(y_true: np.ndarray, y_pred: np.ndarray,
              n_classes: int) -> list[float | None]:
    """Per-class F1; None for classes absent from both truth and prediction."""
    out: list[float | None] = []
    for c in range(n_classes):
        tp = int(((y_pred == c) & (y_true == c)).sum())
        fp = int(((y_pred == c) & (y_true != c)).sum())
        fn = int(((y_pred != c) & (y_true == c)).sum())
        if tp + fp + fn == 0:
            out.append(None)
            continue
        denom = 2 * tp + fp + fn
        out.append(2.0 * tp / denom if denom else 0.0)
    return out
