"""LSTM activity predictor with explicit gates and hand-written BPTT.

One scalar input per time step. Gate equations:

    f_t = sigmoid(W_f [h_{t-1}, x_t] + b_f)
    i_t = sigmoid(W_i [h_{t-1}, x_t] + b_i)
    C_t = f_t * C_{t-1} + i_t * tanh(W_C [h_{t-1}, x_t] + b_C)
    h_t = sigmoid(W_o [h_{t-1}, x_t] + b_o) * tanh(C_t)

followed by a linear head to a scalar prediction. The backward pass is
verified against central finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .._rng import stream
from ..temporal import ActivitySeries
from .common import Adam, TrainReport, init_uniform, sigmoid

GATES = ("f", "i", "c", "o")


@dataclass(frozen=True)
class LstmConfig:
    window: int = 5
    hidden: int = 64
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 100
    holdout: float = 0.2  # fraction of samples held out for evaluation

    def __post_init__(self):
        if min(self.window, self.hidden, self.batch_size, self.epochs) < 1:
            raise ValueError("window, hidden, batch_size, epochs must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


def init_lstm_params(config: LstmConfig, seed: int = 0) -> dict[str, np.ndarray]:
    rng = stream(seed, "lstm-init")
    h = config.hidden
    fan_in = h + 1
    params: dict[str, np.ndarray] = {}
    for g in GATES:
        params[f"W_{g}"] = init_uniform(rng, (h, fan_in), fan_in)
        params[f"b_{g}"] = init_uniform(rng, (h,), fan_in)
    params["w_head"] = init_uniform(rng, (h,), h)
    params["b_head"] = init_uniform(rng, (1,), h)
    return params


def lstm_forward(params: dict[str, np.ndarray], x: np.ndarray,
                 ) -> tuple[np.ndarray, dict]:
    """Forward over a batch of sequences.

    ``x`` has shape (batch, steps); returns (predictions of shape (batch,),
    cache of per-step activations for the backward pass). Rejects NaN/Inf
    inputs.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if not np.isfinite(x).all():
        raise ValueError("input sequence contains NaN or Inf")
    batch, steps = x.shape
    h_dim = params["w_head"].shape[0]
    h = np.zeros((batch, h_dim))
    c = np.zeros((batch, h_dim))
    cache: dict = {"x": x, "steps": []}
    for t in range(steps):
        z = np.concatenate([h, x[:, t:t + 1]], axis=1)
        f = sigmoid(z @ params["W_f"].T + params["b_f"])
        i = sigmoid(z @ params["W_i"].T + params["b_i"])
        c_tilde = np.tanh(z @ params["W_c"].T + params["b_c"])
        c_prev = c
        c = f * c_prev + i * c_tilde
        o = sigmoid(z @ params["W_o"].T + params["b_o"])
        tc = np.tanh(c)
        h = o * tc
        cache["steps"].append(
            {"z": z, "f": f, "i": i, "c_tilde": c_tilde, "o": o,
             "c_prev": c_prev, "c": c, "tc": tc})
    pred = h @ params["w_head"] + params["b_head"][0]
    cache["h_final"] = h
    return pred, cache


def lstm_loss(pred: np.ndarray, target: np.ndarray) -> float:
    diff = pred - target
    return float((diff * diff).mean())


def lstm_backward(params: dict[str, np.ndarray], cache: dict,
                  pred: np.ndarray, target: np.ndarray,
                  ) -> dict[str, np.ndarray]:
    """Gradients of the MSE loss with respect to every parameter."""
    batch = len(pred)
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    dpred = 2.0 * (pred - target) / batch
    grads["w_head"] = cache["h_final"].T @ dpred
    grads["b_head"] = np.array([dpred.sum()])
    dh = np.outer(dpred, params["w_head"])
    dc_next = np.zeros_like(dh)
    h_dim = dh.shape[1]
    for step in reversed(cache["steps"]):
        f, i, o = step["f"], step["i"], step["o"]
        c_tilde, tc, c_prev, z = step["c_tilde"], step["tc"], step["c_prev"], step["z"]
        do = dh * tc
        dc = dc_next + dh * o * (1.0 - tc * tc)
        df = dc * c_prev
        di = dc * c_tilde
        dct = dc * i
        dc_next = dc * f
        pre = {
            "f": df * f * (1.0 - f),
            "i": di * i * (1.0 - i),
            "c": dct * (1.0 - c_tilde * c_tilde),
            "o": do * o * (1.0 - o),
        }
        dz = np.zeros_like(z)
        for g in GATES:
            grads[f"W_{g}"] += pre[g].T @ z
            grads[f"b_{g}"] += pre[g].sum(axis=0)
            dz += pre[g] @ params[f"W_{g}"]
        dh = dz[:, :h_dim]
    return grads


# -- dataset assembly ----------------------------------------------------------

@dataclass
class SlidingWindowDataset:
    x: np.ndarray  # (samples, window) standardized inputs
    y: np.ndarray  # (samples,) standardized next-step targets
    mean: np.ndarray  # per-sample contributor mean (original scale)
    sd: np.ndarray  # per-sample contributor sd


def sliding_window_dataset(series: Sequence[ActivitySeries],
                           window: int = 5) -> SlidingWindowDataset:
    """Per-contributor standardized sliding windows with next-step targets.

    Series shorter than window + 1 quarters are excluded. A constant series
    standardizes to zeros (its sd is kept as 1 to avoid dividing by zero).
    """
    xs, ys, mus, sds = [], [], [], []
    for s in series:
        v = s.values
        if len(v) < window + 1:
            continue
        mu = v.mean()
        sd = v.std()
        scale = sd if sd > 0 else 1.0
        z = (v - mu) / scale
        for t in range(len(v) - window):
            xs.append(z[t:t + window])
            ys.append(z[t + window])
            mus.append(mu)
            sds.append(scale)
    if not xs:
        raise ValueError("no series long enough for the sliding window")
    return SlidingWindowDataset(np.array(xs), np.array(ys),
                                np.array(mus), np.array(sds))


def lstm_train(config: LstmConfig, series: Sequence[ActivitySeries],
               seed: int = 0) -> tuple[dict[str, np.ndarray], TrainReport]:
    """Train with Adam on MSE; report held-out MAPE and burst metrics.

    The held-out split is a seeded sample permutation. A predicted (or
    actual) burst is a standardized value strictly above 2, i.e. the
    contributor's own z = 2 level.
    """
    data = sliding_window_dataset(series, config.window)
    n = len(data.y)
    rng = stream(seed, "lstm-train")
    perm = rng.permutation(n)
    n_test = max(1, int(round(config.holdout * n))) if n > 1 else 0
    test_idx = perm[:n_test]
    train_idx = perm[n_test:]
    if len(train_idx) == 0:
        raise ValueError("no training samples after holdout")

    params = init_lstm_params(config, seed)
    opt = Adam(params, lr=config.learning_rate)
    loss_curve: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(len(train_idx))
        epoch_loss = 0.0
        batches = 0
        for start in range(0, len(order), config.batch_size):
            idx = train_idx[order[start:start + config.batch_size]]
            pred, cache = lstm_forward(params, data.x[idx])
            grads = lstm_backward(params, cache, pred, data.y[idx])
            opt.step(params, grads)
            epoch_loss += lstm_loss(pred, data.y[idx])
            batches += 1
        loss_curve.append(epoch_loss / batches)

    metrics: dict = {"train_samples": int(len(train_idx)),
                     "test_samples": int(len(test_idx))}
    if n_test:
        pred, _ = lstm_forward(params, data.x[test_idx])
        truth = data.y[test_idx]
        pred_orig = pred * data.sd[test_idx] + data.mean[test_idx]
        truth_orig = truth * data.sd[test_idx] + data.mean[test_idx]
        nonzero = np.abs(truth_orig) > 1e-9
        if nonzero.any():
            metrics["mape"] = float(np.mean(
                np.abs(pred_orig[nonzero] - truth_orig[nonzero])
                / np.abs(truth_orig[nonzero])))
        pred_burst = pred > 2.0
        true_burst = truth > 2.0
        tp = int((pred_burst & true_burst).sum())
        metrics["burst_precision"] = tp / int(pred_burst.sum()) if pred_burst.any() else None
        metrics["burst_recall"] = tp / int(true_burst.sum()) if true_burst.any() else None
    return params, TrainReport(loss_curve=loss_curve, metrics=metrics, seed=seed)
