"""Per-contributor activity series: burst detection, OLS trend tests, and
sliding-window change-point detection.

Bursts use the contributor's own history as the reference distribution:
quarter t is a burst when (a(t) - mean) / sd > theta, with the population
standard deviation (1/T normalization) and a strict inequality at the
threshold. A value sitting exactly at theta is therefore not a burst.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special


@dataclass
class ActivitySeries:
    contributor_id: str
    windows: list[str]
    values: np.ndarray  # non-negative reals, aligned with windows

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != len(self.windows):
            raise ValueError("values and windows must have equal length")

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def stddev(self) -> float:
        return float(self.values.std())  # population form


@dataclass(frozen=True)
class BurstEvent:
    contributor_id: str
    window: str
    z_score: float
    value: float


@dataclass
class TrendFit:
    slope: float
    intercept: float
    f_stat: Optional[float]
    p_value: Optional[float]
    r_squared: float
    degenerate: bool = False  # zero variance in y


@dataclass
class ChangePointResult:
    indices: list[int]
    too_short: bool = False


def detect_bursts(series: ActivitySeries, theta: float = 2.0) -> list[BurstEvent]:
    """Quarters where the contributor's z-score strictly exceeds theta.

    A constant series (sd = 0) has no bursts; series shorter than 2
    quarters yield no events either (no distribution to compare against).
    """
    if len(series.values) < 2:
        return []
    mu = series.mean
    sd = series.stddev
    if sd == 0:
        return []
    out = []
    for t, v in enumerate(series.values):
        z = (v - mu) / sd
        if z > theta:
            out.append(BurstEvent(series.contributor_id, series.windows[t],
                                  float(z), float(v)))
    return out


def burst_histogram(events: Sequence[BurstEvent],
                    contributors: Sequence[str] = ()) -> dict[int, int]:
    """Count contributors by how many bursts they had.

    Contributors listed in ``contributors`` but with no events are counted
    under key 0. With no events and no contributor universe the histogram
    is empty.
    """
    per: dict[str, int] = {cid: 0 for cid in contributors}
    for ev in events:
        per[ev.contributor_id] = per.get(ev.contributor_id, 0) + 1
    hist: dict[int, int] = {}
    for count in per.values():
        hist[count] = hist.get(count, 0) + 1
    return hist


def _f_sf(f: float, d1: int, d2: int) -> float:
    """Survival function of the F(d1, d2) distribution via the regularized
    incomplete beta function."""
    if f <= 0:
        return 1.0
    x = d2 / (d2 + d1 * f)
    return float(special.betainc(d2 / 2.0, d1 / 2.0, x))


def ols_trend(values: Sequence[float]) -> TrendFit:
    """Least-squares linear trend y = a + b*t over t = 0..n-1.

    The F statistic is MS_regression / MS_residual with (1, n-2) degrees of
    freedom; a constant series has slope 0 and an undefined F (flagged).
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    if n < 3:
        raise ValueError("trend test needs at least 3 points")
    t = np.arange(n, dtype=float)
    if y.var() == 0:
        return TrendFit(slope=0.0, intercept=float(y[0]), f_stat=None,
                        p_value=None, r_squared=0.0, degenerate=True)
    t_c = t - t.mean()
    slope = float((t_c * (y - y.mean())).sum() / (t_c * t_c).sum())
    intercept = float(y.mean() - slope * t.mean())
    fitted = intercept + slope * t
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_reg = ss_tot - ss_res
    r2 = 1.0 - ss_res / ss_tot
    if ss_res <= 1e-300 * max(1.0, ss_tot):  # exact fit: F blows up
        return TrendFit(slope, intercept, f_stat=math.inf, p_value=0.0,
                        r_squared=1.0)
    f = ss_reg / (ss_res / (n - 2))
    return TrendFit(slope, intercept, f_stat=f, p_value=_f_sf(f, 1, n - 2),
                    r_squared=r2)


def change_points(values: Sequence[float], w: int, tau: float = 1.5,
                  ) -> ChangePointResult:
    """Indices where adjacent window means jump by more than tau * sd.

    For each t in [w, n-w], compare mean(values[t-w:t]) with
    mean(values[t:t+w]); t is flagged when the absolute difference exceeds
    tau times the whole-series standard deviation. Runs of consecutive
    flagged indices are merged to the index with the largest jump (first
    such index on ties). Constant series produce no change points.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if w < 1:
        raise ValueError("window size must be >= 1")
    if n < 2 * w + 1:
        return ChangePointResult(indices=[], too_short=True)
    sd = x.std()
    if sd == 0:
        return ChangePointResult(indices=[])
    deltas = {}
    flagged = []
    for t in range(w, n - w + 1):
        delta = abs(x[t - w:t].mean() - x[t:t + w].mean())
        deltas[t] = delta
        if delta > tau * sd:
            flagged.append(t)
    merged: list[int] = []
    run: list[int] = []
    for t in flagged + [None]:  # type: ignore[list-item]
        if run and (t is None or t != run[-1] + 1):
            best = max(run, key=lambda i: (deltas[i], -i))
            merged.append(best)
            run = []
        if t is not None:
            run.append(t)
    return ChangePointResult(indices=merged)


def build_activity_series(dataset) -> list[ActivitySeries]:
    """Per-contributor total action counts per quarter, over the dataset's
    full window span (quarters without activity count 0)."""
    windows = dataset.windows
    pos = {wlabel: k for k, wlabel in enumerate(windows)}
    per: dict[str, np.ndarray] = {}
    for rec, label in zip(dataset.records, dataset.labels):
        if rec.contributor_id not in per:
            per[rec.contributor_id] = np.zeros(len(windows))
        per[rec.contributor_id][pos[label]] += rec.count
    return [ActivitySeries(cid, list(windows), per[cid]) for cid in sorted(per)]
