"""Synthetic data generators with planted ground truth.

Every generator is a pure function of its parameters plus a seed (Philox
streams, one per generator), and returns a manifest echoing the planted
structure so downstream estimators can be scored without regenerating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from ._rng import stream
from .graph import TemporalGraph
from .ingest import ACTIONS, EventRecord, quarter_range
from .temporal import ActivitySeries

BASELINE_POISSON_LAMBDA = 3.0

# how synthetic activity splits across action types (sums to 1)
ACTION_MIX = {
    "commit": 0.35,
    "pull_request_open": 0.15,
    "pull_request_merged": 0.10,
    "pull_request_review_APPROVED": 0.08,
    "pull_request_review_COMMENTED": 0.12,
    "pull_request_review_DISMISSED": 0.02,
    "issue_opened": 0.08,
    "issue_comment": 0.10,
}


# -- preferential attachment ----------------------------------------------------

def gen_preferential_attachment(n: int, m: int, seed: int = 0,
                                ) -> tuple[TemporalGraph, dict]:
    """Barabasi-Albert graph: seed clique K_{m+1}, then each new node
    attaches m distinct edges with probability proportional to degree.

    Connected by construction with exactly C(m+1, 2) + m * (n - m - 1)
    edges. The manifest records the degree sequence.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if n <= m:
        raise ValueError(f"need n > m, got n={n}, m={m}")
    rng = stream(seed, "preferential-attachment")
    edges: dict[tuple[int, int], float] = {}
    endpoints: list[int] = []  # node repeated once per incident edge

    def add_edge(a: int, b: int) -> None:
        edges[(a, b) if a < b else (b, a)] = 1.0
        endpoints.append(a)
        endpoints.append(b)

    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            add_edge(i, j)
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            pick = endpoints[int(rng.integers(0, len(endpoints)))]
            targets.add(pick)
        for t in sorted(targets):
            add_edge(new, t)

    graph = TemporalGraph("synthetic", [f"n{i:05d}" for i in range(n)], edges)
    manifest = {
        "generator": "preferential_attachment",
        "n": n, "m": m, "seed": seed,
        "seed_clique": m + 1,
        "edge_count": graph.edge_count,
        "degrees": graph.degrees().tolist(),
    }
    return graph, manifest


# -- planted partition ------------------------------------------------------------

def gen_planted_partition(sizes: Sequence[int], p_in: float, p_out: float,
                          seed: int = 0) -> tuple[TemporalGraph, np.ndarray, dict]:
    """Independent Bernoulli edges: p_in within a block, p_out between.

    Returns the graph, the true block label per node, and the manifest.
    p_in == p_out is allowed (a no-signal control).
    """
    for p in (p_in, p_out):
        if not 0 <= p <= 1:
            raise ValueError("probabilities must be in [0, 1]")
    if any(s <= 0 for s in sizes):
        raise ValueError("block sizes must be positive")
    rng = stream(seed, "planted-partition")
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = len(labels)
    upper = rng.random((n, n))
    prob = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if upper[i, j] < prob[i, j]:
                edges[(i, j)] = 1.0
    graph = TemporalGraph("synthetic", [f"n{i:05d}" for i in range(n)], edges)
    manifest = {
        "generator": "planted_partition",
        "sizes": list(sizes), "p_in": p_in, "p_out": p_out, "seed": seed,
        "labels": labels.tolist(),
        "edge_count": graph.edge_count,
    }
    return graph, labels, manifest


# -- burst corpus -------------------------------------------------------------------

def gen_burst_corpus(contributors: int, quarters: int, burst_rate: float,
                     amplitude: float = 4.0, seed: int = 0,
                     start: str = "2020Q1",
                     ) -> tuple[list[ActivitySeries], list[tuple[str, str]], dict]:
    """Poisson(3) baseline activity with planted spike quarters.

    Each contributor independently receives one spike with probability
    ``burst_rate`` at a uniformly chosen quarter; the spiked quarter's
    activity is set to lambda + amplitude * sqrt(lambda), i.e. ``amplitude``
    baseline standard deviations above the baseline mean. The registry
    lists planted (contributor, quarter) pairs.
    """
    if not 0 <= burst_rate <= 1:
        raise ValueError("burst_rate must be in [0, 1]")
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    rng = stream(seed, "burst-corpus")
    lam = BASELINE_POISSON_LAMBDA
    first = start
    labels = quarter_range(first, _shift_quarter(first, quarters - 1))
    series: list[ActivitySeries] = []
    registry: list[tuple[str, str]] = []
    spike_value = lam + amplitude * math.sqrt(lam)
    for c in range(contributors):
        cid = f"c{c:05d}"
        values = rng.poisson(lam, quarters).astype(float)
        if rng.random() < burst_rate:
            q = int(rng.integers(0, quarters))
            values[q] = spike_value
            registry.append((cid, labels[q]))
        series.append(ActivitySeries(cid, list(labels), values))
    manifest = {
        "generator": "burst_corpus",
        "contributors": contributors, "quarters": quarters,
        "burst_rate": burst_rate, "amplitude": amplitude, "seed": seed,
        "baseline_lambda": lam, "spike_value": spike_value,
        "registry": [list(x) for x in registry],
    }
    return series, registry, manifest


def _shift_quarter(label: str, offset: int) -> str:
    from .ingest import quarter_index

    idx = quarter_index(label) + offset
    return f"{idx // 4}Q{idx % 4 + 1}"


# -- action/influence corpus ----------------------------------------------------------

ACTION_CORPUS_RHO = 0.3  # exchangeable latent correlation between action types
ACTION_CORPUS_LOG_MEAN = 3.0
ACTION_CORPUS_LOG_SD = 1.0


def gen_action_corpus(n: int, betas: Sequence[float], noise_sd: float,
                      seed: int = 0) -> tuple[np.ndarray, np.ndarray, dict]:
    """Correlated log-normal action counts and a planted linear target.

    Counts come from exp(mu + sd * G) with G multivariate normal under an
    exchangeable correlation of 0.3 across the 8 action types. The target is
    the planted linear combination of the z-score standardized counts plus
    Gaussian noise. The manifest records the planted betas and the realized
    R-squared of the sample.
    """
    betas = np.asarray(betas, dtype=float)
    if len(betas) != len(ACTIONS):
        raise ValueError(f"need {len(ACTIONS)} betas, one per action type")
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    rng = stream(seed, "action-corpus")
    k = len(ACTIONS)
    corr = np.full((k, k), ACTION_CORPUS_RHO)
    np.fill_diagonal(corr, 1.0)
    chol = np.linalg.cholesky(corr)
    g = rng.standard_normal((n, k)) @ chol.T
    counts = np.exp(ACTION_CORPUS_LOG_MEAN + ACTION_CORPUS_LOG_SD * g)
    z = (counts - counts.mean(axis=0)) / counts.std(axis=0)
    signal = z @ betas
    noise = rng.standard_normal(n) * noise_sd
    y = signal + noise
    var_y = float(y.var())
    realized_r2 = float(signal.var() / var_y) if var_y > 0 else math.nan
    manifest = {
        "generator": "action_corpus",
        "n": n, "betas": betas.tolist(), "noise_sd": noise_sd, "seed": seed,
        "latent_correlation": ACTION_CORPUS_RHO,
        "log_mean": ACTION_CORPUS_LOG_MEAN, "log_sd": ACTION_CORPUS_LOG_SD,
        "signal_variance": float(signal.var()),
        "realized_r2": realized_r2,
        "action_names": list(ACTIONS),
    }
    return counts, y, manifest


def noise_sd_for_r2(betas: Sequence[float], target_r2: float,
                    rho: float = ACTION_CORPUS_RHO) -> float:
    """Noise level that plants an expected R-squared for gen_action_corpus.

    Signal variance under the exchangeable correlation is b'Cb; solving
    R2 = s / (s + sigma^2) gives sigma = sqrt(s * (1 - R2) / R2).
    """
    b = np.asarray(betas, dtype=float)
    k = len(b)
    corr = np.full((k, k), rho)
    np.fill_diagonal(corr, 1.0)
    s = float(b @ corr @ b)
    if not 0 < target_r2 < 1:
        raise ValueError("target_r2 must be in (0, 1)")
    return math.sqrt(s * (1.0 - target_r2) / target_r2)


# -- Markov role sequences --------------------------------------------------------------

def gen_markov_roles(matrix: np.ndarray, contributors: int, length: int,
                     seed: int = 0) -> tuple[np.ndarray, dict]:
    """Independent Markov chains from a uniform initial distribution.

    ``matrix`` must be row-stochastic; rows index the source state. Returns
    an integer array of shape (contributors, length).
    """
    P = np.asarray(matrix, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    if (P < 0).any() or np.abs(P.sum(axis=1) - 1.0).max() > 1e-9:
        raise ValueError("transition matrix rows must be non-negative and sum to 1")
    rng = stream(seed, "markov-roles")
    k = P.shape[0]
    cum = np.cumsum(P, axis=1)
    seqs = np.empty((contributors, length), dtype=np.int64)
    for c in range(contributors):
        state = int(rng.integers(0, k))
        seqs[c, 0] = state
        for t in range(1, length):
            state = int(np.searchsorted(cum[state], rng.random(), side="right"))
            state = min(state, k - 1)
            seqs[c, t] = state
    manifest = {
        "generator": "markov_roles",
        "matrix": P.tolist(), "contributors": contributors,
        "length": length, "seed": seed,
    }
    return seqs, manifest


# -- full event corpus (pipeline input) ----------------------------------------------

@dataclass(frozen=True)
class EventCorpusSpec:
    contributors: int = 2000
    quarters: int = 12
    repos: int = 150
    start: str = "2021Q1"
    burst_rate: float = 0.2
    burst_amplitude: float = 4.0
    repo_zipf: float = 0.8  # popularity skew of repository choice
    seed: int = 0


def gen_event_corpus(spec: EventCorpusSpec) -> tuple[list[EventRecord], dict]:
    """A complete synthetic event log the ingest stage can consume.

    Contributors join 1-3 repositories (popularity-skewed), their quarterly
    activity follows the planted-burst corpus, and each quarter's events are
    spread over their repositories and the action-type mix. Timestamps sit
    mid-quarter, so quarterly alignment is unambiguous.
    """
    rng = stream(spec.seed, "event-corpus")
    series, registry, burst_manifest = gen_burst_corpus(
        spec.contributors, spec.quarters, spec.burst_rate,
        spec.burst_amplitude, seed=spec.seed, start=spec.start)
    labels = series[0].windows if series else []

    weights = 1.0 / np.arange(1, spec.repos + 1) ** spec.repo_zipf
    weights /= weights.sum()
    stages = ["graduated", "incubating", "sandbox"]
    repo_stage = {f"r{j:04d}": stages[j % 3] for j in range(spec.repos)}
    memberships: dict[str, list[str]] = {}
    for s in series:
        n_repos = int(rng.choice([1, 2, 3], p=[0.6, 0.3, 0.1]))
        chosen = rng.choice(spec.repos, size=n_repos, replace=False, p=weights)
        memberships[s.contributor_id] = [f"r{j:04d}" for j in sorted(chosen)]

    action_names = list(ACTION_MIX)
    action_p = np.array([ACTION_MIX[a] for a in action_names])
    records: list[EventRecord] = []
    for s in series:
        repos = memberships[s.contributor_id]
        for q, label in enumerate(labels):
            total = int(round(s.values[q]))
            if total < 1:
                continue
            # split this quarter's activity over (repo, action) cells
            repo_split = rng.multinomial(total, np.full(len(repos), 1.0 / len(repos)))
            ts = _quarter_midpoint(label)
            for repo, r_total in zip(repos, repo_split):
                if r_total < 1:
                    continue
                action_split = rng.multinomial(int(r_total), action_p)
                for a_name, a_count in zip(action_names, action_split):
                    if a_count < 1:
                        continue
                    records.append(EventRecord(
                        contributor_id=s.contributor_id, repo_id=repo,
                        action=a_name, count=int(a_count), timestamp=ts,
                        stage=repo_stage[repo]))
    manifest = {
        "generator": "event_corpus",
        "spec": {
            "contributors": spec.contributors, "quarters": spec.quarters,
            "repos": spec.repos, "start": spec.start,
            "burst_rate": spec.burst_rate,
            "burst_amplitude": spec.burst_amplitude,
            "repo_zipf": spec.repo_zipf, "seed": spec.seed,
        },
        "windows": list(labels),
        "burst_registry": burst_manifest["registry"],
        "memberships": memberships,
        "record_count": len(records),
    }
    return records, manifest


def _quarter_midpoint(label: str) -> datetime:
    year, q = label.split("Q")
    month = (int(q) - 1) * 3 + 2
    return datetime(int(year), month, 15, 12, 0, 0, tzinfo=timezone.utc)


def write_events_csv(records: Sequence[EventRecord], path) -> None:
    from pathlib import Path

    with Path(path).open("w") as fh:
        fh.write("contributor,repo,action,count,timestamp,stage\n")
        for r in records:
            ts = r.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ")
            fh.write(f"{r.contributor_id},{r.repo_id},{r.action},{r.count},{ts},{r.stage}\n")
