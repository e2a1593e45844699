"""Windowed weighted co-contribution graphs.

Two contributors are linked in a window iff some repository active in that
window has events from both; the raw edge weight is the number of such
shared repositories. Weights can then be dampened (log1p) and, optionally,
augmented with exponentially decayed co-membership from recent prior
quarters.

Graphs are stored in compressed sparse form (CSR-style neighbor lists,
sorted by node id) and are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .ingest import CleanDataset, quarter_index

DECAY_WEIGHT_FLOOR = 0.05  # decayed contributions below this are dropped


@dataclass(frozen=True)
class WeightPolicy:
    """How raw co-contribution counts become stored edge weights."""

    dampening: str = "raw"  # 'raw' or 'log1p'
    decay_enabled: bool = False
    decay_lambda: float = 0.1  # per-quarter rate
    decay_horizon: int = 4  # quarters of lookback

    def __post_init__(self):
        if self.dampening not in ("raw", "log1p"):
            raise ValueError(f"unknown dampening {self.dampening!r}")
        if self.decay_lambda < 0:
            raise ValueError("decay_lambda must be >= 0")
        if self.decay_horizon < 0:
            raise ValueError("decay_horizon must be >= 0")


class TemporalGraph:
    """One window's undirected weighted graph in compressed adjacency form.

    Node ids are dense 0..N-1, assigned in sorted contributor-id order so
    identical inputs always produce identical graphs. No self-loops; all
    weights positive; neighbor lists sorted by node id; symmetric by
    construction.
    """

    def __init__(self, window: str, node_ids: list[str],
                 edges: dict[tuple[int, int], float]):
        n = len(node_ids)
        normalized: dict[tuple[int, int], float] = {}
        for (i, j), w in edges.items():
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not 0 <= i < n or not 0 <= j < n:
                raise ValueError(f"edge ({i},{j}) outside node range")
            if w <= 0:
                raise ValueError(f"non-positive weight on edge ({i},{j})")
            key = (i, j) if i < j else (j, i)
            if key in normalized and normalized[key] != w:
                raise ValueError(f"conflicting weights for edge {key}")
            normalized[key] = w
        self.window = window
        self.node_ids = list(node_ids)
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (i, j), w in normalized.items():
            adj[i].append((j, w))
            adj[j].append((i, w))
        indptr = np.zeros(n + 1, dtype=np.int64)
        indices = np.empty(2 * len(normalized), dtype=np.int64)
        weights = np.empty(2 * len(normalized), dtype=np.float64)
        pos = 0
        for i in range(n):
            adj[i].sort()
            indptr[i + 1] = indptr[i] + len(adj[i])
            for j, w in adj[i]:
                indices[pos] = j
                weights[pos] = w
                pos += 1
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        for arr in (self.indptr, self.indices, self.weights):
            arr.flags.writeable = False

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def neighbor_weights(self, i: int) -> np.ndarray:
        return self.weights[self.indptr[i]:self.indptr[i + 1]]

    def weight(self, i: int, j: int) -> float:
        row = self.neighbors(i)
        pos = np.searchsorted(row, j)
        if pos < len(row) and row[pos] == j:
            return float(self.neighbor_weights(i)[pos])
        return 0.0

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def strengths(self) -> np.ndarray:
        n = self.node_count
        out = np.zeros(n)
        if len(self.indices):
            np.add.at(out, np.repeat(np.arange(n), np.diff(self.indptr)), self.weights)
        return out

    def edge_list(self) -> list[tuple[int, int, float]]:
        out = []
        for i in range(self.node_count):
            for j, w in zip(self.neighbors(i), self.neighbor_weights(i)):
                if i < j:
                    out.append((i, int(j), float(w)))
        return out

    def node_index(self) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(self.node_ids)}


# -- construction -------------------------------------------------------------

def _repo_members(dataset: CleanDataset, window: str) -> dict[str, set[str]]:
    """Contributor sets per repository active in the window."""
    members: dict[str, set[str]] = {}
    for rec, label in zip(dataset.records, dataset.labels):
        if label == window:
            members.setdefault(rec.repo_id, set()).add(rec.contributor_id)
    return members


def build_window_graph(dataset: CleanDataset, window: str,
                       policy: WeightPolicy = WeightPolicy()) -> TemporalGraph:
    """Build the co-contribution graph for one quarter.

    With decay enabled, a contributor's membership in a repository seen only
    in a prior quarter (up to ``decay_horizon`` back) still contributes,
    scaled by exp(-lambda * age) per endpoint; contributions that decay
    below ``DECAY_WEIGHT_FLOOR`` are dropped. A window with no records
    yields an empty graph.
    """
    if window not in dataset.windows:
        raise ValueError(f"window {window!r} not in dataset windows")

    # membership weight per (repo, contributor): 1.0 in-window, decayed from
    # lookback quarters otherwise (most recent occurrence wins)
    membership: dict[str, dict[str, float]] = {}
    cur = _repo_members(dataset, window)
    for repo, people in cur.items():
        membership[repo] = {cid: 1.0 for cid in people}
    if policy.decay_enabled and policy.decay_horizon > 0:
        w_idx = quarter_index(window)
        for rec, label in zip(dataset.records, dataset.labels):
            age = w_idx - quarter_index(label)
            if not 1 <= age <= policy.decay_horizon:
                continue
            factor = math.exp(-policy.decay_lambda * age)
            if factor < DECAY_WEIGHT_FLOOR:
                continue
            repo_map = membership.setdefault(rec.repo_id, {})
            if factor > repo_map.get(rec.contributor_id, 0.0):
                repo_map[rec.contributor_id] = factor

    node_ids = sorted({cid for people in membership.values() for cid in people})
    index = {cid: i for i, cid in enumerate(node_ids)}
    edges: dict[tuple[int, int], float] = {}
    for repo in sorted(membership):
        people = sorted(membership[repo].items())
        for a in range(len(people)):
            cid_a, w_a = people[a]
            for b in range(a + 1, len(people)):
                cid_b, w_b = people[b]
                contrib = w_a * w_b
                if contrib < DECAY_WEIGHT_FLOOR:
                    continue
                key = (index[cid_a], index[cid_b])
                edges[key] = edges.get(key, 0.0) + contrib

    if policy.dampening == "log1p":
        edges = {k: math.log1p(w) for k, w in edges.items()}
    return TemporalGraph(window, node_ids, edges)


def repo_clique_expansion_count(dataset: CleanDataset, window: str) -> int:
    """Upper bound on edge slots the clique expansion will generate.

    Sum over active repositories of C(|members|, 2), before deduplication
    across repositories. Useful as a pre-flight memory estimate.
    """
    return sum(len(p) * (len(p) - 1) // 2
               for p in _repo_members(dataset, window).values())


# -- connectivity -------------------------------------------------------------

def connected_components(graph: TemporalGraph) -> list[np.ndarray]:
    """Components as arrays of node ids, largest first (ties by smallest id)."""
    n = graph.node_count
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in graph.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        comps.append(np.array(sorted(comp), dtype=np.int64))
    comps.sort(key=lambda c: (-len(c), c[0] if len(c) else 0))
    return comps


def largest_connected_component(graph: TemporalGraph) -> tuple[int, set[int]]:
    """Size and member set of the largest component; (0, empty) for N=0."""
    comps = connected_components(graph)
    if not comps:
        return 0, set()
    return len(comps[0]), set(int(x) for x in comps[0])


# -- export / import ----------------------------------------------------------

def write_edgelist(graph: TemporalGraph, edges_path: str | Path,
                   nodes_path: str | Path) -> None:
    """Edge-list text ('src dst weight') plus a node id map; round-trips
    losslessly because weights are written with repr precision."""
    with Path(edges_path).open("w") as fh:
        for i, j, w in graph.edge_list():
            fh.write(f"{i} {j} {w!r}\n")
    with Path(nodes_path).open("w") as fh:
        fh.write("node_id\tcontributor\n")
        for i, cid in enumerate(graph.node_ids):
            fh.write(f"{i}\t{cid}\n")


def read_edgelist(edges_path: str | Path, nodes_path: str | Path,
                  window: str = "") -> TemporalGraph:
    node_ids: list[str] = []
    with Path(nodes_path).open() as fh:
        next(fh)  # header
        for line in fh:
            idx, cid = line.rstrip("\n").split("\t")
            assert int(idx) == len(node_ids), "node ids must be dense and ordered"
            node_ids.append(cid)
    edges: dict[tuple[int, int], float] = {}
    with Path(edges_path).open() as fh:
        for line in fh:
            a, b, w = line.split()
            edges[(int(a), int(b))] = float(w)
    return TemporalGraph(window, node_ids, edges)


def from_edges(edges: Iterable[tuple[int, int, float]], n: Optional[int] = None,
               window: str = "") -> TemporalGraph:
    """Convenience constructor from (i, j, weight) triples with integer ids."""
    edict: dict[tuple[int, int], float] = {}
    hi = -1
    for i, j, w in edges:
        a, b = (i, j) if i < j else (j, i)
        edict[(a, b)] = edict.get((a, b), 0.0) + w
    if edict:
        hi = max(max(k) for k in edict)
    count = n if n is not None else hi + 1
    return TemporalGraph(window, [str(i) for i in range(count)], edict)
