"""Network cohesiveness: clustering, transitivity, density, Louvain
modularity, and degree assortativity.

Clustering and transitivity are unweighted (triangle counting); modularity
is weighted, since its null model is defined on edge weights. Louvain here
is deterministic under a fixed seed: nodes are swept in ascending id order
and gain ties are broken by a seeded draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import TemporalGraph
from .centrality import MetricVector
from ._rng import stream


@dataclass
class CohesionSummary:
    window: str
    density: float
    avg_clustering: float
    transitivity: float
    modularity: float
    community_count: int
    assortativity: Optional[float]  # None when undefined (zero degree variance)
    degenerate: bool = False  # empty or edgeless window


# -- clustering ----------------------------------------------------------------

def local_clustering(graph: TemporalGraph) -> MetricVector:
    """Local clustering coefficient 2 * tri(i) / (k_i (k_i - 1)).

    Nodes with degree < 2 score 0 by convention. Triangle counting ignores
    weights.
    """
    n = graph.node_count
    values = np.zeros(n)
    neigh_sets = [set(int(v) for v in graph.neighbors(i)) for i in range(n)]
    for i in range(n):
        k = len(neigh_sets[i])
        if k < 2:
            continue
        links = 0
        neigh = sorted(neigh_sets[i])
        for a_pos in range(len(neigh)):
            a = neigh[a_pos]
            for b in neigh[a_pos + 1:]:
                if b in neigh_sets[a]:
                    links += 1
        values[i] = 2.0 * links / (k * (k - 1))
    return MetricVector("clustering", graph.window, values)


def transitivity(graph: TemporalGraph) -> float:
    """Global clustering: 3 * triangles / connected triples; 0 if no triples."""
    n = graph.node_count
    neigh_sets = [set(int(v) for v in graph.neighbors(i)) for i in range(n)]
    deg = graph.degrees()
    triples = int((deg * (deg - 1) // 2).sum())
    if triples == 0:
        return 0.0
    tri3 = 0  # counts each triangle once per member edge, i.e. 3 * triangles
    for i in range(n):
        for j in neigh_sets[i]:
            if j > i:
                tri3 += len(neigh_sets[i] & neigh_sets[j])
    return tri3 / triples


def density(graph: TemporalGraph) -> float:
    """2|E| / (N(N-1)); defined as 0 for N < 2."""
    n = graph.node_count
    if n < 2:
        return 0.0
    return 2.0 * graph.edge_count / (n * (n - 1))


# -- modularity and Louvain ------------------------------------------------------

def modularity(graph: TemporalGraph, partition: np.ndarray,
               resolution: float = 1.0) -> float:
    """Weighted modularity of a partition.

    Q = (1/2m) * sum_ij [A_ij - r * k_i k_j / 2m] delta(c_i, c_j), with k the
    weighted strength and 2m the total weight. Edgeless graphs score 0 by
    convention.
    """
    two_m = float(graph.weights.sum())
    if two_m == 0:
        return 0.0
    strength = graph.strengths()
    internal = 0.0
    for i in range(graph.node_count):
        for j, w in zip(graph.neighbors(i), graph.neighbor_weights(i)):
            if partition[i] == partition[j]:
                internal += w
    comm_strength: dict[int, float] = {}
    for i, c in enumerate(partition):
        comm_strength[int(c)] = comm_strength.get(int(c), 0.0) + strength[i]
    null = sum(s * s for s in comm_strength.values()) / (two_m * two_m)
    return internal / two_m - resolution * null


class _LouvainLevel:
    """Mutable per-level state for the local-moving phase."""

    def __init__(self, n: int, edges: dict[tuple[int, int], float],
                 self_loops: np.ndarray):
        self.n = n
        self.adj: list[dict[int, float]] = [{} for _ in range(n)]
        for (i, j), w in edges.items():
            self.adj[i][j] = self.adj[i].get(j, 0.0) + w
            self.adj[j][i] = self.adj[j].get(i, 0.0) + w
        self.self_loops = self_loops
        self.strength = np.array(
            [sum(a.values()) + self_loops[i] for i, a in enumerate(self.adj)])
        self.two_m = float(self.strength.sum())
        self.community = np.arange(n)
        self.comm_strength = self.strength.astype(float).copy()

    def neighbor_comm_weights(self, i: int) -> dict[int, float]:
        out: dict[int, float] = {}
        for j, w in self.adj[i].items():
            c = int(self.community[j])
            out[c] = out.get(c, 0.0) + w
        return out

    def sweep(self, resolution: float, rng) -> bool:
        """One full pass in ascending node order; returns True if any move."""
        moved = False
        for i in range(self.n):
            ci = int(self.community[i])
            k_i = self.strength[i]
            links = self.neighbor_comm_weights(i)
            # detach i from its community
            self.comm_strength[ci] -= k_i
            best_gain = 0.0
            candidates = [ci]
            for c, w_ic in sorted(links.items()):
                gain = (w_ic - links.get(ci, 0.0)
                        - resolution * k_i * (self.comm_strength[c]
                                              - self.comm_strength[ci]) / self.two_m)
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    candidates = [c]
                elif abs(gain - best_gain) <= 1e-12 and best_gain > 0:
                    candidates.append(c)
            if best_gain > 0:
                target = candidates[0] if len(candidates) == 1 else \
                    int(candidates[int(rng.integers(0, len(candidates)))])
                if target != ci:
                    self.community[i] = target
                    moved = True
                self.comm_strength[target] += k_i
            else:
                self.comm_strength[ci] += k_i
        return moved


def _louvain_levels(graph: TemporalGraph, seed: int, resolution: float,
                    ) -> tuple[np.ndarray, float, list[float]]:
    """Louvain returning the modularity reached after each aggregation level."""
    n = graph.node_count
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0.0, []
    if graph.edge_count == 0:
        return np.arange(n, dtype=np.int64), 0.0, []

    rng = stream(seed, "louvain")
    # current mapping from original nodes to super-node ids
    node_to_super = np.arange(n, dtype=np.int64)
    edges = {(i, j): w for i, j, w in graph.edge_list()}
    self_loops = np.zeros(n)
    size = n
    level_qs: list[float] = []

    while True:
        level = _LouvainLevel(size, edges, self_loops)
        improved = False
        while level.sweep(resolution, rng):
            improved = True
        if not improved:
            break
        # renumber this level's communities densely
        remap: dict[int, int] = {}
        for c in level.community:
            if int(c) not in remap:
                remap[int(c)] = len(remap)
        comm = np.array([remap[int(c)] for c in level.community], dtype=np.int64)
        node_to_super = comm[node_to_super]
        level_qs.append(modularity(graph, node_to_super, resolution))
        new_size = len(remap)
        if new_size == size:
            break
        # aggregate: communities become super nodes
        new_self = np.zeros(new_size)
        for i in range(size):
            new_self[comm[i]] += self_loops[i]
        new_edges: dict[tuple[int, int], float] = {}
        for (i, j), w in edges.items():
            a, b = int(comm[i]), int(comm[j])
            if a == b:
                new_self[a] += 2.0 * w
            else:
                key = (a, b) if a < b else (b, a)
                new_edges[key] = new_edges.get(key, 0.0) + w
        edges, self_loops, size = new_edges, new_self, new_size
        if not edges:
            break

    # densely renumber final labels by first appearance
    remap = {}
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        c = int(node_to_super[i])
        if c not in remap:
            remap[c] = len(remap)
        labels[i] = remap[c]
    return labels, modularity(graph, labels, resolution), level_qs


def louvain(graph: TemporalGraph, seed: int = 0, resolution: float = 1.0,
            ) -> tuple[np.ndarray, float]:
    """Greedy modularity optimization (local moving + aggregation).

    Returns (partition, Q): community labels densely renumbered by first
    appearance in node order, and the weighted modularity of that partition
    on the original graph. An edgeless graph yields singletons with Q = 0.
    Deterministic under a fixed seed.
    """
    labels, q, _ = _louvain_levels(graph, seed, resolution)
    return labels, q


# -- assortativity ---------------------------------------------------------------

def assortativity(graph: TemporalGraph) -> Optional[float]:
    """Degree-degree Pearson correlation over ordered edge endpoint pairs.

    Returns None when the endpoint degree variance is zero (for example any
    regular graph), where the correlation is undefined.
    """
    if graph.edge_count == 0:
        raise ValueError("assortativity needs at least one edge")
    deg = graph.degrees().astype(float)
    n = graph.node_count
    rows = np.repeat(np.arange(n), np.diff(graph.indptr))
    x = deg[rows]  # both orientations: CSR stores each edge twice
    y = deg[graph.indices]
    vx = x.var()
    vy = y.var()
    if vx == 0 or vy == 0:
        return None
    cov = ((x - x.mean()) * (y - y.mean())).mean()
    return float(cov / math.sqrt(vx * vy))


# -- bundle ----------------------------------------------------------------------

def cohesion_summary(graph: TemporalGraph, seed: int = 0) -> CohesionSummary:
    """All cohesion metrics for one window."""
    n = graph.node_count
    if n == 0 or graph.edge_count == 0:
        return CohesionSummary(
            window=graph.window, density=0.0, avg_clustering=0.0,
            transitivity=0.0, modularity=0.0,
            community_count=n, assortativity=None, degenerate=True)
    clustering = local_clustering(graph)
    partition, q = louvain(graph, seed=seed)
    return CohesionSummary(
        window=graph.window,
        density=density(graph),
        avg_clustering=float(clustering.values.mean()),
        transitivity=transitivity(graph),
        modularity=q,
        community_count=int(partition.max()) + 1,
        assortativity=assortativity(graph),
    )
