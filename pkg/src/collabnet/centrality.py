"""Node centrality: PageRank, degree/strength, betweenness (exact and
sampled), closeness, and eigenvector centrality.

All operations read an immutable :class:`~collabnet.graph.TemporalGraph`
and return a :class:`MetricVector` carrying the scores, the solver
parameters used, and whether the result is exact.

Conventions fixed here:

* The undirected graph is treated as bidirectional for PageRank; the
  transition probability j -> i is w_ji / s_j with s_j the weighted strength
  of j. Isolated nodes are dangling and redistribute their mass uniformly.
* Weighted shortest paths use distance 1/w: heavier collaboration means a
  shorter hop.
* Betweenness sums pair dependencies over ordered (s, t) pairs and then
  halves, i.e. scores count unordered pairs.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .graph import TemporalGraph, connected_components
from ._rng import stream

METRICS = ("pagerank", "degree", "strength", "betweenness", "closeness",
           "harmonic_closeness", "eigenvector")

EXACT_BETWEENNESS_CAP = 5000


@dataclass
class MetricVector:
    metric: str
    window: str
    values: np.ndarray
    exact: bool = True
    params: dict = field(default_factory=dict)

    def top_k(self, k: int) -> list[tuple[int, float]]:
        """Top-k (node, score), ties broken by node id for determinism."""
        order = sorted(range(len(self.values)), key=lambda i: (-self.values[i], i))
        return [(i, float(self.values[i])) for i in order[:k]]


def _csr(graph: TemporalGraph) -> sp.csr_matrix:
    n = graph.node_count
    return sp.csr_matrix((graph.weights, graph.indices, graph.indptr), shape=(n, n))


# -- PageRank ------------------------------------------------------------------

def pagerank(graph: TemporalGraph, d: float = 0.85, eps: float = 1e-6,
             max_iter: int = 100) -> MetricVector:
    """Weighted PageRank by power iteration.

    Iterates x <- (1-d)/N + d * (A @ (x/s) + dangling_mass/N) until the L1
    change drops below ``eps``. Because the final assembly adds a
    non-negative diffusion term to (1-d)/N, every score is >= (1-d)/N and
    the vector sums to 1 up to accumulated rounding.
    """
    if not 0 < d < 1:
        raise ValueError("damping must be in (0, 1)")
    n = graph.node_count
    params = {"d": d, "eps": eps, "max_iter": max_iter}
    if n == 0:
        return MetricVector("pagerank", graph.window, np.zeros(0), True, params)
    A = _csr(graph)
    s = np.asarray(A.sum(axis=1)).ravel()
    dangling = s == 0
    inv_s = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, s))
    x = np.full(n, 1.0 / n)
    base = (1.0 - d) / n
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        spread = A @ (x * inv_s) + x[dangling].sum() / n
        x_new = base + d * spread
        if np.abs(x_new - x).sum() < eps:
            x = x_new
            converged = True
            break
        x = x_new
    params["iterations"] = iterations
    if not converged:
        params["warning"] = "power iteration did not converge"
    return MetricVector("pagerank", graph.window, x, converged, params)


# -- degree and strength -------------------------------------------------------

def degree_and_strength(graph: TemporalGraph) -> tuple[MetricVector, MetricVector]:
    """Normalized degree deg(i)/(N-1) and weighted strength sum_j w_ij."""
    n = graph.node_count
    deg = graph.degrees().astype(float)
    norm = deg / (n - 1) if n >= 2 else np.zeros(n)
    return (MetricVector("degree", graph.window, norm),
            MetricVector("strength", graph.window, graph.strengths()))


# -- betweenness ---------------------------------------------------------------

def _bfs_brandes_source(A: sp.csr_matrix, n: int, s: int,
                        accum: np.ndarray) -> None:
    """Accumulate one source's Brandes dependencies (unweighted)."""
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n)
    dist[s] = 0
    sigma[s] = 1.0
    levels = [np.array([s], dtype=np.int64)]
    frontier = levels[0]
    level = 0
    while True:
        x = np.zeros(n)
        x[frontier] = sigma[frontier]
        y = A @ x
        new_mask = (y > 0) & (dist < 0)
        if not new_mask.any():
            break
        level += 1
        nxt = np.nonzero(new_mask)[0]
        dist[nxt] = level
        sigma[nxt] = y[nxt]
        levels.append(nxt)
        frontier = nxt
    delta = np.zeros(n)
    for lev in range(len(levels) - 1, 0, -1):
        w_nodes = levels[lev]
        coeff = np.zeros(n)
        coeff[w_nodes] = (1.0 + delta[w_nodes]) / sigma[w_nodes]
        contrib = A @ coeff
        prev = levels[lev - 1]
        delta[prev] += sigma[prev] * contrib[prev]
    delta[s] = 0.0
    accum += delta


def _dijkstra_brandes_source(graph: TemporalGraph, s: int, accum: np.ndarray,
                             rel_tol: float = 1e-9) -> None:
    """One source's dependencies with distance 1/w (weighted graphs)."""
    n = graph.node_count
    dist = np.full(n, np.inf)
    sigma = np.zeros(n)
    preds: list[list[int]] = [[] for _ in range(n)]
    order: list[int] = []
    dist[s] = 0.0
    sigma[s] = 1.0
    heap = [(0.0, s)]
    done = np.zeros(n, dtype=bool)
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        order.append(u)
        for v, w in zip(graph.neighbors(u), graph.neighbor_weights(u)):
            v = int(v)
            alt = du + 1.0 / w
            tol = rel_tol * max(1.0, abs(alt))
            if alt < dist[v] - tol:
                dist[v] = alt
                sigma[v] = sigma[u]
                preds[v] = [u]
                heapq.heappush(heap, (alt, v))
            elif abs(alt - dist[v]) <= tol:
                sigma[v] += sigma[u]
                preds[v].append(u)
    delta = np.zeros(n)
    for w_node in reversed(order):
        for u in preds[w_node]:
            delta[u] += sigma[u] / sigma[w_node] * (1.0 + delta[w_node])
    delta[s] = 0.0
    accum += delta


def betweenness_exact(graph: TemporalGraph, weighted: bool = False,
                      cap: int = EXACT_BETWEENNESS_CAP) -> MetricVector:
    """Exact betweenness via Brandes accumulation.

    Unweighted mode runs a level-synchronous BFS per source; weighted mode
    runs Dijkstra with distance 1/w (negative weights are a contract
    violation upstream, but re-checked here). Scores are over unordered
    pairs: ordered-pair dependencies are halved at the end.
    """
    n = graph.node_count
    if n > cap:
        raise ValueError(f"graph has {n} > {cap} nodes; use betweenness_sampled")
    if weighted and len(graph.weights) and graph.weights.min() <= 0:
        raise ValueError("betweenness requires positive weights")
    accum = np.zeros(n)
    if weighted:
        for s in range(n):
            _dijkstra_brandes_source(graph, s, accum)
    else:
        A = _csr(graph)
        A.data = np.ones_like(A.data)
        for s in range(n):
            _bfs_brandes_source(A, n, s, accum)
    return MetricVector("betweenness", graph.window, accum / 2.0, True,
                        {"weighted": weighted})


def betweenness_sampled(graph: TemporalGraph, sources: int = 500,
                        seed: int = 0, weighted: bool = False) -> MetricVector:
    """Brandes from a random sample of sources, rescaled by N/sources.

    With ``sources == N`` this equals the exact computation (the sample is
    drawn without replacement). Deterministic under a fixed seed.
    """
    n = graph.node_count
    if sources > n:
        raise ValueError(f"sources {sources} exceeds node count {n}")
    rng = stream(seed, "betweenness-sample")
    sample = np.sort(rng.choice(n, size=sources, replace=False))
    accum = np.zeros(n)
    if weighted:
        for s in sample:
            _dijkstra_brandes_source(graph, int(s), accum)
    else:
        A = _csr(graph)
        A.data = np.ones_like(A.data)
        for s in sample:
            _bfs_brandes_source(A, n, int(s), accum)
    scale = n / sources
    return MetricVector("betweenness", graph.window, accum * scale / 2.0,
                        exact=(sources == n),
                        params={"sources": sources, "seed": seed,
                                "weighted": weighted})


# -- closeness -----------------------------------------------------------------

def _distances_from(graph: TemporalGraph, s: int, weighted: bool) -> np.ndarray:
    n = graph.node_count
    if not weighted:
        dist = np.full(n, np.inf)
        dist[s] = 0.0
        frontier = [s]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for u in frontier:
                for v in graph.neighbors(u):
                    v = int(v)
                    if dist[v] == np.inf:
                        dist[v] = level
                        nxt.append(v)
            frontier = nxt
        return dist
    dist = np.full(n, np.inf)
    dist[s] = 0.0
    heap = [(0.0, s)]
    done = np.zeros(n, dtype=bool)
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in zip(graph.neighbors(u), graph.neighbor_weights(u)):
            v = int(v)
            alt = du + 1.0 / w
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return dist


def closeness(graph: TemporalGraph, harmonic: bool = False,
              weighted: bool = False) -> MetricVector:
    """Closeness centrality, per component.

    Standard form: (|component| - 1) / sum of distances to the component's
    other members. Harmonic form: sum of 1/d over reachable nodes, with
    unreachable pairs contributing 0. Isolated nodes score 0 in both.
    """
    n = graph.node_count
    values = np.zeros(n)
    for i in range(n):
        dist = _distances_from(graph, i, weighted)
        reachable = np.isfinite(dist)
        reachable[i] = False
        if not reachable.any():
            continue
        if harmonic:
            values[i] = (1.0 / dist[reachable]).sum()
        else:
            values[i] = reachable.sum() / dist[reachable].sum()
    name = "harmonic_closeness" if harmonic else "closeness"
    return MetricVector(name, graph.window, values, True, {"weighted": weighted})


# -- eigenvector ---------------------------------------------------------------

def eigenvector_centrality(graph: TemporalGraph, eps: float = 1e-8,
                           max_iter: int = 1000) -> MetricVector:
    """Perron vector of the weighted adjacency, L2-normalized.

    Computed by power iteration on A + I restricted to the largest
    component (the shift guards bipartite oscillation); nodes outside that
    component receive 0 and the result is flagged. Non-convergence is
    flagged, not raised.
    """
    n = graph.node_count
    if n == 0:
        raise ValueError("eigenvector centrality needs a non-empty graph")
    comps = connected_components(graph)
    members = comps[0]
    params: dict = {"eps": eps, "max_iter": max_iter}
    if len(comps) > 1:
        params["components_zeroed"] = True
    values = np.zeros(n)
    if len(members) == 1:
        values[members[0]] = 1.0
        return MetricVector("eigenvector", graph.window, values, True, params)
    sub = np.full(n, -1, dtype=np.int64)
    sub[members] = np.arange(len(members))
    A = _csr(graph)[members][:, members]
    x = np.full(len(members), 1.0 / np.sqrt(len(members)))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = A @ x + x  # (A + I) x
        y /= np.linalg.norm(y)
        if np.abs(y - x).max() < eps:
            x = y
            converged = True
            break
        x = y
    params["iterations"] = it
    if not converged:
        params["warning"] = "power iteration did not converge"
    values[members] = x
    return MetricVector("eigenvector", graph.window, values, converged, params)
