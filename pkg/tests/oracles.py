"""Independent reference implementations used only to verify the package.

Everything here deliberately takes the slow, direct route: dense linear
solves, exact rational path counting, O(n^2) double loops, full partition
enumeration. None of it shares code with the implementations under test.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb, inf

import numpy as np

from collabnet.graph import TemporalGraph


def dense_adjacency(graph: TemporalGraph) -> np.ndarray:
    n = graph.node_count
    A = np.zeros((n, n))
    for i in range(n):
        for j, w in zip(graph.neighbors(i), graph.neighbor_weights(i)):
            A[i, j] = w
    return A


def pagerank_dense_solve(graph: TemporalGraph, d: float = 0.85) -> np.ndarray:
    """Solve (I - d P) x = (1-d)/N directly; P includes uniform dangling
    columns."""
    n = graph.node_count
    A = dense_adjacency(graph)
    s = A.sum(axis=1)
    P = np.zeros((n, n))
    for j in range(n):
        if s[j] > 0:
            P[:, j] = A[j, :] / s[j]
        else:
            P[:, j] = 1.0 / n
    return np.linalg.solve(np.eye(n) - d * P, np.full(n, (1.0 - d) / n))


def _bfs_sigma(graph: TemporalGraph, s: int) -> tuple[list[int], list[int]]:
    """Hop distances and exact integer shortest-path counts from s."""
    n = graph.node_count
    dist = [-1] * n
    sigma = [0] * n
    dist[s] = 0
    sigma[s] = 1
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in graph.neighbors(u):
                v = int(v)
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
        frontier = nxt
    return dist, sigma


def betweenness_rational(graph: TemporalGraph) -> list[Fraction]:
    """Exact unweighted betweenness on unordered pairs, as Fractions."""
    n = graph.node_count
    dists, sigmas = zip(*(_bfs_sigma(graph, s) for s in range(n)))
    scores = [Fraction(0)] * n
    for s in range(n):
        for t in range(n):
            if s == t or dists[s][t] < 0:
                continue
            d_st = dists[s][t]
            sig_st = sigmas[s][t]
            for v in range(n):
                if v in (s, t) or dists[s][v] < 0 or dists[v][t] < 0:
                    continue
                if dists[s][v] + dists[v][t] == d_st:
                    scores[v] += Fraction(sigmas[s][v] * sigmas[v][t], sig_st)
    return [sc / 2 for sc in scores]


def betweenness_weighted_enumeration(graph: TemporalGraph) -> np.ndarray:
    """Weighted betweenness by enumerating all simple paths (tiny graphs).

    Distance of a path is the sum of 1/w over its edges. Intended for
    graphs with dyadic weights so float distance comparison is exact.
    """
    n = graph.node_count
    weight = {}
    for i in range(n):
        for j, w in zip(graph.neighbors(i), graph.neighbor_weights(i)):
            weight[(i, int(j))] = float(w)

    def all_paths(s, t):
        paths = []

        def walk(u, seen, dist, trail):
            if u == t:
                paths.append((dist, tuple(trail)))
                return
            for v in graph.neighbors(u):
                v = int(v)
                if v not in seen:
                    walk(v, seen | {v}, dist + 1.0 / weight[(u, v)], trail + [v])

        walk(s, {s}, 0.0, [s])
        return paths

    scores = np.zeros(n)
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            paths = all_paths(s, t)
            if not paths:
                continue
            d_min = min(p[0] for p in paths)
            shortest = [p[1] for p in paths if p[0] == d_min]
            for trail in shortest:
                for v in trail[1:-1]:
                    scores[v] += 1.0 / len(shortest)
    return scores / 2.0


def eigenvector_dense(graph: TemporalGraph) -> np.ndarray:
    """Perron vector of the largest component via a dense symmetric
    eigensolve; zeros elsewhere; L2-normalized, non-negative."""
    from collabnet.graph import connected_components

    n = graph.node_count
    comps = connected_components(graph)
    members = comps[0]
    out = np.zeros(n)
    if len(members) == 1:
        out[members[0]] = 1.0
        return out
    A = dense_adjacency(graph)[np.ix_(members, members)]
    vals, vecs = np.linalg.eigh(A)
    v = vecs[:, np.argmax(vals)]
    if v.sum() < 0:
        v = -v
    out[members] = np.abs(v)  # Perron vector is sign-constant
    return out / np.linalg.norm(out)


def modularity_direct(graph: TemporalGraph, partition) -> float:
    """Q by direct summation over all ordered node pairs."""
    A = dense_adjacency(graph)
    k = A.sum(axis=1)
    two_m = A.sum()
    if two_m == 0:
        return 0.0
    q = 0.0
    n = graph.node_count
    for i in range(n):
        for j in range(n):
            if partition[i] == partition[j]:
                q += A[i, j] - k[i] * k[j] / two_m
    return q / two_m


def all_partitions(items: list[int]):
    """Every set partition (Bell-number enumeration)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def best_partition_exhaustive(graph: TemporalGraph) -> tuple[list[set], float]:
    """Maximum-modularity partition by brute force (n <= 10 or so)."""
    nodes = list(range(graph.node_count))
    best_q = -inf
    best = None
    for part in all_partitions(nodes):
        labels = np.zeros(graph.node_count, dtype=int)
        for c, block in enumerate(part):
            for v in block:
                labels[v] = c
        q = modularity_direct(graph, labels)
        if q > best_q:
            best_q = q
            best = [set(b) for b in part]
    return best, best_q


def transitivity_brute(graph: TemporalGraph) -> float:
    """3 * triangles / triples by checking every node triple."""
    n = graph.node_count
    adj = dense_adjacency(graph) > 0
    triangles = 0
    triples = 0
    for i, j, k in combinations(range(n), 3):
        edges = int(adj[i, j]) + int(adj[i, k]) + int(adj[j, k])
        if edges == 3:
            triangles += 1
            triples += 3  # each vertex centers one path of length 2
        elif edges == 2:
            triples += 1
    return 3.0 * triangles / triples if triples else 0.0


def assortativity_pairs(graph: TemporalGraph):
    """Degree correlation over explicitly enumerated endpoint pairs."""
    deg = {i: len(graph.neighbors(i)) for i in range(graph.node_count)}
    xs, ys = [], []
    for i in range(graph.node_count):
        for j in graph.neighbors(i):
            xs.append(deg[i])
            ys.append(deg[int(j)])
    x = np.array(xs, dtype=float)
    y = np.array(ys, dtype=float)
    if x.var() == 0 or y.var() == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def adjusted_rand_index(a, b) -> float:
    """ARI from the contingency table."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = len(a)
    sum_comb = 0
    for ca in np.unique(a):
        for cb in np.unique(b):
            nij = int(((a == ca) & (b == cb)).sum())
            sum_comb += comb(nij, 2)
    sum_a = sum(comb(int((a == ca).sum()), 2) for ca in np.unique(a))
    sum_b = sum(comb(int((b == cb).sum()), 2) for cb in np.unique(b))
    expected = sum_a * sum_b / comb(n, 2)
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return (sum_comb - expected) / (max_index - expected)


def ols_slope_closed_form(y) -> tuple[float, float]:
    """Trend slope and intercept from the covariance/variance identity."""
    y = np.asarray(y, dtype=float)
    t = np.arange(len(y), dtype=float)
    slope = np.cov(t, y, bias=True)[0, 1] / t.var()
    return float(slope), float(y.mean() - slope * t.mean())


def numerical_gradient(loss_fn, params: dict[str, np.ndarray],
                       h: float = 1e-5) -> dict[str, np.ndarray]:
    """Central finite differences of a scalar loss over a parameter dict."""
    grads = {}
    for name, arr in params.items():
        g = np.zeros_like(arr)
        flat = arr.ravel()
        g_flat = g.ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = loss_fn()
            flat[idx] = orig - h
            down = loss_fn()
            flat[idx] = orig
            g_flat[idx] = (up - down) / (2.0 * h)
        grads[name] = g
    return grads


def random_weighted_graph(n: int, p: float, rng,
                          weights=(0.5, 1.0, 2.0, 4.0)) -> TemporalGraph:
    """Erdos-Renyi graph with dyadic weights (exactly representable)."""
    from collabnet.graph import from_edges

    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j, float(weights[int(rng.integers(0, len(weights)))])))
    return from_edges(edges, n=n)
