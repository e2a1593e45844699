"""Structural-integrity simulation: remove contributors by role and measure
largest-connected-component degradation.

Impact is per removed node: (LCC_before - LCC_after) / nodes_removed. On a
connected graph the floor is 1.0 (each removed node at least removes
itself); values above that measure collateral fragmentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import TemporalGraph
from .roles import RoleAssignment
from ._rng import stream


class EmptyRoleError(ValueError):
    pass


@dataclass
class RemovalExperiment:
    role: str
    removed: int
    trials: int
    seed: int
    lcc_before: int
    lcc_after: list[int]
    impacts: list[float]

    @property
    def mean_impact(self) -> float:
        return float(np.mean(self.impacts))

    @property
    def sd_impact(self) -> float:
        return float(np.std(self.impacts))


def _lcc_excluding(graph: TemporalGraph, removed: set[int]) -> int:
    """Largest component size with the given nodes (and incident edges) gone."""
    n = graph.node_count
    seen = np.zeros(n, dtype=bool)
    for r in removed:
        seen[r] = True
    best = 0
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in graph.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        best = max(best, size)
    return best


def _role_nodes(graph: TemporalGraph, assignments: Sequence[RoleAssignment],
                role: str) -> list[int]:
    index = graph.node_index()
    nodes = sorted(index[a.contributor_id] for a in assignments
                   if a.role == role and a.contributor_id in index)
    return nodes


def remove_by_role(graph: TemporalGraph, assignments: Sequence[RoleAssignment],
                   role: str, count: int, trials: int = 30, seed: int = 0,
                   ) -> RemovalExperiment:
    """Repeatedly remove ``count`` uniformly sampled holders of ``role`` and
    record the LCC drop per removed node.

    Sampling is without replacement within a trial; trials are independent.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nodes = _role_nodes(graph, assignments, role)
    if not nodes:
        raise EmptyRoleError(f"no nodes hold role {role!r}")
    if count > len(nodes):
        raise ValueError(f"count {count} exceeds {len(nodes)} holders of {role!r}")
    rng = stream(seed, "remove-by-role", role)
    before = _lcc_excluding(graph, set())
    lcc_after: list[int] = []
    impacts: list[float] = []
    for _ in range(trials):
        picks = rng.choice(len(nodes), size=count, replace=False)
        removed = {nodes[int(i)] for i in picks}
        after = _lcc_excluding(graph, removed)
        lcc_after.append(after)
        impacts.append((before - after) / count)
    return RemovalExperiment(role=role, removed=count, trials=trials, seed=seed,
                             lcc_before=before, lcc_after=lcc_after,
                             impacts=impacts)


def remove_all_of_role(graph: TemporalGraph,
                       assignments: Sequence[RoleAssignment], role: str) -> float:
    """LCC fraction remaining after deterministically removing every holder
    of ``role``; 0.0 when the role held the whole graph."""
    nodes = _role_nodes(graph, assignments, role)
    if not nodes:
        raise EmptyRoleError(f"no nodes hold role {role!r}")
    before = _lcc_excluding(graph, set())
    if before == 0:
        return 1.0
    after = _lcc_excluding(graph, set(nodes))
    return after / before


def removal_curve(graph: TemporalGraph, ordering: str = "by_degree_desc",
                  steps: int = 10, seed: int = 0,
                  ) -> list[tuple[float, float]]:
    """Progressive removal along an ordering, LCC recorded at each step.

    ``by_degree_desc`` removes highest-degree first (ties by node id);
    ``random`` uses a seeded shuffle. Returns (removed fraction,
    LCC fraction of the original LCC) pairs, including the starting point.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    n = graph.node_count
    if n == 0:
        raise ValueError("empty graph")
    if ordering == "by_degree_desc":
        deg = graph.degrees()
        order = sorted(range(n), key=lambda i: (-deg[i], i))
    elif ordering == "random":
        rng = stream(seed, "removal-curve")
        order = list(rng.permutation(n))
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    before = _lcc_excluding(graph, set())
    curve = [(0.0, 1.0)]
    removed: set[int] = set()
    checkpoints = [round(n * k / steps) for k in range(1, steps + 1)]
    pos = 0
    for target in checkpoints:
        while pos < target and pos < n:
            removed.add(int(order[pos]))
            pos += 1
        lcc = _lcc_excluding(graph, removed)
        curve.append((pos / n, lcc / before if before else 0.0))
    return curve
