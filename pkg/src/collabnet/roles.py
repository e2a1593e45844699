"""Rule-based contributor roles and Markov role transitions.

Roles come from z-scoring four network metrics across a window's population
and applying threshold rules in fixed precedence:

    Core       z_degree > 1    and z_pagerank > 1
    Bridge     z_betweenness > 1.5 and z_degree <= 1
    Connector  z_degree > 0.5  and z_clustering < 0
    Peripheral z_degree < -0.5
    Regular    everything else

Earlier rules win, so every node gets exactly one role. The thresholds for
Bridge's degree cap and Connector are configurable; the others anchor the
taxonomy and default to the values above.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .centrality import MetricVector

ROLES = ("Core", "Bridge", "Connector", "Regular", "Peripheral")
ROLE_INDEX = {r: i for i, r in enumerate(ROLES)}


@dataclass(frozen=True)
class RoleThresholds:
    core_degree: float = 1.0
    core_pagerank: float = 1.0
    bridge_betweenness: float = 1.5
    bridge_degree_cap: float = 1.0
    connector_degree: float = 0.5
    connector_clustering: float = 0.0
    peripheral_degree: float = -0.5


@dataclass(frozen=True)
class RoleAssignment:
    contributor_id: str
    window: str
    role: str
    z_degree: float
    z_pagerank: float
    z_betweenness: float
    z_clustering: float


@dataclass
class TransitionMatrix:
    probs: np.ndarray  # 5x5, rows ordered as ROLES
    support: np.ndarray  # observed transitions per source role
    zero_support_roles: list[str] = field(default_factory=list)


class EmptySupportError(ValueError):
    """No contributor appears in two consecutive windows."""


def zscore(values: np.ndarray) -> tuple[np.ndarray, bool]:
    """Population z-scores; a zero-variance vector maps to all zeros and is
    flagged degenerate."""
    v = np.asarray(values, dtype=float)
    sd = v.std()
    if sd == 0:
        return np.zeros_like(v), True
    return (v - v.mean()) / sd, False


def classify_roles(degree: MetricVector, pagerank: MetricVector,
                   betweenness: MetricVector, clustering: MetricVector,
                   node_ids: Sequence[str],
                   thresholds: RoleThresholds = RoleThresholds(),
                   ) -> list[RoleAssignment]:
    """Assign one role per node from the window's metric vectors."""
    vectors = (degree, pagerank, betweenness, clustering)
    windows = {v.window for v in vectors}
    if len(windows) != 1:
        raise ValueError(f"metric vectors span multiple windows: {sorted(windows)}")
    n = len(node_ids)
    if any(len(v.values) != n for v in vectors):
        raise ValueError("metric vector lengths disagree with node_ids")
    window = degree.window
    zs = {}
    for mv in vectors:
        zs[mv.metric], degenerate = zscore(mv.values)
        if degenerate:
            warnings.warn(f"zero variance in {mv.metric} for window {window}; "
                          "z-scores set to 0", stacklevel=2)
    zd, zp = zs[degree.metric], zs[pagerank.metric]
    zb, zc = zs[betweenness.metric], zs[clustering.metric]
    t = thresholds
    out = []
    for i, cid in enumerate(node_ids):
        if zd[i] > t.core_degree and zp[i] > t.core_pagerank:
            role = "Core"
        elif zb[i] > t.bridge_betweenness and zd[i] <= t.bridge_degree_cap:
            role = "Bridge"
        elif zd[i] > t.connector_degree and zc[i] < t.connector_clustering:
            role = "Connector"
        elif zd[i] < t.peripheral_degree:
            role = "Peripheral"
        else:
            role = "Regular"
        out.append(RoleAssignment(cid, window, role,
                                  float(zd[i]), float(zp[i]),
                                  float(zb[i]), float(zc[i])))
    return out


def role_distribution(assignments: Sequence[RoleAssignment]) -> dict[str, float]:
    """Fraction of contributors per role; fractions sum to 1."""
    if not assignments:
        raise ValueError("no assignments")
    counts: dict[str, int] = {}
    for a in assignments:
        counts[a.role] = counts.get(a.role, 0) + 1
    total = len(assignments)
    return {role: counts[role] / total for role in ROLES if role in counts}


def transition_matrix(assignments_by_window: Sequence[Sequence[RoleAssignment]],
                      ) -> TransitionMatrix:
    """MLE role-transition probabilities from consecutive window pairs.

    Contributors absent in the next window contribute nothing (churn is not
    modeled as a state). Rows with zero observed support are flagged and
    left as all-zero rather than normalized.
    """
    counts = np.zeros((5, 5), dtype=np.int64)
    for prev, cur in zip(assignments_by_window, assignments_by_window[1:]):
        cur_role = {a.contributor_id: a.role for a in cur}
        for a in prev:
            nxt = cur_role.get(a.contributor_id)
            if nxt is not None:
                counts[ROLE_INDEX[a.role], ROLE_INDEX[nxt]] += 1
    support = counts.sum(axis=1)
    if support.sum() == 0:
        raise EmptySupportError("no contributor appears in two consecutive windows")
    probs = np.zeros((5, 5))
    zero_rows = []
    for r in range(5):
        if support[r] > 0:
            probs[r] = counts[r] / support[r]
        else:
            zero_rows.append(ROLES[r])
    return TransitionMatrix(probs=probs, support=support,
                            zero_support_roles=zero_rows)
