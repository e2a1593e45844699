"""collabnet: temporal collaboration-network analytics.

Builds quarterly co-contribution graphs from contribution event logs and
provides centrality, cohesion, burst, role, resilience, statistical, and
desk-scale neural analyses over them, plus synthetic generators with
planted ground truth for verification.
"""

__version__ = "0.1.0"

from . import (centrality, cohesion, graph, ingest, neural, resilience,
               roles, stats, synth, temporal)

__all__ = ["centrality", "cohesion", "graph", "ingest", "neural",
           "resilience", "roles", "stats", "synth", "temporal",
           "__version__"]
