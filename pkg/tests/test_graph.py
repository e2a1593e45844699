import math
from datetime import datetime, timezone

import numpy as np
import pytest

from collabnet.graph import (TemporalGraph, WeightPolicy, build_window_graph,
                             from_edges, largest_connected_component,
                             read_edgelist, repo_clique_expansion_count,
                             write_edgelist)
from collabnet.ingest import EventRecord, align_quarters


def ev(cid, repo, when, action="commit", count=1):
    return EventRecord(cid, repo, action, count,
                       datetime.fromisoformat(when).replace(tzinfo=timezone.utc),
                       "graduated")


def dataset(records):
    return align_quarters(records)


def test_shared_repo_weights():
    # {a,b,c} in r1; {a,b} also in r2 -> ab weight 2, ac and bc weight 1
    ds = dataset([
        ev("a", "r1", "2020-01-10"), ev("b", "r1", "2020-02-10"),
        ev("c", "r1", "2020-03-01"), ev("a", "r2", "2020-01-20"),
        ev("b", "r2", "2020-02-25"),
    ])
    g = build_window_graph(ds, "2020Q1")
    idx = g.node_index()
    assert g.weight(idx["a"], idx["b"]) == 2.0
    assert g.weight(idx["a"], idx["c"]) == 1.0
    assert g.weight(idx["b"], idx["c"]) == 1.0
    assert g.edge_count == 3


def test_single_contributor_no_self_loop():
    ds = dataset([ev("solo", "r1", "2020-05-01")])
    g = build_window_graph(ds, "2020Q2")
    assert g.node_count == 1
    assert g.edge_count == 0


def test_log1p_dampening():
    ds = dataset([
        ev("a", "r1", "2020-01-10"), ev("b", "r1", "2020-02-10"),
        ev("a", "r2", "2020-01-20"), ev("b", "r2", "2020-02-25"),
    ])
    g = build_window_graph(ds, "2020Q1", WeightPolicy(dampening="log1p"))
    idx = g.node_index()
    assert g.weight(idx["a"], idx["b"]) == pytest.approx(math.log(3.0), abs=1e-12)


def test_empty_window_gives_empty_graph():
    ds = dataset([ev("a", "r1", "2020-01-10"), ev("b", "r1", "2020-07-10")])
    assert "2020Q2" in ds.windows  # gap quarter exists but is empty
    g = build_window_graph(ds, "2020Q2")
    assert g.node_count == 0 and g.edge_count == 0


def test_decay_lookback():
    # b contributed to r1 one quarter before the target window
    ds = dataset([
        ev("a", "r1", "2020-04-10"), ev("c", "r1", "2020-05-10"),
        ev("b", "r1", "2020-02-01"),
    ])
    raw = build_window_graph(ds, "2020Q2")
    assert raw.node_count == 2  # b absent without decay
    pol = WeightPolicy(decay_enabled=True, decay_lambda=0.1, decay_horizon=4)
    g = build_window_graph(ds, "2020Q2", pol)
    idx = g.node_index()
    assert g.node_count == 3
    assert g.weight(idx["a"], idx["c"]) == pytest.approx(1.0)
    assert g.weight(idx["a"], idx["b"]) == pytest.approx(math.exp(-0.1), rel=1e-12)


def test_clique_expansion_count():
    ds1 = dataset([ev(c, "r1", "2020-01-10") for c in "abcd"])
    assert repo_clique_expansion_count(ds1, "2020Q1") == 6
    ds2 = dataset([ev(c, "r1", "2020-01-10") for c in "abc"]
                  + [ev(c, "r2", "2020-01-10") for c in "xyz"])
    assert repo_clique_expansion_count(ds2, "2020Q1") == 6
    # repos {a,b,c} and {a,b}: 3 + 1 slots, dedup later yields 3 edges
    ds3 = dataset([ev(c, "r1", "2020-01-10") for c in "abc"]
                  + [ev(c, "r2", "2020-01-10") for c in "ab"])
    assert repo_clique_expansion_count(ds3, "2020Q1") == 4
    assert build_window_graph(ds3, "2020Q1").edge_count == 3


def test_edge_count_never_exceeds_expansion_bound():
    rng = np.random.Generator(np.random.Philox(7))
    records = []
    for _ in range(200):
        c = f"c{rng.integers(0, 30)}"
        r = f"r{rng.integers(0, 8)}"
        records.append(ev(c, r, "2021-02-01"))
    ds = dataset(records)
    g = build_window_graph(ds, "2021Q1")
    assert g.edge_count <= repo_clique_expansion_count(ds, "2021Q1")


def test_symmetry_and_sorted_neighbors():
    rng = np.random.Generator(np.random.Philox(3))
    records = [ev(f"c{rng.integers(0, 20)}", f"r{rng.integers(0, 5)}",
                  "2022-05-01") for _ in range(100)]
    g = build_window_graph(dataset(records), "2022Q2")
    for i in range(g.node_count):
        neigh = g.neighbors(i)
        assert (np.diff(neigh) > 0).all()  # strictly sorted, no duplicates
        for j in neigh:
            assert g.weight(int(j), i) == g.weight(i, int(j)) > 0


def test_determinism_same_inputs_same_graph():
    records = [ev(f"c{i % 9}", f"r{i % 4}", "2020-02-01") for i in range(40)]
    g1 = build_window_graph(dataset(records), "2020Q1")
    g2 = build_window_graph(dataset(list(reversed(records))), "2020Q1")
    assert g1.node_ids == g2.node_ids
    assert np.array_equal(g1.indptr, g2.indptr)
    assert np.array_equal(g1.indices, g2.indices)
    assert np.array_equal(g1.weights, g2.weights)


def test_largest_connected_component(triangle, k5):
    tri_iso = from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], n=4)
    size, members = largest_connected_component(tri_iso)
    assert size == 3 and members == {0, 1, 2}
    empty = from_edges([], n=0)
    assert largest_connected_component(empty) == (0, set())
    # K5 and K3, no bridge
    edges = [(i, j, 1.0) for i in range(5) for j in range(i + 1, 5)]
    edges += [(i, j, 1.0) for i in range(5, 8) for j in range(i + 1, 8)]
    size, _ = largest_connected_component(from_edges(edges))
    assert size == 5


def test_edgelist_round_trip(tmp_path, bowtie):
    write_edgelist(bowtie, tmp_path / "e.txt", tmp_path / "n.tsv")
    back = read_edgelist(tmp_path / "e.txt", tmp_path / "n.tsv")
    assert np.array_equal(back.indptr, bowtie.indptr)
    assert np.array_equal(back.indices, bowtie.indices)
    assert np.array_equal(back.weights, bowtie.weights)


def test_constructor_rejects_bad_edges():
    with pytest.raises(ValueError):
        TemporalGraph("w", ["a", "b"], {(0, 0): 1.0})
    with pytest.raises(ValueError):
        TemporalGraph("w", ["a", "b"], {(0, 1): -2.0})
    with pytest.raises(ValueError):
        TemporalGraph("w", ["a"], {(0, 1): 1.0})
