import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_edge_betweenness, brute_node_betweenness, graph_corpus, hop_distances
from thermonet.errors import ContractError
from thermonet.metrics import (
    Ecdf,
    degree_stats,
    ecdf,
    edge_betweenness,
    node_betweenness,
    read_ecdf_csv,
    read_metrics_csv,
    write_ecdf_csv,
    write_metrics_csv,
)
from thermonet.netmap import QuantileNetwork, build_network

net = QuantileNetwork.from_edges


def test_single_edge():
    t = edge_betweenness(net([(0, 1)]))
    assert t.raw == {(0, 1): 1.0} and t.n_nodes == 2 and t.scores[(0, 1)] == 0.5


def test_directed_path():
    t = edge_betweenness(net([(0, 1), (1, 2)]))
    assert t.raw == {(0, 1): 2.0, (1, 2): 2.0}
    assert t.scores[(0, 1)] == pytest.approx(1 / 3) and t.scores[(1, 2)] == pytest.approx(1 / 3)


def test_directed_three_cycle():
    t = edge_betweenness(net([(0, 1), (1, 2), (2, 0)]))
    assert all(v == pytest.approx(0.5) for v in t.scores.values())


def test_counts_are_ignored():
    weighted = build_network([0, 1, 0, 1, 0, 1, 2], 3)
    assert weighted.counts[(0, 1)] == 3
    plain = net([(0, 1), (1, 0), (1, 2)])
    assert edge_betweenness(weighted).raw == edge_betweenness(plain).raw


def test_isolated_node_enters_normalization():
    t = edge_betweenness(net([(0, 1)], nodes=[0, 1, 2]))
    assert t.n_nodes == 3 and t.scores[(0, 1)] == pytest.approx(1 / 6)


def test_empty_edge_set():
    with pytest.raises(ContractError):
        edge_betweenness(QuantileNetwork(q=2, nodes=(0,), edges=()))


@pytest.mark.parametrize("nodes, edges", graph_corpus(count=60, seed=7, p=0.4))
def test_matches_brute_force(nodes, edges):
    t = edge_betweenness(net(edges, nodes=nodes))
    ref = brute_edge_betweenness(nodes, edges)
    for e, r in ref.items():
        assert abs(t.raw[e] - float(r)) <= 1e-12


@pytest.mark.parametrize("nodes, edges", graph_corpus(count=40, seed=11, p=0.35, n_range=(3, 12)))
def test_matches_networkx(nodes, edges):
    t = edge_betweenness(net(edges, nodes=nodes))
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    ref = nx.edge_betweenness_centrality(g, normalized=False)
    for e, r in ref.items():
        assert t.raw[e] == pytest.approx(r, abs=1e-9)


@pytest.mark.parametrize("nodes, edges", graph_corpus(count=40, seed=3))
def test_conservation(nodes, edges):
    t = edge_betweenness(net(edges, nodes=nodes))
    _, dist = hop_distances(nodes, edges)
    total = sum(d for s in nodes for v, d in dist[s].items() if v != s)
    assert sum(t.raw.values()) == pytest.approx(total, abs=1e-9)
    assert all(0 <= v <= 1 for v in t.scores.values())


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_relabeling_invariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    edges = [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < 0.35]
    if not edges:
        return
    perm = [int(v) for v in rng.permutation(n)]
    t1 = edge_betweenness(net(edges, nodes=range(n)))
    t2 = edge_betweenness(net([(perm[a], perm[b]) for a, b in edges], nodes=perm))
    for a, b in edges:
        assert t1.scores[(a, b)] == pytest.approx(t2.scores[(perm[a], perm[b])], abs=1e-12)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_added_edge_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    edges = [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < 0.3]
    if not edges:
        return
    missing = [(a, b) for a in range(n) for b in range(n) if a != b and (a, b) not in edges]
    if not missing:
        return
    extra = missing[int(rng.integers(len(missing)))]
    grown = edge_betweenness(net(edges + [extra], nodes=range(n)))
    ref = brute_edge_betweenness(list(range(n)), edges + [extra])
    for e in edges:
        assert grown.raw[e] == pytest.approx(float(ref[e]), abs=1e-12)


def test_deterministic_bits(rng):
    edges = [(a, b) for a in range(20) for b in range(20) if a != b and rng.random() < 0.2]
    t1 = edge_betweenness(net(edges, nodes=range(20)))
    t2 = edge_betweenness(net(list(reversed(edges)), nodes=range(20)))
    assert t1.raw == t2.raw


def test_node_betweenness_examples():
    assert node_betweenness(net([(0, 1), (1, 2)])) == {0: 0.0, 1: 0.5, 2: 0.0}
    assert node_betweenness(net([(0, 1), (1, 0)])) == {0: 0.0, 1: 0.0}
    complete = [(a, b) for a in range(3) for b in range(3) if a != b]
    assert set(node_betweenness(net(complete)).values()) == {0.0}


@pytest.mark.parametrize("nodes, edges", graph_corpus(count=40, seed=5, n_range=(3, 8)))
def test_node_betweenness_brute_force(nodes, edges):
    got = node_betweenness(net(edges, nodes=nodes))
    ref = brute_node_betweenness(nodes, edges)
    n = len(nodes)
    for v in nodes:
        assert got[v] == pytest.approx(float(ref[v]) / ((n - 1) * (n - 2)), abs=1e-12)


def test_degree_stats():
    assert degree_stats(net([(0, 1)])) == {0: (0, 1), 1: (1, 0)}
    assert set(degree_stats(net([(0, 1), (1, 2), (2, 0)])).values()) == {(1, 1)}
    assert degree_stats(net([(0, 1)], nodes=[0, 1, 5]))[5] == (0, 0)


def test_ecdf_examples():
    e = ecdf([0.5])
    assert e(0.4) == 0 and e(0.5) == 1
    assert ecdf([1 / 3, 1 / 3])(1 / 3) == 1
    assert ecdf([0.1, 0.3])(0.2) == 0.5
    with pytest.raises(ContractError):
        ecdf([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50), st.lists(st.floats(-2e6, 2e6), max_size=50))
@settings(max_examples=60)
def test_ecdf_properties(sample, probes):
    e = ecdf(sample)
    xs = np.sort(np.array(probes + sample))
    F = e(xs)
    assert np.all(np.diff(F) >= 0)
    assert e(min(sample) - 1) == 0 and e(min(sample)) > 0 and e(max(sample)) == 1
    for x in probes:
        assert e(x) == sum(v <= x for v in sample) / len(sample)


def test_metrics_csv_round_trip(tmp_path, rng):
    edges = [(a, b) for a in range(7) for b in range(7) if a != b and rng.random() < 0.4]
    t = edge_betweenness(net(edges, nodes=range(7)))
    path = write_metrics_csv(t, tmp_path / "m.csv")
    assert path.read_text().splitlines()[0] == "src,dst,raw,score"
    back = read_metrics_csv(path)
    assert back.n_nodes == 7
    for e in t.scores:
        assert back.scores[e] == pytest.approx(t.scores[e], abs=0)


def test_ecdf_csv_round_trip(tmp_path):
    e = Ecdf(np.array([0.3, 0.1, 0.1, 0.7]))
    path = write_ecdf_csv(e, tmp_path / "e.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "value,cumfrac" and lines[-1].endswith(",1")
    assert np.array_equal(read_ecdf_csv(path).sorted_values, e.sorted_values)
