import math

import pytest

import noah


@pytest.fixture
def small_graph():
    edges = [[0, 1], [1, 2], [0, 1, 3], [2, 4], [0, 5], [1, 2, 3]]
    attrs = [[1, 0], [1, 0], [0, 1], [0, 1], [1, 1], [0, 0]]
    return noah.AttributedHypergraph(edges, attrs)


def test_construct_and_vectors(small_graph):
    assert small_graph.node_count == 6
    assert small_graph.edge_count == 6
    assert small_graph.attr_count == 2
    assert sum(noah.degree_vector(small_graph)) == sum(noah.size_vector(small_graph))


def test_partition_covers_every_edge(small_graph):
    part = noah.umhs_partition(small_graph, rounds=5, seed=3)
    core = set(part.core)
    assert all(core & set(e) for e in small_graph.hyperedges)
    assert sorted(part.core + part.fringe) == list(range(6))


def test_fit_generate_roundtrip(small_graph):
    part = noah.umhs_partition(small_graph, rounds=5, seed=3)
    config = noah.FitConfig()
    config.epochs = 20
    params, trace = noah.fit(small_graph, part, config, seed=1)
    assert len(trace.epochs) == 20
    assert math.isclose(sum(params.p_seed), 1.0, abs_tol=1e-9)
    assert trace.epochs[-1].total <= trace.epochs[0].total

    gen = noah.generate(params, part, small_graph, num_edges=40, seed=9)
    assert gen.edge_count == 40
    again = noah.generate(params, part, small_graph, num_edges=40, seed=9)
    assert gen.hyperedges == again.hyperedges


def test_metrics_and_self_compare(small_graph):
    ent = noah.hyperedge_entropy(small_graph, 0)
    assert len(ent) == small_graph.edge_count
    assert all(0.0 <= e <= math.log(2) + 1e-12 for e in ent)

    assert noah.baseline_score(10, 10, 3, 3) == pytest.approx(1.0)
    assert noah.wasserstein1([0.0, 1.0], [0.5, 0.5]) == pytest.approx(0.5)

    rep = noah.interplay_discrepancy(small_graph, small_graph)
    assert rep.he == 0.0 and rep.nhs == 0.0
    assert all(v == 0.0 for v in rep.ts.values())


def test_hypercl_preserves_sizes(small_graph):
    gen = noah.hypercl_generate(small_graph, seed=4)
    assert noah.size_vector(gen) == noah.size_vector(small_graph)


def test_structural_report(small_graph):
    rep = noah.structural_report(small_graph, 3)
    assert len(rep.singular_values) == 3
    assert rep.singular_values == sorted(rep.singular_values, reverse=True)


def test_file_roundtrip(tmp_path, small_graph):
    noah.save_edges(small_graph, str(tmp_path / "e.txt"))
    noah.save_attributes(small_graph, str(tmp_path / "a.txt"))
    back = noah.load_hypergraph(str(tmp_path / "e.txt"), str(tmp_path / "a.txt"))
    assert back.hyperedges == small_graph.hyperedges
    assert back.attributes == small_graph.attributes
