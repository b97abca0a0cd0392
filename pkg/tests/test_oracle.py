"""Checks of the brute-force oracles on hand-derived cases."""
import math
from math import comb

import numpy as np
import pytest

from tnest import checks, oracle
from tnest.graph import GraphError, parse_edge_list


def test_completion_colors_cover_all_temporal_nodes():
    g = parse_edge_list("a b 1\nb c 2")
    cols = oracle.naive_completion_colors(g, 2)
    assert set(cols) == {(v, t) for v in range(3) for t in range(2)}
    # (c, *) and (a, 2) have no successors; both copies of b reach only (c, 2)
    assert cols[(2, 0)] == cols[(2, 1)] == cols[(0, 1)]
    assert cols[(1, 0)] == cols[(1, 1)]
    assert len({cols[(0, 0)], cols[(1, 0)], cols[(2, 0)]}) == 3


def test_completion_oracle_size_guard():
    g = parse_edge_list("a b 1\nb c 2")
    with pytest.raises(GraphError):
        oracle.naive_completion_colors(g, 1, max_order=5)


def test_two_oracles_agree():
    for g in checks.random_graphs(30, 3, 9, 4, (0.2, 0.5)):
        for d in range(4):
            assert (oracle.naive_refinement_via_completion(g, d)
                    == oracle.direct_refinement_partition(g, d))


def test_depth_zero_class_counts_all_same_size_slices():
    g = parse_edge_list("a b 1\nc d 1\nb c 2")
    pairs = 4 * 3
    cls = oracle.enumerate_class(g, 0)
    assert len(cls) == comb(pairs, 2) * comb(pairs, 1)


def test_class_contains_input_and_closure_is_inside():
    g = parse_edge_list("a b 1\nc d 1\na c 2\nb d 2", directed=False)
    key = oracle.graph_key(oracle.slices_of(g))
    for d in (1, 2):
        cls = oracle.enumerate_class(g, d)
        assert key in cls.canonical_keys
        assert oracle.move_closure(g, d) <= cls.canonical_keys
        assert len(cls.graphs) == len(cls)


def test_enumeration_guard_and_closure_depth():
    g = parse_edge_list("a b 1\nb c 1\nc d 1\nd e 1\ne f 1\nf g 1")
    with pytest.raises(GraphError):
        oracle.enumerate_class(g, 1)
    with pytest.raises(ValueError):
        oracle.move_closure(g, 0)


def test_single_slice_depth_one_is_degree_class():
    # depth-1 colors of one undirected slice encode the degree sequence
    g = parse_edge_list("a b 1\nc d 1", directed=False)
    cls = oracle.enumerate_class(g, 1)
    assert len(cls) == 3  # the three perfect matchings of four nodes
    assert oracle.move_closure(g, 1) == cls.canonical_keys


def test_walk_count_katz_path():
    alpha = 0.3
    g = parse_edge_list("a b 1\nb c 2")
    want = [1 + alpha + alpha**2, 1 + alpha, 1]
    np.testing.assert_allclose(oracle.walk_count_katz(g, alpha, 5), want, atol=1e-15)
    # walks must respect time: b->c at 1 then a->b at 2 gives no length-2 walk
    g = parse_edge_list("b c 1\na b 2")
    a = g.labels.index("a")
    assert oracle.walk_count_katz(g, alpha, 5)[a] == pytest.approx(1 + alpha)


def test_walk_tail_bound():
    g = parse_edge_list("a b 1\na c 1")
    assert oracle.walk_tail_bound(g, 0.25, 3) == pytest.approx(0.5**4 / 0.5)
    assert oracle.walk_tail_bound(g, 0.5, 3) == math.inf


def test_block_katz_single_edge():
    g = parse_edge_list("u v 1")
    np.testing.assert_allclose(oracle.block_katz(g, 0.2), [1.2, 1.0])


def test_dense_communicability_single_edge():
    g = parse_edge_list("a b 1", directed=False)
    np.testing.assert_allclose(oracle.dense_communicability(g, 0.7), [math.exp(0.7)] * 2)
    d = parse_edge_list("a b 1")
    np.testing.assert_allclose(oracle.dense_communicability(d, 0.7), [1.7, 1.0])


def test_measure_loops_on_toys():
    assert oracle.persistence_loop(checks.persistence_toy()) == 0.5
    single, spread = checks.triangle_toys()
    assert oracle.triangles_loop(single) == 1 / 3
    assert oracle.causal_triangles_loop(spread) == 1 / 9
    g = parse_edge_list("a b 0\na b 3\na b 5")
    # gaps 3, 2: m = 2.5, sigma = 0.5
    assert oracle.burstiness_loop(g, "send") == pytest.approx(-2 / 3)


def test_in_time_moves_directed():
    slices = [frozenset({(0, 1)})]
    colors = [[0, 1, 1]]
    moves = list(oracle.in_time_moves(slices, colors, True))
    assert moves == [(0, frozenset({(0, 2)}))]


def test_quick_suite_passes():
    results = checks.run_suite(quick=True)
    assert [r.name for r in results] == list(checks.QUICK)
    for r in results:
        assert r.passed, r.line()


def test_suite_reports_crashes_as_failures():
    def boom(seed=0):
        raise RuntimeError("kaput")
    res = checks.run_check("boom", boom, {})
    assert not res.passed and "kaput" in res.detail
    assert res.line().startswith("[FAIL] boom")
