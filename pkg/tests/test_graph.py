import io

import numpy as np
import pytest
from hypothesis import given, settings

from tnest.graph import (GraphError, ParseError, TemporalGraph, TemporalNode, aggregated_graph,
                         causal_completion, classify_nodes, format_edge_list, from_contacts,
                         parse_edge_list, read_edge_list, successors, time_slice, write_edge_list)

from conftest import make_graphs, temporal_graphs

# six nodes a..f over times 1, 2, 3; e talks to d and c, a is silent at time 3
SIX = """\
a b 1
e d 1
e c 1
a f 2
e d 2
b f 3
e c 3
"""


def _tn(g, label, time):
    return TemporalNode(g.labels.index(label), int(np.searchsorted(g.timestamps, time)))


def test_parse_directed_sizes():
    g = parse_edge_list("a b 1\nb c 2")
    assert (g.V, g.T, g.E) == (3, 2, 2)
    assert g.labels == ["a", "b", "c"]


def test_parse_undirected_doubles_records():
    g = parse_edge_list("a b 1", directed=False)
    assert g.E == 2
    assert g.edge_set(0) == {(0, 1), (1, 0)}


def test_parse_self_loop_reports_line():
    with pytest.raises(ParseError, match="line 2.*self-loop"):
        parse_edge_list("a b 1\na a 1")


@pytest.mark.parametrize("text,msg", [
    ("a b\n", "line 1"),
    ("a b x\n", "not an integer"),
    ("# only a comment\n\n", "no edges"),
    ("", "no edges"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ParseError, match=msg) as info:
        parse_edge_list(text)
    assert isinstance(info.value, GraphError)


def test_parse_accepts_bytes_files_and_comments():
    text = "# header\na b 5\n\nb a 7\n"
    for src in (text, text.encode(), io.StringIO(text), io.BytesIO(text.encode())):
        g = parse_edge_list(src)
        assert list(g.timestamps) == [5, 7]


def test_duplicates_collapse_with_count(caplog):
    g = parse_edge_list("a b 1\na b 1\na b 1\nb c 1")
    assert g.E == 2 and g.duplicates == 2
    assert "collapsed 2 duplicate" in caplog.text


def test_mirrored_undirected_line_is_not_a_duplicate():
    g = parse_edge_list("a b 1\nb a 1", directed=False)
    assert g.E == 2 and g.duplicates == 0


def test_timestamps_sorted_and_deduplicated():
    g = parse_edge_list("a b 30\nb c 10\nc a 30")
    assert list(g.timestamps) == [10, 30]
    assert g.slice_sizes().tolist() == [1, 2]


def test_invalid_graphs_rejected():
    with pytest.raises(GraphError, match="symmetric"):
        TemporalGraph([0], [1], [0], [1], 2, directed=False)
    with pytest.raises(GraphError, match="duplicate"):
        TemporalGraph([0, 0], [1, 1], [0, 0], [1], 2)
    with pytest.raises(GraphError, match="at least one edge"):
        TemporalGraph([0], [1], [0], [1, 2], 2)
    with pytest.raises(GraphError, match="increasing"):
        TemporalGraph([0], [1], [0], [5, 5], 2)
    with pytest.raises(GraphError, match="no edges"):
        TemporalGraph([], [], [], [], 2)


def test_arrays_are_read_only():
    g = parse_edge_list("a b 1")
    with pytest.raises(ValueError):
        g.src[0] = 1


def test_six_node_successors_and_activity():
    g = parse_edge_list(SIX, directed=False)
    got = successors(g, g.labels.index("e"), 0)
    want = {_tn(g, "d", 1), _tn(g, "c", 1), _tn(g, "d", 2), _tn(g, "c", 3)}
    assert got == want
    a = g.labels.index("a")
    active = [a in classify_nodes(g, t)[0] for t in range(3)]
    assert active == [True, True, False]


def test_successors_empty_when_no_later_edges():
    g = parse_edge_list("a b 1\nb c 2")
    assert successors(g, 0, 1) == set()
    assert successors(g, 2, 0) == set()


def test_time_slice_small():
    g = parse_edge_list("a b 1\nb c 2")
    assert time_slice(g, 0) == {(0, 1)}


def test_aggregated_multiplicity():
    g = parse_edge_list("a b 1\na b 2\nb c 2")
    assert aggregated_graph(g) == {(0, 1): 2, (1, 2): 1}


def test_completion_single_slice_is_slice_adjacency():
    g = parse_edge_list("a b 1\nb c 1\nc a 1")
    cc = causal_completion(g)
    assert (cc.adjacency != g.adjacency(0)).nnz == 0


def test_completion_two_slice_blocks():
    g = parse_edge_list("a b 1\nb c 2", directed=True)
    a1 = g.adjacency(0).toarray()
    a2 = g.adjacency(1).toarray()
    want = np.block([[a1, a2], [np.zeros((3, 3)), a2]])
    np.testing.assert_array_equal(causal_completion(g).adjacency.toarray(), want)


def test_completion_guard():
    g = parse_edge_list("a b 1\nb c 2")
    with pytest.raises(GraphError):
        causal_completion(g, max_order=5)


def test_random_graph_properties(small_graphs):
    for g in small_graphs:
        cc = causal_completion(g)
        for t in range(g.T):
            active, sending = classify_nodes(g, t)
            assert sending <= active
            if not g.directed:
                assert sending == active
                a = g.adjacency(t)
                assert (a != a.T).nnz == 0
            for v in range(g.V):
                s = successors(g, v, t)
                assert cc.out_neighbors(v, t) == s
                if t + 1 < g.T:
                    assert successors(g, v, t + 1) <= s
        assert sum(aggregated_graph(g).values()) == g.E
        rebuilt = {(u, v, t) for t in range(g.T) for u, v in time_slice(g, t)}
        assert rebuilt == set(zip(g.src.tolist(), g.dst.tolist(), g.tidx.tolist()))


def test_classify_matches_edge_scan():
    for g in make_graphs(20, seed=5, directed=True):
        for t in range(g.T):
            edges = [(u, v) for u, v, s in zip(g.src, g.dst, g.tidx) if s == t]
            active = {int(x) for e in edges for x in e}
            sending = {int(u) for u, _ in edges}
            assert classify_nodes(g, t) == (frozenset(active), frozenset(sending))


@settings(max_examples=60, deadline=None)
@given(temporal_graphs())
def test_round_trip(g):
    g = parse_edge_list(format_edge_list(g), g.directed)
    assert parse_edge_list(format_edge_list(g), g.directed) == g


@settings(max_examples=30, deadline=None)
@given(temporal_graphs(directed=False))
def test_round_trip_collapsed(g):
    g = parse_edge_list(format_edge_list(g), directed=False)
    assert parse_edge_list(format_edge_list(g, collapse_undirected=True), directed=False) == g


def test_equality_ignores_internal_ids():
    g = parse_edge_list("c a 2\nb a 1")
    h = parse_edge_list("b a 1\nc a 2")
    assert g.labels != h.labels
    assert g == h and hash(g) == hash(h)
    assert g != parse_edge_list("a b 1\nc a 2")


def test_file_round_trip(tmp_path):
    g = parse_edge_list(SIX, directed=False)
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    assert read_edge_list(path, directed=False) == g


def test_serialization_sorted_by_time_then_node_ids():
    # ids follow first appearance: c=0, a=1, b=2
    g = parse_edge_list("c a 2\nb a 1\na b 2")
    assert format_edge_list(g) == "b a 1\nc a 2\na b 2\n"


def test_from_contacts_drops_unused_times():
    g = from_contacts([0, 1], [1, 2], [100, 7], 3)
    assert list(g.timestamps) == [7, 100]


def test_relabel_permutes_nodes():
    g = parse_edge_list("a b 1\nb c 2")
    h = g.relabel([2, 0, 1])
    assert h.edge_set(0) == {(2, 0)}
    assert h.E == g.E
