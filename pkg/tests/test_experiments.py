import numpy as np
import pytest

from tnest import experiments
from tnest.graph import parse_edge_list
from tnest.refinement import stable_depth


def test_parse_depth_and_method():
    assert experiments.parse_depth("inf") is None
    assert experiments.parse_depth(" Stable ") is None
    assert experiments.parse_depth("3") == 3
    with pytest.raises(ValueError):
        experiments.parse_depth("-1")
    assert experiments.parse_method("tnest:2") == ("tnest", 2)
    assert experiments.parse_method("tnest:inf") == ("tnest", None)
    assert experiments.parse_method("tnest") == ("tnest", 1)
    assert experiments.parse_method("dss") == ("dss", 0)
    with pytest.raises(ValueError):
        experiments.parse_method("rt:2")
    with pytest.raises(ValueError):
        experiments.parse_method("bogus")
    assert experiments.method_label("tnest", None) == "tnest(inf)"
    assert experiments.method_label("re", 1) == "re"


def test_sample_seed_is_stable_and_distinct():
    seeds = [experiments.sample_seed(7, k) for k in range(50)]
    assert len(set(seeds)) == 50
    assert all(0 <= s < 2**64 for s in seeds)
    assert experiments.sample_seed(7, 3) == seeds[3]
    assert experiments.sample_seed(8, 3) != seeds[3]


def test_draw_samples_prefix_property():
    g = parse_edge_list("a b 1\nc d 1\na c 2\nb d 2\nd a 3", directed=False)
    short = list(experiments.draw_samples(g, "tnest", 1, 2, seed=4))
    long = list(experiments.draw_samples(g, "tnest", 1, 4, seed=4))
    for (k, s, h, _), (k2, s2, h2, _) in zip(short, long):
        assert (k, s) == (k2, s2) and h == h2


def test_compare_single_sample_zero_std_and_stable_katz():
    g = parse_edge_list("a b 1\nb c 1\nc d 2\nd a 2\na c 3\nb d 3", directed=False)
    res = experiments.compare_methods(g, ["tnest:inf", "dss"], n_samples=1, seed=1)
    assert set(res["methods"]) == {"tnest(inf)", "dss"}
    for stats in res["methods"].values():
        for name, (mean, std) in stats.items():
            assert std in (0.0, None)
    assert res["methods"]["tnest(inf)"]["katz_sae"][0] <= 1e-12
    assert res["origin"]["katz_sae"] == 0.0


def test_depth_sweep_rows():
    graphs = experiments.sweep_graphs(2, n_nodes=12, n_times=10, density=20, seed=3)
    assert len(graphs) == 2 and all(not g.directed for g in graphs)
    rows = experiments.depth_sweep(graphs, n_samples=2, seed=0)
    top = max(stable_depth(g) for g in graphs)
    assert [r["depth"] for r in rows] == [str(d) for d in range(top + 2)] + ["inf"]
    assert all(r["n"] == 4 for r in rows)
    assert rows[-1]["katz_sae_mean"] <= 1e-12
    assert rows[0]["katz_sae_mean"] >= rows[-1]["katz_sae_mean"]


def test_sweep_graph_density():
    graphs = experiments.sweep_graphs(3, n_nodes=40, n_times=50, density=200, seed=1)
    # expected contacts per node is about the density
    per_node = np.mean([g.E / g.V for g in graphs])
    assert 180 < per_node < 220
