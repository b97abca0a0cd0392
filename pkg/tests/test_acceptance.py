"""Acceptance criteria, one test each.

Every test records a ``[PASS]``/``[FAIL]`` line with its pinned tolerance;
the lines are printed in the terminal summary.
"""
import os
import time

import numpy as np
import pytest

from tnest import checks, experiments, measures
from tnest.graph import from_contacts, read_edge_list
from tnest.refinement import refine_active, stable_depth
from tnest.sampler import SamplerConfig, count_rewirings, sample

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

HT09_ENV = "TNEST_HT09"


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def run_timed(name, limit):
    fn, kwargs = checks.FULL[name]
    res = checks.run_check(name, fn, kwargs)
    ok = res.passed and res.seconds < limit
    return ok, f"{res.detail}; {res.seconds:.1f}s (limit {limit}s)"


def test_1_refinement_oracle():
    record(1, "refinement equals naive completion refinement (exact)",
           *run_timed("refinement_oracle", 60))


def test_2_color_preservation():
    record(2, "t-NeSt keeps depth-d partitions, r = 50*E (exact)",
           *run_timed("color_preservation", 120))


def test_3_class_reachability():
    record(3, "move closure equals enumerated class (exact)",
           *run_timed("class_reachability", 600))


def test_4_uniformity():
    record(4, f"chain frequencies over 1e6 steps (chi-square, level {checks.CHI2_LEVEL})",
           *run_timed("uniformity", 600))


def test_5_katz_preservation():
    record(5, f"Katz unchanged by t-NeSt(stable), alpha 0.1 (tol {checks.TOL_KATZ_PRESERVED:g})",
           *run_timed("katz_preservation", 600))


def test_6_katz_triple():
    record(6, f"Katz = block Katz (tol {checks.TOL_KATZ_BLOCK:g}) and within walk tail bound",
           *run_timed("katz_triple", 600))


def test_7_sae_depth_curve():
    graphs = experiments.sweep_graphs(3, n_nodes=80, n_times=240, density=50, seed=0)
    rows = experiments.depth_sweep(graphs, n_samples=3, seed=0)
    katz = [r["katz_sae_mean"] for r in rows]
    comm = [r["communicability_sae_mean"] for r in rows]
    monotone = all(b <= a * (1 + 1e-9) for a, b in zip(katz, katz[1:]))
    ok = monotone and katz[-1] <= 1e-12
    curve = ", ".join(f"{r['depth']}:{k:.3g}" for r, k in zip(rows, katz))
    observed = "yes" if comm[-1] <= 1e-10 else "no"
    record(7, "mean Katz SAE non-increasing in d and <= 1e-12 at stable depth",
           ok, f"Katz SAE by depth [{curve}]; communicability SAE at stable depth "
               f"{comm[-1]:.3g} (<= 1e-10 observed: {observed}, not asserted)")


def test_8_baselines():
    record(8, "DSS, RT, RC and RE invariants over 50 graphs (exact)",
           *run_timed("baselines", 600))


def test_9_measures():
    record(9, f"measures equal definition loops (tol {checks.TOL_MEASURE:g}), toys exact",
           *run_timed("measures", 600))


def _synthetic(n_contacts, n_nodes, n_times, seed):
    rng = np.random.default_rng(seed)
    u = rng.integers(0, n_nodes, n_contacts)
    v = (u + rng.integers(1, n_nodes, n_contacts)) % n_nodes
    return from_contacts(u, v, rng.integers(0, n_times, n_contacts), n_nodes)


def test_10_performance():
    g = _synthetic(10**6, 10_000, 1000, seed=0)
    t0 = time.perf_counter()
    a = refine_active(g)
    refine_s = time.perf_counter() - t0

    # fixed graph, so the ladder in T*r varies only the rewiring budget
    n_times, per_slice = 20, 60
    rng = np.random.default_rng(1)
    m = n_times * per_slice
    u = rng.integers(0, 300, m)
    v = (u + rng.integers(1, 300, m)) % 300
    h = from_contacts(u, v, np.repeat(np.arange(n_times), per_slice), 300)
    unit = []
    for r in (12_500, 25_000, 50_000, 100_000):
        best = np.inf
        for _ in range(3):
            t0 = time.perf_counter()
            sample(h, SamplerConfig("tnest", 1, r, 7))
            best = min(best, time.perf_counter() - t0)
        unit.append(best / (h.T * r))
    spread = max(unit) / min(unit)
    ok = refine_s < 10 and spread <= 2
    record(10, "refine 1e6 contacts < 10s; sampling time per T*r within 2x over 4 points",
           ok, f"refine {refine_s:.2f}s ({a.depth} rounds, {g.E} edges); "
               f"seconds per attempt {[f'{x:.3g}' for x in unit]}, max/min {spread:.2f}")


def test_11_ht09():
    path = os.environ.get(HT09_ENV)
    if not path or not os.path.exists(path):
        ACCEPTANCE_LINES.append(f"[SKIP] criterion 11: ht09 not found (set {HT09_ENV})")
        pytest.skip(f"set {HT09_ENV} to an 'u v t' edge list of ht09")
    g = read_edge_list(path, directed=False)
    depth = stable_depth(g)
    n_inf = count_rewirings(g, None)
    n_one = count_rewirings(g, 1)
    pers = measures.edge_persistence(g)
    tri = measures.triangles(g)
    samples = [measures.edge_persistence(s) for _, _, s, _ in
               experiments.draw_samples(g, "tnest", None, 10, seed=0)]
    mean_c = float(np.mean(samples))
    ok = (depth == 4 and n_inf == 1 and n_one == 698
          and round(pers, 3) == 0.891 and round(tri) == 157
          and abs(mean_c - 0.890) <= 0.001)
    record(11, "ht09 table values", ok,
           f"stable depth {depth}, rewirings inf/1 = {n_inf}/{n_one}, C = {pers:.4f}, "
           f"triangles per temporal node {tri:.4g}, t-NeSt(inf) mean C {mean_c:.4f}")
