"""Property suite comparing the fast implementations with the oracles.

Each check draws its own seeded random graphs and returns a
:class:`CheckResult`; ``run_suite`` runs them all.  The CLI ``verify``
command and the acceptance tests both use these functions.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.stats

from . import measures, oracle
from .graph import TemporalGraph, aggregated_graph, random_temporal_graph
from .refinement import complete_colors, refine_active, same_partition, slice_colors
from .sampler import (SamplerConfig, dir_rewire_slice, dss_sample, rc_sample, re_sample,
                      rewiring_colors, rt_sample, tnest_sample, undir_rewire_slice)

STABLE = None
TOL_KATZ_PRESERVED = 1e-8
TOL_KATZ_BLOCK = 1e-10
TOL_MEASURE = 1e-12
CHI2_LEVEL = 0.01


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def random_graphs(n, seed, max_nodes, max_times, probs, min_nodes=2):
    """``n`` nonempty random graphs, alternating directed and undirected."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        directed = len(out) % 2 == 0
        g = random_temporal_graph(int(rng.integers(min_nodes, max_nodes + 1)),
                                  int(rng.integers(1, max_times + 1)),
                                  float(rng.choice(probs)), directed, rng)
        if g is not None:
            out.append(g)
    return out


# -- refinement -------------------------------------------------------------

def check_refinement_oracle(n_graphs=200, seed=0):
    """Fast refinement partitions equal naive refinement on the causal completion."""
    bad = []
    for i, g in enumerate(random_graphs(n_graphs, seed, 12, 5, (0.1, 0.3, 0.6))):
        a = refine_active(g, g.V * g.T + 1, seed=i, keep_history=True)
        for d in range(a.depth + 1):
            if a.partition(d) != oracle.naive_refinement_via_completion(g, d):
                bad.append((i, d))
        # past convergence the naive partition must not change either
        if a.partition() != oracle.naive_refinement_via_completion(g, a.depth + 1):
            bad.append((i, a.depth + 1))
    return not bad, f"{n_graphs} graphs, mismatches={bad[:5]}"


def check_color_preservation(n_graphs=100, seed=1, depths=(1, 2, STABLE), factor=50):
    """t-NeSt samples keep the depth-d partition of all temporal nodes."""
    bad = []
    accepted = 0
    for i, g in enumerate(random_graphs(n_graphs, seed, 12, 5, (0.1, 0.3, 0.6))):
        for d in depths:
            cfg = SamplerConfig("tnest", d, None, seed * 1000 + i, rewiring_factor=factor)
            out, stats = tnest_sample(g, cfg)
            accepted += stats.accepted
            k = g.V * g.T + 1 if d is None else d
            before = oracle.completed_colors_exact(g, k)
            after = oracle.completed_colors_exact(out, k)
            same = same_partition(np.ravel(before), np.ravel(after))
            if not same or g.slice_sizes().tolist() != out.slice_sizes().tolist():
                bad.append((i, d))
    return not bad, f"{n_graphs} graphs x depths {depths}, accepted moves={accepted}, failures={bad[:5]}"


def check_class_reachability(n_instances=20, seed=2, depths=(1, 2, STABLE)):
    """BFS closure of in-time moves equals the enumerated color class."""
    rng = np.random.default_rng(seed)
    bad = []
    sizes = []
    done = 0
    while done < n_instances:
        directed = done % 2 == 0
        g = random_temporal_graph(int(rng.integers(3, 6)), int(rng.integers(1, 4)),
                                  0.15 if directed else 0.3, directed, rng)
        if g is None or g.slice_sizes().max() > (4 if directed else 6):
            continue
        for d in depths:
            k = g.V * g.T + 1 if d is None else d
            closure = oracle.move_closure(g, k)
            cls = oracle.enumerate_class(g, k)
            sizes.append(len(cls))
            if closure != cls.canonical_keys:
                bad.append((done, d))
        done += 1
    return not bad, f"{n_instances} instances, class sizes {min(sizes)}..{max(sizes)}, failures={bad}"


# -- uniformity -------------------------------------------------------------

def uniformity_instance():
    """Fixed undirected instance whose depth-1 class has 21 members."""
    slices = [
        {(0, 1), (0, 3), (0, 4), (1, 2)},
        {(0, 3), (1, 2), (2, 4), (3, 4)},
    ]
    slices = [s | {(v, u) for u, v in s} for s in slices]
    return TemporalGraph.from_slices(slices, 5, directed=False)


def chain_frequencies(g, depth, steps, thin, seed):
    """Run the t-NeSt chain for ``steps`` attempts and tally states every ``thin`` steps.

    Slices evolve independently, so each slice keeps its own state and the
    recorded state is the tuple of all slices.
    """
    assignment = rewiring_colors(g, depth, seed)
    rng = np.random.default_rng(seed)
    state = []
    views = []
    if g.directed:
        it = slice_colors(g, assignment) if assignment is not None else None
        for t in range(g.T):
            view = next(it) if it is not None else None
            views.append(view.colors.copy() if view is not None else np.zeros(g.V, dtype=np.int64))
    else:
        full = complete_colors(g, assignment) if assignment is not None else np.zeros((g.T, g.V), int)
        views = [full[t].tolist() for t in range(g.T)]
    for t in range(g.T):
        u, v = g.slice_arrays(t)
        state.append(list(zip(u.tolist(), v.tolist())))
    counts = Counter()
    per_slice = max(thin // g.T, 1)
    for _ in range(steps // thin):
        for t in range(g.T):
            if g.directed:
                state[t], _ = dir_rewire_slice(state[t], views[t], per_slice, rng)
            else:
                state[t], _ = undir_rewire_slice(state[t], views[t], per_slice, rng)
        counts[oracle.graph_key(state)] += 1
    return counts


def check_uniformity(steps=10**6, thin=100, seed=3, depth=1):
    """Thinned chain frequencies on a fixed instance pass a chi-square test."""
    g = uniformity_instance()
    cls = oracle.enumerate_class(g, depth)
    counts = chain_frequencies(g, depth, steps, thin, seed)
    outside = set(counts) - cls.canonical_keys
    obs = np.array([counts.get(k, 0) for k in sorted(cls.canonical_keys)], dtype=float)
    stat, p = scipy.stats.chisquare(obs)
    ok = not outside and 3 <= len(cls) <= 50 and p > CHI2_LEVEL
    return ok, f"class size {len(cls)}, {int(obs.sum())} thinned draws, chi2={stat:.2f}, p={p:.3f}"


# -- centralities -----------------------------------------------------------

def check_katz_preservation(n_graphs=100, seed=4, alpha=0.1):
    """Katz centrality is unchanged by stable-depth t-NeSt."""
    worst = 0.0
    for i, g in enumerate(random_graphs(n_graphs, seed, 40, 20, (0.02, 0.05, 0.1), min_nodes=5)):
        out, _ = tnest_sample(g, SamplerConfig("tnest", None, None, i))
        worst = max(worst, float(np.abs(measures.temporal_katz(g, alpha)
                                        - measures.temporal_katz(out, alpha)).max()))
    return worst < TOL_KATZ_PRESERVED, f"max |dKatz|={worst:.3g} (tol {TOL_KATZ_PRESERVED:g})"


def check_katz_triple(n_graphs=50, seed=5, k_max=12):
    """Slice resolvents agree with block Katz and with explicit walk counts."""
    worst_block = 0.0
    bad_walk = []
    for i, g in enumerate(random_graphs(n_graphs, seed, 10, 4, (0.1, 0.3))):
        deg = int(np.bincount(g.src, minlength=g.V).max())
        alpha = min(0.1, 0.5 / deg)
        k = measures.temporal_katz(g, alpha)
        worst_block = max(worst_block, float(np.abs(k - oracle.block_katz(g, alpha)).max()))
        walks = oracle.walk_count_katz(g, alpha, k_max)
        bound = oracle.walk_tail_bound(g, alpha, k_max)
        if np.any(k - walks < -1e-12) or np.any(k - walks > bound + 1e-12):
            bad_walk.append(i)
    ok = worst_block < TOL_KATZ_BLOCK and not bad_walk
    return ok, f"max |katz-block|={worst_block:.3g}, tail-bound violations={bad_walk}"


# -- baselines --------------------------------------------------------------

def _slice_degrees(g):
    """Per-slice out-degree sequences (the degree sequence for undirected graphs).

    Directed DSS uses tilts, which keep out-degrees but not in-degrees.
    """
    return [np.bincount(g.slice_arrays(t)[0], minlength=g.V).tolist() for t in range(g.T)]


def _contacts_per_time(g):
    c = g.slice_sizes()
    return (c if g.directed else c // 2).tolist()


def _total_contacts(g):
    mask = np.ones(g.E, bool) if g.directed else g.src < g.dst
    return np.bincount(np.concatenate([g.src[mask], g.dst[mask]]), minlength=g.V).tolist()


def check_baselines(n_graphs=50, seed=6):
    """Exact invariants of DSS, RT, RC and RE."""
    fails = Counter()
    graphs = random_graphs(n_graphs, seed, 12, 6, (0.1, 0.3))
    for i, g in enumerate(graphs):
        dss = dss_sample(g, seed=i)
        if _slice_degrees(dss) != _slice_degrees(g):
            fails["dss"] += 1
        rt = rt_sample(g, seed=i)
        if (aggregated_graph(rt) != aggregated_graph(g)
                or _contacts_per_time(rt) != _contacts_per_time(g)):
            fails["rt"] += 1
        rc = rc_sample(g, seed=i)
        if (_contacts_per_time(rc) != _contacts_per_time(g)
                or not set(aggregated_graph(rc)) <= set(aggregated_graph(g))):
            fails["rc"] += 1
        if not g.directed:
            re = re_sample(g, 20 * g.E, seed=i)
            if _total_contacts(re) != _total_contacts(g) or re.E != g.E:
                fails["re"] += 1
    return not fails, f"{n_graphs} graphs each, failures={dict(fails)}"


# -- measures ---------------------------------------------------------------

def persistence_toy():
    """Undirected contact 0-1 at two times: C = (1 + 1) / E with E = 4."""
    edge = {(0, 1), (1, 0)}
    return TemporalGraph.from_slices([edge, edge], 2, directed=False)


def triangle_toys():
    """Directed 3-cycle in one slice and spread over three increasing times."""
    cyc = [(0, 1), (1, 2), (2, 0)]
    single = TemporalGraph.from_slices([set(cyc)], 3)
    spread = TemporalGraph.from_slices([{e} for e in cyc], 3)
    return single, spread


def check_measures(n_graphs=100, seed=7):
    """Fast measures equal their definition loops; toy values are reproduced."""
    worst = 0.0
    for g in random_graphs(n_graphs, seed, 10, 6, (0.1, 0.3, 0.5)):
        pairs = [(measures.edge_persistence(g), oracle.persistence_loop(g)),
                 (measures.triangles(g), oracle.triangles_loop(g)),
                 (measures.causal_triangles(g), oracle.causal_triangles_loop(g))]
        for kind in ("active", "send", "receive"):
            try:
                pairs.append((measures.burstiness(g, kind), oracle.burstiness_loop(g, kind)))
            except ValueError:
                continue
        worst = max(worst, max(abs(a - b) for a, b in pairs))
    single, spread = triangle_toys()
    toys = (measures.edge_persistence(persistence_toy()) == 0.5
            and measures.triangles(single) == 1 / 3
            and measures.causal_triangles(spread) == 1 / 9)
    ok = worst < TOL_MEASURE and toys
    return ok, f"max |fast-loop|={worst:.3g} (tol {TOL_MEASURE:g}), toys exact={toys}"


# -- suite ------------------------------------------------------------------

FULL = {
    "refinement_oracle": (check_refinement_oracle, {}),
    "color_preservation": (check_color_preservation, {}),
    "class_reachability": (check_class_reachability, {}),
    "uniformity": (check_uniformity, {}),
    "katz_preservation": (check_katz_preservation, {}),
    "katz_triple": (check_katz_triple, {}),
    "baselines": (check_baselines, {}),
    "measures": (check_measures, {}),
}

QUICK = {
    "refinement_oracle": (check_refinement_oracle, {"n_graphs": 40}),
    "color_preservation": (check_color_preservation, {"n_graphs": 20, "factor": 20}),
    "class_reachability": (check_class_reachability, {"n_instances": 4}),
    "uniformity": (check_uniformity, {"steps": 10**5, "thin": 50}),
    "katz_preservation": (check_katz_preservation, {"n_graphs": 20}),
    "katz_triple": (check_katz_triple, {"n_graphs": 10}),
    "baselines": (check_baselines, {"n_graphs": 10}),
    "measures": (check_measures, {"n_graphs": 20}),
}


def run_check(name, fn, kwargs, seed=None):
    kwargs = dict(kwargs)
    if seed is not None:
        kwargs["seed"] = seed
    t0 = time.perf_counter()
    try:
        ok, detail = fn(**kwargs)
    except Exception as exc:  # a crash is a failed property, not a crashed suite
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def run_suite(quick=False, seed=None, only=None):
    """Run every check; a given ``seed`` replaces each per-check default seed."""
    table = QUICK if quick else FULL
    names = [n for n in table if only is None or n in only]
    return [run_check(n, *table[n], seed=seed) for n in names]
