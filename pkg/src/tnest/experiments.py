"""Multi-sample comparisons of null models and SAE-vs-depth sweeps."""
from __future__ import annotations

import logging

import numpy as np

from . import measures
from .graph import random_temporal_graph
from .refinement import stable_depth
from .sampler import METHODS, SamplerConfig, sample

logger = logging.getLogger(__name__)

DEFAULT_METHODS = ("tnest:inf", "tnest:1", "dss", "re", "rt", "rc")


def parse_depth(text):
    """``"inf"`` (or ``"stable"``) maps to None, otherwise a non-negative int."""
    if isinstance(text, int):
        value = text
    elif text.strip().lower() in ("inf", "stable", "converged"):
        return None
    else:
        value = int(text)
    if value < 0:
        raise ValueError("depth must be >= 0 or 'inf'")
    return value


def format_depth(depth):
    return "inf" if depth is None else str(depth)


def parse_method(spec):
    """``"tnest:2"``, ``"tnest:inf"`` or a baseline name -> ``(method, depth)``."""
    name, _, depth = spec.partition(":")
    name = name.strip().lower()
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    if name != "tnest":
        if depth:
            raise ValueError(f"method {name!r} takes no depth")
        return name, 0 if name == "dss" else 1
    return name, parse_depth(depth or "1")


def method_label(method, depth):
    return f"tnest({format_depth(depth)})" if method == "tnest" else method


def sample_seed(master_seed, k):
    """Seed of sample ``k``; independent of how many samples are drawn."""
    ss = np.random.SeedSequence([master_seed % 2**64, k])
    hi, lo = ss.generate_state(2, np.uint32).tolist()
    return (hi << 32) | lo


def draw_samples(g, method, depth, n_samples, seed, rewirings=None):
    """Yield ``(k, seed_k, graph, stats)`` for ``n_samples`` samples."""
    for k in range(n_samples):
        sk = sample_seed(seed, k)
        cfg = SamplerConfig(method, depth, rewirings, sk)
        out, stats = sample(g, cfg)
        yield k, sk, out, stats


def _scalars(g, params, ref=None):
    row = {name: fn(g) for name, fn in measures.SCALAR_MEASURES.items()}
    katz = measures.temporal_katz(g, params.alpha)
    comm = measures.communicability(g, params.beta)
    if ref is not None:
        row["katz_sae"] = measures.sae(katz, ref[0], params.sae_floor)
        row["communicability_sae"] = measures.sae(comm, ref[1], params.sae_floor)
    return row, (katz, comm)


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    arr = np.asarray(vals, dtype=float)
    return float(arr.mean()), float(arr.std())


def compare_methods(g, methods=DEFAULT_METHODS, n_samples=10, seed=0,
                    params=measures.CentralityParams(), rewirings=None):
    """Mean and standard deviation of every measure per method.

    Returns
    -------
    dict
        ``{"measures": [...], "origin": {measure: value},
        "methods": {label: {measure: (mean, std)}}}``.  Standard deviations
        are population values, so a single sample gives zero.
    """
    origin, ref = _scalars(g, params)
    origin["katz_sae"] = 0.0
    origin["communicability_sae"] = 0.0
    names = list(origin)
    table = {}
    for spec in methods:
        method, depth = parse_method(spec)
        rows = [_scalars(out, params, ref)[0]
                for _, _, out, _ in draw_samples(g, method, depth, n_samples, seed, rewirings)]
        table[method_label(method, depth)] = {
            name: _mean_std([r[name] for r in rows]) for name in names}
    return {"measures": names, "origin": origin, "methods": table}


def sweep_graphs(n_graphs=3, n_nodes=80, n_times=240, density=100, directed=False, seed=0):
    """Random graphs for the SAE-vs-depth sweep.

    Each possible contact exists independently with probability
    ``density / (n_nodes * n_times)``, so a node takes part in about
    ``density`` contacts.
    """
    p = density / (n_nodes * n_times)
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n_graphs:
        g = random_temporal_graph(n_nodes, n_times, p, directed, rng)
        if g is not None:
            out.append(g)
    return out


def depth_sweep(graphs, depths=None, n_samples=3, seed=0, params=measures.CentralityParams(),
                rewirings=None):
    """Katz and communicability SAE of t-NeSt(d) samples against their source.

    ``depths`` defaults to ``0 .. max stable depth + 1`` followed by the
    stable depth (None).  Returns one row per depth with mean and standard
    deviation of each SAE over all graphs and samples.
    """
    if depths is None:
        top = max(stable_depth(g) for g in graphs)
        depths = list(range(top + 2)) + [None]
    refs = [(measures.temporal_katz(g, params.alpha), measures.communicability(g, params.beta))
            for g in graphs]
    rows = []
    for d in depths:
        ks, cs = [], []
        for gi, (g, (k0, c0)) in enumerate(zip(graphs, refs)):
            for _, _, out, _ in draw_samples(g, "tnest", d, n_samples, seed + gi, rewirings):
                ks.append(measures.sae(measures.temporal_katz(out, params.alpha), k0,
                                       params.sae_floor))
                cs.append(measures.sae(measures.communicability(out, params.beta), c0,
                                       params.sae_floor))
        km, kstd = _mean_std(ks)
        cm, cstd = _mean_std(cs)
        rows.append({"depth": format_depth(d), "katz_sae_mean": km, "katz_sae_std": kstd,
                     "communicability_sae_mean": cm, "communicability_sae_std": cstd,
                     "n": len(ks)})
        logger.info("depth %s: katz SAE %.3g", format_depth(d), km)
    return rows
