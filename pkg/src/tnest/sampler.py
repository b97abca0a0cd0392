"""t-NeSt MCMC sampling and baseline temporal null models.

All samplers are deterministic given their seed.  t-NeSt draws an
independent random stream per time slice from ``(master_seed, t)`` so the
result does not depend on the order in which slices are processed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .refinement import complete_color, refine_active, slice_colors

logger = logging.getLogger(__name__)

METHODS = ("tnest", "re", "dss", "rt", "rc")
DEFAULT_REWIRING_FACTOR = 20


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    """Sampler selection.

    ``depth=None`` means the stable (converged) coloring.  ``rewirings``
    is the number of attempted moves per slice for t-NeSt/DSS and the total
    number of attempts for RE; ``None`` uses ``rewiring_factor`` attempts
    per edge record.
    """

    method: str = "tnest"
    depth: int | None = 1
    rewirings: int | None = None
    master_seed: int = 0
    rewiring_factor: int = DEFAULT_REWIRING_FACTOR

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.depth is not None and self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.rewirings is not None and self.rewirings < 0:
            raise ValueError("rewirings must be >= 0")
        if self.rewiring_factor < 0:
            raise ValueError("rewiring_factor must be >= 0")


@dataclass
class RewireStats:
    attempted: int = 0
    accepted: int = 0
    per_slice_attempted: list = field(default_factory=list)
    per_slice_accepted: list = field(default_factory=list)

    def add(self, attempted, accepted):
        self.attempted += attempted
        self.accepted += accepted
        self.per_slice_attempted.append(attempted)
        self.per_slice_accepted.append(accepted)

    def as_dict(self):
        return {"attempted": self.attempted, "accepted": self.accepted,
                "per_slice_attempted": list(self.per_slice_attempted),
                "per_slice_accepted": list(self.per_slice_accepted)}


def slice_rng(master_seed, t):
    return np.random.default_rng(np.random.SeedSequence([master_seed % 2**64, t]))


# -- per-slice rewiring ---------------------------------------------------

def undir_rewire_slice(edges, colors, r, rng):
    """Color-respecting swaps of undirected contacts within one slice.

    Parameters
    ----------
    edges : iterable of (u, v)
        Directed records of a symmetric slice.
    colors : mapping or array
        ``colors[v]`` for every node appearing in ``edges``.
    r : int
        Number of attempted swaps.
    rng : numpy.random.Generator

    Returns
    -------
    (list of (u, v), int)
        New symmetric records and the number of accepted swaps.
    """
    heads, tails = [], []
    groups = {}
    for u, v in edges:
        if u > v:
            continue
        cu, cv = colors[u], colors[v]
        if cu > cv:
            u, v, cu, cv = v, u, cv, cu
        groups.setdefault((cu, cv), []).append(len(heads))
        heads.append(u)
        tails.append(v)
    present = {(min(a, b), max(a, b)) for a, b in zip(heads, tails)}
    keys = sorted(groups)
    members = [groups[k] for k in keys]
    mixed = [k[0] != k[1] for k in keys]
    accepted = 0
    if keys and r > 0:
        draws = rng.random((r, 4))
        ng = len(keys)
        for a, b, c, flip in draws.tolist():
            gi = int(a * ng)
            grp = members[gi]
            n = len(grp)
            i = grp[int(b * n)]
            j = grp[int(c * n)]
            if i == j:
                continue
            u1, v1, u2, v2 = heads[i], tails[i], heads[j], tails[j]
            if not mixed[gi] and flip < 0.5:
                u2, v2 = v2, u2
            if u1 == v2 or u2 == v1 or u1 == u2 or v1 == v2:
                continue
            e1 = (u1, v2) if u1 < v2 else (v2, u1)
            e2 = (u2, v1) if u2 < v1 else (v1, u2)
            if e1 in present or e2 in present:
                continue
            present.discard((min(u1, v1), max(u1, v1)))
            present.discard((min(u2, v2), max(u2, v2)))
            present.add(e1)
            present.add(e2)
            heads[i], tails[i] = u1, v2
            heads[j], tails[j] = u2, v1
            accepted += 1
    out = [(a, b) for a, b in present] + [(b, a) for a, b in present]
    return out, accepted


class _UniformView:
    """Single color class containing every node."""

    def __init__(self, n_nodes):
        self._all = list(range(n_nodes))

    def class_of(self, v):
        return self._all

    def color_of(self, v):
        return 0


class _ArrayView:
    def __init__(self, colors):
        self._col = list(colors)
        self._classes = {}
        for v, c in enumerate(self._col):
            self._classes.setdefault(c, []).append(v)

    def class_of(self, v):
        return self._classes[self._col[v]]

    def color_of(self, v):
        return self._col[v]


def dir_rewire_slice(edges, view, r, rng):
    """Color-respecting tilts of directed edges within one slice.

    Each attempt picks an edge ``(u, v)`` and a node ``x`` colored like
    ``v`` (active or not) and replaces ``(u, v)`` by ``(u, x)`` when that
    edge is new and not a self-loop.  ``view`` is a
    :class:`~tnest.refinement.SliceColorView` or a color array over all
    nodes.
    """
    if not hasattr(view, "class_of"):
        view = _ArrayView(view)
    edges = [tuple(e) for e in edges]
    present = set(edges)
    accepted = 0
    m = len(edges)
    if m and r > 0:
        draws = rng.random((r, 2))
        for a, b in draws.tolist():
            i = int(a * m)
            u, v = edges[i]
            cls = view.class_of(v)
            x = cls[int(b * len(cls))]
            if x == u or (u, x) in present:
                continue
            present.discard((u, v))
            present.add((u, x))
            edges[i] = (u, x)
            accepted += 1
    return edges, accepted


# -- t-NeSt ---------------------------------------------------------------

def rewiring_colors(g, depth, seed=0):
    """Refinement colors used to rewire ``t-NeSt(depth)``.

    Depth ``d >= 1`` rewires with depth ``d-1`` colors, ``None`` with the
    stable colors, and depth 0 with the uniform coloring (returns None).
    """
    if depth == 0:
        return None
    return refine_active(g, None if depth is None else depth - 1, seed)


def _per_slice_r(cfg, m):
    return cfg.rewiring_factor * m if cfg.rewirings is None else cfg.rewirings


def tnest_sample(g, cfg, assignment=None):
    """Sample a graph with the same depth-``d`` refinement colors as ``g``.

    Returns the new graph and per-slice acceptance statistics.  ``g`` is
    never modified.
    """
    if cfg.method not in ("tnest", "dss"):
        raise ValueError("tnest_sample needs method 'tnest' or 'dss'")
    depth = 0 if cfg.method == "dss" else cfg.depth
    if assignment is None:
        assignment = rewiring_colors(g, depth, cfg.master_seed)
    stats = RewireStats()
    src, dst, tid = [], [], []

    if g.directed:
        views = slice_colors(g, assignment) if assignment is not None else None
        uniform = _UniformView(g.V)
        for t in range(g.T):
            view = next(views) if views is not None else uniform
            u, v = g.slice_arrays(t)
            edges = list(zip(u.tolist(), v.tolist()))
            r = _per_slice_r(cfg, len(edges))
            new, acc = dir_rewire_slice(edges, view, r, slice_rng(cfg.master_seed, t))
            stats.add(r, acc)
            _emit(new, t, src, dst, tid)
    else:
        for t in range(g.T):
            u, v = g.slice_arrays(t)
            edges = list(zip(u.tolist(), v.tolist()))
            if assignment is None:
                colors = _Zeros()
            else:
                nodes = np.unique(u)
                pos = assignment.active.position(nodes, t)
                colors = dict(zip(nodes.tolist(), assignment.colors[pos].tolist()))
            r = _per_slice_r(cfg, len(edges))
            new, acc = undir_rewire_slice(edges, colors, r, slice_rng(cfg.master_seed, t))
            stats.add(r, acc)
            _emit(new, t, src, dst, tid)
    return g.with_edges(src, dst, tid), stats


class _Zeros:
    def __getitem__(self, v):
        return 0


def _emit(edges, t, src, dst, tid):
    for a, b in edges:
        src.append(a)
        dst.append(b)
        tid.append(t)


def count_rewirings(g, depth, max_pairs=10**7, seed=0):
    """Number of valid in-time moves available from ``g`` for ``t-NeSt(depth)``.

    Undirected graphs count distinct swaps (a pair of same-colored contacts
    can admit two), directed graphs count valid ``(edge, target)`` tilts.
    """
    assignment = rewiring_colors(g, depth, seed)
    total = 0
    if g.directed:
        views = slice_colors(g, assignment) if assignment is not None else None
        uniform = _UniformView(g.V)
        for t in range(g.T):
            view = next(views) if views is not None else uniform
            u, v = g.slice_arrays(t)
            out_in_class = {}
            for a, b in zip(u.tolist(), v.tolist()):
                key = (a, view.color_of(b))
                out_in_class[key] = out_in_class.get(key, 0) + 1
            for a, b in zip(u.tolist(), v.tolist()):
                cb = view.color_of(b)
                total += (len(view.class_of(b)) - (view.color_of(a) == cb)
                          - out_in_class[(a, cb)])
        return total

    for t in range(g.T):
        u, v = g.slice_arrays(t)
        present = set(zip(u.tolist(), v.tolist()))
        col = {}
        for a in set(u.tolist()):
            col[a] = 0 if assignment is None else complete_color(g, assignment, a, t)
        groups = {}
        for a, b in present:
            if a < b:
                ca, cb = col[a], col[b]
                if ca > cb:
                    a, b, ca, cb = b, a, cb, ca
                groups.setdefault((ca, cb), []).append((a, b))
        for (ca, cb), contacts in groups.items():
            n = len(contacts)
            if n * (n - 1) // 2 > max_pairs:
                raise SamplingError("too many contact pairs to enumerate")
            for i in range(n):
                x, y = contacts[i]
                for j in range(i + 1, n):
                    p, q = contacts[j]
                    options = [(p, q)] if ca != cb else [(p, q), (q, p)]
                    for r_, s in options:
                        if len({x, y, r_, s}) == 4 and (x, s) not in present and (r_, y) not in present:
                            total += 1
    return total


# -- baselines --------------------------------------------------------------

def _contact_arrays(g):
    if g.directed:
        return g.src.copy(), g.dst.copy(), g.tidx.copy()
    mask = g.src < g.dst
    return g.src[mask].copy(), g.dst[mask].copy(), g.tidx[mask].copy()


def _from_contact_arrays(g, us, vs, ts):
    us, vs, ts = np.asarray(us), np.asarray(vs), np.asarray(ts)
    if not g.directed:
        us, vs, ts = np.concatenate([us, vs]), np.concatenate([vs, us]), np.concatenate([ts, ts])
    return g.with_edges(us, vs, ts)


def re_sample(g, r=None, seed=0):
    """Randomized edges: keeps each node's total number of contacts.

    Undirected: ``r`` attempts to swap endpoints of two random contacts at
    possibly different times.  Directed: ``r`` attempts to move a random
    edge ``(a, b, t)`` to ``(a, c, t')`` for uniform ``t'`` and ``c != a``;
    moves that would empty a time slice are rejected so every timestamp
    stays populated.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed % 2**64, 1]))
    us, vs, ts = (a.tolist() for a in _contact_arrays(g))
    n = len(us)
    if r is None:
        r = DEFAULT_REWIRING_FACTOR * g.E
    if g.directed:
        present = set(zip(us, vs, ts))
        per_time = np.bincount(ts, minlength=g.T).tolist()
        V, T = g.V, g.T
        for a_, b_, c_ in rng.random((r, 3)).tolist():
            i = int(a_ * n)
            a, t = us[i], ts[i]
            t2 = int(b_ * T)
            c = int(c_ * (V - 1))
            c += c >= a
            if (a, c, t2) in present or (t2 != t and per_time[t] == 1):
                continue
            present.discard((a, vs[i], t))
            present.add((a, c, t2))
            per_time[t] -= 1
            per_time[t2] += 1
            vs[i], ts[i] = c, t2
        return _from_contact_arrays(g, us, vs, ts)

    present = {(min(a, b), max(a, b), t) for a, b, t in zip(us, vs, ts)}
    for x, y, z in rng.random((r, 3)).tolist():
        i, j = int(x * n), int(y * n)
        if i == j:
            continue
        a, b, t = us[i], vs[i], ts[i]
        c, d, t2 = us[j], vs[j], ts[j]
        if z < 0.5:
            n1, n2 = (a, c), (b, d)
        else:
            n1, n2 = (a, d), (b, c)
        if n1[0] == n1[1] or n2[0] == n2[1]:
            continue
        k1 = (min(n1), max(n1), t)
        k2 = (min(n2), max(n2), t2)
        if k1 in present or k2 in present or k1 == k2:
            continue
        present.discard((min(a, b), max(a, b), t))
        present.discard((min(c, d), max(c, d), t2))
        present.add(k1)
        present.add(k2)
        us[i], vs[i] = n1
        us[j], vs[j] = n2
    return _from_contact_arrays(g, us, vs, ts)


def dss_sample(g, r=None, seed=0):
    """Degree-preserving snapshot shuffling, i.e. t-NeSt at depth 0."""
    return tnest_sample(g, SamplerConfig("tnest", 0, r, seed))[0]


def rt_sample(g, seed=0, max_attempts=None):
    """Random times: permute timestamps across contacts.

    Keeps the aggregated multigraph and the number of contacts per time.
    A permutation that puts the same contact twice into one slice is
    repaired by random transpositions that create no new duplicate.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed % 2**64, 3]))
    us, vs, ts = _contact_arrays(g)
    n = len(us)
    new_t = ts[rng.permutation(n)].tolist()
    pairs = list(zip(us.tolist(), vs.tolist()))
    count = {}
    for p, t in zip(pairs, new_t):
        count[(p, t)] = count.get((p, t), 0) + 1
    bad = [i for i in range(n) if count[(pairs[i], new_t[i])] > 1]
    budget = max_attempts if max_attempts is not None else 1000 * max(n, 1)
    tries = 0
    while bad:
        i = bad.pop()
        while count[(pairs[i], new_t[i])] > 1:
            if tries >= budget:
                raise SamplingError("random-times sampler could not remove duplicate contacts")
            tries += 1
            j = int(rng.integers(n))
            ti, tj = new_t[i], new_t[j]
            if ti == tj or count.get((pairs[i], tj), 0) or count.get((pairs[j], ti), 0):
                continue
            count[(pairs[i], ti)] -= 1
            count[(pairs[j], tj)] -= 1
            count[(pairs[i], tj)] = 1
            count[(pairs[j], ti)] = 1
            new_t[i], new_t[j] = tj, ti
    return _from_contact_arrays(g, us, vs, new_t)


def rc_sample(g, seed=0):
    """Random contacts: redraw each slice's contacts from the aggregated support.

    Every slice keeps its number of contacts, drawn uniformly without
    replacement from the set of node pairs that interact at least once.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed % 2**64, 4]))
    us, vs, ts = _contact_arrays(g)
    support = np.unique(np.stack([us, vs], axis=1), axis=0)
    counts = np.bincount(ts, minlength=g.T)
    out_u, out_v, out_t = [], [], []
    for t, k in enumerate(counts.tolist()):
        pick = rng.choice(len(support), size=k, replace=False)
        out_u.append(support[pick, 0])
        out_v.append(support[pick, 1])
        out_t.append(np.full(k, t))
    return _from_contact_arrays(g, np.concatenate(out_u), np.concatenate(out_v),
                                np.concatenate(out_t))


def sample(g, cfg):
    """Draw one sample according to ``cfg``; returns ``(graph, stats_dict)``."""
    if cfg.method in ("tnest", "dss"):
        out, stats = tnest_sample(g, cfg)
        return out, stats.as_dict()
    if cfg.method == "re":
        r = cfg.rewirings if cfg.rewirings is not None else cfg.rewiring_factor * g.E
        return re_sample(g, r, cfg.master_seed), {"attempted": r}
    if cfg.method == "rt":
        return rt_sample(g, cfg.master_seed), {}
    return rc_sample(g, cfg.master_seed), {}
