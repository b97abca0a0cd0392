"""Brute-force reference implementations.

Everything here is written for clarity on desk-sized graphs and shares no
code path with the fast modules it is used to check: refinement is
textbook WL on explicit successor sets or on the causal completion,
walks are counted by dynamic programming over edge records, and
measures are literal loops over their definitions.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .graph import GraphError, TemporalGraph, TemporalNode, causal_completion


def slices_of(g):
    """Per-time edge sets as plain Python sets."""
    out = [set() for _ in range(g.T)]
    for u, v, t in zip(g.src.tolist(), g.dst.tolist(), g.tidx.tolist()):
        out[t].add((u, v))
    return out


def graph_key(slices):
    """Canonical key of a labeled temporal graph given as a list of edge sets."""
    return tuple(tuple(sorted(s)) for s in slices)


def _active(slices):
    act = set()
    for t, s in enumerate(slices):
        for u, v in s:
            act.add((u, t))
            act.add((v, t))
    return act


def _partition(colors, nodes):
    classes = {}
    for x in nodes:
        classes.setdefault(colors[x], set()).add(TemporalNode(*x))
    return frozenset(frozenset(c) for c in classes.values())


# -- refinement -------------------------------------------------------------

def naive_completion_colors(g, d, max_order=2000):
    """Textbook out-neighbor refinement on the causal completion.

    Returns a dict ``(v, t) -> color`` covering all ``V*T`` temporal nodes.
    """
    if g.V * g.T > max_order:
        raise GraphError(f"V*T = {g.V * g.T} exceeds oracle guard {max_order}")
    cc = causal_completion(g)
    adj = cc.adjacency
    n = cc.order
    colors = [0] * n
    for _ in range(d):
        sig = []
        for i in range(n):
            nbrs = adj.indices[adj.indptr[i]:adj.indptr[i + 1]]
            sig.append((colors[i], tuple(sorted(colors[j] for j in nbrs))))
        table = {}
        colors = [table.setdefault(s, len(table)) for s in sig]
    return {(i % g.V, i // g.V): c for i, c in enumerate(colors)}


def naive_refinement_via_completion(g, d, max_order=2000):
    """Partition of active temporal nodes after ``d`` rounds on the completion."""
    colors = naive_completion_colors(g, d, max_order)
    return _partition(colors, _active(slices_of(g)))


def direct_temporal_wl(slices, n_nodes, d, table=None):
    """Exact temporal WL colors from explicit successor sets.

    ``table`` interns ``(previous color, successor color multiset)`` pairs;
    passing the same dict for several graphs makes their colors directly
    comparable.  Returns a ``(T, V)`` nested list of colors.
    """
    if table is None:
        table = {}
    T = len(slices)
    succ = [[[] for _ in range(T)] for _ in range(n_nodes)]
    for t2 in range(T):
        for a, b in slices[t2]:
            for t in range(t2 + 1):
                succ[a][t].append((b, t2))
    colors = [[0] * n_nodes for _ in range(T)]
    for k in range(d):
        new = [[0] * n_nodes for _ in range(T)]
        for t in range(T):
            for v in range(n_nodes):
                ms = tuple(sorted(colors[t2][w] for w, t2 in succ[v][t]))
                new[t][v] = table.setdefault((k, colors[t][v], ms), len(table))
        colors = new
    return colors


def direct_refinement_partition(g, d):
    """Partition of active nodes from :func:`direct_temporal_wl`."""
    s = slices_of(g)
    colors = direct_temporal_wl(s, g.V, d)
    return _partition({(v, t): colors[t][v] for t in range(g.T) for v in range(g.V)}, _active(s))


# -- class enumeration ------------------------------------------------------

@dataclass
class EnumeratedClass:
    """All labeled temporal graphs identically colored as a reference graph."""

    graphs: list = field(default_factory=list)
    canonical_keys: set = field(default_factory=set)

    def __len__(self):
        return len(self.canonical_keys)


def _slice_candidates(edges, n_nodes, directed, keep_degrees):
    """All slices with the same size (and degrees, if ``keep_degrees``)."""
    if directed:
        if keep_degrees:
            outdeg = [0] * n_nodes
            for u, _ in edges:
                outdeg[u] += 1
            choices = [itertools.combinations([w for w in range(n_nodes) if w != u], outdeg[u])
                       for u in range(n_nodes)]
            for combo in itertools.product(*(list(c) for c in choices)):
                yield frozenset((u, w) for u, ws in enumerate(combo) for w in ws)
        else:
            pairs = [(u, w) for u in range(n_nodes) for w in range(n_nodes) if u != w]
            for sel in itertools.combinations(pairs, len(edges)):
                yield frozenset(sel)
    else:
        contacts = [(u, w) for u, w in edges if u < w]
        deg = [0] * n_nodes
        for u, w in contacts:
            deg[u] += 1
            deg[w] += 1
        pairs = list(itertools.combinations(range(n_nodes), 2))
        for sel in itertools.combinations(pairs, len(contacts)):
            if keep_degrees:
                dd = [0] * n_nodes
                for u, w in sel:
                    dd[u] += 1
                    dd[w] += 1
                if dd != deg:
                    continue
            yield frozenset(sel) | frozenset((w, u) for u, w in sel)


def enumerate_class(g, d, max_nodes=6, max_times=3, max_slice_edges=8, max_candidates=10**6):
    """Enumerate every temporal graph with ``g``'s slice sizes and depth-``d`` colors.

    Slices are filled from the last time backwards; colors at time ``t``
    only depend on slices ``>= t`` so partial suffixes are pruned as soon
    as they disagree with the reference.  For ``d >= 1`` the instant
    (out-)degrees are implied by the colors and are used to prefilter slice
    candidates.
    """
    slices = slices_of(g)
    sizes = [len(s) for s in slices]
    if g.V > max_nodes or g.T > max_times or max(sizes) > max_slice_edges:
        raise GraphError("graph too large for class enumeration")
    table = {}
    ref = direct_temporal_wl(slices, g.V, d, table)
    cands = [list(_slice_candidates(s, g.V, g.directed, d >= 1)) for s in slices]
    if math.prod(len(c) for c in cands) > max_candidates and d == 0:
        raise GraphError("depth-0 class too large to enumerate")

    suffixes = [[]]
    for t in range(g.T - 1, -1, -1):
        kept = []
        for suffix in suffixes:
            for cand in cands[t]:
                trial = [frozenset()] * t + [cand] + suffix
                colors = direct_temporal_wl(trial, g.V, d, table)
                if all(colors[s] == ref[s] for s in range(t, g.T)):
                    kept.append([cand] + suffix)
        suffixes = kept
    out = EnumeratedClass()
    for s in suffixes:
        key = graph_key(s)
        if key not in out.canonical_keys:
            out.canonical_keys.add(key)
            out.graphs.append(TemporalGraph.from_slices(s, g.V, g.directed, g.timestamps, g.labels))
    return out


def completed_colors_exact(g, depth):
    """Exact colors of all temporal nodes as a ``(T, V)`` list."""
    return direct_temporal_wl(slices_of(g), g.V, depth)


def in_time_moves(slices, colors, directed):
    """Yield every graph reachable by one in-time color-respecting rewiring.

    ``colors[t][v]`` are the (completed) colors used by the moves.
    """
    for t, s in enumerate(slices):
        col = colors[t]
        if directed:
            for x, y in s:
                for u in range(len(col)):
                    if u != x and col[u] == col[y] and (x, u) not in s:
                        new = set(s)
                        new.discard((x, y))
                        new.add((x, u))
                        yield t, frozenset(new)
        else:
            recs = sorted(s)
            for (x, y), (r, q) in itertools.product(recs, recs):
                if {x, y} == {r, q}:
                    continue
                if col[x] != col[r] or col[y] != col[q] or x == q or r == y:
                    continue
                if (x, q) in s or (r, y) in s:
                    continue
                new = set(s) - {(x, y), (y, x), (r, q), (q, r)}
                new |= {(x, q), (q, x), (r, y), (y, r)}
                yield t, frozenset(new)


def move_closure(g, d):
    """BFS closure of in-time rewirings respecting depth ``d-1`` colors."""
    if d < 1:
        raise ValueError("move closure needs d >= 1")
    start = [frozenset(s) for s in slices_of(g)]
    colors = direct_temporal_wl(start, g.V, d - 1)
    seen = {graph_key(start)}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for t, new_slice in in_time_moves(cur, colors, g.directed):
            nxt = list(cur)
            nxt[t] = new_slice
            key = graph_key(nxt)
            if key not in seen:
                seen.add(key)
                queue.append(nxt)
    return seen


# -- centralities -----------------------------------------------------------

def walk_count_katz(g, alpha, k_max):
    """``sum_{k <= k_max} alpha^k * #(temporal walks of length k from v)``.

    ``walks[v][t]`` counts length-k walks from ``v`` whose first edge is at
    a time index ``>= t``.
    """
    V, T = g.V, g.T
    edges = list(zip(g.src.tolist(), g.dst.tolist(), g.tidx.tolist()))
    walks = [[1] * T for _ in range(V)]  # k = 0
    total = [1.0] * V
    for k in range(1, k_max + 1):
        nxt = [[0] * T for _ in range(V)]
        for v in range(V):
            for t in range(T):
                nxt[v][t] = sum(walks[w][s] for a, w, s in edges if a == v and s >= t)
        walks = nxt
        for v in range(V):
            total[v] += alpha**k * walks[v][0]
    return np.array(total)


def walk_tail_bound(g, alpha, k_max):
    """Upper bound on the Katz terms with ``k > k_max``.

    Every temporal node has at most ``m`` successors, with ``m`` the largest
    total out-degree, so at most ``m**k`` walks of length ``k`` leave a node.
    """
    m = int(np.bincount(g.src, minlength=g.V).max())
    q = alpha * m
    if q >= 1:
        return math.inf
    return q ** (k_max + 1) / (1 - q)


def block_katz(g, alpha, max_order=2000):
    """Temporal Katz from static Katz of the causal completion.

    Solves ``(I - alpha*A) x = 1`` on the completion and keeps the first
    ``V`` entries (the first time block).
    """
    if g.V * g.T > max_order:
        raise GraphError("graph too large for block Katz")
    a = causal_completion(g).adjacency.toarray()
    n = a.shape[0]
    m = np.eye(n) - alpha * a
    try:
        x = np.linalg.solve(m, np.ones(n))
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular completion resolvent; use a smaller alpha") from exc
    return x[:g.V]


def dense_communicability(g, beta):
    """Product of dense slice exponentials applied to the ones vector.

    Symmetric slices use an eigendecomposition; directed slices, which may
    be defective, use Pade ``expm``.
    """
    x = np.ones(g.V)
    for t in range(g.T - 1, -1, -1):
        a = g.adjacency(t).toarray()
        if g.directed:
            x = scipy.linalg.expm(beta * a) @ x
        else:
            w, q = np.linalg.eigh(a)
            x = q @ (np.exp(beta * w) * (q.T @ x))
    return x


# -- measures ---------------------------------------------------------------

def persistence_loop(g):
    """Edge persistence by the literal triple sum over nodes, times and columns."""
    V, T = g.V, g.T
    A = [g.adjacency(t).toarray() for t in range(T)]
    total = 0.0
    for i in range(V):
        for l in range(T - 1):
            num = sum(A[l][i, j] * A[l + 1][i, j] for j in range(V))
            d1 = sum(A[l][i, j] for j in range(V))
            d2 = sum(A[l + 1][i, j] for j in range(V))
            if d1 > 0 and d2 > 0:
                total += num / math.sqrt(d1 * d2)
    return total / g.E


def _records(g):
    return list(zip(g.src.tolist(), g.dst.tolist(), g.tidx.tolist()))


def _triangle_walks(g):
    """All record triples ``(a,b,t1), (b,c,t2), (c,a,t3)`` with distinct a, b, c."""
    recs = _records(g)
    by_src = {}
    for r in recs:
        by_src.setdefault(r[0], []).append(r)
    for a, b, t1 in recs:
        for _, c, t2 in by_src.get(b, ()):
            if c == a:
                continue
            for _, x, t3 in by_src.get(c, ()):
                if x == a:
                    yield t1, t2, t3


def triangle_count_loop(g):
    """Number of triangle edge sets.

    Directed sets show up once per rotation (3 walks); undirected contact
    sets once per rotation and orientation (6 walks).
    """
    n = sum(1 for _ in _triangle_walks(g))
    return n // (3 if g.directed else 6)


def causal_triangle_count_loop(g):
    """Number of triangle sets that close with strictly increasing times."""
    return sum(1 for t1, t2, t3 in _triangle_walks(g) if t1 < t2 < t3)


def triangles_loop(g):
    return triangle_count_loop(g) / (g.V * g.T)


def causal_triangles_loop(g):
    return causal_triangle_count_loop(g) / (g.V * g.T)


def burstiness_loop(g, kind="active"):
    """Burstiness from pooled per-node inter-event gaps, literal definition."""
    events = {v: set() for v in range(g.V)}
    for u, v, t in _records(g):
        if kind in ("active", "send"):
            events[u].add(t)
        if kind in ("active", "receive"):
            events[v].add(t)
    gaps = []
    for v in range(g.V):
        ts = sorted(int(g.timestamps[t]) for t in events[v])
        for i in range(len(ts) - 1):
            gaps.append(ts[i + 1] - ts[i])
    if not gaps:
        raise ValueError("no inter-event times")
    m = sum(gaps) / len(gaps)
    sigma = math.sqrt(sum((x - m) ** 2 for x in gaps) / len(gaps))
    return (sigma - m) / (sigma + m)
