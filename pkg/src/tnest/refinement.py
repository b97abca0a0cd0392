"""Temporal color refinement of active temporal nodes.

Colors are refined with an additive 64-bit multiset hash over causal
successors.  Because successor sets are nested in time, the hash of the
full successor multiset of ``(v, t)`` is the sum of the per-slice hash at
``(v, t)`` and the full hash of the next active instance of ``v``; one
backward cumulative sum per node therefore handles every round in
``O(E log E)`` (the log is the sort that assigns dense ids).
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .graph import TemporalNode

logger = logging.getLogger(__name__)


class HashCollisionError(RuntimeError):
    """Raised by the validating refinement when hashing merged distinct classes."""


def canonical_labels(colors):
    """Relabel ``colors`` by order of first appearance.

    Two colorings of the same items induce the same partition iff their
    canonical labels are equal.
    """
    colors = np.asarray(colors).ravel()
    _, first, inv = np.unique(colors, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inv]


def same_partition(a, b):
    a, b = np.asarray(a).ravel(), np.asarray(b).ravel()
    return a.shape == b.shape and np.array_equal(canonical_labels(a), canonical_labels(b))


@dataclass(frozen=True, eq=False)
class ActiveNodes:
    """Active temporal nodes sorted by ``(node, time_index)``.

    ``edge_src``/``edge_dst`` give, for every edge record of the graph, the
    position of its source/target temporal node; ``next_pos`` points to the
    next active instance of the same node (-1 if none).
    """

    nodes: np.ndarray
    times: np.ndarray
    keys: np.ndarray
    n_times: int
    edge_src: np.ndarray
    edge_dst: np.ndarray
    next_pos: np.ndarray
    group_end: np.ndarray

    @classmethod
    def build(cls, g):
        T = g.T
        skey = g.src * T + g.tidx
        dkey = g.dst * T + g.tidx
        keys = np.unique(np.concatenate([skey, dkey]))
        nodes, times = keys // T, keys % T
        n = len(keys)
        same_next = np.zeros(n, dtype=bool)
        same_next[:-1] = nodes[1:] == nodes[:-1]
        next_pos = np.where(same_next, np.arange(1, n + 1), -1)
        # index one past the last active instance of the same node
        starts = np.flatnonzero(np.r_[True, nodes[1:] != nodes[:-1]])
        ends = np.r_[starts[1:], n]
        group_end = np.repeat(ends, np.diff(np.r_[starts, n]))
        return cls(nodes, times, keys, T, np.searchsorted(keys, skey),
                   np.searchsorted(keys, dkey), next_pos, group_end)

    def __len__(self):
        return len(self.keys)

    def position(self, v, t):
        """Position of the first active instance of ``v`` at or after ``t`` or -1."""
        key = np.asarray(v, dtype=np.int64) * self.n_times + np.asarray(t, dtype=np.int64)
        p = np.searchsorted(self.keys, key)
        pc = np.minimum(p, len(self.keys) - 1)
        ok = (p < len(self.keys)) & (self.nodes[pc] == np.asarray(v))
        return np.where(ok, pc, -1)

    def suffix_sum(self, values):
        """Per node, sum of ``values`` over this and all later active instances.

        Works for ``uint64`` with wraparound.
        """
        rev = np.cumsum(values[::-1], dtype=values.dtype)[::-1]
        tail = np.zeros_like(values)
        inner = self.group_end < len(values)
        tail[inner] = rev[self.group_end[inner]]
        return rev - tail


@dataclass(frozen=True, eq=False)
class ColorAssignment:
    """Depth-``d`` refinement colors of all active temporal nodes.

    Colors are dense ids ``0 .. n_classes-1``.  ``class_count_history[k]``
    is the number of classes after ``k`` rounds (entry 0 is the initial
    coloring).
    """

    depth: int
    active: ActiveNodes
    colors: np.ndarray
    initial: np.ndarray
    class_count_history: tuple
    converged: bool
    n_nodes: int
    terminal: dict = field(default_factory=dict)
    history: tuple = ()

    @property
    def n_classes(self):
        return self.class_count_history[-1]

    @property
    def nodes(self):
        return self.active.nodes

    @property
    def times(self):
        return self.active.times

    def color(self, v, t):
        """Color of the active temporal node ``(v, t)``."""
        p = int(np.searchsorted(self.active.keys, v * self.active.n_times + t))
        if p >= len(self.active) or self.active.keys[p] != v * self.active.n_times + t:
            raise KeyError(f"({v}, {t}) is not an active temporal node")
        return int(self.colors[p])

    def as_dict(self):
        return {TemporalNode(v, t): c for v, t, c in
                zip(self.nodes.tolist(), self.times.tolist(), self.colors.tolist())}

    def partition(self, depth=None):
        """Set of color classes as frozensets of :class:`TemporalNode`."""
        colors = self.colors if depth is None else self.history[depth]
        classes = {}
        for v, t, c in zip(self.nodes.tolist(), self.times.tolist(), colors.tolist()):
            classes.setdefault(c, set()).add(TemporalNode(v, t))
        return frozenset(frozenset(s) for s in classes.values())

    def terminal_color(self, v):
        return self.terminal[v]


def _random_hashes(n, seed):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2**64, size=n, dtype=np.uint64, endpoint=False)


def _dense_pairs(first, second):
    """Dense ids for pairs ordered ascending by ``(first, second)``."""
    # same order as lexsort((second, first)), but faster
    order = np.argsort(second)
    order = order[np.argsort(first[order], kind="stable")]
    f, s = first[order], second[order]
    new = np.ones(len(order), dtype=bool)
    new[1:] = (f[1:] != f[:-1]) | (s[1:] != s[:-1])
    ids = np.cumsum(new) - 1
    out = np.empty(len(order), dtype=np.int64)
    out[order] = ids
    return out, int(ids[-1]) + 1


def _exact_round(active, colors):
    """Exact (hash-free) successor color multisets; for validation only."""
    per_slice = [Counter() for _ in range(len(active))]
    for s, d in zip(active.edge_src.tolist(), active.edge_dst.tolist()):
        per_slice[s][int(colors[d])] += 1
    sig = [None] * len(active)
    running = {}
    for p in range(len(active) - 1, -1, -1):
        nxt = active.next_pos[p]
        acc = Counter(per_slice[p])
        if nxt >= 0:
            acc.update(running[nxt])
        running[p] = acc
        sig[p] = (int(colors[p]), tuple(sorted(acc.items())))
    return sig


def refine_active(g, max_depth=None, seed=0, initial_colors=None, keep_history=False,
                  validate=False):
    """Temporal color refinement of the active temporal nodes of ``g``.

    Parameters
    ----------
    g : TemporalGraph
    max_depth : int or None
        Maximum number of rounds; ``None`` runs until the partition is stable.
    seed : int
        Seed for the 64-bit element hashes.  The resulting partition does
        not depend on it (up to negligible collision probability).
    initial_colors : mapping or array, optional
        Either a mapping ``TemporalNode -> color`` covering every active
        node, or an array aligned with the active node order.  Defaults to
        a uniform coloring.
    keep_history : bool
        Store the coloring of every round in ``history``.
    validate : bool
        Cross-check every round against exact successor multisets and raise
        :class:`HashCollisionError` on disagreement.  Quadratic; debug only.

    Returns
    -------
    ColorAssignment
    """
    active = ActiveNodes.build(g)
    n = len(active)
    if initial_colors is None:
        colors = np.zeros(n, dtype=np.int64)
    else:
        if isinstance(initial_colors, dict):
            raw = [initial_colors[TemporalNode(v, t)] for v, t in
                   zip(active.nodes.tolist(), active.times.tolist())]
        else:
            raw = initial_colors
        _, colors = np.unique(np.asarray(raw), return_inverse=True)
        colors = colors.astype(np.int64).ravel()
    initial = colors
    history = [int(colors.max()) + 1]
    kept = [colors] if keep_history else []

    h = _random_hashes(n + 1, seed)
    by_src = np.argsort(active.edge_src, kind="stable")
    src_sorted = active.edge_src[by_src]
    dst_sorted = active.edge_dst[by_src]
    starts = np.flatnonzero(np.r_[True, src_sorted[1:] != src_sorted[:-1]])
    senders = src_sorted[starts]

    depth = 0
    converged = False
    while max_depth is None or depth < max_depth:
        acc = np.zeros(n, dtype=np.uint64)
        acc[senders] = np.add.reduceat(h[colors[dst_sorted]], starts)
        cs_hash = active.suffix_sum(acc)
        new, k = _dense_pairs(colors, cs_hash)
        if validate:
            ids = {}
            exact_ids = [ids.setdefault(s, len(ids)) for s in _exact_round(active, colors)]
            if len(ids) != k or not same_partition(new, exact_ids):
                raise HashCollisionError(f"hash collision detected in round {depth + 1}")
        depth += 1
        history.append(k)
        colors = new
        if keep_history:
            kept.append(colors)
        if k == history[-2]:
            converged = True
            break

    logger.debug("refinement: %d rounds, classes %s", depth, history)
    terminal = _terminal_colors(g, active, colors, initial, depth, history[-1])
    return ColorAssignment(depth, active, colors, initial, tuple(history), converged,
                           g.V, terminal, tuple(kept))


def _terminal_colors(g, active, colors, initial, depth, n_classes):
    """Color for temporal nodes with no later activity, per node."""
    sending = np.zeros(len(active), dtype=np.int64)
    sending[active.edge_src] = 1
    has_succ = active.suffix_sum(sending) > 0
    last = np.full(g.V, -1, dtype=np.int64)
    last[active.nodes] = np.arange(len(active))  # keys sorted, so last write wins
    init_of = np.where(last >= 0, initial[np.maximum(last, 0)], 0)
    empty_color = {}
    for p in np.flatnonzero(~has_succ).tolist():
        empty_color.setdefault(int(initial[p]), int(colors[p]))
    fresh = {}
    terminal = {}
    for v, c0 in enumerate(init_of.tolist()):
        if depth == 0:
            terminal[v] = c0
        elif c0 in empty_color:
            terminal[v] = empty_color[c0]
        else:
            terminal[v] = fresh.setdefault(c0, n_classes + len(fresh))
    return terminal


def complete_color(g, assignment, v, t):
    """Color of any temporal node, active or not.

    A temporal node that is not sending shares its successors with the
    next instance of the same node, so it takes the color of the next
    active instance; nodes with no later activity get the terminal color.
    """
    p = int(assignment.active.position(v, t))
    if p >= 0:
        return int(assignment.colors[p])
    return assignment.terminal[v]


def complete_colors(g, assignment):
    """``(T, V)`` array of completed colors of every temporal node."""
    T, V = g.T, g.V
    tt, vv = np.meshgrid(np.arange(T), np.arange(V), indexing="ij")
    pos = assignment.active.position(vv.ravel(), tt.ravel())
    term = np.array([assignment.terminal[v] for v in range(V)], dtype=np.int64)
    out = np.where(pos >= 0, assignment.colors[np.maximum(pos, 0)], term[vv.ravel()])
    return out.reshape(T, V)


def stable_depth(g, seed=0):
    """Number of refinement rounds until a round no longer splits any class."""
    return refine_active(g, None, seed).depth


class SliceColorView:
    """Partition of all ``V`` nodes into color classes at one time index.

    Views share state with the iterator that produced them and are only
    valid until the iterator advances.
    """

    def __init__(self, time_index, tracker, changed):
        self.time_index = time_index
        self._tracker = tracker
        self.changed = changed

    def color_of(self, v):
        return int(self._tracker.col[v])

    def members(self, color):
        return self._tracker.members[color]

    def class_of(self, v):
        return self._tracker.members[self._tracker.col[v]]

    @property
    def colors(self):
        return self._tracker.col.copy()

    @property
    def partition(self):
        return {c: sorted(m) for c, m in self._tracker.members.items() if m}


class _ClassTracker:
    """Color classes with O(1) membership updates (swap-remove lists)."""

    def __init__(self, col):
        self.col = np.array(col, dtype=np.int64)
        self.members = {}
        self.pos = np.empty(len(col), dtype=np.int64)
        for v, c in enumerate(self.col.tolist()):
            lst = self.members.setdefault(c, [])
            self.pos[v] = len(lst)
            lst.append(v)

    def move(self, v, c):
        old = int(self.col[v])
        if old == c:
            return False
        lst = self.members[old]
        i = self.pos[v]
        last = lst.pop()
        if last != v:
            lst[i] = last
            self.pos[last] = i
        new = self.members.setdefault(c, [])
        self.pos[v] = len(new)
        new.append(v)
        self.col[v] = c
        return True


def slice_colors(g, assignment):
    """Yield a :class:`SliceColorView` for every time index in increasing order.

    Only nodes active in the preceding slice can change color, so the total
    work over all slices is ``O(V + E + T)``.
    """
    a = assignment.active
    by_time = np.argsort(a.times, kind="stable")
    tptr = np.searchsorted(a.times[by_time], np.arange(g.T + 1))
    term = assignment.terminal
    first = [complete_color(g, assignment, v, 0) for v in range(g.V)]
    tracker = _ClassTracker(first)
    changed = frozenset()
    for t in range(g.T):
        if t > 0:
            moved = []
            for p in by_time[tptr[t - 1]:tptr[t]].tolist():
                v = int(a.nodes[p])
                nxt = a.next_pos[p]
                c = int(assignment.colors[nxt]) if nxt >= 0 else term[v]
                if tracker.move(v, c):
                    moved.append(v)
            changed = frozenset(moved)
        yield SliceColorView(t, tracker, changed)
