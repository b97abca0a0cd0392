"""Temporal graph data model, edge-list ingestion and slice queries.

A temporal graph is stored as three parallel integer arrays ``src``,
``dst`` and ``tidx`` holding one directed edge record per row, sorted by
``(tidx, src, dst)``.  Undirected graphs store every contact twice, once
per direction, so ``E`` counts both records.
"""
from __future__ import annotations

import io
import logging
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class GraphError(ValueError):
    """Raised for structurally invalid temporal graphs."""


class ParseError(GraphError):
    """Raised for malformed edge-list input."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class TemporalNode(NamedTuple):
    node: int
    time_index: int


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class TemporalGraph:
    """Immutable temporal graph with per-slice adjacency.

    Parameters
    ----------
    src, dst, tidx : array_like of int
        Directed edge records ``((src, dst), timestamps[tidx])``.
    timestamps : array_like of int
        Strictly increasing raw timestamps, one per time index.
    n_nodes : int
        Number of nodes ``V``; node ids are ``0 .. V-1``.
    directed : bool
        If False, every slice must be symmetric.
    labels : list of str, optional
        External node labels, defaults to ``str(id)``.
    duplicates : int
        Number of duplicate contacts collapsed during ingestion.
    """

    def __init__(self, src, dst, tidx, timestamps, n_nodes, directed=True,
                 labels=None, duplicates=0):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        tidx = np.asarray(tidx, dtype=np.int64)
        timestamps = np.asarray(timestamps, dtype=np.int64)
        if not (src.shape == dst.shape == tidx.shape) or src.ndim != 1:
            raise GraphError("edge arrays must be one-dimensional and of equal length")
        if len(src) == 0:
            raise GraphError("no edges")
        n_nodes = int(n_nodes)
        T = len(timestamps)
        if np.any(np.diff(timestamps) <= 0):
            raise GraphError("timestamps must be strictly increasing")
        if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n_nodes:
            raise GraphError("node id out of range")
        if tidx.min() < 0 or tidx.max() >= T:
            raise GraphError("time index out of range")
        if np.any(src == dst):
            raise GraphError("self-loop")

        order = np.lexsort((dst, src, tidx))
        src, dst, tidx = src[order], dst[order], tidx[order]
        key = (tidx * n_nodes + src) * n_nodes + dst
        if np.any(key[1:] == key[:-1]):
            raise GraphError("duplicate edge within a slice")
        slice_ptr = np.searchsorted(tidx, np.arange(T + 1))
        if np.any(np.diff(slice_ptr) == 0):
            raise GraphError("every timestamp must carry at least one edge")

        self.src = _readonly(src)
        self.dst = _readonly(dst)
        self.tidx = _readonly(tidx)
        self.timestamps = _readonly(timestamps)
        self.slice_ptr = _readonly(slice_ptr)
        self.n_nodes = n_nodes
        self.directed = bool(directed)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n_nodes)]
        if len(self.labels) != n_nodes:
            raise GraphError("labels must have one entry per node")
        self.duplicates = int(duplicates)
        self._key = key
        self._slice_sets = {}
        self._out_index = None

        if not self.directed:
            rkey = (tidx * n_nodes + dst) * n_nodes + src
            if not np.array_equal(np.sort(rkey), key):
                raise GraphError("undirected graph requires symmetric slices")

    # -- sizes ---------------------------------------------------------
    @property
    def V(self):
        return self.n_nodes

    @property
    def T(self):
        return len(self.timestamps)

    @property
    def E(self):
        return len(self.src)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"TemporalGraph({kind}, V={self.V}, T={self.T}, E={self.E})"

    def _labeled_edges(self):
        lab = self.labels
        return sorted((t, lab[u], lab[v]) for u, v, t in
                      zip(self.src.tolist(), self.dst.tolist(), self.tidx.tolist()))

    def __eq__(self, other):
        """Equal when labels, timestamps and labeled edges agree (ids may differ)."""
        if not isinstance(other, TemporalGraph):
            return NotImplemented
        if (self.directed != other.directed or self.n_nodes != other.n_nodes
                or not np.array_equal(self.timestamps, other.timestamps)
                or self.E != other.E):
            return False
        if self.labels == other.labels:
            return np.array_equal(self._key, other._key)
        return (sorted(self.labels) == sorted(other.labels)
                and self._labeled_edges() == other._labeled_edges())

    def __hash__(self):
        return hash((self.directed, self.n_nodes, self.timestamps.tobytes(), self.E))

    # -- constructors --------------------------------------------------
    @classmethod
    def from_slices(cls, slices, n_nodes, directed=True, timestamps=None, labels=None):
        """Build from a list of per-slice edge collections ``[(u, v), ...]``.

        For undirected graphs each slice must already contain both
        directions of every contact.
        """
        src, dst, tidx = [], [], []
        for i, edges in enumerate(slices):
            for u, v in edges:
                src.append(u)
                dst.append(v)
                tidx.append(i)
        if timestamps is None:
            timestamps = np.arange(len(slices))
        return cls(src, dst, tidx, timestamps, n_nodes, directed, labels)

    def with_edges(self, src, dst, tidx):
        """Return a graph on the same nodes and timestamps with new edges."""
        return TemporalGraph(src, dst, tidx, self.timestamps, self.n_nodes,
                             self.directed, self.labels)

    # -- slice access --------------------------------------------------
    def slice_arrays(self, t):
        lo, hi = self.slice_ptr[t], self.slice_ptr[t + 1]
        return self.src[lo:hi], self.dst[lo:hi]

    def slice_sizes(self):
        return np.diff(self.slice_ptr)

    def edge_set(self, t):
        s = self._slice_sets.get(t)
        if s is None:
            u, v = self.slice_arrays(t)
            s = frozenset(zip(u.tolist(), v.tolist()))
            self._slice_sets[t] = s
        return s

    def adjacency(self, t):
        """Sparse ``V x V`` adjacency matrix of slice ``t``."""
        u, v = self.slice_arrays(t)
        return sp.csr_matrix((np.ones(len(u)), (u, v)), shape=(self.V, self.V))

    def contacts(self):
        """Iterate ``(u, v, time_index)`` records; undirected graphs yield ``u < v`` only."""
        mask = slice(None) if self.directed else self.src < self.dst
        return zip(self.src[mask].tolist(), self.dst[mask].tolist(), self.tidx[mask].tolist())

    def out_index(self):
        """Edges sorted by ``(src, tidx)`` plus per-node offsets."""
        if self._out_index is None:
            order = np.lexsort((self.dst, self.tidx, self.src))
            ptr = np.searchsorted(self.src[order], np.arange(self.V + 1))
            self._out_index = (order, ptr)
        return self._out_index

    def relabel(self, perm):
        """Return the graph with node ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        labels = [None] * self.V
        for i, p in enumerate(perm.tolist()):
            labels[p] = self.labels[i]
        return TemporalGraph(perm[self.src], perm[self.dst], self.tidx, self.timestamps,
                             self.V, self.directed, labels)


# -- ingestion -------------------------------------------------------------

def _lines(text):
    if isinstance(text, (bytes, bytearray)):
        text = text.decode()
    if isinstance(text, str):
        return io.StringIO(text)
    return text


def parse_edge_list(text, directed=True):
    """Parse ``u v t`` lines into a :class:`TemporalGraph`.

    ``text`` may be a string, bytes or an open text/binary file.  Labels are
    interned in first-appearance order and duplicate contacts within a
    slice are collapsed; their count is kept in ``graph.duplicates``.
    """
    label_ids = {}
    us, vs, ts = [], [], []
    for lineno, line in enumerate(_lines(text), start=1):
        if isinstance(line, bytes):
            line = line.decode()
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'u v t', got {line!r}", lineno)
        a, b, t = parts
        try:
            t = int(t)
        except ValueError:
            raise ParseError(f"timestamp {t!r} is not an integer", lineno) from None
        if a == b:
            raise ParseError(f"self-loop on node {a!r}", lineno)
        us.append(label_ids.setdefault(a, len(label_ids)))
        vs.append(label_ids.setdefault(b, len(label_ids)))
        ts.append(t)
    if not us:
        raise ParseError("no edges")
    labels = list(label_ids)
    return from_contacts(us, vs, ts, len(labels), directed, labels)


def from_contacts(us, vs, times, n_nodes, directed=True, labels=None):
    """Build a graph from raw contacts with arbitrary integer timestamps."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    times = np.asarray(times, dtype=np.int64)
    timestamps, tidx = np.unique(times, return_inverse=True)
    # repeated identical lines count as duplicates; for undirected input a
    # mirrored line "v u t" is the same contact written the other way
    dup = len(us) - len(np.unique((tidx * n_nodes + us) * n_nodes + vs))
    if not directed:
        us, vs, tidx = (np.concatenate([us, vs]), np.concatenate([vs, us]),
                        np.concatenate([tidx, tidx]))
    key = (tidx * n_nodes + us) * n_nodes + vs
    _, first = np.unique(key, return_index=True)
    if dup:
        logger.warning("collapsed %d duplicate contacts", dup)
    return TemporalGraph(us[first], vs[first], tidx[first], timestamps, n_nodes,
                         directed, labels, duplicates=dup)


def read_edge_list(path, directed=True):
    with open(path) as fh:
        return parse_edge_list(fh, directed)


def format_edge_list(g, collapse_undirected=False):
    """Serialize to the ``u v t`` text format, sorted by ``(t, u, v)``.

    Undirected graphs write both directions of every contact unless
    ``collapse_undirected`` is set.
    """
    mask = np.ones(g.E, dtype=bool)
    if collapse_undirected and not g.directed:
        mask = g.src < g.dst
    lab = g.labels
    ts = g.timestamps[g.tidx[mask]].tolist()
    out = [f"{lab[u]} {lab[v]} {t}\n" for u, v, t in
           zip(g.src[mask].tolist(), g.dst[mask].tolist(), ts)]
    return "".join(out)


def write_edge_list(g, path, collapse_undirected=False):
    with open(path, "w") as fh:
        fh.write(format_edge_list(g, collapse_undirected))


# -- queries ---------------------------------------------------------------

def successors(g, v, t):
    """Temporal nodes ``(w, t')`` with an edge ``v -> w`` at some ``t' >= t``."""
    order, ptr = g.out_index()
    rows = order[ptr[v]:ptr[v + 1]]
    times = g.tidx[rows]
    rows = rows[times >= t]
    return {TemporalNode(w, s) for w, s in zip(g.dst[rows].tolist(), g.tidx[rows].tolist())}


def time_slice(g, t):
    """Static edge set of slice ``t``."""
    return g.edge_set(t)


def classify_nodes(g, t):
    """Return ``(active, sending)`` node sets at time index ``t``."""
    u, v = g.slice_arrays(t)
    sending = frozenset(u.tolist())
    return sending | frozenset(v.tolist()), sending


def aggregated_graph(g):
    """Map ``(u, v)`` to the number of time slices containing that edge."""
    return Counter(zip(g.src.tolist(), g.dst.tolist()))


@dataclass(frozen=True)
class CausalCompletion:
    """Static digraph on all ``V*T`` temporal nodes.

    Temporal node ``(v, i)`` has index ``i*V + v``, so the adjacency has
    ``T x T`` blocks of size ``V x V``.
    """

    n_nodes: int
    n_times: int
    adjacency: sp.csr_matrix

    @property
    def order(self):
        return self.n_nodes * self.n_times

    def index(self, v, t):
        return t * self.n_nodes + v

    def out_neighbors(self, v, t):
        i = self.index(v, t)
        a = self.adjacency
        cols = a.indices[a.indptr[i]:a.indptr[i + 1]]
        return {TemporalNode(int(c % self.n_nodes), int(c // self.n_nodes)) for c in cols}


def causal_completion(g, max_order=10**6):
    """Block upper triangular static graph whose out-neighbors are successors."""
    V, T = g.V, g.T
    if V * T > max_order:
        raise GraphError(f"causal completion of order {V * T} exceeds guard {max_order}")
    rows, cols = [], []
    for j in range(T):
        u, v = g.slice_arrays(j)
        for i in range(j + 1):
            rows.append(i * V + u)
            cols.append(j * V + v)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(V * T, V * T))
    return CausalCompletion(V, T, adj)


def random_temporal_graph(n_nodes, n_times, p, directed=True, rng=None):
    """Bernoulli temporal graph; empty slices are dropped.

    Each ordered pair (directed) or unordered pair (undirected) is present
    at each time independently with probability ``p``.  Returns ``None``
    when no edge was drawn.
    """
    rng = np.random.default_rng(rng)
    if directed:
        mask = rng.random((n_times, n_nodes, n_nodes)) < p
        idx = np.arange(n_nodes)
        mask[:, idx, idx] = False
        t, u, v = np.nonzero(mask)
    else:
        iu, iv = np.triu_indices(n_nodes, 1)
        mask = rng.random((n_times, len(iu))) < p
        t, k = np.nonzero(mask)
        u, v = iu[k], iv[k]
    if len(t) == 0:
        return None
    return from_contacts(u, v, t, n_nodes, directed)

