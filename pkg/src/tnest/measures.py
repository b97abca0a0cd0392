"""Temporal graph measures used to check what a null model preserves."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.1
DEFAULT_BETA = 1.0
SAE_FLOOR = 1e-16
_DENSE_LIMIT = 400


class SingularSliceError(ValueError):
    pass


@dataclass(frozen=True)
class CentralityParams:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    sae_floor: float = SAE_FLOOR

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


@dataclass
class MeasureReport:
    persistence: float
    triangles_per_tnode: float
    causal_triangles_per_tnode: float
    burstiness: dict
    katz: list
    communicability: list

    def to_dict(self):
        return asdict(self)


# -- structural measures ----------------------------------------------------

def edge_persistence(g):
    """Overlap of each node's out-neighborhood between consecutive slices.

    Normalized by ``E``.  Node/slice pairs where either degree is zero
    contribute nothing.
    """
    V = g.V
    total = 0.0
    prev_key = prev_deg = None
    for t in range(g.T):
        u, v = g.slice_arrays(t)
        key = u * V + v
        deg = np.bincount(u, minlength=V)
        if prev_key is not None:
            common = np.intersect1d(prev_key, key, assume_unique=True)
            overlap = np.bincount(common // V, minlength=V)
            both = (prev_deg > 0) & (deg > 0) & (overlap > 0)
            total += float(np.sum(overlap[both] / np.sqrt(prev_deg[both] * deg[both])))
        prev_key, prev_deg = key, deg
    return total / g.E


def _multiplicity(g):
    m = sp.csr_matrix((np.ones(g.E, dtype=np.int64), (g.src, g.dst)), shape=(g.V, g.V))
    m.sum_duplicates()
    return m


def triangle_count(g):
    """Number of triangle edge sets ``(a,b,t1), (b,c,t2), (c,a,t3)``.

    Directed graphs count directed 3-cycles, undirected graphs count sets
    of three contacts on the sides of a node triangle; contacts at
    different times give different sets.
    """
    m = _multiplicity(g)
    closed = int((m @ m).multiply(m.T).sum())  # trace(M^3)
    return closed // (3 if g.directed else 6)


def triangles(g):
    return triangle_count(g) / (g.V * g.T)


def _times_by_pair(g):
    order = np.lexsort((g.tidx, g.dst, g.src))
    s, d, t = g.src[order], g.dst[order], g.tidx[order]
    cut = np.flatnonzero((s[1:] != s[:-1]) | (d[1:] != d[:-1])) + 1
    starts = np.r_[0, cut]
    ends = np.r_[cut, len(s)]
    return {(int(s[a]), int(d[a])): t[a:b] for a, b in zip(starts, ends)}


def _increasing(t1, t2, t3):
    """Number of triples ``x < y < z`` with x, y, z drawn from sorted arrays."""
    below = np.searchsorted(t1, t2, side="left")
    above = len(t3) - np.searchsorted(t3, t2, side="right")
    return int(np.dot(below, above))


def _directed_cycles(g):
    out = {}
    for a, b in zip(g.src.tolist(), g.dst.tolist()):
        out.setdefault(a, set()).add(b)
    for a in sorted(out):
        for b in out[a]:
            if b < a:
                continue
            for c in out.get(b, ()):
                if c > a and a in out.get(c, ()):
                    yield a, b, c


def causal_triangle_count(g):
    """Number of triangle sets whose times strictly increase around the cycle."""
    times = _times_by_pair(g)
    total = 0
    for a, b, c in _directed_cycles(g):
        tab, tbc, tca = times[(a, b)], times[(b, c)], times[(c, a)]
        total += (_increasing(tab, tbc, tca) + _increasing(tbc, tca, tab)
                  + _increasing(tca, tab, tbc))
    return total


def causal_triangles(g):
    return causal_triangle_count(g) / (g.V * g.T)


def burstiness(g, kind="active"):
    """``(sigma - m) / (sigma + m)`` of pooled per-node inter-event times.

    ``kind`` selects which events count: ``active`` (any contact),
    ``send`` (outgoing) or ``receive`` (incoming).  Gaps use raw timestamp
    values and the population standard deviation.
    """
    if kind == "active":
        nodes = np.concatenate([g.src, g.dst])
        tids = np.concatenate([g.tidx, g.tidx])
    elif kind == "send":
        nodes, tids = g.src, g.tidx
    elif kind == "receive":
        nodes, tids = g.dst, g.tidx
    else:
        raise ValueError(f"unknown burstiness kind {kind!r}")
    keys = np.unique(nodes * g.T + tids)
    n, t = keys // g.T, g.timestamps[keys % g.T]
    same = n[1:] == n[:-1]
    gaps = (t[1:] - t[:-1])[same].astype(float)
    if len(gaps) == 0:
        raise ValueError("no node has two events; burstiness undefined")
    m = gaps.mean()
    sigma = gaps.std()
    return float((sigma - m) / (sigma + m))


# -- centralities -----------------------------------------------------------

def _slice_block(g, t):
    """Nodes touched by slice ``t`` and the slice adjacency restricted to them."""
    u, v = g.slice_arrays(t)
    nodes, inv = np.unique(np.concatenate([u, v]), return_inverse=True)
    k = len(u)
    a = sp.csr_matrix((np.ones(k), (inv[:k], inv[k:])), shape=(len(nodes), len(nodes)))
    return nodes, a


def _walks_diverge(a, alpha):
    """True if ``alpha * rho(a) >= 1`` (exact for small blocks, else a bound)."""
    rows = np.asarray(a.sum(axis=1)).ravel()
    coo = a.tocoo()
    # rho <= max over edges of sqrt(r_i * r_j) for nonnegative matrices
    bound = float(np.sqrt(rows[coo.row] * rows[coo.col]).max()) if coo.nnz else 0.0
    if alpha * bound < 1:
        return False
    if a.shape[0] > _DENSE_LIMIT:
        return True
    rho = float(np.abs(np.linalg.eigvals(a.toarray())).max())
    return alpha * rho >= 1 - 1e-12


def temporal_katz(g, alpha=DEFAULT_ALPHA):
    """Temporal Katz send centrality ``Q @ 1`` with ``Q`` the product of resolvents.

    Applies ``(I - alpha*A_t)^{-1}`` from the last slice to the first; only
    nodes touched by a slice are affected by its resolvent.  A warning is
    logged when ``alpha`` is at or above ``1/rho(A_t)`` for some slice, since
    the resolvent then no longer equals the walk sum.
    """
    x = np.ones(g.V)
    diverging = []
    for t in range(g.T - 1, -1, -1):
        nodes, a = _slice_block(g, t)
        if _walks_diverge(a, alpha):
            diverging.append(t)
        m = sp.identity(len(nodes), format="csc") - alpha * a.tocsc()
        rhs = x[nodes]
        try:
            if len(nodes) <= _DENSE_LIMIT:
                y = scipy.linalg.solve(m.toarray(), rhs)
            else:
                y = sp.linalg.splu(m).solve(rhs)
        except (np.linalg.LinAlgError, RuntimeError) as exc:
            raise SingularSliceError(
                f"I - alpha*A is singular at time index {t}; use a smaller alpha") from exc
        if not np.all(np.isfinite(y)):
            raise SingularSliceError(f"non-finite Katz solve at time index {t}; use a smaller alpha")
        x[nodes] = y
    if diverging:
        logger.warning("alpha=%g is at least 1/spectral radius in %d slice(s); "
                       "the Katz walk sum diverges there", alpha, len(diverging))
    return x


def expm_action(a, x, beta, tol=1e-14, max_terms=10_000):
    """``exp(beta*a) @ x`` by a Taylor series truncated at relative term size ``tol``.

    Terms can still grow while ``k < beta * ||a||_inf``, so the series is
    not cut before that.
    """
    growth = beta * (abs(a).sum(axis=1).max() if a.shape[0] else 0.0)
    term = np.array(x, dtype=float)
    out = term.copy()
    for k in range(1, max_terms):
        term = (beta / k) * (a @ term)
        out += term
        if k >= growth and np.max(np.abs(term)) <= tol * np.max(np.abs(out)):
            return out
    raise RuntimeError("Taylor series for exp(beta*A) did not converge")


def communicability(g, beta=DEFAULT_BETA):
    """Send communicability ``(prod_t exp(beta*A_t)) @ 1`` in increasing time order."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    x = np.ones(g.V)
    for t in range(g.T - 1, -1, -1):
        nodes, a = _slice_block(g, t)
        x[nodes] = expm_action(a, x[nodes], beta)
    return x


def sae(x, y, floor=SAE_FLOOR):
    """Sum of absolute differences, floored at ``floor``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return max(float(np.abs(x - y).sum()), floor)


def _maybe(fn, *args):
    try:
        return fn(*args)
    except ValueError:
        return None


def measure_report(g, params=CentralityParams()):
    """Evaluate every measure on ``g``; undefined burstiness values are None."""
    kinds = ("active", "send", "receive")
    return MeasureReport(
        persistence=edge_persistence(g),
        triangles_per_tnode=triangles(g),
        causal_triangles_per_tnode=causal_triangles(g),
        burstiness={k: _maybe(burstiness, g, k) for k in kinds},
        katz=temporal_katz(g, params.alpha).tolist(),
        communicability=communicability(g, params.beta).tolist(),
    )


SCALAR_MEASURES = {
    "persistence": edge_persistence,
    "triangles": triangles,
    "causal_triangles": causal_triangles,
    "burstiness_active": lambda g: _maybe(burstiness, g, "active"),
    "burstiness_send": lambda g: _maybe(burstiness, g, "send"),
    "burstiness_receive": lambda g: _maybe(burstiness, g, "receive"),
}

