"""Topology-only node-ranking heuristics and ranking comparison.

These are the standard baselines influence rankings are compared against:
out-degree, closeness (reciprocal mean distance), betweenness (number of
shortest paths passing through a node), and the random-surfer stationary
distribution.  All operate on unit edge lengths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from .errors import GraphValidationError, ParameterError

METRICS = ("outdegree", "closeness", "betweenness", "pagerank")


@dataclass
class RankedList:
    """Nodes ordered by descending score; ties broken by ascending node id."""

    order: np.ndarray
    scores: np.ndarray

    @property
    def top(self):
        return self.order

    def top_k(self, k):
        return set(int(v) for v in self.order[:k])


def rank_by_score(scores) -> RankedList:
    scores = np.asarray(scores, dtype=float)
    order = np.lexsort((np.arange(len(scores)), -scores))
    return RankedList(order=order, scores=scores)


def _adjacency(g):
    edges = g.edges
    if not edges:
        return sparse.csr_matrix((g.node_count, g.node_count))
    u = np.asarray([e[0] for e in edges])
    v = np.asarray([e[1] for e in edges])
    return sparse.csr_matrix((np.ones(len(u)), (u, v)),
                             shape=(g.node_count, g.node_count))


def _distances(g):
    return shortest_path(_adjacency(g), method="D", directed=True,
                         unweighted=True)


def outdegree_scores(g):
    return np.asarray([len(g.out_adj[v]) for v in range(g.node_count)],
                      dtype=float)


def closeness_scores(g):
    """Reciprocal of the mean distance to all other nodes.

    Unreachable pairs count distance |V|: a finite surrogate that keeps the
    ordering meaningful on disconnected graphs.
    """
    n = g.node_count
    if n == 1:
        return np.zeros(1)
    dist = _distances(g)
    dist[~np.isfinite(dist)] = n
    np.fill_diagonal(dist, 0.0)
    mean_dist = dist.sum(axis=1) / (n - 1)
    return 1.0 / np.maximum(mean_dist, 1e-300)


def betweenness_scores(g, normalized=False):
    """Shortest paths (over ordered node pairs) passing through a node.

    The default is a raw path count.  With ``normalized=True`` each pair
    (s, t) instead contributes the fraction of its shortest paths through
    the node, so both common readings of the measure are available; the
    two orderings usually agree closely.  Endpoints are excluded: a path
    s -> ... -> v -> ... -> t counts for v only when v differs from both
    s and t.
    """
    n = g.node_count
    dist = _distances(g)
    counts = _path_counts(g, dist)
    scores = np.zeros(n)
    through = np.empty((n, n))
    if normalized:
        pair_counts = np.where(counts > 0, counts, 1.0)
    for v in range(n):
        # Paths s->t via v exist iff d(s,v) + d(v,t) = d(s,t); their number
        # is the product of the two leg counts.
        np.add.outer(dist[:, v], dist[v, :], out=through)
        mask = through == dist
        np.multiply.outer(counts[:, v], counts[v, :], out=through)
        through *= mask
        if normalized:
            through /= pair_counts
        through[v, :] = 0.0
        through[:, v] = 0.0
        scores[v] = through.sum()
    return scores


def _path_counts(g, dist):
    """counts[s, t] = number of shortest s->t paths (0 when unreachable)."""
    n = g.node_count
    counts = np.zeros((n, n))
    for s in range(n):
        ds = dist[s]
        counts[s, s] = 1.0
        # Visit nodes by increasing distance; each node's count is the sum
        # over in-neighbors one step closer.
        finite = np.nonzero(np.isfinite(ds))[0]
        order = finite[np.argsort(ds[finite], kind="stable")]
        row = counts[s]
        for v in order:
            dv = ds[v]
            if dv == 0.0:
                continue
            total = 0.0
            for u in g.in_adj[v]:
                if ds[u] == dv - 1.0:
                    total += row[u]
            row[v] = total
    return counts


def pagerank_scores(g, eps: float = 0.15, tol: float = 1e-10,
                    max_iter: int = 100_000):
    """Stationary vector of the random surfer with uniform-jump probability eps.

    Power iteration until the L1 residual drops to ``tol``.  Dangling-node
    mass is redistributed uniformly.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError("pagerank jump probability must lie in (0, 1)")
    n = g.node_count
    adj = _adjacency(g)
    out_deg = np.asarray(adj.sum(axis=1)).ravel()
    dangling = out_deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.maximum(out_deg, 1.0))
    transition = sparse.diags(inv) @ adj  # row-stochastic on non-dangling rows
    transition_t = transition.T.tocsr()
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        spread = transition_t @ x + x[dangling].sum() / n
        x_new = (1.0 - eps) * spread + eps / n
        if np.abs(x_new - x).sum() <= tol:
            x = x_new
            break
        x = x_new
    return x


def centrality(g, metric: str, **options) -> RankedList:
    """Rank all nodes by the requested topology-only score."""
    if g.node_count == 0:
        raise GraphValidationError("centrality undefined on an empty graph")
    if metric == "outdegree":
        scores = outdegree_scores(g)
    elif metric == "closeness":
        scores = closeness_scores(g)
    elif metric == "betweenness":
        scores = betweenness_scores(g)
    elif metric == "pagerank":
        scores = pagerank_scores(g, **options)
    else:
        raise ParameterError(f"unknown centrality metric {metric!r}")
    return rank_by_score(scores)


def ranking_similarity(truth: RankedList, candidate: RankedList,
                       k: int) -> float:
    """Fraction of the true top-k nodes recovered by the candidate ranking."""
    if k < 1 or k > len(truth.order) or k > len(candidate.order):
        raise ParameterError(f"k={k} out of range for these rankings")
    return len(truth.top_k(k) & candidate.top_k(k)) / k
