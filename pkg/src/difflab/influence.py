"""Influence-degree estimation: how many nodes a single seed activates.

Two estimators are provided.  The percolation estimator samples random
"live-edge" worlds whose reachability distribution matches the final active
set of the diffusion process (delay parameters do not change final sets, so
they never enter): the cascade model keeps each link alive independently
with its diffusion probability, while the threshold model lets every node
keep at most one incoming link, chosen with its weight.  The direct
estimator simply runs the full continuous-time simulation many times per
seed; it is the slow oracle the percolation shortcut is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import ParameterError
from .params import DelayMode
from .rng import derive_generator, derive_rng
from .simulate import _AsicTables, _AsltTables, _run_asic, _run_aslt


@dataclass
class InfluenceTable:
    """Per-node expected final active-set size, with standard errors.

    ``mean_stderr`` is the standard error of the graph-mean influence degree;
    for the percolation estimator the per-world correlation between nodes is
    accounted for.
    """

    sigma: np.ndarray
    stderr: np.ndarray
    samples: int
    method: str
    model: str
    mean_stderr: float = 0.0

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)


def _edge_arrays(g):
    edges = g.edges
    u = np.asarray([e[0] for e in edges], dtype=np.intp)
    v = np.asarray([e[1] for e in edges], dtype=np.intp)
    return u, v


def _asic_live_prob(g, params):
    return np.asarray([params.prob(u, v) for u, v in g.edges])


def _aslt_choice_tables(g, params):
    """Flattened per-node cumulative in-weights for vectorized sampling.

    Node v's incoming edge ids occupy ``flat_edge[ptr[v]:ptr[v+1]]`` and the
    matching cumulative weights (offset by 2v so each node owns a disjoint
    value range) sit in ``flat_cum``.
    """
    ptr = np.zeros(g.node_count + 1, dtype=np.intp)
    flat_edge = []
    flat_cum = []
    for v in range(g.node_count):
        parents = g.in_adj[v]
        acc = 0.0
        for u in parents:
            acc += params.weight(g, u, v)
            flat_edge.append(g.edge_id(u, v))
            flat_cum.append(2.0 * v + min(acc, 1.0))
        ptr[v + 1] = ptr[v] + len(parents)
    return (ptr, np.asarray(flat_edge, dtype=np.intp),
            np.asarray(flat_cum, dtype=np.float64))


def _reachable_sizes(n, live_u, live_v):
    """Size of the forward-reachable set of every node in one live world."""
    sizes = np.ones(n)
    if len(live_u) == 0:
        return sizes
    # Nodes not incident to any live edge only reach themselves.
    incident = np.unique(np.concatenate([live_u, live_v]))
    k = len(incident)
    compact = np.empty(n, dtype=np.intp)
    compact[incident] = np.arange(k)
    cu = compact[live_u]
    cv = compact[live_v]
    adj = sparse.csr_matrix(
        (np.ones(len(cu), dtype=np.int8), (cu, cv)), shape=(k, k))
    ncc, labels = connected_components(adj, directed=True,
                                       connection="strong")
    lu = labels[cu]
    lv = labels[cv]
    keep = lu != lv
    if keep.any():
        pair = np.unique(lu[keep].astype(np.int64) * ncc + lv[keep])
        dag_u = (pair // ncc).astype(np.intp)
        dag_v = (pair % ncc).astype(np.intp)
    else:
        dag_u = dag_v = np.zeros(0, dtype=np.intp)

    # Member bitsets, packed 64 nodes per word.
    words = (k + 63) >> 6
    member = np.zeros((ncc, words), dtype=np.uint64)
    node_idx = np.arange(k)
    np.bitwise_or.at(member, (labels, node_idx >> 6),
                     np.uint64(1) << (node_idx & 63).astype(np.uint64))

    # Kahn order over the condensation, then fold children into parents in
    # reverse order so each SCC's bitset becomes its full reachable set.
    out_lists = [[] for _ in range(ncc)]
    indeg = np.zeros(ncc, dtype=np.intp)
    for a, b in zip(dag_u.tolist(), dag_v.tolist()):
        out_lists[a].append(b)
        indeg[b] += 1
    order = [i for i in range(ncc) if indeg[i] == 0]
    head = 0
    while head < len(order):
        a = order[head]
        head += 1
        for b in out_lists[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                order.append(b)
    for a in reversed(order):
        row = member[a]
        for b in out_lists[a]:
            np.bitwise_or(row, member[b], out=row)
    counts = np.bitwise_count(member).sum(axis=1)
    sizes[incident] = counts[labels]
    return sizes


def _percolation_partial(g, model, params, rng_seed, lo, hi):
    """Sum and sum-of-squares of reachable sizes over worlds [lo, hi)."""
    n = g.node_count
    edge_u, edge_v = _edge_arrays(g)
    if model == "asic":
        live_p = _asic_live_prob(g, params)
    else:
        ptr, flat_edge, flat_cum = _aslt_choice_tables(g, params)
        parent_nodes = np.asarray(
            [v for v in range(n) if len(g.in_adj[v]) > 0], dtype=np.intp)
        seg_end = ptr[parent_nodes + 1]
    total = np.zeros(n)
    total_sq = np.zeros(n)
    wmean_sum = 0.0
    wmean_sq = 0.0
    for w in range(lo, hi):
        rng = derive_generator(rng_seed, "percolation", w)
        if model == "asic":
            mask = rng.random(len(live_p)) < live_p
            lu = edge_u[mask]
            lv = edge_v[mask]
        else:
            draw = 2.0 * parent_nodes + rng.random(len(parent_nodes))
            pos = np.searchsorted(flat_cum, draw, side="left")
            hit = pos < seg_end
            chosen = flat_edge[pos[hit]]
            lu = edge_u[chosen]
            lv = edge_v[chosen]
        sizes = _reachable_sizes(n, lu, lv)
        total += sizes
        total_sq += sizes * sizes
        wm = sizes.mean()
        wmean_sum += wm
        wmean_sq += wm * wm
    return total, total_sq, wmean_sum, wmean_sq


def _mc_partial(g, model, params, delay, samples, rng_seed, node_lo, node_hi):
    """Per-node mean/variance of simulated cascade sizes for a node slice."""
    if model == "asic":
        tables = _AsicTables(g, params, delay)
        run = _run_asic
    else:
        tables = _AsltTables(g, params, delay)
        run = _run_aslt
    width = node_hi - node_lo
    sigma = np.zeros(width)
    stderr = np.zeros(width)
    for i, v in enumerate(range(node_lo, node_hi)):
        rng = derive_rng(rng_seed, "direct-mc", v)
        seeds = [v]
        tot = 0.0
        tot_sq = 0.0
        for _ in range(samples):
            size = len(run(tables, delay, seeds, rng))
            tot += size
            tot_sq += size * size
        mean = tot / samples
        var = max(tot_sq / samples - mean * mean, 0.0)
        sigma[i] = mean
        stderr[i] = math.sqrt(var / samples)
    return sigma, stderr


def _chunk_ranges(total, threads):
    per = max(1, -(-total // (threads * 4)))
    return [(lo, min(lo + per, total)) for lo in range(0, total, per)]


def influence_percolation(g, model: str, params, samples: int, rng_seed,
                          threads: int = 1) -> InfluenceTable:
    """Estimate influence degrees from ``samples`` live-edge worlds.

    Every world yields the reachable-set size of all nodes at once (strongly
    connected components of the live subgraph share their reachable set).
    World substreams are indexed, so results do not depend on ``threads``.
    """
    if samples < 1:
        raise ParameterError("samples must be at least 1")
    if model not in ("asic", "aslt"):
        raise ValueError(f"unknown model {model!r}")
    n = g.node_count
    if threads > 1 and samples > 1:
        from concurrent.futures import ProcessPoolExecutor
        total = np.zeros(n)
        total_sq = np.zeros(n)
        wmean_sum = 0.0
        wmean_sq = 0.0
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_percolation_partial, g, model, params,
                                   rng_seed, lo, hi)
                       for lo, hi in _chunk_ranges(samples, threads)]
            for fut in futures:
                part, part_sq, pm, pm_sq = fut.result()
                total += part
                total_sq += part_sq
                wmean_sum += pm
                wmean_sq += pm_sq
    else:
        total, total_sq, wmean_sum, wmean_sq = _percolation_partial(
            g, model, params, rng_seed, 0, samples)
    sigma = total / samples
    var = np.maximum(total_sq / samples - sigma * sigma, 0.0)
    stderr = np.sqrt(var / samples)
    wm = wmean_sum / samples
    wvar = max(wmean_sq / samples - wm * wm, 0.0)
    return InfluenceTable(sigma, stderr, samples, "percolation", model,
                          mean_stderr=math.sqrt(wvar / samples))


def influence_direct_mc(g, model: str, params, delay: DelayMode,
                        samples: int, rng_seed,
                        threads: int = 1) -> InfluenceTable:
    """Estimate influence degrees by full continuous-time simulation.

    Runs ``samples`` independent cascades seeded at each node and averages
    the final cascade sizes.  Node substreams are indexed, so results do not
    depend on ``threads``.
    """
    if samples < 1:
        raise ParameterError("samples must be at least 1")
    if model not in ("asic", "aslt"):
        raise ValueError(f"unknown model {model!r}")
    n = g.node_count
    if threads > 1 and n > 1:
        from concurrent.futures import ProcessPoolExecutor
        sigma = np.zeros(n)
        stderr = np.zeros(n)
        ranges = _chunk_ranges(n, threads)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_mc_partial, g, model, params, delay,
                                   samples, rng_seed, lo, hi)
                       for lo, hi in ranges]
            for (lo, hi), fut in zip(ranges, futures):
                s, e = fut.result()
                sigma[lo:hi] = s
                stderr[lo:hi] = e
    else:
        sigma, stderr = _mc_partial(g, model, params, delay, samples,
                                    rng_seed, 0, n)
    # Runs are independent across nodes, so the mean's variance is additive.
    mean_se = math.sqrt(float((stderr ** 2).sum())) / n
    return InfluenceTable(sigma, stderr, samples, "direct-mc", model,
                          mean_stderr=mean_se)


class CumulativeInfluence:
    """Step function f(x) = fraction of nodes whose influence degree is >= x."""

    def __init__(self, sigma):
        self._sorted = np.sort(np.asarray(sigma, dtype=float))
        self._n = len(self._sorted)

    def __call__(self, x):
        if self._n == 0:
            raise ParameterError("empty influence table")
        idx = np.searchsorted(self._sorted, x, side="left")
        return float(self._n - idx) / self._n


def cumulative_influence(table: InfluenceTable) -> CumulativeInfluence:
    return CumulativeInfluence(table.sigma)
