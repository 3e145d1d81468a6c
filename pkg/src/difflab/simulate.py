"""Event-driven continuous-time simulators for both diffusion models.

Both models run on a priority queue keyed by delivery time, with ties broken
by an insertion sequence number so runs are bit-reproducible.  Exponential
delays are drawn by inverse transform, delta = -ln(U) / rate with U in (0, 1].

Delay semantics:

* LINK: the delay rides on each link; an activation of u schedules per-child
  deliveries at t_u + Exp(rate of (u, v)).
* NODE_NON_OVERRIDE: influence reaches children instantly, the child reacts
  after its own Exp(r_v) delay and never revises the decision.
* NODE_OVERRIDE: as above, but each later influence proposes a new reaction
  time and the earliest proposal wins.
"""

from __future__ import annotations

import math
import random
from heapq import heappush, heappop

from .cascade import Cascade, CascadeSet
from .errors import GraphValidationError, SimulationProgressError
from .params import DelayMode
from .rng import derive_rng

_LN = math.log


def _as_rng(rng_seed) -> random.Random:
    if isinstance(rng_seed, random.Random):
        return rng_seed
    return derive_rng(rng_seed, "simulate")


def _check_seeds(g, seeds):
    seeds = sorted({int(s) for s in seeds})
    if not seeds:
        raise GraphValidationError("seed set must be non-empty")
    for s in seeds:
        if not 0 <= s < g.node_count:
            raise GraphValidationError(f"seed node {s} outside 0..{g.node_count - 1}")
    return seeds


class _AsicTables:
    """Per-(graph, params, delay) resolved child/probability/rate rows."""

    __slots__ = ("children", "prob", "rate", "min_rate")

    def __init__(self, g, params, delay):
        children = g.out_adj
        prob = []
        rate = []
        min_rate = math.inf
        for u in range(g.node_count):
            prow = []
            rrow = []
            for v in children[u]:
                prow.append(params.prob(u, v))
                rv = params.rate(delay, u, v)
                rrow.append(rv)
                if rv < min_rate:
                    min_rate = rv
            prob.append(prow)
            rate.append(rrow)
        self.children = children
        self.prob = prob
        self.rate = rate
        self.min_rate = min_rate if math.isfinite(min_rate) else 1.0


class _AsltTables:
    __slots__ = ("children", "weight", "rate", "min_rate")

    def __init__(self, g, params, delay):
        children = g.out_adj
        weight = []
        rate = []
        min_rate = math.inf
        for u in range(g.node_count):
            wrow = []
            rrow = []
            for v in children[u]:
                wrow.append(params.weight(g, u, v))
                rv = params.rate(delay, u, v)
                rrow.append(rv)
                if rv < min_rate:
                    min_rate = rv
            weight.append(wrow)
            rate.append(rrow)
        self.children = children
        self.weight = weight
        self.rate = rate
        self.min_rate = min_rate if math.isfinite(min_rate) else 1.0


# -- independent-cascade runs ------------------------------------------------


def _run_asic(tables, delay, seeds, rng, attempt_log=None):
    """One cascade run; returns the activation events in time order."""
    rand = rng.random
    children = tables.children
    prob = tables.prob
    rate = tables.rate
    active = {}
    events = []
    heap = []
    seq = 0
    node_delay = delay is not DelayMode.LINK
    override = delay is DelayMode.NODE_OVERRIDE
    committed = set()

    def try_children(u, tu):
        nonlocal seq
        kids = children[u]
        prow = prob[u]
        rrow = rate[u]
        for i in range(len(kids)):
            v = kids[i]
            if v in active:
                continue
            if node_delay and not override and v in committed:
                continue
            if attempt_log is not None:
                attempt_log.append((u, v))
            if rand() < prow[i]:
                delta = -_LN(1.0 - rand()) / rrow[i]
                if node_delay and not override:
                    committed.add(v)
                heappush(heap, (tu + delta, seq, v))
                seq += 1

    for s in seeds:
        active[s] = 0.0
        events.append((s, 0.0))
    for s in seeds:
        try_children(s, 0.0)
    while heap:
        t, _, v = heappop(heap)
        if v in active:
            continue
        active[v] = t
        events.append((v, t))
        try_children(v, t)
    return events


# -- linear-threshold runs -----------------------------------------------------


def _run_aslt(tables, delay, seeds, rng):
    rand = rng.random
    children = tables.children
    weight = tables.weight
    rate = tables.rate
    active = {}
    events = []
    heap = []
    seq = 0
    theta = {}
    acc = {}
    committed = set()
    link_delay = delay is DelayMode.LINK
    override = delay is DelayMode.NODE_OVERRIDE

    def receive(v, w, t, rv):
        """Weight w reaches inactive node v at time t; rv is v's reaction rate."""
        nonlocal seq
        total = acc.get(v, 0.0) + w
        acc[v] = total
        th = theta.get(v)
        if th is None:
            th = rand()
            theta[v] = th
        if total < th:
            return
        if link_delay:
            # Threshold met by an in-transit arrival: activate on the spot.
            activate(v, t)
        elif override:
            # Every contribution at or past the threshold proposes a
            # reaction time; the earliest proposal to come due wins.
            heappush(heap, (t - _LN(1.0 - rand()) / rv, seq, v, None))
            seq += 1
        elif v not in committed:
            committed.add(v)
            heappush(heap, (t - _LN(1.0 - rand()) / rv, seq, v, None))
            seq += 1

    def activate(v, t):
        nonlocal seq
        active[v] = t
        events.append((v, t))
        kids = children[v]
        wrow = weight[v]
        rrow = rate[v]
        for i in range(len(kids)):
            w = kids[i]
            if w in active:
                continue
            if link_delay:
                heappush(heap, (t - _LN(1.0 - rand()) / rrow[i], seq, w, wrow[i]))
                seq += 1
            else:
                receive(w, wrow[i], t, rrow[i])

    for s in seeds:
        active[s] = 0.0
        events.append((s, 0.0))
    for s in seeds:
        kids = children[s]
        wrow = weight[s]
        rrow = rate[s]
        for i in range(len(kids)):
            w = kids[i]
            if w in active:
                continue
            if link_delay:
                heappush(heap, (0.0 - _LN(1.0 - rand()) / rrow[i], seq, w, wrow[i]))
                seq += 1
            else:
                receive(w, wrow[i], 0.0, rrow[i])
    while heap:
        t, _, v, w = heappop(heap)
        if v in active:
            continue
        if w is None:
            # A node-delay reaction comes due.
            activate(v, t)
        else:
            receive(v, w, t, None)
    return events


def _horizon(events, margin, min_rate):
    last = events[-1][1] if events else 0.0
    if margin is None:
        # Far beyond any surviving exponential tail at the slowest rate.
        margin = 100.0 / min_rate
    return last + margin


def simulate_asic(g, params, delay: DelayMode, seeds, rng_seed,
                  horizon_margin=None, attempt_log=None) -> Cascade:
    """Run the independent-cascade process once and return the cascade.

    Seeds activate at t = 0.  Every activation gives the node a single chance
    per currently inactive child: with probability p the influence takes
    effect after an exponential delay, and the earliest effect activates the
    child.  See the module docstring for the delay variants.
    """
    seeds = _check_seeds(g, seeds)
    rng = _as_rng(rng_seed)
    tables = _AsicTables(g, params, delay)
    events = _run_asic(tables, delay, seeds, rng, attempt_log)
    return Cascade(events, _horizon(events, horizon_margin, tables.min_rate))


def simulate_aslt(g, params, delay: DelayMode, seeds, rng_seed,
                  horizon_margin=None) -> Cascade:
    """Run the linear-threshold process once and return the cascade.

    Each node holds a uniform random threshold, drawn lazily on the first
    contribution.  Active parents contribute their link weights after the
    delay dictated by the delay mode; the node activates the moment the
    accumulated weight reaches its threshold.
    """
    seeds = _check_seeds(g, seeds)
    rng = _as_rng(rng_seed)
    tables = _AsltTables(g, params, delay)
    events = _run_aslt(tables, delay, seeds, rng)
    return Cascade(events, _horizon(events, horizon_margin, tables.min_rate))


def generate_training_set(g, params, model: str, delay: DelayMode,
                          target_active: int, min_len: int, rng_seed,
                          max_attempts: int = 100_000,
                          horizon_margin=None) -> CascadeSet:
    """Accumulate cascades until the total number of active nodes reaches K.

    Each run starts from a single uniformly random seed; runs shorter than
    ``min_len`` are discarded.  Raises SimulationProgressError if the attempt
    budget is exhausted before K active nodes are collected.
    """
    if min_len < 1 or target_active < min_len:
        raise SimulationProgressError("need target_active >= min_len >= 1")
    if model == "asic":
        tables = _AsicTables(g, params, delay)
    elif model == "aslt":
        tables = _AsltTables(g, params, delay)
    else:
        raise ValueError(f"unknown model {model!r}")
    cascades = []
    total = 0
    for attempt in range(max_attempts):
        rng = derive_rng(rng_seed, "train", attempt)
        seed_node = rng.randrange(g.node_count)
        if model == "asic":
            events = _run_asic(tables, delay, [seed_node], rng)
        else:
            events = _run_aslt(tables, delay, [seed_node], rng)
        if len(events) < min_len:
            continue
        cascades.append(
            Cascade(events, _horizon(events, horizon_margin, tables.min_rate)))
        total += len(events)
        if total >= target_active:
            return CascadeSet(cascades)
    raise SimulationProgressError(
        f"collected {total}/{target_active} active nodes after "
        f"{max_attempts} attempts (kept {len(cascades)} cascades)")
