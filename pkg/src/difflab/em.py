"""Iterative maximum-likelihood estimation for both diffusion models.

Estimation alternates a responsibility computation (which parent most likely
caused each observed activation, and how each observed non-activation splits
between "never fired" and "still pending") with closed-form parameter updates
that maximize the resulting surrogate objective.  Each update can only
increase the data log-likelihood, so the iteration converges to a stationary
point.

Only the link-delay variant is learnable here; the sufficient statistics are
the time gaps between parent and child activations plus the failure structure
of each cascade.  Shared mode pools every link into one (p, r) or (q, r)
pair; per-link mode keeps one parameter per edge, and edges never touched by
the data keep their current values (counted as warnings).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cascade import frontier
from .errors import EstimationError, ParameterError
from .params import PER_LINK, SHARED, AsicParams, AsltParams, DelayMode

PROB_FLOOR = 1e-12
RATE_FLOOR = 1e-12
RATE_CEIL = 1e12


@dataclass
class EmConfig:
    """Knobs of the fitting loop."""

    init_p: float = 0.5
    init_q: float = 0.5
    init_r: float = 1.0
    tolerance: float = 1e-6
    max_iterations: int = 100
    mode: str = SHARED

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be at least 1")
        if not (0.0 < self.init_p < 1.0 and 0.0 < self.init_q <= 1.0):
            raise ParameterError("initial p must lie in (0,1), q in (0,1]")
        if not self.init_r > 0:
            raise ParameterError("initial r must be positive")
        if self.mode not in (SHARED, PER_LINK):
            raise ParameterError(f"mode must be {SHARED!r} or {PER_LINK!r}")


@dataclass
class EmTrace:
    """Per-iteration record of a fit.

    ``loglik[i]`` and ``params_history[i]`` describe the parameters after i
    updates (index 0 is the initialization).  The log-likelihood sequence is
    non-decreasing up to floating-point slack.
    """

    loglik: list = field(default_factory=list)
    params_history: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    clamp_events: int = 0
    untouched_links: int = 0


@dataclass
class Responsibilities:
    """Posterior attribution of observed events to latent causes.

    Cascade model: ``alpha[(m, u, v)]`` is the posterior probability that
    parent u caused v's activation in cascade m (summing to 1 over v's
    effective parents); ``beta`` is the probability that u's single chance
    succeeded but would have landed past t_v, given that it did not land
    in time.

    Threshold model: ``phi`` attributes each activation to a tipping parent;
    for each frontier node, ``varphi`` (keyed (m, v, v) for the slack weight
    and (m, u, v) for never-active parents) and ``psi`` (still-pending
    active parents) split the survival mass and together sum to 1.
    """

    model: str = "asic"
    alpha: dict = field(default_factory=dict)
    beta: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)
    varphi: dict = field(default_factory=dict)
    psi: dict = field(default_factory=dict)
    _ctx: object = None


# -- sufficient statistics ---------------------------------------------------


class _AsicStats:
    """Flattened (cascade, child, parent) structure for vectorized passes."""

    __slots__ = ("dt", "group", "link", "n_groups", "n_plus",
                 "fail_edges", "fail_dt", "fail_total", "entry_keys")

    def __init__(self, g, data):
        dts, groups, links = [], [], []
        entry_keys = []
        fail_edges = []
        fail_dts = []
        gid = 0
        for m, c in enumerate(data):
            times = c._times
            if not c.events:
                continue
            t0 = c.initial_time
            for v, tv in c.events:
                if tv == t0:
                    continue
                opened = False
                for u in g.in_adj[v]:
                    tu = times.get(u)
                    if tu is None or tu >= tv:
                        continue
                    dts.append(tv - tu)
                    groups.append(gid)
                    links.append(g.edge_id(u, v))
                    entry_keys.append((m, u, v))
                    opened = True
                if not opened:
                    raise EstimationError(
                        f"cascade {m}: node {v} activated at t={tv} with no "
                        f"possible activator (zero-probability event)")
                gid += 1
            horizon = c.horizon
            for u, tu in c.events:
                for w in g.out_adj[u]:
                    if w not in times:
                        fail_edges.append(g.edge_id(u, w))
                        fail_dts.append(horizon - tu)
        self.dt = np.asarray(dts, dtype=np.float64)
        self.group = np.asarray(groups, dtype=np.intp)
        self.link = np.asarray(links, dtype=np.intp)
        self.n_groups = gid
        self.n_plus = len(dts)
        self.fail_edges = np.asarray(fail_edges, dtype=np.intp)
        self.fail_dt = np.asarray(fail_dts, dtype=np.float64)
        self.fail_total = len(fail_edges)
        self.entry_keys = entry_keys


class _AsltStats:
    """Activation terms plus frontier survival structure, flattened."""

    __slots__ = ("dt", "group", "link", "n_groups", "group_nb", "entry_keys",
                 "f_dt", "f_group", "f_link", "f_nb", "n_f_groups",
                 "f_group_nb", "f_group_k", "f_group_node", "f_group_m",
                 "f_entry_keys", "i_link", "i_group", "i_entry_keys")

    def __init__(self, g, data):
        dts, groups, links = [], [], []
        group_nb = []
        entry_keys = []
        f_dts, f_groups, f_links, f_nbs = [], [], [], []
        f_group_nb, f_group_k, f_group_node, f_group_m = [], [], [], []
        f_entry_keys = []
        i_links, i_groups, i_entry_keys = [], [], []
        gid = 0
        fgid = 0
        for m, c in enumerate(data):
            times = c._times
            if not c.events:
                continue
            t0 = c.initial_time
            for v, tv in c.events:
                if tv == t0:
                    continue
                opened = False
                for u in g.in_adj[v]:
                    tu = times.get(u)
                    if tu is None or tu >= tv:
                        continue
                    dts.append(tv - tu)
                    groups.append(gid)
                    links.append(g.edge_id(u, v))
                    entry_keys.append((m, u, v))
                    opened = True
                if not opened:
                    raise EstimationError(
                        f"cascade {m}: node {v} activated at t={tv} with no "
                        f"possible activator (zero-probability event)")
                group_nb.append(len(g.in_adj[v]))
                gid += 1
            horizon = c.horizon
            for v in sorted(frontier(g, c)):
                nb = len(g.in_adj[v])
                k = 0
                for u in g.in_adj[v]:
                    tu = times.get(u)
                    if tu is None:
                        i_links.append(g.edge_id(u, v))
                        i_groups.append(fgid)
                        i_entry_keys.append((m, u, v))
                        continue
                    f_dts.append(horizon - tu)
                    f_groups.append(fgid)
                    f_links.append(g.edge_id(u, v))
                    f_nbs.append(nb)
                    f_entry_keys.append((m, u, v))
                    k += 1
                f_group_nb.append(nb)
                f_group_k.append(k)
                f_group_node.append(v)
                f_group_m.append(m)
                fgid += 1
        self.dt = np.asarray(dts, dtype=np.float64)
        self.group = np.asarray(groups, dtype=np.intp)
        self.link = np.asarray(links, dtype=np.intp)
        self.n_groups = gid
        self.group_nb = np.asarray(group_nb, dtype=np.float64)
        self.entry_keys = entry_keys
        self.f_dt = np.asarray(f_dts, dtype=np.float64)
        self.f_group = np.asarray(f_groups, dtype=np.intp)
        self.f_link = np.asarray(f_links, dtype=np.intp)
        self.f_nb = np.asarray(f_nbs, dtype=np.float64)
        self.n_f_groups = fgid
        self.f_group_nb = np.asarray(f_group_nb, dtype=np.float64)
        self.f_group_k = np.asarray(f_group_k, dtype=np.float64)
        self.f_group_node = np.asarray(f_group_node, dtype=np.intp)
        self.f_group_m = f_group_m
        self.f_entry_keys = f_entry_keys
        self.i_link = np.asarray(i_links, dtype=np.intp)
        self.i_group = np.asarray(i_groups, dtype=np.intp)
        self.i_entry_keys = i_entry_keys


# -- cascade model: E, M, loglik ----------------------------------------------


def _asic_expand(g, stats, params):
    """Per-entry (p, r) arrays plus failure-term p array."""
    if params.mode == SHARED:
        return params.p, params.r, np.full(stats.fail_total, params.p)
    p_vec = np.asarray([params.p[e] for e in g.edges])
    r_vec = np.asarray([params.r[e] for e in g.edges])
    return p_vec[stats.link], r_vec[stats.link], p_vec[stats.fail_edges]


def _asic_e(stats, p_arr, r_arr, fail_p, fail_r=None, finite=False):
    """Responsibilities and log-likelihood at the given parameters.

    With ``finite=True`` each observed non-activation keeps the within-window
    survival factor p*exp(-r*(T - t)) + (1 - p) instead of its T -> inf limit
    (1 - p); ``beta_fail`` is then the posterior mass of "succeeded but still
    pending at the horizon".
    """
    ee = np.exp(-r_arr * stats.dt)
    pe = p_arr * ee
    y = pe + (1.0 - p_arr)
    w = r_arr * pe / y
    group_sum = np.bincount(stats.group, weights=w, minlength=stats.n_groups)
    if np.any(group_sum == 0.0):
        bad = int(np.argmax(group_sum == 0.0))
        m, u, v = stats.entry_keys[int(np.argmax(stats.group == bad))]
        raise EstimationError(
            f"cascade {m}: activation density of node {v} underflowed to 0")
    alpha = w / group_sum[stats.group]
    beta = pe / y
    if finite:
        pef = fail_p * np.exp(-fail_r * stats.fail_dt)
        yf = pef + (1.0 - fail_p)
        beta_fail = pef / yf
        fail_ll = np.log(yf).sum()
    else:
        beta_fail = None
        with np.errstate(divide="ignore"):
            fail_ll = np.log1p(-fail_p).sum()
    with np.errstate(divide="ignore"):
        ll = float(np.log(y).sum() + np.log(group_sum).sum() + fail_ll)
    return alpha, beta, beta_fail, ll


def _asic_m_shared(stats, alpha, beta, beta_fail=None):
    gamma = alpha + (1.0 - alpha) * beta
    den_r = float((gamma * stats.dt).sum())
    num_p = float(gamma.sum())
    if beta_fail is not None:
        den_r += float((beta_fail * stats.fail_dt).sum())
        num_p += float(beta_fail.sum())
    r_new = stats.n_groups / den_r
    p_new = num_p / (stats.n_plus + stats.fail_total)
    return _clamp_prob(p_new), _clamp_rate(r_new)


def _asic_m_per_link(n_edges, stats, alpha, beta, p_vec, r_vec,
                     beta_fail=None):
    gamma = alpha + (1.0 - alpha) * beta
    num_r = np.bincount(stats.link, weights=alpha, minlength=n_edges)
    den_r = np.bincount(stats.link, weights=gamma * stats.dt,
                        minlength=n_edges)
    num_p = np.bincount(stats.link, weights=gamma, minlength=n_edges)
    if beta_fail is not None:
        den_r += np.bincount(stats.fail_edges,
                             weights=beta_fail * stats.fail_dt,
                             minlength=n_edges)
        num_p += np.bincount(stats.fail_edges, weights=beta_fail,
                             minlength=n_edges)
    cnt = np.bincount(stats.link, minlength=n_edges).astype(float)
    cnt += np.bincount(stats.fail_edges, minlength=n_edges)
    has_r = num_r > 0
    has_p = cnt > 0
    r_new = np.where(has_r, num_r / np.where(has_r, den_r, 1.0), r_vec)
    p_new = np.where(has_p, num_p / np.where(has_p, cnt, 1.0), p_vec)
    np.clip(p_new, PROB_FLOOR, 1.0, out=p_new)
    np.clip(r_new, RATE_FLOOR, RATE_CEIL, out=r_new)
    return p_new, r_new


# -- threshold model: E, M, loglik ----------------------------------------------


def _aslt_e_shared(stats, q, r):
    e_h = np.exp(-r * stats.dt)
    h_sum = np.bincount(stats.group, weights=e_h, minlength=stats.n_groups)
    if np.any(h_sum == 0.0):
        bad = int(np.argmax(h_sum == 0.0))
        m, u, v = stats.entry_keys[int(np.argmax(stats.group == bad))]
        raise EstimationError(
            f"cascade {m}: activation density of node {v} underflowed to 0")
    phi = e_h / h_sum[stats.group]
    e_g = np.exp(-r * stats.f_dt)
    tail_sum = np.bincount(stats.f_group, weights=e_g,
                           minlength=stats.n_f_groups)
    nb = stats.f_group_nb
    gvals = (1.0 - q) + q * (nb - stats.f_group_k) / nb + (q / nb) * tail_sum
    psi = (q / stats.f_nb) * e_g / gvals[stats.f_group]
    varphi_slack = (1.0 - q) / gvals
    varphi_inact_total = (nb - stats.f_group_k) * (q / nb) / gvals
    with np.errstate(divide="ignore"):
        ll = float(stats.n_groups * (math.log(q) + math.log(r))
                   - np.log(stats.group_nb).sum()
                   + np.log(h_sum).sum()
                   + np.log(gvals).sum())
    return phi, psi, varphi_slack, varphi_inact_total, gvals, ll


def _aslt_e_per_link(stats, q_vec, r_vec, slack_vec):
    q_arr = q_vec[stats.link]
    r_arr = r_vec[stats.link]
    term = q_arr * r_arr * np.exp(-r_arr * stats.dt)
    h_sum = np.bincount(stats.group, weights=term, minlength=stats.n_groups)
    if np.any(h_sum == 0.0):
        bad = int(np.argmax(h_sum == 0.0))
        m, u, v = stats.entry_keys[int(np.argmax(stats.group == bad))]
        raise EstimationError(
            f"cascade {m}: activation density of node {v} underflowed to 0")
    phi = term / h_sum[stats.group]
    rf = r_vec[stats.f_link]
    tail = q_vec[stats.f_link] * np.exp(-rf * stats.f_dt)
    gvals = slack_vec[stats.f_group_node].astype(float)
    gvals += np.bincount(stats.f_group, weights=tail,
                         minlength=stats.n_f_groups)
    if len(stats.i_link):
        gvals += np.bincount(stats.i_group, weights=q_vec[stats.i_link],
                             minlength=stats.n_f_groups)
    psi = tail / gvals[stats.f_group] if len(tail) else tail
    varphi_inact = (q_vec[stats.i_link] / gvals[stats.i_group]
                    if len(stats.i_link) else np.zeros(0))
    varphi_slack = (slack_vec[stats.f_group_node] / gvals
                    if stats.n_f_groups else np.zeros(0))
    with np.errstate(divide="ignore"):
        ll = float(np.log(h_sum).sum() + np.log(gvals).sum())
    return phi, psi, varphi_inact, varphi_slack, gvals, ll


def _aslt_m_shared(stats, phi, psi, varphi_slack, varphi_inact_total, q, r):
    a = stats.n_groups + float(psi.sum()) + float(varphi_inact_total.sum())
    b = float(varphi_slack.sum())
    q_new = a / (a + b) if (a + b) > 0 else q
    denom = float((phi * stats.dt).sum() + (psi * stats.f_dt).sum())
    r_new = stats.n_groups / denom if denom > 0 else r
    return min(max(q_new, PROB_FLOOR), 1.0), _clamp_rate(r_new)


def _aslt_m_per_link(g, stats, phi, psi, varphi_inact, varphi_slack,
                     q_vec, r_vec, edge_target):
    n_edges = len(q_vec)
    num_q = np.bincount(stats.link, weights=phi, minlength=n_edges)
    num_q += np.bincount(stats.f_link, weights=psi, minlength=n_edges)
    if len(stats.i_link):
        num_q += np.bincount(stats.i_link, weights=varphi_inact,
                             minlength=n_edges)
    slack_num = np.zeros(g.node_count)
    if stats.n_f_groups:
        np.add.at(slack_num, stats.f_group_node, varphi_slack)
    node_tot = slack_num.copy()
    np.add.at(node_tot, edge_target, num_q)
    has_mass = node_tot[edge_target] > 0
    q_new = np.where(has_mass,
                     num_q / np.where(has_mass, node_tot[edge_target], 1.0),
                     q_vec)
    num_r = np.bincount(stats.link, weights=phi, minlength=n_edges)
    den_r = np.bincount(stats.link, weights=phi * stats.dt,
                        minlength=n_edges)
    den_r += np.bincount(stats.f_link, weights=psi * stats.f_dt,
                         minlength=n_edges)
    has_r = num_r > 0
    r_new = np.where(has_r, num_r / np.where(has_r, den_r, 1.0), r_vec)
    np.clip(r_new, RATE_FLOOR, RATE_CEIL, out=r_new)
    return q_new, r_new


def _clamp_prob(p):
    return min(max(p, PROB_FLOOR), 1.0)


def _clamp_rate(r):
    return min(max(r, RATE_FLOOR), RATE_CEIL)


# -- fitting loop ---------------------------------------------------------------


def _edge_vectors(g, params, model):
    if model == "asic":
        if params.mode == SHARED:
            return (np.full(g.edge_count, params.p),
                    np.full(g.edge_count, params.r))
        return (np.asarray([params.p[e] for e in g.edges]),
                np.asarray([params.r[e] for e in g.edges]))
    if params.mode == SHARED:
        q_vec = np.asarray([params.q / len(g.in_adj[v]) for _, v in g.edges])
        return q_vec, np.full(g.edge_count, params.r)
    return (np.asarray([params.q[e] for e in g.edges]),
            np.asarray([params.r[e] for e in g.edges]))


def fit(model: str, g, data, config: EmConfig | None = None,
        delay: DelayMode = DelayMode.LINK, init_params=None,
        horizon_mode: str = "infinite"):
    """Fit model parameters by alternating E and M steps.

    Stops when the L1 change of the parameter vector drops to the configured
    tolerance, or at the iteration cap.  Returns ``(params, EmTrace)``.
    ``init_params`` warm-starts a shared-mode fit from an earlier solution.

    ``horizon_mode`` selects the survival factor of the cascade model's
    failure terms: "infinite" (default; appropriate when every cascade ran to
    completion well before its horizon) or "finite" (right-censored data,
    e.g. observation windows cut mid-diffusion).  The threshold model is
    always horizon-aware and ignores the flag.
    """
    if delay is not DelayMode.LINK:
        raise EstimationError(
            "learning is only supported for the link-delay variant")
    if model not in ("asic", "aslt"):
        raise ValueError(f"unknown model {model!r}")
    if horizon_mode not in ("infinite", "finite"):
        raise ValueError(f"unknown horizon mode {horizon_mode!r}")
    if config is None:
        config = EmConfig()
    if len(data) == 0:
        raise EstimationError("cannot fit on an empty cascade set")
    if init_params is not None:
        if config.mode != SHARED:
            raise EstimationError("warm starts require shared mode")
        if model == "asic":
            config = _replace_init(config, init_p=min(init_params.p,
                                                      1.0 - 1e-9),
                                   init_r=init_params.r)
        else:
            config = _replace_init(config, init_q=init_params.q,
                                   init_r=init_params.r)
    if model == "asic":
        return _fit_asic(g, data, config, horizon_mode == "finite")
    return _fit_aslt(g, data, config)


def _replace_init(config, **kw):
    return EmConfig(init_p=kw.get("init_p", config.init_p),
                    init_q=kw.get("init_q", config.init_q),
                    init_r=kw.get("init_r", config.init_r),
                    tolerance=config.tolerance,
                    max_iterations=config.max_iterations,
                    mode=config.mode)


def _fit_asic(g, data, config, finite=False):
    stats = _AsicStats(g, data)
    if stats.n_groups == 0:
        raise EstimationError(
            "no non-initial activations: nothing pins the delay rate")
    shared = config.mode == SHARED
    n_edges = g.edge_count
    trace = EmTrace()
    if shared:
        theta = (config.init_p, config.init_r)
    else:
        theta = (np.full(n_edges, config.init_p),
                 np.full(n_edges, config.init_r))
        touched = np.zeros(n_edges, dtype=bool)
        touched[stats.link] = True
        touched[stats.fail_edges] = True
        trace.untouched_links = int(n_edges - touched.sum())
    trace.params_history.append(_snap(theta))

    def e_pass(theta):
        if shared:
            p_arr, r_arr = theta
            fail_p = np.full(stats.fail_total, theta[0])
            fail_r = np.full(stats.fail_total, theta[1]) if finite else None
        else:
            p_arr = theta[0][stats.link]
            r_arr = theta[1][stats.link]
            fail_p = theta[0][stats.fail_edges]
            fail_r = theta[1][stats.fail_edges] if finite else None
        return _asic_e(stats, p_arr, r_arr, fail_p, fail_r, finite)

    for it in range(config.max_iterations):
        alpha, beta, beta_fail, ll = e_pass(theta)
        if not math.isfinite(ll):
            raise EstimationError(
                f"non-finite log-likelihood at iteration {it} ({ll})")
        trace.loglik.append(ll)
        if shared:
            new = _asic_m_shared(stats, alpha, beta, beta_fail)
            delta = abs(new[0] - theta[0]) + abs(new[1] - theta[1])
        else:
            new = _asic_m_per_link(n_edges, stats, alpha, beta, *theta,
                                   beta_fail=beta_fail)
            delta = float(np.abs(new[0] - theta[0]).sum()
                          + np.abs(new[1] - theta[1]).sum())
        theta = new
        trace.params_history.append(_snap(theta))
        trace.iterations = it + 1
        if delta <= config.tolerance:
            trace.converged = True
            break

    *_, ll = e_pass(theta)
    trace.loglik.append(ll)
    if shared:
        params = AsicParams.shared(theta[0], theta[1])
    else:
        params = AsicParams.per_link(
            {e: float(theta[0][i]) for i, e in enumerate(g.edges)},
            {e: float(theta[1][i]) for i, e in enumerate(g.edges)})
    return params, trace


def _fit_aslt(g, data, config):
    stats = _AsltStats(g, data)
    if stats.n_groups == 0:
        raise EstimationError(
            "no non-initial activations: nothing pins the delay rate")
    shared = config.mode == SHARED
    n_edges = g.edge_count
    edge_target = np.asarray([v for _, v in g.edges], dtype=np.intp)
    trace = EmTrace()
    if shared:
        theta = (config.init_q, config.init_r)
    else:
        q_vec = np.asarray([config.init_q / len(g.in_adj[v])
                            for _, v in g.edges])
        theta = (q_vec, np.full(n_edges, config.init_r))
        touched = np.zeros(n_edges, dtype=bool)
        touched[stats.link] = True
        touched[stats.f_link] = True
        if len(stats.i_link):
            touched[stats.i_link] = True
        trace.untouched_links = int(n_edges - touched.sum())
    trace.params_history.append(_snap(theta))

    def slack_of(q_vec):
        s = np.ones(g.node_count)
        np.subtract.at(s, edge_target, q_vec)
        return np.maximum(s, 0.0)

    for it in range(config.max_iterations):
        if shared:
            phi, psi, vslack, vinact_total, _, ll = _aslt_e_shared(
                stats, theta[0], theta[1])
        else:
            phi, psi, vinact, vslack, _, ll = _aslt_e_per_link(
                stats, theta[0], theta[1], slack_of(theta[0]))
        if not math.isfinite(ll):
            raise EstimationError(
                f"non-finite log-likelihood at iteration {it} ({ll})")
        trace.loglik.append(ll)
        if shared:
            new = _aslt_m_shared(stats, phi, psi, vslack, vinact_total,
                                 theta[0], theta[1])
            delta = abs(new[0] - theta[0]) + abs(new[1] - theta[1])
        else:
            new = _aslt_m_per_link(g, stats, phi, psi, vinact, vslack,
                                   theta[0], theta[1], edge_target)
            delta = float(np.abs(new[0] - theta[0]).sum()
                          + np.abs(new[1] - theta[1]).sum())
        theta = new
        trace.params_history.append(_snap(theta))
        trace.iterations = it + 1
        if delta <= config.tolerance:
            trace.converged = True
            break

    if shared:
        *_, ll = _aslt_e_shared(stats, theta[0], theta[1])
    else:
        *_, ll = _aslt_e_per_link(stats, theta[0], theta[1],
                                  slack_of(theta[0]))
    trace.loglik.append(ll)
    if shared:
        params = AsltParams.shared(theta[0], theta[1])
    else:
        params = AsltParams.per_link(
            {e: max(float(theta[0][i]), PROB_FLOOR)
             for i, e in enumerate(g.edges)},
            {e: float(theta[1][i]) for i, e in enumerate(g.edges)})
    return params, trace


def _snap(theta):
    a, b = theta
    if isinstance(a, np.ndarray):
        return (a.copy(), b.copy())
    return (float(a), float(b))


# -- single-step public surface ----------------------------------------------


def e_step_asic(g, data, params) -> Responsibilities:
    """Responsibilities of the cascade model at the given parameters."""
    stats = _AsicStats(g, data)
    p_arr, r_arr, fail_p = _asic_expand(g, stats, params)
    alpha, beta, _, ll = _asic_e(stats, p_arr, r_arr, fail_p)
    if not math.isfinite(ll):
        raise EstimationError(f"non-finite log-likelihood ({ll})")
    resp = Responsibilities(model="asic")
    for i, key in enumerate(stats.entry_keys):
        resp.alpha[key] = float(alpha[i])
        resp.beta[key] = float(beta[i])
    resp._ctx = (stats, alpha, beta, params)
    return resp


def m_step_asic(g, data, resp: Responsibilities, mode: str = SHARED):
    """One closed-form update from cascade-model responsibilities."""
    stats, alpha, beta, params = resp._ctx
    if mode == SHARED:
        p_new, r_new = _asic_m_shared(stats, alpha, beta)
        return AsicParams.shared(p_new, r_new)
    p_vec, r_vec = _edge_vectors(g, params, "asic")
    p_new, r_new = _asic_m_per_link(g.edge_count, stats, alpha, beta,
                                    p_vec.copy(), r_vec.copy())
    return AsicParams.per_link(
        {e: float(p_new[i]) for i, e in enumerate(g.edges)},
        {e: float(r_new[i]) for i, e in enumerate(g.edges)})


def e_step_aslt(g, data, params) -> Responsibilities:
    """Responsibilities of the threshold model at the given parameters."""
    stats = _AsltStats(g, data)
    resp = Responsibilities(model="aslt")
    if params.mode == SHARED:
        phi, psi, vslack, _, gvals, ll = _aslt_e_shared(
            stats, params.q, params.r)
        q = params.q
        for i, key in enumerate(stats.i_entry_keys):
            fg = stats.i_group[i]
            resp.varphi[key] = float(
                (q / stats.f_group_nb[fg]) / gvals[fg])
        vinact = None
    else:
        q_vec, r_vec = _edge_vectors(g, params, "aslt")
        slack_vec = np.asarray([params.slack(g, v)
                                for v in range(g.node_count)])
        phi, psi, vinact, vslack, gvals, ll = _aslt_e_per_link(
            stats, q_vec, r_vec, slack_vec)
        for i, key in enumerate(stats.i_entry_keys):
            resp.varphi[key] = float(vinact[i])
    if not math.isfinite(ll):
        raise EstimationError(f"non-finite log-likelihood ({ll})")
    for fg in range(stats.n_f_groups):
        v = int(stats.f_group_node[fg])
        m = stats.f_group_m[fg]
        resp.varphi[(m, v, v)] = float(vslack[fg])
    for i, key in enumerate(stats.entry_keys):
        resp.phi[key] = float(phi[i])
    for i, key in enumerate(stats.f_entry_keys):
        resp.psi[key] = float(psi[i])
    resp._ctx = (stats, phi, psi, vslack, vinact, params)
    return resp


def m_step_aslt(g, data, resp: Responsibilities, mode: str = SHARED):
    """One closed-form update from threshold-model responsibilities."""
    stats, phi, psi, vslack, vinact, params = resp._ctx
    if mode == SHARED:
        if params.mode != SHARED:
            raise EstimationError(
                "shared update requires shared-mode responsibilities")
        _, _, _, vinact_total, _, _ = _aslt_e_shared(stats, params.q,
                                                     params.r)
        q_new, r_new = _aslt_m_shared(stats, phi, psi, vslack, vinact_total,
                                      params.q, params.r)
        return AsltParams.shared(q_new, r_new)
    edge_target = np.asarray([v for _, v in g.edges], dtype=np.intp)
    q_vec, r_vec = _edge_vectors(g, params, "aslt")
    if vinact is None:
        # Shared-mode responsibilities feeding a per-link update.
        vinact = np.asarray([resp.varphi[key] for key in stats.i_entry_keys])
    q_new, r_new = _aslt_m_per_link(g, stats, phi, psi, vinact, vslack,
                                    q_vec, r_vec, edge_target)
    return AsltParams.per_link(
        {e: max(float(q_new[i]), PROB_FLOOR) for i, e in enumerate(g.edges)},
        {e: float(r_new[i]) for i, e in enumerate(g.edges)})


def param_error(estimate: float, truth: float) -> float:
    """Relative parameter error |estimate - truth| / truth."""
    if truth == 0:
        raise ParameterError("relative error undefined for a zero true value")
    return abs(estimate - truth) / abs(truth)


# -- parameter file I/O ---------------------------------------------------------


def _edge_key(e):
    return f"{e[0]},{e[1]}"


def _parse_edge_key(s):
    u, v = s.split(",")
    return (int(u), int(v))


def save_params(path, model: str, params, iterations: int = 0,
                loglik_value: float = math.nan) -> None:
    """Write a fitted parameter set as a JSON document."""
    doc = {"model": model, "mode": params.mode,
           "iterations": int(iterations), "loglik": loglik_value}
    strength_key = "p" if model == "asic" else "q"
    strength = params.p if model == "asic" else params.q
    if params.mode == SHARED:
        doc[strength_key] = strength
        doc["r"] = params.r
    else:
        doc[strength_key] = {_edge_key(e): val for e, val in strength.items()}
        doc["r"] = {_edge_key(e): val for e, val in params.r.items()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_params(path):
    """Read a parameter JSON document; returns (model, params)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    model = doc["model"]
    mode = doc["mode"]
    strength_key = "p" if model == "asic" else "q"
    strength = doc[strength_key]
    r = doc["r"]
    if mode == SHARED:
        params = (AsicParams.shared(strength, r) if model == "asic"
                  else AsltParams.shared(strength, r))
    else:
        smap = {_parse_edge_key(k): val for k, val in strength.items()}
        rmap = {_parse_edge_key(k): val for k, val in r.items()}
        params = (AsicParams.per_link(smap, rmap) if model == "asic"
                  else AsltParams.per_link(smap, rmap))
    return model, params
