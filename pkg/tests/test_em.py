import numpy as np
import pytest

from difflab import (AsicParams, AsltParams, Cascade, DelayMode,
                     DirectedGraph, EmConfig, EstimationError, ParameterError,
                     e_step_asic, e_step_aslt, erdos_renyi, fit,
                     generate_training_set, load_params, loglik, m_step_asic,
                     m_step_aslt, param_error, save_params)
from difflab.params import PER_LINK, SHARED
from difflab.rng import derive_rng

from oracles import random_consistent_cascades

LINK = DelayMode.LINK


def _instance(seed, model, n=20, p_edge=0.15, target=80, min_len=2):
    """A random (graph, params, training data) triple for one model."""
    g = erdos_renyi(n, p_edge, seed)
    rng = derive_rng(seed, "inst")
    if model == "asic":
        params = AsicParams.shared(rng.uniform(0.2, 0.7),
                                   rng.uniform(0.5, 2.0))
    else:
        params = AsltParams.shared(rng.uniform(0.5, 0.95),
                                   rng.uniform(0.5, 2.0))
    data = generate_training_set(g, params, model, LINK, target, min_len,
                                 (seed, "train"), max_attempts=50_000)
    return g, params, data


class TestEStepAsic:
    def test_single_parent_alpha_is_one(self, chain2):
        c = Cascade([(0, 0.0), (1, 1.0)], 10.0)
        resp = e_step_asic(chain2, [c], AsicParams.shared(0.5, 1.0))
        assert resp.alpha[(0, 0, 1)] == pytest.approx(1.0)

    def test_two_parent_alpha_split(self):
        # Edge (0, 1) gives the mid-time activation a legal activator; it
        # does not change node 2's parent set or the split below.
        g = DirectedGraph(3, [(0, 1), (0, 2), (1, 2)])
        c = Cascade([(0, 0.0), (1, 0.5), (2, 1.0)], 10.0)
        resp = e_step_asic(g, [c], AsicParams.shared(0.5, 1.0))
        assert resp.alpha[(0, 0, 2)] == pytest.approx(0.4160075359551684,
                                                      rel=1e-9)
        assert resp.alpha[(0, 1, 2)] == pytest.approx(0.5839924640448317,
                                                      rel=1e-9)

    def test_beta_value(self, chain2):
        c = Cascade([(0, 0.0), (1, 1.0)], 10.0)
        resp = e_step_asic(chain2, [c], AsicParams.shared(0.5, 1.0))
        assert resp.beta[(0, 0, 1)] == pytest.approx(0.2689414213699951,
                                                     rel=1e-9)

    def test_alpha_normalization_invariant(self):
        rng = derive_rng(101, "resp")
        g = erdos_renyi(15, 0.25, 77)
        raw, _, _ = random_consistent_cascades(g, rng, 4)
        data = [Cascade(ev, hz) for ev, hz in raw]
        resp = e_step_asic(g, data, AsicParams.shared(0.4, 1.2))
        sums = {}
        for (m, u, v), a in resp.alpha.items():
            assert 0.0 <= a <= 1.0
            sums[(m, v)] = sums.get((m, v), 0.0) + a
        assert sums, "expected at least one responsibility group"
        for total in sums.values():
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_impossible_event_raises(self):
        g = DirectedGraph(3, [(0, 1)])
        c = Cascade([(0, 0.0), (2, 1.0)], 5.0)
        with pytest.raises(EstimationError, match="node 2"):
            e_step_asic(g, [c], AsicParams.shared(0.5, 1.0))


class TestMStepAsic:
    def test_single_link_fixed_point(self):
        g = DirectedGraph(2, [(0, 1)])
        c = Cascade([(0, 0.0), (1, 2.0)], 50.0)
        resp = e_step_asic(g, [c], AsicParams.shared(0.5, 1.0))
        params = m_step_asic(g, [c], resp, mode=SHARED)
        assert params.r == pytest.approx(0.5)
        assert params.p == pytest.approx(1.0)

    def test_untouched_link_keeps_value(self):
        g = DirectedGraph(4, [(0, 1), (2, 3)])
        c = Cascade([(0, 0.0), (1, 1.0)], 10.0)
        start = AsicParams.per_link({(0, 1): 0.5, (2, 3): 0.33},
                                    {(0, 1): 1.0, (2, 3): 2.5})
        resp = e_step_asic(g, [c], start)
        params = m_step_asic(g, [c], resp, mode=PER_LINK)
        assert params.p[(2, 3)] == pytest.approx(0.33)
        assert params.r[(2, 3)] == pytest.approx(2.5)
        assert params.p[(0, 1)] == pytest.approx(1.0)
        assert params.r[(0, 1)] == pytest.approx(1.0)


class TestEStepAslt:
    def test_single_parent_phi_is_one(self, chain2):
        c = Cascade([(0, 0.0), (1, 1.0)], 10.0)
        params = AsltParams.per_link({(0, 1): 0.8}, {(0, 1): 1.0})
        resp = e_step_aslt(chain2, [c], params)
        assert resp.phi[(0, 0, 1)] == pytest.approx(1.0)

    def test_phi_proportions(self):
        g = DirectedGraph(3, [(0, 1), (0, 2), (1, 2)])
        c = Cascade([(0, 0.0), (1, 0.5), (2, 1.0)], 10.0)
        resp = e_step_aslt(g, [c], AsltParams.shared(0.6, 1.0))
        assert resp.phi[(0, 0, 2)] == pytest.approx(0.37754066879814546,
                                                    rel=1e-9)
        assert resp.phi[(0, 1, 2)] == pytest.approx(0.6224593312018546,
                                                    rel=1e-9)

    def test_frontier_split_sums_to_one(self):
        # Parents: 0 active at t=0, 1 never active; window [0, 2];
        # weights 0.3 each, slack 0.4.
        g = DirectedGraph(3, [(0, 2), (1, 2)])
        c = Cascade([(0, 0.0), (1, 7.0)], 7.0)
        # Use a second cascade to give node 1 an activator so stats build;
        # simpler: make node 1 a seed of its own cascade.
        c = Cascade([(0, 0.0)], 2.0)
        params = AsltParams.per_link({(0, 2): 0.3, (1, 2): 0.3},
                                     {(0, 2): 1.0, (1, 2): 1.0})
        resp = e_step_aslt(g, [c], params)
        assert resp.varphi[(0, 2, 2)] == pytest.approx(0.5401021928920995,
                                                       rel=1e-9)
        assert resp.varphi[(0, 1, 2)] == pytest.approx(0.4050766446690746,
                                                       rel=1e-9)
        assert resp.psi[(0, 0, 2)] == pytest.approx(0.054821162438825934,
                                                    rel=1e-9)
        total = (resp.varphi[(0, 2, 2)] + resp.varphi[(0, 1, 2)]
                 + resp.psi[(0, 0, 2)])
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_frontier_normalization_on_random_instances(self):
        rng = derive_rng(103, "resp-aslt")
        g = erdos_renyi(15, 0.25, 78)
        raw, _, _ = random_consistent_cascades(g, rng, 4)
        data = [Cascade(ev, hz) for ev, hz in raw]
        resp = e_step_aslt(g, data, AsltParams.shared(0.7, 1.1))
        phi_sums = {}
        for (m, u, v), val in resp.phi.items():
            phi_sums[(m, v)] = phi_sums.get((m, v), 0.0) + val
        for total in phi_sums.values():
            assert total == pytest.approx(1.0, abs=1e-12)
        survival_sums = {}
        for (m, u, v), val in resp.varphi.items():
            survival_sums[(m, v)] = survival_sums.get((m, v), 0.0) + val
        for (m, u, v), val in resp.psi.items():
            survival_sums[(m, v)] = survival_sums.get((m, v), 0.0) + val
        assert survival_sums, "expected at least one frontier node"
        for total in survival_sums.values():
            assert total == pytest.approx(1.0, abs=1e-12)


class TestMStepAslt:
    def test_single_link_fixed_point(self):
        g = DirectedGraph(2, [(0, 1)])
        c = Cascade([(0, 0.0), (1, 2.0)], 2.0)
        resp = e_step_aslt(g, [c], AsltParams.shared(0.5, 1.0))
        params = m_step_aslt(g, [c], resp, mode=SHARED)
        assert params.r == pytest.approx(0.5)
        assert params.q == pytest.approx(1.0)
        assert params.slack(g, 1) == pytest.approx(0.0)

    def test_per_link_single_link_fixed_point(self):
        g = DirectedGraph(2, [(0, 1)])
        c = Cascade([(0, 0.0), (1, 2.0)], 2.0)
        start = AsltParams.per_link({(0, 1): 0.5}, {(0, 1): 1.0})
        resp = e_step_aslt(g, [c], start)
        params = m_step_aslt(g, [c], resp, mode=PER_LINK)
        assert params.r[(0, 1)] == pytest.approx(0.5)
        assert params.q[(0, 1)] == pytest.approx(1.0)


class TestFitContract:
    def test_trace_length_and_convergence_flag(self):
        g, params, data = _instance(5, "asic")
        fitted, trace = fit("asic", g, data, EmConfig(max_iterations=200))
        assert trace.converged
        assert len(trace.params_history) == trace.iterations + 1
        assert len(trace.loglik) == trace.iterations + 1

    def test_max_iterations_one_does_one_update(self):
        g, params, data = _instance(6, "asic")
        fitted, trace = fit("asic", g, data,
                            EmConfig(max_iterations=1, tolerance=1e-12))
        assert trace.iterations == 1
        assert not trace.converged
        assert len(trace.params_history) == 2

    def test_empty_data_rejected(self, chain2):
        with pytest.raises(EstimationError):
            fit("asic", chain2, [])

    def test_node_delay_fit_unsupported(self, chain2):
        c = Cascade([(0, 0.0), (1, 1.0)], 10.0)
        with pytest.raises(EstimationError):
            fit("asic", chain2, [c], delay=DelayMode.NODE_OVERRIDE)

    def test_seed_only_data_unfittable(self, chain2):
        c = Cascade([(0, 0.0)], 1.0)
        with pytest.raises(EstimationError):
            fit("asic", chain2, [c])

    @pytest.mark.parametrize("model", ["asic", "aslt"])
    def test_trace_loglik_matches_likelihood_module(self, model):
        # The vectorized internal objective must equal the scalar reference
        # evaluation at every recorded iterate.
        g, params, data = _instance(7, model, n=15, target=40)
        config = EmConfig(max_iterations=5, mode=SHARED)
        fitted, trace = fit(model, g, data, config)
        for snap, ll in zip(trace.params_history, trace.loglik):
            if model == "asic":
                snap_params = AsicParams.shared(*snap)
            else:
                snap_params = AsltParams.shared(*snap)
            want = loglik(model, g, snap_params, LINK, data)
            assert ll == pytest.approx(want, rel=1e-10)

    @pytest.mark.parametrize("model", ["asic", "aslt"])
    def test_trace_loglik_matches_likelihood_module_per_link(self, model):
        g, params, data = _instance(8, model, n=12, target=30)
        config = EmConfig(max_iterations=3, mode=PER_LINK)
        fitted, trace = fit(model, g, data, config)
        edges = list(g.edges)
        for snap, ll in zip(trace.params_history, trace.loglik):
            s_map = {e: float(snap[0][i]) for i, e in enumerate(edges)}
            r_map = {e: float(snap[1][i]) for i, e in enumerate(edges)}
            if model == "asic":
                snap_params = AsicParams.per_link(s_map, r_map)
            else:
                snap_params = AsltParams.per_link(
                    {e: max(val, 1e-12) for e, val in s_map.items()}, r_map)
            want = loglik(model, g, snap_params, LINK, data)
            assert ll == pytest.approx(want, rel=1e-10)


class TestMonotonicity:
    @pytest.mark.parametrize("model", ["asic", "aslt"])
    @pytest.mark.parametrize("mode", [SHARED, PER_LINK])
    def test_loglik_never_decreases(self, model, mode):
        for seed in range(8):
            g, params, data = _instance((seed, model, mode), model, n=18,
                                        target=60)
            config = EmConfig(max_iterations=25, mode=mode)
            _, trace = fit(model, g, data, config)
            ll = np.asarray(trace.loglik)
            drops = np.diff(ll) < -1e-9 * np.abs(ll[:-1])
            assert not drops.any(), f"seed {seed}: decrease at {ll}"

    @pytest.mark.parametrize("mode", [SHARED, PER_LINK])
    def test_finite_horizon_fit_monotone_and_consistent(self, mode):
        # Censored windows: cut every cascade at a horizon that truncates
        # some pending activity, then fit with the within-window survival
        # factors and check the internal objective against the reference.
        from difflab import Cascade, loglik
        for seed in range(5):
            g, params, data = _instance((seed, "fin", mode), "asic", n=18,
                                        target=60)
            censored = []
            for c in data:
                cut = c.initial_time + 0.7 * (c.events[-1][1]
                                              - c.initial_time) + 0.1
                censored.append(c.truncated(cut))
            censored = [c for c in censored if len(c) >= 2]
            config = EmConfig(max_iterations=20, mode=mode)
            fitted, trace = fit("asic", g, censored, config,
                                horizon_mode="finite")
            ll = np.asarray(trace.loglik)
            drops = np.diff(ll) < -1e-9 * np.abs(ll[:-1])
            assert not drops.any(), f"seed {seed}: decrease at {ll}"
            want = loglik("asic", g, fitted, DelayMode.LINK, censored,
                          horizon_mode="finite")
            assert trace.loglik[-1] == pytest.approx(want, rel=1e-10)


class TestFitQuality:
    def test_shared_asic_recovery_smoke(self):
        g = erdos_renyi(60, 0.08, 42)
        truth = AsicParams.shared(0.35, 1.2)
        data = generate_training_set(g, truth, "asic", LINK, 1200, 3, 9)
        fitted, trace = fit("asic", g, data)
        assert param_error(fitted.p, 0.35) < 0.15
        assert param_error(fitted.r, 1.2) < 0.15

    def test_shared_aslt_recovery_smoke(self):
        g = erdos_renyi(60, 0.08, 43)
        truth = AsltParams.shared(0.9, 1.0)
        data = generate_training_set(g, truth, "aslt", LINK, 1200, 3, 10,
                                     max_attempts=500_000)
        fitted, trace = fit("aslt", g, data)
        assert param_error(fitted.q, 0.9) < 0.15
        assert param_error(fitted.r, 1.0) < 0.2

    def test_per_link_and_shared_agree_on_single_link_graph(self):
        g = DirectedGraph(2, [(0, 1)])
        cascades = [Cascade([(0, 0.0), (1, dt)], dt + 30.0)
                    for dt in (0.4, 0.9, 1.7, 2.2)]
        cascades.append(Cascade([(0, 0.0)], 30.0))
        shared_fit, _ = fit("asic", g, cascades,
                            EmConfig(max_iterations=400, tolerance=1e-10))
        link_fit, _ = fit("asic", g, cascades,
                          EmConfig(max_iterations=400, tolerance=1e-10,
                                   mode=PER_LINK))
        assert link_fit.p[(0, 1)] == pytest.approx(shared_fit.p, rel=1e-6)
        assert link_fit.r[(0, 1)] == pytest.approx(shared_fit.r, rel=1e-6)

    def test_initialization_robustness(self):
        g, truth, data = _instance(11, "asic", n=40, p_edge=0.12, target=500)
        results = []
        for p0 in (0.25, 0.5, 0.75):
            for r0 in (0.5, 1.0, 2.0):
                fitted, _ = fit("asic", g, data,
                                EmConfig(init_p=p0, init_r=r0,
                                         max_iterations=500))
                results.append((fitted.p, fitted.r))
        ps = [p for p, _ in results]
        rs = [r for _, r in results]
        assert (max(ps) - min(ps)) / np.mean(ps) < 0.01
        assert (max(rs) - min(rs)) / np.mean(rs) < 0.01

    def test_stationary_at_convergence(self):
        g, truth, data = _instance(12, "asic", n=30, p_edge=0.12, target=300)
        fitted, trace = fit("asic", g, data,
                            EmConfig(max_iterations=2000, tolerance=1e-9))
        ll0 = loglik("asic", g, fitted, LINK, data)
        for which in ("p", "r"):
            base = getattr(fitted, which)
            step = 1e-5 * base
            vals = []
            for sign in (1, -1):
                kw = {"p": fitted.p, "r": fitted.r}
                kw[which] = base + sign * step
                vals.append(loglik("asic", g, AsicParams.shared(**kw),
                                   LINK, data))
            grad = (vals[0] - vals[1]) / (2 * step)
            assert abs(grad) <= 1e-3 * abs(ll0)


class TestWarmStart:
    def test_warm_start_uses_previous_solution(self):
        g, truth, data = _instance(13, "asic", n=30, target=200)
        fitted, trace = fit("asic", g, data, EmConfig(max_iterations=300))
        refit, retrace = fit("asic", g, data, EmConfig(max_iterations=300),
                             init_params=fitted)
        assert retrace.iterations <= 2
        assert refit.p == pytest.approx(fitted.p, rel=1e-4)


class TestParamError:
    def test_values(self):
        assert param_error(0.11, 0.10) == pytest.approx(0.1)
        assert param_error(1.0, 1.0) == 0.0
        assert param_error(0.018, 0.02) == pytest.approx(0.1)

    def test_zero_truth_rejected(self):
        with pytest.raises(ParameterError):
            param_error(0.5, 0.0)


class TestParamsIO:
    def test_shared_round_trip(self, tmp_path):
        path = tmp_path / "params.json"
        save_params(path, "asic", AsicParams.shared(0.123456789, 1.5),
                    iterations=17, loglik_value=-12.5)
        model, params = load_params(path)
        assert model == "asic"
        assert params.p == pytest.approx(0.123456789, rel=1e-15)
        assert params.r == 1.5

    def test_per_link_round_trip(self, tmp_path):
        path = tmp_path / "params.json"
        orig = AsltParams.per_link({(0, 1): 0.25, (2, 1): 0.5},
                                   {(0, 1): 1.0, (2, 1): 2.0})
        save_params(path, "aslt", orig, 3, -1.0)
        model, params = load_params(path)
        assert model == "aslt"
        assert params.q == orig.q
        assert params.r == orig.r
