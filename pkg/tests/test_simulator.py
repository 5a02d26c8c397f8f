from __future__ import annotations

import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from robointegrate.metrics import (
    BenchmarkConfig,
    Estimator,
    compute_completion_score,
    compute_success_metrics,
    tally_failures,
    tally_trials,
    validate_trial_log,
)
from robointegrate.simulator import (
    PairParams,
    SimConfig,
    analytic_expectations,
    binomial_standard_error,
    simulate_trials,
)
from robointegrate.triallog import write_simulated_log

from conftest import HANDS, TOOLS

BENCH = BenchmarkConfig(HANDS, TOOLS)
prob = st.floats(0, 1, allow_subnormal=False)
params_st = st.builds(PairParams, prob, prob, prob, prob)


def enumerate_leaves(p: PairParams, max_attempts: int):
    """Every terminal path of one slot as (probability, n_s, n_a, n_u)."""
    leaves = [(1 - p.p_detect, 0, 0, 1)]

    def walk(reach, k):
        leaves.append((reach * p.p_grasp * p.p_place, 1, k, 0))
        leaves.append((reach * p.p_grasp * (1 - p.p_place) * p.p_drop, 0, k, 0))
        for branch in (reach * (1 - p.p_grasp), reach * p.p_grasp * (1 - p.p_place) * (1 - p.p_drop)):
            if k < max_attempts:
                walk(branch, k + 1)
            else:
                leaves.append((branch, 0, k, 1))

    walk(p.p_detect, 1)
    return leaves


def oracle(p: PairParams, max_attempts: int):
    leaves = enumerate_leaves(p, max_attempts)
    assert math.isclose(sum(w for w, *_ in leaves), 1.0, abs_tol=1e-12)
    e_s = sum(w * s for w, s, _, _ in leaves)
    e_a = sum(w * a for w, _, a, _ in leaves)
    e_u = sum(w * u for w, _, _, u in leaves)
    return e_s, e_a, e_u


def single_pair(params: PairParams, **kw) -> SimConfig:
    return SimConfig(BenchmarkConfig(("h",), ("t",)), {("h", "t"): params}, **kw)


class TestAnalytic:
    def test_attempt_rate_can_fall_with_better_placement(self):
        # detected w.p. 1/4; with p_place 0 both attempts fail: E[n_a] = 1/2, E[n_u] = 1 -> A = 1/3
        # with p_place 1: E[n_a] = 1/4, E[n_u] = 3/4 -> A = 1/4
        lo = analytic_expectations(single_pair(PairParams(0.25, 1, 0, 0), max_attempts=2))[("h", "t")]
        hi = analytic_expectations(single_pair(PairParams(0.25, 1, 1, 0), max_attempts=2))[("h", "t")]
        assert lo.attempt_rate == pytest.approx(1 / 3) and hi.attempt_rate == pytest.approx(1 / 4)

    def test_product_formula(self):
        e = analytic_expectations(single_pair(PairParams(0.5, 1, 1, 0)))[("h", "t")]
        assert (e.attempt_rate, e.precision, e.success_rate) == (0.5, 1.0, 0.5)

    def test_all_certain(self):
        e = analytic_expectations(SimConfig.uniform(BENCH, PairParams(1, 1, 1, 0), max_attempts=3))
        for pair in BENCH.pairs():
            m = e[pair]
            assert (m.precision, m.attempt_rate, m.success_rate) == (1.0, 1.0, 1.0)
        assert e.completion_mean == 8.0

    def test_two_level_tree(self):
        # leaves: success at 1 (0.5, n_a=1), success at 2 (0.25, n_a=2), fail twice (0.25, n_a=2, n_u=1)
        e = analytic_expectations(single_pair(PairParams(1, 0.5, 1, 0), max_attempts=2))[("h", "t")]
        assert e.success_probability == pytest.approx(0.75, abs=1e-15)
        assert e.moments.attempts == pytest.approx(1.5)
        assert e.moments.left_on_bench == pytest.approx(0.25)
        assert e.success_rate == pytest.approx(0.75 / 1.75, abs=1e-15)
        assert e.precision == pytest.approx(0.5, abs=1e-15)

    @given(params_st, st.integers(1, 6))
    def test_matches_path_enumeration(self, params, max_attempts):
        m = analytic_expectations(single_pair(params, max_attempts=max_attempts))[("h", "t")].moments
        e_s, e_a, e_u = oracle(params, max_attempts)
        assert m.successes == pytest.approx(e_s, abs=1e-12)
        assert m.attempts == pytest.approx(e_a, abs=1e-12)
        assert m.left_on_bench == pytest.approx(e_u, abs=1e-12)

    @given(params_st, st.integers(1, 4), st.sampled_from(["p_detect", "p_grasp", "p_place"]), st.floats(0, 1))
    def test_monotone_in_success_probabilities(self, params, max_attempts, name, bump):
        raised = PairParams(**{**params.__dict__, name: min(1.0, getattr(params, name) + bump)})
        lo = analytic_expectations(single_pair(params, max_attempts=max_attempts))[("h", "t")]
        hi = analytic_expectations(single_pair(raised, max_attempts=max_attempts))[("h", "t")]
        assert hi.success_probability >= lo.success_probability - 1e-12
        fields = ["precision", "success_rate"]
        # with retries, better grasping/placement means fewer repeat attempts, which can lower A
        if name == "p_detect" or max_attempts == 1:
            fields.append("attempt_rate")
        for field in fields:
            a, b = getattr(lo, field), getattr(hi, field)
            if a is not None and b is not None:
                assert b >= a - 1e-9, field


class TestSimulate:
    def test_certain_success(self):
        log = simulate_trials(SimConfig.uniform(BENCH, PairParams(1, 1, 1, 1)), seed=3, n_trials=5)
        t = tally_trials(log.attempts, log.trials, BENCH)
        assert all((x.n_s, x.n_a, x.n_u) == (1, 1, 0) for x in t.values())
        assert compute_completion_score(t, BENCH).mean == BENCH.max_completion_score

    def test_never_detected(self):
        log = simulate_trials(SimConfig.uniform(BENCH, PairParams(0, 1, 1, 0)), seed=3, n_trials=5)
        t = tally_trials(log.attempts, log.trials, BENCH)
        assert all((x.n_s, x.n_a, x.n_u) == (0, 0, 1) for x in t.values())
        m = compute_success_metrics(t, BENCH, Estimator.POOLED)
        for pair in BENCH.pairs():
            assert m[pair].precision is None
            assert m[pair].attempt_rate == 0 and m[pair].success_rate == 0

    def test_detection_rate_converges(self):
        cfg = single_pair(PairParams(0.5, 1, 1, 0))
        log = simulate_trials(cfg, seed=2024, n_trials=10_000)
        t = tally_trials(log.attempts, log.trials, cfg.benchmark)
        a = compute_success_metrics(t, cfg.benchmark, Estimator.POOLED)[("h", "t")].attempt_rate
        assert abs(a - 0.5) <= 0.02

    def test_injected_failures_match_tally(self):
        cfg = SimConfig.uniform(BENCH, PairParams(0.9, 0.6, 0.7, 0.4), max_attempts=3)
        log = simulate_trials(cfg, seed=11, n_trials=200)
        f = tally_failures(log.attempts, BENCH)
        for key, count in f.counts.items():
            assert count == log.injected_failures.get(key, 0)
        assert sum(log.injected_failures.values()) > 0

    def test_duration_model(self):
        cfg = SimConfig.uniform(BENCH, PairParams(0.9, 0.6, 0.7, 0.4), max_attempts=2, base_seconds=100, seconds_per_attempt=10)
        log = simulate_trials(cfg, seed=5, n_trials=20)
        for tr in log.trials:
            n = sum(a.trial_id == tr.trial_id for a in log.attempts)
            assert tr.duration_seconds == 100 + 10 * n

    def test_parallel_matches_sequential(self):
        cfg = SimConfig.uniform(BENCH, PairParams(0.8, 0.7, 0.9, 0.5), max_attempts=3)
        assert simulate_trials(cfg, 99, 300) == simulate_trials(cfg, 99, 300, workers=4)

    def test_trial_independent_of_run_length(self):
        cfg = SimConfig.uniform(BENCH, PairParams(0.8, 0.7, 0.9, 0.5), max_attempts=3)
        short, long = simulate_trials(cfg, 1, 10), simulate_trials(cfg, 1, 50)
        assert long.trials[:10] == short.trials
        assert long.attempts[: len(short.attempts)] == short.attempts

    @pytest.mark.parametrize(
        "kw", [dict(max_attempts=0), dict(base_seconds=0), dict(seconds_per_attempt=-1)]
    )
    def test_invalid_config(self, kw):
        with pytest.raises(ValueError):
            SimConfig.uniform(BENCH, PairParams(), **kw)

    def test_invalid_probability(self):
        with pytest.raises(ValueError):
            PairParams(p_detect=1.2)

    def test_missing_pair(self):
        with pytest.raises(ValueError):
            SimConfig(BENCH, {("qb_hand", "torch"): PairParams()})

    @given(params_st, st.integers(1, 4), st.integers(0, 2**64 - 1), st.integers(1, 5))
    def test_logs_always_valid(self, params, max_attempts, seed, n):
        cfg = SimConfig.uniform(BENCH, params, max_attempts=max_attempts)
        log = simulate_trials(cfg, seed, n)
        assert validate_trial_log(log.attempts, log.trials, BENCH) == []

    @given(params_st, st.integers(1, 3), st.integers(0, 2**64 - 1))
    def test_byte_determinism(self, params, max_attempts, seed):
        cfg = SimConfig.uniform(BENCH, params, max_attempts=max_attempts)
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            write_simulated_log(buf, simulate_trials(cfg, seed, 3))
            outs.append(buf.getvalue().encode())
        assert outs[0] == outs[1]


def test_binomial_standard_error():
    assert binomial_standard_error(0.5, 10_000) == 0.005
    assert binomial_standard_error(0.5, 0) == math.inf
