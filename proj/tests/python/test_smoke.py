"""Smoke tests for the python extension module."""

import math
import sys

import episignal


def approx(a, b, rel=1e-3):
    return abs(a - b) <= rel * max(1.0, abs(b))


def test_reproduction_numbers():
    params = episignal.EpiParams()
    assert approx(episignal.r0(params), 2.921, 2e-4)
    assert approx(episignal.r_control(params, episignal.BehaviorRates(0.05, 0.10)), 1.607, 5e-4)
    assert episignal.r_control(params, episignal.BehaviorRates(0.0, 1.0)) == 0.0
    psi_hi, valid = episignal.herd_immunity_threshold(params, 0.0)
    assert not valid  # baseline R0 sits above 1/(1-delta)


def test_integration_conserves_population():
    params = episignal.EpiParams()
    state = episignal.CompartmentState()
    state.susceptible = 9850.0
    state.infected = 150.0
    total0 = state.total()
    behavior = episignal.BehaviorRates(0.05, 0.10)
    for _ in range(26):
        state, clamps = episignal.integrate_week(params, behavior, state)
        assert clamps == 0
    assert abs(state.total() - total0) / total0 < 1e-8


def test_game_layer():
    uniform = [0.25, 0.25, 0.25, 0.25]
    pooling = episignal.build_strategy(episignal.EquilibriumKind.POOLING)
    posterior, marginals = episignal.bayes_posterior(pooling, uniform)
    assert approx(marginals[0], 1.0, 1e-12)
    assert all(approx(p, 0.25, 1e-12) for p in posterior[0])

    psi_hat, eta_hat = episignal.estimated_rates(uniform, 0.5)
    assert approx(psi_hat, 0.875, 1e-12)
    assert approx(episignal.pooled_message_posterior(uniform, 0.5)[1], 1.0 / 6.0, 1e-12)


def test_fixed_point():
    params = episignal.EpiParams()
    baseline = episignal.BehaviorRates(5e-5, 0.3)
    prior = [0.30, 0.02, 0.48, 0.20]
    window = episignal.existence_window(params, baseline, 0.2, 0.5, 0.5, prior)
    assert window["lower_bound"] < window["upper_bound"]
    lambda1 = 0.5 * (window["lower_bound"] / (1.0 - prior[1]) + window["upper_bound"])
    alpha, residual = episignal.solve_alpha_fixed_point(params, baseline, lambda1, 0.5, 0.5, prior)
    assert 0.0 < alpha < 1.0
    assert residual < 1e-8


def test_scenario_run():
    config = """
[simulation]
T_weeks = 6
n_runs = 2
equilibrium = separating
[policy]
kind = adaptive
"""
    summary = episignal.run_scenario(config)
    assert summary["runs_total"] == 2
    assert len(summary["mean_rc_by_week"]) == 6
    csv = episignal.run_scenario_csv(config)
    assert csv.startswith("run,week,rc")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"{test.__name__}: ok")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
