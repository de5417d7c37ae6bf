import numpy as np
import pytest
from hypothesis import given

from lqgame import JointPolicy, SingularCovariance, evaluate, natural_gradient, smoothness_identity
from lqgame.evaluation import (costs, dominance_sandwich, finite_difference_gradient,
                               sigma_sum_operator_form)
from lqgame.game import GaussianInit, model_constants, random_policy, random_spec
from lqgame.nash import solve_nash
from strategies import games_with_policy


def test_g1_costs_by_hand(g1):
    ev = evaluate(g1, JointPolicy.zeros(g1))
    # x1 = x0 + w: cost = 1 + E[x1^2] = 1 + 2
    assert ev.costs == pytest.approx((3.0, 3.0), abs=1e-14)
    assert ev.e_mats[0][0][0, 0] == pytest.approx(-1.0)
    assert ev.grads[0][0][0, 0] == pytest.approx(-2.0)
    np.testing.assert_allclose(ev.sigma_sum, [[3.0]])


def test_costs_shortcut_agrees(mazumdar, rng):
    pol = random_policy(rng, mazumdar, 0.2)
    assert costs(mazumdar, pol) == pytest.approx(evaluate(mazumdar, pol).costs, rel=1e-13)


def test_natural_gradient_is_preconditioned_gradient(mazumdar, rng):
    pol = random_policy(rng, mazumdar, 0.2)
    ev = evaluate(mazumdar, pol)
    for t in (0, 4, 9):
        ng = natural_gradient(mazumdar, ev, 1, t)
        np.testing.assert_allclose(ng, ev.grads[1][t] @ np.linalg.inv(ev.sigma_t[t]), atol=1e-10)


def test_singular_covariance_raises(g1):
    spec = g1.replace(init_law=GaussianInit([0.0], [[1e-14]]), noise_cov=np.array([[0.0]]))
    ev = evaluate(spec, JointPolicy.zeros(spec))
    with pytest.raises(SingularCovariance):
        natural_gradient(spec, ev, 0, 0)


def test_operator_form_small_case(g1):
    pol = JointPolicy.constant([[[0.1]], [[0.2]]], 1)
    np.testing.assert_allclose(sigma_sum_operator_form(g1, pol), evaluate(g1, pol).sigma_sum)


@given(games_with_policy(max_horizon=4, min_horizon=2))
def test_operator_form_matches_recursion(case):
    spec, pol, _ = case
    np.testing.assert_allclose(sigma_sum_operator_form(spec, pol), evaluate(spec, pol).sigma_sum,
                               rtol=1e-10, atol=1e-10)


@given(games_with_policy(max_players=2, max_dim=2, max_horizon=3))
def test_gradient_matches_finite_differences(case):
    spec, pol, rng = case
    ev = evaluate(spec, pol)
    i, t = int(rng.integers(spec.num_players)), int(rng.integers(spec.horizon))
    g = ev.grads[i][t]
    fd = finite_difference_gradient(spec, pol, i, t)
    assert np.abs(fd - g).max() <= max(1e-6, 1e-4 * np.linalg.norm(g))


@given(games_with_policy(max_players=3, max_dim=3, max_horizon=4))
def test_smoothness_identity(case):
    spec, pol, rng = case
    i = int(rng.integers(spec.num_players))
    new = random_policy(rng, spec, 0.2, around=pol).gains[i]
    lhs, rhs = smoothness_identity(spec, pol, new, i)
    assert abs(lhs - rhs) <= 1e-8 * (1 + abs(lhs))


@given(games_with_policy())
def test_value_and_covariance_bounds(case):
    spec, pol, _ = case
    ev = evaluate(spec, pol)
    c = model_constants(spec)
    s_norm = np.linalg.norm(ev.sigma_sum, 2)
    for i in range(spec.num_players):
        ci = ev.costs[i]
        sq = c.sigma_q_per_player[i]
        for p in ev.p_k[i]:
            assert np.linalg.norm(p, 2) <= ci / c.sigma_x * (1 + 1e-10)
        assert s_norm <= ci / sq * (1 + 1e-10)


def test_dominance_sandwich_orders(rng):
    spec = random_spec(rng, 2, 2, 3)
    nash = solve_nash(spec)
    for _ in range(20):
        pol = random_policy(rng, spec, 0.3, around=nash.k_star)
        lo, gap, hi = dominance_sandwich(spec, pol, nash, 1)
        assert -1e-12 <= lo <= gap + 1e-12
        assert gap <= hi + 1e-12


def test_dominance_sandwich_zero_at_nash(mazumdar):
    nash = solve_nash(mazumdar)
    lo, gap, hi = dominance_sandwich(mazumdar, nash.k_star, nash, 0)
    assert abs(lo) < 1e-16 and abs(gap) < 1e-12 and abs(hi) < 1e-16


def test_finite_difference_rejects_bad_step(g1):
    with pytest.raises(ValueError):
        finite_difference_gradient(g1, JointPolicy.zeros(g1), 0, 0, h=0.0)
