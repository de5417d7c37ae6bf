import numpy as np
import pytest
from hypothesis import given

from lqgame import GameSpec, GaussianInit, SingularPhi, evaluate, solve_nash
from lqgame.nash import equilibrium_cost, riccati_residuals
from lqgame.npg import best_response_gap
from strategies import games


def test_g1_hand_values(g1_nash):
    n = g1_nash
    for i in range(2):
        assert n.k_star.gains[i][0][0, 0] == pytest.approx(1 / 3, abs=1e-12)
        assert n.p_star[i][0][0, 0] == pytest.approx(11 / 9, abs=1e-12)
        assert n.n_star[i][0] == pytest.approx(1.0, abs=1e-12)
        assert n.eq_costs[i] == pytest.approx(20 / 9, abs=1e-12)


def test_single_player_matches_textbook_riccati(rng):
    A = np.array([[1.0, 0.2], [0.0, 0.9]])
    B = np.array([[0.0], [1.0]])
    Q, R = np.diag([1.0, 0.5]), np.array([[0.3]])
    T = 6
    spec = GameSpec.time_invariant(A, [B], [Q], [R], 0.1 * np.eye(2),
                                   GaussianInit([0.0, 0.0], np.eye(2)), T)
    nash = solve_nash(spec)
    P = Q
    for t in range(T - 1, -1, -1):
        K = np.linalg.solve(R + B.T @ P @ B, B.T @ P @ A)
        np.testing.assert_allclose(nash.k_star.gains[0][t], K, atol=1e-12)
        P = Q + A.T @ P @ A - A.T @ P @ B @ K
        np.testing.assert_allclose(nash.p_star[0][t], P, atol=1e-12)


def test_stationarity_at_nash(mazumdar):
    nash = solve_nash(mazumdar)
    ev = evaluate(mazumdar, nash.k_star)
    assert max(np.abs(e).max() for ei in ev.e_mats for e in ei) < 1e-9
    assert riccati_residuals(mazumdar, nash).max() < 1e-12


def test_equilibrium_cost_matches_evaluation(mazumdar):
    nash = solve_nash(mazumdar)
    np.testing.assert_allclose(equilibrium_cost(mazumdar, nash), evaluate(mazumdar, nash.k_star).costs,
                               rtol=1e-12)


def test_unilateral_deviations_do_not_help(mazumdar, rng):
    nash = solve_nash(mazumdar)
    for _ in range(100):
        i = int(rng.integers(2))
        gains = []
        for k in nash.k_star.gains[i]:
            delta = rng.standard_normal(k.shape)
            gains.append(k + 0.1 * rng.random() * delta / np.linalg.norm(delta))
        dev = nash.k_star.with_player(i, gains)
        assert evaluate(mazumdar, dev).costs[i] >= nash.eq_costs[i] - 1e-9


def test_best_response_gap_nonnegative(mazumdar, rng):
    nash = solve_nash(mazumdar)
    assert best_response_gap(mazumdar, nash.k_star, nash, 0) == pytest.approx(0.0, abs=1e-12)


def test_singular_block_system_raises():
    spec = GameSpec.time_invariant(1.0, [10.0, 10.0], [1.0, 1.0], [1e-11, 1e-11], 1.0,
                                   GaussianInit([0.0], [[1.0]]), 1)
    with pytest.raises(SingularPhi) as exc:
        solve_nash(spec)
    assert exc.value.t == 0 and exc.value.condition_estimate > 1e12


@given(games())
def test_riccati_residual_small(case):
    spec, _ = case
    assert riccati_residuals(spec, solve_nash(spec)).max() <= 1e-9
