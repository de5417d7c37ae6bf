"""Nash equilibrium of the LQ game by backward induction on the coupled Riccati system."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularPhi
from .game import GameSpec, JointPolicy, ensure_valid, second_moment

PHI_COND_MAX = 1e12


@dataclass(frozen=True)
class NashSolution:
    k_star: JointPolicy
    p_star: tuple  # p_star[i][t], t = 0..T
    n_star: tuple  # n_star[i][t], t = 0..T
    eq_costs: tuple


def _sym(m):
    return (m + m.T) / 2


def nash_block_system(spec: GameSpec, p_next, t: int):
    """Stacked matrix and right-hand side whose solution is [K_t^1; ...; K_t^N].

    ``p_next[i]`` is player i's value matrix at ``t + 1``.
    """
    ks = spec.control_dims
    offs = np.concatenate([[0], np.cumsum(ks)])
    n = int(offs[-1])
    phi = np.zeros((n, n))
    rhs = np.zeros((n, spec.state_dim))
    a = spec.a_mats[t]
    for i in range(spec.num_players):
        bi = spec.b_mats[i][t]
        btp = bi.T @ p_next[i]
        rows = slice(offs[i], offs[i + 1])
        for j in range(spec.num_players):
            phi[rows, offs[j]:offs[j + 1]] = btp @ spec.b_mats[j][t]
        phi[rows, rows] += spec.r_mats[i][t]
        rhs[rows] = btp @ a
    return phi, rhs, offs


def solve_nash(spec: GameSpec) -> NashSolution:
    ensure_valid(spec)
    N, T = spec.num_players, spec.horizon
    P = [[None] * (T + 1) for _ in range(N)]
    K = [[None] * T for _ in range(N)]
    for i in range(N):
        P[i][T] = np.array(spec.q_mats[i][T])
    for t in range(T - 1, -1, -1):
        phi, rhs, offs = nash_block_system(spec, [P[i][t + 1] for i in range(N)], t)
        cond = np.linalg.cond(phi)
        if not np.isfinite(cond) or cond > PHI_COND_MAX:
            raise SingularPhi(t, float(cond))
        stacked = np.linalg.solve(phi, rhs)
        for i in range(N):
            K[i][t] = stacked[offs[i]:offs[i + 1]]
        m = spec.a_mats[t] - sum(spec.b_mats[j][t] @ K[j][t] for j in range(N))
        for i in range(N):
            p = (spec.q_mats[i][t] + K[i][t].T @ spec.r_mats[i][t] @ K[i][t]
                 + m.T @ P[i][t + 1] @ m)
            P[i][t] = _sym(p)

    W = spec.noise_cov
    n_star = []
    for i in range(N):
        n = [0.0] * (T + 1)
        for t in range(T - 1, -1, -1):
            n[t] = n[t + 1] + float(np.trace(W @ P[i][t + 1]))
        n_star.append(tuple(n))

    sigma0 = second_moment(spec.init_law)
    costs = tuple(float(np.trace(sigma0 @ P[i][0])) + n_star[i][0] for i in range(N))
    return NashSolution(
        k_star=JointPolicy(tuple(tuple(ki) for ki in K)),
        p_star=tuple(tuple(pi) for pi in P),
        n_star=tuple(n_star),
        eq_costs=costs,
    )


def equilibrium_cost(spec: GameSpec, nash: NashSolution) -> tuple:
    """E[x0' P_0^i x0] + N_0^i for every player, via the initial second moment."""
    sigma0 = second_moment(spec.init_law)
    return tuple(
        float(np.trace(sigma0 @ nash.p_star[i][0])) + nash.n_star[i][0]
        for i in range(spec.num_players)
    )


def riccati_residuals(spec: GameSpec, nash: NashSolution) -> np.ndarray:
    """Norm of the per-player fixed-point residual of the Nash gain equation, shape (N, T)."""
    N, T = spec.num_players, spec.horizon
    out = np.zeros((N, T))
    K = nash.k_star.gains
    for t in range(T):
        for i in range(N):
            bi, p = spec.b_mats[i][t], nash.p_star[i][t + 1]
            others = spec.a_mats[t] - sum(spec.b_mats[j][t] @ K[j][t] for j in range(N) if j != i)
            target = np.linalg.solve(spec.r_mats[i][t] + bi.T @ p @ bi, bi.T @ p @ others)
            out[i, t] = np.linalg.norm(K[i][t] - target)
    return out
