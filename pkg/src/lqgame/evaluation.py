"""Exact evaluation of a joint linear policy: value matrices, covariances, gradients, costs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import Diverged, SingularCovariance
from .game import GameSpec, JointPolicy, check_policy, model_constants, second_moment

SIGMA_PD_TOL = 1e-12


@dataclass(frozen=True)
class PolicyEvaluation:
    p_k: tuple  # p_k[i][t], t = 0..T
    n_k: tuple  # n_k[i][t], t = 0..T
    sigma_t: tuple  # sigma_t[t], t = 0..T
    sigma_sum: np.ndarray
    e_mats: tuple  # e_mats[i][t], t = 0..T-1
    grads: tuple
    costs: tuple
    closed_loops: tuple

    def max_e_norm(self) -> float:
        return max(float(np.linalg.svd(np.stack(ei), compute_uv=False).max()) for ei in self.e_mats)


def closed_loops(spec: GameSpec, policy: JointPolicy) -> list:
    out = []
    for t in range(spec.horizon):
        m = np.array(spec.a_mats[t])
        for i in range(spec.num_players):
            m -= spec.b_mats[i][t] @ policy.gains[i][t]
        out.append(m)
    return out


def value_matrices(spec: GameSpec, policy: JointPolicy, ms: Sequence[np.ndarray]):
    """Backward Lyapunov recursion for every player; returns ``(P, N)`` lists."""
    T, W = spec.horizon, spec.noise_cov
    P_all, N_all = [], []
    for i in range(spec.num_players):
        P = [None] * (T + 1)
        n = [0.0] * (T + 1)
        P[T] = np.array(spec.q_mats[i][T])
        for t in range(T - 1, -1, -1):
            k = policy.gains[i][t]
            p = spec.q_mats[i][t] + k.T @ spec.r_mats[i][t] @ k + ms[t].T @ P[t + 1] @ ms[t]
            P[t] = (p + p.T) / 2
            n[t] = n[t + 1] + float(np.sum(W * P[t + 1]))
        if not np.isfinite(n[0]) or not np.isfinite(P[0]).all():
            bad = [t for t in range(T + 1) if not np.isfinite(P[t]).all()]
            raise Diverged(max(bad, default=0), "value matrix")
        P_all.append(P)
        N_all.append(n)
    return P_all, N_all


def state_covariances(spec: GameSpec, ms: Sequence[np.ndarray]) -> list:
    """Forward propagation of E[x_t x_t'] for t = 0..T."""
    sig = [second_moment(spec.init_law)]
    W = spec.noise_cov
    for t, m in enumerate(ms):
        s = m @ sig[-1] @ m.T + W
        sig.append((s + s.T) / 2)
    if not np.isfinite(sig[-1]).all():
        bad = [t for t, s in enumerate(sig) if not np.isfinite(s).all()]
        raise Diverged(bad[0], "state covariance")
    return sig


def evaluate(spec: GameSpec, policy: JointPolicy) -> PolicyEvaluation:
    """Evaluate ``policy`` exactly. The game is assumed already validated."""
    check_policy(spec, policy)
    N, T = spec.num_players, spec.horizon
    ms = closed_loops(spec, policy)
    P, Nk = value_matrices(spec, policy, ms)
    sig = state_covariances(spec, ms)
    e_mats, grads = [], []
    for i in range(N):
        ei, gi = [], []
        for t in range(T):
            e = (spec.r_mats[i][t] @ policy.gains[i][t]
                 - spec.b_mats[i][t].T @ P[i][t + 1] @ ms[t])
            ei.append(e)
            gi.append(2.0 * e @ sig[t])
        e_mats.append(tuple(ei))
        grads.append(tuple(gi))
    costs = tuple(float(np.sum(sig[0] * P[i][0])) + Nk[i][0] for i in range(N))
    if not all(np.isfinite(costs)):
        raise Diverged(0, "cost")
    return PolicyEvaluation(
        p_k=tuple(tuple(p) for p in P),
        n_k=tuple(tuple(n) for n in Nk),
        sigma_t=tuple(sig),
        sigma_sum=sum(sig),
        e_mats=tuple(e_mats),
        grads=tuple(grads),
        costs=costs,
        closed_loops=tuple(ms),
    )


def costs(spec: GameSpec, policy: JointPolicy) -> tuple:
    """Per-player costs only (cheaper than :func:`evaluate`)."""
    ms = closed_loops(spec, policy)
    P, Nk = value_matrices(spec, policy, ms)
    s0 = second_moment(spec.init_law)
    return tuple(float(np.trace(s0 @ P[i][0])) + Nk[i][0] for i in range(spec.num_players))


def natural_gradient(spec: GameSpec, evaluation: PolicyEvaluation, i: int, t: int) -> np.ndarray:
    """grad_{K_t^i} C^i times the inverse state covariance, which equals 2 E_{t,i}."""
    s = evaluation.sigma_t[t]
    smin = float(np.linalg.eigvalsh(s).min())
    if smin < SIGMA_PD_TOL:
        raise SingularCovariance(t, smin)
    return 2.0 * evaluation.e_mats[i][t]


def _player_gains(policy_prime_i, i):
    if isinstance(policy_prime_i, JointPolicy):
        return policy_prime_i.gains[i]
    return tuple(np.atleast_2d(np.asarray(k, dtype=float)) for k in policy_prime_i)


def smoothness_identity(spec: GameSpec, policy: JointPolicy, policy_prime_i, i: int):
    """Both sides of the exact cost-difference identity for a unilateral deviation.

    ``policy_prime_i`` is player i's new gain sequence (or a joint policy whose
    player-i gains are used). Returns ``(lhs, rhs)``.
    """
    new_gains = _player_gains(policy_prime_i, i)
    deviated = policy.with_player(i, new_gains)
    base = evaluate(spec, policy)
    dev = evaluate(spec, deviated)
    lhs = dev.costs[i] - base.costs[i]
    rhs = 0.0
    for t in range(spec.horizon):
        delta = deviated.gains[i][t] - policy.gains[i][t]
        b = spec.b_mats[i][t]
        g = spec.r_mats[i][t] + b.T @ base.p_k[i][t + 1] @ b
        s = dev.sigma_t[t]
        rhs += float(np.trace(s @ delta.T @ g @ delta)) + 2.0 * float(np.trace(s @ delta.T @ base.e_mats[i][t]))
    return lhs, rhs


def finite_difference_gradient(spec: GameSpec, policy: JointPolicy, i: int, t: int,
                               h: float = 1e-5) -> np.ndarray:
    """Entrywise central differences of C^i with respect to K_t^i."""
    if h <= 0:
        raise ValueError("h must be positive")
    k0 = np.array(policy.gains[i][t])
    out = np.zeros_like(k0)
    for idx in np.ndindex(*k0.shape):
        vals = []
        for sgn in (1.0, -1.0):
            k = k0.copy()
            k[idx] += sgn * h
            gains = list(policy.gains[i])
            gains[t] = k
            vals.append(costs(spec, policy.with_player(i, gains))[i])
        out[idx] = (vals[0] - vals[1]) / (2 * h)
    return out


def sigma_sum_operator_form(spec: GameSpec, policy: JointPolicy) -> np.ndarray:
    """Sum of state second moments assembled from explicit closed-loop products.

    Propagates the initial moment through every prefix product and the noise
    injected at each step through the products that follow it. Used as an
    independent check of the forward recursion in :func:`evaluate`.
    """
    T = spec.horizon
    ms = closed_loops(spec, policy)
    sigma0 = second_moment(spec.init_law)
    W = spec.noise_cov
    d = spec.state_dim

    def prod(s, t):
        # M_t M_{t-1} ... M_s
        out = np.eye(d)
        for u in range(s, t + 1):
            out = ms[u] @ out
        return out

    total = sigma0.copy()
    for t in range(T):
        g = prod(0, t)
        total += g @ sigma0 @ g.T
    for t in range(1, T):
        for s in range(1, t + 1):
            dts = prod(s, t)
            total += dts @ W @ dts.T
    return total + T * W


def dominance_sandwich(spec: GameSpec, policy_i, nash, i: int):
    """Lower bound, gap and upper bound of the gradient-dominance inequality.

    Player i plays ``policy_i`` (gain sequence or joint policy), everyone
    else plays Nash. Returns ``(lower, gap, upper)``.
    """
    consts = model_constants(spec)
    mixed = nash.k_star.with_player(i, _player_gains(policy_i, i))
    ev = evaluate(spec, mixed)
    sigma_star = evaluate(spec, nash.k_star).sigma_sum
    gap = ev.costs[i] - nash.eq_costs[i]
    tr = [float(np.sum(e * e)) for e in ev.e_mats[i]]
    lower = 0.0
    for t in range(spec.horizon):
        b = spec.b_mats[i][t]
        g = spec.r_mats[i][t] + b.T @ ev.p_k[i][t + 1] @ b
        lower += tr[t] / float(np.linalg.norm(g, 2))
    lower *= consts.sigma_x
    upper = float(np.linalg.norm(sigma_star, 2)) / consts.sigma_r_min * sum(tr)
    return lower, gap, upper
