"""Seeded stochastic rollouts and Monte-Carlo cost estimates.

Every random draw comes from a stream keyed by ``(seed, *index)``, so a batch
is reproducible no matter which thread produces it or in what order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CholeskyFailure
from .game import GameSpec, JointPolicy, check_policy

MC_BLOCK = 4096


def stream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for the index tuple (e.g. iteration, player, time)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.PCG64(ss))


def num_threads() -> int:
    raw = os.environ.get("LQGAME_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def parallel_map(fn, items: Sequence):
    """Ordered map; the result never depends on the worker count."""
    n = min(num_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def noise_factor(spec: GameSpec) -> np.ndarray:
    """Lower Cholesky factor of W; an all-zero W gives a zero factor (noise-free dynamics)."""
    W = spec.noise_cov
    if not W.any():
        return np.zeros_like(W)
    try:
        return np.linalg.cholesky(W)
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure("noise covariance W is not positive definite") from exc


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray  # (T+1, d)
    controls: tuple  # controls[i] is (T, k_i)
    costs: np.ndarray  # (N,)


@dataclass(frozen=True)
class Batch:
    """``n`` rollouts at once: states (T+1, n, d), controls[i] (T, n, k_i), costs (n, N)."""

    states: np.ndarray
    controls: tuple
    costs: np.ndarray


def draw_inputs(spec: GameSpec, rng: np.random.Generator, n: int, chol: np.ndarray | None = None):
    """Initial states (n, d) then noises (T, n, d), in that order."""
    if chol is None:
        chol = noise_factor(spec)
    x0 = spec.init_law.sample(rng, n)
    z = rng.standard_normal((spec.horizon, n, spec.state_dim))
    return x0, z @ chol.T


def rollout(spec: GameSpec, gains, x0: np.ndarray, noise: np.ndarray) -> Batch:
    """Propagate the dynamics and accumulate every player's realized cost.

    ``gains[i][t]`` is either a shared ``(k_i, d)`` gain or a per-rollout
    ``(n, k_i, d)`` stack.
    """
    T, N = spec.horizon, spec.num_players
    n = x0.shape[0]
    states = np.empty((T + 1, n, spec.state_dim))
    states[0] = x0
    controls = [np.empty((T, n, k)) for k in spec.control_dims]
    costs = np.zeros((n, N))
    x = x0
    for t in range(T):
        nxt = x @ spec.a_mats[t].T + noise[t]
        for i in range(N):
            k = gains[i][t]
            u = -np.einsum("nkd,nd->nk", k, x) if k.ndim == 3 else -(x @ k.T)
            controls[i][t] = u
            nxt += u @ spec.b_mats[i][t].T
            costs[:, i] += np.einsum("na,ab,nb->n", x, spec.q_mats[i][t], x) \
                + np.einsum("na,ab,nb->n", u, spec.r_mats[i][t], u)
        x = nxt
        states[t + 1] = x
    for i in range(N):
        costs[:, i] += np.einsum("na,ab,nb->n", x, spec.q_mats[i][T], x)
    return Batch(states, tuple(controls), costs)


def sample_trajectory(spec: GameSpec, policy: JointPolicy, rng: np.random.Generator) -> Trajectory:
    check_policy(spec, policy)
    x0, noise = draw_inputs(spec, rng, 1)
    b = rollout(spec, policy.gains, x0, noise)
    return Trajectory(b.states[:, 0], tuple(c[:, 0] for c in b.controls), b.costs[0])


def _blocks(num_traj: int, block: int):
    return [(b, min(block, num_traj - b * block)) for b in range((num_traj + block - 1) // block)]


def _mc_batches(spec, policy, num_traj, seed, block):
    check_policy(spec, policy)
    chol = noise_factor(spec)

    def run(item):
        b, size = item
        x0, noise = draw_inputs(spec, stream(seed, b), size, chol)
        return rollout(spec, policy.gains, x0, noise)

    return parallel_map(run, _blocks(num_traj, block))


def mc_cost(spec: GameSpec, policy: JointPolicy, num_traj: int, seed: int,
            block: int = MC_BLOCK) -> list:
    """Per-player ``(mean, stderr)`` of the realized cost over ``num_traj`` rollouts."""
    if num_traj < 2:
        raise ValueError("num_traj must be >= 2")
    c = np.concatenate([b.costs for b in _mc_batches(spec, policy, num_traj, seed, block)])
    mean = c.mean(axis=0)
    se = c.std(axis=0, ddof=1) / np.sqrt(num_traj)
    return [(float(m), float(s)) for m, s in zip(mean, se)]


def mc_second_moments(spec: GameSpec, policy: JointPolicy, num_traj: int, seed: int,
                      block: int = MC_BLOCK):
    """Sample mean and entrywise standard error of x_t x_t', each of shape (T+1, d, d)."""
    xs = np.concatenate([b.states for b in _mc_batches(spec, policy, num_traj, seed, block)], axis=1)
    outer = np.einsum("tna,tnb->tnab", xs, xs)
    return outer.mean(axis=1), outer.std(axis=1, ddof=1) / np.sqrt(num_traj)
