"""Model-free natural policy gradient from sphere-smoothed cost samples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import Diverged, SingularCovariance
from .evaluation import evaluate
from .game import GameSpec, JointPolicy, check_policy
from .nash import NashSolution
from .npg import (CONVERGED, DIVERGED, MAX_ITERS, Eta, NpgTrace, _etas, _Recorder,
                  converged, diverged)
from .simulation import draw_inputs, noise_factor, parallel_map, rollout, stream

SIGMA_PD_TOL = 1e-12


@dataclass(frozen=True)
class ZoConfig:
    """``num_traj`` rollouts per player, time step and iteration; radius per player."""

    num_traj: int
    radius: tuple
    ridge: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.num_traj < 1:
            raise ValueError("num_traj must be >= 1")
        r = (float(self.radius),) if np.isscalar(self.radius) else tuple(float(x) for x in self.radius)
        if any(x <= 0 for x in r):
            raise ValueError("smoothing radii must be positive")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        object.__setattr__(self, "radius", r)

    def radius_for(self, i: int) -> float:
        return self.radius[i] if len(self.radius) > 1 else self.radius[0]


@dataclass(frozen=True)
class ZoEstimate:
    grad_hat: tuple  # per time step, (k_i, d)
    sigma_hat: tuple  # per time step, (d, d), before the ridge


def sample_sphere(rows: int, cols: int, r: float, rng: np.random.Generator, n: Optional[int] = None):
    """Uniform draw(s) from the Frobenius sphere of radius ``r``; shape (n, rows, cols) if ``n``."""
    if r <= 0:
        raise ValueError("radius must be positive")
    shape = (1 if n is None else n, rows, cols)
    while True:
        g = rng.standard_normal(shape)
        norms = np.sqrt(np.einsum("nij,nij->n", g, g))
        if (norms > 0).all():
            break
    u = g * (r / norms)[:, None, None]
    return u[0] if n is None else u


def _perturbed_rollout(spec, policy, i, t, cfg, iteration, chol):
    k, d = spec.control_dims[i], spec.state_dim
    L = cfg.num_traj
    rng = stream(cfg.seed, iteration, i, t)
    U = sample_sphere(k, d, cfg.radius_for(i), rng, n=L)
    x0, noise = draw_inputs(spec, rng, L, chol)
    gains = [list(g) for g in policy.gains]
    gains[i][t] = policy.gains[i][t][None] + U
    batch = rollout(spec, gains, x0, noise)
    return U, batch.costs[:, i], batch.states[t]


def zo_estimate(spec: GameSpec, policy: JointPolicy, i: int, cfg: ZoConfig,
                iteration: int) -> ZoEstimate:
    """Gradient and covariance estimates for player ``i``.

    For each time step a separate batch of rollouts perturbs only K_t^i; the
    gradient uses the total realized cost of player i, the covariance the
    state at time t of the same rollouts.
    """
    check_policy(spec, policy)
    chol = noise_factor(spec)
    D = spec.control_dims[i] * spec.state_dim
    r = cfg.radius_for(i)

    def one(t):
        U, c, x = _perturbed_rollout(spec, policy, i, t, cfg, iteration, chol)
        grad = (D / r ** 2) * np.mean(c[:, None, None] * U, axis=0)
        sigma = np.einsum("na,nb->ab", x, x) / x.shape[0]
        return grad, (sigma + sigma.T) / 2

    out = parallel_map(one, list(range(spec.horizon)))
    return ZoEstimate(tuple(g for g, _ in out), tuple(s for _, s in out))


def ridge_inverse_apply(grad: np.ndarray, sigma: np.ndarray, ridge: float, t: int) -> np.ndarray:
    """grad @ inv(sigma + ridge * tr(sigma)/d * I)."""
    d = sigma.shape[0]
    reg = sigma + ridge * np.trace(sigma) / d * np.eye(d)
    if not np.isfinite(reg).all():
        raise Diverged(t, "empirical covariance")
    smin = float(np.linalg.eigvalsh(reg).min())
    if smin < SIGMA_PD_TOL:
        raise SingularCovariance(t, smin)
    return np.linalg.solve(reg, grad.T).T


def zo_step(spec: GameSpec, policy: JointPolicy, etas, cfg: ZoConfig, iteration: int) -> JointPolicy:
    estimates = [zo_estimate(spec, policy, i, cfg, iteration) for i in range(spec.num_players)]
    gains = []
    for i, est in enumerate(estimates):
        gains.append(tuple(
            k - etas[i] * ridge_inverse_apply(g, s, cfg.ridge, t)
            for t, (k, g, s) in enumerate(zip(policy.gains[i], est.grad_hat, est.sigma_hat))
        ))
    return JointPolicy(tuple(gains))


def run_npg_free(spec: GameSpec, init_policy: JointPolicy, eta: Eta, max_iters: int,
                 cfg: ZoConfig, nash: Optional[NashSolution] = None,
                 tol: Optional[float] = None, snapshot_every: int = 0) -> NpgTrace:
    """Sample-based natural gradient loop; exact costs are recorded for reporting only."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    etas = _etas(eta, spec.num_players)
    rec = _Recorder(nash, snapshot_every)
    policy = init_policy
    try:
        ev = evaluate(spec, policy)
    except Diverged:
        return rec.trace(DIVERGED, policy)
    initial = ev.costs
    for m in range(max_iters + 1):
        e_norm = ev.max_e_norm()
        rec.record(m, policy, ev.costs, e_norm)
        if diverged(ev.costs, initial):
            return rec.trace(DIVERGED, policy)
        if tol is not None and converged(ev.costs, e_norm, nash, tol):
            return rec.trace(CONVERGED, policy)
        if m == max_iters:
            break
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                policy = zo_step(spec, policy, etas, cfg, m)
            if not policy.is_finite():
                raise Diverged(0, "policy")
            ev = evaluate(spec, policy)
        except Diverged:
            return rec.trace(DIVERGED, policy)
    return rec.trace(MAX_ITERS, policy)
