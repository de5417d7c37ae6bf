"""Model-based natural policy gradient with simultaneous updates, and its theory constants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import AlphaNonpositive, Diverged
from .evaluation import PolicyEvaluation, evaluate
from .game import GameSpec, JointPolicy, model_constants
from .nash import NashSolution

CONVERGED = "Converged"
MAX_ITERS = "MaxIters"
DIVERGED = "Diverged"

DIVERGENCE_FACTOR = 1e8
DEFAULT_DELTA = 0.01

Eta = Union[float, Sequence[float]]


def _etas(eta: Eta, n: int) -> tuple:
    if np.isscalar(eta):
        etas = (float(eta),) * n
    else:
        etas = tuple(float(e) for e in eta)
        if len(etas) != n:
            raise ValueError(f"need {n} step sizes, got {len(etas)}")
    if any(e <= 0 for e in etas):
        raise ValueError("step sizes must be positive")
    return etas


@dataclass
class NpgTrace:
    """Per-iteration record of a policy-gradient run; row ``m`` is iterate ``K^(m)``."""

    costs: np.ndarray  # (iters + 1, N)
    normalized_errors: Optional[np.ndarray]
    max_e_norm: np.ndarray
    status: str
    policy: JointPolicy
    snapshots: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.costs) - 1

    def error_at(self, m: int) -> np.ndarray:
        """Normalized errors at iteration ``m`` (the last row if the run stopped earlier)."""
        return self.normalized_errors[min(m, self.iterations)]


def normalized_error(spec: GameSpec, policy: JointPolicy, nash: NashSolution) -> np.ndarray:
    """(C^i(K) - C^i(K*)) / C^i(K*) per player, unclamped."""
    c = np.asarray(evaluate(spec, policy).costs)
    cs = np.asarray(nash.eq_costs)
    return (c - cs) / cs


def npg_update(policy: JointPolicy, ev: PolicyEvaluation, etas: Sequence[float]) -> JointPolicy:
    return JointPolicy(tuple(
        tuple(k - 2.0 * etas[i] * e for k, e in zip(policy.gains[i], ev.e_mats[i]))
        for i in range(policy.num_players)
    ))


def npg_step(spec: GameSpec, policy: JointPolicy, eta: Eta) -> JointPolicy:
    """One simultaneous step K_t^i <- K_t^i - 2 eta_i E_{t,i}, E taken at the current policy."""
    ev = evaluate(spec, policy)
    return npg_update(policy, ev, _etas(eta, spec.num_players))


class _Recorder:
    def __init__(self, nash, snapshot_every):
        self.costs, self.errs, self.enorm = [], [], []
        self.nash = nash
        self.snapshot_every = snapshot_every
        self.snapshots = {}

    def record(self, m, policy, costs, e_norm):
        self.costs.append(costs)
        self.enorm.append(e_norm)
        if self.nash is not None:
            cs = np.asarray(self.nash.eq_costs)
            self.errs.append((np.asarray(costs) - cs) / cs)
        if self.snapshot_every and m % self.snapshot_every == 0:
            self.snapshots[m] = policy

    def trace(self, status, policy):
        errs = np.array(self.errs) if self.nash is not None else None
        return NpgTrace(np.array(self.costs), errs, np.array(self.enorm), status, policy,
                        self.snapshots)


def converged(costs, e_norm, nash, tol) -> bool:
    if nash is not None:
        cs = np.asarray(nash.eq_costs)
        return float(np.sum(np.abs(np.asarray(costs) - cs) / cs)) <= tol
    return e_norm <= tol


def diverged(costs, initial_costs) -> bool:
    c = np.asarray(costs)
    return (not np.isfinite(c).all()) or bool(np.any(c > DIVERGENCE_FACTOR * np.asarray(initial_costs)))


def run_npg(spec: GameSpec, init_policy: JointPolicy, eta: Eta, max_iters: int,
            nash: Optional[NashSolution] = None, tol: float = 1e-8,
            snapshot_every: int = 0) -> NpgTrace:
    """Algorithm with known model: iterate :func:`npg_step` and record the trace.

    Stops with ``Converged`` once the summed relative cost gap to ``nash``
    (or, without ``nash``, the largest ``||E||``) is at most ``tol``.
    """
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
        if converged(ev.costs, e_norm, nash, tol):
            return rec.trace(CONVERGED, policy)
        if m == max_iters:
            break
        policy = npg_update(policy, ev, etas)
        try:
            ev = evaluate(spec, policy)
        except Diverged:
            return rec.trace(DIVERGED, policy)
    return rec.trace(MAX_ITERS, policy)


def best_response_gap(spec: GameSpec, policy: JointPolicy, nash: NashSolution, i: int) -> float:
    """C^i(K^i, K^{-i*}) - C^i(K*)."""
    mixed = policy.mixed(nash.k_star, i)
    return evaluate(spec, mixed).costs[i] - nash.eq_costs[i]


def total_gap(spec: GameSpec, policy: JointPolicy, nash: NashSolution) -> float:
    return sum(best_response_gap(spec, policy, nash, i) for i in range(spec.num_players))


@dataclass(frozen=True)
class AssumptionReport:
    rho_star: float
    delta: float
    psi: float
    rho_bar: float
    lhs: float
    rhs: float
    satisfied: bool
    alpha_hat: float
    epsilon: float
    iteration_bound: float
    I1: float
    I2: float
    eta_bound: float
    rho_k: float
    sigma_x: float
    sigma_star_norm: float

    def as_dict(self) -> dict:
        from dataclasses import asdict
        return asdict(self)


def _geom(rho: float, T: int) -> float:
    # (rho^{2T} - 1) / (rho^2 - 1), with the rho -> 1 limit
    r2 = rho * rho
    if abs(r2 - 1.0) < 1e-14:
        return float(T)
    return (r2 ** T - 1.0) / (r2 - 1.0)


def rho_of(spec, consts, gaps, rho_star) -> float:
    """Radius bound built from the largest best-response gap."""
    T, N = spec.horizon, spec.num_players
    worst = max(max(gaps), 0.0)
    return rho_star + N * consts.gamma_b * math.sqrt(T * worst / (consts.sigma_x * consts.sigma_r_min)) \
        + 1.0 / (20 * T * T)


def step_size_bounds(spec: GameSpec, policy: JointPolicy, nash: NashSolution,
                     delta: float = DEFAULT_DELTA):
    """Step-size components (I1, I2, rho_K) of the one-step contraction at ``policy``."""
    c = model_constants(spec)
    T, N, d = spec.horizon, spec.num_players, spec.state_dim
    ms_star = evaluate(spec, nash.k_star).closed_loops
    rho_star = max(max(float(np.linalg.norm(m, 2)) for m in ms_star), 1.0 + delta)
    br_costs = [evaluate(spec, policy.mixed(nash.k_star, i)).costs[i] for i in range(N)]
    gaps = [bc - cs for bc, cs in zip(br_costs, nash.eq_costs)]
    rho_k = rho_of(spec, c, gaps, rho_star)
    ev = evaluate(spec, policy)
    max_grad = max(float(np.linalg.norm(g, 2)) for gi in ev.grads for g in gi)
    sum_c = sum(br_costs)
    sx, sq, gb, gr = c.sigma_x, c.sigma_q_min, c.gamma_b, c.gamma_r
    w_norm = float(np.linalg.norm(spec.noise_cov, 2))

    denom1 = (20 * T * rho_k * _geom(rho_k, T) * (sum_c + sq * T * w_norm) * gb * max_grad
              + sq * sx ** 2 + 4 * (gr * sx + gb ** 2 * sum_c) * sum_c)
    I1 = sq * sx ** 2 / denom1

    scale = 10 * T * sum_c / ((10 * T - 1) * sq)
    mix = gr + gb ** 2 * sum_c / sx
    denom2 = max(spec.control_dims) * scale * mix + (2 * d / sx) * scale ** 2 * mix ** 2
    numer2 = d / (80 * sx) * (10 * T * min(nash.eq_costs) / ((10 * T - 1) * sq)) ** 2
    I2 = numer2 / denom2
    return I1, I2, rho_k


def check_assumptions(spec: GameSpec, init_policy: JointPolicy, nash: NashSolution,
                      epsilon: float, delta: float = DEFAULT_DELTA,
                      strict: bool = False) -> AssumptionReport:
    """Evaluate the system-noise condition, contraction rate, iteration bound and step-size bounds.

    With ``strict=True`` an :class:`AlphaNonpositive` carrying the report is
    raised when the rate constant is not positive.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    c = model_constants(spec)
    T, N, d = spec.horizon, spec.num_players, spec.state_dim
    ev_star = evaluate(spec, nash.k_star)
    rho_star = max(max(float(np.linalg.norm(m, 2)) for m in ev_star.closed_loops), 1.0 + delta)
    gaps = [best_response_gap(spec, init_policy, nash, i) for i in range(N)]
    psi = max(gaps)
    rho_bar = rho_of(spec, c, gaps, rho_star)
    sig_norm = float(np.linalg.norm(ev_star.sigma_sum, 2))
    sx, sq, sr, gb = c.sigma_x, c.sigma_q_min, c.sigma_r_min, c.gamma_b

    core = 20 * (N - 1) ** 2 * T ** 2 * d * gb ** 4 * (max(nash.eq_costs) + psi) ** 4 \
        * _geom(rho_bar, T) ** 2
    lhs = sx ** 5 / sig_norm
    rhs = core / (sq ** 2 * sr ** 2)
    alpha_hat = sx * sr / sig_norm - core / (sx ** 4 * sq ** 2 * sr)
    satisfied = bool(lhs > rhs)

    I1, I2, rho_k = step_size_bounds(spec, init_policy, nash, delta)
    eta_bound = min(I1, I2, 1.0 / sr)
    total = sum(gaps)
    if alpha_hat > 0 and total > epsilon:
        bound = float(math.ceil(math.log(total / epsilon) / (alpha_hat * eta_bound)))
    elif alpha_hat > 0:
        bound = 0.0
    else:
        bound = math.inf
    report = AssumptionReport(
        rho_star=rho_star, delta=delta, psi=psi, rho_bar=rho_bar, lhs=lhs, rhs=rhs,
        satisfied=satisfied, alpha_hat=alpha_hat, epsilon=epsilon, iteration_bound=bound,
        I1=I1, I2=I2, eta_bound=eta_bound, rho_k=rho_k, sigma_x=sx, sigma_star_norm=sig_norm,
    )
    if strict and alpha_hat <= 0:
        raise AlphaNonpositive(report)
    return report
