"""Game instances, joint feedback policies and model-level constants.

A game is an N-player finite-horizon linear-quadratic game

    x_{t+1} = A_t x_t + sum_i B_t^i u_t^i + w_t,   w_t ~ N(0, W)

where player i pays sum_t x_t' Q_t^i x_t + u_t^i' R_t^i u_t^i plus the
terminal x_T' Q_T^i x_T, and plays linear feedback u_t^i = -K_t^i x_t.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import InvalidSpec

SYM_TOL = 1e-10
PD_TOL = 1e-12
PROB_TOL = 1e-12


def _frozen(a, ndim=2) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim == 0 and ndim == 2:
        arr = arr.reshape(1, 1)
    arr.setflags(write=False)
    return arr


def _sym_eigmin(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((m + m.T) / 2).min())


@dataclass(frozen=True)
class GaussianInit:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen(self.mean, ndim=1).reshape(-1))
        object.__setattr__(self, "cov", _frozen(self.cov))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, self.dim))
        return self.mean + z @ _psd_sqrt(self.cov).T


@dataclass(frozen=True)
class MixtureInit:
    """Finite law: ``points[j]`` is drawn with probability ``probs[j]``."""

    points: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", _frozen(self.probs, ndim=1).reshape(-1))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf / cdf[-1], rng.random(n), side="right")
        return self.points[np.minimum(idx, len(self.probs) - 1)].copy()


InitLaw = Union[GaussianInit, MixtureInit]


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh((m + m.T) / 2)
        return vecs * np.sqrt(np.clip(vals, 0.0, None))


@dataclass(frozen=True)
class GameSpec:
    """Full problem instance.

    ``b_mats[i][t]``, ``q_mats[i][t]`` and ``r_mats[i][t]`` are indexed by
    player first. ``q_mats[i]`` has ``horizon + 1`` entries (terminal last),
    everything else that is time-indexed has ``horizon`` entries.
    """

    num_players: int
    horizon: int
    state_dim: int
    control_dims: tuple
    a_mats: tuple
    b_mats: tuple
    q_mats: tuple
    r_mats: tuple
    noise_cov: np.ndarray
    init_law: InitLaw

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("control_dims", tuple(int(k) for k in self.control_dims))
        set_("a_mats", tuple(_frozen(a) for a in self.a_mats))
        set_("b_mats", tuple(tuple(_frozen(b) for b in bi) for bi in self.b_mats))
        set_("q_mats", tuple(tuple(_frozen(q) for q in qi) for qi in self.q_mats))
        set_("r_mats", tuple(tuple(_frozen(r) for r in ri) for ri in self.r_mats))
        set_("noise_cov", _frozen(self.noise_cov))

    @classmethod
    def time_invariant(cls, A, B: Sequence, Q: Sequence, R: Sequence, W, init_law: InitLaw,
                       horizon: int, Q_terminal: Sequence | None = None) -> "GameSpec":
        """Build a game whose matrices repeat over time (``B``, ``Q``, ``R`` per player)."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = [np.asarray(b, dtype=float).reshape(A.shape[0], -1) for b in B]
        Q = [np.atleast_2d(np.asarray(q, dtype=float)) for q in Q]
        R = [np.atleast_2d(np.asarray(r, dtype=float)) for r in R]
        QT = Q if Q_terminal is None else [np.atleast_2d(np.asarray(q, dtype=float)) for q in Q_terminal]
        T = int(horizon)
        return cls(
            num_players=len(B),
            horizon=T,
            state_dim=A.shape[0],
            control_dims=tuple(b.shape[1] for b in B),
            a_mats=(A,) * T,
            b_mats=tuple((b,) * T for b in B),
            q_mats=tuple((q,) * T + (qt,) for q, qt in zip(Q, QT)),
            r_mats=tuple((r,) * T for r in R),
            noise_cov=np.atleast_2d(np.asarray(W, dtype=float)),
            init_law=init_law,
        )

    def replace(self, **changes) -> "GameSpec":
        from dataclasses import replace
        return replace(self, **changes)

    def with_noise(self, W) -> "GameSpec":
        return self.replace(noise_cov=np.atleast_2d(np.asarray(W, dtype=float)))


@dataclass(frozen=True)
class JointPolicy:
    """Feedback gains ``gains[i][t]`` of shape ``(k_i, d)``."""

    gains: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "gains", tuple(tuple(_frozen(k) for k in gi) for gi in self.gains)
        )

    @classmethod
    def zeros(cls, spec: GameSpec) -> "JointPolicy":
        return cls(tuple(
            tuple(np.zeros((k, spec.state_dim)) for _ in range(spec.horizon))
            for k in spec.control_dims
        ))

    @classmethod
    def constant(cls, gains_per_player: Sequence, horizon: int) -> "JointPolicy":
        return cls(tuple(
            tuple(np.atleast_2d(np.asarray(g, dtype=float)) for _ in range(horizon))
            for g in gains_per_player
        ))

    @property
    def num_players(self) -> int:
        return len(self.gains)

    @property
    def horizon(self) -> int:
        return len(self.gains[0])

    def with_player(self, i: int, gains_i) -> "JointPolicy":
        """Replace player ``i``'s gains, keep everyone else's."""
        gains = list(self.gains)
        gains[i] = tuple(gains_i)
        return JointPolicy(tuple(gains))

    def mixed(self, other: "JointPolicy", i: int) -> "JointPolicy":
        """Player ``i`` plays ``self``; all others play ``other``."""
        return other.with_player(i, self.gains[i])

    def distance(self, other: "JointPolicy") -> float:
        return max(
            float(np.linalg.norm(a - b))
            for ga, gb in zip(self.gains, other.gains)
            for a, b in zip(ga, gb)
        )

    def is_finite(self) -> bool:
        return all(np.isfinite(k).all() for gi in self.gains for k in gi)


@dataclass(frozen=True)
class ModelConstants:
    sigma_x: float
    sigma_r_min: float
    sigma_q_min: float
    gamma_a: float
    gamma_b: float
    gamma_r: float
    sigma_r_per_player: tuple = field(default=())
    sigma_q_per_player: tuple = field(default=())


@dataclass(frozen=True)
class Violation:
    assumption: str
    message: str

    def __str__(self):
        return f"[{self.assumption}] {self.message}"


@dataclass
class ValidationReport:
    """Violations make a spec invalid; warnings do not."""

    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def errors(self):
        return self.violations

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def messages(self) -> list:
        return [v.message for v in self.violations]


def _check_spd(m: np.ndarray, name: str, assumption: str, report: ValidationReport,
               warn_only_semidefinite: bool = False) -> None:
    if not np.isfinite(m).all():
        report.violations.append(Violation(assumption, f"{name} has non-finite entries"))
        return
    if np.max(np.abs(m - m.T), initial=0.0) > SYM_TOL:
        report.violations.append(Violation(assumption, f"{name} not symmetric"))
        return
    lam = _sym_eigmin(m)
    if lam > PD_TOL:
        return
    if warn_only_semidefinite and lam >= -PD_TOL:
        report.warnings.append(Violation(
            assumption, f"{name} only positive semidefinite (deterministic mode)"))
    else:
        report.violations.append(Violation(assumption, f"{name} not positive definite"))


def validate_spec(spec: GameSpec) -> ValidationReport:
    """Check dimensions and the cost/noise/initial-law assumptions.

    A singular but PSD noise covariance (e.g. ``W = 0``) is only a warning,
    as is a non-Gaussian initial law.
    """
    rep = ValidationReport()
    dim = "dimensions"
    N, T, d = spec.num_players, spec.horizon, spec.state_dim
    if N < 1 or T < 1 or d < 1:
        rep.violations.append(Violation(dim, "num_players, horizon and state_dim must be positive"))
        return rep
    ks = spec.control_dims
    if len(ks) != N or any(k < 1 for k in ks):
        rep.violations.append(Violation(dim, "control_dims must list one positive size per player"))
        return rep
    if len(spec.a_mats) != T:
        rep.violations.append(Violation(dim, f"expected {T} A matrices, got {len(spec.a_mats)}"))
    for t, a in enumerate(spec.a_mats):
        if a.shape != (d, d):
            rep.violations.append(Violation(dim, f"A_{t} has shape {a.shape}, expected {(d, d)}"))
    for name, mats, n_t, shape in (
        ("B", spec.b_mats, T, lambda k: (d, k)),
        ("Q", spec.q_mats, T + 1, lambda k: (d, d)),
        ("R", spec.r_mats, T, lambda k: (k, k)),
    ):
        if len(mats) != N:
            rep.violations.append(Violation(dim, f"{name} given for {len(mats)} players, expected {N}"))
            continue
        for i, mi in enumerate(mats):
            if len(mi) != n_t:
                rep.violations.append(Violation(dim, f"{name}^{i} has {len(mi)} entries, expected {n_t}"))
                continue
            for t, m in enumerate(mi):
                if m.shape != shape(ks[i]):
                    rep.violations.append(Violation(
                        dim, f"{name}_{t}^{i} has shape {m.shape}, expected {shape(ks[i])}"))
    if spec.noise_cov.shape != (d, d):
        rep.violations.append(Violation(dim, f"W has shape {spec.noise_cov.shape}, expected {(d, d)}"))
    law = spec.init_law
    if law.dim != d:
        rep.violations.append(Violation(dim, f"initial law has dimension {law.dim}, expected {d}"))
    if isinstance(law, GaussianInit) and law.cov.shape != (d, d):
        rep.violations.append(Violation(dim, "initial covariance has wrong shape"))
    if isinstance(law, MixtureInit) and law.points.shape[0] != law.probs.shape[0]:
        rep.violations.append(Violation(dim, "mixture points and probabilities differ in length"))
    if rep.violations:
        return rep

    for i in range(N):
        for t, q in enumerate(spec.q_mats[i]):
            _check_spd(q, f"Q_{t}^{i}", "cost", rep)
        for t, r in enumerate(spec.r_mats[i]):
            _check_spd(r, f"R_{t}^{i}", "cost", rep)
    _check_spd(spec.noise_cov, "W", "noise", rep, warn_only_semidefinite=True)

    if isinstance(law, MixtureInit):
        p = law.probs
        if (p < 0).any() or abs(p.sum() - 1.0) > PROB_TOL:
            rep.violations.append(Violation("initial state", "mixture probabilities must be >= 0 and sum to 1"))
            return rep
        rep.warnings.append(Violation("initial state", "initial law is not Gaussian"))
    elif (np.max(np.abs(law.cov - law.cov.T), initial=0.0) > SYM_TOL
          or _sym_eigmin(law.cov) < -PD_TOL):
        rep.violations.append(Violation("initial state", "initial covariance not symmetric PSD"))
        return rep
    _check_spd(second_moment(law), "E[x0 x0']", "initial state", rep)
    return rep


def ensure_valid(spec: GameSpec) -> ValidationReport:
    rep = validate_spec(spec)
    if not rep.ok:
        raise InvalidSpec(rep)
    return rep


def second_moment(law: InitLaw) -> np.ndarray:
    """E[x0 x0'] of the initial law."""
    if isinstance(law, GaussianInit):
        m = law.cov + np.outer(law.mean, law.mean)
    else:
        m = np.einsum("j,ja,jb->ab", law.probs, law.points, law.points)
    return (m + m.T) / 2


def _sigma_min(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False).min())


def _spec_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def model_constants(spec: GameSpec) -> ModelConstants:
    ensure_valid(spec)
    sigma_x = min(_sigma_min(second_moment(spec.init_law)), _sigma_min(spec.noise_cov))
    sr = tuple(min(_sigma_min(r) for r in ri) for ri in spec.r_mats)
    sq = tuple(min(_sigma_min(q) for q in qi) for qi in spec.q_mats)
    return ModelConstants(
        sigma_x=sigma_x,
        sigma_r_min=min(sr),
        sigma_q_min=min(sq),
        gamma_a=max(_spec_norm(a) for a in spec.a_mats),
        gamma_b=max(_spec_norm(b) for bi in spec.b_mats for b in bi),
        gamma_r=max(_spec_norm(r) for ri in spec.r_mats for r in ri),
        sigma_r_per_player=sr,
        sigma_q_per_player=sq,
    )


def closed_loop(spec: GameSpec, policy: JointPolicy, t: int) -> np.ndarray:
    """A_t - sum_i B_t^i K_t^i."""
    if not 0 <= t < spec.horizon:
        raise IndexError(f"t={t} outside [0, {spec.horizon - 1}]")
    m = spec.a_mats[t].copy()
    for i in range(spec.num_players):
        m -= spec.b_mats[i][t] @ policy.gains[i][t]
    return m


def check_policy(spec: GameSpec, policy: JointPolicy) -> None:
    if policy.num_players != spec.num_players or policy.horizon != spec.horizon:
        raise ValueError("policy does not match game (players or horizon)")
    for i, gi in enumerate(policy.gains):
        for t, k in enumerate(gi):
            if k.shape != (spec.control_dims[i], spec.state_dim):
                raise ValueError(f"K_{t}^{i} has shape {k.shape}")


def random_spec(rng: np.random.Generator, num_players: int, state_dim: int, horizon: int,
                control_dims: Sequence[int] | None = None, a_scale: float = 0.6,
                b_scale: float = 0.6) -> GameSpec:
    """Random well-posed game with time-varying matrices, for tests and sweeps."""
    N, d, T = num_players, state_dim, horizon
    ks = tuple(control_dims) if control_dims is not None else tuple(
        int(rng.integers(1, d + 1)) for _ in range(N))

    def spd(n, lo=0.2):
        g = rng.standard_normal((n, n))
        return g @ g.T / n + lo * np.eye(n)

    mean = rng.standard_normal(d) * 0.5
    return GameSpec(
        num_players=N,
        horizon=T,
        state_dim=d,
        control_dims=ks,
        a_mats=tuple(a_scale * rng.standard_normal((d, d)) for _ in range(T)),
        b_mats=tuple(tuple(b_scale * rng.standard_normal((d, k)) for _ in range(T)) for k in ks),
        q_mats=tuple(tuple(spd(d) for _ in range(T + 1)) for _ in ks),
        r_mats=tuple(tuple(spd(k) for _ in range(T)) for k in ks),
        noise_cov=spd(d, 0.1) * 0.3,
        init_law=GaussianInit(mean, spd(d, 0.3)),
    )


def random_policy(rng: np.random.Generator, spec: GameSpec, scale: float = 0.3,
                  around: JointPolicy | None = None) -> JointPolicy:
    gains = []
    for i, k in enumerate(spec.control_dims):
        base = around.gains[i] if around is not None else [np.zeros((k, spec.state_dim))] * spec.horizon
        gains.append(tuple(b + scale * rng.standard_normal((k, spec.state_dim)) for b in base))
    return JointPolicy(tuple(gains))
