"""Named experiment set-ups and the ball initialization around the Nash gains."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .game import GameSpec, GaussianInit, JointPolicy, MixtureInit
from .nash import NashSolution

PRESETS = ("mazumdar", "synthetic", "remark31", "g1")


@dataclass(frozen=True)
class SolverSettings:
    eta: tuple
    iters: int
    rollouts: int = 200
    smoothing: tuple = (0.5, 0.5)
    sigma2: Optional[float] = None


@dataclass(frozen=True)
class ExperimentPreset:
    """A game plus how to initialize and run it.

    Exactly one of ``init_policy`` or ``radius`` is set; ``radius`` means
    draw uniformly from the ball of that radius around the Nash gains using
    ``seed``.
    """

    name: str
    spec: GameSpec
    settings: SolverSettings
    init_policy: Optional[JointPolicy] = None
    radius: Optional[float] = None
    seed: int = 0
    deterministic: bool = False
    notes: tuple = field(default=())

    def initial_policy(self, nash: NashSolution, seed: Optional[int] = None,
                       radius: Optional[float] = None) -> JointPolicy:
        r = self.radius if radius is None else radius
        if r is not None and (radius is not None or self.init_policy is None):
            return init_ball(nash, r, self.seed if seed is None else seed)
        return self.init_policy


def _mazumdar(sigma2: float) -> GameSpec:
    return GameSpec.time_invariant(
        A=[[0.588, 0.028], [0.570, 0.056]],
        B=[[[1.0], [1.0]], [[0.0], [1.0]]],
        Q=[np.diag([0.01, 1.0]), np.diag([1.0, 0.147])],
        R=[[[0.01]], [[0.01]]],
        W=sigma2 * np.eye(2),
        init_law=MixtureInit(points=[[1.0, 1.0], [1.0, 1.1]], probs=[0.5, 0.5]),
        horizon=10,
    )


def _synthetic(sigma2: float) -> GameSpec:
    return GameSpec.time_invariant(
        A=[[0.588, 0.28], [0.57, 0.56]],
        B=[[[1.0], [1.0]], [[0.5], [1.0]]],
        Q=[np.diag([0.5, 1.0]), np.diag([1.0, 0.3])],
        R=[[[1.0]], [[1.0]]],
        W=sigma2 * np.eye(2),
        init_law=GaussianInit(mean=[10.0, 12.0], cov=np.diag([2.0, 3.0])),
        horizon=5,
    )


def _remark31(sigma2: float) -> GameSpec:
    return GameSpec.time_invariant(
        A=0.2 * np.eye(2),
        B=[[[0.1], [0.0]], [[0.0], [-0.1]]],
        Q=[0.1 * np.eye(2), 0.1 * np.eye(2)],
        R=[[[0.3]], [[0.3]]],
        W=sigma2 * np.eye(2),
        init_law=GaussianInit(mean=[0.3, 0.4], cov=np.diag([0.2, 0.3])),
        horizon=1,
    )


def _g1(sigma2: float) -> GameSpec:
    return GameSpec.time_invariant(
        A=1.0, B=[1.0, 1.0], Q=[1.0, 1.0], R=[1.0, 1.0], W=sigma2,
        init_law=GaussianInit(mean=[0.0], cov=[[1.0]]), horizon=1,
    )


def make_preset(name: str, **overrides) -> ExperimentPreset:
    """Build a named preset; ``overrides`` may set ``sigma2`` or any :class:`SolverSettings` field
    as well as ``radius`` and ``seed``."""
    if name == "mazumdar":
        sigma2 = overrides.pop("sigma2", 1.0)
        preset = ExperimentPreset(
            name, _mazumdar(sigma2),
            SolverSettings(eta=(0.1, 0.1), iters=5000, sigma2=sigma2),
            radius=0.25, deterministic=sigma2 == 0,
        )
    elif name == "synthetic":
        sigma2 = overrides.pop("sigma2", 0.1)
        preset = ExperimentPreset(
            name, _synthetic(sigma2),
            SolverSettings(eta=(0.0005, 0.0005), iters=300, rollouts=200,
                           smoothing=(0.5, 0.5), sigma2=sigma2),
            init_policy=JointPolicy.constant([[[0.5, 0.5]], [[0.3, 0.15]]], 5),
            deterministic=sigma2 == 0,
        )
    elif name == "remark31":
        sigma2 = overrides.pop("sigma2", 0.2)
        preset = ExperimentPreset(
            name, _remark31(sigma2),
            SolverSettings(eta=(0.1, 0.1), iters=200, sigma2=sigma2),
            init_policy=JointPolicy.constant([[[0.2, 0.01]], [[0.2, 0.01]]], 1),
            deterministic=sigma2 == 0,
        )
    elif name == "g1":
        sigma2 = overrides.pop("sigma2", 1.0)
        preset = ExperimentPreset(
            name, _g1(sigma2),
            SolverSettings(eta=(0.1, 0.1), iters=100, rollouts=1000,
                           smoothing=(0.05, 0.05), sigma2=sigma2),
            init_policy=JointPolicy.constant([[[0.0]], [[0.0]]], 1),
            deterministic=sigma2 == 0,
        )
    else:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")

    top = {k: overrides.pop(k) for k in ("radius", "seed", "init_policy") if k in overrides}
    if overrides:
        s = dict(overrides)
        for key in ("eta", "smoothing"):
            if key in s and np.isscalar(s[key]):
                s[key] = (float(s[key]),) * preset.spec.num_players
        preset = replace(preset, settings=replace(preset.settings, **s))
    if top:
        preset = replace(preset, **top)
    return preset


def init_ball(nash: NashSolution, r: float, seed: int) -> JointPolicy:
    """Each K_t^i drawn uniformly from the Euclidean ball of radius ``r`` around K_t^{i*}."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    rng = np.random.default_rng(seed)
    gains = []
    for gi in nash.k_star.gains:
        out = []
        for k in gi:
            n = k.size
            direction = rng.standard_normal(n)
            direction /= np.linalg.norm(direction)
            radius = r * rng.random() ** (1.0 / n)
            out.append(k + (radius * direction).reshape(k.shape))
        gains.append(tuple(out))
    return JointPolicy(tuple(gains))
