"""Hypothesis strategies for random well-posed games."""
import numpy as np
from hypothesis import strategies as st

from lqgame.game import random_policy, random_spec


@st.composite
def games(draw, max_players=3, max_dim=3, max_horizon=5, min_horizon=1):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_players))
    d = draw(st.integers(1, max_dim))
    T = draw(st.integers(min_horizon, max_horizon))
    rng = np.random.default_rng(seed)
    return random_spec(rng, n, d, T), rng


@st.composite
def games_with_policy(draw, scale=0.3, **kw):
    spec, rng = draw(games(**kw))
    return spec, random_policy(rng, spec, scale=scale), rng
