import numpy as np
import pytest

from lqgame import GameSpec, GaussianInit, InvalidSpec, JointPolicy, MixtureInit, make_preset
from lqgame.game import (closed_loop, ensure_valid, model_constants, random_spec, second_moment,
                         validate_spec)


def test_g1_is_valid(g1):
    rep = validate_spec(g1)
    assert rep.ok and not rep.warnings


def test_arrays_are_read_only(g1):
    with pytest.raises(ValueError):
        g1.a_mats[0][0, 0] = 2.0


def test_time_invariant_shapes():
    spec = make_preset("mazumdar").spec
    assert spec.horizon == 10
    assert len(spec.a_mats) == 10
    assert len(spec.q_mats[0]) == 11
    assert spec.control_dims == (1, 1)
    assert spec.b_mats[1][3].shape == (2, 1)


def test_mixture_second_moment():
    law = MixtureInit(points=[[1.0, 1.0], [1.0, 1.1]], probs=[0.5, 0.5])
    np.testing.assert_allclose(second_moment(law), [[1.0, 1.05], [1.05, 1.105]], atol=1e-15)


def test_gaussian_second_moment():
    law = GaussianInit(mean=[1.0, 2.0], cov=np.diag([0.5, 0.25]))
    np.testing.assert_allclose(second_moment(law), [[1.5, 2.0], [2.0, 4.25]])


def test_zero_noise_only_warns():
    rep = validate_spec(make_preset("mazumdar", sigma2=0.0).spec)
    assert rep.ok
    assert any("deterministic" in w.message for w in rep.warnings)


def test_mixture_flagged_as_non_gaussian():
    rep = validate_spec(make_preset("mazumdar").spec)
    assert any("Gaussian" in w.message for w in rep.warnings)


def test_nonpositive_r_is_rejected(g1):
    bad = g1.replace(r_mats=((np.array([[0.0]]),), g1.r_mats[1]))
    rep = validate_spec(bad)
    assert not rep.ok
    assert rep.errors[0].assumption == "cost"
    with pytest.raises(InvalidSpec):
        ensure_valid(bad)


def test_asymmetric_q_is_rejected():
    spec = make_preset("remark31").spec
    q = np.array([[0.1, 0.05], [0.0, 0.1]])
    bad = spec.replace(q_mats=((q, q), spec.q_mats[1]))
    assert not validate_spec(bad).ok


def test_dimension_mismatch_reported(g1):
    bad = g1.replace(a_mats=(np.eye(2),))
    rep = validate_spec(bad)
    assert not rep.ok and rep.errors[0].assumption == "dimensions"


def test_bad_mixture_probabilities():
    spec = make_preset("mazumdar").spec
    bad = spec.replace(init_law=MixtureInit(points=[[1.0, 1.0], [1.0, 1.1]], probs=[0.5, 0.6]))
    assert not validate_spec(bad).ok


def test_singular_initial_second_moment_rejected(g1):
    bad = g1.replace(init_law=GaussianInit(mean=[0.0], cov=[[0.0]]))
    assert not validate_spec(bad).ok


def test_model_constants_remark31():
    c = model_constants(make_preset("remark31").spec)
    assert c.gamma_b == pytest.approx(0.1)
    assert c.sigma_x == pytest.approx(0.2)
    assert c.sigma_r_min == pytest.approx(0.3)
    assert c.sigma_q_min == pytest.approx(0.1)


def test_closed_loop_and_bounds(g1):
    pol = JointPolicy.constant([[[0.25]], [[0.5]]], 1)
    assert closed_loop(g1, pol, 0)[0, 0] == pytest.approx(0.25)
    with pytest.raises(IndexError):
        closed_loop(g1, pol, 1)


def test_policy_helpers(g1):
    a = JointPolicy.zeros(g1)
    b = JointPolicy.constant([[[1.0]], [[2.0]]], 1)
    m = a.mixed(b, 0)
    assert m.gains[0][0][0, 0] == 0.0 and m.gains[1][0][0, 0] == 2.0
    assert a.distance(b) == pytest.approx(2.0)
    assert a.is_finite()


def test_random_spec_validates(rng):
    for _ in range(20):
        assert validate_spec(random_spec(rng, 3, 3, 4)).ok


def test_gaussian_sampling_moments(rng):
    law = GaussianInit(mean=[1.0, -1.0], cov=[[2.0, 0.5], [0.5, 1.0]])
    x = law.sample(rng, 200_000)
    np.testing.assert_allclose(x.mean(0), law.mean, atol=0.02)
    np.testing.assert_allclose(np.cov(x.T), law.cov, atol=0.03)


def test_mixture_sampling_frequencies(rng):
    law = MixtureInit(points=[[0.0], [1.0]], probs=[0.25, 0.75])
    x = law.sample(rng, 100_000)
    assert x.mean() == pytest.approx(0.75, abs=0.01)


def test_spec_is_hashable_dataclass(g1):
    assert isinstance(g1, GameSpec)
    assert g1.with_noise(2.0).noise_cov[0, 0] == 2.0
