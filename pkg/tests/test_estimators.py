import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from paritytrack.estimators import FidelityDecayRegressor, TrackingFilter
from paritytrack.filters import FilterSpec, run_batch
from paritytrack.trajectory import SimConfig, block_rng, generate_batch, synthesize_batch


@pytest.fixture(scope="module")
def data():
    cfg = SimConfig(mu=1e-3, n_steps=800, seed=3)
    rng = block_rng(3, 0)
    codes = generate_batch(cfg, 8, rng)
    return codes, synthesize_batch(codes, cfg, rng)


def test_auto_parameters_resolve(data):
    tf = TrackingFilter("double", mu=1e-3).fit()
    assert tf.dt_box_ == pytest.approx(19.28, rel=1e-3) and 0.4 < tf.a_ < 0.5
    tf = TrackingFilter("boxcar", mu=1e-3, dt_box=5.0).fit()
    assert tf.spec_ == FilterSpec("boxcar", 5.0)


def test_transform_matches_run_batch(data):
    codes, sig = data
    tf = TrackingFilter("halfbox", mu=1e-3, dt_box=4.0).fit()
    np.testing.assert_array_equal(tf.transform(sig), run_batch(FilterSpec("halfbox", 4.0), sig, mu=1e-3))
    assert tf.transform(sig[0]).shape == (1, 800)
    np.testing.assert_array_equal(tf.predict(sig), tf.transform(sig)[:, -1])
    assert 0.5 < tf.score(sig, codes) <= 1.0


def test_not_fitted_and_bad_input(data):
    codes, sig = data
    with pytest.raises(NotFittedError):
        TrackingFilter().transform(sig)
    tf = TrackingFilter().fit()
    with pytest.raises(ValueError):
        tf.transform(np.ones((3, 800)))
    with pytest.raises(ValueError):
        TrackingFilter(mu=0.0).fit()


def test_clone_keeps_params():
    tf = TrackingFilter("halfbox", mu=2e-3, dt_box=7.0)
    assert clone(tf).get_params() == tf.get_params()


def test_decay_regressor():
    t = np.linspace(10, 200, 40)
    f = 1 - 0.02 - 1e-4 * (t - 5.0)
    r = FidelityDecayRegressor(anchor=5.0).fit(t, f)
    assert r.gamma_ == pytest.approx(1e-4) and r.delta_f_in_ == pytest.approx(0.02)
    np.testing.assert_allclose(r.predict(t), f)
    assert r.score(t, f) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        FidelityDecayRegressor().fit([1.0, 2.0], [1.0, 1.0])
