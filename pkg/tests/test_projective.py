import numpy as np
import pytest

from paritytrack.code import NEIGHBORS
from paritytrack.projective import DECODE_TABLE, ProjectiveConfig, run_idealized


def test_decode_table_restores_single_flips():
    for e in range(8):
        assert DECODE_TABLE[e, e] == e
        for b in range(3):
            assert DECODE_TABLE[e, NEIGHBORS[e, b]] == NEIGHBORS[e, b]


def test_zero_rate_is_perfect():
    r = run_idealized(ProjectiveConfig(0.0, n_cycles=20), 100)
    assert np.all(r.curve.f_mean == 1.0) and r.failure_events == 0


def test_config_validation():
    with pytest.raises(ValueError):
        ProjectiveConfig(1e-3, cycle=0.0)
    with pytest.raises(ValueError):
        ProjectiveConfig(-1.0)
    with pytest.raises(ValueError):
        run_idealized(ProjectiveConfig(1e-3), 0)


def test_failures_need_two_flips():
    r = run_idealized(ProjectiveConfig(5e-3, n_cycles=100, seed=3), 20000)
    assert r.failure_events > 0
    assert r.failures_with_fewer_than_two_flips == 0
    assert r.single_flip_cycles > 0 and r.single_flip_uncorrected == 0
    assert r.curve.times[1] == pytest.approx(4.0)


def test_worker_invariance():
    cfg = ProjectiveConfig(5e-3, n_cycles=50, seed=9)
    a = run_idealized(cfg, 5000, block_size=512)
    b = run_idealized(cfg, 5000, block_size=512, workers=4)
    np.testing.assert_array_equal(a.curve.successes, b.curve.successes)
