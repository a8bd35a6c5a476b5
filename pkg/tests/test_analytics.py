import math

import numpy as np
import pytest

from paritytrack.analytics import (
    ancilla_theory,
    bit2_overlap_integral,
    boxcar_family_drop,
    canonical_filter,
    p2,
    p2_asymptotic,
    p_mis,
    p_mis_asymptotic,
    simplified_scaling,
    theory,
)


def test_p_mis_oracle():
    assert p_mis(0.0, 2.0) == pytest.approx(0.07864960352514258, rel=1e-12)
    assert p_mis(0.0, 10.0) == pytest.approx(0.000782701129001274, rel=1e-12)
    assert p_mis(0.5, 20.0) == pytest.approx(0.012673659338734126, rel=1e-12)
    # below 0.1% near ten tau
    assert p_mis(0.0, 10.0) < 1e-3


def test_p_mis_asymptotic_approaches_exact():
    for x in (20.0, 40.0, 80.0):
        assert p_mis_asymptotic(x) == pytest.approx(p_mis(0.0, x), rel=2.0 / x)


def test_p_mis_rejects_nonpositive_box():
    with pytest.raises(ValueError):
        p_mis(0.0, 0.0)


def test_overlap_integral_oracle():
    o = bit2_overlap_integral(0.0, 10.0)
    assert o.quadrature == pytest.approx(0.17827779494494608, rel=1e-9)
    assert o.approximation == pytest.approx(math.sqrt(1 / (10 * math.pi)), rel=1e-14)
    o = bit2_overlap_integral(0.4, 20.0)
    assert o.quadrature == pytest.approx(0.01550500652179596, rel=1e-9)


def test_overlap_rejects_bad_threshold():
    with pytest.raises(ValueError):
        bit2_overlap_integral(1.5, 10.0)


def test_p2_oracle():
    assert p2(0.0, 15.0) == pytest.approx(0.8543333070866351, rel=1e-9)
    assert p2(0.3, 20.0) == pytest.approx(0.7681094864211824, rel=1e-9)
    assert p2_asymptotic(15.0) == pytest.approx(p2(0.0, 15.0), abs=1e-4)


def test_boxcar_family_drop_oracle():
    assert boxcar_family_drop(1e-3, 13.0) == pytest.approx(0.018794521595344522, rel=1e-9)


@pytest.mark.parametrize(
    "name, x, a, drop, gamma",
    [
        ("bayes", None, 0.0, 0.010534919713613193, 2.3558499866443885e-05),
        ("boxcar", 13.0, 0.0, 0.0195, 0.00019672773205156287),
        ("halfbox", 8.4, 0.0, 0.015910638851831308, 3.667241297086416e-05),
        ("double", 15.0, 0.5, 0.0225, 0.00012726617964602398),
    ],
)
def test_table_oracle(name, x, a, drop, gamma):
    t = theory(name, 1e-3, x, a)
    assert t.delta_f_in == pytest.approx(drop, rel=1e-12)
    assert t.gamma_tau == pytest.approx(gamma, rel=1e-12)
    assert sum(t.terms.values()) == pytest.approx(t.gamma_tau, rel=1e-14)


def test_bayes_prefactor_choice():
    assert theory("bayes", 1e-3, bayes_prefactor="derived").delta_f_in == pytest.approx(0.008807980893867659, rel=1e-12)
    with pytest.raises(ValueError):
        theory("bayes", 1e-3, bayes_prefactor="other")


def test_box_filters_need_length():
    with pytest.raises(ValueError):
        theory("boxcar", 1e-3)
    with pytest.raises(ValueError):
        theory("double", 1e-3, 10.0, a=1.0)


def test_out_of_range_mutau_warns():
    with pytest.warns(RuntimeWarning):
        theory("bayes", 0.5)


def test_aliases():
    assert canonical_filter("Half-Boxcar") == "halfbox"
    assert canonical_filter("double_threshold") == "double"
    with pytest.raises(ValueError):
        canonical_filter("kalman")


def test_fidelity_line():
    t = theory("boxcar", 1e-3, 13.0)
    assert t.fidelity(0.0) == pytest.approx(1 - t.delta_f_in)
    assert t.fidelity(100.0) == pytest.approx(1 - t.delta_f_in - 100 * t.gamma_tau)


def test_simplified_halfbox_row():
    s = simplified_scaling("halfbox", 1e-3)
    log = math.log(1 / 15e-3)
    assert s.dt_over_tau == pytest.approx(2 * log)
    assert s.gamma_tau == pytest.approx(8.4e-6 * log)
    with pytest.warns(RuntimeWarning):
        simplified_scaling("bayes", 1e-2)


def test_ancilla_crude_oracle():
    t = ancilla_theory("idealistic", 1e-3)
    assert t.gamma_tau == pytest.approx(12e-6) and t.delta_f_in == pytest.approx(4e-3)
    t = ancilla_theory("pessimistic", 1e-3)
    assert t.gamma_tau == pytest.approx(0.00031698221281347035, rel=1e-12)
    assert t.cycle_over_tau == pytest.approx(40.824829046386306, rel=1e-12)
    t = ancilla_theory("optimistic", 1e-3)
    assert t.delta_f_in == pytest.approx(0.02763102111592855, rel=1e-12)


def test_ancilla_full_oracle():
    t = ancilla_theory("pessimistic", 1e-3, 8.0, 40.0)
    assert t.delta_f_in == pytest.approx(0.03667773498104727, rel=1e-12)
    assert t.gamma_tau == pytest.approx(0.0003746258225475415, rel=1e-12)
    t = ancilla_theory("optimistic", 1e-3, 5.0, 9.0)
    assert t.gamma_tau == pytest.approx(2.7e-5, rel=1e-12)


def test_ancilla_cycle_too_short():
    with pytest.raises(ValueError):
        ancilla_theory("optimistic", 1e-3, 5.0, 8.0)
    with pytest.raises(ValueError):
        ancilla_theory("pessimistic", 1e-3, 5.0)
    with pytest.raises(ValueError):
        ancilla_theory("magic", 1e-3)


def test_gamma_must_be_nonnegative():
    from paritytrack.analytics import FilterTheory

    with pytest.raises(ValueError):
        FilterTheory("boxcar", 1e-3, 0.01, -1.0)
