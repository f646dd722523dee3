import math

import pytest

import vlsc


def bern(p):
    return vlsc.Distribution([1.0 - p, p])


def test_spectrum_counts_are_python_ints():
    s = vlsc.iid_spectrum(bern(0.3), 2)
    assert [a.count for a in s.atoms] == [1, 2, 1]
    assert [a.mass for a in s.atoms] == pytest.approx([0.49, 0.42, 0.09], abs=1e-12)
    big = vlsc.iid_spectrum(bern(0.3), 200)
    assert big.total_count() == 2**200


def test_invalid_probs_raise_value_error():
    with pytest.raises(ValueError, match="probs"):
        vlsc.Distribution([0.5, 0.6])
    assert issubclass(vlsc.ValidationError, ValueError)


def test_tradeoff_and_threshold():
    uniform = vlsc.iid_spectrum(vlsc.Distribution([0.5, 0.5]), 2)
    p = vlsc.optimal_tradeoff(uniform, 1, 0.0)
    assert p.M == 2
    assert p.delta_star == pytest.approx(0.5)
    assert vlsc.optimal_threshold(vlsc.iid_spectrum(vlsc.Distribution([0.5, 0.5]), 10), 0.0, 0.0) == 10


def test_code_and_bounds():
    s = vlsc.iid_spectrum(bern(0.3), 2)
    code = vlsc.construct_theorem2_code(s, 0.0)
    assert vlsc.code_overflow(code, 2) == pytest.approx(0.51, abs=1e-12)
    assert vlsc.validate_counting_condition(code) == (True, None)
    for r in vlsc.sandwich_sweep(vlsc.iid_spectrum(bern(0.3), 100), 0.1, [80.0, 88.0, 95.0], 0.02):
        assert r.lower <= r.exact_code_overflow <= r.upper


def test_asymptotics():
    d = bern(0.3)
    h = -(0.3 * math.log2(0.3) + 0.7 * math.log2(0.7))
    assert vlsc.entropy(d) == pytest.approx(h, abs=1e-14)
    assert vlsc.q_upper(0.0) == 0.5
    assert vlsc.q_upper(vlsc.q_upper_inv(0.2)) == pytest.approx(0.2, abs=1e-12)
    assert vlsc.second_order_threshold(d, 0.1, 0.1, 0.5) == math.inf
    r2, kpv = vlsc.mean_length_constants(d, 0.1)
    assert r2 == pytest.approx(0.9 * h)
    assert kpv < 0


def test_optimistic_study():
    rep = vlsc.optimistic_study(bern(0.2), bern(0.4), 0.05, 0.05, [2**k for k in range(1, 11)])
    assert rep.liminf_estimate <= rep.limsup_estimate
    assert [p.component for p in rep.points[:4]] == [2, 1, 2, 1]


def test_sampling_is_reproducible():
    d = bern(0.3)
    assert vlsc.sample_sequences(d, 5, 10, 7) == vlsc.sample_sequences(d, 5, 10, 7)
