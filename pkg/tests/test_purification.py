import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qroute.netmodel import ScenarioParams, build_lattice, sample_edge_states
from qroute.purification import pump_fidelity, purify_edge, purify_network


def test_above_threshold_untouched():
    out = purify_edge(0.9, 100, 0.8)
    assert (out.fidelity, out.capacity, out.rounds) == (0.9, 100, 0)


def test_single_round():
    # one application of F^2 / (F^2 + (1-F)^2) from 0.7: 0.49 / 0.58
    out = purify_edge(0.7, 100, 0.8)
    assert out.rounds == 1
    assert out.capacity == 50
    assert out.fidelity == pytest.approx(0.49 / 0.58)


def test_half_is_a_fixed_point():
    out = purify_edge(0.5, 100, 0.8)
    assert out.capacity == 0
    assert out.rounds >= 1
    assert out.fidelity == pytest.approx(0.5)


def test_capacity_too_small_to_purify():
    out = purify_edge(0.6, 1, 0.8)
    assert out.capacity == 0 and out.rounds == 0


def test_pump_monotone_above_half():
    fs = np.linspace(0.51, 0.99, 30)
    assert all(pump_fidelity(f) > f for f in fs)
    assert pump_fidelity(0.5) == pytest.approx(0.5)
    assert pump_fidelity(1.0) == 1.0


@given(fidelity=st.floats(0.0, 1.0), capacity=st.integers(0, 10_000),
       low=st.floats(0.05, 0.95), high=st.floats(0.05, 0.95))
@settings(max_examples=200, deadline=None)
def test_threshold_monotonicity(fidelity, capacity, low, high):
    # raising the threshold never increases the surviving capacity
    lo, hi = min(low, high), max(low, high)
    assert purify_edge(fidelity, capacity, hi).capacity <= purify_edge(fidelity, capacity, lo).capacity


@given(fidelity=st.floats(0.0, 1.0), capacity=st.integers(0, 10_000),
       f_th=st.floats(0.05, 0.99))
@settings(max_examples=200, deadline=None)
def test_outcome_invariants(fidelity, capacity, f_th):
    out = purify_edge(fidelity, capacity, f_th)
    assert out.capacity <= capacity
    assert out.fidelity >= fidelity or out.capacity == 0
    if out.capacity > 0:
        assert out.fidelity >= f_th


def _initialized(seed=0, f_mean=0.8, f_std=0.1):
    params = ScenarioParams(f_mean=f_mean, f_std=f_std)
    return sample_edge_states(build_lattice(8, 8), params, np.random.default_rng(seed)), params


def test_purify_network_threshold_zero_is_noop():
    net, _ = _initialized()
    # f_th = 0 is below every sampled fidelity, so nothing changes but the phase
    out = purify_network(net, 0.0)
    assert [(e.capacity, e.fidelity) for e in out.edges] == \
           [(e.capacity, e.fidelity) for e in net.edges]
    assert out.phase == "purified"


def test_purify_network_perfect_fidelities_noop():
    net, _ = _initialized(f_mean=1.0, f_std=0.0)
    out = purify_network(net, 0.9)
    assert all(o.capacity == e.capacity for o, e in zip(out.edges, net.edges))


def test_purify_network_survivors_meet_threshold():
    net, _ = _initialized(seed=3)
    out = purify_network(net, 0.8)
    for e in out.edges:
        if e.active:
            assert e.fidelity >= 0.8 and e.capacity >= 1
        assert e.capacity == 0 or e.capacity <= net.edge_map()[e.key].capacity


def test_purify_network_deterministic_and_phase_guard():
    net, _ = _initialized(seed=9)
    assert purify_network(net, 0.8) == purify_network(net, 0.8)
    with pytest.raises(ValueError):
        purify_network(purify_network(net, 0.8), 0.8)


def test_baseline_survival_statistics():
    # N(0.9, 0.1) fidelities, F_th=0.8, l_max=10 downstream: the vast majority
    # of the 112 edges keep enough capacity; some loss remains possible
    survivors = []
    for seed in range(30):
        params = ScenarioParams(f_mean=0.9, f_std=0.1)
        net = sample_edge_states(build_lattice(8, 8), params, np.random.default_rng(seed))
        out = purify_network(net, 0.8)
        survivors.append(sum(1 for e in out.edges if e.active and e.capacity >= 10))
    mean = np.mean(survivors)
    assert 100.0 <= mean <= 112.0
