import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from actplace import (ActuatorSet, FiniteHorizon, LinearSystem, PlacementResult,
                      brute_force_min_actuators, brute_force_min_energy, chain_network,
                      compute_bound_F, controlling_set, energy_metric, greedy_min_actuators,
                      is_controllable, marginal_gain, min_actuators_bounded_energy,
                      min_energy_budgeted, node_gramians)
from actplace.errors import (CertificationError, ControllabilityError, InfeasibleError,
                             ParameterError)
from actplace.placement import PerturbedFactorization, bound_F_terms, certification_gap
from actplace.system import assemble_gramian
from conftest import random_system
from oracles import trace_inverse

E_15 = 335943.82992805338  # tr(W^-1) of the chain actuated at {1, 5}


def zero_dynamics(n):
    return node_gramians(LinearSystem(np.zeros((n, n)), FiniteHorizon(0.0, 1.0)))


def test_marginal_gain_on_zero_dynamics():
    g = zero_dynamics(2)
    assert marginal_gain(ActuatorSet.empty(2), 1, g, eps=0.5) == pytest.approx(4 - (1 / 1.5 + 2))
    with pytest.raises(ParameterError):
        marginal_gain(ActuatorSet.empty(2), 1, g)


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.sets(st.integers(0, 7), max_size=6), st.floats(1e-6, 1.0))
def test_marginal_gain_matches_fresh_inversion(seed, members, eps):
    g = node_gramians(random_system(8, seed))
    current = ActuatorSet.from_indices(sorted(members), 8)
    for a in range(1, 9):
        if a in current:
            continue
        before = trace_inverse(assemble_gramian(g, current), eps)
        after = trace_inverse(assemble_gramian(g, current.add(a)), eps)
        gain = marginal_gain(current, a, g, eps=eps)
        assert gain >= 0.0
        # eigenvalues under the controllability tolerance count as zero, which
        # moves each trace by at most n * tol / eps^2
        slack = 2 * 8 * g.controllability_tolerance / eps ** 2
        assert gain == pytest.approx(before - after, rel=1e-9, abs=1e-9 * before + slack)


def test_factorization_batch_equals_single(er10):
    fact = PerturbedFactorization(assemble_gramian(er10, (2, 5)), 1e-3)
    batch = fact.gains(er10.per_node)
    single = [fact.gains(er10.per_node[i])[0] for i in range(10)]
    assert np.allclose(batch, single, rtol=1e-14, atol=0)


def test_greedy_needs_all_symmetric_nodes():
    g = zero_dynamics(3)
    res = greedy_min_actuators(g, 3.5, 0.1)
    assert res.delta == ActuatorSet.full(3)
    assert res.metric_eps == pytest.approx(3 / 1.1)
    # ties go to the lowest index
    assert res.trace.nodes == [1, 2, 3]
    assert res.controllable


def test_greedy_preconditions(chain5):
    with pytest.raises(ParameterError):
        greedy_min_actuators(chain5, 100.0, 0.1)
    floor_eps = energy_metric(chain5, ActuatorSet.full(5), 1e-3)
    with pytest.raises(InfeasibleError) as info:
        greedy_min_actuators(chain5, floor_eps * 0.99, 1e-3 / 2)
    assert info.value.floor is not None
    with pytest.raises(ParameterError):
        greedy_min_actuators(chain5, -1.0, 0.1)


def test_greedy_trace_is_strictly_decreasing(er10):
    E = 50 * energy_metric(er10, ActuatorSet.full(10))
    res = greedy_min_actuators(er10, E, 1.0 / E)
    metrics = [res.trace.initial_metric] + [s.metric for s in res.trace.steps]
    assert all(b < a for a, b in zip(metrics, metrics[1:]))
    assert res.metric_eps <= E and res.controllable
    assert res.trace.evaluations == sum(10 - k for k in range(len(res.trace.steps)))


@pytest.mark.parametrize('seed', range(12))
def test_lazy_matches_eager(seed):
    g = node_gramians(random_system(9, seed))
    floor = energy_metric(g, ActuatorSet.full(9))
    for k in (1.5, 10.0, 1e4):
        E = k * floor
        eager = greedy_min_actuators(g, E, 1.0 / E)
        lazy = greedy_min_actuators(g, E, 1.0 / E, lazy=True)
        assert lazy.trace.nodes == eager.trace.nodes
        assert lazy.trace.evaluations <= eager.trace.evaluations


def test_bound_F_formula():
    g = zero_dynamics(2)
    assert compute_bound_F(g, 1.5, 1.0) == pytest.approx(1 + math.log(2))
    with pytest.raises(InfeasibleError):
        compute_bound_F(g, 1.0, 1.0)
    terms = bound_F_terms(g, 3.0, 0.1)
    assert terms['log_n'] == pytest.approx(math.log(2))
    assert terms['log_inv_eps'] == pytest.approx(math.log(10))
    assert terms['log_inv_slack'] == pytest.approx(0.0)


@pytest.mark.parametrize('seed', range(6))
def test_greedy_size_within_F_of_optimum(seed):
    g = node_gramians(random_system(8, seed))
    E = 20 * energy_metric(g, ActuatorSet.full(8))
    res = greedy_min_actuators(g, E, 1.0 / E)
    opt = brute_force_min_actuators(g, E, eps=1.0 / E)
    assert len(res.delta) <= res.bound_F * len(opt.optimal_set)
    assert len(opt.optimal_set) <= len(res.delta) and opt.optimal_value <= E


def test_bounded_energy_chain_selections(chain5):
    res = min_actuators_bounded_energy(chain5, E_15, c=1e-4, a0=1e-4)
    assert res.delta == ActuatorSet((1, 3), 5)
    assert res.metric_exact == pytest.approx(2420.9412416375542, rel=1e-9)
    assert min_actuators_bounded_energy(chain5, 1e10).delta == ActuatorSet((1,), 5)


def test_bounded_energy_meets_floor_exactly():
    res = min_actuators_bounded_energy(zero_dynamics(4), 4.0, c=0.01)
    assert res.delta == ActuatorSet.full(4)
    assert res.metric_exact == pytest.approx(4.0) and res.metric_exact <= 1.01 * 4


def test_bounded_energy_infeasible_reports_floor(chain5):
    with pytest.raises(InfeasibleError) as info:
        min_actuators_bounded_energy(chain5, 10.0)
    assert info.value.floor == pytest.approx(12.008473286294726, rel=1e-9)
    with pytest.raises(ParameterError):
        min_actuators_bounded_energy(chain5, 100.0, c=0.0)


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.integers(3, 8), st.floats(1.01, 1e6), st.floats(1e-4, 1.0))
def test_bounded_energy_exit_conditions(seed, n, k, c):
    g = node_gramians(random_system(n, seed))
    E = k * energy_metric(g, ActuatorSet.full(n))
    res = min_actuators_bounded_energy(g, E, c=c, a0=1e-4)
    assert res.metric_eps <= E
    assert certification_gap(g, res.delta, res.eps_used) <= c * E
    assert res.metric_exact <= (1 + c) * E * (1 + 1e-12)
    assert res.controllable and bool(is_controllable(g, res.delta))
    assert 0 < res.eps_used <= 1.0 / E
    assert res.metric_exact >= res.metric_eps


def test_bounded_energy_log_records_every_step(chain5):
    res = min_actuators_bounded_energy(chain5, E_15)
    assert res.iterations and {'eps', 'size', 'gap', 'a', 'step'} <= set(res.iterations[0])


def test_certification_failure_below_eps_floor(chain5):
    with pytest.raises(CertificationError):
        min_actuators_bounded_energy(chain5, E_15, c=1e-305)


def test_controlling_set_chain(chain5):
    assert controlling_set(chain5) == ActuatorSet((1,), 5)


@pytest.mark.parametrize('r', range(1, 6))
def test_budgeted_chain_matches_oracle(chain5, r):
    res = min_energy_budgeted(chain5, r, delta_C=ActuatorSet((1,), 5))
    opt = brute_force_min_energy(chain5, r)
    assert 1 in res.delta and len(res.delta) <= r
    assert res.delta == opt.optimal_set
    assert res.controllable


def test_budgeted_chain_values(chain5):
    seed = ActuatorSet((1,), 5)
    assert min_energy_budgeted(chain5, 1, delta_C=seed).metric_exact \
        == pytest.approx(85175368.835971676, rel=1e-9)
    assert min_energy_budgeted(chain5, 3, delta_C=seed).metric_exact \
        == pytest.approx(81.713430575386226, rel=1e-9)
    full = min_energy_budgeted(chain5, 5)
    assert full.delta == ActuatorSet.full(5)
    assert full.diagnostics['budget_covers_all']


def test_budgeted_preconditions(chain5):
    with pytest.raises(ControllabilityError):
        min_energy_budgeted(chain5, 2, delta_C=ActuatorSet((2,), 5))
    with pytest.raises(ParameterError):
        min_energy_budgeted(chain5, 1, delta_C=ActuatorSet((1, 2), 5))
    with pytest.raises(ParameterError):
        min_energy_budgeted(chain5, 0)


def test_budgeted_is_monotone_in_r(er10):
    values = [min_energy_budgeted(er10, r, c=0.1, a0=1.0, a0p=1.0, lazy=True).metric_exact
              for r in range(1, 7)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_results_are_deterministic_and_round_trip(er10):
    E = 100 * energy_metric(er10, ActuatorSet.full(10))
    a = min_actuators_bounded_energy(er10, E, c=0.1, a0=1.0).to_dict()
    b = min_actuators_bounded_energy(er10, E, c=0.1, a0=1.0).to_dict()
    assert a == b
    assert PlacementResult.from_dict(a).to_dict() == a
