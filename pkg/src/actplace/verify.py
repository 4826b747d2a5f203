"""Property suites that check the placement guarantees on a Gramian cache.

Every suite returns a plain dict report::

    {'suite': name, 'passed': bool, 'checks': int, 'failures': [...], ...}

where each failure carries enough data (sets, values) to reproduce it.
Suites never raise on a failed property; failures are report content.
"""

import math

import numpy as np

from . import linalg
from .baselines import (brute_force_min_actuators, brute_force_min_energy, fact2_bound,
                        naive_budget_greedy)
from .errors import InfeasibleError, SizeError
from .placement import (PerturbedFactorization, certification_gap, greedy_min_actuators,
                        min_actuators_bounded_energy)
from .system import ActuatorSet, energy_metric, is_controllable

__all__ = [
    'SUITES',
    'ORACLE_MAX_N',
    'default_eps',
    'supermodularity_suite',
    'controllability_certificate_suite',
    'oracle_suite',
    'fact1_suite',
    'fact2_suite',
    'run_suite',
]

ORACLE_MAX_N = 12
SUPERMODULARITY_TOL = 1e-9
BOUND_RTOL = 1e-12


def _report(suite, checks, failures, **extra):
    return {'suite': suite, 'passed': not failures, 'checks': checks,
            'failures': failures, **extra}


def default_eps(gramians):
    """A perturbation on the scale of the Gramian spectrum: ``1e-3 tr(W_V) / n``."""
    return 1e-3 * float(np.trace(gramians.full)) / gramians.n


def _random_subset(rng, pool, size):
    return sorted(int(i) for i in rng.choice(pool, size=size, replace=False))


def supermodularity_suite(gramians, triples=1000, eps=None, seed=0):
    """Diminishing returns of ``f(D) = tr((W_D + eps I)^-1)``.

    For random ``D1 <= D2`` and ``a`` outside ``D2`` checks
    ``f(D1) - f(D1 + a) >= f(D2) - f(D2 + a)`` and that both gains are
    non-negative. Slack is normalized by ``f(D1)``, the largest of the four
    values.
    """
    eps = default_eps(gramians) if eps is None else eps
    rng = np.random.default_rng(seed)
    n = gramians.n
    tol = gramians.controllability_tolerance
    W = gramians.per_node
    if n < 2:
        return _report('supermodularity', 0, [], eps=eps, min_slack=None)
    failures = []
    min_slack = math.inf
    for _ in range(triples):
        size2 = int(rng.integers(0, n))
        d2 = _random_subset(rng, n, size2)
        d1 = _random_subset(rng, d2, int(rng.integers(0, size2 + 1))) if d2 else []
        a = int(rng.choice([i for i in range(n) if i not in d2]))
        f1 = PerturbedFactorization(W[d1].sum(axis=0) if d1 else np.zeros((n, n)), eps, tol)
        f2 = PerturbedFactorization(W[d2].sum(axis=0) if d2 else np.zeros((n, n)), eps, tol)
        g1 = float(f1.gains(W[a])[0])
        g2 = float(f2.gains(W[a])[0])
        slack = (g1 - g2) / f1.trace_inverse
        min_slack = min(min_slack, slack)
        if slack < -SUPERMODULARITY_TOL or g1 < 0 or g2 < 0:
            failures.append({'delta1': [i + 1 for i in d1], 'delta2': [i + 1 for i in d2],
                             'a': a + 1, 'gain1': g1, 'gain2': g2, 'slack': slack})
    return _report('supermodularity', triples, failures, eps=eps, min_slack=min_slack)


def controllability_certificate_suite(gramians, cases=500, seed=0):
    """Sets meeting ``tr((W_D + eps I)^-1) <= w`` with ``eps <= 1/w`` are controllable.

    Draws a random set and a log-uniform ``eps``, sets ``w = 1/eps`` (the
    loosest bound the condition allows) and checks every qualifying case.
    Draws continue until `cases` qualifying cases are seen or ``50 * cases``
    draws are spent.
    """
    rng = np.random.default_rng(seed)
    n = gramians.n
    scale = float(np.trace(gramians.full)) / n
    failures = []
    qualifying = drawn = uncontrollable_seen = 0
    while qualifying < cases and drawn < 50 * cases:
        drawn += 1
        delta = ActuatorSet.from_indices(_random_subset(rng, n, int(rng.integers(1, n + 1))), n)
        eps = scale * 10.0 ** rng.uniform(-14, 0)
        metric = energy_metric(gramians, delta, eps)
        report = is_controllable(gramians, delta)
        uncontrollable_seen += not report
        if metric * eps > 1.0:
            continue
        qualifying += 1
        if not report:
            failures.append({'delta': list(delta.members), 'eps': eps, 'metric': metric,
                             'min_eigenvalue': report.min_eigenvalue})
    return _report('controllability_certificate', qualifying, failures, draws=drawn,
                   uncontrollable_draws=uncontrollable_seen)


def _check_size(gramians):
    if gramians.n > ORACLE_MAX_N:
        raise SizeError(f'oracle suites are capped at n = {ORACLE_MAX_N}, got n = {gramians.n}')


def _default_energies(gramians):
    floor = energy_metric(gramians, ActuatorSet.full(gramians.n), 0.0)
    return [k * floor for k in (1.5, 4.0, 64.0, 1e4)]


def oracle_suite(gramians, energies=None, c=1e-4, a0=1e-4, lazy=False):
    """Bounded-energy placement against exhaustive search.

    For each bound ``E`` runs the eps-bisection placement and checks that
    the set is controllable, meets ``tr((W + eps I)^-1) <= E`` and
    ``tr(W^-1) - tr((W + eps I)^-1) <= c E`` (hence ``tr(W^-1) <= (1 + c) E``),
    and that its size is at most ``F`` times the perturbed-problem optimum
    at the same eps.
    """
    _check_size(gramians)
    energies = _default_energies(gramians) if energies is None else energies
    failures, rows = [], []
    for E in energies:
        res = min_actuators_bounded_energy(gramians, E, c=c, a0=a0, lazy=lazy)
        eps = res.eps_used
        opt = brute_force_min_actuators(gramians, E, eps=eps)
        gap = certification_gap(gramians, res.delta, eps)
        F = res.bound_F
        row = {'E': E, 'eps': eps, 'delta': list(res.delta.members), 'size': len(res.delta),
               'optimum': list(opt.optimal_set.members), 'optimum_size': len(opt.optimal_set),
               'F': F, 'metric_exact': res.metric_exact, 'metric_eps': res.metric_eps,
               'gap': gap}
        rows.append(row)
        problems = []
        if not res.controllable:
            problems.append('uncontrollable')
        if not res.metric_eps <= E:
            problems.append('perturbed metric above E')
        if not gap <= c * E:
            problems.append('gap above cE')
        if not res.metric_exact <= (1.0 + c) * E * (1.0 + BOUND_RTOL):
            problems.append('exact metric above (1+c)E')
        if not len(res.delta) <= F * len(opt.optimal_set) * (1.0 + BOUND_RTOL):
            problems.append('size above F times optimum')
        if problems:
            failures.append({**row, 'problems': problems})
    return _report('oracle', len(energies), failures, runs=rows, c=c, a0=a0)


def fact1_suite(gramians, energies=None, eps=None):
    """Greedy-length certificate ``l / |D*| <= 1 + log[(h(V) - h(0)) / (h(V) - h(D_{l-1}))]``.

    ``h(D) = n/eps - tr((W_D + eps I)^-1)``; ``D*`` is the exhaustive
    optimum of the perturbed problem. Default ``eps = 1/E``.
    """
    _check_size(gramians)
    energies = _default_energies(gramians) if energies is None else energies
    n = gramians.n
    tol = gramians.controllability_tolerance
    failures, rows = [], []
    for E in energies:
        e = 1.0 / E if eps is None else eps
        try:
            res = greedy_min_actuators(gramians, E, e)
        except InfeasibleError:
            continue
        opt = brute_force_min_actuators(gramians, E, eps=e)
        l, l_star = len(res.trace.steps), len(opt.optimal_set)
        if l == 0:
            rows.append({'E': E, 'eps': e, 'l': 0, 'optimum_size': l_star, 'certificate': 1.0})
            continue
        t_V = linalg.trace_perturbed_inverse(gramians.full, e, tol)
        prev = res.trace.steps[-2].metric if l >= 2 else res.trace.initial_metric
        h_V, h_prev = n / e - t_V, n / e - prev
        certificate = 1.0 + math.log(h_V / (h_V - h_prev))
        row = {'E': E, 'eps': e, 'l': l, 'optimum_size': l_star, 'certificate': certificate,
               'ratio': l / l_star}
        rows.append(row)
        if l / l_star > certificate * (1.0 + BOUND_RTOL):
            failures.append(row)
    return _report('fact1', len(rows), failures, runs=rows)


def fact2_suite(gramians, budgets=(1, 2), steps=None, eps=None):
    """Plain budgeted greedy against ``(1 - e^{-l/r}) v* + n e^{-l/r} / eps``.

    ``v*`` is the exhaustive optimum of the perturbed metric over sets of
    size at most ``r``; default step counts are ``l in {r, 2r, 5r}``.
    """
    _check_size(gramians)
    eps = default_eps(gramians) if eps is None else eps
    n = gramians.n
    failures, rows = [], []
    for r in budgets:
        v_star = brute_force_min_energy(gramians, r, eps=eps).optimal_value
        for l in (steps or (r, 2 * r, 5 * r)):
            if l > n:
                continue
            res = naive_budget_greedy(gramians, r, eps, l)
            bound = fact2_bound(n, r, l, eps, v_star)
            row = {'r': r, 'l': l, 'eps': eps, 'v_star': v_star, 'value': res.metric_eps,
                   'bound': bound, 'delta': list(res.delta.members),
                   'over_budget': res.diagnostics['over_budget'],
                   'uncontrollable': res.diagnostics['uncontrollable']}
            rows.append(row)
            if res.metric_eps > bound * (1.0 + BOUND_RTOL):
                failures.append(row)
    return _report('fact2', len(rows), failures, runs=rows)


SUITES = {
    'supermodularity': supermodularity_suite,
    'controllability_certificate': controllability_certificate_suite,
    'oracle': oracle_suite,
    'fact1': fact1_suite,
    'fact2': fact2_suite,
}


def run_suite(name, gramians, **kwargs):
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f'unknown suite {name!r}; choose from {sorted(SUITES)}') from None
    return suite(gramians, **kwargs)
