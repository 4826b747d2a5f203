"""Exhaustive oracles for small instances and the plain budgeted greedy.

The oracles enumerate subsets by cardinality then lexicographically, in
batches so that the eigenvalue solves are vectorized. Ties go to the
lexicographically first set.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, ParameterError, SizeError
from .placement import PlacementResult, _greedy_path
from .system import ActuatorSet, energy_metric, is_controllable

__all__ = [
    'MAX_ORACLE_N',
    'OracleResult',
    'brute_force_min_actuators',
    'brute_force_min_energy',
    'naive_budget_greedy',
    'fact2_bound',
]

MAX_ORACLE_N = 20
_BATCH = 4096


@dataclass(frozen=True)
class OracleResult:
    optimal_set: ActuatorSet
    optimal_value: float
    subsets_examined: int

    def to_dict(self):
        return {'optimal_set': list(self.optimal_set.members), 'n': self.optimal_set.n,
                'optimal_value': self.optimal_value, 'subsets_examined': self.subsets_examined}

    @classmethod
    def from_dict(cls, d):
        return cls(ActuatorSet(tuple(d['optimal_set']), d['n']), d['optimal_value'],
                   d['subsets_examined'])


def _check_size(gramians):
    if gramians.n > MAX_ORACLE_N:
        raise SizeError(f'exhaustive search capped at n = {MAX_ORACLE_N}, got n = {gramians.n}')


def _metrics_of_size(gramians, k, eps):
    """Yield ``(combos, values)`` batches over all k-subsets in lexicographic order."""
    tol = gramians.controllability_tolerance
    combos = itertools.combinations(range(gramians.n), k)
    while True:
        batch = list(itertools.islice(combos, _BATCH))
        if not batch:
            return
        idx = np.array(batch, dtype=int)
        W = gramians.per_node[idx].sum(axis=1)
        lam = np.linalg.eigvalsh(0.5 * (W + W.transpose(0, 2, 1)))
        if eps > 0:
            values = np.sum(1.0 / (np.where(lam <= tol, 0.0, lam) + eps), axis=1)
        else:
            with np.errstate(divide='ignore'):
                values = np.sum(1.0 / lam, axis=1)
            values[lam[:, 0] <= tol] = np.inf
        yield batch, values


def brute_force_min_actuators(gramians, E, eps=0.0):
    """Smallest set with ``energy_metric(Delta, eps) <= E``.

    Among the feasible sets of that smallest size the one with the least
    metric wins, then the lexicographically first, so no set of equal or
    smaller size is strictly better.
    """
    _check_size(gramians)
    examined = 1
    if eps > 0 and gramians.n / eps <= E:
        return OracleResult(ActuatorSet.empty(gramians.n), gramians.n / eps, examined)
    for k in range(1, gramians.n + 1):
        best_value, best_set = math.inf, None
        for batch, values in _metrics_of_size(gramians, k, eps):
            examined += len(batch)
            values = np.where(values <= E, values, np.inf)
            j = int(np.argmin(values))
            if values[j] < best_value:
                best_value, best_set = float(values[j]), batch[j]
        if best_set is not None:
            delta = ActuatorSet.from_indices(best_set, gramians.n)
            return OracleResult(delta, energy_metric(gramians, delta, eps), examined)
    floor = energy_metric(gramians, ActuatorSet.full(gramians.n), eps)
    raise InfeasibleError(f'no actuator set meets E = {E:.6g} (floor {floor:.6g})', floor=floor)


def brute_force_min_energy(gramians, r, eps=0.0):
    """Minimum of ``energy_metric(Delta, eps)`` over ``1 <= |Delta| <= r``.

    Ties go to the smaller set, then the lexicographically first.
    """
    _check_size(gramians)
    if r < 1:
        raise ParameterError(f'budget r must be at least 1, got {r}')
    best_value, best_set, examined = math.inf, None, 0
    for k in range(1, min(r, gramians.n) + 1):
        for batch, values in _metrics_of_size(gramians, k, eps):
            examined += len(batch)
            j = int(np.argmin(values))
            if values[j] < best_value:
                best_value, best_set = float(values[j]), batch[j]
    if best_set is None:
        raise InfeasibleError(f'no actuator set of size <= {r} makes the system controllable')
    delta = ActuatorSet.from_indices(best_set, gramians.n)
    return OracleResult(delta, energy_metric(gramians, delta, eps), examined)


def fact2_bound(n, r, l, eps, v_star):
    """Right-hand side ``(1 - e^{-l/r}) v* + n e^{-l/r} / eps`` of the budgeted-greedy guarantee."""
    decay = math.exp(-l / r)
    return (1.0 - decay) * v_star + n * decay / eps


def naive_budget_greedy(gramians, r, eps, l):
    """Run `l` plain greedy steps on ``tr((W + eps I)^-1)`` with no bisection.

    The result can overshoot the budget `r` (when ``l > r``) and need not be
    controllable; both are flagged in ``diagnostics``.
    """
    if l < 1:
        raise ParameterError(f'step count l must be at least 1, got {l}')
    if not eps > 0:
        raise ParameterError(f'eps must be positive, got {eps!r}')
    chosen, trace = _greedy_path(gramians, eps, lambda size, metric: size >= l)
    delta = ActuatorSet.from_indices(chosen, gramians.n)
    report = is_controllable(gramians, delta)
    metric_eps = trace.steps[-1].metric if trace.steps else trace.initial_metric
    return PlacementResult(
        delta=delta,
        metric_eps=metric_eps,
        metric_exact=energy_metric(gramians, delta, 0.0),
        eps_used=eps,
        E_used=None,
        bound_F=None,
        controllable=bool(report),
        trace=trace,
        diagnostics={'solver': 'naive_budget_greedy', 'r': r, 'l': l,
                     'over_budget': len(delta) > r, 'uncontrollable': not report,
                     'error_term': gramians.n * math.exp(-l / r) / eps},
    )
