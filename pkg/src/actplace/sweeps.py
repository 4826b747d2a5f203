"""Parameter sweeps behind the random-network experiments.

Both sweeps return one dict row per parameter value, keyed by the CSV
headers in `records`. Rows are computed independently, optionally on a
thread pool, and always returned in parameter order.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

from .errors import CertificationError, InfeasibleError, ParameterError
from .placement import controlling_set, min_actuators_bounded_energy, min_energy_budgeted
from .system import ActuatorSet, energy_metric

__all__ = ['WORKERS_ENV', 'worker_count', 'energy_sweep', 'budget_sweep', 'parallel_map']

WORKERS_ENV = 'ACTPLACE_WORKERS'


def worker_count(default=1):
    """Worker pool size from the ``ACTPLACE_WORKERS`` environment variable."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f'{WORKERS_ENV} must be an integer, got {raw!r}') from None
    if value < 1:
        raise ParameterError(f'{WORKERS_ENV} must be at least 1, got {value}')
    return value


def parallel_map(fn, items, workers=None):
    workers = worker_count() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def energy_sweep(gramians, exponents=range(1, 51), c=0.1, a0=1.0, lazy=True, label='',
                 workers=None):
    """Bounded-energy placement at ``E = 2^j tr(W_V^-1)`` for each exponent ``j``."""
    floor = energy_metric(gramians, ActuatorSet.full(gramians.n), 0.0)

    def row(j):
        k = 2.0 ** j
        E = k * floor
        out = {'instance': label, 'k': k, 'E': E}
        try:
            res = min_actuators_bounded_energy(gramians, E, c=c, a0=a0, lazy=lazy)
        except (InfeasibleError, CertificationError) as exc:
            return {**out, 'size': None, 'status': type(exc).__name__}
        return {**out, 'size': len(res.delta), 'delta': str(res.delta),
                'metric_exact': res.metric_exact, 'metric_eps': res.metric_eps,
                'eps': res.eps_used, 'bound_F': res.bound_F, 'controllable': res.controllable,
                'status': 'ok'}

    return parallel_map(row, exponents, workers)


def budget_sweep(gramians, budgets=range(1, 6), c=0.1, a0=1.0, a0p=1.0, lazy=True,
                 delta_C=None, label='', workers=None):
    """Budgeted placement for each ``r``, sharing one seed set.

    Budgets smaller than the seed set have no controllable answer reachable
    from it; they are reported with ``metric_exact = inf`` and status
    ``'below_seed_set'``.
    """
    if delta_C is None:
        delta_C = controlling_set(gramians, c=c, a0=a0, lazy=lazy)

    def row(r):
        out = {'instance': label, 'r': r, 'delta_C': str(delta_C)}
        if r < len(delta_C) and r < gramians.n:
            return {**out, 'size': None, 'metric_exact': math.inf, 'status': 'below_seed_set'}
        res = min_energy_budgeted(gramians, r, delta_C=delta_C, c=c, a0=a0, a0p=a0p, lazy=lazy)
        return {**out, 'size': len(res.delta), 'delta': str(res.delta),
                'metric_exact': res.metric_exact, 'E_used': res.E_used,
                'fallback': res.diagnostics.get('fallback'), 'status': 'ok'}

    return parallel_map(row, budgets, workers)
