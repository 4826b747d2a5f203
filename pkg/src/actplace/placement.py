"""Greedy actuator placement with energy guarantees.

Three layers, each wrapping the one below:

* `greedy_min_actuators` picks nodes one at a time by largest decrease of
  ``tr((W_Delta + eps I)^-1)`` until the perturbed metric meets a bound ``E``.
  The perturbed metric is supermodular, which gives the log-factor
  cardinality bound `compute_bound_F`, and for ``eps <= 1/E`` every set it
  returns is controllable.
* `min_actuators_bounded_energy` bisects on ``eps`` until the gap between
  the exact and perturbed metric is at most ``c E``, so the returned set
  satisfies ``tr(W_Delta^-1) <= (1 + c) E``.
* `min_energy_budgeted` bisects on ``E`` to find the tightest bound the
  previous layer meets with at most ``r`` actuators.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import (CertificationError, ControllabilityError, InfeasibleError,
                     ParameterError)
from .system import (ActuatorSet, as_actuator_set, assemble_gramian,
                     energy_metric, is_controllable)

__all__ = [
    'GreedyStep',
    'GreedyTrace',
    'PlacementResult',
    'PerturbedFactorization',
    'marginal_gain',
    'greedy_min_actuators',
    'compute_bound_F',
    'bound_F_terms',
    'certification_gap',
    'min_actuators_bounded_energy',
    'controlling_set',
    'min_energy_budgeted',
]

TIE_RTOL = 1e-12
EPS_FLOOR = 1e-300
LARGE_E_FACTOR = 1e12


@dataclass(frozen=True)
class GreedyStep:
    node: int
    gain: float
    metric: float


@dataclass
class GreedyTrace:
    initial_metric: float = math.nan
    steps: list = field(default_factory=list)
    evaluations: int = 0

    @property
    def nodes(self):
        return [s.node for s in self.steps]

    def to_dict(self):
        return {'initial_metric': self.initial_metric,
                'steps': [asdict(s) for s in self.steps],
                'evaluations': self.evaluations}

    @classmethod
    def from_dict(cls, d):
        return cls(d['initial_metric'], [GreedyStep(**s) for s in d['steps']], d['evaluations'])


@dataclass
class PlacementResult:
    """Outcome of a placement run.

    ``metric_eps`` is ``tr((W_Delta + eps_used I)^-1)`` and ``metric_exact``
    is ``tr(W_Delta^-1)`` (``inf`` if uncontrollable). ``iterations`` is the
    bisection log; ``diagnostics`` holds solver-specific extras.
    """

    delta: ActuatorSet
    metric_eps: float
    metric_exact: float
    eps_used: Optional[float]
    E_used: Optional[float]
    bound_F: Optional[float]
    controllable: bool
    trace: GreedyTrace = field(default_factory=GreedyTrace)
    iterations: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'delta': list(self.delta.members),
            'n': self.delta.n,
            'metric_eps': self.metric_eps,
            'metric_exact': self.metric_exact,
            'eps_used': self.eps_used,
            'E_used': self.E_used,
            'bound_F': self.bound_F,
            'controllable': self.controllable,
            'trace': self.trace.to_dict(),
            'iterations': self.iterations,
            'diagnostics': self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            delta=ActuatorSet(tuple(d['delta']), d['n']),
            metric_eps=d['metric_eps'],
            metric_exact=d['metric_exact'],
            eps_used=d['eps_used'],
            E_used=d['E_used'],
            bound_F=d['bound_F'],
            controllable=d['controllable'],
            trace=GreedyTrace.from_dict(d['trace']),
            iterations=d['iterations'],
            diagnostics=d['diagnostics'],
        )


class PerturbedFactorization:
    """Spectral factorization of ``W + eps I`` shared by a sweep over candidates.

    With ``W + eps I = Q L Q^T`` and ``S_a = L^{-1/2} Q^T W_a Q L^{-1/2} = U s U^T``
    the decrease of the trace inverse from adding ``W_a`` is

        sum_k s_k / (1 + s_k) * (u_k^T L^{-1} u_k),

    a sum of non-negative terms, so no cancellation between two large traces.
    """

    def __init__(self, W, eps, zero_tol=0.0):
        lam, Q = linalg.psd_eigh(W, zero_tol)
        self.eps = eps
        self.shifted = lam + eps
        self.Q = Q
        self.trace_inverse = float(np.sum(1.0 / self.shifted))

    def gains(self, Ws):
        Ws = np.asarray(Ws)
        if Ws.ndim == 2:
            Ws = Ws[None]
        d = 1.0 / np.sqrt(self.shifted)
        S = self.Q.T @ Ws @ self.Q
        S = d[:, None] * S * d[None, :]
        S = 0.5 * (S + S.transpose(0, 2, 1))
        sig, U = np.linalg.eigh(S)
        sig = np.clip(sig, 0.0, None)
        weights = np.einsum('kjm,j->km', U * U, 1.0 / self.shifted)
        return np.sum(sig / (1.0 + sig) * weights, axis=1)


def marginal_gain(current, candidate, gramians, eps=None):
    """Trace decrease from adding 1-based node `candidate`.

    `current` is a `PerturbedFactorization` or an actuator set (then `eps`
    is required and the factorization is built here).
    """
    if not isinstance(current, PerturbedFactorization):
        if eps is None:
            raise ParameterError('eps is required when current is an actuator set')
        current = PerturbedFactorization(assemble_gramian(gramians, current), eps,
                                         gramians.controllability_tolerance)
    return float(current.gains(gramians[candidate])[0])


def _pick(gains):
    """Lowest index among gains within TIE_RTOL of the maximum."""
    best = max(gains.values())
    cutoff = best - TIE_RTOL * abs(best)
    return min(i for i, g in gains.items() if g >= cutoff)


def _greedy_path(gramians, eps, stop, lazy=False):
    """Run the greedy until ``stop(size, metric)`` is true or V is exhausted.

    Returns ``(chosen 0-based indices, GreedyTrace)``.
    """
    n = gramians.n
    W = gramians.per_node
    tol = gramians.controllability_tolerance
    chosen = []
    fact = PerturbedFactorization(np.zeros((n, n)), eps, tol)
    trace = GreedyTrace(initial_metric=fact.trace_inverse)
    bounds = np.full(n, np.inf)
    while not stop(len(chosen), fact.trace_inverse) and len(chosen) < n:
        remaining = [i for i in range(n) if i not in chosen]
        if lazy:
            gains = _lazy_round(fact, W, remaining, bounds, trace)
        else:
            values = fact.gains(W[remaining])
            trace.evaluations += len(remaining)
            gains = dict(zip(remaining, values))
        if not all(np.isfinite(g) for g in gains.values()):
            raise CertificationError(f'marginal gains are not finite at eps = {eps:.3g}')
        pick = _pick(gains)
        chosen.append(pick)
        fact = PerturbedFactorization(W[sorted(chosen)].sum(axis=0), eps, tol)
        trace.steps.append(GreedyStep(pick + 1, float(gains[pick]), fact.trace_inverse))
    return chosen, trace


def _lazy_round(fact, W, remaining, bounds, trace):
    # stale gains upper-bound fresh ones (supermodularity), so a candidate
    # whose bound is below the best fresh gain minus the tie tolerance can
    # neither win nor tie
    fresh = {}
    unseen = [i for i in remaining if np.isinf(bounds[i])]
    if unseen:
        values = fact.gains(W[unseen])
        trace.evaluations += len(unseen)
        for i, g in zip(unseen, values):
            bounds[i] = g
            fresh[i] = g
    while True:
        stale = [i for i in remaining if i not in fresh]
        if not stale:
            break
        top = min(stale, key=lambda i: (-bounds[i], i))
        if fresh:
            best = max(fresh.values())
            if bounds[top] < best - TIE_RTOL * abs(best):
                break
        g = float(fact.gains(W[top])[0])
        trace.evaluations += 1
        bounds[top] = g
        fresh[top] = g
    return fresh


def _check_eps(E, eps):
    if not E > 0:
        raise ParameterError(f'E must be positive, got {E!r}')
    if not eps > 0:
        raise ParameterError(f'eps must be positive, got {eps!r}')
    if eps * E > 1.0 + 1e-12:
        raise ParameterError(f'eps = {eps:.6g} exceeds 1/E = {1.0 / E:.6g}')


def greedy_min_actuators(gramians, E, eps, lazy=False):
    """Smallest greedy set with ``tr((W_Delta + eps I)^-1) <= E``.

    Requires ``0 < eps <= 1/E``; in that regime the returned set is
    controllable. Ties in the greedy choice go to the lowest node index, and
    ``lazy=True`` (priority evaluation with stale bounds) returns the same
    set with fewer gain evaluations.
    """
    _check_eps(E, eps)
    tol = gramians.controllability_tolerance
    floor_eps = linalg.trace_perturbed_inverse(gramians.full, eps, tol)
    if E < floor_eps:
        raise InfeasibleError(
            f'E = {E:.6g} is below tr((W_V + eps I)^-1) = {floor_eps:.6g}; '
            'even full actuation misses the bound', floor=floor_eps)
    chosen, trace = _greedy_path(gramians, eps, lambda size, metric: metric <= E, lazy)
    delta = ActuatorSet.from_indices(chosen, gramians.n)
    metric_eps = trace.steps[-1].metric if trace.steps else trace.initial_metric
    if metric_eps > E:
        raise InfeasibleError(f'greedy exhausted all nodes without meeting E = {E:.6g}',
                              floor=floor_eps)
    return PlacementResult(
        delta=delta,
        metric_eps=metric_eps,
        metric_exact=energy_metric(gramians, delta, 0.0),
        eps_used=eps,
        E_used=E,
        bound_F=compute_bound_F(gramians, E, eps) if E > floor_eps else math.inf,
        controllable=bool(is_controllable(gramians, delta)),
        trace=trace,
    )


def compute_bound_F(gramians, E, eps):
    """Greedy cardinality bound ``1 + log[(n/eps - t_V) / (E - t_V)]``.

    ``t_V = tr((W_V + eps I)^-1)``.
    """
    tol = gramians.controllability_tolerance
    floor_eps = linalg.trace_perturbed_inverse(gramians.full, eps, tol)
    denom = E - floor_eps
    if not denom > 0:
        raise InfeasibleError(
            f'E = {E:.6g} does not exceed tr((W_V + eps I)^-1) = {floor_eps:.6g}', floor=floor_eps)
    return 1.0 + math.log((gramians.n / eps - floor_eps) / denom)


def bound_F_terms(gramians, E, eps):
    """The three logarithms that dominate the bound for large n, small eps, tight E."""
    floor = energy_metric(gramians, ActuatorSet.full(gramians.n), 0.0)
    slack = E - floor
    return {
        'log_n': math.log(gramians.n),
        'log_inv_eps': math.log(1.0 / eps),
        'log_inv_slack': math.log(1.0 / slack) if slack > 0 else math.inf,
    }


def certification_gap(gramians, delta, eps):
    """``tr(W_Delta^-1) - tr((W_Delta + eps I)^-1)`` summed termwise, ``inf`` if uncontrollable."""
    lam = np.linalg.eigvalsh(linalg.symmetrize(assemble_gramian(gramians, delta)))
    if lam[0] <= gramians.controllability_tolerance:
        return math.inf
    return float(np.sum(eps / (lam * (lam + eps))))


def min_actuators_bounded_energy(gramians, E, c=1e-4, a0=1e-4, lazy=False):
    """Few actuators with ``tr(W_Delta^-1) <= (1 + c) E``, by bisection on eps.

    Outer loop halves the bisection accuracy ``a`` until the inner bisection
    on ``eps in (0, 1/E]`` certifies ``tr(W^-1) - tr((W + eps I)^-1) <= c E``
    for the greedy set at the final ``eps``.
    """
    n = gramians.n
    full = ActuatorSet.full(n)
    floor = energy_metric(gramians, full, 0.0)
    if not E >= floor:
        raise InfeasibleError(
            f'E = {E:.6g} is below tr(W_V^-1) = {floor:.6g}; no actuator set meets it', floor=floor)
    if not c > 0 or not a0 > 0:
        raise ParameterError(f'c and a0 must be positive, got c={c!r}, a0={a0!r}')

    cE = c * E
    eps_floor = EPS_FLOOR / E
    log = []
    cache = {}

    def run(eps):
        if eps not in cache:
            res = greedy_min_actuators(gramians, E, eps, lazy=lazy)
            cache[eps] = (res, certification_gap(gramians, res.delta, eps))
        res, gap = cache[eps]
        log.append({'eps': eps, 'size': len(res.delta), 'gap': gap, 'a': a, 'step': 'greedy'})
        return res, gap

    def midpoint(l, u):
        eps = 0.5 * (l + u)
        if eps < eps_floor or not l < eps < u:
            raise CertificationError(
                f'eps bisection stalled at eps = {eps:.3g} without certifying '
                f'tr(W^-1) - tr((W + eps I)^-1) <= {cE:.6g}')
        return eps

    a = a0
    lo, hi = 0.0, 1.0 / E
    eps = 0.5 * (lo + hi)
    res, gap = run(eps)
    certified = False
    while not certified:
        while hi - lo > a:
            res, gap = run(eps)
            if gap > cE:
                hi = eps
            else:
                lo = eps
            eps = midpoint(lo, hi)
        stale_gap = certification_gap(gramians, res.delta, eps)
        log.append({'eps': eps, 'size': len(res.delta), 'gap': stale_gap, 'a': a, 'step': 'check'})
        if stale_gap > cE:
            hi = eps
            eps = midpoint(lo, hi)
        res, gap = run(eps)
        if gap <= cE:
            certified = True
        else:
            a /= 2.0
            if a < eps_floor:
                raise CertificationError(f'bisection accuracy fell below {eps_floor:.3g}')

    res.iterations = log
    res.diagnostics = {'solver': 'min_actuators_bounded_energy', 'c': c, 'a0': a0,
                       'a_final': a, 'gap': gap, 'floor': floor, 'greedy_runs': len(cache)}
    return res


def controlling_set(gramians, c=1e-4, a0=1e-4, E=None, lazy=False):
    """A small controllable set from a bounded-energy run at a very loose bound.

    Defaults to ``E = 1e12 * tr(W_V^-1)``.
    """
    if E is None:
        E = LARGE_E_FACTOR * energy_metric(gramians, ActuatorSet.full(gramians.n), 0.0)
    return min_actuators_bounded_energy(gramians, E, c=c, a0=a0, lazy=lazy).delta


def _full_result(gramians):
    full = ActuatorSet.full(gramians.n)
    value = energy_metric(gramians, full, 0.0)
    return PlacementResult(full, value, value, 0.0, value, None,
                           bool(is_controllable(gramians, full)),
                           diagnostics={'solver': 'min_energy_budgeted', 'budget_covers_all': True})


def min_energy_budgeted(gramians, r, delta_C=None, c=1e-4, a0=1e-4, a0p=1e-4, lazy=False):
    """At most `r` actuators with small ``tr(W_Delta^-1)``, by bisection on E.

    The bracket runs from ``tr(W_V^-1)`` to ``tr(W_{delta_C}^-1)`` for a
    controllable seed set `delta_C` (found with `controlling_set` when not
    given). ``r >= n`` returns V.
    """
    n = gramians.n
    if r < 1:
        raise ParameterError(f'budget r must be at least 1, got {r}')
    if r >= n:
        return _full_result(gramians)
    if delta_C is None:
        delta_C = controlling_set(gramians, c=c, a0=a0, lazy=lazy)
    delta_C = as_actuator_set(delta_C, n)
    report = is_controllable(gramians, delta_C)
    if not report:
        raise ControllabilityError(
            f'seed set {delta_C} is not controllable (lambda_min = {report.min_eigenvalue:.3g})')
    if r < len(delta_C):
        raise ParameterError(f'budget r = {r} is smaller than the seed set {delta_C}')

    def solve(E):
        return min_actuators_bounded_energy(gramians, E, c=c, a0=a0, lazy=lazy)

    lo = energy_metric(gramians, ActuatorSet.full(n), 0.0)
    hi = energy_metric(gramians, delta_C, 0.0)
    E = 0.5 * (lo + hi)
    log = []
    within = None
    res = None
    while hi - lo > a0p:
        res = solve(E)
        log.append({'E': E, 'size': len(res.delta), 'lo': lo, 'hi': hi})
        if len(res.delta) > r:
            lo = E
        else:
            hi = E
            within = res
        E = 0.5 * (lo + hi)
    if res is not None and len(res.delta) > r:
        lo = E
        E = 0.5 * (lo + hi)
    res = solve(E)
    log.append({'E': E, 'size': len(res.delta), 'lo': lo, 'hi': hi})

    fallback = None
    if len(res.delta) > r:
        if within is not None:
            res, fallback = within, 'last_within_budget'
        else:
            value = energy_metric(gramians, delta_C, 0.0)
            res = PlacementResult(delta_C, value, value, 0.0, value, None, True)
            fallback = 'seed_set'
    res.iterations = log
    res.diagnostics = {'solver': 'min_energy_budgeted', 'r': r, 'c': c, 'a0': a0, 'a0p': a0p,
                       'delta_C': list(delta_C.members), 'bracket': [lo, hi], 'fallback': fallback}
    return res
