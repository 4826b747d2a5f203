"""Linear network systems, per-node Gramians and the average-energy metric.

The plant is ``x' = A x + B u`` with ``B = diag(delta)`` for a zero-one
vector ``delta``. Because ``B B^T = sum_i delta_i I^(i)``, the Gramian of any
actuator set is the sum of the per-node Gramians of its members, so those
are computed once and every placement algorithm works from that cache.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg

from . import linalg
from .errors import (ControllabilityError, DimensionError, InvalidInputError,
                     ParameterError)

__all__ = [
    'FiniteHorizon',
    'InfiniteHorizon',
    'LinearSystem',
    'ActuatorSet',
    'NodeGramianSet',
    'ControllabilityReport',
    'finite_horizon_node_gramians',
    'infinite_horizon_node_gramians',
    'node_gramians',
    'assemble_gramian',
    'energy_metric',
    'is_controllable',
    'kalman_rank',
    'min_transfer_energy',
]

CONTROLLABILITY_RTOL = 1e-12


@dataclass(frozen=True)
class FiniteHorizon:
    t0: float = 0.0
    t1: float = 1.0

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ParameterError(f'finite horizon needs t1 > t0, got [{self.t0}, {self.t1}]')

    @property
    def tau(self):
        return self.t1 - self.t0

    def to_dict(self):
        return {'type': 'finite', 't0': self.t0, 't1': self.t1}


@dataclass(frozen=True)
class InfiniteHorizon:

    def to_dict(self):
        return {'type': 'infinite'}


Horizon = Union[FiniteHorizon, InfiniteHorizon]


def horizon_from_dict(d):
    kind = d.get('type')
    if kind == 'finite':
        return FiniteHorizon(float(d.get('t0', 0.0)), float(d.get('t1', 1.0)))
    if kind == 'infinite':
        return InfiniteHorizon()
    raise InvalidInputError(f'unknown horizon type {kind!r}')


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """State matrix plus the horizon over which Gramians are taken."""

    A: np.ndarray
    horizon: Horizon = field(default_factory=FiniteHorizon)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise DimensionError(f'A must be a non-empty square matrix, got shape {A.shape}')
        if not np.all(np.isfinite(A)):
            raise InvalidInputError('A has non-finite entries')
        A.flags.writeable = False
        object.__setattr__(self, 'A', A)

    @property
    def n(self):
        return self.A.shape[0]

    def to_dict(self):
        return {'n': self.n, 'A': self.A.tolist(), 'horizon': self.horizon.to_dict()}

    @classmethod
    def from_dict(cls, d):
        try:
            A = np.array(d['A'], dtype=float)
            horizon = horizon_from_dict(d.get('horizon', {'type': 'finite'}))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f'malformed system description: {exc}') from exc
        if 'n' in d and int(d['n']) != A.shape[0]:
            raise DimensionError(f"declared n = {d['n']} but A is {A.shape}")
        return cls(A, horizon)

    def with_horizon(self, horizon):
        return LinearSystem(self.A, horizon)


@dataclass(frozen=True)
class ActuatorSet:
    """Sorted set of actuated nodes, labelled 1..n."""

    members: tuple
    n: int

    def __post_init__(self):
        members = tuple(sorted({int(i) for i in self.members}))
        if members and (members[0] < 1 or members[-1] > self.n):
            raise InvalidInputError(f'actuator indices {members} outside 1..{self.n}')
        object.__setattr__(self, 'members', members)

    @classmethod
    def empty(cls, n):
        return cls((), n)

    @classmethod
    def full(cls, n):
        return cls(tuple(range(1, n + 1)), n)

    @classmethod
    def from_indices(cls, indices, n):
        """Build from 0-based indices."""
        return cls(tuple(int(i) + 1 for i in indices), n)

    @property
    def indices(self):
        return np.array(self.members, dtype=int) - 1

    @property
    def delta(self):
        d = np.zeros(self.n)
        d[self.indices] = 1.0
        return d

    def add(self, node):
        return ActuatorSet(self.members + (node,), self.n)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, node):
        return node in self.members

    def __str__(self):
        return '{' + ','.join(map(str, self.members)) + '}'


def as_actuator_set(delta, n):
    if isinstance(delta, ActuatorSet):
        if delta.n != n:
            raise DimensionError(f'actuator set is over {delta.n} nodes, system has {n}')
        return delta
    return ActuatorSet(tuple(delta), n)


@dataclass(frozen=True, eq=False)
class NodeGramianSet:
    """The n per-node Gramians ``W_i`` stacked as an ``(n, n, n)`` array."""

    per_node: np.ndarray
    system: LinearSystem
    method_tag: str

    def __post_init__(self):
        W = np.array(self.per_node, dtype=float)
        n = self.system.n
        if W.shape != (n, n, n):
            raise DimensionError(f'expected ({n}, {n}, {n}) per-node stack, got {W.shape}')
        if self.method_tag not in ('finite-horizon', 'infinite-horizon'):
            raise InvalidInputError(f'unknown method tag {self.method_tag!r}')
        W = 0.5 * (W + W.transpose(0, 2, 1))
        W.flags.writeable = False
        full = W.sum(axis=0)
        full.flags.writeable = False
        object.__setattr__(self, 'per_node', W)
        object.__setattr__(self, '_full', full)

    @property
    def n(self):
        return self.system.n

    @property
    def full(self):
        """Gramian of full actuation, ``W_V``."""
        return self._full

    @property
    def controllability_tolerance(self):
        return CONTROLLABILITY_RTOL * (1.0 + np.trace(self._full) / self.n)

    def __len__(self):
        return self.n

    def __getitem__(self, node):
        """Per-node Gramian for 1-based `node`."""
        return self.per_node[node - 1]


def _van_loan_gramian(A, Q, tau):
    # exp([[-A, Q], [0, A^T]] tau) = [[F11, F12], [0, F22]] and the Gramian is F22^T F12
    n = A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = -A
    M[:n, n:] = Q
    M[n:, n:] = A.T
    F = linalg.expm(M * tau)
    G = F[n:, n:].T @ F[:n, n:]
    return 0.5 * (G + G.T)


def finite_horizon_node_gramians(sys):
    """Per-node Gramians ``int_0^tau e^{At} I^(i) e^{A^T t} dt`` with ``tau = t1 - t0``."""
    if not isinstance(sys.horizon, FiniteHorizon):
        raise ParameterError('finite-horizon Gramians need a FiniteHorizon system')
    n, tau = sys.n, sys.horizon.tau
    W = np.empty((n, n, n))
    for i in range(n):
        Q = np.zeros((n, n))
        Q[i, i] = 1.0
        W[i] = _van_loan_gramian(sys.A, Q, tau)
    return NodeGramianSet(W, sys, 'finite-horizon')


def infinite_horizon_node_gramians(sys):
    """Per-node Gramians solving ``A G_i + G_i A^T = -I^(i)``; `A` must be Hurwitz."""
    n = sys.n
    Qs = np.zeros((n, n, n))
    Qs[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    G = linalg.solve_lyapunov_many(sys.A, Qs)
    return NodeGramianSet(G, sys.with_horizon(InfiniteHorizon()), 'infinite-horizon')


def node_gramians(sys):
    """Dispatch on the system's horizon."""
    if isinstance(sys.horizon, InfiniteHorizon):
        return infinite_horizon_node_gramians(sys)
    return finite_horizon_node_gramians(sys)


def assemble_gramian(gramians, delta):
    """``W_Delta = sum_{i in Delta} W_i``; the empty set gives the zero matrix."""
    delta = as_actuator_set(delta, gramians.n)
    if not len(delta):
        return np.zeros((gramians.n, gramians.n))
    return gramians.per_node[delta.indices].sum(axis=0)


def energy_metric(gramians, delta, eps=0.0):
    """Average control energy ``tr((W_Delta + eps I)^-1)``.

    Eigenvalues of ``W_Delta`` at or below the controllability tolerance
    count as zero, so for ``eps == 0`` such sets evaluate to ``inf``.
    """
    if eps < 0:
        raise ParameterError(f'eps must be non-negative, got {eps!r}')
    W = assemble_gramian(gramians, delta)
    if eps > 0:
        return linalg.trace_perturbed_inverse(W, eps, gramians.controllability_tolerance)
    lam = np.linalg.eigvalsh(linalg.symmetrize(W))
    if lam[0] <= gramians.controllability_tolerance:
        return np.inf
    return float(np.sum(1.0 / lam))


@dataclass(frozen=True)
class ControllabilityReport:
    controllable: bool
    min_eigenvalue: float
    tolerance: float

    def __bool__(self):
        return self.controllable


def _single_gramian(sys, delta):
    Q = np.diag(delta.delta)
    if isinstance(sys.horizon, InfiniteHorizon):
        return linalg.solve_lyapunov(sys.A, Q)
    return _van_loan_gramian(sys.A, Q, sys.horizon.tau)


def is_controllable(source, delta):
    """Gramian test: is ``lambda_min(W_Delta)`` above the controllability tolerance?

    `source` is either a `NodeGramianSet` or a `LinearSystem`; for the latter
    only ``W_Delta`` and ``W_V`` are computed.
    """
    if isinstance(source, NodeGramianSet):
        delta = as_actuator_set(delta, source.n)
        W = assemble_gramian(source, delta)
        tol = source.controllability_tolerance
    else:
        delta = as_actuator_set(delta, source.n)
        W = _single_gramian(source, delta)
        W_full = _single_gramian(source, ActuatorSet.full(source.n))
        tol = CONTROLLABILITY_RTOL * (1.0 + np.trace(W_full) / source.n)
    lam_min = linalg.min_eigenvalue(W)
    return ControllabilityReport(bool(lam_min > tol), lam_min, tol)


def kalman_rank(A, delta):
    """Numerical rank of ``[B, AB, ..., A^{n-1} B]`` for ``B = diag(delta)``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    delta = as_actuator_set(delta, n)
    B = np.eye(n)[:, delta.indices]
    if B.shape[1] == 0:
        return 0
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    K = np.hstack(blocks)
    # column scaling keeps the powers of A from swamping the rank decision
    norms = np.linalg.norm(K, axis=0)
    K = K[:, norms > 0] / norms[norms > 0]
    return int(np.linalg.matrix_rank(K))


def min_transfer_energy(gramians, delta, x0, x1):
    """Minimum input energy ``d^T W_Delta^-1 d`` with ``d = x1 - e^{A tau} x0``.

    On an infinite horizon the drift term vanishes (A is Hurwitz).
    """
    n = gramians.n
    delta = as_actuator_set(delta, n)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    x1 = np.asarray(x1, dtype=float).reshape(-1)
    if x0.shape != (n,) or x1.shape != (n,):
        raise DimensionError(f'state vectors must have length {n}')
    report = is_controllable(gramians, delta)
    if not report:
        raise ControllabilityError(
            f'actuator set {delta} leaves the system uncontrollable '
            f'(lambda_min = {report.min_eigenvalue:.3g})')
    horizon = gramians.system.horizon
    if isinstance(horizon, FiniteHorizon):
        d = x1 - linalg.expm(gramians.system.A * horizon.tau) @ x0
    else:
        d = x1
    W = assemble_gramian(gramians, delta)
    c = scipy.linalg.cho_factor(W)
    return float(d @ scipy.linalg.cho_solve(c, d))

