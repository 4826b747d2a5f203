"""System families: integrator chains, stabilized random networks, hitting-set reductions."""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, ParameterError
from .system import FiniteHorizon, InfiniteHorizon, LinearSystem, horizon_from_dict

__all__ = [
    'chain_network',
    'RandomNetworkConfig',
    'erdos_renyi_system',
    'HittingSetInstance',
    'HittingSetSystem',
    'hitting_set_system',
    'hitting_set_inverse_rows',
    'random_hitting_set',
    'from_descriptor',
]


DEGENERATE_MARGIN = 1e-6


def chain_network(n, horizon=None):
    """Directed path 1 -> 2 -> ... -> n with unit self-decay.

    ``A_ii = -1`` and ``A_{i+1,i} = 1``; default horizon is ``[0, 1]``.
    """
    if n < 1:
        raise ParameterError(f'chain needs n >= 1, got {n}')
    A = -np.eye(n) + np.diag(np.ones(n - 1), -1)
    return LinearSystem(A, horizon or FiniteHorizon(0.0, 1.0))


@dataclass(frozen=True)
class RandomNetworkConfig:
    n: int
    seed: int = 0
    stabilization_factor: float = 1.1

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f'random network needs n >= 2, got {self.n}')

    @property
    def edge_probability(self):
        return min(1.0, 2.0 * math.log(self.n) / self.n)


def erdos_renyi_system(cfg, return_metadata=False):
    """Directed Erdos-Renyi network with Gaussian weights, shifted to be Hurwitz.

    Every ordered pair, diagonal included, is an edge with probability
    ``2 log(n) / n``; draws are row-major from ``numpy``'s PCG64 seeded with
    ``cfg.seed`` (all Bernoulli draws first, then one standard normal per edge
    in the same order). If the rightmost eigenvalue has real part ``rho >= 0``
    the matrix is shifted by ``-1.1 rho I``; already-stable draws are kept.
    When that leaves the rightmost part above ``-1e-6`` (``rho`` at zero) the
    shift becomes ``rho + 0.1`` instead.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n, p = cfg.n, cfg.edge_probability
    adjacency = rng.random((n, n)) < p
    A = np.zeros((n, n))
    A[adjacency] = rng.standard_normal(int(adjacency.sum()))
    rho = float(np.max(np.linalg.eigvals(A).real))
    shift = cfg.stabilization_factor * rho if rho >= 0 else 0.0
    # a rightmost part at (or within round-off of) zero, e.g. an empty draw,
    # leaves the scaled shift with no margin; fall back to a unit-scale one
    fallback = rho - shift > -DEGENERATE_MARGIN
    if fallback:
        shift = rho + (cfg.stabilization_factor - 1.0)
    A -= shift * np.eye(n)
    system = LinearSystem(A, InfiniteHorizon())
    if return_metadata:
        return system, {'edge_probability': p, 'edges': int(adjacency.sum()),
                        'raw_rightmost_real': rho, 'shift': shift,
                        'unit_shift_fallback': bool(fallback)}
    return system


@dataclass(frozen=True)
class HittingSetInstance:
    """Collection of non-empty subsets of the elements ``1..m``."""

    m: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(tuple(sorted(set(int(j) for j in s))) for s in self.sets)
        if self.m < 1 or not sets:
            raise InvalidInputError('hitting-set instance needs m >= 1 and at least one set')
        for s in sets:
            if not s:
                raise InvalidInputError('hitting-set instance has an empty set')
            if s[0] < 1 or s[-1] > self.m:
                raise InvalidInputError(f'set {s} has elements outside 1..{self.m}')
        covered = set().union(*sets)
        if len(covered) != self.m:
            missing = sorted(set(range(1, self.m + 1)) - covered)
            raise InvalidInputError(f'elements {missing} appear in no set')
        object.__setattr__(self, 'sets', sets)

    @property
    def p(self):
        return len(self.sets)

    @property
    def incidence(self):
        C = np.zeros((self.p, self.m))
        for i, s in enumerate(self.sets):
            C[i, np.array(s) - 1] = 1.0
        return C

    def hits(self, elements):
        elements = set(elements)
        return all(elements.intersection(s) for s in self.sets)


@dataclass(frozen=True, eq=False)
class HittingSetSystem:
    system: LinearSystem
    instance: HittingSetInstance
    V: np.ndarray
    blocks: dict = field(default_factory=dict)


def _similarity_matrix(inst):
    m, p = inst.m, inst.p
    n = m + p + 1
    V = np.zeros((n, n))
    V[:m, :m] = 2.0 * np.eye(m)
    V[:m, n - 1] = 1.0
    V[m:m + p, :m] = inst.incidence
    V[m:m + p, m:m + p] = (m + 1.0) * np.eye(p)
    V[n - 1, n - 1] = 1.0
    return V


def hitting_set_inverse_rows(inst):
    """Closed-form inverse of the similarity matrix, row by row."""
    m, p = inst.m, inst.p
    n = m + p + 1
    Vinv = np.zeros((n, n))
    for i in range(m):
        Vinv[i, i] = 0.5
        Vinv[i, n - 1] = -0.5
    for k, s in enumerate(inst.sets):
        i = m + k
        Vinv[i, i] = 1.0 / (m + 1)
        Vinv[i, np.array(s) - 1] = -1.0 / (2 * (m + 1))
        Vinv[i, n - 1] = len(s) / (2 * (m + 1))
    Vinv[n - 1, n - 1] = 1.0
    return Vinv


def hitting_set_system(inst, horizon=None):
    """``A = V^-1 D V`` with ``D = diag(1..n)``, ``n = m + p + 1``.

    `V` stacks ``[2I, 0, 1]``, ``[C, (m+1)I, 0]`` and ``[0, 0, 1]`` by block
    rows. Construction checks strict diagonal dominance of `V` and its
    closed-form inverse before returning.
    """
    V = _similarity_matrix(inst)
    n = V.shape[0]
    diag = np.abs(np.diag(V))
    off = np.abs(V).sum(axis=1) - diag
    if not np.all(diag > off):
        raise InvalidInputError('similarity matrix is not strictly diagonally dominant')
    Vinv = hitting_set_inverse_rows(inst)
    if not np.allclose(Vinv @ V, np.eye(n), rtol=0, atol=1e-12):
        raise InvalidInputError('closed-form inverse does not match the similarity matrix')
    D = np.diag(np.arange(1.0, n + 1))
    A = scipy.linalg.solve(V, D @ V)
    blocks = {'elements': (1, inst.m), 'sets': (inst.m + 1, inst.m + inst.p), 'tail': n}
    return HittingSetSystem(LinearSystem(A, horizon or FiniteHorizon(0.0, 1.0)), inst, V, blocks)


def random_hitting_set(m, p, rng):
    """Random instance with every element covered; `rng` is a numpy Generator."""
    while True:
        sets = []
        for _ in range(p):
            size = int(rng.integers(1, m + 1))
            sets.append(tuple(int(j) for j in rng.choice(np.arange(1, m + 1), size, replace=False)))
        if len(set().union(*sets)) == m:
            return HittingSetInstance(m, tuple(sets))


def from_descriptor(desc):
    """Resolve an instance descriptor or an inline system description.

    Descriptors are ``{"type": "chain", "n": ...}``,
    ``{"type": "er", "n": ..., "seed": ...}`` or
    ``{"type": "hitting_set", "m": ..., "sets": [[...], ...]}``, each with an
    optional ``"horizon"``. Anything carrying an ``"A"`` key is read as a
    system file.
    """
    if 'A' in desc:
        return LinearSystem.from_dict(desc)
    kind = desc.get('type')
    horizon = horizon_from_dict(desc['horizon']) if 'horizon' in desc else None
    try:
        if kind == 'chain':
            return chain_network(int(desc['n']), horizon)
        if kind == 'er':
            sys = erdos_renyi_system(RandomNetworkConfig(int(desc['n']), int(desc.get('seed', 0))))
            return sys.with_horizon(horizon) if horizon else sys
        if kind == 'hitting_set':
            inst = HittingSetInstance(int(desc['m']), tuple(tuple(s) for s in desc['sets']))
            return hitting_set_system(inst, horizon).system
    except KeyError as exc:
        raise InvalidInputError(f'descriptor of type {kind!r} is missing {exc}') from exc
    raise InvalidInputError(f'unknown instance type {kind!r}')
