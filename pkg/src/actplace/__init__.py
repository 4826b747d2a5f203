"""Actuator placement for linear network systems under average-energy criteria.

Typical use::

    from actplace import chain_network, node_gramians, min_actuators_bounded_energy

    gramians = node_gramians(chain_network(5))
    result = min_actuators_bounded_energy(gramians, E=3.4e5)
    print(result.delta)
"""

__version__ = '0.1.0'

from .errors import (CertificationError, ControllabilityError, DimensionError,
                     InfeasibleError, InvalidInputError, ParameterError, PlacementError,
                     SizeError, StabilityError)
from .system import (ActuatorSet, FiniteHorizon, InfiniteHorizon, LinearSystem,
                     NodeGramianSet, assemble_gramian, energy_metric, is_controllable,
                     kalman_rank, min_transfer_energy, node_gramians)
from .placement import (PlacementResult, compute_bound_F, controlling_set,
                        greedy_min_actuators, marginal_gain, min_actuators_bounded_energy,
                        min_energy_budgeted)
from .baselines import (brute_force_min_actuators, brute_force_min_energy, fact2_bound,
                        naive_budget_greedy)
from .instances import (HittingSetInstance, RandomNetworkConfig, chain_network,
                        erdos_renyi_system, from_descriptor, hitting_set_system)

__all__ = [
    'ActuatorSet', 'CertificationError', 'ControllabilityError', 'DimensionError',
    'FiniteHorizon', 'HittingSetInstance', 'InfeasibleError', 'InfiniteHorizon',
    'InvalidInputError', 'LinearSystem', 'NodeGramianSet', 'ParameterError',
    'PlacementError', 'PlacementResult', 'RandomNetworkConfig', 'SizeError',
    'StabilityError', 'assemble_gramian', 'brute_force_min_actuators',
    'brute_force_min_energy', 'chain_network', 'compute_bound_F', 'controlling_set',
    'energy_metric', 'erdos_renyi_system', 'fact2_bound', 'from_descriptor',
    'greedy_min_actuators', 'hitting_set_system', 'is_controllable', 'kalman_rank',
    'marginal_gain', 'min_actuators_bounded_energy', 'min_energy_budgeted',
    'min_transfer_energy', 'naive_budget_greedy', 'node_gramians',
]
