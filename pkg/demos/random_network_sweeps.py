"""Energy and budget sweeps on a random network.

Prints how the number of actuators falls as the energy bound grows and how
the achievable energy falls as the actuator budget grows.

Usage: ``python3 demos/random_network_sweeps.py [n] [seed]``.
"""

import sys

from actplace import RandomNetworkConfig, erdos_renyi_system, node_gramians
from actplace.sweeps import budget_sweep, energy_sweep


def main(n=10, seed=1):
    system, meta = erdos_renyi_system(RandomNetworkConfig(n, seed), return_metadata=True)
    print(f'n = {n}, seed = {seed}, edges = {meta.get("edges")}')
    g = node_gramians(system)
    print('  j   actuators')
    for j, row in zip(range(1, 51), energy_sweep(g)):
        if j % 5 == 0 or j == 1:
            print(f'{j:3d}   {row["size"]}')
    print('  r   tr(W^-1)')
    for row in budget_sweep(g):
        print(f'{row["r"]:3d}   {row["metric_exact"]:.6g}  {row.get("delta", "")}')


if __name__ == '__main__':
    args = [int(a) for a in sys.argv[1:3]]
    main(*args)
