"""Greedy placement against exhaustive search on small random networks.

For a few energy bounds the greedy set size is compared with the fewest
actuators that meet the same perturbed bound, next to the guarantee F.
"""

from actplace import (ActuatorSet, RandomNetworkConfig, brute_force_min_actuators,
                      energy_metric, erdos_renyi_system, min_actuators_bounded_energy,
                      node_gramians)


def main(seeds=range(5), n=8):
    for seed in seeds:
        g = node_gramians(erdos_renyi_system(RandomNetworkConfig(n, seed)))
        floor = energy_metric(g, ActuatorSet.full(n))
        for k in (2.0, 1e3, 1e8):
            res = min_actuators_bounded_energy(g, k * floor)
            opt = brute_force_min_actuators(g, k * floor, eps=res.eps_used)
            print(f'seed {seed} k = {k:7.0e}: greedy {len(res.delta)}, '
                  f'optimum {len(opt.optimal_set)}, F = {res.bound_F:.3g}, '
                  f'ratio {len(res.delta) / len(opt.optimal_set):.2f}')


if __name__ == '__main__':
    main()
