"""Five-node chain: trace values, bounded-energy placement and budgeted placement.

Run with ``python3 demos/chain_walkthrough.py``.
"""

from actplace import (ActuatorSet, brute_force_min_energy, chain_network, energy_metric,
                      min_actuators_bounded_energy, min_energy_budgeted, node_gramians)


def main():
    g = node_gramians(chain_network(5))
    floor = energy_metric(g, ActuatorSet.full(5))
    print(f'tr(W_V^-1) = {floor:.6g}')
    for s in [(1,), (1, 2), (1, 3), (1, 4), (1, 5)]:
        print(f'  tr(W^-1) for {ActuatorSet(s, 5)}: {energy_metric(g, s):.6g}')

    # node 1 is the only single actuator that controls the chain; adding
    # node 3 buys far more than its neighbour 2
    E = energy_metric(g, (1, 5))
    for bound in (E, 1e10 * floor):
        res = min_actuators_bounded_energy(g, bound)
        print(f'E = {bound:.4g}: {res.delta}, tr(W^-1) = {res.metric_exact:.6g}, '
              f'eps = {res.eps_used:.3g}, F = {res.bound_F:.3g}')

    print('budgeted placement against exhaustive search:')
    for r in range(1, 6):
        res = min_energy_budgeted(g, r)
        best = brute_force_min_energy(g, r)
        print(f'  r = {r}: {res.delta} ({res.metric_exact:.6g}), '
              f'optimum {best.optimal_set} ({best.optimal_value:.6g})')


if __name__ == '__main__':
    main()
