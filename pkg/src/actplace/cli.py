"""Command-line front end.

Subcommands::

    actplace gramians INSTANCE --out CACHE [--method finite|infinite]
    actplace place-min SOURCE (--E E | --k-max J) [--c --a0 --eps --lazy]
    actplace place-budget SOURCE --r R [R ...] [--c --a0 --a0p --delta-C 1,3 --lazy]
    actplace verify SOURCE --suite NAME [--triples --seed --eps --r --l]
    actplace bench [--out-dir DIR] [--seed S] [--sizes 10 40]

SOURCE is a Gramian cache written by ``gramians`` or an instance
descriptor, whose Gramians are then computed on the fly. Parameters come
from flags, then ``--config FILE`` (a JSON object keyed by flag name with
underscores), then defaults. Sweeps honour ``ACTPLACE_WORKERS``.

Exit codes: 0 success, 2 infeasible, 3 invalid input, 4 certification
failure.
"""

import argparse
import json
import math
import os
import sys
import time

from . import __version__
from .errors import InvalidInputError, PlacementError
from .instances import chain_network, erdos_renyi_system, from_descriptor, RandomNetworkConfig
from .placement import greedy_min_actuators, min_actuators_bounded_energy, min_energy_budgeted
from .records import (BUDGET_SWEEP_HEADER, MIN_SWEEP_HEADER, RunRecord, dumps, load_gramians,
                      loads, save_gramians, write_csv)
from .sweeps import budget_sweep, energy_sweep
from .system import (ActuatorSet, FiniteHorizon, InfiniteHorizon, energy_metric,
                     node_gramians)
from .verify import run_suite

DEFAULTS = {
    'c': 1e-4,
    'a0': 1e-4,
    'a0p': 1e-4,
    'method': None,
    'lazy': False,
    'eps': None,
    'E': None,
    'k_max': None,
    'r': None,
    'delta_C': None,
    'suite': None,
    'triples': 1000,
    'l': None,
    'seed': None,
}

EXIT_OK = 0


def _read_json(path):
    try:
        with open(path, encoding='utf-8') as fh:
            return loads(fh.read())
    except OSError as exc:
        raise InvalidInputError(f'cannot read {path}: {exc}') from exc
    except ValueError as exc:
        raise InvalidInputError(f'{path} is not valid JSON: {exc}') from exc


def _resolve(args):
    """Merge flags over the config file over defaults."""
    config = _read_json(args.config) if getattr(args, 'config', None) else {}
    if not isinstance(config, dict):
        raise InvalidInputError('config file must hold a JSON object')
    params = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        if key == 'lazy':
            flag = True if flag else None
        params[key] = flag if flag is not None else config.get(key, default)
    return params


def _apply_method(system, method):
    if method is None:
        return system
    if method == 'infinite':
        return system.with_horizon(InfiniteHorizon())
    if isinstance(system.horizon, FiniteHorizon):
        return system
    return system.with_horizon(FiniteHorizon())


def _load_source(path, method=None, seed=None):
    """Gramians plus the instance descriptor from a cache or a descriptor file."""
    d = _read_json(path)
    if not isinstance(d, dict):
        raise InvalidInputError(f'{path} must hold a JSON object')
    if d.get('format') == 'actplace-gramians':
        gramians, meta = load_gramians(path)
        return gramians, meta.get('instance') or gramians.system.to_dict()
    if seed is not None and d.get('type') == 'er':
        d = {**d, 'seed': int(seed)}
    system = _apply_method(from_descriptor(d), method)
    return node_gramians(system), d


def _label(desc):
    if 'A' in desc:
        return f"inline n={len(desc['A'])}"
    return json.dumps(desc, sort_keys=True)


def _parse_set(text, n):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return ActuatorSet(tuple(int(i) for i in text), n)
    try:
        members = tuple(int(tok) for tok in str(text).replace('{', '').replace('}', '').split(',')
                        if tok.strip())
    except ValueError as exc:
        raise InvalidInputError(f'cannot parse actuator set {text!r}') from exc
    return ActuatorSet(members, n)


def _emit(text, out):
    if out:
        with open(out, 'w', encoding='utf-8') as fh:
            fh.write(text)
            if not text.endswith('\n'):
                fh.write('\n')
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')


def _emit_rows(header, rows, out):
    if out:
        write_csv(out, header, rows)
    else:
        write_csv(sys.stdout, header, rows)


def _summary(result):
    bits = [f'delta={result.delta}', f'size={len(result.delta)}',
            f'tr(W^-1)={result.metric_exact:.10g}', f'controllable={result.controllable}']
    if result.bound_F is not None:
        bits.append(f'F={result.bound_F:.6g}')
    return ' '.join(bits)


def cmd_gramians(args):
    p = _resolve(args)
    gramians, desc = _load_source(args.instance, p['method'], p['seed'])
    save_gramians(gramians, args.out, instance=desc)
    floor = energy_metric(gramians, ActuatorSet.full(gramians.n), 0.0)
    print(f'wrote {args.out}: n={gramians.n} method={gramians.method_tag} '
          f'tr(W_V^-1)={floor:.10g}', file=sys.stderr)
    return EXIT_OK


def cmd_place_min(args):
    p = _resolve(args)
    gramians, desc = _load_source(args.source, p['method'], p['seed'])
    if p['k_max'] is not None:
        rows = energy_sweep(gramians, range(1, int(p['k_max']) + 1), c=p['c'], a0=p['a0'],
                            lazy=p['lazy'], label=_label(desc))
        _emit_rows(MIN_SWEEP_HEADER, rows, args.out)
        return EXIT_OK
    if p['E'] is None:
        raise InvalidInputError('place-min needs --E or --k-max')
    E = float(p['E'])
    start = time.perf_counter()
    if p['eps'] is not None:
        solver, params = 'greedy_min_actuators', {'E': E, 'eps': float(p['eps']), 'lazy': p['lazy']}
        result = greedy_min_actuators(gramians, E, float(p['eps']), lazy=p['lazy'])
    else:
        solver, params = 'min_actuators_bounded_energy', {'E': E, 'c': p['c'], 'a0': p['a0'],
                                                          'lazy': p['lazy']}
        result = min_actuators_bounded_energy(gramians, E, c=p['c'], a0=p['a0'], lazy=p['lazy'])
    record = RunRecord(desc, solver, params, result, time.perf_counter() - start,
                       method_tag=gramians.method_tag)
    print(_summary(result), file=sys.stderr)
    _emit(record.to_json(), args.out)
    return EXIT_OK


def cmd_place_budget(args):
    p = _resolve(args)
    gramians, desc = _load_source(args.source, p['method'], p['seed'])
    budgets = p['r']
    if budgets is None:
        raise InvalidInputError('place-budget needs --r')
    budgets = [int(r) for r in (budgets if isinstance(budgets, list) else [budgets])]
    delta_C = _parse_set(p['delta_C'], gramians.n)
    if len(budgets) > 1:
        rows = budget_sweep(gramians, budgets, c=p['c'], a0=p['a0'], a0p=p['a0p'],
                            lazy=p['lazy'], delta_C=delta_C,
                            label=_label(desc))
        _emit_rows(BUDGET_SWEEP_HEADER, rows, args.out)
        return EXIT_OK
    r = budgets[0]
    start = time.perf_counter()
    result = min_energy_budgeted(gramians, r, delta_C=delta_C, c=p['c'], a0=p['a0'],
                                 a0p=p['a0p'], lazy=p['lazy'])
    params = {'r': r, 'c': p['c'], 'a0': p['a0'], 'a0p': p['a0p'], 'lazy': p['lazy'],
              'delta_C': list(delta_C.members) if delta_C else None}
    record = RunRecord(desc, 'min_energy_budgeted', params, result,
                       time.perf_counter() - start, method_tag=gramians.method_tag)
    print(_summary(result), file=sys.stderr)
    _emit(record.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args):
    p = _resolve(args)
    gramians, desc = _load_source(args.source, p['method'], p['seed'])
    suite = p['suite']
    kwargs = {}
    if suite == 'supermodularity':
        kwargs['triples'] = int(p['triples'])
    if suite in ('supermodularity', 'controllability_certificate') and p['seed'] is not None:
        kwargs['seed'] = int(p['seed'])
    if suite in ('supermodularity', 'fact1', 'fact2') and p['eps'] is not None:
        kwargs['eps'] = float(p['eps'])
    if suite == 'fact2':
        if p['r'] is not None:
            r = p['r']
            kwargs['budgets'] = tuple(int(x) for x in (r if isinstance(r, list) else [r]))
        if p['l'] is not None:
            kwargs['steps'] = (int(p['l']),)
    if suite == 'oracle':
        kwargs.update(c=p['c'], a0=p['a0'], lazy=p['lazy'])
    try:
        report = run_suite(suite, gramians, **kwargs)
    except ValueError as exc:
        if isinstance(exc, PlacementError):
            raise
        raise InvalidInputError(str(exc)) from exc
    report['instance'] = desc
    print(f"{suite}: {'pass' if report['passed'] else 'FAIL'} ({report['checks']} checks)",
          file=sys.stderr)
    _emit(dumps(report, indent=2), args.out)
    return EXIT_OK


def _chain_report():
    g = node_gramians(chain_network(5))
    sets = [(1,), (1, 2), (1, 3), (1, 4), (1, 5)]
    values = {str(ActuatorSet(s, 5)): energy_metric(g, s, 0.0) for s in sets}
    E15 = values['{1,5}']
    floor = energy_metric(g, ActuatorSet.full(5), 0.0)
    tight = min_actuators_bounded_energy(g, E15)
    loose = min_actuators_bounded_energy(g, 1e10 * floor)
    budget = {r: min_energy_budgeted(g, r, delta_C=ActuatorSet((1,), 5)) for r in range(1, 6)}
    return {
        'trace_values': values,
        'floor': floor,
        'min_actuators_at_E_15': str(tight.delta),
        'min_actuators_at_large_E': str(loose.delta),
        'budgeted': {r: {'delta': str(res.delta), 'value': res.metric_exact}
                     for r, res in budget.items()},
    }


def cmd_bench(args):
    p = _resolve(args)
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    seed = 1 if p['seed'] is None else int(p['seed'])
    summary = {'tool_version': __version__, 'seed': seed, 'chain': _chain_report(), 'random': {}}
    for n in args.sizes:
        start = time.perf_counter()
        system = erdos_renyi_system(RandomNetworkConfig(n, seed))
        g = node_gramians(system)
        label = json.dumps({'type': 'er', 'n': n, 'seed': seed}, sort_keys=True)
        k_rows = energy_sweep(g, range(1, 51), c=0.1, a0=1.0, lazy=True, label=label)
        r_rows = budget_sweep(g, range(1, 6), c=0.1, a0=1.0, a0p=1.0, lazy=True, label=label)
        write_csv(os.path.join(out_dir, f'er_n{n}_energy_sweep.csv'), MIN_SWEEP_HEADER, k_rows)
        write_csv(os.path.join(out_dir, f'er_n{n}_budget_sweep.csv'), BUDGET_SWEEP_HEADER, r_rows)
        summary['random'][n] = {
            'counts': [row['size'] for row in k_rows],
            'values': [row['metric_exact'] for row in r_rows],
            'seconds': time.perf_counter() - start,
        }
        print(f'n={n}: counts {summary["random"][n]["counts"]}', file=sys.stderr)
    with open(os.path.join(out_dir, 'summary.json'), 'w', encoding='utf-8') as fh:
        fh.write(dumps(summary, indent=2) + '\n')
    return EXIT_OK


def _float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'not a number: {text!r}') from None
    if math.isnan(value):
        raise argparse.ArgumentTypeError('NaN is not allowed')
    return value


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input, not the infeasibility code argparse would use
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(InvalidInputError.exit_code, f'{self.prog}: error: {message}\n')


def build_parser():
    parser = _Parser(prog='actplace', description=__doc__.split('\n')[0])
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(sp, source=True):
        if source:
            sp.add_argument('source', help='Gramian cache or instance descriptor (JSON)')
        sp.add_argument('--config', help='JSON file of parameter defaults')
        sp.add_argument('--out', help='output file (default: stdout)')
        sp.add_argument('--method', choices=['finite', 'infinite'], default=None)
        sp.add_argument('--seed', type=int, default=None)

    sp = sub.add_parser('gramians', help='compute and cache per-node Gramians')
    sp.add_argument('instance', help='instance descriptor (JSON)')
    sp.add_argument('--out', required=True)
    sp.add_argument('--config')
    sp.add_argument('--method', choices=['finite', 'infinite'], default=None)
    sp.add_argument('--seed', type=int, default=None)
    sp.set_defaults(func=cmd_gramians)

    sp = sub.add_parser('place-min', help='fewest actuators under an energy bound')
    common(sp)
    sp.add_argument('--E', type=_float, dest='E')
    sp.add_argument('--k-max', type=int, dest='k_max',
                    help='sweep E = 2^j tr(W_V^-1) for j = 1..K and write CSV')
    sp.add_argument('--c', type=_float)
    sp.add_argument('--a0', type=_float)
    sp.add_argument('--eps', type=_float, help='run the plain greedy at this eps')
    sp.add_argument('--lazy', action='store_true', default=None)
    sp.set_defaults(func=cmd_place_min)

    sp = sub.add_parser('place-budget', help='least energy with at most r actuators')
    common(sp)
    sp.add_argument('--r', type=int, nargs='+')
    sp.add_argument('--c', type=_float)
    sp.add_argument('--a0', type=_float)
    sp.add_argument('--a0p', type=_float)
    sp.add_argument('--delta-C', dest='delta_C', help='controllable seed set, e.g. 1,3')
    sp.add_argument('--lazy', action='store_true', default=None)
    sp.set_defaults(func=cmd_place_budget)

    sp = sub.add_parser('verify', help='run a property suite')
    common(sp)
    sp.add_argument('--suite', required=True,
                    choices=['supermodularity', 'controllability_certificate', 'oracle',
                             'fact1', 'fact2'])
    sp.add_argument('--triples', type=int)
    sp.add_argument('--eps', type=_float)
    sp.add_argument('--r', type=int, nargs='+')
    sp.add_argument('--l', type=int)
    sp.add_argument('--c', type=_float)
    sp.add_argument('--a0', type=_float)
    sp.add_argument('--lazy', action='store_true', default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser('bench', help='chain checks plus random-network sweeps')
    sp.add_argument('--out-dir', default='bench-out')
    sp.add_argument('--sizes', type=int, nargs='+', default=[10, 40])
    sp.add_argument('--seed', type=int, default=None)
    sp.add_argument('--config')
    sp.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PlacementError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return InvalidInputError.exit_code


if __name__ == '__main__':
    sys.exit(main())
