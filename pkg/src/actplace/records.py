"""Serialization: run records, Gramian cache files and sweep CSVs.

JSON floats are written with Python's shortest round-trip repr, so every
value reloads bit-identically. Non-finite values, which strict JSON cannot
hold, are written as the strings ``"Infinity"``, ``"-Infinity"`` and
``"NaN"`` and restored on load.
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__, linalg
from .baselines import OracleResult
from .errors import InvalidInputError
from .placement import PlacementResult
from .system import InfiniteHorizon, LinearSystem, NodeGramianSet

__all__ = [
    'RunRecord',
    'dumps',
    'loads',
    'gramian_checksum',
    'gramian_cache_dict',
    'save_gramians',
    'load_gramians',
    'MIN_SWEEP_HEADER',
    'BUDGET_SWEEP_HEADER',
    'write_csv',
    'read_csv',
]

_NONFINITE = {'Infinity': math.inf, '-Infinity': -math.inf, 'NaN': math.nan}

MIN_SWEEP_HEADER = ('instance', 'k', 'E', 'size', 'delta', 'metric_exact', 'metric_eps',
                    'eps', 'bound_F', 'controllable', 'status')
BUDGET_SWEEP_HEADER = ('instance', 'r', 'size', 'delta', 'metric_exact', 'E_used',
                       'delta_C', 'fallback', 'status')


def _encode(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return 'NaN' if math.isnan(obj) else ('Infinity' if obj > 0 else '-Infinity')
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _encode(obj.item())
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _decode(obj):
    if isinstance(obj, str) and obj in _NONFINITE:
        return _NONFINITE[obj]
    if isinstance(obj, dict):
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def dumps(obj, indent=None):
    """Strict JSON with non-finite floats encoded as strings."""
    return json.dumps(_encode(obj), indent=indent, allow_nan=False, ensure_ascii=False)


def loads(text):
    return _decode(json.loads(text))


@dataclass
class RunRecord:
    """Inputs and outputs of one solver invocation."""

    instance: dict
    solver: str
    params: dict
    result: object
    wall_time: float = 0.0
    tool_version: str = __version__
    method_tag: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        kind = 'oracle' if isinstance(self.result, OracleResult) else 'placement'
        return {
            'instance': self.instance,
            'solver': self.solver,
            'params': self.params,
            'result_type': kind,
            'result': self.result.to_dict(),
            'wall_time': self.wall_time,
            'tool_version': self.tool_version,
            'method_tag': self.method_tag,
            'extra': self.extra,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get('result_type') == 'oracle':
            result = OracleResult.from_dict(d['result'])
        else:
            result = PlacementResult.from_dict(d['result'])
        return cls(d['instance'], d['solver'], d['params'], result, d['wall_time'],
                   d['tool_version'], d.get('method_tag'), d.get('extra', {}))

    def to_json(self, indent=2):
        return dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(loads(text))


def gramian_checksum(per_node):
    """SHA-256 of the little-endian float64 bytes of the per-node stack."""
    data = np.ascontiguousarray(per_node, dtype='<f8')
    return hashlib.sha256(data.tobytes()).hexdigest()


def _residuals(gramians):
    if not isinstance(gramians.system.horizon, InfiniteHorizon):
        return None
    n = gramians.n
    out = []
    for i in range(n):
        Q = np.zeros((n, n))
        Q[i, i] = 1.0
        out.append(float(linalg.lyapunov_residual(gramians.system.A, gramians.per_node[i], Q)))
    return out


def gramian_cache_dict(gramians, instance=None):
    residuals = _residuals(gramians)
    return {
        'format': 'actplace-gramians',
        'tool_version': __version__,
        'method_tag': gramians.method_tag,
        'instance': instance,
        'system': gramians.system.to_dict(),
        'per_node': gramians.per_node.tolist(),
        'checksum': gramian_checksum(gramians.per_node),
        'lyapunov_residuals': residuals,
        'max_lyapunov_residual': max(residuals) if residuals else None,
    }


def save_gramians(gramians, path, instance=None):
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(dumps(gramian_cache_dict(gramians, instance)))
        fh.write('\n')


def load_gramians(path):
    """Load a cache file, verifying its checksum."""
    try:
        with open(path, encoding='utf-8') as fh:
            d = loads(fh.read())
        per_node = np.array(d['per_node'], dtype=float)
        system = LinearSystem.from_dict(d['system'])
        tag, checksum = d['method_tag'], d['checksum']
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InvalidInputError(f'cannot read Gramian cache {path}: {exc}') from exc
    if gramian_checksum(per_node) != checksum:
        raise InvalidInputError(f'Gramian cache {path} fails its checksum')
    return NodeGramianSet(per_node, system, tag), d


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return 'true' if v else 'false'
    if isinstance(v, (float, np.floating)):
        return '%.17g' % v
    if v is None:
        return ''
    return str(v)


def write_csv(path_or_file, header, rows):
    """Write dict rows under a fixed header; floats get 17 significant digits."""
    def emit(fh):
        w = csv.writer(fh, lineterminator='\n')
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(row.get(col)) for col in header])

    if hasattr(path_or_file, 'write'):
        emit(path_or_file)
    else:
        with open(path_or_file, 'w', encoding='utf-8', newline='') as fh:
            emit(fh)


def read_csv(path):
    with open(path, encoding='utf-8', newline='') as fh:
        return list(csv.DictReader(fh))
