# SPDX-License-Identifier: MIT-0

"""
JSON documents for matrices, maps and ket lists.

Reals are written with Python's shortest round-trip float representation (never more
than 17 significant digits), which makes dump-then-load bit-exact.
"""

import json
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, ParameterError

ROWS = 'rows'
COLS = 'cols'
DIMS = 'dims'
DATA = 'data'
D_IN = 'd_in'
D_OUT = 'd_out'
LABEL = 'label'


def _pair(value: complex) -> list:
    return [float(value.real), float(value.imag)]


def matrix_to_dict(m, dims: Optional[Sequence[int]] = None) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f'Only 2-d matrices serialize, got {m.ndim} dimensions')
    return {
        ROWS: int(m.shape[0]),
        COLS: int(m.shape[1]),
        DIMS: [int(d) for d in dims] if dims is not None else [int(m.shape[0])],
        DATA: [_pair(value) for value in m.ravel(order='C')],
    }


def matrix_from_dict(document: dict) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Rebuilds a matrix from its JSON document.
    @param document dict: {"rows", "cols", "dims", "data": [[re, im], ...]}
    @raises: ParameterError: Throws if a key is missing
    @raises: DimensionError: Throws if the entry count does not equal rows*cols
    @return: tuple: (matrix, dims)
    """
    try:
        rows, cols, data = int(document[ROWS]), int(document[COLS]), document[DATA]
    except KeyError as missing:
        raise ParameterError(f'Matrix document is missing key {missing}')
    if len(data) != rows * cols:
        raise DimensionError(f'Matrix document declares {rows}x{cols} but carries {len(data)} entries')
    values = np.array([complex(re, im) for re, im in data], dtype=complex)
    dims = tuple(int(d) for d in document.get(DIMS, [rows]))
    return values.reshape(rows, cols), dims


def map_to_dict(quantum_map) -> dict:
    document = matrix_to_dict(quantum_map.choi, (quantum_map.d_in, quantum_map.d_out))
    document.update({D_IN: quantum_map.d_in, D_OUT: quantum_map.d_out, LABEL: quantum_map.label})
    return document


def map_from_dict(document: dict):
    from .channels import QuantumMap

    choi, _ = matrix_from_dict(document)
    try:
        d_in, d_out = int(document[D_IN]), int(document[D_OUT])
    except KeyError as missing:
        raise ParameterError(f'Map document is missing key {missing}')
    return QuantumMap(d_in=d_in, d_out=d_out, choi=choi, label=document.get(LABEL))


def kets_to_list(kets) -> list:
    return [[_pair(value) for value in np.asarray(ket, dtype=complex).ravel()] for ket in kets]


def _builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'Object of type {type(value).__name__} is not JSON serializable')


def dumps(document) -> str:
    return json.dumps(document, sort_keys=True, separators=(',', ':'), default=_builtin)


def loads(text: str):
    return json.loads(text)
