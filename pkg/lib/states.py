# SPDX-License-Identifier: MIT-0

"""Canonical states: maximally entangled, Weyl/Bell, isotropic, symmetric projectors, registry."""

import logging
import re
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .configuration import HERMITIAN_TOLERANCE, PSD_TOLERANCE, TRACE_TOLERANCE
from .errors import DimensionError, ParameterError
from .tensor_core import as_matrix, check_dims, check_square, min_eigenvalue, swap_operator

logger = logging.getLogger(__name__)

BELL_INDICES = {
    'phi+': (0, 0),
    'phi-': (0, 1),
    'psi+': (1, 0),
    'psi-': (1, 1),
}

# Single-qubit state used to illustrate the ideal transposition.
EXAMPLE_QUBIT = np.array([[0.322, 0.352 - 0.307j], [0.352 + 0.307j, 0.678]], dtype=complex)


def _frozen(m) -> np.ndarray:
    matrix = np.array(m, dtype=complex)
    matrix.flags.writeable = False
    return matrix


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive unit-trace operator with its subsystem dimensions."""
    matrix: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'dims', check_dims(self.dims, check_square(matrix)))

    @property
    def side(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class StateReport:
    valid: bool
    violations: List[Tuple[str, float]] = field(default_factory=list)
    state: Optional[DensityMatrix] = None


def validate_state(m, dims: Optional[Sequence[int]] = None) -> StateReport:
    """
    Checks the state axioms and reports every violated one with its magnitude.
    @param m: Square matrix
    @param dims: Subsystem dimensions, defaults to a single system
    @raises: DimensionError: Throws only if m is not square or dims do not fit
    @return: StateReport:
    """
    m = as_matrix(m)
    side = check_square(m)
    dims = check_dims(dims if dims is not None else (side,), side)

    violations = []
    asymmetry = float(np.max(np.abs(m - m.conj().T)))
    if asymmetry > HERMITIAN_TOLERANCE:
        violations.append(('hermiticity', asymmetry))
    trace_deviation = float(abs(np.trace(m) - 1.0))
    if trace_deviation > TRACE_TOLERANCE:
        violations.append(('trace', trace_deviation))
    lowest = min_eigenvalue(m)
    if lowest < -PSD_TOLERANCE:
        violations.append(('negative_eigenvalue', lowest))

    if violations:
        return StateReport(valid=False, violations=violations)
    return StateReport(valid=True, state=DensityMatrix(m, dims))


def make_state(m, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    """Like validate_state, but raises ParameterError listing the violations."""
    report = validate_state(m, dims)
    if not report.valid:
        details = ', '.join(f'{name}={value:.3e}' for name, value in report.violations)
        logger.error('[ERROR] make_state failed:{}'.format(details))
        raise ParameterError(f'Not a density matrix: {details}')
    return report.state


def pure_state(ket, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    ket = np.asarray(ket, dtype=complex).ravel()
    ket = ket / np.linalg.norm(ket)
    return DensityMatrix(np.outer(ket, ket.conj()), dims if dims is not None else (ket.size,))


def basis_ket(d: int, i: int) -> np.ndarray:
    ket = np.zeros(d, dtype=complex)
    ket[i] = 1.0
    return ket


def max_entangled_ket(d: int) -> np.ndarray:
    if d < 2:
        raise ParameterError(f'Maximally entangled state needs d >= 2, got {d}')
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def max_entangled(d: int) -> DensityMatrix:
    """|phi+_d> = sum_i |ii>/sqrt(d) as a density matrix on d x d."""
    return pure_state(max_entangled_ket(d), (d, d))


def shift_operator(d: int) -> np.ndarray:
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_operator(d: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def weyl_operator(d: int, m: int, n: int) -> np.ndarray:
    return np.linalg.matrix_power(shift_operator(d), m) @ np.linalg.matrix_power(clock_operator(d), n)


def weyl_basis_state(d: int, m: int, n: int) -> DensityMatrix:
    """(I (x) X^m Z^n)|phi+_d>; the d^2 choices of (m, n) form an orthonormal basis."""
    if d < 2:
        raise ParameterError(f'Weyl basis needs d >= 2, got {d}')
    if not (0 <= m < d and 0 <= n < d):
        raise ParameterError(f'Weyl indices ({m}, {n}) out of range for d={d}')
    ket = np.kron(np.eye(d), weyl_operator(d, m, n)) @ max_entangled_ket(d)
    return pure_state(ket, (d, d))


def bell_state(name: str) -> DensityMatrix:
    if name not in BELL_INDICES:
        raise ParameterError(f'Unknown Bell state {name!r}; expected one of {sorted(BELL_INDICES)}')
    return weyl_basis_state(2, *BELL_INDICES[name])


def isotropic(d: int, p: float) -> DensityMatrix:
    """(1-p) P+_d + p I/d^2; NPPT exactly for p < d/(d+1)."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f'Isotropic noise weight must lie in [0, 1], got {p}')
    matrix = (1.0 - p) * max_entangled(d).matrix + p * np.eye(d * d) / (d * d)
    return DensityMatrix(matrix, (d, d))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    side = int(np.prod(dims))
    return DensityMatrix(np.eye(side) / side, tuple(dims))


def sym_antisym_projectors(d: int) -> Tuple[np.ndarray, np.ndarray]:
    swap = swap_operator(d)
    identity = np.eye(d * d, dtype=complex)
    return (identity + swap) / 2, (identity - swap) / 2


def product_state(*states: DensityMatrix) -> DensityMatrix:
    if not states:
        raise ParameterError('product_state needs at least one factor')
    matrix = states[0].matrix
    dims = tuple(states[0].dims)
    for state in states[1:]:
        matrix = np.kron(matrix, state.matrix)
        dims += tuple(state.dims)
    return DensityMatrix(matrix, dims)


def as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def random_pure_ket(d: int, rng) -> np.ndarray:
    rng = as_rng(rng)
    ket = rng.normal(size=d) + 1j * rng.normal(size=d)
    return ket / np.linalg.norm(ket)


def random_state(dims: Sequence[int], rng, rank: Optional[int] = None) -> DensityMatrix:
    """Ginibre-ensemble state G G^dagger / tr, full rank unless rank is given."""
    rng = as_rng(rng)
    dims = tuple(dims)
    side = int(np.prod(dims))
    rank = side if rank is None else rank
    if not 1 <= rank <= side:
        raise ParameterError(f'Rank must lie in [1, {side}], got {rank}')
    ginibre = rng.normal(size=(side, rank)) + 1j * rng.normal(size=(side, rank))
    matrix = ginibre @ ginibre.conj().T
    matrix = (matrix + matrix.conj().T) / 2
    return DensityMatrix(matrix / np.trace(matrix).real, dims)


def _parse_arguments(text: str) -> dict:
    arguments = {}
    for item in filter(None, text.split(',')):
        if '=' not in item:
            raise ParameterError(f'State argument {item!r} is not of the form key=value')
        key, value = item.split('=', 1)
        arguments[key.strip()] = value.strip()
    return arguments


def named_state(name: str) -> DensityMatrix:
    """
    Resolves a registry name such as "bell:psi-" or "isotropic:d=3,p=0.5".
    @param name str: Registry name
    @raises: ParameterError: Throws on unknown names or malformed arguments
    @return: DensityMatrix:
    """
    match = re.fullmatch(r'([a-z]+):(.*)', name.strip())
    if not match:
        raise ParameterError(f'State name {name!r} is not of the form family:arguments')
    family, rest = match.groups()

    if family == 'bell':
        return bell_state(rest)
    if family == 'example' and rest == 'qubit':
        return make_state(EXAMPLE_QUBIT)

    arguments = _parse_arguments(rest)
    try:
        if family == 'maxent':
            return max_entangled(int(arguments['d']))
        if family == 'maxmixed':
            d = int(arguments['d'])
            return maximally_mixed((d, d))
        if family == 'isotropic':
            return isotropic(int(arguments['d']), float(arguments['p']))
        if family == 'weyl':
            return weyl_basis_state(int(arguments['d']), int(arguments['m']), int(arguments['n']))
    except KeyError as missing:
        raise ParameterError(f'State {name!r} is missing argument {missing}')
    except ValueError as error:
        if isinstance(error, (ParameterError, DimensionError)):
            raise
        raise ParameterError(f'State {name!r} has a malformed argument: {error}')

    raise ParameterError(f'Unknown state family {family!r}')
