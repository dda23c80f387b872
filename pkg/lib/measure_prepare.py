# SPDX-License-Identifier: MIT-0

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .channels import QuantumMap
from .configuration import PSD_TOLERANCE
from .errors import DimensionError, ParameterError
from .states import DensityMatrix, pure_state
from .tensor_core import as_matrix, min_eigenvalue

logger = logging.getLogger(__name__)

COMPLETENESS_TOLERANCE = 1e-9

# (weight, ket_a, ket_b) triples of a separable decomposition sum_i w_i |a_i><a_i| (x) |b_i><b_i|
Decomposition = Sequence[Tuple[float, np.ndarray, np.ndarray]]


def decomposition_operator(decomposition: Decomposition) -> np.ndarray:
    """sum_i w_i |a_i><a_i| (x) |b_i><b_i|."""
    total = None
    for weight, ket_a, ket_b in decomposition:
        ket = np.kron(np.asarray(ket_a, dtype=complex), np.asarray(ket_b, dtype=complex))
        term = weight * np.outer(ket, ket.conj())
        total = term if total is None else total + term
    if total is None:
        raise ParameterError('Empty decomposition')
    return total


@dataclass(frozen=True, eq=False)
class MeasurePrepareChannel:
    """Measure with a POVM, prepare the state attached to the outcome."""
    povm: Tuple[np.ndarray, ...]
    preparations: Tuple[DensityMatrix, ...]

    def __post_init__(self):
        if not self.povm or len(self.povm) != len(self.preparations):
            raise ParameterError(f'{len(self.povm)} POVM elements for {len(self.preparations)} preparations')
        povm = tuple(as_matrix(element) for element in self.povm)
        if any(element.shape != povm[0].shape for element in povm):
            raise DimensionError('POVM elements must share one shape')
        for index, element in enumerate(povm):
            lowest = min_eigenvalue(element)
            if lowest < -PSD_TOLERANCE:
                raise ParameterError(f'POVM element {index} is not PSD (eigenvalue {lowest:.3e})')
        if any(state.side != self.preparations[0].side for state in self.preparations):
            raise DimensionError('Preparations must share one dimension')
        object.__setattr__(self, 'povm', povm)
        deviation = self.completeness_deviation()
        if deviation > COMPLETENESS_TOLERANCE:
            raise ParameterError(f'Incomplete POVM: sum of elements deviates from I by {deviation:.3e}')

    @property
    def d_in(self) -> int:
        return self.povm[0].shape[0]

    @property
    def d_out(self) -> int:
        return self.preparations[0].side

    def completeness_deviation(self) -> float:
        total = sum(self.povm)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    def apply(self, rho) -> np.ndarray:
        x = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
        return sum(np.trace(element @ x) * state.matrix for element, state in zip(self.povm, self.preparations))

    def to_map(self, label: Optional[str] = None) -> QuantumMap:
        """Choi (1/d_in) sum_i M_i^T (x) sigma_i of the induced channel."""
        choi = sum(np.kron(element.T, state.matrix) for element, state in zip(self.povm, self.preparations))
        return QuantumMap(self.d_in, self.d_out, choi / self.d_in, label or 'measure_prepare')


def measure_prepare_from(decomposition: Decomposition, d_in: Optional[int] = None) -> MeasurePrepareChannel:
    """
    Turns sum_i w_i |e_i><e_i| (x) |f_i><f_i| into measure |e_i*> with weight d_in w_i, prepare |f_i>.
    @param decomposition: (weight, ket_a, ket_b) triples with positive weights and unit kets
    @param d_in int: Input dimension, inferred from the first ket when omitted
    @raises: ParameterError: Throws on non-positive weights or an incomplete POVM
    @return: MeasurePrepareChannel: whose induced Choi equals the decomposed operator
    """
    terms = list(decomposition)
    if not terms:
        raise ParameterError('Empty decomposition')
    d_in = d_in or np.asarray(terms[0][1]).size
    povm, preparations = [], []
    for weight, ket_a, ket_b in terms:
        if weight <= 0:
            raise ParameterError(f'Decomposition weights must be positive, got {weight}')
        ket_a = np.asarray(ket_a, dtype=complex).ravel()
        if ket_a.size != d_in:
            raise DimensionError(f'Measurement ket of size {ket_a.size} does not match d_in={d_in}')
        conjugate = ket_a.conj() / np.linalg.norm(ket_a)
        povm.append(d_in * weight * np.outer(conjugate, conjugate.conj()))
        preparations.append(pure_state(ket_b))
    logger.info(f'[INFO] measure_prepare_from() built {len(povm)} POVM elements for d_in={d_in}')
    return MeasurePrepareChannel(tuple(povm), tuple(preparations))


def reconstruction_residual(decomposition: Iterable, target) -> float:
    return float(np.max(np.abs(decomposition_operator(list(decomposition)) - as_matrix(target))))
