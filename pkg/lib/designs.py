# SPDX-License-Identifier: MIT-0

"""
Complex projective two-designs: MUB families for prime d, the qubit tetrahedron and the
qutrit nine-state SIC set, plus the measure-and-prepare channels they induce.

A set {x_k} of N unit kets is a two-design when (1/N) sum_k P_k (x) P_k = 2 S_d / (d(d+1)),
S_d being the projector onto the symmetric subspace.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import sympy

from .errors import ParameterError
from .measure_prepare import MeasurePrepareChannel, measure_prepare_from
from .states import sym_antisym_projectors

logger = logging.getLogger(__name__)

MUB = 'MUB'
SIC = 'SIC'
CUSTOM = 'custom'

PHASE_TOLERANCE = 1e-9
CHANNEL_RESIDUAL_TOLERANCE = 1e-8
DEFAULT_TETRAHEDRON_PHASES = (0.0, np.pi / 3, -np.pi / 3)


@dataclass(frozen=True, eq=False)
class DesignSet:
    kind: str
    dim: int
    vectors: np.ndarray
    residual: float
    bases: Optional[Tuple[Tuple[int, ...], ...]] = None

    def __len__(self):
        return self.vectors.shape[0]


def _frame_residual(vectors: np.ndarray, d: int) -> float:
    projectors = np.einsum('ki,kj->kij', vectors, vectors.conj())
    frame = sum(np.kron(projector, projector) for projector in projectors) / len(vectors)
    symmetric, _ = sym_antisym_projectors(d)
    return float(np.max(np.abs(frame - 2 * symmetric / (d * (d + 1)))))


def _build(kind: str, d: int, vectors, bases=None) -> DesignSet:
    vectors = np.array(vectors, dtype=complex)
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    vectors.flags.writeable = False
    return DesignSet(kind=kind, dim=d, vectors=vectors, residual=_frame_residual(vectors, d), bases=bases)


def two_design_check(design: DesignSet) -> float:
    """Max elementwise |(1/N) sum P (x) P - 2 S_d/(d(d+1))|."""
    if len(design) == 0:
        raise ParameterError('Two-design check needs a nonempty set')
    return _frame_residual(design.vectors, design.dim)


def custom_design(vectors: Sequence) -> DesignSet:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    return _build(CUSTOM, vectors.shape[1], vectors)


def mub(d: int) -> DesignSet:
    """
    Complete set of d + 1 mutually unbiased bases for prime d.

    d = 2 uses the Pauli eigenbases (z, x, y); odd primes use the computational basis
    and the Weyl-Heisenberg eigenbases with amplitudes w^(a j^2 + b j)/sqrt(d).
    @raises: ParameterError: Throws if d is not prime
    @return: DesignSet:
    """
    if not sympy.isprime(int(d)):
        raise ParameterError(f'MUB construction needs a prime dimension, got {d}')
    d = int(d)
    if d == 2:
        s = 1 / np.sqrt(2)
        vectors = [
            [1, 0], [0, 1],
            [s, s], [s, -s],
            [s, 1j * s], [s, -1j * s],
        ]
    else:
        omega = np.exp(2j * np.pi / d)
        j = np.arange(d)
        vectors = list(np.eye(d))
        for a in range(d):
            for b in range(d):
                vectors.append(omega ** ((a * j * j + b * j) % d) / np.sqrt(d))
    bases = tuple(tuple(range(k * d, (k + 1) * d)) for k in range(d + 1))
    return _build(MUB, d, vectors, bases)


def tetrahedron_phases(t: float = 0.0) -> Tuple[float, float, float]:
    """One-parameter family (t, t + pi/3, t - pi/3) of solutions of the phase condition."""
    return t, t + np.pi / 3, t - np.pi / 3


def tetrahedron(phases: Sequence[float] = DEFAULT_TETRAHEDRON_PHASES) -> np.ndarray:
    """
    Qubit SIC kets from the magic-basis construction of the SPAed transpose Choi S_2/3.

    The four sign patterns of (1/2)(+-e^{i t2} x2 +- e^{i t3} x3 +- e^{i t4} x4), with
    x2 ~ psi+, x3 ~ phi-, x4 ~ i phi+ (weight 1/3 each), are symmetric product vectors
    (1/2)|v>|v> exactly when e^{-2i t2} + e^{-2i t3} + e^{-2i t4} = 0.
    @raises: ParameterError: Throws if the phases violate that condition
    @return: np.ndarray: 4 x 2 array of unit kets
    """
    theta = np.asarray(phases, dtype=float)
    if theta.shape != (3,):
        raise ParameterError(f'Tetrahedron needs three phases, got {phases}')
    violation = abs(np.sum(np.exp(-2j * theta)))
    if violation > PHASE_TOLERANCE:
        raise ParameterError(f'Phases {tuple(phases)} violate the product condition by {violation:.3e}')

    s = 1 / np.sqrt(2)
    psi_plus = np.array([0, s, s, 0], dtype=complex)
    phi_minus = np.array([s, 0, 0, -s], dtype=complex)
    phi_plus = np.array([s, 0, 0, s], dtype=complex)
    magic = np.array([psi_plus, phi_minus, 1j * phi_plus]) / np.sqrt(3)
    signs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])

    kets = []
    for pattern in signs:
        z = 0.5 * (pattern * np.exp(1j * theta)) @ magic
        u, singular, _ = np.linalg.svd(z.reshape(2, 2))
        if singular[1] > PHASE_TOLERANCE:
            raise ParameterError(f'Magic-basis vector is not a product (second singular value {singular[1]:.3e})')
        kets.append(u[:, 0])
    return np.array(kets)


def _qutrit_sic() -> np.ndarray:
    w = np.exp(2j * np.pi / 3)
    kets = []
    for k in (1, 2, 3):
        kets.append([1, w ** k, 0])
        kets.append([0, 1, w ** k])
        kets.append([w ** k, 0, 1])
    return np.array(kets, dtype=complex) / np.sqrt(2)


def sic(d: int, phases: Optional[Sequence[float]] = None) -> DesignSet:
    """
    SIC set for d = 2 (tetrahedron, optional phases) or d = 3 (nine states).
    @raises: ParameterError: Throws for other dimensions or invalid phases
    @return: DesignSet:
    """
    if d == 2:
        return _build(SIC, 2, tetrahedron(phases if phases is not None else DEFAULT_TETRAHEDRON_PHASES))
    if phases is not None:
        raise ParameterError('Phases only apply to the qubit tetrahedron')
    if d == 3:
        return _build(SIC, 3, _qutrit_sic())
    raise ParameterError(f'SIC sets are provided for d in (2, 3), got {d}')


def overlap_check(design: DesignSet) -> float:
    """Max deviation from the SIC or MUB overlap relations (0 for custom sets)."""
    gram = np.abs(design.vectors.conj() @ design.vectors.T) ** 2
    d = design.dim
    if design.kind == SIC:
        expected = np.full_like(gram, 1 / (d + 1))
        np.fill_diagonal(expected, 1.0)
        return float(np.max(np.abs(gram - expected)))
    if design.kind == MUB:
        expected = np.full_like(gram, 1 / d)
        for basis in design.bases:
            block = np.ix_(basis, basis)
            expected[block] = np.eye(len(basis))
        return float(np.max(np.abs(gram - expected)))
    return 0.0


def design_decomposition(design: DesignSet, conjugate_measurement: bool = True):
    """(1/N, x, x) triples, or (1/N, x*, x) when the measurement uses the kets themselves."""
    weight = 1.0 / len(design)
    return [
        (weight, ket if conjugate_measurement else ket.conj(), ket)
        for ket in design.vectors
    ]


def design_channel(design: DesignSet, conjugate_measurement: bool = True) -> MeasurePrepareChannel:
    """
    Measure {(d/N)|x*><x*|}, prepare |x><x|; the induced Choi is 2 S_d/(d(d+1)).
    @raises: ParameterError: Throws if the set fails the two-design check at 1e-8
    @return: MeasurePrepareChannel:
    """
    residual = two_design_check(design)
    if residual > CHANNEL_RESIDUAL_TOLERANCE:
        raise ParameterError(f'Set of kind {design.kind} is not a two-design (residual {residual:.3e})')
    logger.info(f'[INFO] design_channel() {design.kind} d={design.dim} residual={residual:.2e}')
    return measure_prepare_from(design_decomposition(design, conjugate_measurement), d_in=design.dim)
