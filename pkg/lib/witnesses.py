# SPDX-License-Identifier: MIT-0

"""
Entanglement witnesses built from positive maps.

A Hermitian W is a witness when <e f|W|e f> >= 0 for every product vector and
tr[W rho] < 0 for some entangled rho. Block positivity is only ever checked
heuristically, by the multi-start product search in `search`.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .channels import QuantumMap, adjoint, apply, classify, CERTIFIED_NONPOSITIVE, tensor_with_identity
from .configuration import (
    CLOSED_FORM_TOLERANCE, KERNEL_TOLERANCE, PSD_TOLERANCE, VERDICT_MARGIN, WITNESS_STARTS,
    WITNESS_TOLERANCE, get_setting,
)
from .errors import DimensionError, NumericalError, ParameterError
from .search import ProductSearchResult, minimize_product_expectation
from .spa import bisect_mixing, mixing_parameter
from .states import DensityMatrix
from .tensor_core import as_matrix, check_dims, check_square, hermitize, min_eigenvalue

logger = logging.getLogger(__name__)

DETECTED = 'detected'
NOT_DETECTED = 'not_detected'

SPAN_RANK_TOLERANCE = 1e-6
COEFFICIENT_CUTOFF = 1e-14


@dataclass(frozen=True, eq=False)
class Witness:
    operator: np.ndarray
    dims: Tuple[int, int]
    trace_normalized: bool = False

    def __post_init__(self):
        operator = as_matrix(self.operator)
        dims = check_dims(self.dims, check_square(operator))
        if len(dims) != 2:
            raise DimensionError(f'A witness acts on a bipartite space, got dims {dims}')
        asymmetry = float(np.max(np.abs(operator - operator.conj().T)))
        if asymmetry > 1e-12 * max(1.0, float(np.max(np.abs(operator)))):
            raise ParameterError(f'Witness operator is not Hermitian (deviation {asymmetry:.3e})')
        operator = hermitize(operator)
        operator.flags.writeable = False
        object.__setattr__(self, 'operator', operator)
        object.__setattr__(self, 'dims', dims)
        object.__setattr__(self, 'trace_normalized', abs(np.trace(operator).real - 1.0) <= 1e-12)

    @property
    def is_positive_operator(self) -> bool:
        return min_eigenvalue(self.operator) >= -PSD_TOLERANCE


@dataclass(frozen=True)
class WitnessValue:
    value: float
    verdict: str

    @property
    def detected(self) -> bool:
        return self.verdict == DETECTED


@dataclass(frozen=True, eq=False)
class SpaWitness:
    """(1 - p*) W + p* I/D; tr[state rho] < threshold exactly when tr[W rho] < 0."""
    state: DensityMatrix
    p_star: float
    threshold: float
    negativity: float

    def value(self, rho: DensityMatrix) -> float:
        if rho.dims != self.state.dims:
            raise DimensionError(f'State dims {rho.dims} do not match witness dims {self.state.dims}')
        return float(np.trace(self.state.matrix @ rho.matrix).real)

    def detects(self, rho: DensityMatrix) -> bool:
        return self.value(rho) < self.threshold - VERDICT_MARGIN


@dataclass(frozen=True, eq=False)
class LocalTerm:
    coefficient: float
    povm_a: np.ndarray
    povm_b: np.ndarray


@dataclass(frozen=True, eq=False)
class LocalDecomposition:
    terms: Tuple[LocalTerm, ...]
    dims: Tuple[int, int]

    def __len__(self):
        return len(self.terms)

    def reconstruct(self) -> np.ndarray:
        side = self.dims[0] * self.dims[1]
        return sum((term.coefficient * np.kron(term.povm_a, term.povm_b) for term in self.terms),
                   np.zeros((side, side), dtype=complex))

    def expectation(self, rho) -> float:
        """sum_k c_k tr[(A_k (x) B_k) rho], the quantity local POVM statistics estimate."""
        matrix = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
        return float(sum(term.coefficient * np.trace(np.kron(term.povm_a, term.povm_b) @ matrix).real
                         for term in self.terms))


@dataclass(frozen=True, eq=False)
class WitnessStep:
    candidate: np.ndarray
    still_witness: bool
    product_minimum: float


@dataclass(frozen=True, eq=False)
class SpanningReport:
    kernel_states: Tuple[np.ndarray, ...]
    span_dimension: int
    has_spanning_property: bool


def witness_from_map(lambda_map: QuantumMap, q=None, check_positive: bool = False) -> Witness:
    """
    W = (id (x) Lambda)[P+], i.e. the Choi matrix, or (id (x) Lambda^dagger)[Q] for a given Q.
    @param lambda_map QuantumMap: Positive, non-CP map
    @param q: Optional PSD operator on d_A (x) d_out
    @param check_positive bool: Run the heuristic positivity search and reject certified non-positive maps
    @raises: ParameterError: Throws if Q is not PSD, or a checked map is certified non-positive
    @return: Witness:
    """
    if check_positive:
        estimate = classify(lambda_map).positivity_estimate
        if estimate.status == CERTIFIED_NONPOSITIVE:
            raise ParameterError(f'{lambda_map.label} is not positive (product value {estimate.minimum:.3e})')

    if min_eigenvalue(lambda_map.choi) >= -PSD_TOLERANCE:
        logger.warning(f'{lambda_map.label} is completely positive; its witness detects nothing')

    if q is None:
        return Witness(lambda_map.choi, lambda_map.dims)

    q = as_matrix(q)
    side = check_square(q)
    if side % lambda_map.d_out:
        raise DimensionError(f'Q of side {side} does not factor over d_out={lambda_map.d_out}')
    if min_eigenvalue(q) < -PSD_TOLERANCE:
        raise ParameterError('Q must be positive semidefinite')
    d_a = side // lambda_map.d_out
    operator = apply(tensor_with_identity(adjoint(lambda_map), d_a), q)
    return Witness(operator, (d_a, lambda_map.d_in))


def evaluate_witness(w: Witness, rho: DensityMatrix) -> WitnessValue:
    if rho.dims != w.dims:
        raise DimensionError(f'State dims {rho.dims} do not match witness dims {w.dims}')
    value = float(np.trace(w.operator @ rho.matrix).real)
    return WitnessValue(value=value, verdict=DETECTED if value < -VERDICT_MARGIN else NOT_DETECTED)


def spa_witness(w: Witness) -> SpaWitness:
    """
    Least noise p* making the witness a state; a PSD witness returns p* = 0 and threshold 0.
    @raises: ParameterError: Throws if tr W is not positive
    @raises: NumericalError: Throws if closed form and bisection disagree
    @return: SpaWitness:
    """
    operator = w.operator
    if not w.trace_normalized:
        trace = float(np.trace(operator).real)
        if trace <= 0:
            raise ParameterError(f'Witness trace {trace:.3e} cannot be normalized')
        logger.warning(f'Witness trace is {trace:.6g}; normalizing to 1')
        operator = operator / trace

    dimension = w.dims[0] * w.dims[1]
    lowest = min_eigenvalue(operator)
    if lowest >= -PSD_TOLERANCE:
        return SpaWitness(DensityMatrix(operator, w.dims), p_star=0.0, threshold=0.0, negativity=0.0)

    noise = np.eye(dimension) / dimension
    p_star = mixing_parameter(lowest, dimension)
    checked = bisect_mixing(operator, noise)
    if abs(checked - p_star) > CLOSED_FORM_TOLERANCE:
        raise NumericalError(f'Witness p*={p_star:.12f} disagrees with bisection {checked:.12f}')
    state = DensityMatrix((1 - p_star) * operator + p_star * noise, w.dims)
    return SpaWitness(state, p_star=p_star, threshold=p_star / dimension, negativity=-lowest)


def gell_mann_basis(d: int) -> List[np.ndarray]:
    """Identity/sqrt(d) followed by the d^2 - 1 generalized Gell-Mann matrices, HS-orthonormal."""
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            symmetric = np.zeros((d, d), dtype=complex)
            symmetric[j, k] = symmetric[k, j] = 1 / np.sqrt(2)
            antisymmetric = np.zeros((d, d), dtype=complex)
            antisymmetric[j, k], antisymmetric[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            basis += [symmetric, antisymmetric]
    for level in range(1, d):
        diagonal = np.zeros(d, dtype=complex)
        diagonal[:level] = 1
        diagonal[level] = -level
        basis.append(np.diag(diagonal) / np.sqrt(level * (level + 1)))
    return basis


def _psd_frame(d: int) -> Tuple[List[np.ndarray], np.ndarray]:
    """PSD operators P_0 = I, P_k = G_k + s_k I and the matrix T with G_i = sum_a T_ia P_a."""
    basis = gell_mann_basis(d)
    frame = [np.eye(d, dtype=complex)]
    change = np.zeros((d * d, d * d))
    change[0, 0] = 1 / np.sqrt(d)
    for index, element in enumerate(basis[1:], start=1):
        shift = max(0.0, -min_eigenvalue(element))
        frame.append(element + shift * np.eye(d))
        change[index, index] = 1.0
        change[index, 0] = -shift
    return frame, change


def decompose_local(w: Witness) -> LocalDecomposition:
    """
    W = sum_ab c_ab P_a (x) P_b with PSD factors.

    W is first expanded in the Gell-Mann product basis; each traceless element is then
    shifted by the smallest multiple of I that makes it PSD and the coefficients are
    rewritten in the shifted frame.
    @raises: NumericalError: Throws if the reconstruction misses W by 1e-9 or more
    @return: LocalDecomposition: at most d_A^2 d_B^2 terms
    """
    dim_a, dim_b = w.dims
    basis_a, basis_b = gell_mann_basis(dim_a), gell_mann_basis(dim_b)
    coefficients = np.array([[np.trace(np.kron(g, h) @ w.operator).real for h in basis_b] for g in basis_a])
    frame_a, change_a = _psd_frame(dim_a)
    frame_b, change_b = _psd_frame(dim_b)
    shifted = change_a.T @ coefficients @ change_b

    terms = tuple(
        LocalTerm(float(shifted[a, b]), frame_a[a], frame_b[b])
        for a in range(dim_a * dim_a) for b in range(dim_b * dim_b)
        if abs(shifted[a, b]) > COEFFICIENT_CUTOFF
    )
    decomposition = LocalDecomposition(terms, w.dims)
    residual = float(np.max(np.abs(decomposition.reconstruct() - w.operator)))
    if residual >= 1e-9:
        raise NumericalError(f'Local decomposition residual {residual:.3e}')
    return decomposition


def mdi_witness(decomposition: LocalDecomposition) -> LocalDecomposition:
    """Transposes every POVM factor; the factors stay PSD."""
    return LocalDecomposition(
        tuple(LocalTerm(term.coefficient, term.povm_a.T, term.povm_b.T) for term in decomposition.terms),
        decomposition.dims,
    )


def block_positivity(w: Witness, starts: Optional[int] = None, seed: int = 0) -> ProductSearchResult:
    """Heuristic minimum of <e f|W|e f>; a value below -1e-6 disproves witness-hood."""
    return minimize_product_expectation(w.operator, w.dims, starts=starts or get_setting(WITNESS_STARTS), seed=seed)


def optimize_witness_step(w: Witness, p_sub, epsilon: float, starts: Optional[int] = None,
                          seed: int = 0) -> WitnessStep:
    """
    One subtraction W - epsilon P followed by the heuristic product-state check.
    @raises: ParameterError: Throws if P is not PSD or epsilon is negative
    @return: WitnessStep: still_witness is numerical evidence only
    """
    if epsilon < 0:
        raise ParameterError(f'epsilon must be nonnegative, got {epsilon}')
    p_sub = as_matrix(p_sub)
    if p_sub.shape != w.operator.shape:
        raise DimensionError(f'Subtracted operator of shape {p_sub.shape} does not match {w.operator.shape}')
    if min_eigenvalue(p_sub) < -PSD_TOLERANCE:
        raise ParameterError('Subtracted operator must be positive semidefinite')

    candidate = w.operator - epsilon * p_sub
    search = minimize_product_expectation(candidate, w.dims, starts=starts or get_setting(WITNESS_STARTS), seed=seed)
    return WitnessStep(candidate=candidate, still_witness=search.minimum >= -WITNESS_TOLERANCE,
                       product_minimum=search.minimum)


def spanning_property_check(w: Witness, samples: Optional[int] = None, seed: int = 0) -> SpanningReport:
    """
    Collects product vectors with |<e f|W|e f>| < 1e-8 and the rank of their span.
    Full rank d_A d_B is sufficient for optimality, never necessary.
    """
    search = minimize_product_expectation(w.operator, w.dims, starts=samples or get_setting(WITNESS_STARTS), seed=seed)
    kernel = tuple(
        np.kron(local.ket_a, local.ket_b) for local in search.local_minima
        if abs(local.value) < KERNEL_TOLERANCE
    )
    rank = int(np.linalg.matrix_rank(np.array(kernel), tol=SPAN_RANK_TOLERANCE)) if kernel else 0
    logger.info(f'[INFO] spanning_property_check() found {len(kernel)} kernel product states, span {rank}')
    return SpanningReport(kernel_states=kernel, span_dimension=rank,
                          has_spanning_property=rank == w.dims[0] * w.dims[1])
