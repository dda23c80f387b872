# SPDX-License-Identifier: MIT-0

"""
Linear maps stored as Choi matrices.

chi = (id (x) Lambda)[P+_{d_in}] = (1/d_in) sum_ij |i><j| (x) Lambda[|i><j|], input factor
first. A trace-preserving map therefore has tr chi = 1 and tr_out chi = I/d_in.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from .configuration import (
    KRAUS_CUTOFF, POSITIVITY_STARTS, PSD_TOLERANCE, get_setting,
)
from .errors import DimensionError, NotCompletelyPositiveError, ParameterError
from .search import minimize_product_expectation
from .states import DensityMatrix, max_entangled, random_pure_ket
from .tensor_core import (
    as_matrix, check_square, hermitian_eig, hermitize, min_eigenvalue, partial_trace,
    trace_distance, uhlmann_fidelity,
)

logger = logging.getLogger(__name__)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

CERTIFIED_NONPOSITIVE = 'certified_nonpositive'
NUMERICALLY_POSITIVE = 'numerically_positive'


@dataclass(frozen=True, eq=False)
class QuantumMap:
    """Linear map between operator spaces, held as its Choi matrix."""
    d_in: int
    d_out: int
    choi: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        choi = as_matrix(self.choi)
        side = check_square(choi)
        if self.d_in < 1 or self.d_out < 1 or side != self.d_in * self.d_out:
            raise DimensionError(f'Choi of side {side} does not fit d_in={self.d_in}, d_out={self.d_out}')
        asymmetry = float(np.max(np.abs(choi - choi.conj().T)))
        if asymmetry > max(1.0, float(np.max(np.abs(choi)))) * 1e-9:
            raise ParameterError(f'Choi matrix is not Hermitian (deviation {asymmetry:.3e}); '
                                 'only Hermiticity-preserving maps are supported')
        choi = hermitize(choi)
        choi.flags.writeable = False
        object.__setattr__(self, 'choi', choi)

    @property
    def dims(self) -> Tuple[int, int]:
        return self.d_in, self.d_out

    @property
    def trace(self) -> float:
        return float(np.trace(self.choi).real)

    def tensor(self) -> np.ndarray:
        """Choi entries as C[i, a, j, b] = chi[(i, a), (j, b)]."""
        return self.choi.reshape(self.d_in, self.d_out, self.d_in, self.d_out)

    def with_label(self, label: str) -> 'QuantumMap':
        return QuantumMap(self.d_in, self.d_out, self.choi, label)


@dataclass(frozen=True)
class PositivityEstimate:
    status: str
    minimum: float
    input_ket: np.ndarray
    output_ket: np.ndarray


@dataclass(frozen=True)
class MapClassification:
    is_cp: bool
    min_choi_eigenvalue: float
    is_tp: bool
    tp_deviation: float
    is_unital: bool
    unital_deviation: float
    positivity_estimate: PositivityEstimate


@dataclass(frozen=True)
class KrausSet:
    operators: Tuple[np.ndarray, ...]

    def __len__(self):
        return len(self.operators)

    def completeness_deviation(self) -> float:
        d_in = self.operators[0].shape[1]
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(d_in))))


@dataclass(frozen=True)
class FidelitySamples:
    average: float
    worst: float
    samples: int


def _matrix_of(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)


def choi_of(table: Sequence[Sequence], label: Optional[str] = None) -> QuantumMap:
    """
    Builds the Choi matrix from the images of all matrix units.
    @param table: table[i][j] = Lambda[|i><j|], every image of the same d_out x d_out shape
    @param label str: Optional map name
    @raises: DimensionError: Throws if the table is ragged or the images disagree in shape
    @return: QuantumMap:
    """
    d_in = len(table)
    if d_in == 0 or any(len(row) != d_in for row in table):
        raise DimensionError('Basis-image table must be a square d_in x d_in table')
    images = np.array([[as_matrix(image) for image in row] for row in table], dtype=complex)
    if images.ndim != 4 or images.shape[2] != images.shape[3]:
        raise DimensionError(f'Basis images must be square and equally shaped, got {images.shape[2:]}')
    d_out = images.shape[2]
    choi = images.transpose(0, 2, 1, 3).reshape(d_in * d_out, d_in * d_out) / d_in
    return QuantumMap(d_in=d_in, d_out=d_out, choi=choi, label=label)


def choi_from_function(action: Callable[[np.ndarray], np.ndarray], d_in: int,
                       label: Optional[str] = None) -> QuantumMap:
    units = np.eye(d_in, dtype=complex)
    table = [[action(np.outer(units[i], units[j])) for j in range(d_in)] for i in range(d_in)]
    return choi_of(table, label)


def apply(quantum_map: QuantumMap, rho) -> np.ndarray:
    """Lambda(X) = d_in tr_A[chi (X^T (x) I)], evaluated as a single contraction."""
    x = _matrix_of(rho)
    if x.shape != (quantum_map.d_in, quantum_map.d_in):
        raise DimensionError(f'Input of shape {x.shape} does not match d_in={quantum_map.d_in}')
    return quantum_map.d_in * np.einsum('ij,iajb->ab', x, quantum_map.tensor())


def apply_by_teleportation(quantum_map: QuantumMap, rho) -> np.ndarray:
    """The same action read as teleportation through the Choi state: d^2 tr_12[(rho (x) chi)(P+ (x) I)]."""
    x = _matrix_of(rho)
    d, d_out = quantum_map.d_in, quantum_map.d_out
    if x.shape != (d, d):
        raise DimensionError(f'Input of shape {x.shape} does not match d_in={d}')
    joint = np.kron(x, quantum_map.choi) @ np.kron(max_entangled(d).matrix, np.eye(d_out))
    return d * d * partial_trace(joint, (d, d, d_out), keep=[2])


def tensor_maps(f: QuantumMap, g: QuantumMap, label: Optional[str] = None) -> QuantumMap:
    """Choi matrix of f (x) g acting on (f.d_in * g.d_in)-dimensional inputs."""
    product = np.einsum('iajb,kcld->ikacjlbd', f.tensor(), g.tensor())
    d_in, d_out = f.d_in * g.d_in, f.d_out * g.d_out
    label = label or f'{f.label or "map"}*{g.label or "map"}'
    return QuantumMap(d_in=d_in, d_out=d_out, choi=product.reshape(d_in * d_out, d_in * d_out), label=label)


def tensor_with_identity(quantum_map: QuantumMap, d_id: int) -> QuantumMap:
    return tensor_maps(identity_map(d_id), quantum_map, label=f'id{d_id}*{quantum_map.label or "map"}')


def compose(f: QuantumMap, g: QuantumMap, label: Optional[str] = None) -> QuantumMap:
    """f after g."""
    if g.d_out != f.d_in:
        raise DimensionError(f'Cannot compose: inner map outputs {g.d_out}, outer map expects {f.d_in}')
    return choi_from_function(lambda x: apply(f, apply(g, x)), g.d_in,
                              label or f'{f.label or "map"}.{g.label or "map"}')


def adjoint(quantum_map: QuantumMap) -> QuantumMap:
    """Dual map with tr[Lambda(X) Y] = tr[X Lambda^dagger(Y)]."""
    tensor = quantum_map.tensor()

    def dual(y: np.ndarray) -> np.ndarray:
        return quantum_map.d_in * np.einsum('iajb,ba->ji', tensor, y)

    return choi_from_function(dual, quantum_map.d_out, f'{quantum_map.label or "map"}^dagger')


def classify(quantum_map: QuantumMap, starts: Optional[int] = None, seed: int = 0) -> MapClassification:
    """
    CP/TP/unital within tolerances plus a heuristic positivity estimate.

    The estimate minimizes <f|Lambda(|e><e|)|f> = d_in <e* f|chi|e* f> over product
    vectors. A negative value is a genuine certificate (it comes with e and f); a
    nonnegative one is only numerical evidence.
    @param quantum_map QuantumMap: Map to classify
    @param starts int: Random starts of the product search, defaults to the profile setting
    @param seed int: Base seed for the search
    @return: MapClassification:
    """
    starts = starts or get_setting(POSITIVITY_STARTS)
    lowest = min_eigenvalue(quantum_map.choi)
    dims = quantum_map.dims

    tp_deviation = float(np.max(np.abs(
        partial_trace(quantum_map.choi, dims, keep=[0]) - np.eye(quantum_map.d_in) / quantum_map.d_in)))
    unital_deviation = float(np.max(np.abs(
        partial_trace(quantum_map.choi, dims, keep=[1]) - np.eye(quantum_map.d_out) / quantum_map.d_in)))

    search = minimize_product_expectation(quantum_map.choi, dims, starts=starts, seed=seed)
    input_ket, output_ket = search.ket_a.conj(), search.ket_b
    image = apply(quantum_map, np.outer(input_ket, input_ket.conj()))
    minimum = float((output_ket.conj() @ image @ output_ket).real)
    status = CERTIFIED_NONPOSITIVE if minimum < -PSD_TOLERANCE else NUMERICALLY_POSITIVE

    return MapClassification(
        is_cp=lowest >= -PSD_TOLERANCE,
        min_choi_eigenvalue=lowest,
        is_tp=tp_deviation <= 1e-10,
        tp_deviation=tp_deviation,
        is_unital=unital_deviation <= 1e-10,
        unital_deviation=unital_deviation,
        positivity_estimate=PositivityEstimate(status, minimum, input_ket, output_ket),
    )


def kraus_from_choi(quantum_map: QuantumMap) -> KrausSet:
    """
    Kraus operators from the eigendecomposition of d_in * chi.

    An eigenvector v with v[i*d_out + a] = K[a, i] folds back into K; eigenvalues
    at or below 1e-10 are dropped, so the count equals the numerical Choi rank.
    @raises: NotCompletelyPositiveError: Throws if chi has an eigenvalue below -1e-9
    @return: KrausSet:
    """
    values, vectors = hermitian_eig(quantum_map.choi * quantum_map.d_in)
    if values[0] < -PSD_TOLERANCE * quantum_map.d_in:
        raise NotCompletelyPositiveError(
            f'Map {quantum_map.label or ""} is not CP (min Choi eigenvalue {values[0] / quantum_map.d_in:.3e})')
    operators = tuple(
        np.sqrt(value) * vectors[:, k].reshape(quantum_map.d_in, quantum_map.d_out).T
        for k, value in enumerate(values) if value > KRAUS_CUTOFF
    )
    return KrausSet(operators)


def apply_kraus(kraus: KrausSet, rho) -> np.ndarray:
    x = _matrix_of(rho)
    return sum(k @ x @ k.conj().T for k in kraus.operators)


def channel_from_kraus(operators: Sequence, label: Optional[str] = None) -> QuantumMap:
    kraus = KrausSet(tuple(as_matrix(k) for k in operators))
    d_in = kraus.operators[0].shape[1]
    if any(k.shape != kraus.operators[0].shape for k in kraus.operators):
        raise DimensionError('All Kraus operators must share one shape')
    return choi_from_function(lambda x: apply_kraus(kraus, x), d_in, label)


def channel_fidelity_bound(a: QuantumMap, b: QuantumMap) -> float:
    """max(0, 1 - d_in * D_tr(chi_a, chi_b)), clamped to [0, 1]."""
    if a.dims != b.dims:
        raise DimensionError(f'Cannot bound fidelity between maps of dims {a.dims} and {b.dims}')
    bound = 1.0 - a.d_in * trace_distance(a.choi, b.choi)
    return float(min(1.0, max(0.0, bound)))


def fidelity_samples(a: QuantumMap, b: QuantumMap, samples: int, seed: int) -> FidelitySamples:
    """Average and worst root fidelity of the two outputs over Haar-random pure inputs."""
    if a.dims != b.dims:
        raise DimensionError(f'Cannot compare maps of dims {a.dims} and {b.dims}')
    if samples < 1:
        raise ParameterError(f'Need at least one sample, got {samples}')
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(samples):
        ket = random_pure_ket(a.d_in, rng)
        rho = np.outer(ket, ket.conj())
        values.append(uhlmann_fidelity(apply(a, rho), apply(b, rho)))
    return FidelitySamples(average=float(np.mean(values)), worst=float(np.min(values)), samples=samples)


def random_channel(d_in: int, d_out: int, n_kraus: int, seed: int) -> QuantumMap:
    """CPTP map whose Kraus operators are the blocks of a Haar-random isometry."""
    if n_kraus * d_out < d_in:
        raise ParameterError(f'{n_kraus} Kraus operators of {d_out}x{d_in} cannot form an isometry')
    isometry = unitary_group.rvs(n_kraus * d_out, random_state=seed)[:, :d_in]
    operators = [isometry[k * d_out:(k + 1) * d_out, :] for k in range(n_kraus)]
    return channel_from_kraus(operators, label=f'random_channel({d_in},{d_out},{n_kraus})')


def _require_dimension(d: int, minimum: int = 2) -> int:
    d = int(d)
    if d < minimum:
        raise ParameterError(f'Dimension must be at least {minimum}, got {d}')
    return d


def identity_map(d: int) -> QuantumMap:
    d = _require_dimension(d)
    return QuantumMap(d, d, max_entangled(d).matrix, 'identity')


def transpose_map(d: int) -> QuantumMap:
    return choi_from_function(lambda x: x.T, _require_dimension(d), 'transpose')


def reduction_map(d: int) -> QuantumMap:
    d = _require_dimension(d)
    return choi_from_function(lambda x: (np.trace(x) * np.eye(d) - x) / (d - 1), d, 'reduction')


def choi_map() -> QuantumMap:
    """Lambda_C[X] = (1/2)(-X + sum_i X_ii (2|i><i| + |i-1><i-1|)), indices mod 3."""
    def action(x: np.ndarray) -> np.ndarray:
        image = -x.astype(complex)
        for i in range(3):
            image[i, i] += 2 * x[i, i]
            image[(i - 1) % 3, (i - 1) % 3] += x[i, i]
        return image / 2

    return choi_from_function(action, 3, 'choi_map')


def ha_map(a: float, b: float, c: float, theta: float) -> QuantumMap:
    """Generalized Choi map of Ha with raw (unnormalized) coefficients."""
    if min(a, b, c) < 0:
        raise ParameterError(f'ha_map coefficients must be nonnegative, got a={a}, b={b}, c={c}')
    phase = np.exp(1j * theta)

    def action(x: np.ndarray) -> np.ndarray:
        return np.array([
            [a * x[0, 0] + b * x[1, 1] + c * x[2, 2], -phase * x[0, 1], -phase.conjugate() * x[0, 2]],
            [-phase.conjugate() * x[1, 0], c * x[0, 0] + a * x[1, 1] + b * x[2, 2], -phase * x[1, 2]],
            [-phase * x[2, 0], -phase.conjugate() * x[2, 1], b * x[0, 0] + c * x[1, 1] + a * x[2, 2]],
        ], dtype=complex)

    return choi_from_function(action, 3, f'ha_map({a},{b},{c},{theta})')


def inversion_map(d: int) -> QuantumMap:
    return choi_from_function(lambda x: -x, _require_dimension(d), 'inversion')


def depolarizing_map(d_in: int, d_out: int) -> QuantumMap:
    d_in, d_out = _require_dimension(d_in), _require_dimension(d_out)
    return QuantumMap(d_in, d_out, np.eye(d_in * d_out) / (d_in * d_out), 'depolarize')


def partial_depolarizing_map(d: int, p: float) -> QuantumMap:
    d = _require_dimension(d)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f'Depolarizing weight must lie in [0, 1], got {p}')
    return choi_from_function(lambda x: (1 - p) * x + p * np.trace(x) * np.eye(d) / d, d,
                              f'partial_depolarize({p})')


def unot_map() -> QuantumMap:
    return choi_from_function(lambda x: PAULI_Y @ x.T @ PAULI_Y, 2, 'unot')


def pauli_xz_map() -> QuantumMap:
    """(rho + X rho X + Z rho Z)/3, a random-unitary form of the SPAed qubit transpose."""
    return choi_from_function(lambda x: (x + PAULI_X @ x @ PAULI_X + PAULI_Z @ x @ PAULI_Z) / 3, 2, 'pauli_xz')


def breuer_hall_map(d: int) -> QuantumMap:
    """(tr(X) I - X - U X^T U^dagger)/(d - 2) with U the canonical antisymmetric unitary, d even."""
    d = _require_dimension(d, minimum=4)
    if d % 2:
        raise ParameterError(f'breuer_hall needs an even dimension, got {d}')
    unitary = np.kron(np.eye(d // 2), np.array([[0, 1], [-1, 0]], dtype=complex))
    return choi_from_function(
        lambda x: (np.trace(x) * np.eye(d) - x - unitary @ x.T @ unitary.conj().T) / (d - 2), d, 'breuer_hall')


REGISTRY: Dict[str, Tuple[Callable[..., QuantumMap], Tuple[str, ...], str]] = {
    'identity': (identity_map, ('d',), 'identity channel'),
    'transpose': (transpose_map, ('d',), 'matrix transposition (positive, not CP)'),
    'reduction': (reduction_map, ('d',), '(tr(X) I - X)/(d - 1)'),
    'choi_map': (choi_map, (), "Choi's indecomposable qutrit map"),
    'ha_map': (ha_map, ('a', 'b', 'c', 'theta'), "Ha's generalized Choi map, raw coefficients"),
    'inversion': (inversion_map, ('d',), 'X -> -X (not positive)'),
    'depolarize': (depolarizing_map, ('d_in', 'd_out'), 'complete depolarization tr(X) I/d_out'),
    'partial_depolarize': (partial_depolarizing_map, ('d', 'p'), '(1 - p) X + p tr(X) I/d'),
    'unot': (unot_map, (), 'Y X^T Y, universal-NOT on a qubit'),
    'pauli_xz': (pauli_xz_map, (), '(X + sx X sx + sz X sz)/3'),
    'breuer_hall': (breuer_hall_map, ('d',), 'Breuer-Hall map for even d >= 4'),
}


def registry_entries() -> list:
    return [
        {'name': name, 'params': list(parameters), 'description': description}
        for name, (_, parameters, description) in sorted(REGISTRY.items())
    ]


def make_named_map(name: str, params: Optional[Mapping[str, float]] = None) -> QuantumMap:
    """
    Builds a registry map.
    @param name str: Registry name, see REGISTRY
    @param params dict: Parameter values keyed by the registry parameter names
    @raises: ParameterError: Throws on unknown names or missing/extra parameters
    @return: QuantumMap:
    """
    if name not in REGISTRY:
        raise ParameterError(f'Unknown map {name!r}; registry holds {sorted(REGISTRY)}')
    builder, parameters, _ = REGISTRY[name]
    params = dict(params or {})
    missing = [key for key in parameters if key not in params]
    extra = [key for key in params if key not in parameters]
    if missing or extra:
        raise ParameterError(f'Map {name!r} takes parameters {list(parameters)}; missing {missing}, unexpected {extra}')

    integer_keys = {'d', 'd_in', 'd_out'}
    arguments = [int(params[key]) if key in integer_keys else float(params[key]) for key in parameters]
    logger.debug(f'Building registry map {name} with {params}')
    return builder(*arguments)
