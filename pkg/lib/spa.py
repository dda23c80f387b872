# SPDX-License-Identifier: MIT-0

"""
Structural physical approximation.

For a Hermiticity-preserving map with trace-normalized Choi chi, the SPA mixes in
complete depolarization, (1 - p) chi + p I/D with D = d_in d_out, at the least p making
the mixture PSD: p* = D lam / (1 + D lam), lam = max(0, -min eig chi). The closed form is
always cross-checked by bisection on the mixture's spectrum.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import sympy

from .channels import (
    QuantumMap, apply, depolarizing_map, inversion_map, tensor_maps, tensor_with_identity,
)
from .configuration import (
    BISECTION_TOLERANCE, CLOSED_FORM_TOLERANCE, PSD_TOLERANCE, SCAN_STEP, VERDICT_MARGIN, get_setting,
)
from .designs import design_decomposition, mub, sic
from .errors import NotCompletelyPositiveError, NumericalError, ParameterError
from .measure_prepare import MeasurePrepareChannel, measure_prepare_from, reconstruction_residual
from .separability import ENTANGLED, ccnr_test, nearest_separable, ppt_test, refit_decomposition
from .states import DensityMatrix, isotropic, max_entangled
from .tensor_core import min_eigenvalue, partial_transpose


logger = logging.getLogger(__name__)

EB = 'EB'
NOT_EB = 'NotEB'
INCONCLUSIVE = 'Inconclusive'

DESIGN_MATCH_TOLERANCE = 1e-10
CERTIFICATE_TOLERANCE = 1e-8

__all__ = [
    'EB', 'NOT_EB', 'INCONCLUSIVE', 'SpaResult', 'LoccDecomposition', 'EbVerdict', 'NoiseGap',
    'IsotropicScan', 'ConjectureReport', 'MeasurePrepareChannel', 'measure_prepare_from',
    'normalized_map', 'choi_state', 'mixing_parameter', 'bisect_mixing', 'spa', 'spa_general',
    'spa_bipartite', 'spa_inversion', 'spa_locc', 'eb_verdict', 'eb_noise_gap', 'isotropic_scan',
    'conjecture_report',
]


@dataclass(frozen=True)
class SpaResult:
    original: QuantumMap
    spa_map: QuantumMap
    p_star: float
    negativity: float
    min_eigenvalue: float
    threshold: Optional[float] = None


@dataclass(frozen=True)
class LoccDecomposition:
    q: float
    term_a: QuantumMap
    term_b: QuantumMap
    residual: float

    @property
    def weights(self) -> Tuple[float, float]:
        return 1.0 - self.q, self.q

    def mixture(self) -> np.ndarray:
        return (1.0 - self.q) * self.term_a.choi + self.q * self.term_b.choi


@dataclass(frozen=True)
class EbVerdict:
    status: str
    certificate: dict
    decomposition: Optional[Tuple[Tuple[float, np.ndarray, np.ndarray], ...]] = None


@dataclass(frozen=True)
class NoiseGap:
    p_separable: float
    gap: float


@dataclass(frozen=True)
class IsotropicScan:
    boundary_estimate: Optional[float]
    step: float
    points: int
    detects_all_entangled: bool


@dataclass(frozen=True)
class ConjectureReport:
    map_label: str
    spa_result: SpaResult
    verdict: EbVerdict
    isotropic_scan: IsotropicScan
    noise_gap: Optional[NoiseGap] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'map': self.map_label,
            'p_star': self.spa_result.p_star,
            'lambda': self.spa_result.negativity,
            'verdict': self.verdict.status,
            'certificate': self.verdict.certificate,
            'isotropic_scan': {
                'boundary_estimate': self.isotropic_scan.boundary_estimate,
                'grid': {'step': self.isotropic_scan.step, 'points': self.isotropic_scan.points},
                'detects_all_entangled': self.isotropic_scan.detects_all_entangled,
            },
            'noise_gap': None if self.noise_gap is None else {
                'p_separable': self.noise_gap.p_separable, 'gap': self.noise_gap.gap,
            },
            'notes': list(self.notes),
        }


def normalized_map(quantum_map: QuantumMap) -> QuantumMap:
    """Rescales the Choi matrix to unit trace, warning when a rescale happens."""
    trace = quantum_map.trace
    if trace <= 0:
        raise ParameterError(f'Map {quantum_map.label} has non-positive Choi trace {trace:.3e}')
    if abs(trace - 1.0) <= 1e-10:
        return quantum_map
    logger.warning(f'Choi trace of {quantum_map.label} is {trace:.6g}; normalizing to 1')
    return QuantumMap(quantum_map.d_in, quantum_map.d_out, quantum_map.choi / trace, quantum_map.label)


def choi_state(quantum_map: QuantumMap) -> DensityMatrix:
    normalized = normalized_map(quantum_map)
    return DensityMatrix(normalized.choi, normalized.dims)


def mixing_parameter(lowest: float, dimension: int) -> float:
    negativity = max(0.0, -lowest)
    return dimension * negativity / (1.0 + dimension * negativity)


def _least_feasible(feasible: Callable[[float], bool], low: float = 0.0, high: float = 1.0,
                    tolerance: Optional[float] = None) -> float:
    tolerance = tolerance or get_setting(BISECTION_TOLERANCE)
    if feasible(low):
        return low
    if not feasible(high):
        raise NumericalError(f'Bisection upper end p={high} is not feasible')
    while high - low > tolerance:
        middle = (low + high) / 2
        if feasible(middle):
            high = middle
        else:
            low = middle
    return high


def bisect_mixing(choi: np.ndarray, noise: np.ndarray, tolerance: Optional[float] = None) -> float:
    """Least p in [0, 1] with (1 - p) choi + p noise PSD, by bisection."""
    if min_eigenvalue(choi) >= -PSD_TOLERANCE:
        return 0.0
    return _least_feasible(lambda p: min_eigenvalue((1 - p) * choi + p * noise) >= 0.0, tolerance=tolerance)


def spa(quantum_map: QuantumMap) -> SpaResult:
    """
    SPA of a bare map; a CP input comes back unchanged with p* = 0.
    @raises: NumericalError: Throws if closed form and bisection disagree by more than 1e-8
    @return: SpaResult:
    """
    normalized = normalized_map(quantum_map)
    chi = normalized.choi
    dimension = normalized.d_in * normalized.d_out
    lowest = min_eigenvalue(chi)
    if lowest >= -PSD_TOLERANCE:
        return SpaResult(original=quantum_map, spa_map=normalized, p_star=0.0, negativity=0.0,
                         min_eigenvalue=lowest)

    p_star = mixing_parameter(lowest, dimension)
    noise = np.eye(dimension) / dimension
    checked = bisect_mixing(chi, noise)
    if abs(checked - p_star) > CLOSED_FORM_TOLERANCE:
        raise NumericalError(f'SPA closed form p*={p_star:.12f} disagrees with bisection {checked:.12f}')

    spa_map = QuantumMap(normalized.d_in, normalized.d_out, (1 - p_star) * chi + p_star * noise,
                         f'spa({quantum_map.label})')
    return SpaResult(original=quantum_map, spa_map=spa_map, p_star=p_star, negativity=-lowest,
                     min_eigenvalue=lowest)


def spa_general(quantum_map: QuantumMap, k_state: DensityMatrix) -> SpaResult:
    """
    SPA with noise E_K(X) = tr(X) K instead of complete depolarization.
    @param k_state DensityMatrix: Full-rank output state K
    @raises: ParameterError: Throws if K is rank deficient or has the wrong dimension
    @return: SpaResult: p_star from bisection only
    """
    normalized = normalized_map(quantum_map)
    if k_state.side != normalized.d_out:
        raise ParameterError(f'Noise state of side {k_state.side} does not match d_out={normalized.d_out}')
    k_lowest = min_eigenvalue(k_state.matrix)
    if k_lowest <= PSD_TOLERANCE:
        raise ParameterError(f'Noise state must be full rank (min eigenvalue {k_lowest:.3e})')

    chi = normalized.choi
    lowest = min_eigenvalue(chi)
    noise = np.kron(np.eye(normalized.d_in) / normalized.d_in, k_state.matrix)
    p_k = bisect_mixing(chi, noise)
    spa_map = QuantumMap(normalized.d_in, normalized.d_out, (1 - p_k) * chi + p_k * noise,
                         f'spa_K({quantum_map.label})')
    return SpaResult(original=quantum_map, spa_map=spa_map, p_star=p_k, negativity=max(0.0, -lowest),
                     min_eigenvalue=lowest)


def spa_bipartite(lambda_map: QuantumMap) -> SpaResult:
    """
    SPA of id_{d_A} (x) Lambda, with d_A = d_in and d_B = d_out.

    p* = lam d_A^3 d_B / (1 + lam d_A^3 d_B), lam = -min eig of (id (x) Lambda)[P+]. The detection
    threshold is p*/(d_A d_B), the share of white noise on each eigenvalue of the d_A d_B output;
    it reduces to lam d_A d_B / (lam d_A^3 d_B + 1) only when d_A = d_B.
    @raises: NumericalError: Throws if the generic SPA of the extended map disagrees
    @return: SpaResult: whose threshold is set
    """
    normalized = normalized_map(lambda_map)
    dim_a, dim_b = normalized.d_in, normalized.d_out
    lowest = min_eigenvalue(normalized.choi)
    negativity = max(0.0, -lowest) if lowest < -PSD_TOLERANCE else 0.0

    scale = negativity * dim_a ** 3 * dim_b
    p_star = scale / (1 + scale)
    threshold = p_star / (dim_a * dim_b)

    extended = spa(tensor_with_identity(normalized, dim_a))
    if abs(extended.p_star - p_star) > CLOSED_FORM_TOLERANCE:
        raise NumericalError(f'Bipartite p*={p_star:.12f} disagrees with extended-map SPA {extended.p_star:.12f}')

    spa_map = extended.spa_map.with_label(f'spa(id{dim_a}*{lambda_map.label})')
    return SpaResult(original=lambda_map, spa_map=spa_map, p_star=p_star, negativity=negativity,
                     min_eigenvalue=lowest, threshold=threshold)


def spa_inversion(d: int) -> QuantumMap:
    """(1/(d^2 - 1)) Theta + (d^2/(d^2 - 1)) D for the inversion Theta = -id."""
    weight = 1.0 / (d * d - 1)
    choi = weight * inversion_map(d).choi + d * d * weight * depolarizing_map(d, d).choi
    return QuantumMap(d, d, choi, 'spa_inversion')


def spa_locc(lambda_map: QuantumMap) -> LoccDecomposition:
    """
    Splits spa_bipartite(Lambda) into (1 - q) id (x) spa(Lambda) + q spa_inversion (x) D.
    @raises: NumericalError: Throws if the mixture misses the bipartite SPA by more than 1e-9
    @return: LoccDecomposition:
    """
    bipartite = spa_bipartite(lambda_map)
    normalized = normalized_map(lambda_map)
    dim_a, dim_b = normalized.d_in, normalized.d_out
    negativity = bipartite.negativity
    scale = negativity * dim_a ** 3 * dim_b
    q = (scale - negativity * dim_a * dim_b) / (1 + scale)

    term_a = tensor_with_identity(spa(normalized).spa_map, dim_a)
    term_b = tensor_maps(spa_inversion(dim_a), depolarizing_map(dim_a, dim_b), 'spa_inversion*depolarize')
    mixture = (1 - q) * term_a.choi + q * term_b.choi
    residual = float(np.max(np.abs(mixture - bipartite.spa_map.choi)))
    if residual > 1e-9:
        raise NumericalError(f'LOCC mixture misses the bipartite SPA by {residual:.3e}')
    return LoccDecomposition(q=q, term_a=term_a, term_b=term_b, residual=residual)


def _design_candidates(d_in: int, d_out: int):
    """Known exact product decompositions, as (name, decomposition) pairs."""
    identity_in, identity_out = np.eye(d_in), np.eye(d_out)
    weight = 1.0 / (d_in * d_out)
    yield 'maximally_mixed', [(weight, a, b) for a in identity_in for b in identity_out]

    if d_in != d_out:
        return
    d = d_in
    designs = []
    if d in (2, 3):
        designs.append(sic(d))
    if sympy.isprime(d):
        designs.append(mub(d))
    rotations = [('identity', np.eye(d))]
    if d == 2:
        rotations.append(('pauli_y', np.array([[0, -1j], [1j, 0]])))
    for design in designs:
        for rotation_name, rotation in rotations:
            decomposition = [(w, a, rotation @ b) for w, a, b in design_decomposition(design)]
            yield f'{design.kind.lower()}_{rotation_name}', decomposition


def _design_certificate(state: DensityMatrix):
    for name, decomposition in _design_candidates(*state.dims):
        residual = reconstruction_residual(decomposition, state.matrix)
        if residual < DESIGN_MATCH_TOLERANCE:
            return name, residual, decomposition
    return None


def _design_verdict(matched) -> EbVerdict:
    name, residual, decomposition = matched
    return EbVerdict(EB, {'kind': 'design_decomposition', 'design': name, 'residual': residual,
                          'terms': len(decomposition)}, tuple(decomposition))


def _exact_dimension_verdict(state: DensityMatrix, ppt_statistic: float, seed: int,
                             max_iter: Optional[int]) -> EbVerdict:
    """
    PPT decides separability in these dimensions. The decomposition is attached only when it
    rebuilds the Choi state to CERTIFICATE_TOLERANCE.
    """
    approximation = nearest_separable(state, max_iter=max_iter, seed=seed)
    candidates = [approximation.decomposition, refit_decomposition(approximation.decomposition, state)]
    scored = [(reconstruction_residual(candidate, state.matrix), candidate) for candidate in candidates if candidate]
    residual, decomposition = min(scored, key=lambda pair: pair[0])
    if residual >= CERTIFICATE_TOLERANCE:
        logger.info(f'[INFO] eb_verdict() PPT proves EB; decomposition residual {residual:.3e} not attached')
        decomposition = None
    return EbVerdict(EB, {
        'kind': 'ppt_exact_dimension',
        'ppt_min_eigenvalue': ppt_statistic,
        'gilbert_distance': approximation.distance,
        'gilbert_iterations': approximation.iterations,
        'residual': residual,
        'terms': 0 if decomposition is None else len(decomposition),
    }, decomposition)


def eb_verdict(quantum_map: QuantumMap, seed: int = 0, max_iter: Optional[int] = None) -> EbVerdict:
    """
    Entanglement-breaking verdict for a CP map, cheapest test first.

    (a) NPPT Choi -> NotEB; (b) exact design decomposition -> EB; (c) PPT in 2x2/2x3 -> EB,
    carrying the NNLS-refitted Gilbert decomposition only if it rebuilds the Choi state to 1e-8
    and the residual either way; (d) realignment violation -> NotEB; (e) Inconclusive with the
    nearest-separable distance.
    @raises: NotCompletelyPositiveError: Throws if the Choi matrix is not PSD
    @return: EbVerdict:
    """
    state = choi_state(quantum_map)
    lowest = min_eigenvalue(state.matrix)
    if lowest < -PSD_TOLERANCE:
        raise NotCompletelyPositiveError(
            f'eb_verdict needs a CP map; {quantum_map.label} has Choi eigenvalue {lowest:.3e}')

    ppt = ppt_test(state)
    if ppt.statistic < -PSD_TOLERANCE:
        return EbVerdict(NOT_EB, {'kind': 'nppt', 'min_eigenvalue': ppt.statistic})

    matched = _design_certificate(state)
    if matched is not None:
        return _design_verdict(matched)

    if ppt.separable_exact:
        return _exact_dimension_verdict(state, ppt.statistic, seed, max_iter)

    ccnr = ccnr_test(state)
    if ccnr.verdict == ENTANGLED:
        return EbVerdict(NOT_EB, {'kind': 'ccnr', 'value': ccnr.statistic})

    approximation = nearest_separable(state, max_iter=max_iter, seed=seed)
    return EbVerdict(INCONCLUSIVE, {
        'kind': 'nearest_separable',
        'distance': approximation.distance,
        'iterations': approximation.iterations,
    })


def eb_noise_gap(quantum_map: QuantumMap) -> Optional[NoiseGap]:
    """
    Least noise p_s making the Choi PPT (hence separable) in 2x2/2x3, and p_s - p*.
    Returns None in larger dimensions, where PPT does not certify separability.
    """
    normalized = normalized_map(quantum_map)
    dims = normalized.dims
    if dims[0] * dims[1] > 6:
        return None
    p_star = spa(normalized).p_star
    dimension = dims[0] * dims[1]
    chi, noise = normalized.choi, np.eye(dimension) / dimension

    def separable(p: float) -> bool:
        mixture = (1 - p) * chi + p * noise
        return min(min_eigenvalue(mixture), min_eigenvalue(partial_transpose(mixture, dims, 1))) >= 0.0

    p_separable = _least_feasible(separable, low=p_star)
    return NoiseGap(p_separable=p_separable, gap=p_separable - p_star)


def isotropic_scan(quantum_map: QuantumMap, step: Optional[float] = None) -> IsotropicScan:
    """
    Does id (x) Lambda detect isotropic(d, p) for every grid p < d/(d + 1)?
    The boundary estimate is the first grid point where detection stops.
    """
    step = step or get_setting(SCAN_STEP)
    normalized = normalized_map(quantum_map)
    d = normalized.d_in
    extended = tensor_with_identity(normalized, d)
    entangled_part = apply(extended, max_entangled(d))
    noise_part = apply(extended, isotropic(d, 1.0))

    grid = np.round(np.arange(0.0, 1.0 + step / 2, step), 12)
    boundary = None
    detects_all = True
    for p in grid:
        detected = min_eigenvalue((1 - p) * entangled_part + p * noise_part) < -VERDICT_MARGIN
        if not detected and boundary is None:
            boundary = float(p)
        if not detected and p < d / (d + 1) - 1e-12:
            detects_all = False
    return IsotropicScan(boundary_estimate=boundary, step=float(step), points=len(grid),
                         detects_all_entangled=detects_all)


def _evidence_notes(verdict: EbVerdict, scan: IsotropicScan, d: int) -> List[str]:
    certificate = verdict.certificate
    notes = []
    if verdict.status == INCONCLUSIVE:
        notes.append(f'inconclusive: PPT and realignment pass but no exact separable decomposition was found '
                     f'within the iteration cap; nearest separable distance {certificate["distance"]:.3e} '
                     f'after {certificate["iterations"]} iterations')
    elif verdict.status == EB and verdict.decomposition is None:
        notes.append(f'EB by PPT alone; Gilbert distance {certificate["gilbert_distance"]:.3e}, '
                     f'decomposition residual {certificate["residual"]:.3e}')
    if scan.boundary_estimate is None:
        notes.append(f'isotropic scan detected every grid point; d/(d+1) = {d / (d + 1):.6f}')
    else:
        notes.append(f'isotropic scan boundary {scan.boundary_estimate:.6f} against d/(d+1) = {d / (d + 1):.6f}')
    if scan.detects_all_entangled and verdict.status == NOT_EB:
        notes.append('detects all entangled isotropic states yet the SPAed map is not entanglement breaking')
    return notes


def conjecture_report(quantum_map: QuantumMap, seed: int = 0, max_iter: Optional[int] = None) -> ConjectureReport:
    """
    Bundles spa, the EB verdict of the SPAed map, the isotropic scan and the noise gap.

    Inconclusive means no exact certificate either way was found within the iteration cap: the
    notes then carry the nearest-separable distance next to the isotropic scan boundary.
    """
    logger.info(f'[INFO] conjecture_report() called for {quantum_map.label}')
    result = spa(quantum_map)
    verdict = eb_verdict(result.spa_map, seed=seed, max_iter=max_iter)
    scan = isotropic_scan(quantum_map)
    gap = eb_noise_gap(quantum_map)
    notes = _evidence_notes(verdict, scan, quantum_map.d_in)
    return ConjectureReport(map_label=quantum_map.label or 'map', spa_result=result, verdict=verdict,
                            isotropic_scan=scan, noise_gap=gap, notes=notes)
