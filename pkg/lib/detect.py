# SPDX-License-Identifier: MIT-0

"""
Detection pipelines. Every pipeline returns a DetectionReport; the exact tests come
from `separability` and are re-exported here.
"""

import csv
import logging
from dataclasses import dataclass
from typing import IO, Optional, Tuple

import numpy as np

from .channels import QuantumMap, REGISTRY, apply, make_named_map, tensor_with_identity
from .configuration import ANALYTIC_SHOT_THRESHOLD, SCAN_STEP, VERDICT_MARGIN, get_setting
from .errors import DimensionError, NumericalError, ParameterError
from .separability import (
    CCNR, ENTANGLED, HOM, NOT_DETECTED, PPT, SPA_SPECTRUM, WITNESS, DetectionReport,
    SeparableApproximation, ccnr_test, nearest_separable, ppt_test,
)
from .spa import SpaResult, normalized_map, spa_bipartite
from .states import DensityMatrix, isotropic
from .tensor_core import hermitian_eig, min_eigenvalue
from .witnesses import SpaWitness, evaluate_witness, spa_witness, witness_from_map

logger = logging.getLogger(__name__)

CROSS_CHECK_TOLERANCE = 1e-9
SIGMA_LEVEL = 3.0
CSV_COLUMNS = ('p', 'statistic', 'threshold', 'verdict')

__all__ = [
    'DetectionReport', 'SeparableApproximation', 'SweepRow', 'SweepResult', 'ppt_test', 'ccnr_test',
    'nearest_separable', 'spa_detect', 'isotropic_sweep', 'write_sweep_csv', 'hom_coincidence',
    'hom_witness_estimate', 'map_for_dimension', 'run_method',
]


@dataclass(frozen=True)
class SweepRow:
    p: float
    statistic: float
    threshold: float
    verdict: str


@dataclass(frozen=True)
class SweepResult:
    map_label: str
    d: int
    rows: Tuple[SweepRow, ...]
    boundary_estimate: Optional[float]


def spa_detect(rho: DensityMatrix, lambda_map: QuantumMap,
               spa_result: Optional[SpaResult] = None) -> DetectionReport:
    """
    Min eigenvalue of the SPAed id (x) Lambda applied to rho against p*/(d_A d_B).
    @param spa_result SpaResult: Reuse a precomputed spa_bipartite(lambda_map)
    @raises: DimensionError: Throws unless rho lives on d_in (x) d_in
    @raises: NumericalError: Throws if the verdict disagrees with the unSPAed spectrum
    @return: DetectionReport:
    """
    normalized = normalized_map(lambda_map)
    if rho.dims != (normalized.d_in, normalized.d_in):
        raise DimensionError(f'State dims {rho.dims} do not match map input {normalized.d_in}')
    result = spa_result or spa_bipartite(lambda_map)

    statistic = min_eigenvalue(apply(result.spa_map, rho))
    direct = min_eigenvalue(apply(tensor_with_identity(normalized, normalized.d_in), rho))
    expected = (1 - result.p_star) * direct + result.threshold
    if abs(statistic - expected) > CROSS_CHECK_TOLERANCE:
        raise NumericalError(f'SPA statistic {statistic:.12f} disagrees with direct spectrum ({expected:.12f})')

    entangled = statistic < result.threshold - VERDICT_MARGIN
    return DetectionReport(method=SPA_SPECTRUM, statistic=statistic, threshold=result.threshold,
                           verdict=ENTANGLED if entangled else NOT_DETECTED)


def isotropic_sweep(d: int, lambda_map: QuantumMap, step: Optional[float] = None) -> SweepResult:
    """spa_detect over isotropic(d, p) on a grid of p; the boundary is the first undetected p."""
    step = step or get_setting(SCAN_STEP)
    if not 0 < step <= 1:
        raise ParameterError(f'Sweep step must lie in (0, 1], got {step}')
    result = spa_bipartite(lambda_map)
    rows = []
    boundary = None
    for p in np.round(np.arange(0.0, 1.0 + step / 2, step), 12):
        report = spa_detect(isotropic(d, float(p)), lambda_map, spa_result=result)
        rows.append(SweepRow(float(p), report.statistic, report.threshold, report.verdict))
        if boundary is None and not report.entangled:
            boundary = float(p)
    logger.info(f'[INFO] isotropic_sweep() d={d} map={lambda_map.label} boundary={boundary}')
    return SweepResult(map_label=lambda_map.label or 'map', d=d, rows=tuple(rows), boundary_estimate=boundary)


def write_sweep_csv(sweep: SweepResult, stream: IO[str]):
    writer = csv.writer(stream)
    writer.writerow(CSV_COLUMNS)
    for row in sweep.rows:
        writer.writerow([repr(row.p), repr(row.statistic), repr(row.threshold), row.verdict])


def hom_coincidence(sigma1: DensityMatrix, sigma2: DensityMatrix) -> float:
    """Coincidence probability (1 - tr[sigma1 sigma2])/2 of two photons meeting at a beam splitter."""
    if sigma1.side != sigma2.side:
        raise DimensionError(f'HOM inputs of sides {sigma1.side} and {sigma2.side}')
    overlap = float(np.trace(sigma1.matrix @ sigma2.matrix).real)
    return float(np.clip((1 - overlap) / 2, 0.0, 0.5))


def _components(state: DensityMatrix) -> Tuple[np.ndarray, np.ndarray]:
    values, vectors = hermitian_eig(state.matrix)
    weights = np.clip(values, 0.0, None)
    return weights / weights.sum(), vectors


def hom_witness_estimate(spa_w: SpaWitness, rho: DensityMatrix, shots: int, seed: int,
                         analytic_threshold: Optional[int] = None) -> DetectionReport:
    """
    Estimates tr[W~ rho] = 1 - 2 p_c from simulated coincidence counts.

    Each shot draws one eigencomponent of each input and registers a coincidence with
    probability (1 - |<w|r>|^2)/2. From the analytic threshold on, the count is drawn
    directly from Binomial(shots, p_c).
    @raises: ParameterError: Throws if shots < 1
    @return: DetectionReport: verdict entangled when the estimate is 3 sigma below the threshold
    """
    if shots < 1:
        raise ParameterError(f'HOM estimation needs at least one shot, got {shots}')
    if rho.dims != spa_w.state.dims:
        raise DimensionError(f'State dims {rho.dims} do not match witness dims {spa_w.state.dims}')
    analytic_threshold = analytic_threshold or get_setting(ANALYTIC_SHOT_THRESHOLD)
    rng = np.random.default_rng(seed)

    if shots >= analytic_threshold:
        coincidences = int(rng.binomial(shots, hom_coincidence(spa_w.state, rho)))
    else:
        weights_w, vectors_w = _components(spa_w.state)
        weights_r, vectors_r = _components(rho)
        overlaps = np.abs(vectors_w.conj().T @ vectors_r) ** 2
        picks_w = rng.choice(len(weights_w), size=shots, p=weights_w)
        picks_r = rng.choice(len(weights_r), size=shots, p=weights_r)
        probabilities = (1 - overlaps[picks_w, picks_r]) / 2
        coincidences = int(np.count_nonzero(rng.random(shots) < probabilities))

    p_hat = coincidences / shots
    estimate = 1 - 2 * p_hat
    stderr = 2 * float(np.sqrt(p_hat * (1 - p_hat) / shots))
    margin = SIGMA_LEVEL * stderr if stderr > 0 else VERDICT_MARGIN
    entangled = estimate < spa_w.threshold - margin
    return DetectionReport(method=HOM, statistic=estimate, threshold=spa_w.threshold,
                           verdict=ENTANGLED if entangled else NOT_DETECTED, shots=shots, stderr=stderr)


def map_for_dimension(name: str, d: int) -> QuantumMap:
    """Registry map sized to d; maps with non-dimension parameters need a map file."""
    if name not in REGISTRY:
        raise ParameterError(f'Unknown map {name!r}')
    _, parameters, _ = REGISTRY[name]
    if parameters == ('d',):
        return make_named_map(name, {'d': d})
    if not parameters:
        return make_named_map(name)
    raise ParameterError(f'Map {name!r} needs parameters {list(parameters)}; pass a map file instead')


def run_method(rho: DensityMatrix, method: str, shots: Optional[int] = None, seed: Optional[int] = None,
               lambda_map: Optional[QuantumMap] = None) -> DetectionReport:
    """
    Dispatches "spa:<map>", "witness:<map>", "hom[:<map>]", "ppt" or "ccnr".
    A map argument overrides the registry name after the colon.
    """
    family, _, name = method.partition(':')
    if family == PPT:
        return ppt_test(rho)
    if family == CCNR:
        return ccnr_test(rho)

    if family not in ('spa', WITNESS, HOM):
        raise ParameterError(f'Unknown detection method {method!r}')
    target = lambda_map or map_for_dimension(name or 'transpose', rho.dims[1])
    if family == 'spa':
        return spa_detect(rho, target)
    if family == WITNESS:
        value = evaluate_witness(witness_from_map(target), rho)
        return DetectionReport(method=WITNESS, statistic=value.value, threshold=0.0,
                               verdict=ENTANGLED if value.detected else NOT_DETECTED)
    if shots is None or seed is None:
        raise ParameterError('HOM estimation needs --shots and --seed')
    return hom_witness_estimate(spa_witness(witness_from_map(target)), rho, shots, seed)
