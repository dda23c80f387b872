# SPDX-License-Identifier: MIT-0

"""
Multi-start search for the minimum of <e f|H|e f> over product unit vectors.

Each start owns its own random stream (seed + start index) and is refined by
alternating eigen-minimization: fixing one factor turns the objective into a
Hermitian form in the other, whose lowest eigenvector is the exact partial optimum.
The result is a heuristic minimum, never a positivity proof.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .configuration import get_thread_count
from .errors import DimensionError
from .tensor_core import as_matrix, check_dims, check_square, hermitize

logger = logging.getLogger(__name__)

MAX_SWEEPS = 200
SWEEP_TOLERANCE = 1e-13


@dataclass(frozen=True)
class LocalMinimum:
    value: float
    ket_a: np.ndarray
    ket_b: np.ndarray


@dataclass(frozen=True)
class ProductSearchResult:
    minimum: float
    ket_a: np.ndarray
    ket_b: np.ndarray
    local_minima: Tuple[LocalMinimum, ...]
    starts: int


def run_starts(task: Callable[[int], object], starts: int) -> List:
    """Runs task(0..starts-1), in a thread pool when SPA_TOOLKIT_THREADS > 1; order is kept."""
    threads = min(get_thread_count(), starts)
    if threads <= 1:
        return [task(index) for index in range(starts)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, range(starts)))


def _lowest_vector(form: np.ndarray) -> np.ndarray:
    _, vectors = np.linalg.eigh(hermitize(form))
    return vectors[:, 0]


def _highest_vector(form: np.ndarray) -> np.ndarray:
    _, vectors = np.linalg.eigh(hermitize(form))
    return vectors[:, -1]


def _expectation(tensor: np.ndarray, ket_a: np.ndarray, ket_b: np.ndarray) -> float:
    return float(np.einsum('a,b,abcd,c,d->', ket_a.conj(), ket_b.conj(), tensor, ket_a, ket_b).real)


def alternating_optimum(tensor: np.ndarray, ket_a: np.ndarray, ket_b: np.ndarray,
                        maximize: bool = False, max_sweeps: int = MAX_SWEEPS) -> LocalMinimum:
    """
    Alternates exact partial optimizations over each factor until the value stalls.
    @param tensor: Operator reshaped to (d_a, d_b, d_a, d_b)
    @param maximize bool: Climb instead of descend (used by the separability oracle)
    @return: LocalMinimum: value and the optimizing product vectors
    """
    pick = _highest_vector if maximize else _lowest_vector
    value = _expectation(tensor, ket_a, ket_b)
    for _ in range(max_sweeps):
        ket_a = pick(np.einsum('b,abcd,d->ac', ket_b.conj(), tensor, ket_b))
        ket_b = pick(np.einsum('a,abcd,c->bd', ket_a.conj(), tensor, ket_a))
        updated = _expectation(tensor, ket_a, ket_b)
        stalled = abs(updated - value) < SWEEP_TOLERANCE
        value = updated
        if stalled:
            break
    return LocalMinimum(value=value, ket_a=ket_a, ket_b=ket_b)


def random_unit(d: int, rng: np.random.Generator) -> np.ndarray:
    ket = rng.normal(size=d) + 1j * rng.normal(size=d)
    return ket / np.linalg.norm(ket)


def minimize_product_expectation(operator, dims: Sequence[int], starts: int, seed: int = 0) -> ProductSearchResult:
    """
    Multi-start minimization of <e f|operator|e f> over unit product vectors.
    @param operator: Hermitian operator on d_a * d_b
    @param dims: (d_a, d_b)
    @param starts int: Number of independent random starts
    @param seed int: Base seed; start k uses seed + k
    @raises: DimensionError: Throws if dims are not bipartite or do not fit
    @return: ProductSearchResult:
    """
    operator = hermitize(as_matrix(operator))
    dims = check_dims(dims, check_square(operator))
    if len(dims) != 2:
        raise DimensionError(f'Product search needs a bipartite profile, got {dims}')
    if starts < 1:
        raise DimensionError(f'Product search needs at least one start, got {starts}')
    dim_a, dim_b = dims
    tensor = operator.reshape(dim_a, dim_b, dim_a, dim_b)

    def task(index: int) -> LocalMinimum:
        rng = np.random.default_rng(seed + index)
        return alternating_optimum(tensor, random_unit(dim_a, rng), random_unit(dim_b, rng))

    minima = tuple(run_starts(task, starts))
    best = min(minima, key=lambda local: local.value)
    logger.debug(f'Product search over {starts} starts reached {best.value:.3e}')
    return ProductSearchResult(
        minimum=best.value, ket_a=best.ket_a, ket_b=best.ket_b, local_minima=minima, starts=starts,
    )
