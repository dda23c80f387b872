# SPDX-License-Identifier: MIT-0

"""
Dense complex linear algebra shared by every other module.

Conventions: matrices are numpy complex arrays in row-major order, and a composite
index |ij> is |i> (x) |j>, so the first subsystem is the slowest varying one.
"""

from math import prod
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg

from .configuration import PSD_TOLERANCE
from .errors import DimensionError, ParameterError


def as_matrix(m) -> np.ndarray:
    """Copies anything array-like into a 2-d complex array."""
    matrix = np.array(m, dtype=complex)
    if matrix.ndim != 2:
        raise DimensionError(f'Expected a 2-d matrix, got an array with {matrix.ndim} dimensions')
    return matrix


def check_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f'Expected a square matrix, got shape {m.shape}')
    return m.shape[0]


def check_dims(dims: Sequence[int], side: int) -> Tuple[int, ...]:
    """
    Validates a subsystem dimension profile against a matrix side length.
    @param dims: Ordered subsystem dimensions
    @param side int: Side length the profile must multiply to
    @raises: DimensionError: Throws if a dimension is below 2 or the product does not match
    @return: tuple:
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionError(f'Subsystem dimensions must all be at least 2, got {dims}')
    if prod(dims) != side:
        raise DimensionError(f'Dimensions {dims} do not multiply to matrix side {side}')
    return dims


def kron(a, b) -> np.ndarray:
    return np.kron(a, b)


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """
    Traces out every subsystem whose index is not listed in keep.
    @param m: Square matrix on the composite space
    @param dims: Subsystem dimensions, product equal to the side of m
    @param keep: Iterable of subsystem indices to keep, in any order
    @raises: DimensionError: Throws if dims do not fit m or an index is out of range
    @return: np.ndarray: Matrix on the kept subsystems, in their original order
    """
    m = as_matrix(m)
    dims = check_dims(dims, check_square(m))
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f'Subsystem indices {keep} out of range for {n} subsystems')

    tensor = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for removed, axis in enumerate(traced):
        current = n - removed
        tensor = np.trace(tensor, axis1=axis - removed, axis2=axis - removed + current)

    side = prod(dims[k] for k in keep) if keep else 1
    return tensor.reshape(side, side)


def partial_transpose(m, dims: Sequence[int], subsystem: int) -> np.ndarray:
    """Transposes one subsystem; involutive and exact (pure index permutation)."""
    m = as_matrix(m)
    dims = check_dims(dims, check_square(m))
    n = len(dims)
    if subsystem < 0 or subsystem >= n:
        raise DimensionError(f'Subsystem index {subsystem} out of range for {n} subsystems')
    tensor = m.reshape(dims + dims)
    tensor = np.swapaxes(tensor, subsystem, subsystem + n)
    return tensor.reshape(m.shape)


def realign(m, dims: Sequence[int]) -> np.ndarray:
    """Realignment R[(i,j),(k,l)] = m[(i,k),(j,l)] of a bipartite operator."""
    m = as_matrix(m)
    dim_a, dim_b = check_dims(dims, check_square(m))
    tensor = m.reshape(dim_a, dim_b, dim_a, dim_b)
    return tensor.transpose(0, 2, 1, 3).reshape(dim_a * dim_a, dim_b * dim_b)


def swap_operator(d: int) -> np.ndarray:
    """Swap Π on C^d (x) C^d, Π|ij> = |ji>."""
    if d < 2:
        raise ParameterError(f'Swap operator needs d >= 2, got {d}')
    swap = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    return swap


def hermitian_eig(m) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of the Hermitian part of m.
    @param m: Square matrix, symmetrized as (m + m^dagger)/2 before solving
    @raises: DimensionError: Throws on non-square input
    @return: tuple: (ascending real eigenvalues, eigenvectors as columns)
    """
    m = as_matrix(m)
    check_square(m)
    return scipy.linalg.eigh(hermitize(m))


def eigenvalues(m) -> np.ndarray:
    m = as_matrix(m)
    check_square(m)
    return scipy.linalg.eigvalsh(hermitize(m))


def min_eigenvalue(m) -> float:
    return float(eigenvalues(m)[0])


def is_psd(m, tol: float = PSD_TOLERANCE) -> bool:
    return min_eigenvalue(m) >= -tol


def psd_sqrt(m) -> np.ndarray:
    """Square root of a PSD matrix; small negative eigenvalues are clipped to zero."""
    values, vectors = hermitian_eig(m)
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def trace_norm(m) -> float:
    return float(np.sum(scipy.linalg.svdvals(as_matrix(m))))


def trace_distance(a, b) -> float:
    """Half the Schatten-1 norm of a - b."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f'Cannot compare matrices of shapes {a.shape} and {b.shape}')
    return 0.5 * trace_norm(a - b)


def uhlmann_fidelity(a, b) -> float:
    """
    Root fidelity F = tr sqrt(sqrt(a) b sqrt(a)) of two PSD operators.

    F(rho, rho) = 1 for states, orthogonal supports give 0, and F >= 1 - D_tr.
    @raises: DimensionError: Throws if the shapes differ
    @raises: ParameterError: Throws if either input has an eigenvalue below -1e-9
    @return: float:
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f'Cannot compare matrices of shapes {a.shape} and {b.shape}')
    for name, operand in (('first', a), ('second', b)):
        lowest = min_eigenvalue(operand)
        if lowest < -PSD_TOLERANCE:
            raise ParameterError(f'Fidelity needs PSD inputs; {name} operand has eigenvalue {lowest:.3e}')

    root = psd_sqrt(a)
    inner = eigenvalues(root @ b @ root)
    return float(np.sum(np.sqrt(np.clip(inner, 0.0, None))))
