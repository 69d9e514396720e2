"""Dense spin-1/2 operator algebra for small chains.

Operators are plain complex numpy arrays. Site 1 is the leftmost tensor
factor, i.e. the most significant bit of the computational-basis index.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import EmptyChainError, ShapeError

PAULI_AXES = ("x", "y", "z", "plus", "minus", "r", "identity")

_MATRICES = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
    # unitary that swaps the x and y axes while flipping z
    "r": np.array([[0, 1], [1j, 0]], dtype=complex),
}


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 matrix for one of the axis tags in PAULI_AXES.

    ``plus`` and ``minus`` follow the ladder convention (x +- i y)/2, so
    ``pauli("plus")`` maps the lower z-eigenstate to the upper one.
    """
    try:
        return _MATRICES[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of {PAULI_AXES}") from None


def _as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return a


def embed(op, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-site operator at ``site`` (1-based) into an ``n_sites`` chain."""
    op = _as_operator(op)
    if op.shape != (2, 2):
        raise ShapeError(f"embed expects a 2x2 operator, got shape {op.shape}")
    if not 1 <= site <= n_sites:
        raise IndexError(f"site {site} outside 1..{n_sites}")
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n_sites - site), dtype=complex)
    return np.kron(np.kron(left, op), right)


def kron_chain(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Ordered tensor product of 2x2 factors, first entry leftmost."""
    if len(ops) == 0:
        raise EmptyChainError("cannot build a tensor product over zero sites")
    factors = []
    for op in ops:
        op = _as_operator(op)
        if op.shape != (2, 2):
            raise ShapeError(f"kron_chain expects 2x2 factors, got shape {op.shape}")
        factors.append(op)
    return reduce(np.kron, factors)


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a, b) -> np.ndarray:
    a, b = _as_operator(a), _as_operator(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = _as_operator(a), _as_operator(b)
    _check_same_dim(a, b)
    return a @ b + b @ a


def adjoint(a) -> np.ndarray:
    return _as_operator(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(_as_operator(a)))


def is_hermitian(a, tol: float = 1e-12) -> bool:
    a = _as_operator(a)
    return bool(np.abs(a - a.conj().T).max() <= tol)
