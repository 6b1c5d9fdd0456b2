"""Input validation helpers used by every public entry point."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidInputError


def as_float_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting non-finite entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def check_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    return m


def check_symmetric(m: np.ndarray, tol: float, name: str = "matrix") -> np.ndarray:
    """Require max|m - m.T| <= tol * max(1, max|m|)."""
    check_square(m, name)
    if m.size == 0:
        return m
    dev = float(np.max(np.abs(m - m.T)))
    scale = max(1.0, float(np.max(np.abs(m))))
    if dev > tol * scale:
        raise InvalidInputError(
            f"{name} is not symmetric within tolerance: max deviation {dev:.3e}"
        )
    return m


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Exactly symmetric average of a numerically symmetric matrix."""
    return 0.5 * (m + m.T)


def check_indices(indices: Sequence[int], dim: int, name: str = "indices") -> tuple[int, ...]:
    """Validate an index list into a dimension-``dim`` axis: integer,
    in range, no duplicates. Order is preserved."""
    out = []
    for i in indices:
        if int(i) != i:
            raise InvalidInputError(f"{name} must be integers, got {i!r}")
        i = int(i)
        if i < 0 or i >= dim:
            raise InvalidInputError(f"{name} out of range: {i} not in [0, {dim})")
        out.append(i)
    if len(set(out)) != len(out):
        raise InvalidInputError(f"{name} contains duplicates: {out}")
    return tuple(out)
