"""Kernels between the *variables* of a multivariate dataset.

Each builder maps an (observations x variables) dataset to a symmetric
positive-semidefinite matrix whose (i, j) entry measures how strongly
variables i and j are related: sample covariance, sample correlation, or
a diffusion kernel exp(-lambda * L) over the graph Laplacian of absolute
correlations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import sym_matrix_exp
from .errors import InvalidInputError
from .validation import as_float_matrix, symmetrize

KERNEL_SYMMETRY_TOL = 1e-12
KERNEL_PSD_TOL = 1e-8


@dataclass(frozen=True)
class Dataset:
    """Named multivariate sample: ``data[i, j]`` is observation i of
    variable ``variable_names[j]``."""

    variable_names: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        names = tuple(str(n) for n in self.variable_names)
        data = as_float_matrix(self.data, "data")
        if data.shape[0] < 2:
            raise InvalidInputError(
                f"dataset needs at least 2 observations, got {data.shape[0]}"
            )
        if data.shape[1] < 1:
            raise InvalidInputError("dataset needs at least 1 variable")
        if len(names) != data.shape[1]:
            raise InvalidInputError(
                f"{len(names)} variable names for {data.shape[1]} data columns"
            )
        if len(set(names)) != len(names):
            raise InvalidInputError("duplicate variable names")
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "data", data)

    @property
    def n_observations(self) -> int:
        return self.data.shape[0]

    @property
    def n_variables(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric PSD matrix over named variables."""

    variable_names: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = tuple(str(n) for n in self.variable_names)
        values = as_float_matrix(self.values, "values")
        if values.shape[0] != values.shape[1]:
            raise InvalidInputError(f"kernel matrix must be square, got {values.shape}")
        if len(names) != values.shape[0]:
            raise InvalidInputError(
                f"{len(names)} variable names for a {values.shape[0]}x{values.shape[1]} matrix"
            )
        if len(set(names)) != len(names):
            raise InvalidInputError("duplicate variable names")
        if values.size:
            if float(np.max(np.abs(values - values.T))) > KERNEL_SYMMETRY_TOL:
                raise InvalidInputError("kernel matrix is not symmetric")
            d = values.shape[0]
            floor = -KERNEL_PSD_TOL * max(1.0, float(np.trace(values)) / d)
            if float(np.linalg.eigvalsh(values)[0]) < floor:
                raise InvalidInputError("kernel matrix is not positive semidefinite")
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _sample_covariance(data: np.ndarray) -> np.ndarray:
    centered = data - data.mean(axis=0)
    return symmetrize(centered.T @ centered / (data.shape[0] - 1))


def covariance_kernel(ds: Dataset) -> KernelMatrix:
    """Sample covariance of the variables (n-1 denominator)."""
    if ds.n_observations < 2:
        raise InvalidInputError("covariance needs at least 2 observations")
    return KernelMatrix(ds.variable_names, _sample_covariance(ds.data))


def correlation_kernel(ds: Dataset) -> KernelMatrix:
    """Sample correlation of the variables.

    Constant variables get correlation 0 against everything else and 1
    with themselves, keeping the matrix finite and PSD.
    """
    if ds.n_observations < 2:
        raise InvalidInputError("correlation needs at least 2 observations")
    cov = _sample_covariance(ds.data)
    std = np.sqrt(np.diag(cov))
    constant = std == 0.0
    denom = np.outer(std, std)
    denom[denom == 0.0] = 1.0
    corr = cov / denom
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    np.fill_diagonal(corr, 1.0)
    return KernelMatrix(ds.variable_names, symmetrize(np.clip(corr, -1.0, 1.0)))


def diffusion_kernel(ds: Dataset, lam: float = 1.0) -> KernelMatrix:
    """Diffusion kernel exp(-lam * L) over the correlation graph.

    L is the Laplacian of absolute correlations:
    L[i, j] = delta_ij * sum_k |C[i, k]| - |C[i, j]|.
    Row sums of L are zero, so the kernel has largest eigenvalue 1.
    """
    if lam <= 0.0 or not np.isfinite(lam):
        raise InvalidInputError(f"lam must be positive, got {lam}")
    corr = correlation_kernel(ds).values
    weights = np.abs(corr)
    laplacian = np.diag(weights.sum(axis=1)) - weights
    return KernelMatrix(ds.variable_names, sym_matrix_exp(laplacian, -lam))
