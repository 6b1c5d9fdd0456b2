"""Kernels between symmetric PSD matrices, possibly of different sizes.

The Gaussian matrix kernel compares two matrices through their canonical
eigendecompositions: every eigenpair contributes a weight (the
eigenvalue) and a univariate Gaussian summarizing its eigenvector's
component distribution (mean and spread).  The kernel is the weighted
sum over all cross pairs of the squared Bhattacharyya overlap of those
Gaussians:

    K(A, B) = sum_kl  lam_k * lam'_l * (2 s_k s'_l / (s_k^2 + s'_l^2))
                      * exp(-(m_k - m'_l)^2 / (2 (s_k^2 + s'_l^2)))

Because component mean and spread ignore component order, the value is
invariant under independent row/column permutations of each input, and
it is defined for inputs of unequal dimension.  The plain dot-product
kernel tr[A B] is provided for the equal-dimension case.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .eigen import DEFAULT_SYMMETRY_TOL, EigenDecomposition, canonicalize, sym_eigen
from .errors import InvalidInputError
from .validation import as_float_matrix, check_symmetric
from .variable_kernels import KernelMatrix

SIGMA_FLOOR = 1e-9


class MatrixKernelKind(enum.Enum):
    """Which kernel between matrices to use."""

    GAUSSIAN_MATRIX_KERNEL = "matrix"
    DOT_PRODUCT = "dot"


@dataclass(frozen=True)
class EigenFeature:
    """Summary of one eigenpair: the eigenvalue plus the mean and the
    (population, floored) standard deviation of the eigenvector's
    components."""

    eigenvalue: float
    mu: float
    sigma: float


def eigen_features(e: EigenDecomposition) -> list[EigenFeature]:
    """One feature per eigenpair; sigma floored at SIGMA_FLOOR so that
    constant eigenvectors (and 1x1 inputs) stay well defined."""
    lam, mu, sigma = _feature_arrays(e)
    return [
        EigenFeature(float(lam[k]), float(mu[k]), float(sigma[k]))
        for k in range(len(lam))
    ]


def _feature_arrays(e: EigenDecomposition) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if e.dim == 0:
        return e.values, np.empty(0), np.empty(0)
    mu = e.vectors.mean(axis=0)
    sigma = np.maximum(e.vectors.std(axis=0), SIGMA_FLOOR)
    return e.values, mu, sigma


def scalar_kernel(l1: float, l2: float) -> float:
    """Product kernel between eigenvalues."""
    return float(l1) * float(l2)


def vector_kernel(f1: EigenFeature, f2: EigenFeature) -> float:
    """Bhattacharyya coefficient of N(mu1, sigma1^2) and N(mu2, sigma2^2).

    Always in (0, 1]; equals 1 exactly for identical features.  Sigmas
    are assumed already floored (see ``eigen_features``).
    """
    s = f1.sigma * f1.sigma + f2.sigma * f2.sigma
    ratio = math.sqrt(2.0 * f1.sigma * f2.sigma / s)
    return ratio * math.exp(-((f1.mu - f2.mu) ** 2) / (4.0 * s))


def _gaussian_kernel_sum(
    fa: tuple[np.ndarray, np.ndarray, np.ndarray],
    fb: tuple[np.ndarray, np.ndarray, np.ndarray],
) -> float:
    lam_a, mu_a, sig_a = fa
    lam_b, mu_b, sig_b = fb
    s = sig_a[:, None] ** 2 + sig_b[None, :] ** 2
    overlap_sq = (2.0 * sig_a[:, None] * sig_b[None, :] / s) * np.exp(
        -((mu_a[:, None] - mu_b[None, :]) ** 2) / (2.0 * s)
    )
    return float(np.sum(lam_a[:, None] * lam_b[None, :] * overlap_sq))


def _coerce(m) -> np.ndarray:
    if isinstance(m, KernelMatrix):
        return m.values
    return as_float_matrix(m, "matrix")


def canonical_features(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(eigenvalues, means, floored sigmas) of the canonical
    eigendecomposition; the precomputed form consumed by
    ``gaussian_kernel_from_features``."""
    return _feature_arrays(canonicalize(sym_eigen(_coerce(m))))


def gaussian_kernel_from_features(fa, fb) -> float:
    """Gaussian matrix kernel evaluated on precomputed features.

    Lets callers that reuse one matrix against many others skip the
    repeated eigendecomposition.
    """
    if len(fa[0]) == 0 or len(fb[0]) == 0:
        return 0.0
    return _gaussian_kernel_sum(fa, fb)


def matrix_kernel(a, b, kind: MatrixKernelKind = MatrixKernelKind.GAUSSIAN_MATRIX_KERNEL) -> float:
    """Kernel between two symmetric PSD matrices.

    For ``GAUSSIAN_MATRIX_KERNEL`` the inputs may have different
    dimensions and an empty (0x0) input yields 0.  ``DOT_PRODUCT``
    computes tr[a b] and requires equal dimensions.
    """
    a = _coerce(a)
    b = _coerce(b)
    kind = MatrixKernelKind(kind)
    if kind is MatrixKernelKind.DOT_PRODUCT:
        if a.shape != b.shape:
            raise InvalidInputError(
                f"dot-product kernel needs equal dimensions, got {a.shape} and {b.shape}"
            )
        check_symmetric(a, DEFAULT_SYMMETRY_TOL, "a")
        check_symmetric(b, DEFAULT_SYMMETRY_TOL, "b")
        return float(np.sum(a * b))
    if a.shape[0] == 0 or b.shape[0] == 0:
        return 0.0
    return _gaussian_kernel_sum(canonical_features(a), canonical_features(b))
