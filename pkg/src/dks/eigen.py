"""Symmetric eigendecomposition with a deterministic canonical form.

Eigenvectors of a symmetric matrix are only unique up to sign, and inside
a degenerate eigenspace up to an arbitrary rotation.  The canonical form
used throughout this package removes both ambiguities:

* every eigenvector has unit norm and a nonnegative component sum (ties
  broken by the first significantly nonzero component),
* inside each (near-)degenerate block, vectors are rotated pairwise so
  that the leading vector maximizes the sum of absolute components,
* vectors tied on eigenvalue are ordered by descending component mean,
  then descending component spread.

This makes downstream quantities that depend on eigenvector components
(not just on the spanned subspace) well defined and permutation invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError
from .validation import as_float_matrix, check_symmetric, symmetrize

DEFAULT_SYMMETRY_TOL = 1e-8
DEFAULT_DEGENERACY_TOL = 1e-9

# Rotations improving the block objective by less than this are skipped,
# which keeps canonicalization exactly idempotent.
_ROTATION_GAIN_TOL = 1e-12

_SIGN_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (descending) and matching unit eigenvectors.

    ``vectors[:, k]`` is the eigenvector for ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def pairs(self) -> list[tuple[float, np.ndarray]]:
        return [(float(self.values[k]), self.vectors[:, k]) for k in range(self.dim)]

    def reconstruct(self) -> np.ndarray:
        """Assemble sum_k u_k * lambda_k * u_k^T."""
        return symmetrize((self.vectors * self.values) @ self.vectors.T)


def _apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each has nonnegative component sum; a zero sum is
    resolved by making the first component of magnitude > 1e-12 positive."""
    v = vectors.copy()
    for k in range(v.shape[1]):
        s = float(v[:, k].sum())
        if abs(s) <= _SIGN_ZERO_TOL:
            nz = np.nonzero(np.abs(v[:, k]) > _SIGN_ZERO_TOL)[0]
            if len(nz) and v[nz[0], k] < 0.0:
                v[:, k] = -v[:, k]
        elif s < 0.0:
            v[:, k] = -v[:, k]
    return v


def _decompose(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw solver: descending eigenvalues, sign-fixed eigenvectors."""
    if m.shape[0] == 0:
        return np.empty(0), np.empty((0, 0))
    w, v = np.linalg.eigh(symmetrize(m))
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    return w, _apply_sign_convention(v)


def sym_eigen(m, tol: float = DEFAULT_SYMMETRY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a symmetric PSD matrix.

    Small negative eigenvalues (roundoff) are clamped to zero; an
    eigenvalue below ``-1e-8 * max(1, trace/d)`` raises ``NotPSDError``.
    An empty (0x0) input yields an empty decomposition.
    """
    m = as_float_matrix(m, "matrix")
    check_symmetric(m, tol, "matrix")
    d = m.shape[0]
    if d == 0:
        return EigenDecomposition(np.empty(0), np.empty((0, 0)))
    values, vectors = _decompose(m)
    clamp = 1e-8 * max(1.0, float(np.trace(m)) / d)
    if float(values[-1]) < -clamp:
        raise NotPSDError(
            f"matrix is not positive semidefinite: eigenvalue {values[-1]:.3e} "
            f"below -{clamp:.3e}"
        )
    return EigenDecomposition(np.maximum(values, 0.0), vectors)


def _abs_sum_objective(a: np.ndarray, b: np.ndarray, theta: float) -> float:
    return float(np.abs(math.cos(theta) * a + math.sin(theta) * b).sum())


def _golden_section_max(f, lo: float, hi: float, iters: int = 80) -> float:
    """Deterministic golden-section maximization on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def _polish_rotation_angle(a: np.ndarray, b: np.ndarray, theta: float) -> float:
    """Newton refinement of a smooth maximum of f(t) = sum|cos(t) a + sin(t) b|.

    Away from kinks f'(t) = sum sign(v_i) w_i with w = dv/dt and
    f''(t) = -f(t), so the Newton step is t + f'(t)/f(t).  Value-based
    search alone locates a smooth maximum only to ~sqrt(eps); this
    polish brings it to machine precision, which keeps downstream sign
    decisions deterministic.
    """
    best_t, best_f = theta, _abs_sum_objective(a, b, theta)
    t = theta
    for _ in range(8):
        c, s = math.cos(t), math.sin(t)
        v = c * a + s * b
        w = -s * a + c * b
        f = float(np.abs(v).sum())
        step = float(np.sum(np.sign(v) * w)) / f
        t += step
        ft = _abs_sum_objective(a, b, t)
        if ft >= best_f:
            best_t, best_f = t, ft
        if abs(step) < 1e-15:
            break
    return best_t


def _best_rotation(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Rotate the orthogonal pair (a, b) to maximize sum_i |a'_i|.

    Searches the rotation angle on [0, pi) with a 360-point grid refined
    by golden-section search and a Newton polish.  Returns the pair
    unchanged when no angle improves the objective beyond roundoff, so
    repeated application is a no-op.
    """
    step = math.pi / 360.0
    grid = np.arange(360) * step
    objectives = np.abs(np.outer(np.cos(grid), a) + np.outer(np.sin(grid), b)).sum(axis=1)
    j = int(np.argmax(objectives))
    theta = _golden_section_max(
        lambda t: _abs_sum_objective(a, b, t), grid[j] - step, grid[j] + step
    )
    theta = _polish_rotation_angle(a, b, theta)
    # polished angle first: on a value tie the more precise angle wins
    candidates = [theta, grid[j]]
    values = [_abs_sum_objective(a, b, t) for t in candidates]
    best = int(np.argmax(values))
    gain = values[best] - _abs_sum_objective(a, b, 0.0)
    if gain <= _ROTATION_GAIN_TOL:
        return a, b, 0.0
    t = candidates[best]
    c, s = math.cos(t), math.sin(t)
    return c * a + s * b, -s * a + c * b, gain


def _degenerate_blocks(values: np.ndarray, tol: float) -> list[tuple[int, int]]:
    """Maximal runs [start, stop) of consecutive eigenvalues whose gaps
    stay within tol * max(1, largest eigenvalue)."""
    d = len(values)
    if d == 0:
        return []
    threshold = tol * max(1.0, float(values[0]))
    blocks = []
    start = 0
    for k in range(1, d):
        if values[k - 1] - values[k] > threshold:
            blocks.append((start, k))
            start = k
    blocks.append((start, d))
    return blocks


def _canonicalize_block(block: np.ndarray) -> np.ndarray:
    """Canonical basis for one degenerate block, by greedy peeling.

    The vector with the largest absolute component sum is swept against
    every other vector until it is the (greedy) maximizer over the whole
    block subspace; the procedure recurses on the orthogonal remainder.
    Signs are then fixed and the vectors ordered by descending component
    mean, then descending component spread.  Because the peeled
    directions depend only on the spanned subspace, not on the incoming
    basis or order, rerunning the procedure on its own output changes
    nothing.
    """
    width = block.shape[1]
    for start in range(width - 1):
        lead = start + int(np.argmax(np.abs(block[:, start:]).sum(axis=0)))
        if lead != start:
            block[:, [start, lead]] = block[:, [lead, start]]
        for _ in range(100):
            improved = False
            for j in range(start + 1, width):
                a, b, gain = _best_rotation(block[:, start], block[:, j])
                if gain > 0.0:
                    block[:, start] = a
                    block[:, j] = b
                    improved = True
            if not improved:
                break
    block = _apply_sign_convention(block)
    means = block.mean(axis=0)
    stds = block.std(axis=0)
    order = sorted(range(width), key=lambda i: (-means[i], -stds[i]))
    return block[:, order]


def canonicalize(
    e: EigenDecomposition, degeneracy_tol: float = DEFAULT_DEGENERACY_TOL
) -> EigenDecomposition:
    """Resolve the rotational freedom inside degenerate eigenvalue blocks.

    Within each block (consecutive eigenvalues closer than
    ``degeneracy_tol * max(1, largest eigenvalue)``), vectors are rotated
    pairwise so each leading vector in turn maximizes the sum of absolute
    components over the remaining subspace, the sign convention is
    re-applied, and tied vectors are ordered by descending component
    mean, then descending component standard deviation.  Eigenvalues are
    left untouched.  Idempotent.
    """
    values = e.values.copy()
    vectors = _apply_sign_convention(e.vectors)
    for start, stop in _degenerate_blocks(values, degeneracy_tol):
        if stop - start < 2:
            continue
        vectors[:, start:stop] = _canonicalize_block(vectors[:, start:stop].copy())
    return EigenDecomposition(values, vectors)


def sym_matrix_exp(m, scale: float) -> np.ndarray:
    """exp(scale * m) for symmetric m, via its eigendecomposition.

    No PSD clamping: the exponent uses the true spectrum, so negative
    eigenvalues are honored.
    """
    m = as_float_matrix(m, "matrix")
    check_symmetric(m, DEFAULT_SYMMETRY_TOL, "matrix")
    if m.shape[0] == 0:
        return np.empty((0, 0))
    values, vectors = _decompose(m)
    return symmetrize((vectors * np.exp(scale * values)) @ vectors.T)
