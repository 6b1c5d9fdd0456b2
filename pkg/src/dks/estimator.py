"""Scikit-learn style front end.

``DoubleKernelizedScoring`` follows the fit/score convention: ``fit``
learns the relation structure (a kernel matrix over variables) of a
reference data window, and ``score`` measures how far a new window's
structure has drifted from it.  Parameters follow the get_params /
set_params protocol, so the estimator composes with sklearn tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import InvalidInputError
from .pipeline import PipelineConfig, build_kernel
from .scoring import (
    DEFAULT_RIDGE,
    ScoreReport,
    matrix_divergence,
    score_target_pairs,
)
from .validation import as_float_matrix
from .variable_kernels import Dataset


class DoubleKernelizedScoring(BaseEstimator):
    """Anomaly scorer comparing the variable-relation structure of two
    data windows.

    Parameters
    ----------
    variable_kernel : {"covariance", "correlation", "diffusion"}
        Kernel between variables used to summarize each window.
    matrix_kernel : {"matrix", "dot"}
        Kernel between the two kernel matrices.  "matrix" (the Gaussian
        matrix kernel) also supports windows with different variable
        counts; "dot" is the plain trace inner product.
    diffusion_lambda : float
        Scale of the diffusion kernel (ignored by the other kernels).
    ridge : float
        Ridge added before matrix inverses.
    targets : sequence of sequences of str, optional
        Variable-name groups to score; defaults to one target per
        variable.
    """

    def __init__(
        self,
        variable_kernel: str = "correlation",
        matrix_kernel: str = "matrix",
        diffusion_lambda: float = 1.0,
        ridge: float = DEFAULT_RIDGE,
        targets=None,
    ):
        self.variable_kernel = variable_kernel
        self.matrix_kernel = matrix_kernel
        self.diffusion_lambda = diffusion_lambda
        self.ridge = ridge
        self.targets = targets

    def _config(self) -> PipelineConfig:
        targets = self.targets
        if targets is not None:
            targets = tuple(tuple(g) for g in targets)
        return PipelineConfig(
            variable_kernel=self.variable_kernel,
            matrix_kernel=self.matrix_kernel,
            diffusion_lambda=self.diffusion_lambda,
            ridge=self.ridge,
            targets=targets,
        )

    def _as_dataset(self, X, variable_names=None) -> Dataset:
        if isinstance(X, Dataset):
            return X
        X = as_float_matrix(X, "X")
        if variable_names is None:
            if hasattr(self, "variable_names_"):
                variable_names = self.variable_names_
            else:
                variable_names = tuple(f"x{i}" for i in range(X.shape[1]))
        return Dataset(tuple(variable_names), X)

    def fit(self, X, y=None, variable_names=None):
        """Learn the reference kernel matrix from ``X``
        (n_observations x n_variables).  Returns self."""
        cfg = self._config()
        ds = self._as_dataset(X, variable_names)
        self.variable_names_ = ds.variable_names
        self.n_features_in_ = ds.n_variables
        self.reference_kernel_ = build_kernel(ds, cfg)
        return self

    def _check_fitted(self):
        if not hasattr(self, "reference_kernel_"):
            raise NotFittedError(
                "This DoubleKernelizedScoring instance is not fitted yet; "
                "call fit first."
            )

    def _target_pairs(self, new_names, cfg):
        """Match targets across the reference and the new window by
        variable name.  A variable present on only one side gets a
        one-sided target (legal under the Gaussian matrix kernel)."""
        ref_names = self.reference_kernel_.variable_names
        ref_index = {n: i for i, n in enumerate(ref_names)}
        new_index = {n: i for i, n in enumerate(new_names)}
        if cfg.targets is None:
            ordered = list(ref_names) + [n for n in new_names if n not in ref_index]
            pairs = [
                (
                    (ref_index[n],) if n in ref_index else (),
                    (new_index[n],) if n in new_index else (),
                )
                for n in ordered
            ]
            return ordered, pairs
        labels, pairs = [], []
        for group in cfg.targets:
            unknown = [n for n in group if n not in ref_index and n not in new_index]
            if unknown:
                raise InvalidInputError(f"unknown target variables: {unknown}")
            t = tuple(sorted(ref_index[n] for n in group if n in ref_index))
            t_prime = tuple(sorted(new_index[n] for n in group if n in new_index))
            labels.append("+".join(group))
            pairs.append((t, t_prime))
        return labels, pairs

    def score_report(self, X, variable_names=None) -> ScoreReport:
        """System score plus per-target scores of ``X`` against the
        fitted reference window."""
        self._check_fitted()
        cfg = self._config()
        ds = self._as_dataset(X, variable_names)
        if (
            cfg.matrix_kernel.value == "dot"
            and ds.n_variables != self.reference_kernel_.dim
        ):
            raise InvalidInputError(
                "the dot-product matrix kernel needs the same variable count "
                f"as the reference ({self.reference_kernel_.dim}), got {ds.n_variables}"
            )
        k = self.reference_kernel_
        k2 = build_kernel(ds, cfg)
        labels, pairs = self._target_pairs(ds.variable_names, cfg)
        system = matrix_divergence(k.values, k2.values, cfg.matrix_kernel, cfg.ridge)
        scores = score_target_pairs(k.values, k2.values, pairs, cfg.matrix_kernel, cfg.ridge)
        return ScoreReport(
            system_score=system,
            target_scores=dict(zip(labels, scores)),
            metadata={"reference_variables": list(k.variable_names)},
        )

    def score(self, X, y=None) -> float:
        """System anomaly score of ``X`` against the fitted reference."""
        self._check_fitted()
        cfg = self._config()
        ds = self._as_dataset(X)
        if (
            cfg.matrix_kernel.value == "dot"
            and ds.n_variables != self.reference_kernel_.dim
        ):
            raise InvalidInputError(
                "the dot-product matrix kernel needs the same variable count "
                f"as the reference ({self.reference_kernel_.dim}), got {ds.n_variables}"
            )
        k2 = build_kernel(ds, cfg)
        return matrix_divergence(
            self.reference_kernel_.values, k2.values, cfg.matrix_kernel, cfg.ridge
        )

    def score_targets(self, X, variable_names=None) -> dict[str, float]:
        """Per-target scores of ``X`` against the fitted reference."""
        return self.score_report(X, variable_names).target_scores
