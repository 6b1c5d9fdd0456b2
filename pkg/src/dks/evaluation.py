"""Synthetic experiments and independent verification oracles.

Contains the two desk-scale experiments (control-chart single-variable
scoring and the 9-vs-10-variable group-change setup), the AUC metric
used to judge them, and a Monte-Carlo estimator of the expected
conditional KL divergence between two zero-mean Gaussians, which is the
statistical quantity the trace-form score equals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidInputError
from .matrix_kernel import MatrixKernelKind
from .scoring import (
    DEFAULT_RIDGE,
    TargetSpec,
    coerce_kernel,
    complement_indices,
    score_target_pairs,
    target_score_trace,
)
from .validation import check_indices, symmetrize
from .variable_kernels import (
    Dataset,
    covariance_kernel,
    diffusion_kernel,
)


@dataclass(frozen=True)
class GaussianModel:
    """Zero-mean multivariate normal with the given covariance."""

    covariance: np.ndarray = field(repr=False)

    def __post_init__(self):
        cov = coerce_kernel(self.covariance)
        if cov.size and float(np.linalg.eigvalsh(cov)[0]) < -1e-8 * max(
            1.0, float(np.trace(cov)) / cov.shape[0]
        ):
            raise InvalidInputError("covariance is not positive semidefinite")
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.dim == 0:
            return np.empty((n, 0))
        chol = np.linalg.cholesky(self.covariance)
        return rng.standard_normal((n, self.dim)) @ chol.T


@dataclass(frozen=True)
class RocResult:
    auc: float
    n_positive: int
    n_negative: int


def auc(scores: Sequence[float], labels: Sequence[int]) -> RocResult:
    """Area under the ROC curve via the Mann-Whitney U statistic with
    average-rank tie handling."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise InvalidInputError("scores and labels must be 1-D and the same length")
    if not np.all((y == 0) | (y == 1)):
        raise InvalidInputError("labels must be binary (0/1)")
    n_pos = int(y.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError("AUC needs at least one positive and one negative label")
    ranks = rankdata(s)
    u = float(ranks[y == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    return RocResult(u / (n_pos * n_neg), n_pos, n_neg)


def _jackknife_se_of_mean(x: np.ndarray) -> float:
    # Leave-one-out jackknife of a sample mean collapses to the classic
    # standard error sqrt(var/n).
    n = len(x)
    if n < 2:
        return 0.0
    return float(np.sqrt(np.var(x, ddof=1) / n))


def _conditional_structure(cov: np.ndarray, t: tuple[int, ...], comp: tuple[int, ...]):
    """Regression matrix and conditional covariance of y_t given y_comp."""
    k_tt = cov[np.ix_(t, t)]
    k_tc = cov[np.ix_(t, comp)]
    k_cc = cov[np.ix_(comp, comp)]
    if len(comp) == 0:
        return np.empty((len(t), 0)), symmetrize(k_tt), k_cc
    regress = k_tc @ np.linalg.inv(k_cc)
    cond = symmetrize(k_tt - regress @ k_tc.T)
    return regress, cond, k_cc


def mc_expected_kl(
    k, k2, t: Sequence[int], n_samples: int, seed: int | np.random.SeedSequence
) -> tuple[float, float]:
    """Monte-Carlo estimate of twice the expected conditional KL
    divergence, in both directions, between N(0, k) and N(0, k2).

    Draws the conditioning variables from each marginal, evaluates the
    conditional Gaussian KL analytically per draw, and averages.
    Returns (estimate, jackknife standard error).  With the full
    variable set targeted there is nothing to condition on, every draw
    yields the same value, and the standard error vanishes (up to
    summation roundoff).
    """
    kv = coerce_kernel(k)
    k2v = coerce_kernel(k2)
    if kv.shape != k2v.shape:
        raise InvalidInputError("covariances must have equal dimensions")
    d = kv.shape[0]
    for name, m in (("k", kv), ("k2", k2v)):
        if d == 0 or float(np.linalg.eigvalsh(m)[0]) <= 0.0:
            raise InvalidInputError(f"{name} must be positive definite")
    ti = check_indices(t, d, "t")
    if len(ti) == 0:
        raise InvalidInputError("t must contain at least one variable")
    if n_samples < 2:
        raise InvalidInputError("need at least 2 samples")
    comp = complement_indices(ti, d)

    a1, s1, c1 = _conditional_structure(kv, ti, comp)
    a2, s2, c2 = _conditional_structure(k2v, ti, comp)
    m = len(ti)
    chol_s1 = np.linalg.cholesky(s1)
    chol_s2 = np.linalg.cholesky(s2)
    logdet_s1 = 2.0 * float(np.sum(np.log(np.diag(chol_s1))))
    logdet_s2 = 2.0 * float(np.sum(np.log(np.diag(chol_s2))))
    inv_s1 = np.linalg.inv(s1)
    inv_s2 = np.linalg.inv(s2)
    const_pq = float(np.trace(inv_s2 @ s1)) - m + logdet_s2 - logdet_s1
    const_qp = float(np.trace(inv_s1 @ s2)) - m + logdet_s1 - logdet_s2

    rng = np.random.default_rng(seed)
    delta = a1 - a2

    def _side(cond_cov: np.ndarray, chol_other: np.ndarray, const: float) -> np.ndarray:
        draws = GaussianModel(cond_cov).sample(n_samples, rng)
        shift = draws @ delta.T
        white = np.linalg.solve(chol_other, shift.T)
        quad = np.sum(white * white, axis=0)
        return 0.5 * (const + quad)

    kl_pq = _side(c1, chol_s2, const_pq)
    kl_qp = _side(c2, chol_s1, const_qp)
    estimate = 2.0 * (float(kl_pq.mean()) + float(kl_qp.mean()))
    se = 2.0 * float(np.hypot(_jackknife_se_of_mean(kl_pq), _jackknife_se_of_mean(kl_qp)))
    return estimate, se


# ---------------------------------------------------------------------------
# Synthetic data generators
# ---------------------------------------------------------------------------

CONTROL_CHART_STEPS = 100
_CC_MEAN = 30.0
_CC_NOISE_SCALE = 2.0
_CC_REPLACE_PROB = 1.0 / 3.0


def gen_control_chart(
    n_series: int = 60, seed: int | np.random.SeedSequence = 0
) -> tuple[Dataset, Dataset, np.ndarray]:
    """Control-chart series with randomly injected cyclic segments.

    Each of ``n_series`` series runs 100 steps of the classic "normal"
    pattern m + r*s (m=30, s=2, r ~ U(-3, 3)).  With probability 1/3 a
    series has steps 51..100 replaced by the "cyclic" pattern, which
    adds a*sin(2*pi*t/T) with a ~ U(10, 15), T ~ U(10, 15).  Returns
    steps 1..50 as the before-dataset, steps 51..100 as the
    after-dataset, and the 0/1 replacement labels.
    """
    if n_series < 2:
        raise InvalidInputError("need at least 2 series")
    rng = np.random.default_rng(seed)
    data = _CC_MEAN + _CC_NOISE_SCALE * rng.uniform(
        -3.0, 3.0, size=(CONTROL_CHART_STEPS, n_series)
    )
    labels = (rng.random(n_series) < _CC_REPLACE_PROB).astype(int)
    half = CONTROL_CHART_STEPS // 2
    t_grid = np.arange(half + 1, CONTROL_CHART_STEPS + 1, dtype=float)
    for j in np.nonzero(labels)[0]:
        amplitude = rng.uniform(10.0, 15.0)
        period = rng.uniform(10.0, 15.0)
        data[half:, j] = (
            _CC_MEAN
            + _CC_NOISE_SCALE * rng.uniform(-3.0, 3.0, size=half)
            + amplitude * np.sin(2.0 * np.pi * t_grid / period)
        )
    names = tuple(f"s{j:02d}" for j in range(n_series))
    return (
        Dataset(names, data[:half]),
        Dataset(names, data[half:]),
        labels,
    )


def gen_group_experiment(seed: int | np.random.SeedSequence = 0) -> tuple[Dataset, Dataset]:
    """Independent standard-normal datasets with 9 and 10 variables, 200
    observations each."""
    rng = np.random.default_rng(seed)
    d9 = Dataset(
        tuple(f"z{i}" for i in range(1, 10)), rng.standard_normal((200, 9))
    )
    d10 = Dataset(
        tuple(f"z{i}" for i in range(1, 11)), rng.standard_normal((200, 10))
    )
    return d9, d10


def random_pd_matrix(
    dim: int, rng: np.random.Generator, min_eigenvalue: float = 0.3
) -> np.ndarray:
    """Well-conditioned random positive-definite matrix."""
    g = rng.standard_normal((dim, dim))
    return symmetrize(g @ g.T / dim + min_eigenvalue * np.eye(dim))


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------

SCC_VARIABLE_KERNELS = ("covariance", "diffusion")


@dataclass(frozen=True)
class SccExperimentResult:
    variable_kernel: str
    matrix_kernel: str
    mean_auc: float
    std_auc: float
    trial_aucs: tuple[float, ...]


def run_scc_experiment(
    trials: int,
    variable_kernel: str = "diffusion",
    matrix_kernel: MatrixKernelKind = MatrixKernelKind.GAUSSIAN_MATRIX_KERNEL,
    seed: int = 0,
    n_series: int = 60,
    lam: float = 1.0,
    ridge: float = DEFAULT_RIDGE,
) -> SccExperimentResult:
    """Score every series of the control-chart data as its own target
    and measure how well the scores rank the replaced series.

    Per trial: generate data, build one kernel matrix per half, score
    each variable as a singleton target, and compute the AUC against the
    replacement labels.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    if variable_kernel not in SCC_VARIABLE_KERNELS:
        raise InvalidInputError(
            f"variable_kernel must be one of {SCC_VARIABLE_KERNELS}, got {variable_kernel!r}"
        )
    kind = MatrixKernelKind(matrix_kernel)
    pairs = [((j,), (j,)) for j in range(n_series)]
    aucs = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        stream = child
        for _ in range(100):
            before, after, labels = gen_control_chart(n_series, seed=stream)
            if 0 < int(labels.sum()) < n_series:
                break
            stream = stream.spawn(1)[0]
        if variable_kernel == "covariance":
            k, k2 = covariance_kernel(before), covariance_kernel(after)
        else:
            k, k2 = diffusion_kernel(before, lam), diffusion_kernel(after, lam)
        scores = score_target_pairs(k, k2, pairs, kind, ridge)
        aucs.append(auc(scores, labels).auc)
    return SccExperimentResult(
        variable_kernel=variable_kernel,
        matrix_kernel=kind.value,
        mean_auc=float(np.mean(aucs)),
        std_auc=float(np.std(aucs, ddof=1)) if trials > 1 else 0.0,
        trial_aucs=tuple(float(a) for a in aucs),
    )


GROUP_SETTING1 = tuple(
    [((i,), (i,)) for i in range(8)] + [((8,), (8, 9))]
)
GROUP_SETTING2 = tuple(
    [((i,), (i,)) for i in range(9)] + [((), (9,))]
)


@dataclass(frozen=True)
class GroupExperimentResult:
    """Per-group score statistics for both group assignments.

    Setting 1 merges the new tenth variable into the ninth group;
    setting 2 gives it a group of its own with no counterpart in the
    first dataset.  ``*_scores`` are (trials x groups) matrices.
    """

    setting1_groups: tuple[str, ...]
    setting1_scores: np.ndarray = field(repr=False)
    setting2_groups: tuple[str, ...]
    setting2_scores: np.ndarray = field(repr=False)
    setting1_changed: int = 8
    setting2_changed: int = 9

    def setting1_means(self) -> np.ndarray:
        return self.setting1_scores.mean(axis=0)

    def setting1_stds(self) -> np.ndarray:
        return self.setting1_scores.std(axis=0, ddof=1)

    def setting2_means(self) -> np.ndarray:
        return self.setting2_scores.mean(axis=0)

    def setting2_stds(self) -> np.ndarray:
        return self.setting2_scores.std(axis=0, ddof=1)


def run_group_experiment(
    trials: int, seed: int = 0, ridge: float = DEFAULT_RIDGE
) -> GroupExperimentResult:
    """Group-change experiment: covariance kernels, Gaussian matrix
    kernel, scores per variable group under both group assignments."""
    if trials < 2:
        raise InvalidInputError("trials must be >= 2 for score statistics")
    kind = MatrixKernelKind.GAUSSIAN_MATRIX_KERNEL
    s1_rows = []
    s2_rows = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        d9, d10 = gen_group_experiment(seed=child)
        k, k2 = covariance_kernel(d9), covariance_kernel(d10)
        s1_rows.append(score_target_pairs(k, k2, GROUP_SETTING1, kind, ridge))
        s2_rows.append(score_target_pairs(k, k2, GROUP_SETTING2, kind, ridge))
    return GroupExperimentResult(
        setting1_groups=tuple(f"group{i}" for i in range(1, 10)),
        setting1_scores=np.asarray(s1_rows),
        setting2_groups=tuple(f"group{i}" for i in range(1, 11)),
        setting2_scores=np.asarray(s2_rows),
    )


@dataclass(frozen=True)
class KlOraclePair:
    dim: int
    target: tuple[int, ...]
    trace_score: float
    mc_estimate: float
    mc_std_error: float

    @property
    def within_3se(self) -> bool:
        return abs(self.trace_score - self.mc_estimate) <= 3.0 * self.mc_std_error


def run_kl_oracle(
    trials: int = 20,
    n_samples: int = 20000,
    seed: int = 0,
    ridge: float = DEFAULT_RIDGE,
) -> list[KlOraclePair]:
    """Check the trace-form score against the Monte-Carlo expected-KL
    estimate on random positive-definite pairs with matching targets."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    out = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        dim = int(rng.integers(2, 7))
        k = random_pd_matrix(dim, rng)
        k2 = random_pd_matrix(dim, rng)
        size = int(rng.integers(1, dim))
        target = tuple(sorted(rng.choice(dim, size=size, replace=False).tolist()))
        trace = target_score_trace(k, k2, TargetSpec(target, target), ridge)
        estimate, se = mc_expected_kl(k, k2, target, n_samples, child.spawn(1)[0])
        out.append(
            KlOraclePair(
                dim=dim,
                target=target,
                trace_score=trace,
                mc_estimate=estimate,
                mc_std_error=se,
            )
        )
    return out
