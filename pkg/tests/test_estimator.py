import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dks.errors import InvalidInputError
from dks.estimator import DoubleKernelizedScoring
from dks.scoring import system_score
from dks.variable_kernels import correlation_kernel, Dataset


@pytest.fixture
def windows():
    rng = np.random.default_rng(0)
    return rng.standard_normal((40, 3)), rng.standard_normal((40, 3))


class TestEstimatorBasics:
    def test_fit_returns_self(self, windows):
        est = DoubleKernelizedScoring()
        assert est.fit(windows[0]) is est
        assert est.variable_names_ == ("x0", "x1", "x2")
        assert est.n_features_in_ == 3

    def test_score_matches_functional_api(self, windows):
        ref, new = windows
        est = DoubleKernelizedScoring().fit(ref)
        k = correlation_kernel(Dataset(("x0", "x1", "x2"), ref))
        k2 = correlation_kernel(Dataset(("x0", "x1", "x2"), new))
        assert est.score(new) == system_score(k.values, k2.values)

    def test_score_report(self, windows):
        ref, new = windows
        est = DoubleKernelizedScoring().fit(ref)
        report = est.score_report(new)
        assert set(report.target_scores) == {"x0", "x1", "x2"}
        assert est.score_targets(new) == report.target_scores

    def test_unfitted_raises(self, windows):
        with pytest.raises(NotFittedError):
            DoubleKernelizedScoring().score(windows[0])

    def test_get_params_roundtrip(self):
        est = DoubleKernelizedScoring(variable_kernel="diffusion", diffusion_lambda=2.0)
        params = est.get_params()
        assert params["variable_kernel"] == "diffusion"
        assert params["diffusion_lambda"] == 2.0
        cloned = clone(est)
        assert cloned.get_params() == params

    def test_set_params(self):
        est = DoubleKernelizedScoring().set_params(matrix_kernel="dot", ridge=0.5)
        assert est.matrix_kernel == "dot"
        assert est.ridge == 0.5

    def test_invalid_config_surfaces_on_fit(self, windows):
        est = DoubleKernelizedScoring(variable_kernel="rbf")
        with pytest.raises(InvalidInputError):
            est.fit(windows[0])


class TestCrossDimensionScoring:
    def test_new_variable_gets_one_sided_target(self):
        rng = np.random.default_rng(1)
        ref = rng.standard_normal((60, 2))
        new = rng.standard_normal((60, 3))
        est = DoubleKernelizedScoring().fit(ref, variable_names=("a", "b"))
        report = est.score_report(new, variable_names=("a", "b", "c"))
        assert set(report.target_scores) == {"a", "b", "c"}
        assert np.isfinite(report.target_scores["c"])

    def test_dot_kernel_rejects_dimension_change(self):
        rng = np.random.default_rng(2)
        est = DoubleKernelizedScoring(matrix_kernel="dot")
        est.fit(rng.standard_normal((30, 2)), variable_names=("a", "b"))
        with pytest.raises(InvalidInputError):
            est.score(rng.standard_normal((30, 3)))

    def test_named_groups(self):
        rng = np.random.default_rng(3)
        est = DoubleKernelizedScoring(targets=(("a", "b"), ("c",)))
        est.fit(rng.standard_normal((30, 3)), variable_names=("a", "b", "c"))
        report = est.score_report(rng.standard_normal((30, 3)))
        assert set(report.target_scores) == {"a+b", "c"}

    def test_unknown_group_name(self):
        rng = np.random.default_rng(4)
        est = DoubleKernelizedScoring(targets=(("zz",),))
        est.fit(rng.standard_normal((30, 2)), variable_names=("a", "b"))
        with pytest.raises(InvalidInputError, match="zz"):
            est.score_report(rng.standard_normal((30, 2)))

    def test_identical_window_scores_zero(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((30, 3))
        est = DoubleKernelizedScoring().fit(x)
        assert est.score(x) == 0.0
