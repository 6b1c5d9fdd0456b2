"""Double kernelized anomaly scoring.

Given two multivariate datasets (for example consecutive time windows),
the package summarizes each as a kernel matrix over its variables,
measures structural change with a divergence between the two matrices,
and attributes the change to variables or variable groups.  A kernel
between matrices of different sizes keeps the scores defined when the
variable set itself changes.
"""

from .errors import CsvParseError, InvalidInputError, NotPSDError
from .eigen import (
    EigenDecomposition,
    canonicalize,
    sym_eigen,
    sym_matrix_exp,
)
from .variable_kernels import (
    Dataset,
    KernelMatrix,
    correlation_kernel,
    covariance_kernel,
    diffusion_kernel,
)
from .matrix_kernel import (
    EigenFeature,
    MatrixKernelKind,
    eigen_features,
    matrix_kernel,
    scalar_kernel,
    vector_kernel,
)
from .scoring import (
    PartitionedKernel,
    ScoreReport,
    TargetSpec,
    burg_divergence,
    inv_psd,
    kernelized_score,
    matrix_divergence,
    partition,
    score_target_pairs,
    system_score,
    target_score_kernelized,
    target_score_trace,
)
from .evaluation import (
    GaussianModel,
    GroupExperimentResult,
    RocResult,
    SccExperimentResult,
    auc,
    gen_control_chart,
    gen_group_experiment,
    mc_expected_kl,
    run_group_experiment,
    run_kl_oracle,
    run_scc_experiment,
)
from .pipeline import (
    PipelineConfig,
    WindowConfig,
    ingest_csv,
    score_stream,
    sliding_windows,
)
from .estimator import DoubleKernelizedScoring

__version__ = "0.1.0"

__all__ = [
    "CsvParseError",
    "Dataset",
    "DoubleKernelizedScoring",
    "EigenDecomposition",
    "EigenFeature",
    "GaussianModel",
    "GroupExperimentResult",
    "InvalidInputError",
    "KernelMatrix",
    "MatrixKernelKind",
    "NotPSDError",
    "PartitionedKernel",
    "PipelineConfig",
    "RocResult",
    "SccExperimentResult",
    "ScoreReport",
    "TargetSpec",
    "WindowConfig",
    "auc",
    "burg_divergence",
    "canonicalize",
    "correlation_kernel",
    "covariance_kernel",
    "diffusion_kernel",
    "eigen_features",
    "gen_control_chart",
    "gen_group_experiment",
    "ingest_csv",
    "inv_psd",
    "kernelized_score",
    "matrix_divergence",
    "matrix_kernel",
    "mc_expected_kl",
    "partition",
    "run_group_experiment",
    "run_kl_oracle",
    "run_scc_experiment",
    "scalar_kernel",
    "score_stream",
    "score_target_pairs",
    "sliding_windows",
    "sym_eigen",
    "sym_matrix_exp",
    "system_score",
    "target_score_kernelized",
    "target_score_trace",
    "vector_kernel",
]
