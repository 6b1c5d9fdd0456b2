"""CSV ingestion and the sliding-window scoring pipeline."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import CsvParseError, InvalidInputError
from .matrix_kernel import MatrixKernelKind
from .scoring import (
    DEFAULT_RIDGE,
    ScoreReport,
    matrix_divergence,
    score_target_pairs,
)
from .variable_kernels import (
    Dataset,
    KernelMatrix,
    correlation_kernel,
    covariance_kernel,
    diffusion_kernel,
)

VARIABLE_KERNEL_NAMES = ("covariance", "correlation", "diffusion")

_MISSING_TOKENS = frozenset({"", "nan", "na", "null"})


@dataclass(frozen=True)
class WindowConfig:
    """Sliding-window geometry: window width and emission stride."""

    width: int = 50
    stride: int = 1

    def __post_init__(self):
        if self.width < 2:
            raise InvalidInputError(f"window width must be >= 2, got {self.width}")
        if self.stride < 1:
            raise InvalidInputError(f"stride must be >= 1, got {self.stride}")


@dataclass(frozen=True)
class PipelineConfig:
    """Scoring configuration: which kernels to use and which targets to
    score.  ``targets=None`` scores every variable as its own target;
    otherwise each target is a group of variable names applied to both
    windows."""

    variable_kernel: str = "correlation"
    matrix_kernel: MatrixKernelKind = MatrixKernelKind.GAUSSIAN_MATRIX_KERNEL
    diffusion_lambda: float = 1.0
    ridge: float = DEFAULT_RIDGE
    targets: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if self.variable_kernel not in VARIABLE_KERNEL_NAMES:
            raise InvalidInputError(
                f"variable_kernel must be one of {VARIABLE_KERNEL_NAMES}, "
                f"got {self.variable_kernel!r}"
            )
        object.__setattr__(self, "matrix_kernel", MatrixKernelKind(self.matrix_kernel))
        if self.diffusion_lambda <= 0.0:
            raise InvalidInputError("diffusion_lambda must be positive")
        if self.ridge < 0.0:
            raise InvalidInputError("ridge must be nonnegative")
        if self.targets is not None:
            groups = tuple(tuple(str(n) for n in group) for group in self.targets)
            if any(len(g) == 0 for g in groups):
                raise InvalidInputError("target groups must be non-empty")
            object.__setattr__(self, "targets", groups)


def build_kernel(ds: Dataset, cfg: PipelineConfig) -> KernelMatrix:
    if cfg.variable_kernel == "covariance":
        return covariance_kernel(ds)
    if cfg.variable_kernel == "correlation":
        return correlation_kernel(ds)
    return diffusion_kernel(ds, cfg.diffusion_lambda)


def ingest_csv(
    path, timestamp_col: bool = False, na: str = "error"
) -> tuple[Dataset, list[str] | None]:
    """Load a numeric CSV with a header row of variable names.

    With ``timestamp_col`` the first column is read as timestamps and
    returned alongside the dataset.  Missing cells (empty, "nan", "na",
    "null") raise by default; ``na="ffill"`` copies the previous row's
    value instead.  Any other unparseable cell raises with its row and
    column.  Row numbers in messages are 1-based file lines (header is
    row 1).
    """
    if na not in ("error", "ffill"):
        raise InvalidInputError(f"na must be 'error' or 'ffill', got {na!r}")
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}: empty file") from None
        if timestamp_col:
            if len(header) < 2:
                raise CsvParseError(f"{path}: need a data column besides the timestamp")
            names = [h.strip() for h in header[1:]]
        else:
            names = [h.strip() for h in header]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise CsvParseError(f"{path}: duplicate header names {dupes}")
        timestamps: list[str] | None = [] if timestamp_col else None
        rows: list[list[float]] = []
        for line_no, raw in enumerate(reader, start=2):
            if len(raw) != len(header):
                raise CsvParseError(
                    f"{path}: row {line_no} has {len(raw)} cells, expected {len(header)}"
                )
            if timestamp_col:
                timestamps.append(raw[0].strip())
                raw = raw[1:]
            row = []
            for col, cell in enumerate(raw):
                text = cell.strip()
                missing = text.lower() in _MISSING_TOKENS
                value = None
                if not missing:
                    try:
                        value = float(text)
                    except ValueError:
                        raise CsvParseError(
                            f"{path}: row {line_no}, column '{names[col]}': "
                            f"cannot parse {text!r}"
                        ) from None
                    if value != value:
                        missing, value = True, None
                    elif value in (float("inf"), float("-inf")):
                        raise CsvParseError(
                            f"{path}: row {line_no}, column '{names[col]}': "
                            "non-finite value"
                        )
                if missing:
                    if na == "error":
                        raise CsvParseError(
                            f"{path}: row {line_no}, column '{names[col]}': "
                            "missing value (rerun with na='ffill' to forward-fill)"
                        )
                    if not rows:
                        raise CsvParseError(
                            f"{path}: row {line_no}, column '{names[col]}': "
                            "missing value in first data row, nothing to forward-fill"
                        )
                    value = rows[-1][col]
                row.append(value)
            rows.append(row)
    if len(rows) < 2:
        raise InvalidInputError(f"{path}: need at least 2 data rows, got {len(rows)}")
    return Dataset(tuple(names), rows), timestamps


def sliding_windows(
    ds: Dataset, cfg: WindowConfig
) -> list[tuple[int, Dataset, Dataset]]:
    """Consecutive window pairs (previous, current) over the dataset.

    The window ending at 1-based observation t covers observations
    t-width+1 .. t and is always compared against the window ending at
    t-1; the stride only thins which t are emitted, starting at the
    first feasible t = width + 1.
    """
    n = ds.n_observations
    minimum = cfg.width + cfg.stride
    if n < minimum:
        raise InvalidInputError(
            f"need at least width + stride = {minimum} observations, got {n}"
        )
    out = []
    for t in range(cfg.width + 1, n + 1, cfg.stride):
        prev = Dataset(ds.variable_names, ds.data[t - cfg.width - 1 : t - 1])
        curr = Dataset(ds.variable_names, ds.data[t - cfg.width : t])
        out.append((t, prev, curr))
    return out


def _resolve_targets(
    names: Sequence[str], cfg: PipelineConfig
) -> tuple[list[str], list[tuple[tuple[int, ...], tuple[int, ...]]]]:
    if cfg.targets is None:
        labels = list(names)
        pairs = [((i,), (i,)) for i in range(len(names))]
        return labels, pairs
    index = {name: i for i, name in enumerate(names)}
    labels, pairs = [], []
    for group in cfg.targets:
        unknown = [n for n in group if n not in index]
        if unknown:
            raise InvalidInputError(f"unknown target variables: {unknown}")
        idx = tuple(sorted(index[n] for n in group))
        labels.append("+".join(group))
        pairs.append((idx, idx))
    return labels, pairs


def score_stream(
    ds: Dataset,
    window_cfg: WindowConfig,
    pipeline_cfg: PipelineConfig,
    timestamps: Sequence[str] | None = None,
) -> list[ScoreReport]:
    """Score every consecutive window pair of a dataset.

    Each report carries the system score, one score per target, and
    window metadata; ``metadata['t']`` is the timestamp of the current
    window's last observation when timestamps are given, its 1-based
    index otherwise.
    """
    if timestamps is not None and len(timestamps) != ds.n_observations:
        raise InvalidInputError(
            f"{len(timestamps)} timestamps for {ds.n_observations} observations"
        )
    labels, pairs = _resolve_targets(ds.variable_names, pipeline_cfg)
    kind = pipeline_cfg.matrix_kernel
    ridge = pipeline_cfg.ridge
    reports = []
    for t, prev, curr in sliding_windows(ds, window_cfg):
        stamp = timestamps[t - 1] if timestamps is not None else t
        try:
            k = build_kernel(prev, pipeline_cfg)
            k2 = build_kernel(curr, pipeline_cfg)
            system = matrix_divergence(k.values, k2.values, kind, ridge)
            scores = score_target_pairs(k.values, k2.values, pairs, kind, ridge)
        except InvalidInputError as exc:
            raise type(exc)(f"window t={stamp}: {exc}") from exc
        reports.append(
            ScoreReport(
                system_score=system,
                target_scores=dict(zip(labels, scores)),
                metadata={
                    "t": stamp,
                    "index": t,
                    "window": [t - window_cfg.width + 1, t],
                    "previous_window": [t - window_cfg.width, t - 1],
                },
            )
        )
    return reports
