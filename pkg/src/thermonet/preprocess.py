"""Baseline shift, linear detrending, amplitude normalization and pooling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DataError, StageError
from .series import Stage, TimeSeries, require_stage

#: Tolerance used when deciding whether two series share a sampling interval.
DT_RTOL = 1e-9


@dataclass(frozen=True)
class DetrendReport:
    slope: float  # value per sample
    intercept: float
    residual_mean: float


def baseline(s: TimeSeries) -> TimeSeries:
    """Shift the series so that its first sample is exactly zero."""
    require_stage(s, {Stage.RAW_MEAN, Stage.PC1}, "baseline")
    return s.advance(s.values - s.values[0], Stage.BASELINED)


def fit_line(y: np.ndarray) -> tuple[float, float]:
    """Ordinary least-squares ``y ~ slope * t + intercept`` over ``t = 0..n-1``."""
    n = y.size
    t = np.arange(n, dtype=np.float64)
    t_mean = (n - 1) / 2.0
    y_mean = y.mean()
    tc = t - t_mean
    slope = float(np.dot(tc, y - y_mean) / np.dot(tc, tc))
    return slope, float(y_mean - slope * t_mean)


def detrend_linear(s: TimeSeries) -> tuple[TimeSeries, DetrendReport]:
    """Remove the least-squares line fitted against the sample index."""
    require_stage(s, {Stage.RAW_MEAN, Stage.PC1, Stage.BASELINED}, "detrend_linear")
    if len(s) < 2:
        raise ContractError("detrend_linear needs at least 2 samples")
    y = s.values
    slope, intercept = fit_line(y)
    t = np.arange(y.size, dtype=np.float64)
    # centre around the sample mean first so the residuals stay accurate
    # for large offsets
    resid = (y - y.mean()) - slope * (t - (y.size - 1) / 2.0)
    report = DetrendReport(slope, intercept, float(resid.mean()))
    return s.advance(resid, Stage.DETRENDED), report


def normalize(s: TimeSeries, scale: float) -> TimeSeries:
    require_stage(s, {Stage.DETRENDED}, "normalize")
    if not (np.isfinite(scale) and scale > 0):
        raise ContractError(f"normalization scale must be positive and finite, got {scale!r}")
    return s.advance(s.values / scale, Stage.NORMALIZED)


def choose_scale(baselined: TimeSeries, detrended: TimeSeries, mode: str = "auto") -> float:
    """Pick the divisor used by :func:`normalize`.

    ``auto`` uses the mean absolute value of the baselined series, falling
    back to the residual standard deviation and finally to 1 when either is
    numerically zero. ``std`` skips straight to the residual standard
    deviation and ``none`` always returns 1. The choice only rescales the
    amplitude axis; quantile symbols do not depend on it.
    """
    if mode == "none":
        return 1.0
    if mode == "auto":
        m = float(np.mean(np.abs(baselined.values)))
        if m > 1e-12:
            return m
    elif mode != "std":
        raise ContractError(f"unknown normalization mode {mode!r}")
    sd = float(np.std(detrended.values))
    return sd if sd > 1e-12 else 1.0


def prepare(s: TimeSeries, mode: str = "auto") -> tuple[TimeSeries, DetrendReport]:
    """Baseline, detrend and normalize one raw series."""
    b = baseline(s)
    d, report = detrend_linear(b)
    return normalize(d, choose_scale(b, d, mode)), report


def pool(series) -> TimeSeries:
    """Concatenate normalized series in the given order."""
    series = list(series)
    if not series:
        raise ContractError("pool needs at least one series")
    for i, s in enumerate(series):
        if s.stage is not Stage.NORMALIZED:
            raise StageError(f"pool input {i} ({s.label!r}) has stage {s.stage.value}, expected normalized")
    dt = series[0].dt
    for i, s in enumerate(series[1:], 1):
        if abs(s.dt - dt) > DT_RTOL * dt:
            raise DataError(f"pool input {i} has dt {s.dt}, expected {dt}", code="mixed-dt")
    labels = tuple(s.label for s in series)
    values = np.concatenate([s.values for s in series])
    return TimeSeries(values, dt=dt, label="+".join(labels), stage=Stage.POOLED, sources=labels)
