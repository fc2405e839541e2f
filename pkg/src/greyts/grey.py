"""Grey forecasting with a first-order dynamic equation on a time scale.

The model accumulates the observed series, fits the linear dynamic equation
(accumulated level responds to its own size plus a constant input) by least
squares, and predicts through the generalized exponential, so the same code
covers the classical discrete forecaster, its continuous counterpart, and
hybrid sampling domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    AllZeroActuals,
    MembershipError,
    RegressivityError,
    SingularDesign,
    TooFewSamples,
)
from .timescale import (
    DEFAULT_DENSE_NODES,
    MEMBERSHIP_TOL,
    SINGULARITY_TOL,
    TimeScale,
    TsFunction,
    delta_derivative,
    exponential,
)

#: Fitted development coefficients smaller than this use the linear branch.
DEGENERATE_A = 1e-12

MIN_FIT_SAMPLES = 4


@dataclass(frozen=True)
class SeriesSample:
    """One observation of the original series."""

    t: float
    x: float


@dataclass(frozen=True)
class AgoSeries:
    """Accumulated series on the same scale as the input data."""

    domain: TimeScale
    times: np.ndarray
    values: np.ndarray
    y0: float
    t0: float


@dataclass(frozen=True)
class GreyParams:
    """Fitted dynamic-equation parameters plus the prediction anchor."""

    a: float
    b: float
    y0: float
    t0: float
    residual_norm: float

    @property
    def degenerate(self) -> bool:
        return abs(self.a) < DEGENERATE_A


@dataclass(frozen=True)
class ForecastReport:
    """Fitted and predicted values with in-sample error metrics."""

    fitted: tuple[tuple[float, float], ...]
    predicted: tuple[tuple[float, float], ...]
    mape: float | None
    rmse: float | None


def _as_samples(series: Iterable) -> list[SeriesSample]:
    out = []
    for item in series:
        if isinstance(item, SeriesSample):
            out.append(item)
        else:
            t, x = item
            out.append(SeriesSample(float(t), float(x)))
    return out


def ago(series: Sequence, ts: TimeScale, y0: float | None = None) -> AgoSeries:
    """Accumulate the series over the scale.

    The running total starts from the anchor ``y0`` (the first observation
    by default), grows by trapezoidal quadrature inside dense intervals, and
    across each gap by the gap width times the arrival sample, so integer
    lattices reduce to the plain cumulative sum of the data.
    """
    samples = _as_samples(series)
    if len(samples) < 2:
        raise TooFewSamples("accumulation needs at least 2 samples")
    f = TsFunction(ts, [s.t for s in samples], [s.x for s in samples])
    anchor = float(f.values[0]) if y0 is None else float(y0)
    y = np.empty_like(f.values)
    y[0] = anchor
    idx = f._interval_idx
    for k in range(1, f.times.size):
        step = f.times[k] - f.times[k - 1]
        if idx[k] == idx[k - 1]:
            y[k] = y[k - 1] + 0.5 * step * (f.values[k - 1] + f.values[k])
        else:
            y[k] = y[k - 1] + step * f.values[k]
    return AgoSeries(ts, f.times.copy(), y, anchor, float(f.times[0]))


def iago(series: AgoSeries, x0: float | None = None) -> list[SeriesSample]:
    """Invert the accumulation exactly at the sample grid.

    Gap steps divide the increment by the gap width; trapezoid steps are
    unwound recursively from each interval's entry value.  The first value
    is the anchor (``x0`` overrides it when the accumulation used a custom
    anchor).
    """
    times, y = series.times, series.values
    x = np.empty_like(y)
    x[0] = series.y0 if x0 is None else float(x0)
    idx = np.array([series.domain._locate(t)[0] for t in times])
    for k in range(1, times.size):
        step = times[k] - times[k - 1]
        if idx[k] == idx[k - 1]:
            x[k] = 2.0 * (y[k] - y[k - 1]) / step - x[k - 1]
        else:
            x[k] = (y[k] - y[k - 1]) / step
    return [SeriesSample(float(t), float(v)) for t, v in zip(times, x)]


def fit(series: Sequence, ts: TimeScale, y0: float | None = None) -> GreyParams:
    """Estimate the development coefficient and grey input by least squares.

    Each sample point in the derivative domain contributes one regression
    row: the delta derivative of the accumulated series against a background
    level that is the two-point mean across gaps and the local value at
    dense points.  On the integer lattice this is exactly the classical
    normal-equation estimate.
    """
    samples = _as_samples(series)
    if len(samples) < MIN_FIT_SAMPLES:
        raise TooFewSamples(f"fitting needs at least {MIN_FIT_SAMPLES} samples")
    acc = ago(samples, ts, y0=y0)
    yfun = TsFunction(ts, acc.times, acc.values)
    t_max = ts.max
    max_is_cut = ts.backward_graininess(t_max) > 0
    dy_rows: list[float] = []
    z_rows: list[float] = []
    for k, t in enumerate(acc.times):
        if max_is_cut and t == t_max:
            continue
        mu = ts.graininess(t)
        if mu > 0:
            dy_rows.append((acc.values[k + 1] - acc.values[k]) / mu)
            z_rows.append(0.5 * (acc.values[k] + acc.values[k + 1]))
        else:
            dy_rows.append(delta_derivative(yfun, t))
            z_rows.append(float(acc.values[k]))
    dy = np.array(dy_rows)
    z = np.array(z_rows)
    design = np.column_stack([-z, np.ones_like(z)])
    solution, _, rank, _ = np.linalg.lstsq(design, dy, rcond=None)
    if rank < 2:
        raise SingularDesign("background series is constant; cannot separate a from b")
    a, b = float(solution[0]), float(solution[1])
    for point, gap in ts.gaps_between(ts.min, ts.max + 1.0):
        if abs(1.0 - a * gap) <= SINGULARITY_TOL:
            raise RegressivityError(
                f"fitted a={a!r} is singular at the gap of width {gap!r} after t={point!r}"
            )
    residual = float(np.linalg.norm(dy + a * z - b))
    return GreyParams(a=a, b=b, y0=acc.y0, t0=acc.t0, residual_norm=residual)


def accumulated_level(params: GreyParams, ts: TimeScale, t: float) -> float:
    """Closed-form accumulated level at ``t``: exponential relaxation toward
    the equilibrium b/a, or the linear ramp when a is effectively zero."""
    t = ts.snap(t)
    if params.degenerate:
        return params.y0 + params.b * (t - params.t0)
    ratio = params.b / params.a
    return exponential(-params.a, ts, t, params.t0) * (params.y0 - ratio) + ratio


def restored_value(params: GreyParams, ts: TimeScale, t: float) -> float:
    """Original-series prediction at ``t``.

    The anchor keeps its observed value; across a gap the accumulated
    increment is divided by the gap width; inside dense intervals the exact
    derivative of the level curve, b - a*level, is used.
    """
    t = ts.snap(t)
    if abs(t - params.t0) <= MEMBERSHIP_TOL:
        return params.y0
    nu = ts.backward_graininess(t)
    if nu > 0:
        prev = ts.backward_jump(t)
        return (accumulated_level(params, ts, t) - accumulated_level(params, ts, prev)) / nu
    if params.degenerate:
        return params.b
    return params.b - params.a * accumulated_level(params, ts, t)


def predict(
    params: GreyParams,
    ts: TimeScale,
    times: Sequence[float],
    horizon_times: Sequence[float] = (),
    actuals: Sequence[float] | None = None,
) -> ForecastReport:
    """Evaluate the fitted model at in-sample times and horizon times."""
    if not params.degenerate and not is_model_regressive(params, ts):
        raise RegressivityError(
            f"a={params.a!r} is singular on the prediction scale {ts.to_text()}"
        )
    fitted = tuple((ts.snap(t), restored_value(params, ts, t)) for t in times)
    predicted = tuple((ts.snap(t), restored_value(params, ts, t)) for t in horizon_times)
    mape = rmse = None
    if actuals is not None:
        if len(actuals) != len(fitted):
            raise AlignmentError(
                f"{len(actuals)} actuals supplied for {len(fitted)} fitted points"
            )
        actual_pairs = [(t, x) for (t, _), x in zip(fitted, actuals)]
        mape, rmse = metrics(actual_pairs, fitted)
    return ForecastReport(fitted=fitted, predicted=predicted, mape=mape, rmse=rmse)


def is_model_regressive(params: GreyParams, ts: TimeScale) -> bool:
    from .timescale import is_regressive

    return bool(is_regressive(-params.a, ts))


def metrics(actual: Sequence, fitted: Sequence) -> tuple[float, float]:
    """MAPE (percent, over nonzero actuals) and RMSE of aligned series."""
    actual_s = _as_samples(actual)
    fitted_s = _as_samples(fitted)
    if len(actual_s) != len(fitted_s):
        raise AlignmentError(f"length mismatch: {len(actual_s)} vs {len(fitted_s)}")
    for u, v in zip(actual_s, fitted_s):
        if abs(u.t - v.t) > MEMBERSHIP_TOL:
            raise AlignmentError(f"misaligned times {u.t!r} vs {v.t!r}")
    av = np.array([s.x for s in actual_s])
    fv = np.array([s.x for s in fitted_s])
    err = fv - av
    nonzero = av != 0.0
    if not np.any(nonzero):
        raise AllZeroActuals("every actual value is zero; MAPE undefined")
    mape = 100.0 * float(np.mean(np.abs(err[nonzero]) / np.abs(av[nonzero])))
    rmse = float(np.sqrt(np.mean(err**2)))
    return mape, rmse


def generate_series(
    params: GreyParams,
    ts: TimeScale,
    nodes_per_dense_interval: int = DEFAULT_DENSE_NODES,
) -> list[SeriesSample]:
    """Synthesize a series the fitting procedure reproduces exactly.

    Dense stretches follow the continuous solution of the dynamic equation;
    each gap applies the two-point-mean difference step, so every scattered
    regression row of :func:`fit` has zero residual at the generating
    parameters and dense rows are limited only by quadrature.
    """
    a, b, y0 = params.a, params.b, params.y0
    times: list[float] = []
    xs: list[float] = []
    y_entry = y0
    for i, (left, right) in enumerate(ts.intervals):
        if i == 0:
            times.append(left)
            xs.append(y0)
        else:
            prev_right = ts.intervals[i - 1][1]
            gap = left - prev_right
            denom = 1.0 + 0.5 * a * gap
            if abs(denom) <= SINGULARITY_TOL:
                raise RegressivityError(
                    f"cannot step across the gap of width {gap!r}: 1 + a*gap/2 vanishes"
                )
            y_prev = _dense_level(a, b, y_entry, left_anchor := None, 0.0) if False else y_exit
            y_next = ((1.0 - 0.5 * a * gap) * y_prev + gap * b) / denom
            times.append(left)
            xs.append((y_next - y_prev) / gap)
            y_entry = y_next
        if left == right:
            y_exit = y_entry
            continue
        grid = np.linspace(left, right, max(nodes_per_dense_interval, 2))
        for t in grid[1:]:
            level = _dense_level(a, b, y_entry, left, t - left)
            times.append(float(t))
            xs.append(b - a * level if abs(a) >= DEGENERATE_A else b)
        y_exit = _dense_level(a, b, y_entry, left, right - left)
    return [SeriesSample(t, x) for t, x in zip(times, xs)]


def _dense_level(a: float, b: float, y_start: float, _left, elapsed: float) -> float:
    if abs(a) < DEGENERATE_A:
        return y_start + b * elapsed
    ratio = b / a
    return (y_start - ratio) * math.exp(-a * elapsed) + ratio
