"""Calculus on time scales represented as finite unions of closed intervals.

A time scale is a nonempty closed subset of the reals that may mix isolated
points with whole intervals, so one set of operators covers difference
equations, differential equations, and hybrids of the two.  Restricting the
representation to finitely many disjoint closed intervals (isolated points
are degenerate intervals) keeps the jump operators, graininess, and measure
computations exact; only quadrature inside dense intervals and finite
differences at dense points are approximate.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    BranchError,
    DomainError,
    InsufficientNodes,
    MembershipError,
    NonMonotoneTime,
    OrderError,
    ParseError,
    RegressivityError,
)

#: Absolute tolerance for matching a float against points of a scale.
MEMBERSHIP_TOL = 1e-9

#: Threshold below which 1 + mu*p is treated as singular.
SINGULARITY_TOL = 1e-14

#: Default number of quadrature nodes placed inside each dense interval.
DEFAULT_DENSE_NODES = 128


@dataclass(frozen=True)
class PointClass:
    """Scattered/dense classification of one point of a time scale."""

    right_scattered: bool
    left_scattered: bool
    is_min: bool
    is_max: bool

    @property
    def right_dense(self) -> bool:
        return not self.right_scattered

    @property
    def left_dense(self) -> bool:
        return not self.left_scattered


@dataclass(frozen=True)
class RegressivityCheck:
    """Result of a regressivity test; truthiness follows the delta condition."""

    delta: bool
    nabla: bool

    def __bool__(self) -> bool:
        return self.delta


@dataclass(frozen=True)
class TimeScale:
    """Finite union of disjoint closed intervals ``[left, right]``.

    ``left == right`` encodes an isolated point.  Intervals are stored
    sorted and strictly separated, which makes ``forward_jump``,
    ``backward_jump`` and ``graininess`` exact lookups.
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.intervals:
            raise DomainError("a time scale needs at least one interval")
        cleaned = []
        prev_right = None
        for pair in self.intervals:
            left, right = float(pair[0]), float(pair[1])
            if not (math.isfinite(left) and math.isfinite(right)):
                raise DomainError("interval endpoints must be finite")
            if left > right:
                raise DomainError(f"interval [{left}, {right}] is reversed")
            if prev_right is not None and left <= prev_right:
                raise DomainError("intervals must be disjoint and strictly increasing")
            cleaned.append((left, right))
            prev_right = right
        object.__setattr__(self, "intervals", tuple(cleaned))
        object.__setattr__(self, "_lefts", tuple(l for l, _ in cleaned))

    # ---------- constructors ----------

    @classmethod
    def interval(cls, left: float, right: float) -> "TimeScale":
        return cls(((left, right),))

    @classmethod
    def points(cls, values: Iterable[float]) -> "TimeScale":
        return cls(tuple((float(v), float(v)) for v in values))

    @classmethod
    def integers(cls, low: int, high: int) -> "TimeScale":
        """The integer lattice {low, low+1, ..., high}."""
        return cls.points(range(int(low), int(high) + 1))

    @classmethod
    def uniform(cls, start: float, stop: float, step: float) -> "TimeScale":
        """Evenly spaced isolated points start, start+step, ... up to stop."""
        if step <= 0:
            raise DomainError("step must be positive")
        count = int(math.floor((stop - start) / step + MEMBERSHIP_TOL)) + 1
        return cls.points(start + k * step for k in range(max(count, 1)))

    @classmethod
    def parse(cls, text: str) -> "TimeScale":
        """Parse the text form ``left..right;point;...``, e.g. ``0..1;2..3;5``."""
        pieces = []
        for token in text.split(";"):
            token = token.strip()
            if not token:
                raise ParseError(f"empty segment in time-scale text {text!r}")
            try:
                if ".." in token:
                    left_s, right_s = token.split("..", 1)
                    pieces.append((float(left_s), float(right_s)))
                else:
                    value = float(token)
                    pieces.append((value, value))
            except ValueError as exc:
                raise ParseError(f"bad time-scale segment {token!r}") from exc
        try:
            return cls(tuple(pieces))
        except DomainError as exc:
            raise ParseError(f"invalid time scale {text!r}: {exc}") from exc

    def to_text(self) -> str:
        parts = []
        for left, right in self.intervals:
            parts.append(repr(left) if left == right else f"{left!r}..{right!r}")
        return ";".join(parts)

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.to_text()

    # ---------- basic queries ----------

    @property
    def min(self) -> float:
        return self.intervals[0][0]

    @property
    def max(self) -> float:
        return self.intervals[-1][1]

    def _locate(self, t: float) -> tuple[int, float]:
        """Interval index containing ``t`` plus the snapped coordinate."""
        t = float(t)
        idx = bisect_right(self._lefts, t + MEMBERSHIP_TOL) - 1
        if idx >= 0:
            left, right = self.intervals[idx]
            if t <= right + MEMBERSHIP_TOL:
                if abs(t - left) <= MEMBERSHIP_TOL:
                    return idx, left
                if abs(t - right) <= MEMBERSHIP_TOL:
                    return idx, right
                return idx, t
        raise MembershipError(f"t={t!r} is not a member of the time scale {self.to_text()}")

    def contains(self, t: float) -> bool:
        try:
            self._locate(t)
            return True
        except MembershipError:
            return False

    def snap(self, t: float) -> float:
        """Snap ``t`` onto the scale (within tolerance) or raise MembershipError."""
        return self._locate(t)[1]

    # ---------- jump operators ----------

    def forward_jump(self, t: float) -> float:
        """Nearest scale point strictly after ``t``; ``t`` itself at the maximum or inside an interval."""
        idx, t = self._locate(t)
        left, right = self.intervals[idx]
        if t < right:
            return t
        if idx + 1 < len(self.intervals):
            return self.intervals[idx + 1][0]
        return t

    def backward_jump(self, t: float) -> float:
        """Nearest scale point strictly before ``t``; ``t`` itself at the minimum or inside an interval."""
        idx, t = self._locate(t)
        left, right = self.intervals[idx]
        if t > left:
            return t
        if idx > 0:
            return self.intervals[idx - 1][1]
        return t

    def graininess(self, t: float) -> float:
        """Forward gap ``forward_jump(t) - t`` (zero at right-dense points)."""
        return self.forward_jump(t) - self.snap(t)

    def backward_graininess(self, t: float) -> float:
        """Backward gap ``t - backward_jump(t)`` (zero at left-dense points)."""
        t = self.snap(t)
        return t - self.backward_jump(t)

    def classify(self, t: float) -> PointClass:
        idx, t = self._locate(t)
        return PointClass(
            right_scattered=self.forward_jump(t) > t,
            left_scattered=self.backward_jump(t) < t,
            is_min=(t == self.min),
            is_max=(t == self.max),
        )

    def derivative_domain(self) -> "TimeScale":
        """The scale minus its maximum when that maximum is left-scattered."""
        if len(self.intervals) > 1 and self.backward_graininess(self.max) > 0:
            return TimeScale(self.intervals[:-1])
        return self

    # ---------- measure helpers ----------

    def dense_length_between(self, s: float, t: float) -> float:
        """Total length of the interval parts of the scale inside [s, t]."""
        total = 0.0
        for left, right in self.intervals:
            lo, hi = max(left, s), min(right, t)
            if lo < hi:
                total += hi - lo
        return total

    def gaps_between(self, s: float, t: float) -> list[tuple[float, float]]:
        """(point, gap) for every right-scattered point in [s, t)."""
        out = []
        for i in range(len(self.intervals) - 1):
            right = self.intervals[i][1]
            if s <= right < t:
                out.append((right, self.intervals[i + 1][0] - right))
        return out


def cylinder(h: float, z: float, mode: str = "delta") -> float:
    """Cylinder transform turning scattered-step products into integrands.

    ``delta`` mode evaluates log(1 + z*h)/h, ``nabla`` mode -log(1 - z*h)/h;
    both reduce to ``z`` at h = 0.  Only the real branch is computed: in
    nabla mode a negative logarithm argument contributes its real part.
    """
    if h < 0:
        raise DomainError("cylinder step h must be nonnegative")
    if mode not in ("delta", "nabla"):
        raise DomainError(f"unknown cylinder mode {mode!r}")
    if h == 0:
        return float(z)
    if mode == "delta":
        arg = 1.0 + z * h
        if arg <= 0.0:
            raise BranchError(f"cylinder argument 1 + z*h = {arg!r} outside the real branch")
        return math.log(arg) / h
    arg = 1.0 - z * h
    if arg == 0.0:
        raise BranchError("cylinder argument 1 - z*h vanishes")
    return -math.log(abs(arg)) / h


def is_regressive(p: float, ts: TimeScale) -> RegressivityCheck:
    """Check 1 + mu*p != 0 at every right-scattered point (delta condition).

    The nabla condition 1 - nu*p != 0 is reported alongside; the set of gap
    widths is the same for both, seen from opposite ends of each gap.
    """
    gaps = [gap for _, gap in ts.gaps_between(ts.min, ts.max + 1.0)]
    delta_ok = all(abs(1.0 + gap * p) > SINGULARITY_TOL for gap in gaps)
    nabla_ok = all(abs(1.0 - gap * p) > SINGULARITY_TOL for gap in gaps)
    return RegressivityCheck(delta=delta_ok, nabla=nabla_ok)


def exponential(p: float, ts: TimeScale, t: float, s: float) -> float:
    """Generalized exponential e_p(t, s) for a constant coefficient p.

    Equals exp(p*(t-s)) on a single interval and (1+p)^(t-s) on the integer
    lattice; in general exp(p * dense length) times the product of
    (1 + gap*p) over the scattered steps crossed.  Exact up to rounding.
    """
    t = ts.snap(t)
    s = ts.snap(s)
    if t == s:
        return 1.0
    lo, hi = (s, t) if s < t else (t, s)
    value = math.exp(p * ts.dense_length_between(lo, hi))
    for point, gap in ts.gaps_between(lo, hi):
        factor = 1.0 + gap * p
        if abs(factor) <= SINGULARITY_TOL:
            raise RegressivityError(
                f"1 + mu*p vanishes at t={point!r} (gap {gap!r}); exponential undefined"
            )
        value *= factor
    return value if t > s else 1.0 / value


@dataclass(frozen=True)
class TsFunction:
    """A function known through samples on a computation grid over a scale.

    Every endpoint of every interval (hence every isolated point) must be
    sampled; dense intervals carry additional quadrature nodes.  Node times
    are snapped onto the scale at construction.
    """

    domain: TimeScale
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise DomainError("times and values must be 1-D arrays of equal length")
        if times.size == 0:
            raise InsufficientNodes("a sampled function needs at least one node")
        snapped = np.array([self.domain.snap(t) for t in times])
        if np.any(np.diff(snapped) <= 0):
            raise NonMonotoneTime("node times must be strictly increasing")
        interval_idx = np.array([self.domain._locate(t)[0] for t in snapped])
        node_set = set(snapped.tolist())
        for left, right in self.domain.intervals:
            if left not in node_set or right not in node_set:
                raise InsufficientNodes(
                    f"every interval endpoint must be sampled; missing a node at "
                    f"{left!r} or {right!r}"
                )
        object.__setattr__(self, "times", snapped)
        object.__setattr__(self, "values", values.copy())
        object.__setattr__(self, "_interval_idx", interval_idx)

    @classmethod
    def sample(
        cls,
        ts: TimeScale,
        fn: Callable[[float], float],
        nodes_per_dense_interval: int = DEFAULT_DENSE_NODES,
    ) -> "TsFunction":
        """Sample ``fn`` on the standard grid: isolated points plus uniform nodes per interval."""
        if nodes_per_dense_interval < 2:
            raise DomainError("nodes_per_dense_interval must be at least 2")
        grid: list[float] = []
        for left, right in ts.intervals:
            if left == right:
                grid.append(left)
            else:
                grid.extend(np.linspace(left, right, nodes_per_dense_interval).tolist())
        values = [float(fn(t)) for t in grid]
        return cls(ts, np.array(grid), np.array(values))

    def node_index(self, t: float) -> int | None:
        t = self.domain.snap(t)
        j = int(np.searchsorted(self.times, t))
        for k in (j - 1, j):
            if 0 <= k < self.times.size and abs(self.times[k] - t) <= MEMBERSHIP_TOL:
                return k
        return None

    def value_at(self, t: float) -> float:
        """Sampled value at ``t``; linear interpolation between nodes of a dense interval."""
        idx, t = self.domain._locate(t)
        k = self.node_index(t)
        if k is not None:
            return float(self.values[k])
        j = int(np.searchsorted(self.times, t))
        if (
            0 < j < self.times.size
            and self._interval_idx[j - 1] == idx
            and self._interval_idx[j] == idx
        ):
            t0, t1 = self.times[j - 1], self.times[j]
            v0, v1 = self.values[j - 1], self.values[j]
            return float(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
        raise MembershipError(f"no sample available at t={t!r}")

    def interval_slice(self, interval_index: int) -> slice:
        """Index range of the nodes lying in the given interval of the domain."""
        idx = self._interval_idx
        start = int(np.searchsorted(idx, interval_index, side="left"))
        stop = int(np.searchsorted(idx, interval_index, side="right"))
        return slice(start, stop)


def _three_point_derivative(ts_triplet, vs_triplet, position: int) -> float:
    """Second-order finite difference at one of three abscissae (0, 1, or 2)."""
    t0, t1, t2 = ts_triplet
    f0, f1, f2 = vs_triplet
    h1, h2 = t1 - t0, t2 - t1
    if position == 0:
        return (
            -f0 * (2 * h1 + h2) / (h1 * (h1 + h2))
            + f1 * (h1 + h2) / (h1 * h2)
            - f2 * h1 / (h2 * (h1 + h2))
        )
    if position == 1:
        return (
            -f0 * h2 / (h1 * (h1 + h2))
            + f1 * (h2 - h1) / (h1 * h2)
            + f2 * h1 / (h2 * (h1 + h2))
        )
    return (
        f0 * h2 / (h1 * (h1 + h2))
        - f1 * (h1 + h2) / (h1 * h2)
        + f2 * (2 * h2 + h1) / (h2 * (h1 + h2))
    )


def delta_derivative(f: TsFunction, t: float) -> float:
    """Delta derivative of a sampled function at a node ``t``.

    Exact difference quotient over the graininess at right-scattered points;
    second-order finite differences from neighboring nodes at dense points
    (one-sided at interval ends).
    """
    ts = f.domain
    idx, t = ts._locate(t)
    if t == ts.max and ts.backward_graininess(t) > 0:
        raise MembershipError(f"t={t!r} is outside the derivative domain (left-scattered maximum)")
    mu = ts.graininess(t)
    if mu > 0:
        return (f.value_at(ts.forward_jump(t)) - f.value_at(t)) / mu
    sel = f.interval_slice(idx)
    times = f.times[sel]
    values = f.values[sel]
    if times.size < 2:
        raise InsufficientNodes(
            f"dense interval {ts.intervals[idx]!r} holds fewer than 2 nodes"
        )
    k = int(np.searchsorted(times, t))
    if k >= times.size or abs(times[k] - t) > MEMBERSHIP_TOL:
        k -= 1
    if abs(times[k] - t) > MEMBERSHIP_TOL:
        raise MembershipError(f"t={t!r} is not a node of the sampled function")
    if times.size == 2:
        return float((values[1] - values[0]) / (times[1] - times[0]))
    if k == 0:
        lo, pos = 0, 0
    elif k == times.size - 1:
        lo, pos = k - 2, 2
    else:
        lo, pos = k - 1, 1
    return float(
        _three_point_derivative(times[lo : lo + 3], values[lo : lo + 3], pos)
    )


def _dense_trapezoid(f: TsFunction, interval_index: int, lo: float, hi: float) -> float:
    sel = f.interval_slice(interval_index)
    times = f.times[sel]
    values = f.values[sel]
    inner = (times > lo + MEMBERSHIP_TOL) & (times < hi - MEMBERSHIP_TOL)
    xs = np.concatenate(([lo], times[inner], [hi]))
    ys = np.concatenate(([f.value_at(lo)], values[inner], [f.value_at(hi)]))
    return float(np.sum(0.5 * np.diff(xs) * (ys[:-1] + ys[1:])))


def delta_integral(f: TsFunction, a: float, b: float) -> float:
    """Delta integral of ``f`` over [a, b]: graininess-weighted values at the
    left end of each gap plus trapezoidal quadrature over dense parts."""
    ts = f.domain
    a = ts.snap(a)
    b = ts.snap(b)
    if a > b:
        raise OrderError(f"integration bounds out of order: {a!r} > {b!r}")
    if a == b:
        return 0.0
    total = 0.0
    last = len(ts.intervals) - 1
    for i, (left, right) in enumerate(ts.intervals):
        if left > b:
            break
        lo, hi = max(left, a), min(right, b)
        if lo < hi:
            total += _dense_trapezoid(f, i, lo, hi)
        if i < last and a <= right < b:
            gap = ts.intervals[i + 1][0] - right
            total += gap * f.value_at(right)
    return total


def nabla_integral(f: TsFunction, a: float, b: float) -> float:
    """Nabla integral of ``f`` over [a, b]: like the delta integral but each
    gap is weighted by the value at its right end (the arrival point)."""
    ts = f.domain
    a = ts.snap(a)
    b = ts.snap(b)
    if a > b:
        raise OrderError(f"integration bounds out of order: {a!r} > {b!r}")
    if a == b:
        return 0.0
    total = 0.0
    for i, (left, right) in enumerate(ts.intervals):
        if left > b:
            break
        lo, hi = max(left, a), min(right, b)
        if lo < hi:
            total += _dense_trapezoid(f, i, lo, hi)
        if i > 0 and a < left <= b:
            gap = left - ts.intervals[i - 1][1]
            total += gap * f.value_at(left)
    return total
