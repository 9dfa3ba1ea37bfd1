"""Coherence metrics extracted from recorded trajectories.

Turns the populations of |e,m> and |g,n> into oscillation counts and
exponential envelope fits: the difference D(t) oscillates and its peak
envelope is fitted piecewise (descending then ascending around the
envelope minimum), while the sum S(t) is fitted by a single decaying
exponential.  All fits are closed-form log-linear least squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CoherenceReport",
    "EnvelopeFit",
    "ExponentialFit",
    "ObservableSeries",
    "OscillationCount",
    "build_report",
    "count_oscillations",
    "extract_observables",
    "fit_exponential_envelope",
    "fit_single_exponential",
]


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Per-time populations and their difference/sum."""

    p_gn: np.ndarray
    p_em: np.ndarray
    difference: np.ndarray  # P_em - P_gn
    total: np.ndarray  # P_em + P_gn


def extract_observables(trajectory) -> ObservableSeries:
    """Recompute P_gn, P_em, D and S from the recorded snapshots."""
    states = np.asarray(trajectory.states)
    if states.size == 0:
        raise ValueError("empty trajectory")
    p_gn = states[:, 1, 1].real
    p_em = states[:, 2, 2].real
    return ObservableSeries(p_gn=p_gn, p_em=p_em, difference=p_em - p_gn, total=p_em + p_gn)


@dataclass(frozen=True)
class OscillationCount:
    zero_crossings: int
    oscillation_count: int


def count_oscillations(times, series, hysteresis=0.0) -> OscillationCount:
    """Count sign changes of ``series`` with a +-hysteresis dead band.

    A crossing is registered only when the series moves from beyond one
    band edge to beyond the other, which suppresses counting noise around
    zero.  One oscillation is two crossings.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.shape != series.shape:
        raise ValueError(f"length mismatch: {times.shape} times vs {series.shape} samples")
    if times.size < 2:
        raise ValueError("need at least two samples")
    if hysteresis < 0:
        raise ValueError(f"hysteresis must be >= 0, got {hysteresis!r}")

    crossings = 0
    armed = 0
    for x in series:
        if armed == 0:
            if x > hysteresis:
                armed = 1
            elif x < -hysteresis:
                armed = -1
        elif armed > 0 and x < -hysteresis:
            crossings += 1
            armed = -1
        elif armed < 0 and x > hysteresis:
            crossings += 1
            armed = 1
    return OscillationCount(zero_crossings=crossings, oscillation_count=crossings // 2)


def _log_linear_fit(t, log_y):
    """Least-squares slope/intercept of log_y vs t with the regression r^2."""
    t_mean = t.mean()
    y_mean = log_y.mean()
    ss_xx = np.sum((t - t_mean) ** 2)
    if ss_xx == 0.0:
        raise ValueError("degenerate fit: all samples at the same time")
    slope = np.sum((t - t_mean) * (log_y - y_mean)) / ss_xx
    intercept = y_mean - slope * t_mean
    residuals = log_y - (intercept + slope * t)
    ss_res = np.sum(residuals**2)
    ss_tot = np.sum((log_y - y_mean) ** 2)
    r_squared = 1.0 if ss_tot <= 1e-30 else max(0.0, 1.0 - ss_res / ss_tot)
    return slope, intercept, float(r_squared)


@dataclass(frozen=True)
class ExponentialFit:
    rate: float  # positive for decay
    amplitude: float
    r_squared: float


def fit_single_exponential(times, series) -> ExponentialFit:
    """Log-linear least-squares fit of a strictly positive series."""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.shape != series.shape or times.size < 2:
        raise ValueError("need two equal-length arrays with at least two samples")
    if np.any(series <= 0.0):
        raise ValueError(
            "series has nonpositive samples; fit the oscillation envelope instead"
        )
    slope, intercept, r_squared = _log_linear_fit(times, np.log(series))
    return ExponentialFit(rate=-slope, amplitude=float(np.exp(intercept)), r_squared=r_squared)


def _zero_crossing_times(times, series):
    signs = np.sign(series)
    out = []
    last = 0.0
    for t, s in zip(times, signs):
        if s == 0.0:
            continue
        if last != 0.0 and s != last:
            out.append(t)
        last = s
    return np.asarray(out)


def _envelope_peaks(times, series, min_separation):
    """Strict 3-point local maxima of |series|, thinned to min_separation."""
    magnitude = np.abs(series)
    interior = np.nonzero(
        (magnitude[1:-1] > magnitude[:-2]) & (magnitude[1:-1] > magnitude[2:])
    )[0] + 1

    if min_separation is None:
        # Estimate half a carrier period from the zero-crossing spacing;
        # duplicate peaks of one lobe sit much closer than that.
        crossings = _zero_crossing_times(times, series)
        if len(crossings) >= 3:
            min_separation = 0.5 * float(np.median(np.diff(crossings)))
        else:
            min_separation = 0.0

    kept = []
    for i in interior:
        if kept and times[i] - times[kept[-1]] < min_separation:
            if magnitude[i] > magnitude[kept[-1]]:
                kept[-1] = i
        else:
            kept.append(i)
    return np.asarray(kept, dtype=int)


@dataclass(frozen=True)
class EnvelopeFit:
    """Two-sided exponential fit of the |series| peak envelope."""

    descending_rate: float | None
    ascending_rate: float | None
    split_time: float
    r_squared_desc: float | None
    r_squared_asc: float | None
    peak_times: tuple = field(default_factory=tuple)
    excluded_nonpositive: int = 0


def fit_exponential_envelope(times, series, min_separation=None) -> EnvelopeFit:
    """Fit exponentials to the peak envelope of an oscillating series.

    Local maxima of |series| form the envelope samples.  The peak
    sequence is split at its global amplitude minimum; on each side
    ln(peak amplitude) is fitted linearly in time.  The descending rate
    is positive for decay, the ascending rate positive for growth.  A
    side with fewer than two usable peaks is reported as absent (None).
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.shape != series.shape:
        raise ValueError(f"length mismatch: {times.shape} times vs {series.shape} samples")

    peaks = _envelope_peaks(times, series, min_separation)
    if len(peaks) < 2:
        raise ValueError(f"need at least two envelope peaks, found {len(peaks)}")

    peak_times = times[peaks]
    peak_amps = np.abs(series)[peaks]
    split = int(np.argmin(peak_amps))
    split_time = float(peak_times[split])

    excluded = 0

    def fit_side(idx):
        nonlocal excluded
        t_side = peak_times[idx]
        a_side = peak_amps[idx]
        positive = a_side > 0.0
        excluded += int(np.sum(~positive))
        t_side, a_side = t_side[positive], a_side[positive]
        if len(t_side) < 2:
            return None, None
        slope, _, r_squared = _log_linear_fit(t_side, np.log(a_side))
        return slope, r_squared

    desc_slope, r_desc = fit_side(np.arange(0, split + 1))
    asc_slope, r_asc = fit_side(np.arange(split, len(peaks)))

    return EnvelopeFit(
        descending_rate=None if desc_slope is None else -desc_slope,
        ascending_rate=None if asc_slope is None else asc_slope,
        split_time=split_time,
        r_squared_desc=r_desc,
        r_squared_asc=r_asc,
        peak_times=tuple(float(t) for t in peak_times),
        excluded_nonpositive=excluded,
    )


@dataclass(frozen=True)
class CoherenceReport:
    """Oscillation counts and envelope/sum fit results for one trajectory."""

    oscillation_count: int
    zero_crossings: int
    descending_rate: float | None
    ascending_rate: float | None
    split_time: float | None
    sum_decay_rate: float | None
    r_squared_desc: float | None
    r_squared_asc: float | None
    r_squared_sum: float | None
    peak_times: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "oscillation_count": self.oscillation_count,
            "zero_crossings": self.zero_crossings,
            "descending_rate": self.descending_rate,
            "ascending_rate": self.ascending_rate,
            "split_time": self.split_time,
            "sum_decay_rate": self.sum_decay_rate,
            "r_squared_desc": self.r_squared_desc,
            "r_squared_asc": self.r_squared_asc,
            "r_squared_sum": self.r_squared_sum,
            "peak_times": list(self.peak_times),
        }


def build_report(times, difference, total, hysteresis=0.0) -> CoherenceReport:
    """Assemble the full coherence report from the D(t) and S(t) series."""
    counts = count_oscillations(times, difference, hysteresis)

    try:
        envelope = fit_exponential_envelope(times, difference)
    except ValueError:
        envelope = None

    total = np.asarray(total, dtype=float)
    sum_fit = None
    if total.size >= 2 and np.all(total > 0.0):
        sum_fit = fit_single_exponential(times, total)

    return CoherenceReport(
        oscillation_count=counts.oscillation_count,
        zero_crossings=counts.zero_crossings,
        descending_rate=envelope.descending_rate if envelope else None,
        ascending_rate=envelope.ascending_rate if envelope else None,
        split_time=envelope.split_time if envelope else None,
        sum_decay_rate=sum_fit.rate if sum_fit else None,
        r_squared_desc=envelope.r_squared_desc if envelope else None,
        r_squared_asc=envelope.r_squared_asc if envelope else None,
        r_squared_sum=sum_fit.r_squared if sum_fit else None,
        peak_times=envelope.peak_times if envelope else (),
    )
