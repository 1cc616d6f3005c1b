"""Per-signal statistics: moments, linear regression, capacitance, RMSE.

All operations are pure functions over the voltage/current channels of a
measurement. Moment conventions (documented so independent checks agree):

- population central moments m_k = (1/n) * sum((x - mean)^k)
- skewness   g1 = m3 / m2**1.5
- kurtosis   g2 = m4 / m2**2 - 3      (excess; normal -> 0, uniform -> -1.2)

Missing-data policy: values are linearly interpolated at the original
timestamps between nearest present neighbors, with constant extension at the
edges; channels missing more than 30% of their values are rejected rather
than smoothed over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AllMissing,
    DegenerateTimes,
    DegenerateVariance,
    EmptyInput,
    FlatVoltage,
    LengthMismatch,
    MissingDataExcessive,
)
from .store import Measurement, Sample

MISSING_FRACTION_CAP = 0.30
FLAT_VOLTAGE_THRESHOLD_V = 1e-6


@dataclass(frozen=True)
class FeatureVector:
    measurement_id: str
    mean: float
    min: float
    max: float
    skewness: float
    kurtosis_excess: float
    slope: float
    slope_stderr: float
    capacitance_F: float | None = None

    def __post_init__(self):
        for name in ("mean", "min", "max", "skewness", "kurtosis_excess", "slope", "slope_stderr"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite feature {name}")
        if self.capacitance_F is not None and not math.isfinite(self.capacitance_F):
            raise ValueError("non-finite capacitance_F")
        if not self.min <= self.mean <= self.max:
            raise ValueError("feature invariant min <= mean <= max violated")


def basic_stats(values: Sequence[float]) -> tuple[float, float, float]:
    """(arithmetic mean, minimum, maximum) of a non-empty list."""
    if len(values) == 0:
        raise EmptyInput("basic_stats needs at least one value")
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.min()), float(arr.max())


def _central_moments(values: Sequence[float], upto: int) -> list[float]:
    arr = np.asarray(values, dtype=float)
    d = arr - arr.mean()
    return [float(np.mean(d**k)) for k in range(2, upto + 1)]


def skewness(values: Sequence[float]) -> float:
    """Population skewness g1; needs >= 3 values and non-zero variance."""
    if len(values) < 3:
        raise EmptyInput("skewness needs at least 3 values")
    m2, m3 = _central_moments(values, 3)
    if m2 == 0.0:
        raise DegenerateVariance("skewness undefined for constant data")
    return m3 / m2**1.5


def kurtosis_excess(values: Sequence[float]) -> float:
    """Population excess kurtosis g2; needs >= 4 values and non-zero variance."""
    if len(values) < 4:
        raise EmptyInput("kurtosis_excess needs at least 4 values")
    m2, _, m4 = _central_moments(values, 4)
    if m2 == 0.0:
        raise DegenerateVariance("kurtosis undefined for constant data")
    return m4 / m2**2 - 3.0


def ols_fit(times: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Ordinary least squares of values against times.

    Returns (slope, intercept, slope_stderr) with
    slope_stderr = sqrt((sum(r_i^2) / (n - 2)) / sum((t_i - t_mean)^2)).
    """
    if len(times) != len(values):
        raise LengthMismatch(f"{len(times)} times vs {len(values)} values")
    n = len(times)
    if n < 3:
        raise EmptyInput("ols_fit needs at least 3 points")
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    dt = t - t.mean()
    ss_t = float(np.sum(dt * dt))
    if ss_t == 0.0:
        raise DegenerateTimes("all times equal")
    slope = float(np.sum(dt * (v - v.mean())) / ss_t)
    intercept = float(v.mean() - slope * t.mean())
    resid = v - (slope * t + intercept)
    stderr = math.sqrt(float(np.sum(resid * resid)) / (n - 2) / ss_t)
    return slope, intercept, stderr


_CHANNEL_ATTR = {"voltage": "voltage_V", "current": "current_A"}


def interpolate_missing(samples: Sequence[Sample], channel: str) -> list[float]:
    """Channel values at the original timestamps with gaps filled linearly.

    Leading/trailing gaps take the nearest present value. Channels with more
    than 30% of values missing raise MissingDataExcessive; fully absent
    channels raise AllMissing.
    """
    attr = _CHANNEL_ATTR.get(channel)
    if attr is None:
        raise ValueError(f"channel must be 'voltage' or 'current', got {channel!r}")
    n = len(samples)
    if n == 0:
        raise AllMissing(f"no samples for channel {channel}")
    times = np.array([s.t_s for s in samples], dtype=float)
    raw = [getattr(s, attr) for s in samples]
    present = [i for i, v in enumerate(raw) if v is not None]
    if not present:
        raise AllMissing(f"channel {channel} has no present values")
    missing_fraction = (n - len(present)) / n
    if missing_fraction > MISSING_FRACTION_CAP:
        raise MissingDataExcessive(
            f"channel {channel}: {missing_fraction:.0%} missing exceeds {MISSING_FRACTION_CAP:.0%} cap"
        )
    if len(present) == n:
        return [float(v) for v in raw]
    xp = times[present]
    fp = np.array([raw[i] for i in present], dtype=float)
    return [float(x) for x in np.interp(times, xp, fp)]


def capacitance(m: Measurement) -> float:
    """Capacitance C = Q / dV over the charge window.

    The charge window runs from the first sample to the voltage peak (global
    maximum of the interpolated voltage, earliest index on ties); Q is the
    trapezoidal integral of the interpolated current over that window.
    """
    volts = interpolate_missing(m.samples, "voltage")
    amps = interpolate_missing(m.samples, "current")
    times = [s.t_s for s in m.samples]
    peak = int(np.argmax(volts))
    dv = volts[peak] - volts[0]
    if dv <= FLAT_VOLTAGE_THRESHOLD_V:
        raise FlatVoltage(f"voltage rise {dv!r} V at or below {FLAT_VOLTAGE_THRESHOLD_V} V")
    q = float(np.trapezoid(amps[: peak + 1], times[: peak + 1]))
    return q / dv


def extract_features(m: Measurement) -> FeatureVector:
    """Full feature vector over the interpolated voltage channel.

    capacitance_F is set when the current channel has any present values and
    the capacitance computation succeeds; otherwise it is absent. Voltage
    channel failures propagate.
    """
    if not m.samples:
        raise EmptyInput(f"measurement {m.measurement_id} has no samples")
    volts = interpolate_missing(m.samples, "voltage")
    times = [s.t_s for s in m.samples]
    mean, vmin, vmax = basic_stats(volts)
    g1 = skewness(volts)
    g2 = kurtosis_excess(volts)
    slope, _, stderr = ols_fit(times, volts)
    cap: float | None = None
    if any(s.current_A is not None for s in m.samples):
        try:
            cap = capacitance(m)
        except (MissingDataExcessive, AllMissing, FlatVoltage):
            cap = None
    return FeatureVector(
        measurement_id=m.measurement_id,
        mean=mean,
        min=vmin,
        max=vmax,
        skewness=g1,
        kurtosis_excess=g2,
        slope=slope,
        slope_stderr=stderr,
        capacitance_F=cap,
    )


def rmse_deviation(series: Sequence[float], reference: Sequence[float]) -> float:
    """Root mean square error between a series and a reference of equal length."""
    if len(series) != len(reference):
        raise LengthMismatch(f"{len(series)} vs {len(reference)}")
    if len(series) == 0:
        raise EmptyInput("rmse_deviation needs at least one value")
    s = np.asarray(series, dtype=float)
    r = np.asarray(reference, dtype=float)
    return math.sqrt(float(np.mean((s - r) ** 2)))
