"""Baselines, signature deltas, fault classification and severity."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence

from .infometrics import METRICS, MI_METRICS, InfoSignature

SCHEMA_VERSION = 1

NOMINAL = "nominal"
ACTUATOR = "actuator_fault"
SENSOR = "sensor_fault"
INDETERMINATE = "indeterminate"
VERDICTS = (NOMINAL, ACTUATOR, SENSOR, INDETERMINATE)


class InsufficientDataError(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class Baseline:
    mean: dict
    std: dict
    window: int | None
    start_step: int
    end_step: int
    n_windows: int
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SignatureDelta:
    delta: dict
    z: dict
    step_index: int = 0

    def __getitem__(self, key: str) -> float:
        return self.delta[key]


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds in bits.

    ``ha`` may be None to drop the H(A) conjunct from the sensor rule;
    ``sa_sensor`` adds an optional "MI(S;A) fell by more than this" conjunct.
    ``min_z`` optionally gates drift on the z-score where the baseline std is positive.
    """

    drift: float = 0.10
    sensor: float = 1.0
    ha: float | None = 0.10
    deep: float = 0.40
    stable: float = 0.05
    sa_sensor: float | None = None
    min_z: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Thresholds":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigurationError(f"unknown threshold keys: {sorted(unknown)}")
        return cls(**d)


DEFAULT_THRESHOLDS = Thresholds()

# Calibrated on the built-in deployment scenarios read through the true-state
# stream: sensor noise decouples actions from true states (large MI(S;A) loss)
# while the true dynamics lose only a little MI(S;S').
DESK_THRESHOLDS = Thresholds(drift=0.10, sensor=0.0, ha=None, deep=0.20, stable=0.50, sa_sensor=1.0)

THRESHOLD_PRESETS = {"default": DEFAULT_THRESHOLDS, "desk": DESK_THRESHOLDS}


@dataclass(frozen=True)
class DiagnosisReport:
    verdict: str
    severity_bits: float
    deltas: dict
    window_start: int
    window_end: int
    thresholds: dict
    z: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def capture_baseline(signatures: Sequence[InfoSignature]) -> Baseline:
    sigs = list(signatures)
    if len(sigs) < 2:
        raise InsufficientDataError("a baseline needs at least 2 signatures")
    windows = {s.window for s in sigs}
    if len(windows) != 1:
        raise ConfigurationError(f"mixed window parameters in baseline: {sorted(map(str, windows))}")
    n = len(sigs)
    mean, std = {}, {}
    for k in METRICS:
        vals = [getattr(s, k) for s in sigs]
        # anchored at the first value so identical inputs give an exact mean
        m = vals[0] + math.fsum(v - vals[0] for v in vals) / n
        mean[k] = m
        std[k] = math.sqrt(math.fsum((v - m) ** 2 for v in vals) / n)
    steps = [s.step_index for s in sigs]
    return Baseline(mean, std, windows.pop(), min(steps), max(steps), n)


def delta(sig: InfoSignature, base: Baseline) -> SignatureDelta:
    if sig.window is not None and base.window is not None and sig.window != base.window:
        raise ConfigurationError(f"window mismatch: signature W={sig.window}, baseline W={base.window}")
    d, z = {}, {}
    for k in METRICS:
        d[k] = getattr(sig, k) - base.mean[k]
        if base.std[k] > 0:
            z[k] = d[k] / base.std[k]
    return SignatureDelta(d, z, sig.step_index)


def mean_delta(deltas: Sequence[SignatureDelta]) -> SignatureDelta:
    if not deltas:
        raise InsufficientDataError("no deltas to average")
    n = len(deltas)
    d = {k: math.fsum(x.delta[k] for x in deltas) / n for k in METRICS}
    zk = set.intersection(*(set(x.z) for x in deltas))
    z = {k: math.fsum(x.z[k] for x in deltas) / n for k in METRICS if k in zk}
    return SignatureDelta(d, z, deltas[-1].step_index)


def _dropped(d: SignatureDelta, key: str, theta: float, th: Thresholds) -> bool:
    if not d.delta[key] < -theta:
        return False
    if th.min_z is not None and key in d.z:
        return d.z[key] <= -th.min_z
    return True


def classify(d: SignatureDelta, th: Thresholds = DEFAULT_THRESHOLDS) -> str:
    x = d.delta
    if not any(_dropped(d, k, th.drift, th) for k in MI_METRICS):
        return NOMINAL
    sensor = (
        x["mi_ssnext"] < -th.sensor
        and (th.ha is None or x["h_a"] < -th.ha)
        and x["mi_asnext"] < -th.deep
        and (th.sa_sensor is None or x["mi_sa"] < -th.sa_sensor)
    )
    if sensor:
        return SENSOR
    if abs(x["mi_sa"]) < th.stable and x["mi_asnext"] < -th.drift:
        return ACTUATOR
    return INDETERMINATE


def smooth(series: Sequence[float], k: int = 3) -> list[float]:
    """Centered rolling mean; edges average over the shorter available window."""
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be a positive odd integer")
    vals = list(series)
    h = k // 2
    out = []
    for i in range(len(vals)):
        seg = vals[max(0, i - h): i + h + 1]
        out.append(math.fsum(seg) / len(seg))
    return out


def severity(series: Sequence[SignatureDelta | float], k: int = 3) -> float:
    """Nadir depth (bits) of the smoothed MI(S;S') delta series."""
    vals = [x.delta["mi_ssnext"] if isinstance(x, SignatureDelta) else float(x) for x in series]
    if len(vals) < 3:
        raise InsufficientDataError("severity needs at least 3 windows")
    return max(0.0, -min(smooth(vals, k)))


def diagnose(signatures: Sequence[InfoSignature], base: Baseline,
             th: Thresholds = DEFAULT_THRESHOLDS) -> DiagnosisReport:
    """Classify the windows after the baseline segment.

    The verdict uses the mean delta over windows lying entirely after the
    baseline segment (falling back to every later window); severity scans
    all windows ending after it.
    """
    post = [s for s in signatures if s.step_index > base.end_step]
    if len(post) < 3:
        raise InsufficientDataError("diagnosis needs at least 3 windows after the baseline segment")
    w = post[0].window or 0
    clear = [s for s in post if s.step_index - w >= base.end_step] or post
    deltas = [delta(s, base) for s in post]
    md = mean_delta([delta(s, base) for s in clear])
    verdict = classify(md, th)
    sev = 0.0 if verdict == NOMINAL else severity(deltas)
    return DiagnosisReport(
        verdict=verdict,
        severity_bits=sev,
        deltas=dict(md.delta),
        window_start=clear[0].step_index,
        window_end=clear[-1].step_index,
        thresholds=th.to_dict(),
        z=dict(md.z),
    )
