"""Foundational signal types, validation and segmentation.

Amplitudes are millivolts internally; file ingestion converts from the
declared unit. Records are immutable after construction and every
operation here is a pure function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientLength

NOMINAL_FS_HZ = 1000.0
ANALYSIS_WINDOW_S = 20.0
SEGMENT_LEN_S = 0.8
N_SEGMENTS = 25


class Outcome(str, enum.Enum):
    SR_MAINTAINED = "SR_MAINTAINED"
    AF_RELAPSE = "AF_RELAPSE"
    UNLABELED = "UNLABELED"


@dataclass(frozen=True, eq=False)
class EcgRecord:
    """Single-lead ECG samples plus acquisition metadata.

    samples: amplitude sequence in millivolts
    fs: sampling rate in Hz (nominal 1000 Hz for pipeline records)
    """

    samples: np.ndarray
    fs: float
    record_id: str = ""
    lead: str = "V1"
    label: Outcome = Outcome.UNLABELED

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.fs


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple = ()


def validate_record(rec: EcgRecord, min_duration_s: float = ANALYSIS_WINDOW_S) -> ValidationResult:
    """Check a record against the pipeline eligibility rules.

    Reports violations, never raises.
    """
    violations = []
    if not rec.fs > 0:
        violations.append(f"sampling rate must be positive, got {rec.fs}")
    else:
        need = int(round(min_duration_s * rec.fs))
        if len(rec.samples) < need:
            violations.append(
                f"too short for {min_duration_s:g} s window: "
                f"{len(rec.samples)} samples < {need}"
            )
    bad = np.where(~np.isfinite(rec.samples))[0]
    if len(bad):
        violations.append(f"non-finite sample at index {int(bad[0])}")
    return ValidationResult(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class SegmentPlan:
    """Non-overlapping contiguous segmentation starting at index 0."""

    segment_len_s: float = SEGMENT_LEN_S
    n_segments: int = N_SEGMENTS

    def segment_len_samples(self, fs: float) -> int:
        return int(round(self.segment_len_s * fs))

    def offsets(self, fs: float) -> np.ndarray:
        step = self.segment_len_samples(fs)
        return np.arange(self.n_segments) * step


def segment(signal: np.ndarray, fs: float, plan: SegmentPlan) -> list[np.ndarray]:
    """Cut the signal into ``plan.n_segments`` equal slices.

    The trailing remainder beyond the last whole segment is discarded.
    Raises InsufficientLength when the signal cannot supply all segments.
    """
    signal = np.asarray(signal, dtype=float)
    step = plan.segment_len_samples(fs)
    need = plan.n_segments * step
    if len(signal) < need:
        raise InsufficientLength(
            f"need {need} samples for {plan.n_segments} segments of "
            f"{plan.segment_len_s:g} s at fs={fs:g}, got {len(signal)}"
        )
    return [signal[i * step:(i + 1) * step].copy() for i in range(plan.n_segments)]


def analysis_window(signal: np.ndarray, fs: float,
                    duration_s: float = ANALYSIS_WINDOW_S,
                    offset_s: float = 0.0) -> np.ndarray:
    """Extract the fixed-duration analysis window starting at ``offset_s``.

    Records longer than the window are truncated; the offset makes the
    chosen window position explicit and reproducible.
    """
    start = int(round(offset_s * fs))
    n = int(round(duration_s * fs))
    if start < 0 or start + n > len(signal):
        raise InsufficientLength(
            f"window [{offset_s:g}, {offset_s + duration_s:g}] s exceeds the "
            f"{len(signal) / fs:g} s record"
        )
    return np.asarray(signal[start:start + n], dtype=float)
