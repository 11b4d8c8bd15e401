"""Per-record features: RWE statistics, wavelet-entropy variability,
dominant atrial frequency, sample entropy and fibrillatory-wave power."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cancellation import AaSignal
from .core import Outcome, SegmentPlan, segment
from .errors import TooShort, ZeroRPeak
from .spectral import DAF_BAND_HZ, WELCH_NFFT, WELCH_OVERLAP, WELCH_WINDOW_LEN, dominant_frequency
from .wavelet import DEFAULT_LEVELS, relative_wavelet_energy, swen, swt_decompose

FEATURE_NAMES = ("rwem6", "rwes6", "rwem7", "rwes7", "rwem8", "rwes8",
                 "swenv", "daf", "sampen", "fwp")

SWENV_M = 1
SWENV_R_FRACTION = 0.15
SAMPEN_M = 2
SAMPEN_R_FRACTION = 0.2
SAMPEN_DECIMATE = 10


@dataclass(frozen=True)
class FeatureVector:
    """The ten scalar features of one record plus its outcome label."""

    rwem6: float
    rwes6: float
    rwem7: float
    rwes7: float
    rwem8: float
    rwes8: float
    swenv: float
    daf: float
    sampen: float
    fwp: float
    label: Outcome = Outcome.UNLABELED
    record_id: str = ""
    swenv_degenerate: bool = False

    def values(self, names=FEATURE_NAMES) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)


@dataclass(frozen=True, eq=False)
class SwenSeries:
    """Per-segment stationary wavelet entropy values."""

    values: np.ndarray
    segment_len_s: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return len(self.values)


def _per_segment_rwe(aa: AaSignal, plan: SegmentPlan, levels: int,
                     wavelet: str) -> np.ndarray:
    segs = segment(aa.samples, aa.fs, plan)
    return np.vstack([relative_wavelet_energy(swt_decompose(s, levels, wavelet))
                      for s in segs])


def rwe_stats(aa: AaSignal, plan: SegmentPlan = SegmentPlan(),
              levels: int = DEFAULT_LEVELS, wavelet: str = "db6") -> dict:
    """Mean and population standard deviation of RWE at scales 6..8
    across the per-segment decompositions."""
    rwe = _per_segment_rwe(aa, plan, levels, wavelet)
    out = {}
    for scale in (6, 7, 8):
        col = rwe[:, scale - 1]
        out[f"rwem{scale}"] = float(np.mean(col))
        out[f"rwes{scale}"] = float(np.std(col))
    return out


def swen_series(aa: AaSignal, plan: SegmentPlan = SegmentPlan(),
                levels: int = DEFAULT_LEVELS, wavelet: str = "db6") -> SwenSeries:
    """SWEn computed in each non-overlapping segment."""
    rwe = _per_segment_rwe(aa, plan, levels, wavelet)
    return SwenSeries(values=np.array([swen(r) for r in rwe]),
                      segment_len_s=plan.segment_len_s)


def sample_entropy_counts(series: np.ndarray, m: int, r: float) -> tuple[int, int]:
    """Template-match counts (A, B) behind sample entropy.

    B counts pairs i < j (both over the first N - m template origins) whose
    length-m templates lie within Chebyshev distance r; A counts the same
    pairs at length m + 1. Self-matches are excluded by construction.
    """
    u = np.asarray(series, dtype=float)
    n = len(u)
    if n <= m + 1:
        raise TooShort(f"series of {n} values too short for m={m}")
    if r <= 0:
        raise ValueError("tolerance r must be positive")
    n_templates = n - m
    a_count = 0
    b_count = 0
    # pairwise Chebyshev distances over length-m templates, row by row
    for i in range(n_templates - 1):
        js = np.arange(i + 1, n_templates)
        dmax = np.abs(u[i] - u[js])
        for off in range(1, m):
            dmax = np.maximum(dmax, np.abs(u[i + off] - u[js + off]))
        b_hits = dmax <= r
        b_count += int(np.count_nonzero(b_hits))
        dnext = np.maximum(dmax, np.abs(u[i + m] - u[js + m]))
        a_count += int(np.count_nonzero(dnext <= r))
    return a_count, b_count


def sampen_no_match_ceiling(n: int, m: int) -> float:
    """Upper bound used when no template pairs match: -log(2 / ((n-m-1)(n-m)))."""
    return float(-math.log(2.0 / ((n - m - 1) * (n - m))))


def sample_entropy(series: np.ndarray, m: int, r: float) -> float:
    """-ln(A/B) over template-match counts; returns the estimable ceiling
    when either count is zero."""
    a_count, b_count = sample_entropy_counts(series, m, r)
    n = len(series)
    if a_count == 0 or b_count == 0:
        return sampen_no_match_ceiling(n, m)
    return float(-math.log(a_count / b_count))


@dataclass(frozen=True)
class SwenvResult:
    value: float
    degenerate: bool
    sampen_term: float
    r_abs: float


def swenv(series: SwenSeries, m: int = SWENV_M,
          r_frac: float = SWENV_R_FRACTION) -> SwenvResult:
    """Entropy-variability index of a SWEn series.

    value = SampEn(series; m, r) + ln(2 r) - ln(mean series), with the
    tolerance r taken as ``r_frac`` of the series standard deviation (so
    the SampEn term is invariant under affine scaling of the series).
    A zero-variance series makes r collapse; the SampEn term is then set
    to 0, ln(2 eps) replaces ln(2 r), and the result is flagged degenerate.
    """
    vals = series.values
    mean = float(np.mean(vals))
    if mean <= 0.0:
        raise ValueError("SWEn series mean must be positive")
    sd = float(np.std(vals))
    if sd == 0.0:
        eps = float(np.finfo(float).eps)
        return SwenvResult(value=float(math.log(2.0 * eps) - math.log(mean)),
                           degenerate=True, sampen_term=0.0, r_abs=0.0)
    r_abs = r_frac * sd
    se = sample_entropy(vals, m, r_abs)
    return SwenvResult(value=float(se + math.log(2.0 * r_abs) - math.log(mean)),
                       degenerate=False, sampen_term=se, r_abs=r_abs)


def daf(aa: AaSignal, band_hz: tuple[float, float] = DAF_BAND_HZ,
        window_len: int = WELCH_WINDOW_LEN, overlap: float = WELCH_OVERLAP,
        nfft: int = WELCH_NFFT) -> float:
    """Dominant atrial frequency: Welch-PSD argmax inside ``band_hz``."""
    return dominant_frequency(aa.samples, aa.fs, band_hz=band_hz,
                              window_len=window_len, overlap=overlap, nfft=nfft)


def aa_sample_entropy(aa: AaSignal, m: int = SAMPEN_M,
                      r_frac: float = SAMPEN_R_FRACTION,
                      decimate: int = SAMPEN_DECIMATE) -> float:
    """Sample entropy of the atrial signal.

    The AA signal is decimated by an integer factor (zero-phase FIR
    anti-alias at 0.8 of the new Nyquist) before matching; at 1 kHz the
    raw series oversamples the 3-12 Hz band so heavily that neighbouring
    templates match trivially.
    """
    x = np.asarray(aa.samples, dtype=float)
    if decimate > 1:
        from scipy import signal as sps
        new_nyq = aa.fs / (2.0 * decimate)
        taps = sps.firwin(int(0.2 * aa.fs) | 1, 0.8 * new_nyq, fs=aa.fs)
        pad = len(taps)
        ext = np.pad(x, pad, mode="symmetric")
        x = sps.fftconvolve(ext, taps, mode="same")[pad:-pad:decimate]
    sd = float(np.std(x))
    if sd == 0.0:
        return 0.0
    return sample_entropy(x, m, r_frac * sd)


def fwp(aa: AaSignal, signal: np.ndarray, r_peaks=None) -> float:
    """Fibrillatory-wave power: RMS of the atrial signal as a percentage
    of the mean absolute R-peak magnitude of the full ECG."""
    peaks = r_peaks if r_peaks is not None else aa.r_peaks
    idx = np.asarray(peaks.indices, dtype=int)
    if len(idx) == 0:
        raise ZeroRPeak("no R peaks to normalize against")
    r_mag = float(np.mean(np.abs(np.asarray(signal, dtype=float)[idx])))
    if r_mag == 0.0:
        raise ZeroRPeak("mean R-peak magnitude is zero")
    rms = float(np.sqrt(np.mean(aa.samples ** 2)))
    return 100.0 * rms / r_mag
