"""Welch power spectral density and dominant-frequency search."""

from __future__ import annotations

import numpy as np
from scipy import signal as sps

from .errors import TooShort

WELCH_WINDOW_LEN = 4096
WELCH_OVERLAP = 0.5
WELCH_NFFT = 8192
DAF_BAND_HZ = (3.0, 9.0)


def welch_psd(x: np.ndarray, fs: float,
              window_len: int = WELCH_WINDOW_LEN,
              overlap: float = WELCH_OVERLAP,
              nfft: int = WELCH_NFFT) -> tuple[np.ndarray, np.ndarray]:
    """Hamming-window Welch periodogram; partial trailing windows are dropped."""
    x = np.asarray(x, dtype=float)
    if len(x) < window_len:
        raise TooShort(f"{len(x)} samples < Welch window of {window_len}")
    noverlap = int(round(window_len * overlap))
    freqs, pxx = sps.welch(x, fs=fs, window="hamming", nperseg=window_len,
                           noverlap=noverlap, nfft=nfft, detrend="constant")
    return freqs, pxx


def dominant_frequency(x: np.ndarray, fs: float,
                       band_hz: tuple[float, float] = DAF_BAND_HZ,
                       window_len: int = WELCH_WINDOW_LEN,
                       overlap: float = WELCH_OVERLAP,
                       nfft: int = WELCH_NFFT,
                       refine: bool = False) -> float:
    """Frequency of the largest PSD value inside ``band_hz``.

    With ``refine`` the peak bin is sharpened by parabolic interpolation
    on log power (used internally where sub-bin accuracy matters; the
    reported feature keeps the plain bin value).
    """
    freqs, pxx = welch_psd(x, fs, window_len, overlap, nfft)
    mask = (freqs >= band_hz[0]) & (freqs <= band_hz[1])
    fb, pb = freqs[mask], pxx[mask]
    i = int(np.argmax(pb))
    if refine and 0 < i < len(pb) - 1 and pb[i - 1] > 0 and pb[i + 1] > 0:
        y0, y1, y2 = np.log(pb[i - 1]), np.log(pb[i]), np.log(pb[i + 1])
        denom = y0 - 2.0 * y1 + y2
        if denom < 0:
            delta = 0.5 * (y0 - y2) / denom
            return float(fb[i] + np.clip(delta, -0.5, 0.5) * (fb[1] - fb[0]))
    return float(fb[i])


def band_power(x: np.ndarray, fs: float, lo_hz: float, hi_hz: float,
               window_len: int = WELCH_WINDOW_LEN) -> float:
    """Integrated Welch PSD over [lo_hz, hi_hz]; used by verification tests."""
    freqs, pxx = welch_psd(x, fs, window_len=min(window_len, len(x)))
    mask = (freqs >= lo_hz) & (freqs <= hi_hz)
    return float(np.trapezoid(pxx[mask], freqs[mask]))
