"""Ventricular (QRST) cancellation by adaptive template subtraction.

For every beat, the 10 most similar QRST complexes (normalized zero-lag
cross-correlation after R-peak alignment) feed a principal-component
template that is least-squares scaled to the beat and subtracted over its
window. Because the first principal component of raw beat windows always
carries a residue of the atrial signal averaged over the selected
complexes, the template build is iterated: after a first subtraction the
atrial content inside each window is re-estimated from the surrounding
uncontaminated samples with a local harmonic least-squares fit at the
dominant atrial frequency, and the templates are rebuilt from the
atrial-suppressed reference. Samples outside every window are returned
bit-identical to the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beats import RPeakList
from .errors import DegenerateSet, TooFewBeats, TooShort
from .spectral import WELCH_WINDOW_LEN, dominant_frequency

PRE_MS = 100.0
POST_MS = 450.0
N_SIMILAR = 10
TAPER_RAMP_MS = 10.0
REFINE_PASSES = 3
REFINE_HARMONICS = 3
REFINE_CONTEXT_S = 0.5


@dataclass(frozen=True, eq=False)
class QrstWindow:
    """A beat-aligned slice around one R peak."""

    center: int
    pre_ms: float
    post_ms: float
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))


@dataclass(frozen=True, eq=False)
class AaSignal:
    """Atrial-activity signal and the R-peak list it was derived from."""

    samples: np.ndarray
    fs: float
    r_peaks: RPeakList
    source_id: str = ""


def normalized_xcorr(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-lag normalized cross-correlation (mean-removed)."""
    a = np.asarray(a, dtype=float) - np.mean(a)
    b = np.asarray(b, dtype=float) - np.mean(b)
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


def select_similar_qrst(target: QrstWindow, candidates: list[QrstWindow],
                        k: int = N_SIMILAR) -> list[QrstWindow]:
    """The k candidates with the highest similarity to the target, descending.

    The target itself must not be among the candidates. Raises TooFewBeats
    when fewer than k candidates are available.
    """
    if len(candidates) < k:
        raise TooFewBeats(f"{len(candidates)} candidate complexes < k={k}")
    scored = [(normalized_xcorr(target.samples, c.samples), i)
              for i, c in enumerate(candidates)]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [candidates[i] for _, i in scored[:k]]


def build_template(selected: list[QrstWindow], target: QrstWindow) -> np.ndarray:
    """Cancellation template: first principal direction of the selected
    window stack, least-squares scaled to the target.

    The scale alpha = <target, u> / <u, u> minimizes ||target - alpha u||^2
    exactly. Sign of the principal direction is fixed by positive
    correlation with the target. Raises DegenerateSet on an all-zero stack.
    """
    if len(selected) < 2:
        raise TooFewBeats("template needs at least 2 windows")
    stack = np.vstack([w.samples for w in selected])
    if stack.shape[1] != len(target.samples):
        raise ValueError("window lengths differ from the target")
    if not np.any(stack):
        raise DegenerateSet("all candidate windows are identically zero")
    _, _, vt = np.linalg.svd(stack, full_matrices=False)
    direction = vt[0]
    if float(np.dot(direction, target.samples)) < 0.0:
        direction = -direction
    alpha = float(np.dot(target.samples, direction) / np.dot(direction, direction))
    return alpha * direction


def _cosine_taper(length: int, fs: float, ramp_ms: float = TAPER_RAMP_MS) -> np.ndarray:
    w = np.ones(length)
    r = int(round(ramp_ms * 1e-3 * fs))
    if r > 0 and length >= 2 * r:
        ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(r) / r))
        w[:r] = ramp
        w[-r:] = ramp[::-1]
    return w


def _effective_windows(r_idx: np.ndarray, n: int, pre_s: int, post_s: int):
    """Nominal extents clipped at signal bounds; when two neighbouring
    nominal windows overlap (short RR) both are truncated at the RR
    midpoint."""
    wins = []
    for i, r in enumerate(r_idx):
        lo, hi = int(r) - pre_s, int(r) + post_s
        if i > 0 and int(r_idx[i - 1]) + post_s > lo:
            lo = max(lo, (int(r_idx[i - 1]) + int(r)) // 2 + 1)
        if i < len(r_idx) - 1 and int(r_idx[i + 1]) - pre_s < hi:
            hi = min(hi, (int(r) + int(r_idx[i + 1])) // 2)
        wins.append((max(lo, 0), min(hi, n)))
    return wins


def _local_harmonic_prediction(aa_est: np.ndarray, known: np.ndarray, fs: float,
                               daf_hz: float, r_idx: np.ndarray,
                               pre_s: int, post_s: int,
                               harmonics: int = REFINE_HARMONICS,
                               context_s: float = REFINE_CONTEXT_S) -> np.ndarray:
    """Predict atrial content inside each beat window from flanking samples.

    Per beat, the harmonic amplitudes (cos/sin at daf, 2*daf, ...) are fit
    jointly by least squares over the known samples within ``context_s``
    of the window, then evaluated across the window. The joint fit keeps
    the harmonics orthogonalized despite the irregular sampling mask.
    """
    n = len(aa_est)
    t = np.arange(n) / fs
    pred = np.zeros(n)
    ctx = int(round(context_s * fs))
    for r in r_idx:
        lo, hi = max(0, int(r) - pre_s), min(n, int(r) + post_s)
        a, b = max(0, lo - ctx), min(n, hi + ctx)
        idx = np.arange(a, b)
        kn = idx[known[a:b]]
        if len(kn) < 8 * harmonics:
            continue
        cols = []
        for h in range(1, harmonics + 1):
            w = 2.0 * np.pi * h * daf_hz
            cols.append(np.cos(w * t[kn]))
            cols.append(np.sin(w * t[kn]))
        design = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(design, aa_est[kn], rcond=None)
        tt = t[lo:hi]
        est = np.zeros(hi - lo)
        for j, h in enumerate(range(1, harmonics + 1)):
            w = 2.0 * np.pi * h * daf_hz
            est += coef[2 * j] * np.cos(w * tt) + coef[2 * j + 1] * np.sin(w * tt)
        pred[lo:hi] = est
    return pred


def extract_aa(signal: np.ndarray, fs: float, r_peaks: RPeakList,
               pre_ms: float = PRE_MS, post_ms: float = POST_MS,
               k: int = N_SIMILAR, refine_passes: int = REFINE_PASSES,
               source_id: str = "") -> AaSignal:
    """Cancel ventricular activity beat by beat and return the atrial signal.

    Requires at least k + 1 detected beats (k similar complexes plus the
    target). Overlapping windows at short RR are truncated at the RR
    midpoint; subtracted templates are tapered with 10 ms cosine ramps.
    """
    x = np.asarray(signal, dtype=float)
    r_idx = np.asarray(r_peaks.indices, dtype=int)
    if len(r_idx) < k + 1:
        raise TooFewBeats(f"{len(r_idx)} beats < {k + 1} required for cancellation")
    n = len(x)
    pre_s = int(round(pre_ms * 1e-3 * fs))
    post_s = int(round(post_ms * 1e-3 * fs))
    wins = _effective_windows(r_idx, n, pre_s, post_s)

    full_ids = [i for i, r in enumerate(r_idx)
                if r - pre_s >= 0 and r + post_s <= n]
    if len(full_ids) < k + 1:
        raise TooFewBeats(f"only {len(full_ids)} beats have complete windows, "
                          f"need {k + 1}")

    nominal_mask = np.zeros(n, dtype=bool)
    for r in r_idx:
        nominal_mask[max(0, r - pre_s):min(n, r + post_s)] = True
    known = ~nominal_mask

    out = x.copy()
    for pass_no in range(max(1, refine_passes)):
        if pass_no == 0:
            ref = x
        else:
            if n < WELCH_WINDOW_LEN:
                break
            daf0 = dominant_frequency(out, fs, refine=True)
            pred = _local_harmonic_prediction(out, known, fs, daf0,
                                              r_idx, pre_s, post_s)
            ref = x - pred
        full_rows = {i: ref[r_idx[i] - pre_s:r_idx[i] + post_s] for i in full_ids}
        out = x.copy()
        for bi, r in enumerate(r_idx):
            lo, hi = wins[bi]
            if hi - lo < 2:
                continue
            rel_lo = lo - (int(r) - pre_s)
            rel_hi = rel_lo + (hi - lo)
            target = QrstWindow(center=int(r), pre_ms=pre_ms, post_ms=post_ms,
                                samples=ref[lo:hi])
            candidates = [QrstWindow(center=int(r_idx[i]), pre_ms=pre_ms,
                                     post_ms=post_ms,
                                     samples=full_rows[i][rel_lo:rel_hi])
                          for i in full_ids if i != bi]
            selected = select_similar_qrst(target, candidates, k=k)
            try:
                template = build_template(selected, target)
            except DegenerateSet:
                continue
            taper = _cosine_taper(hi - lo, fs)
            out[lo:hi] = x[lo:hi] - taper * template
    return AaSignal(samples=out, fs=fs, r_peaks=r_peaks, source_id=source_id)
