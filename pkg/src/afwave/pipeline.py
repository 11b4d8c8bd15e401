"""End-to-end feature extraction: record in, feature vector out."""

from __future__ import annotations

from .beats import detect_r_peaks
from .cancellation import extract_aa
from .config import RunConfig
from .core import EcgRecord, SegmentPlan, analysis_window, validate_record
from .errors import AfwaveError, StageError
from .features import (FeatureVector, aa_sample_entropy, daf, fwp, rwe_stats,
                       swen_series, swenv)
from .preprocessing import (FilterKind, FilterSpec, ShrinkageSpec,
                            highpass_baseline, lowpass_noise, remove_powerline)


def extract_all(record: EcgRecord, config: RunConfig = RunConfig()) -> FeatureVector:
    """Run the full pipeline on one record deterministically.

    Stage failures are re-raised as StageError tagged with the stage name;
    no partial feature vector is produced.
    """
    check = validate_record(record, min_duration_s=config.analysis_window_s)
    if not check.ok:
        raise StageError("validate", AfwaveError("; ".join(check.violations)))

    fs = record.fs
    try:
        raw = analysis_window(record.samples, fs,
                              duration_s=config.analysis_window_s,
                              offset_s=config.analysis_offset_s)
    except AfwaveError as exc:
        raise StageError("window", exc) from exc

    try:
        clean = remove_powerline(raw, fs, ShrinkageSpec(
            target_hz=config.powerline_hz, mother_wavelet=config.wavelet))
        clean = highpass_baseline(clean, fs, FilterSpec(
            FilterKind.HIGH_PASS, config.highpass_hz, config.attenuation_db))
        clean = lowpass_noise(clean, fs, FilterSpec(
            FilterKind.LOW_PASS, config.lowpass_hz, config.attenuation_db))
    except AfwaveError as exc:
        raise StageError("preprocess", exc) from exc

    try:
        peaks = detect_r_peaks(clean, fs, rv=config.rv_mv)
    except AfwaveError as exc:
        raise StageError("beat-detect", exc) from exc

    try:
        aa = extract_aa(clean, fs, peaks,
                        pre_ms=config.qrst_pre_ms, post_ms=config.qrst_post_ms,
                        k=config.n_similar, refine_passes=config.refine_passes,
                        source_id=record.record_id)
    except AfwaveError as exc:
        raise StageError("aa-extract", exc) from exc

    try:
        plan = SegmentPlan(segment_len_s=config.segment_len_s,
                           n_segments=config.n_segments)
        stats = rwe_stats(aa, plan, levels=config.levels, wavelet=config.wavelet)
        series = swen_series(aa, plan, levels=config.levels, wavelet=config.wavelet)
        swenv_res = swenv(series, m=config.swenv_m, r_frac=config.swenv_r_fraction)
        daf_hz = daf(aa, band_hz=(config.daf_low_hz, config.daf_high_hz),
                     window_len=config.welch_window, overlap=config.welch_overlap,
                     nfft=config.welch_nfft)
        sampen = aa_sample_entropy(aa, m=config.sampen_m,
                                   r_frac=config.sampen_r_fraction,
                                   decimate=config.sampen_decimate)
        fwp_pct = fwp(aa, clean, peaks)
    except AfwaveError as exc:
        raise StageError("features", exc) from exc

    return FeatureVector(label=record.label, record_id=record.record_id,
                         swenv=swenv_res.value, swenv_degenerate=swenv_res.degenerate,
                         daf=daf_hz, sampen=sampen, fwp=fwp_pct, **stats)
