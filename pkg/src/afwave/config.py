"""Aggregate run configuration with the published stage defaults."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of the pipeline, defaulting to the reference values."""

    # analysis window
    analysis_window_s: float = 20.0
    analysis_offset_s: float = 0.0
    # preprocessing
    powerline_hz: float = 50.0
    highpass_hz: float = 0.5
    lowpass_hz: float = 70.0
    attenuation_db: float = 40.0
    # beat detection
    rv_mv: float = 0.001
    # QRST cancellation
    qrst_pre_ms: float = 100.0
    qrst_post_ms: float = 450.0
    n_similar: int = 10
    refine_passes: int = 3
    # wavelet features
    wavelet: str = "db6"
    levels: int = 8
    segment_len_s: float = 0.8
    n_segments: int = 25
    # entropy features
    swenv_m: int = 1
    swenv_r_fraction: float = 0.15
    sampen_m: int = 2
    sampen_r_fraction: float = 0.2
    sampen_decimate: int = 10
    # spectral features
    welch_window: int = 4096
    welch_overlap: float = 0.5
    welch_nfft: int = 8192
    daf_low_hz: float = 3.0
    daf_high_hz: float = 9.0
    # model evaluation
    max_splits: int = 5
    folds: int = 5
    repetitions: int = 100
    sfs_repetitions: int = 50
    workers: int = 1
    seed: int = 0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def replaced(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)
