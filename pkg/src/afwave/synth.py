"""Synthetic ECG generator with known ground truth.

The atrial component is a sawtooth-like oscillation: a fundamental inside
the 3-9 Hz atrial band plus phase-locked decaying harmonics, with slow
random amplitude and frequency modulation whose depth grows as the
organization knob drops toward 0. Ventricular activity is a fixed
analytic Gaussian-composite beat shape placed at irregular RR intervals.
Everything is deterministic given the spec seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import EcgRecord, Outcome
from .errors import InvalidSpec

DAF_RANGE_HZ = (3.0, 9.0)


@dataclass(frozen=True)
class SynthSpec:
    fs: float = 1000.0
    duration_s: float = 20.0
    daf_hz: float = 6.0
    daf_jitter_hz: float = 0.0           # inter-segment wander, uniform +-jitter
    fwave_amp_mv: float = 0.1
    fwave_harmonics: int = 2             # harmonics above the fundamental
    harmonic_decay: float = 0.4
    rr_mean_s: float = 0.9
    rr_cv: float = 0.12
    qrst_template_id: str = "default"
    qrst_amp_mv: float = 1.0
    qrst_amp_jitter: float = 0.05        # per-beat multiplicative gain sd
    noise_rms_mv: float = 0.0
    powerline_amp_mv: float = 0.0
    powerline_hz: float = 50.0
    organization: float = 1.0            # 1 = stationary f-waves, 0 = heavy modulation
    ectopic_fraction: float = 0.0
    segment_len_s: float = 0.8
    seed: int = 0

    def validate(self):
        if self.fs <= 0 or self.duration_s <= 0:
            raise InvalidSpec("fs and duration_s must be positive")
        for name in ("fwave_amp_mv", "qrst_amp_mv", "noise_rms_mv",
                     "powerline_amp_mv", "daf_jitter_hz"):
            if getattr(self, name) < 0:
                raise InvalidSpec(f"{name} must be >= 0")
        if self.rr_mean_s <= 0.3:
            raise InvalidSpec("rr_mean_s must exceed 0.3 s")
        if not DAF_RANGE_HZ[0] <= self.daf_hz <= DAF_RANGE_HZ[1]:
            raise InvalidSpec(f"daf_hz must lie in {DAF_RANGE_HZ}")
        if not 0.0 <= self.organization <= 1.0:
            raise InvalidSpec("organization must lie in [0, 1]")
        if self.qrst_template_id not in QRST_TEMPLATES:
            raise InvalidSpec(f"unknown qrst_template_id {self.qrst_template_id!r}")


@dataclass(frozen=True, eq=False)
class SynthTruth:
    beat_times: np.ndarray               # seconds, strictly increasing
    true_aa: np.ndarray
    true_daf_per_segment: np.ndarray     # Hz, one per analysis segment
    label: Outcome
    true_ventricular: np.ndarray = field(repr=False, default=None)

    def r_indices(self, fs: float) -> np.ndarray:
        return np.round(self.beat_times * fs).astype(int)


def _gauss(t, center, sigma, amp):
    return amp * np.exp(-0.5 * ((t - center) / sigma) ** 2)


def _default_qrst(t):
    return (_gauss(t, -0.028, 0.009, -0.15) + _gauss(t, 0.0, 0.011, 1.0)
            + _gauss(t, 0.030, 0.010, -0.25) + _gauss(t, 0.250, 0.060, 0.35))


def _ectopic_qrst(t):
    # wider, left-bundle-like beat with inverted late deflection
    return (_gauss(t, -0.010, 0.020, 0.55) + _gauss(t, 0.018, 0.016, 0.95)
            + _gauss(t, 0.060, 0.018, -0.45) + _gauss(t, 0.270, 0.070, -0.25))


QRST_TEMPLATES = {"default": _default_qrst, "ectopic": _ectopic_qrst}


def _slow_modulation(rng, t, bands=(0.05, 0.35), n_comp=4):
    """Unit-RMS random slow oscillation for AM/FM modulation."""
    out = np.zeros_like(t)
    freqs = rng.uniform(bands[0], bands[1], size=n_comp)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_comp)
    amps = rng.uniform(0.5, 1.0, size=n_comp)
    for f, p, a in zip(freqs, phases, amps):
        out += a * np.sin(2.0 * np.pi * f * t + p)
    rms = np.sqrt(np.mean(out ** 2))
    return out / rms if rms > 0 else out


def generate(spec: SynthSpec) -> tuple[EcgRecord, SynthTruth]:
    """Build one composite record: true_aa + QRST train + noise + powerline."""
    spec.validate()
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    n = int(round(spec.duration_s * spec.fs))
    t = np.arange(n) / spec.fs

    # instantaneous fundamental: per-segment wander plus slow FM
    seg_len = int(round(spec.segment_len_s * spec.fs))
    n_segments = max(1, n // seg_len)
    wander = spec.daf_hz + spec.daf_jitter_hz * rng.uniform(-1.0, 1.0, size=n_segments)
    wander = np.clip(wander, *DAF_RANGE_HZ)
    f_inst = np.empty(n)
    for s in range(n_segments):
        f_inst[s * seg_len:(s + 1) * seg_len] = wander[s]
    f_inst[n_segments * seg_len:] = wander[-1]
    disorder = 1.0 - spec.organization
    if disorder > 0:
        f_inst = np.clip(f_inst + 0.6 * disorder * _slow_modulation(rng, t),
                         *DAF_RANGE_HZ)
    true_daf = np.array([float(np.mean(f_inst[s * seg_len:(s + 1) * seg_len]))
                         for s in range(n_segments)])

    phase = 2.0 * np.pi * np.cumsum(f_inst) / spec.fs + rng.uniform(0.0, 2.0 * np.pi)
    am = 1.0 + 0.5 * disorder * _slow_modulation(rng, t)
    am = np.clip(am, 0.1, None)
    aa = np.sin(phase)
    for h in range(2, spec.fwave_harmonics + 2):
        aa += spec.harmonic_decay ** (h - 1) * np.sin(h * phase + rng.uniform(0, 2 * np.pi))
    aa *= spec.fwave_amp_mv * am

    # beat train
    beats = []
    tt = rng.uniform(0.15, 0.15 + spec.rr_mean_s)
    while tt < spec.duration_s - 0.05:
        beats.append(tt)
        rr = rng.normal(spec.rr_mean_s, spec.rr_cv * spec.rr_mean_s)
        tt += max(0.3, rr)
    beat_times = np.array(beats)

    ventricular = np.zeros(n)
    shape = QRST_TEMPLATES[spec.qrst_template_id]
    ectopic = QRST_TEMPLATES["ectopic"]
    for b in beat_times:
        gain = spec.qrst_amp_mv * max(0.2, 1.0 + spec.qrst_amp_jitter * rng.standard_normal())
        is_ectopic = spec.ectopic_fraction > 0 and rng.random() < spec.ectopic_fraction
        fn = ectopic if is_ectopic else shape
        lo = max(0, int((b - 0.20) * spec.fs))
        hi = min(n, int((b + 0.55) * spec.fs))
        idx = np.arange(lo, hi)
        ventricular[idx] += gain * fn(idx / spec.fs - b)

    composite = aa + ventricular
    if spec.noise_rms_mv > 0:
        composite = composite + spec.noise_rms_mv * rng.standard_normal(n)
    if spec.powerline_amp_mv > 0:
        composite = composite + spec.powerline_amp_mv * np.sin(
            2.0 * np.pi * spec.powerline_hz * t + rng.uniform(0, 2 * np.pi))

    label = Outcome.SR_MAINTAINED if spec.organization >= 0.5 else Outcome.AF_RELAPSE
    record = EcgRecord(samples=composite, fs=spec.fs,
                       record_id=f"synth-{spec.seed:06d}", lead="V1", label=label)
    truth = SynthTruth(beat_times=beat_times, true_aa=aa,
                       true_daf_per_segment=true_daf, label=label,
                       true_ventricular=ventricular)
    return record, truth


ORGANIZED_RANGES = {
    "organization": (0.9, 1.0),
    "daf_jitter_hz": (0.0, 0.1),
    "daf_hz": (5.2, 6.8),
    "fwave_amp_mv": (0.10, 0.18),
    "rr_mean_s": (0.8, 1.05),
    "rr_cv": (0.08, 0.16),
    "noise_rms_mv": (0.003, 0.01),
}

DISORGANIZED_RANGES = {
    "organization": (0.0, 0.25),
    "daf_jitter_hz": (1.0, 1.8),
    "daf_hz": (4.5, 7.5),
    "fwave_amp_mv": (0.10, 0.18),
    "rr_mean_s": (0.8, 1.05),
    "rr_cv": (0.1, 0.2),
    "noise_rms_mv": (0.003, 0.01),
}


@dataclass(frozen=True)
class CohortRanges:
    organized: dict = field(default_factory=lambda: dict(ORGANIZED_RANGES))
    disorganized: dict = field(default_factory=lambda: dict(DISORGANIZED_RANGES))


def generate_cohort(n_per_class, ranges: CohortRanges = None, seed: int = 0,
                    base_spec: SynthSpec = None) -> list[tuple[EcgRecord, SynthTruth]]:
    """Labeled two-class cohort: organized records first, then disorganized.

    ``n_per_class`` is either one count for both classes or a pair
    (n_organized, n_disorganized). Each record draws its spec fields
    uniformly from the class ranges, deterministically from ``seed``.
    """
    if isinstance(n_per_class, int):
        n_org = n_dis = n_per_class
    else:
        n_org, n_dis = n_per_class
    if min(n_org, n_dis) < 5:
        raise InvalidSpec("need at least 5 records per class")
    ranges = ranges or CohortRanges()
    base = base_spec or SynthSpec()
    cohort = []
    index = 0
    for count, class_ranges in ((n_org, ranges.organized),
                                (n_dis, ranges.disorganized)):
        for _ in range(count):
            rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
            fields = {name: float(rng.uniform(lo, hi))
                      for name, (lo, hi) in class_ranges.items()}
            rec_seed = int(rng.integers(0, 2 ** 31 - 1))
            spec = replace(base, seed=rec_seed, **fields)
            record, truth = generate(spec)
            record = EcgRecord(samples=record.samples, fs=record.fs,
                               record_id=f"synth-{seed:04d}-{index:03d}",
                               lead=record.lead, label=record.label)
            cohort.append((record, truth))
            index += 1
    return cohort
