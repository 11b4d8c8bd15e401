"""Atrial-activity analysis pipeline for preoperative AF-recurrence study.

The package covers the full chain from raw single-lead ECG to classifier
evaluation: denoising, phasor-transform beat detection, adaptive QRST
cancellation, stationary-wavelet and entropy features, and decision-tree
cross-validation, plus a synthetic generator with ground truth used for
verification.
"""

from .beats import RPeakList, detect_r_peaks, phasor_phase
from .cancellation import (AaSignal, QrstWindow, build_template, extract_aa,
                           select_similar_qrst)
from .config import RunConfig
from .core import (EcgRecord, Outcome, SegmentPlan, ValidationResult,
                   analysis_window, segment, validate_record)
from .features import (FEATURE_NAMES, FeatureVector, SwenSeries, SwenvResult,
                       aa_sample_entropy, daf, fwp, rwe_stats, sample_entropy,
                       sample_entropy_counts, swen_series, swenv)
from .model import (CvConfig, DecisionTree, EvaluationReport, SelectionResult,
                    confusion_metrics, evaluate_model, fit_tree,
                    roc_and_threshold, sequential_forward_selection,
                    stratified_kfold)
from .pipeline import extract_all
from .preprocessing import (FilterKind, FilterSpec, ShrinkageSpec,
                            highpass_baseline, lowpass_noise, preprocess,
                            remove_powerline)
from .synth import CohortRanges, SynthSpec, SynthTruth, generate, generate_cohort
from .wavelet import (WaveletDecomposition, relative_wavelet_energy, swen,
                      swt_decompose, swt_reconstruct)

__version__ = "0.1.0"
