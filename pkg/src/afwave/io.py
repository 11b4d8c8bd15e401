"""Text file formats: records, cohort manifests, feature tables, reports.

All formats are line-oriented and diffable. Floats are written with
``repr`` (shortest round-trip form), so writing what was read reproduces
the bytes exactly and reruns with the same seed produce identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .core import EcgRecord, Outcome
from .errors import DataError
from .features import FEATURE_NAMES, FeatureVector
from .model import METRIC_NAMES, EvaluationReport, SelectionResult

RECORD_MAGIC = "# afwave-record v1"
MANIFEST_MAGIC = "# afwave-manifest v1"
TABLE_MAGIC = "# afwave-features v1"
REPORT_MAGIC = "# afwave-report v1"
SELECTION_MAGIC = "# afwave-selection v1"

_UNIT_TO_MV = {"mV": 1.0, "uV": 1e-3, "V": 1e3}


def _fmt(x: float) -> str:
    return repr(float(x))


def write_record(path, rec: EcgRecord, units: str = "mV") -> None:
    if units not in _UNIT_TO_MV:
        raise DataError(f"unsupported unit {units!r}")
    scale = 1.0 / _UNIT_TO_MV[units]
    lines = [RECORD_MAGIC,
             f"record_id: {rec.record_id}",
             f"fs: {_fmt(rec.fs)}",
             f"lead: {rec.lead}",
             f"units: {units}",
             f"label: {rec.label.value}",
             f"n_samples: {len(rec.samples)}",
             "---"]
    lines.extend(_fmt(v * scale) for v in rec.samples)
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_header(lines, magic, path):
    if not lines or lines[0].strip() != magic:
        raise DataError(f"{path}: missing {magic!r} header")
    header = {}
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        if line.strip() == "---":
            body_at = i + 1
            break
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if ":" not in line:
            raise DataError(f"{path}: bad header line {line!r}")
        key, val = line.split(":", 1)
        header[key.strip()] = val.strip()
    if body_at is None:
        raise DataError(f"{path}: missing '---' separator")
    return header, body_at


def read_record(path) -> EcgRecord:
    path = Path(path)
    lines = path.read_text().splitlines()
    header, body_at = _parse_header(lines, RECORD_MAGIC, path)
    for key in ("record_id", "fs", "lead", "units", "n_samples"):
        if key not in header:
            raise DataError(f"{path}: missing header field {key!r}")
    units = header["units"]
    if units not in _UNIT_TO_MV:
        raise DataError(f"{path}: unsupported unit {units!r}")
    try:
        samples = np.array([float(v) for v in lines[body_at:] if v.strip()])
    except ValueError as exc:
        raise DataError(f"{path}: bad sample value ({exc})")
    declared = int(header["n_samples"])
    if len(samples) != declared:
        raise DataError(f"{path}: declared {declared} samples, body has {len(samples)}")
    label = Outcome(header.get("label", "UNLABELED"))
    return EcgRecord(samples=samples * _UNIT_TO_MV[units], fs=float(header["fs"]),
                     record_id=header["record_id"], lead=header["lead"], label=label)


@dataclass(frozen=True)
class CohortManifest:
    dataset_id: str
    entries: tuple       # ((relative path, Outcome), ...)
    notes: str = ""

    def __post_init__(self):
        paths = [p for p, _ in self.entries]
        if len(set(paths)) != len(paths):
            raise DataError("manifest paths must be unique")


def write_manifest(path, manifest: CohortManifest) -> None:
    lines = [MANIFEST_MAGIC,
             f"dataset_id: {manifest.dataset_id}"]
    if manifest.notes:
        lines.append(f"notes: {manifest.notes}")
    lines.append("---")
    for rel, label in manifest.entries:
        lines.append(f"{rel}\t{label.value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path) -> CohortManifest:
    path = Path(path)
    lines = path.read_text().splitlines()
    header, body_at = _parse_header(lines, MANIFEST_MAGIC, path)
    entries = []
    for line in lines[body_at:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}: manifest rows need 'path<TAB>label', got {line!r}")
        rel, label = parts
        if label not in (Outcome.SR_MAINTAINED.value, Outcome.AF_RELAPSE.value):
            raise DataError(f"{path}: manifest label must be a known outcome, got {label!r}")
        entries.append((rel, Outcome(label)))
    return CohortManifest(dataset_id=header.get("dataset_id", ""),
                          entries=tuple(entries), notes=header.get("notes", ""))


def write_feature_table(path, rows: list[FeatureVector], config: RunConfig = None,
                        errors: dict = None) -> None:
    lines = [TABLE_MAGIC]
    if config is not None:
        lines.append(f"# config: {config.to_json()}")
    for rid, msg in sorted((errors or {}).items()):
        lines.append(f"# error: {rid}: {msg}")
    lines.append("record_id\t" + "\t".join(FEATURE_NAMES) + "\tlabel")
    for fv in rows:
        vals = "\t".join(_fmt(getattr(fv, name)) for name in FEATURE_NAMES)
        lines.append(f"{fv.record_id}\t{vals}\t{fv.label.value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_feature_table(path) -> tuple[list[FeatureVector], RunConfig]:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != TABLE_MAGIC:
        raise DataError(f"{path}: missing {TABLE_MAGIC!r} header")
    config = None
    rows = []
    header_seen = False
    for line in lines[1:]:
        if line.startswith("# config: "):
            config = RunConfig.from_json(line[len("# config: "):])
            continue
        if line.startswith("#") or not line.strip():
            continue
        if not header_seen:
            expected = "record_id\t" + "\t".join(FEATURE_NAMES) + "\tlabel"
            if line != expected:
                raise DataError(f"{path}: unexpected column header")
            header_seen = True
            continue
        parts = line.split("\t")
        if len(parts) != len(FEATURE_NAMES) + 2:
            raise DataError(f"{path}: row has {len(parts)} fields")
        values = {name: float(v) for name, v in zip(FEATURE_NAMES, parts[1:-1])}
        rows.append(FeatureVector(record_id=parts[0], label=Outcome(parts[-1]), **values))
    if not header_seen:
        raise DataError(f"{path}: missing column header")
    return rows, config


def write_report(path, report: EvaluationReport, config: RunConfig) -> None:
    lines = [REPORT_MAGIC,
             f"config: {config.to_json()}",
             f"seed: {report.seed}",
             f"features: {','.join(report.feature_names)}",
             f"repetitions: {report.repetitions}",
             f"folds: {report.folds}"]
    for name in METRIC_NAMES:
        lines.append(f"{name}_mean: {_fmt(getattr(report, name))}")
    lines.append("---")
    lines.append("rep\t" + "\t".join(METRIC_NAMES))
    for i, row in enumerate(report.per_repetition):
        lines.append(f"{i}\t" + "\t".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_report(path) -> tuple[EvaluationReport, RunConfig]:
    path = Path(path)
    lines = path.read_text().splitlines()
    header, body_at = _parse_header(lines, REPORT_MAGIC, path)
    config = RunConfig.from_json(header["config"])
    per_rep = []
    for line in lines[body_at + 1:]:
        if not line.strip():
            continue
        per_rep.append([float(v) for v in line.split("\t")[1:]])
    means = {name: float(header[f"{name}_mean"]) for name in METRIC_NAMES}
    report = EvaluationReport(repetitions=int(header["repetitions"]),
                              folds=int(header["folds"]),
                              feature_names=tuple(header["features"].split(",")),
                              seed=int(header["seed"]),
                              per_repetition=np.array(per_rep), **means)
    return report, config


def write_selection(path, result: SelectionResult, config: RunConfig) -> None:
    lines = [SELECTION_MAGIC,
             f"config: {config.to_json()}",
             f"repetitions: {result.repetitions}",
             f"features: {','.join(result.feature_names)}",
             "---",
             "subset\tcount"]
    for subset, count in result.subset_counts:
        lines.append(f"{','.join(subset)}\t{count}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_selection(path) -> tuple[SelectionResult, RunConfig]:
    path = Path(path)
    lines = path.read_text().splitlines()
    header, body_at = _parse_header(lines, SELECTION_MAGIC, path)
    config = RunConfig.from_json(header["config"])
    counts = []
    for line in lines[body_at + 1:]:
        if not line.strip():
            continue
        subset, count = line.split("\t")
        counts.append((tuple(subset.split(",")), int(count)))
    return SelectionResult(subset_counts=tuple(counts),
                           repetitions=int(header["repetitions"]),
                           feature_names=tuple(header["features"].split(","))), config
