"""Command-line orchestration: synth, features, evaluate, select, report.

Parameter precedence: a config file overrides command-line flags, which
override the built-in defaults. The effective seed is always printed.
Exit codes: 0 success (including partial success with warnings),
2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import io as afio
from .config import RunConfig
from .core import Outcome
from .errors import AfwaveError, DataError, InvalidSpec, SingleClass, StageError
from .features import FEATURE_NAMES
from .model import (CvConfig, _rng_for, confusion_metrics, evaluate_model,
                    roc_and_threshold, sequential_forward_selection,
                    stratified_kfold)
from .pipeline import extract_all
from .synth import CohortRanges, generate_cohort

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

_CONFIG_FLAGS = [f.name for f in dataclasses.fields(RunConfig)]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file of RunConfig fields; overrides flags")
    group = parser.add_argument_group("pipeline parameters")
    for f in dataclasses.fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = type(f.default)
        group.add_argument(flag, dest=f.name, type=kind, default=None,
                           help=f"{f.name} (default {f.default!r})")


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    overrides = {name: getattr(args, name) for name in _CONFIG_FLAGS
                 if getattr(args, name, None) is not None}
    cfg = cfg.replaced(**overrides)
    if getattr(args, "config", None) is not None:
        file_fields = json.loads(Path(args.config).read_text())
        cfg = cfg.replaced(**file_fields)
    return cfg


def _matrix(rows, feature_names):
    x = np.array([[getattr(fv, n) for n in feature_names] for fv in rows])
    y = np.array([1 if fv.label is Outcome.SR_MAINTAINED else 0 for fv in rows])
    return x, y


def _parse_model(spec: str):
    names = tuple(n.strip() for n in spec.split(",") if n.strip())
    unknown = [n for n in names if n not in FEATURE_NAMES]
    if unknown:
        raise ValueError(f"unknown feature names: {unknown}; "
                         f"choose from {list(FEATURE_NAMES)}")
    if not names:
        raise ValueError("model needs at least one feature")
    return names


def cmd_synth(args) -> int:
    cfg = _resolve_config(args)
    print(f"seed: {cfg.seed}")
    out_dir = Path(args.out_dir)
    try:
        cohort = generate_cohort((args.n_organized, args.n_disorganized),
                                 CohortRanges(), seed=cfg.seed)
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for record, _ in cohort:
        rel = f"{record.record_id}.rec"
        afio.write_record(out_dir / rel, record)
        entries.append((rel, record.label))
    manifest = afio.CohortManifest(dataset_id=f"synth-{cfg.seed}",
                                   entries=tuple(entries),
                                   notes=f"generated by afwave synth, seed={cfg.seed}")
    afio.write_manifest(out_dir / "manifest.txt", manifest)
    print(f"wrote {len(entries)} records and manifest to {out_dir}")
    return EXIT_OK


def cmd_features(args) -> int:
    cfg = _resolve_config(args)
    print(f"seed: {cfg.seed}")
    try:
        manifest = afio.read_manifest(args.manifest)
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    base = Path(args.manifest).parent
    rows, errors = [], {}
    for rel, label in manifest.entries:
        try:
            record = afio.read_record(base / rel)
            fv = extract_all(record, cfg)
            if fv.label is Outcome.UNLABELED:
                fv = dataclasses.replace(fv, label=label)
            rows.append(fv)
        except (OSError, DataError, StageError, AfwaveError) as exc:
            errors[rel] = str(exc)
            print(f"warning: {rel}: {exc}", file=sys.stderr)
    afio.write_feature_table(args.out, rows, config=cfg, errors=errors)
    print(f"wrote {len(rows)} feature rows to {args.out}"
          + (f" ({len(errors)} failed)" if errors else ""))
    if not manifest.entries:
        print("warning: empty manifest", file=sys.stderr)
        return EXIT_OK
    return EXIT_DATA if not rows else EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _resolve_config(args)
    print(f"seed: {cfg.seed}")
    try:
        names = _parse_model(args.model)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows, _ = afio.read_feature_table(args.features)
        x, y = _matrix(rows, names)
        cv = CvConfig(folds=cfg.folds, repetitions=cfg.repetitions, seed=cfg.seed,
                      max_splits=cfg.max_splits, workers=cfg.workers)
        report = evaluate_model(x, y, range(len(names)), cv, feature_names=names)
    except (OSError, DataError, SingleClass, AfwaveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    afio.write_report(args.out, report, cfg)
    summary = "  ".join(f"{k}={v:.2f}" for k, v in report.as_dict().items())
    print(f"model [{','.join(names)}]: {summary}")
    print(f"wrote report to {args.out}")
    return EXIT_OK


def cmd_select(args) -> int:
    cfg = _resolve_config(args)
    print(f"seed: {cfg.seed}")
    try:
        rows, _ = afio.read_feature_table(args.features)
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    names = FEATURE_NAMES
    x, y = _matrix(rows, names)
    cv = CvConfig(folds=cfg.folds, repetitions=cfg.repetitions, seed=cfg.seed,
                  max_splits=cfg.max_splits)
    try:
        result = sequential_forward_selection(x, y, names, cv,
                                              repetitions=cfg.sfs_repetitions)
    except (ValueError, AfwaveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    afio.write_selection(args.out, result, cfg)
    top = result.subset_counts[0]
    print(f"modal subset: {','.join(top[0])} ({top[1]}/{result.repetitions})")
    print(f"wrote selection to {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _resolve_config(args)
    print(f"seed: {cfg.seed}")
    try:
        names = _parse_model(args.model)
        rows, _ = afio.read_feature_table(args.features)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # box-plot table: per feature and class, the five-number summary
    box_lines = ["feature\tlabel\tmin\tq1\tmedian\tq3\tmax"]
    for feat in FEATURE_NAMES:
        for label in (Outcome.SR_MAINTAINED, Outcome.AF_RELAPSE):
            vals = np.array([getattr(fv, feat) for fv in rows if fv.label is label])
            if len(vals) == 0:
                continue
            q = np.percentile(vals, [0, 25, 50, 75, 100])
            box_lines.append(feat + "\t" + label.value + "\t"
                             + "\t".join(repr(float(v)) for v in q))
    (out_dir / "boxplot_data.tsv").write_text("\n".join(box_lines) + "\n")

    # ROC table from one pooled cross-validation pass
    try:
        from .model import fit_tree
        x, y = _matrix(rows, names)
        rng = _rng_for(cfg.seed, 1, 0)
        folds = stratified_kfold(y, cfg.folds, rng)
        scores = np.empty(len(y))
        for fold in range(cfg.folds):
            val = folds == fold
            tree = fit_tree(x[~val], y[~val], max_splits=cfg.max_splits)
            scores[val] = tree.predict_proba(x[val])
        points, auc, thr = roc_and_threshold(scores, y)
    except (SingleClass, AfwaveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    roc_lines = [f"# model: {','.join(names)}  auc: {auc!r}  best_threshold: {thr!r}",
                 "threshold\tfpr\ttpr"]
    for t, fpr, tpr in points:
        roc_lines.append(f"{t!r}\t{fpr!r}\t{tpr!r}")
    (out_dir / "roc_points.tsv").write_text("\n".join(roc_lines) + "\n")
    print(f"wrote boxplot_data.tsv and roc_points.tsv to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afwave",
        description="Preoperative AF-recurrence analysis pipeline: synthetic "
                    "cohorts, ECG feature extraction and decision-tree evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled synthetic cohort")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--n-organized", type=int, default=30)
    p.add_argument("--n-disorganized", type=int, default=23)
    _add_config_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("features", help="extract feature vectors for a manifest")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    _add_config_flags(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("evaluate", help="repeated cross-validated evaluation")
    p.add_argument("--features", required=True, type=Path)
    p.add_argument("--model", default="rwes7,swenv",
                   help="comma-separated feature names")
    p.add_argument("--out", required=True, type=Path)
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("select", help="forward sequential feature selection")
    p.add_argument("--features", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    _add_config_flags(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("report", help="plot-ready ROC and box-plot tables")
    p.add_argument("--features", required=True, type=Path)
    p.add_argument("--model", default="rwes7,swenv")
    p.add_argument("--out-dir", required=True, type=Path)
    _add_config_flags(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
