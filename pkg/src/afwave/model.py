"""Decision-tree training, repeated stratified cross-validation, ROC
metrics and forward sequential feature selection.

The positive class throughout is SR maintenance (label 1); sensitivity
measures how well patients who stay in sinus rhythm are identified.
Randomness flows from a single seed: repetition r draws its generator
from SeedSequence((seed, stream, r)), so repetitions are independent and
insensitive to execution order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import SingleClass, TooFewPerClass

MAX_SPLITS = 5
N_FOLDS = 5
N_REPETITIONS = 100
SFS_REPETITIONS = 50

_EVAL_STREAM = 1
_SFS_STREAM = 2


@dataclass(frozen=True)
class CvConfig:
    folds: int = N_FOLDS
    repetitions: int = N_REPETITIONS
    stratified: bool = True
    seed: int = 0
    max_splits: int = MAX_SPLITS
    pool_folds: bool = True   # pool validation scores across folds per repetition
    workers: int = 1

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass
class TreeNode:
    feature: int = -1            # -1 marks a leaf
    threshold: float = 0.0
    left: "TreeNode" = None
    right: "TreeNode" = None
    prob_positive: float = 0.5
    n_samples: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class DecisionTree:
    root: TreeNode
    n_splits: int
    feature_ids: tuple

    def predict_proba(self, x_matrix: np.ndarray) -> np.ndarray:
        x_matrix = np.atleast_2d(np.asarray(x_matrix, dtype=float))
        out = np.empty(len(x_matrix))
        for i, row in enumerate(x_matrix):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.prob_positive
        return out

    def predict(self, x_matrix: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x_matrix) >= 0.5).astype(int)


def _gini(y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    p = float(np.mean(y))
    return 2.0 * p * (1.0 - p)


def _best_split(x_cols: np.ndarray, y: np.ndarray, idx: np.ndarray):
    """Best (impurity decrease, feature, threshold) for one node.

    Ties resolve to the lowest feature index, then the lowest threshold.
    Returns None when no feature offers two distinct values.
    """
    y_node = y[idx]
    n_node = len(idx)
    parent = n_node * _gini(y_node)
    best = None
    for f in range(x_cols.shape[1]):
        vals = x_cols[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = y_node[order]
        distinct = np.where(sv[:-1] < sv[1:])[0]
        if len(distinct) == 0:
            continue
        pos_cum = np.cumsum(sy)
        total_pos = pos_cum[-1]
        n_left = distinct + 1
        n_right = n_node - n_left
        pos_left = pos_cum[distinct]
        pos_right = total_pos - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        child = n_left * 2.0 * p_l * (1.0 - p_l) + n_right * 2.0 * p_r * (1.0 - p_r)
        gains = parent - child
        k = int(np.argmax(gains))
        gain = float(gains[k])
        thr = 0.5 * (sv[distinct[k]] + sv[distinct[k] + 1])
        cand = (gain, f, thr)
        if best is None or cand[0] > best[0] + 1e-12:
            best = cand
        # equal gains already favour the lower feature index by loop order
    return best


def fit_tree(x_matrix: np.ndarray, y: np.ndarray, feature_ids=None,
             max_splits: int = MAX_SPLITS) -> DecisionTree:
    """Greedy Gini tree grown best-first up to ``max_splits`` internal nodes.

    Nodes split as long as they are impure and some feature has two
    distinct values; a single-class training set therefore yields a stump
    that predicts that class with probability 1.
    """
    x_matrix = np.atleast_2d(np.asarray(x_matrix, dtype=float))
    y = np.asarray(y, dtype=int)
    if feature_ids is None:
        feature_ids = tuple(range(x_matrix.shape[1]))
    cols = x_matrix[:, list(feature_ids)]

    def make_leaf(idx):
        node = TreeNode(n_samples=len(idx))
        node.prob_positive = float(np.mean(y[idx])) if len(idx) else 0.5
        return node

    all_idx = np.arange(len(y))
    root = make_leaf(all_idx)
    # best-first frontier: (node, indices, cached best split), FIFO tie order
    frontier = [(root, all_idx, _best_split(cols, y, all_idx))]
    n_splits = 0
    while n_splits < max_splits:
        best_i = -1
        best_key = None
        for i, (_, idx, split) in enumerate(frontier):
            if split is None or len(np.unique(y[idx])) < 2:
                continue
            key = (-split[0], split[1], split[2], i)
            if best_key is None or key < best_key:
                best_key = key
                best_i = i
        if best_i < 0 or frontier[best_i][2][0] < 0.0:
            break
        node, idx, (gain, f, thr) = frontier.pop(best_i)
        mask = cols[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        node.feature = f
        node.threshold = thr
        node.left = make_leaf(li)
        node.right = make_leaf(ri)
        frontier.append((node.left, li, _best_split(cols, y, li)))
        frontier.append((node.right, ri, _best_split(cols, y, ri)))
        n_splits += 1
    return DecisionTree(root=root, n_splits=n_splits, feature_ids=tuple(feature_ids))


def stratified_kfold(labels: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Fold assignment preserving class proportions within +-1 per fold.

    Raises TooFewPerClass when any class has fewer than k members.
    """
    y = np.asarray(labels)
    folds = np.empty(len(y), dtype=int)
    for cls in np.unique(y):
        members = np.where(y == cls)[0]
        if len(members) < k:
            raise TooFewPerClass(f"class {cls!r} has {len(members)} members < {k} folds")
        members = rng.permutation(members)
        fold_order = rng.permutation(k)     # spread the +1 remainders
        sizes = np.full(k, len(members) // k)
        sizes[:len(members) % k] += 1
        start = 0
        for fold, size in zip(fold_order, sizes):
            folds[members[start:start + size]] = fold
            start += size
    return folds


def roc_and_threshold(scores: np.ndarray, labels: np.ndarray):
    """ROC curve over distinct score thresholds, trapezoidal AUC and the
    accuracy-optimal threshold (ties resolved toward higher sensitivity).

    Returns (points, auc, best_threshold) where points rows are
    (threshold, fpr, tpr); the leading row is a virtual +inf threshold.
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_y = y[order]
    distinct = np.where(np.diff(sorted_scores) != 0)[0]
    block_ends = np.append(distinct, len(sorted_scores) - 1)
    tp_cum = np.cumsum(sorted_y)
    tps = tp_cum[block_ends]
    fps = block_ends + 1 - tps

    thresholds = np.concatenate(([np.inf], sorted_scores[block_ends]))
    tpr = np.concatenate(([0.0], tps / n_pos))
    fpr = np.concatenate(([0.0], fps / n_neg))
    auc = float(np.trapezoid(tpr, fpr))

    accs = (tps + (n_neg - fps)) / (n_pos + n_neg)
    best_i = 0
    for i in range(len(accs)):
        if (accs[i], tps[i] / n_pos) > (accs[best_i], tps[best_i] / n_pos):
            best_i = i
    best_threshold = float(sorted_scores[block_ends[best_i]])
    points = np.column_stack([thresholds, fpr, tpr])
    return points, auc, best_threshold


def confusion_metrics(scores: np.ndarray, labels: np.ndarray, threshold: float) -> dict:
    """Se/Sp/Acc/PPV/NPV (percent) for the rule score >= threshold."""
    y = np.asarray(labels, dtype=int)
    pred = (np.asarray(scores, dtype=float) >= threshold).astype(int)
    tp = int(np.sum((pred == 1) & (y == 1)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))

    def pct(num, den):
        return 100.0 * num / den if den else 0.0

    return {"se": pct(tp, tp + fn), "sp": pct(tn, tn + fp),
            "acc": pct(tp + tn, tp + tn + fp + fn),
            "ppv": pct(tp, tp + fp), "npv": pct(tn, tn + fn)}


METRIC_NAMES = ("se", "sp", "acc", "auc", "ppv", "npv")


@dataclass(frozen=True)
class EvaluationReport:
    """Averaged classification metrics plus the per-repetition values."""

    se: float
    sp: float
    acc: float
    auc: float
    ppv: float
    npv: float
    repetitions: int
    folds: int
    feature_names: tuple
    seed: int
    per_repetition: np.ndarray = field(repr=False, default=None)  # (reps, 6)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _rng_for(seed: int, stream: int, repetition: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((seed, stream, repetition))))


def _one_repetition(x_matrix, y, feature_ids, cfg: CvConfig, rep: int) -> np.ndarray:
    rng = _rng_for(cfg.seed, _EVAL_STREAM, rep)
    folds = stratified_kfold(y, cfg.folds, rng)
    scores = np.empty(len(y))
    fold_rows = []
    for fold in range(cfg.folds):
        val = folds == fold
        tree = fit_tree(x_matrix[~val][:, list(feature_ids)], y[~val],
                        max_splits=cfg.max_splits)
        scores[val] = tree.predict_proba(x_matrix[val][:, list(feature_ids)])
        if not cfg.pool_folds:
            _, auc_f, thr_f = roc_and_threshold(scores[val], y[val])
            m = confusion_metrics(scores[val], y[val], thr_f)
            fold_rows.append([m["se"], m["sp"], m["acc"], 100.0 * auc_f,
                              m["ppv"], m["npv"]])
    if cfg.pool_folds:
        _, auc, thr = roc_and_threshold(scores, y)
        m = confusion_metrics(scores, y, thr)
        return np.array([m["se"], m["sp"], m["acc"], 100.0 * auc, m["ppv"], m["npv"]])
    return np.mean(fold_rows, axis=0)


def evaluate_model(x_matrix: np.ndarray, y: np.ndarray, feature_ids,
                   cfg: CvConfig, feature_names=None) -> EvaluationReport:
    """Repeated stratified k-fold evaluation of a decision-tree model.

    Each repetition reshuffles the stratified folds, pools the validation
    scores, picks the accuracy-optimal ROC threshold and records the six
    metrics; the report averages them over all repetitions. Repetitions
    may run in worker processes; results are reduced in repetition order
    so the report does not depend on scheduling.
    """
    x_matrix = np.atleast_2d(np.asarray(x_matrix, dtype=float))
    y = np.asarray(y, dtype=int)
    if len(np.unique(y)) < 2:
        raise SingleClass("evaluation needs both classes")
    feature_ids = tuple(feature_ids)
    reps = range(cfg.repetitions)
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_one_repetition,
                                 *zip(*((x_matrix, y, feature_ids, cfg, r) for r in reps))))
    else:
        rows = [_one_repetition(x_matrix, y, feature_ids, cfg, r) for r in reps]
    per_rep = np.vstack(rows)
    means = per_rep.mean(axis=0)
    names = tuple(feature_names) if feature_names is not None else \
        tuple(str(f) for f in feature_ids)
    return EvaluationReport(se=float(means[0]), sp=float(means[1]),
                            acc=float(means[2]), auc=float(means[3]),
                            ppv=float(means[4]), npv=float(means[5]),
                            repetitions=cfg.repetitions, folds=cfg.folds,
                            feature_names=names, seed=cfg.seed,
                            per_repetition=per_rep)


@dataclass(frozen=True)
class SelectionResult:
    """Multiset of selected feature subsets over the SFS repetitions."""

    subset_counts: tuple            # ((names tuple, count), ...) by count desc
    repetitions: int
    feature_names: tuple

    @property
    def modal_subset(self) -> tuple:
        return self.subset_counts[0][0]


def _cv_misclassification(x_matrix, y, feature_ids, folds, max_splits) -> float:
    errors = 0
    for fold in np.unique(folds):
        val = folds == fold
        tree = fit_tree(x_matrix[~val][:, list(feature_ids)], y[~val],
                        max_splits=max_splits)
        pred = tree.predict(x_matrix[val][:, list(feature_ids)])
        errors += int(np.sum(pred != y[val]))
    return errors / len(y)


def sequential_forward_selection(x_matrix: np.ndarray, y: np.ndarray,
                                 feature_names, cfg: CvConfig,
                                 repetitions: int = SFS_REPETITIONS) -> SelectionResult:
    """Greedy wrapper selection repeated over reshuffled partitions.

    Per repetition a single stratified k-fold split is drawn; features are
    added one at a time, each step keeping the candidate that minimizes
    the cross-validated misclassification rate, until no addition strictly
    reduces it. The subsets are aggregated as a multiset so the modal
    combinations stand out.
    """
    x_matrix = np.atleast_2d(np.asarray(x_matrix, dtype=float))
    y = np.asarray(y, dtype=int)
    names = tuple(feature_names)
    n_features = x_matrix.shape[1]
    if n_features < 2:
        raise ValueError("selection needs at least 2 features")
    counts = Counter()
    for rep in range(repetitions):
        rng = _rng_for(cfg.seed, _SFS_STREAM, rep)
        folds = stratified_kfold(y, cfg.folds, rng)
        chosen: list[int] = []
        best_loss = np.inf
        while len(chosen) < n_features:
            step_best = None
            for f in range(n_features):
                if f in chosen:
                    continue
                loss = _cv_misclassification(x_matrix, y, chosen + [f],
                                             folds, cfg.max_splits)
                if step_best is None or loss < step_best[0] - 1e-12:
                    step_best = (loss, f)
            if step_best is None or step_best[0] >= best_loss - 1e-12:
                break
            best_loss = step_best[0]
            chosen.append(step_best[1])
        counts[tuple(sorted(names[f] for f in chosen))] += 1
    ordered = tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    return SelectionResult(subset_counts=ordered, repetitions=repetitions,
                           feature_names=names)
