"""Classifier evaluation: confusion metrics, ROC/AUC, and the two case-sweep
protocols (training-set growth by images and by balanced line groups).

The rate FP/(FP+TN) is reported under the honest name `fpr` and also under
the alias `specificity_paper` kept for traceability with reports that label
it specificity.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateRocError, InvalidInputError
from .network import LabeledDataset, TrainingConfig, infer_batch, train


@dataclass
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise InvalidInputError("confusion counts must be nonnegative")

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_predictions(cls, predicted, truth):
        pred = np.asarray(predicted, dtype=np.float64) >= 0
        true = np.asarray(truth, dtype=np.float64) > 0
        return cls(
            tp=int(np.sum(pred & true)),
            tn=int(np.sum(~pred & ~true)),
            fp=int(np.sum(pred & ~true)),
            fn=int(np.sum(~pred & true)),
        )


def metrics(counts):
    """(accuracy, sensitivity, fpr); a metric with a zero denominator is None."""

    def ratio(num, den):
        return num / den if den > 0 else None

    accuracy = ratio(counts.tp + counts.tn, counts.total)
    sensitivity = ratio(counts.tp, counts.tp + counts.fn)
    fpr = ratio(counts.fp, counts.fp + counts.tn)
    return accuracy, sensitivity, fpr


def metrics_report(counts):
    accuracy, sensitivity, fpr = metrics(counts)
    return {
        "tp": counts.tp, "tn": counts.tn, "fp": counts.fp, "fn": counts.fn,
        "accuracy": accuracy,
        "sensitivity": sensitivity,
        "fpr": fpr,
        "specificity_paper": fpr,
    }


@dataclass
class RocCurve:
    points: np.ndarray
    auc: float


def roc(scored):
    """ROC staircase and trapezoidal AUC from (score, truth) pairs.

    Scores are swept from high to low; each distinct score contributes one
    point, so ties collapse onto a diagonal segment (half credit, matching
    the pairwise rank statistic).  Both classes must be present.
    """
    pairs = [(float(s), float(t) > 0) for s, t in scored]
    if not pairs:
        raise DegenerateRocError("cannot build a ROC curve without scores")
    n_pos = sum(1 for _, t in pairs if t)
    n_neg = len(pairs) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateRocError("ROC requires both classes present")
    pairs.sort(key=lambda p: -p[0])
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(pairs):
        score = pairs[i][0]
        while i < len(pairs) and pairs[i][0] == score:
            if pairs[i][1]:
                tp += 1
            else:
                fp += 1
            i += 1
        points.append((fp / n_neg, tp / n_pos))
    pts = np.array(points)
    widths = np.diff(pts[:, 0])
    heights = (pts[1:, 1] + pts[:-1, 1]) / 2.0
    return RocCurve(points=pts, auc=float(np.sum(widths * heights)))


@dataclass
class CaseResult:
    """One sweep case: its per-simulation accuracies and confusion counts."""

    case_id: int
    trained_count: int
    accuracies: list
    confusions: list = field(default_factory=list)

    @property
    def min(self):
        return min(self.accuracies)

    @property
    def avg(self):
        return sum(self.accuracies) / len(self.accuracies)

    @property
    def max(self):
        return max(self.accuracies)


def _case_seed(master_seed, case, sim):
    return np.random.SeedSequence((int(master_seed), int(case), int(sim)))


def _evaluate(model, test_X, test_y):
    scores = infer_batch(model, test_X)
    counts = ConfusionCounts.from_predictions(scores, test_y)
    accuracy, _, _ = metrics(counts)
    return accuracy, counts, scores


def image_case_sweep(train_images, test_images, cfg=None, n_cases=20, sims=10,
                     master_seed=0):
    """Train-set growth protocol over whole images.

    Case c draws c training images afresh for each simulation (with a fresh
    weight seed) and evaluates on the lines of the fixed held-out images.
    Returns one CaseResult per case.
    """
    cfg = cfg or TrainingConfig()
    if not train_images or not test_images:
        raise ConfigError("both image pools must be non-empty")
    if n_cases > len(train_images):
        raise ConfigError(f"{n_cases} cases need at least {n_cases} training images, "
                          f"got {len(train_images)}")
    train_ids = {d.image_ids[0] for d in train_images if len(d)}
    test_ids = {d.image_ids[0] for d in test_images if len(d)}
    if train_ids & test_ids:
        raise ConfigError("train and test image pools overlap")
    test_X = np.vstack([d.X for d in test_images])
    test_y = np.concatenate([d.y for d in test_images])

    results = []
    for case in range(1, n_cases + 1):
        accuracies, confusions = [], []
        for sim in range(sims):
            ss = _case_seed(master_seed, case, sim)
            rng = np.random.default_rng(ss)
            picks = rng.choice(len(train_images), size=case, replace=False)
            X = np.vstack([train_images[i].X for i in picks])
            y = np.concatenate([train_images[i].y for i in picks])
            weight_seed = int(ss.generate_state(2)[1])
            model, _ = train(LabeledDataset(X=X, y=y), cfg, seed=weight_seed)
            accuracy, counts, _ = _evaluate(model, test_X, test_y)
            accuracies.append(accuracy)
            confusions.append(counts)
        results.append(CaseResult(case_id=case, trained_count=case,
                                  accuracies=accuracies, confusions=confusions))
    return results


def line_case_sweep(pool, test_set, cfg=None, group_size=5, max_lines=1500,
                    sims=1, master_seed=0):
    """Balanced training-set growth protocol over individual lines.

    Case k trains on k groups of `group_size` fractured plus the same number
    of non-fractured lines, drawn afresh per simulation, and evaluates on the
    fixed test set.  The case count is max_lines // (2 * group_size).
    """
    cfg = cfg or TrainingConfig()
    if group_size < 1 or max_lines < 2 * group_size:
        raise ConfigError("max_lines must cover at least one balanced group")
    n_cases = max_lines // (2 * group_size)
    pos = np.nonzero(pool.y > 0)[0]
    neg = np.nonzero(pool.y < 0)[0]
    need = n_cases * group_size
    if len(pos) < need or len(neg) < need:
        raise ConfigError(f"pool exhausted: need {need} lines per class, "
                          f"have {len(pos)} fractured / {len(neg)} non-fractured")
    results = []
    for case in range(1, n_cases + 1):
        accuracies, confusions = [], []
        for sim in range(sims):
            ss = _case_seed(master_seed, case, sim)
            rng = np.random.default_rng(ss)
            take = case * group_size
            rows = np.concatenate([rng.choice(pos, size=take, replace=False),
                                   rng.choice(neg, size=take, replace=False)])
            weight_seed = int(ss.generate_state(2)[1])
            model, _ = train(LabeledDataset(X=pool.X[rows], y=pool.y[rows]),
                             cfg, seed=weight_seed)
            accuracy, counts, _ = _evaluate(model, test_set.X, test_set.y)
            accuracies.append(accuracy)
            confusions.append(counts)
        results.append(CaseResult(case_id=case, trained_count=2 * case * group_size,
                                  accuracies=accuracies, confusions=confusions))
    return results


def case_results_to_csv(results, stream=None):
    """Sweep report CSV, accuracies as percentages: case,min,avg,max."""
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["case", "min", "avg", "max"])
    for r in results:
        writer.writerow([r.case_id, f"{100 * r.min:.4f}", f"{100 * r.avg:.4f}",
                         f"{100 * r.max:.4f}"])
    return out.getvalue() if stream is None else None


def case_results_to_json(results):
    return json.dumps([
        {
            "case": r.case_id,
            "trained": r.trained_count,
            "accuracies": r.accuracies,
            "min": r.min, "avg": r.avg, "max": r.max,
            "confusions": [metrics_report(c) for c in r.confusions],
        }
        for r in results
    ])


def roc_points_to_csv(curve, stream=None):
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["fpr", "tpr"])
    for fpr, tpr in curve.points:
        writer.writerow([f"{fpr:.6f}", f"{tpr:.6f}"])
    return out.getvalue() if stream is None else None


def monotone_fit(curve, n_points=50):
    """Piecewise-linear monotone interpolation of the staircase, for plotting only."""
    pts = curve.points
    grid = np.linspace(0.0, 1.0, n_points)
    tpr = np.interp(grid, pts[:, 0], pts[:, 1])
    return np.column_stack([grid, np.maximum.accumulate(tpr)])
