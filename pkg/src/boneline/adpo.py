"""Adaptive tuning of the Hough minimum line length.

With the vote threshold pinned at 1 and the line gap at its tuned value, the
detector is swept over minimum line lengths 1..25; the length whose removal
of shorter lines moves the image's average gradient the most becomes the
working minimum, and the two line sets just below it are borrowed back in to
recover fine detail lost at the chosen length.
"""

import csv
import io
import warnings
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, EmptyInputError
from .features import line_gradients_deg
from .hough import HoughParams, detect_lines, detect_lines_exhaustive

SWEEP_RANGE = (1, 25)


def average_gradient(segments):
    """Arithmetic mean of the per-line gradients, in degrees."""
    segs = np.asarray(segments).reshape(-1, 4)
    if len(segs) == 0:
        raise EmptyInputError("average gradient of an empty line set is undefined")
    return float(np.mean(line_gradients_deg(segs)))


@dataclass
class AdpoSweep:
    """Per-minimum-length line sets with their gradient statistics.

    line_sets[k] corresponds to min length l_min_values[k]; deltas[k] is the
    average-gradient change from l_min_values[k] to l_min_values[k + 1].
    """

    l_min_values: list
    line_sets: list
    avg_gradients: np.ndarray
    deltas: np.ndarray
    chosen: int

    def lines_for(self, l_min):
        lo = self.l_min_values[0]
        return self.line_sets[max(l_min, lo) - lo]


def optimize_min_line_length(edges, base=None, seed=0, absolute=False, exhaustive=False):
    """Sweep min_line_length over 1..25 and pick the largest gradient jump.

    The base parameters must carry threshold 1.  Every sweep step reuses the
    same seed so line sets differ only through the length filter.  A step
    that yields no lines carries the previous average forward with a warning.
    The chosen length maximizes the signed adjacent difference (or its
    absolute value when `absolute`), ties going to the smaller length.
    """
    base = base or HoughParams(threshold=1, max_line_gap=13.0)
    if base.threshold != 1:
        raise ConfigError("the sweep requires the vote threshold pinned at 1")
    lo, hi = SWEEP_RANGE
    detect = detect_lines_exhaustive if exhaustive else detect_lines
    l_values = list(range(lo, hi + 1))
    line_sets, avgs = [], []
    prev = 0.0
    for l_min in l_values:
        params = replace(base, min_line_length=float(l_min))
        if exhaustive:
            segs = detect(edges, params)
        else:
            segs = detect(edges, params, seed)
        line_sets.append(segs)
        if len(segs) == 0:
            warnings.warn(f"no lines at min length {l_min}; carrying previous average forward",
                          stacklevel=2)
            avgs.append(prev)
        else:
            prev = average_gradient(segs)
            avgs.append(prev)
    avgs = np.array(avgs)
    deltas = np.diff(avgs)
    ranked = np.abs(deltas) if absolute else deltas
    chosen = l_values[int(np.argmax(ranked)) + 1]
    return AdpoSweep(l_min_values=l_values, line_sets=line_sets,
                     avg_gradients=avgs, deltas=deltas, chosen=chosen)


def borrow_lines(sweep):
    """Union of the chosen line set with the two sets just below it.

    Indices clamp at the bottom of the sweep; exact duplicate segments keep
    their first occurrence only.
    """
    lo = sweep.l_min_values[0]
    picks = [max(sweep.chosen - k, lo) for k in (0, 1, 2)]
    seen = {}
    for l_min in picks:
        for row in sweep.lines_for(l_min):
            key = tuple(int(v) for v in row)
            if key not in seen:
                seen[key] = row
    if not seen:
        return np.empty((0, 4), dtype=np.int64)
    return np.array(list(seen.values()), dtype=np.int64)


def gap_sweep(edges, base=None, gaps=range(10, 21), seed=0):
    """Diagnostic: line counts for each candidate maximum line gap."""
    base = base or HoughParams(threshold=1, max_line_gap=13.0)
    counts = {}
    for gap in gaps:
        params = replace(base, max_line_gap=float(gap))
        counts[int(gap)] = len(detect_lines(edges, params, seed))
    return counts


def sweep_to_csv(sweep, stream=None):
    """Report CSV: l_min,num_lines,avg_gradient_deg,delta_avg_gradient_deg,chosen."""
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["l_min", "num_lines", "avg_gradient_deg",
                     "delta_avg_gradient_deg", "chosen"])
    for i, l_min in enumerate(sweep.l_min_values):
        delta = "" if i == 0 else f"{sweep.deltas[i - 1]:.6f}"
        writer.writerow([l_min, len(sweep.line_sets[i]),
                         f"{sweep.avg_gradients[i]:.6f}", delta,
                         int(l_min == sweep.chosen)])
    return out.getvalue() if stream is None else None


class AdpoLineDetector(BaseEstimator):
    """Estimator wrapper: transform(edges) runs the sweep and borrows lines."""

    def __init__(self, rho=1.0, theta=np.pi / 180.0, max_line_gap=13.0,
                 seed=0, absolute=False, exhaustive=False):
        self.rho = rho
        self.theta = theta
        self.max_line_gap = max_line_gap
        self.seed = seed
        self.absolute = absolute
        self.exhaustive = exhaustive

    def fit(self, X, y=None):
        return self

    def base_params(self):
        return HoughParams(rho=self.rho, theta=self.theta, threshold=1,
                           min_line_length=1.0, max_line_gap=self.max_line_gap)

    def transform(self, X):
        sweep = optimize_min_line_length(X, self.base_params(), seed=self.seed,
                                         absolute=self.absolute, exhaustive=self.exhaustive)
        self.sweep_ = sweep
        return borrow_lines(sweep)
