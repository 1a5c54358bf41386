"""Probabilistic Hough transform for line-segment extraction from edge maps.

Lines live in the polar parameterization r = x*cos(theta) + y*sin(theta).
The probabilistic detector votes with edge pixels in a seeded random order
and walks the image along a firing cell's direction to recover a finite
segment; a deterministic exhaustive-accumulator variant is provided as an
independent reference for tests.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, InvalidInputError
from .validation import check_edge_image, normalize_segments


@dataclass
class HoughParams:
    """Accumulator resolutions and segment acceptance thresholds."""

    rho: float = 1.0
    theta: float = math.pi / 180.0
    threshold: int = 10
    min_line_length: float = 25.0
    max_line_gap: float = 10.0

    def __post_init__(self):
        if self.rho <= 0:
            raise ConfigError("rho must be positive")
        if not 0 < self.theta <= math.pi:
            raise ConfigError("theta must lie in (0, pi]")
        if self.threshold < 1:
            raise ConfigError("threshold must be >= 1")
        if self.min_line_length < 1:
            raise ConfigError("min_line_length must be >= 1")
        if self.max_line_gap < 0:
            raise ConfigError("max_line_gap must be >= 0")


ADPO_BASE = HoughParams(threshold=1, max_line_gap=13.0)


def polar_of(x, y, theta):
    """Signed distance r = x*cos(theta) + y*sin(theta) of pixel (x, y)."""
    return x * math.cos(theta) + y * math.sin(theta)


def _grid(shape, params):
    """Theta samples and the r-index offset for an accumulator over `shape`."""
    h, w = shape
    n_theta = max(1, int(round(math.pi / params.theta)))
    thetas = np.arange(n_theta) * params.theta
    diag = math.hypot(w, h)
    half = int(math.ceil(diag / params.rho)) + 1
    n_r = 2 * half + 1
    return thetas, n_r, half


def _r_indices(x, y, cos_t, sin_t, rho, offset):
    """Accumulator r-cell per theta for one pixel (votes round to nearest cell)."""
    return np.rint((x * cos_t + y * sin_t) / rho).astype(np.int64) + offset


def hough_accumulator(edges, params=None):
    """Full vote grid over all edge pixels.

    Returns (accumulator, thetas, r_offset) where accumulator has shape
    (n_theta, n_r) and cell (t, r) counts pixels whose rounded distance for
    thetas[t] is (r - r_offset) * rho.
    """
    arr = check_edge_image(edges)
    params = params or HoughParams()
    thetas, n_r, offset = _grid(arr.shape, params)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    acc = np.zeros((thetas.size, n_r), dtype=np.int64)
    ys, xs = np.nonzero(arr)
    t_idx = np.arange(thetas.size)
    for x, y in zip(xs, ys):
        acc[t_idx, _r_indices(x, y, cos_t, sin_t, params.rho, offset)] += 1
    return acc, thetas, offset


def _walk(alive, x0, y0, theta, max_gap):
    """Collect edge pixels along the line through (x0, y0) with direction
    (-sin(theta), cos(theta)), bridging runs of at most max_gap misses.

    When the rounded position itself is empty the two neighbors across the
    minor axis are tried, which keeps the walk attached to pixels within one
    cell of the line when the quantized direction is a degree off the true
    one.  Returns the ordered pixel list from one extreme to the other;
    (x0, y0) is always included.
    """
    h, w = alive.shape
    vx, vy = -math.sin(theta), math.cos(theta)
    x_major = abs(vx) >= abs(vy)
    if x_major:
        sx = 1.0 if vx > 0 else -1.0
        sy = vy / abs(vx)
    else:
        sy = 1.0 if vy > 0 else -1.0
        sx = vx / abs(vy)
    halves = []
    for direction in (1.0, -1.0):
        hits = []
        cx, cy = float(x0), float(y0)
        gap = 0
        while True:
            cx += direction * sx
            cy += direction * sy
            xi, yi = int(round(cx)), int(round(cy))
            if not (0 <= xi < w and 0 <= yi < h):
                break
            if x_major:
                candidates = ((xi, yi), (xi, yi - 1), (xi, yi + 1))
            else:
                candidates = ((xi, yi), (xi - 1, yi), (xi + 1, yi))
            hit = None
            for px, py in candidates:
                if 0 <= px < w and 0 <= py < h and alive[py, px]:
                    hit = (px, py)
                    break
            if hit is not None:
                gap = 0
                hits.append(hit)
            else:
                gap += 1
                if gap > max_gap:
                    break
        halves.append(hits)
    forward, backward = halves
    return list(reversed(backward)) + [(x0, y0)] + forward


def detect_lines(edges, params=None, seed=0):
    """Probabilistic line-segment detection.

    Edge pixels are visited in a seeded random order.  Each fresh pixel votes
    in every theta cell; once its best cell reaches the vote threshold, the
    detector walks the image along that cell's direction, bridging gaps up to
    max_line_gap, and emits the run as a segment when its endpoint distance
    reaches min_line_length.  Pixels of an emitted segment are retired and
    their votes withdrawn, so output is deterministic for a fixed seed.

    Returns an (N, 4) int array of normalized segments (x1, y1, x2, y2).
    """
    arr = check_edge_image(edges)
    params = params or HoughParams()
    thetas, n_r, offset = _grid(arr.shape, params)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    t_idx = np.arange(thetas.size)
    acc = np.zeros((thetas.size, n_r), dtype=np.int64)

    ys, xs = np.nonzero(arr)
    order = np.random.default_rng(seed).permutation(xs.size)
    alive = arr > 0
    voted = np.zeros_like(alive)

    segments = []
    for k in order:
        x, y = int(xs[k]), int(ys[k])
        if not alive[y, x]:
            continue
        cells = _r_indices(x, y, cos_t, sin_t, params.rho, offset)
        acc[t_idx, cells] += 1
        voted[y, x] = True
        best_t = int(np.argmax(acc[t_idx, cells]))
        if acc[best_t, cells[best_t]] < params.threshold:
            continue
        run = _walk(alive, x, y, thetas[best_t], params.max_line_gap)
        (ax, ay), (bx, by) = run[0], run[-1]
        if math.hypot(bx - ax, by - ay) < params.min_line_length:
            continue
        segments.append((ax, ay, bx, by))
        for qx, qy in run:
            alive[qy, qx] = False
            if voted[qy, qx]:
                qcells = _r_indices(qx, qy, cos_t, sin_t, params.rho, offset)
                acc[t_idx, qcells] -= 1
                voted[qy, qx] = False
    return normalize_segments(np.array(segments, dtype=np.int64).reshape(-1, 4))


def detect_lines_exhaustive(edges, params=None):
    """Deterministic reference detector built on the complete accumulator.

    Every edge pixel votes once; cells are then processed from the highest
    count down.  For a firing cell the supporting pixels (those whose vote
    landed in the cell) are ordered along the line, split where the projected
    gap exceeds max_line_gap + 1, and the longest run is emitted if it is
    long enough, with its pixels retired and un-voted.  Cells whose best run
    is too short are suppressed so the scan always terminates.
    """
    arr = check_edge_image(edges)
    params = params or HoughParams()
    thetas, n_r, offset = _grid(arr.shape, params)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    t_idx = np.arange(thetas.size)

    ys, xs = np.nonzero(arr)
    alive = np.ones(xs.size, dtype=bool)
    cell_of = np.empty((xs.size, thetas.size), dtype=np.int64)
    acc = np.zeros((thetas.size, n_r), dtype=np.int64)
    for i in range(xs.size):
        cell_of[i] = _r_indices(int(xs[i]), int(ys[i]), cos_t, sin_t, params.rho, offset)
        acc[t_idx, cell_of[i]] += 1

    suppressed = np.zeros_like(acc, dtype=bool)
    segments = []
    while True:
        search = np.where(suppressed, -1, acc)
        flat = int(np.argmax(search))
        t, r = np.unravel_index(flat, acc.shape)
        if search[t, r] < params.threshold:
            break
        support = np.nonzero(alive & (cell_of[:, t] == r))[0]
        proj = -xs[support] * math.sin(thetas[t]) + ys[support] * math.cos(thetas[t])
        order = np.argsort(proj, kind="stable")
        support, proj = support[order], proj[order]
        breaks = np.nonzero(np.diff(proj) > params.max_line_gap + 1)[0]
        runs = np.split(support, breaks + 1)

        best_run, best_len = None, -1.0
        for run in runs:
            a, b = run[0], run[-1]
            length = math.hypot(int(xs[b]) - int(xs[a]), int(ys[b]) - int(ys[a]))
            if length > best_len:
                best_run, best_len = run, length
        if best_len >= params.min_line_length:
            a, b = best_run[0], best_run[-1]
            segments.append((int(xs[a]), int(ys[a]), int(xs[b]), int(ys[b])))
            for i in best_run:
                alive[i] = False
                acc[t_idx, cell_of[i]] -= 1
        else:
            suppressed[t, r] = True
    return normalize_segments(np.array(segments, dtype=np.int64).reshape(-1, 4))


def segments_to_csv(segments, image_id, stream=None):
    """Serialize segments to CSV with header image_id,x1,y1,x2,y2."""
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["image_id", "x1", "y1", "x2", "y2"])
    for x1, y1, x2, y2 in np.asarray(segments).reshape(-1, 4):
        writer.writerow([image_id, int(x1), int(y1), int(x2), int(y2)])
    return out.getvalue() if stream is None else None


def segments_from_csv(text):
    """Parse the CSV emitted by segments_to_csv; returns (image_ids, segments)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["image_id", "x1", "y1", "x2", "y2"]:
        raise InvalidInputError("segment CSV must start with header image_id,x1,y1,x2,y2")
    ids = [row[0] for row in rows[1:] if row]
    segs = np.array([[int(v) for v in row[1:5]] for row in rows[1:] if row],
                    dtype=np.int64).reshape(-1, 4)
    return ids, segs


def segments_to_json(segments):
    """Serialize segments to a JSON array of [x1, y1, x2, y2] 4-tuples."""
    return json.dumps([[int(v) for v in row] for row in np.asarray(segments).reshape(-1, 4)])


def segments_from_json(text):
    data = json.loads(text)
    segs = np.array(data, dtype=np.int64).reshape(-1, 4)
    return segs


class HoughLineDetector(BaseEstimator):
    """Estimator wrapper around detect_lines for pipeline composition."""

    def __init__(self, rho=1.0, theta=math.pi / 180.0, threshold=10,
                 min_line_length=25.0, max_line_gap=10.0, seed=0, exhaustive=False):
        self.rho = rho
        self.theta = theta
        self.threshold = threshold
        self.min_line_length = min_line_length
        self.max_line_gap = max_line_gap
        self.seed = seed
        self.exhaustive = exhaustive

    def fit(self, X, y=None):
        return self

    def params(self):
        return HoughParams(rho=self.rho, theta=self.theta, threshold=self.threshold,
                           min_line_length=self.min_line_length, max_line_gap=self.max_line_gap)

    def transform(self, X):
        if self.exhaustive:
            return detect_lines_exhaustive(X, self.params())
        return detect_lines(X, self.params(), seed=self.seed)
