"""Per-line feature extraction: the 13 geometric features plus region one-hots.

The line gradient is measured from the vertical axis: a vertical segment has
gradient 0 degrees and a horizontal one 90 degrees.  The value is folded into
[0, 90] so that a segment and its reverse share a gradient, which also makes
the derived distances satisfy (d_x, d_y) = (|dy|, |dx|) for every segment.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ConfigError, EmptyInputError
from .validation import check_segments, normalize_segments

FEATURE_NAMES = [
    "X1", "Y1", "X2", "Y2", "DIST", "G", "X-MID", "Y-MID",
    "X-DIFF", "Y-DIFF", "X-DIST", "Y-DIST", "G-DEV",
    "knee", "leg", "foot",
]
CSV_HEADER = ["image_id", "line_id"] + FEATURE_NAMES
REGIONS = ("knee", "leg", "foot")


@dataclass
class GradientReference:
    """Modal gradient of an image's lines, in degrees, with its histogram bin width."""

    theta_ref: float
    bin_width: float = 1.0

    def __post_init__(self):
        if not 0 <= self.theta_ref <= 180:
            raise ConfigError("theta_ref must lie in [0, 180] degrees")
        if self.bin_width <= 0:
            raise ConfigError("bin_width must be positive")


def line_gradients_deg(segments):
    """Gradient of each segment, measured from vertical, folded into [0, 90]."""
    segs = check_segments(segments)
    dx = np.abs(segs[:, 2] - segs[:, 0]).astype(np.float64)
    dy = np.abs(segs[:, 3] - segs[:, 1]).astype(np.float64)
    return np.degrees(np.arctan2(dx, dy))


def line_lengths(segments):
    segs = check_segments(segments)
    return np.hypot(segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1])


def gradient_reference(segments, bin_width=1.0):
    """Modal gradient via a histogram with bins centered on multiples of bin_width.

    Gradients are folded into [0, 180) first; ties go to the smaller angle.
    """
    segs = check_segments(segments)
    if len(segs) == 0:
        raise EmptyInputError("gradient_reference requires at least one line")
    if bin_width <= 0:
        raise ConfigError("bin_width must be positive")
    grads = line_gradients_deg(segs) % 180.0
    bins = np.floor(grads / bin_width + 0.5).astype(np.int64)
    counts = np.bincount(bins)
    return GradientReference(theta_ref=float(np.argmax(counts) * bin_width),
                             bin_width=bin_width)


def assign_region(segment, img_height, knee_frac=0.2, foot_frac=0.2):
    """Band assignment by segment midpoint: top band knee, bottom band foot.

    A midpoint exactly on a band boundary goes to the upper band.
    """
    if not (0 <= knee_frac and 0 <= foot_frac and knee_frac + foot_frac < 1):
        raise ConfigError("knee_frac and foot_frac must be nonnegative and sum below 1")
    x1, y1, x2, y2 = np.asarray(segment).reshape(4)
    y_mid = (float(y1) + float(y2)) / 2.0
    if y_mid <= knee_frac * img_height:
        return "knee"
    if y_mid > (1.0 - foot_frac) * img_height:
        return "foot"
    return "leg"


def _region_onehot(tags):
    out = np.zeros((len(tags), 3), dtype=np.float64)
    for i, tag in enumerate(tags):
        out[i, REGIONS.index(tag)] = 1.0
    return out


def extract_features(segments, ref, regions):
    """Feature matrix (N, 16) in FEATURE_NAMES order.

    `regions` is a sequence of region tags, one per segment.  Segments are
    expected normalized (x1 <= x2); the derived distances use the printed
    trig formulas d_x = d*cos(g) and d_y = d*sin(g) on the folded gradient.
    """
    segs = check_segments(segments).astype(np.float64)
    n = len(segs)
    if isinstance(regions, str):
        regions = [regions] * n
    if len(regions) != n:
        raise ConfigError("one region tag per segment is required")
    x1, y1, x2, y2 = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]
    dx = x2 - x1
    dy = y2 - y1
    d = np.hypot(dx, dy)
    g = line_gradients_deg(segs)
    g_rad = np.radians(g)
    feats = np.column_stack([
        x1, y1, x2, y2,
        d, g,
        (x1 + x2) / 2.0, (y1 + y2) / 2.0,
        dx, dy,
        d * np.cos(g_rad), d * np.sin(g_rad),
        np.abs(ref.theta_ref - g),
    ])
    return np.hstack([feats, _region_onehot(list(regions))])


def extract(segment, ref, region):
    """Single-segment convenience wrapper returning a (16,) vector."""
    return extract_features(np.asarray(segment).reshape(1, 4), ref, [region])[0]


def features_to_csv(features, image_ids, line_ids, stream=None):
    """Feature CSV with the exact documented header."""
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_HEADER)
    for img, lid, row in zip(image_ids, line_ids, np.asarray(features)):
        writer.writerow([img, int(lid)] + [f"{v:.6f}" for v in row])
    return out.getvalue() if stream is None else None


def features_from_csv(text):
    """Parse a feature CSV; returns (image_ids, line_ids, feature matrix)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ConfigError("feature CSV header does not match the documented format")
    image_ids, line_ids, feats = [], [], []
    for row in rows[1:]:
        if not row:
            continue
        image_ids.append(row[0])
        line_ids.append(int(row[1]))
        feats.append([float(v) for v in row[2:]])
    return image_ids, line_ids, np.array(feats, dtype=np.float64).reshape(-1, len(FEATURE_NAMES))


class LineFeatureExtractor(BaseEstimator, TransformerMixin):
    """Per-image feature extraction with the modal gradient fit on leg-region lines.

    fit() computes the gradient reference from the segments falling in the
    leg band (all segments when none do); transform() emits the (N, 16)
    feature matrix.
    """

    def __init__(self, bin_width=1.0, knee_frac=0.2, foot_frac=0.2):
        self.bin_width = bin_width
        self.knee_frac = knee_frac
        self.foot_frac = foot_frac

    def fit(self, segments, img_height):
        segs = normalize_segments(segments)
        tags = [assign_region(s, img_height, self.knee_frac, self.foot_frac) for s in segs]
        leg = segs[[t == "leg" for t in tags]]
        self.reference_ = gradient_reference(leg if len(leg) else segs, self.bin_width)
        self.img_height_ = img_height
        return self

    def transform(self, segments):
        segs = normalize_segments(segments)
        tags = [assign_region(s, self.img_height_, self.knee_frac, self.foot_frac)
                for s in segs]
        return extract_features(segs, self.reference_, tags)

    def fit_transform(self, segments, img_height):
        return self.fit(segments, img_height).transform(segments)
