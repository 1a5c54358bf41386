"""Leg-bone isolation from the x-density of line endpoints.

Line endpoints pile up over the bone shaft, so a sliding window summed over
the endpoint-frequency vector peaks there; walking outward from the peak to
the first turning points gives the bone's x-bounds, and lines whose midpoint
falls outside are treated as surrounding flesh.
"""

import csv
import io

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, NoRegionError
from .validation import check_segments


def window_length(width, window_frac=0.05):
    """Sliding-window length: the given fraction of the image width, at least 1."""
    if width <= 0:
        raise ConfigError("image width must be positive")
    if not 0 < window_frac <= 1:
        raise ConfigError("window_frac must lie in (0, 1]")
    return max(1, int(round(window_frac * width)))


def density_profile(segments, width, window_frac=0.05):
    """Windowed endpoint-frequency totals, one per window start position.

    Both endpoints of every line contribute their x-value to a frequency
    vector; entry i sums the frequencies of x-values in [i, i + window).
    """
    segs = check_segments(segments)
    l_w = window_length(width, window_frac)
    freq = np.zeros(width, dtype=np.int64)
    if len(segs):
        xs = np.concatenate([segs[:, 0], segs[:, 2]])
        if xs.min() < 0 or xs.max() >= width:
            raise ConfigError("line x-values must lie inside the image width")
        freq = np.bincount(xs, minlength=width)
    # windowed sum via cumulative sums; window [i, i + l_w) clipped at the border
    csum = np.concatenate([[0], np.cumsum(freq)])
    upper = np.minimum(np.arange(width) + l_w, width)
    return csum[upper] - csum[np.arange(width)]


def smooth_profile(profile, radius):
    """Centered moving average of the given radius (zero beyond the borders)."""
    prof = np.asarray(profile, dtype=np.float64)
    if radius <= 0:
        return prof.copy()
    kernel = np.ones(2 * int(radius) + 1) / (2 * int(radius) + 1)
    return np.convolve(prof, kernel, mode="same")


def bone_bounds(profile, smooth_radius=2):
    """x-interval around the density peak, ending at the first turning points.

    The profile is smoothed, the global maximum located, and the walk on each
    side continues while the profile keeps falling or stays flat, stopping
    where it turns back up or reaches zero (flat minima are crossed to their
    far edge; a zero stops immediately since density cannot fall further).
    """
    prof = np.asarray(profile, dtype=np.float64)
    if prof.ndim != 1 or len(prof) == 0 or not prof.any():
        raise NoRegionError("density profile is empty or all zero")
    smoothed = smooth_profile(prof, smooth_radius)
    peak = int(np.argmax(smoothed))

    def walk(start, step):
        i = start
        while 0 <= i + step < len(smoothed):
            if smoothed[i] == 0:
                break
            if smoothed[i + step] > smoothed[i]:
                break
            i += step
        return i

    lower = walk(peak, -1)
    upper = walk(peak, +1)
    if lower >= upper:
        raise NoRegionError("density profile has no extent around its peak")
    return int(lower), int(upper)


def filter_leg_lines(segments, bounds):
    """Keep lines whose x-midpoint lies inside [lower, upper]; order preserved."""
    segs = check_segments(segments)
    lower, upper = bounds
    if not lower < upper:
        raise ConfigError("bounds must satisfy lower < upper")
    if len(segs) == 0:
        return segs
    mid = (segs[:, 0] + segs[:, 2]) / 2.0
    return segs[(mid >= lower) & (mid <= upper)]


def profile_to_csv(profile, stream=None):
    """Profile CSV (i, f_tot) matching the plot data format."""
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["i", "f_tot"])
    for i, value in enumerate(np.asarray(profile)):
        writer.writerow([i, int(value)])
    return out.getvalue() if stream is None else None


class BoneRegionFilter(BaseEstimator):
    """fit() learns the bone bounds from a line set; transform() filters lines."""

    def __init__(self, window_frac=0.05, smooth_radius=None):
        self.window_frac = window_frac
        self.smooth_radius = smooth_radius

    def fit(self, segments, width):
        l_w = window_length(width, self.window_frac)
        radius = self.smooth_radius if self.smooth_radius is not None else l_w // 2
        self.profile_ = density_profile(segments, width, self.window_frac)
        self.bounds_ = bone_bounds(self.profile_, radius)
        return self

    def transform(self, segments):
        return filter_leg_lines(segments, self.bounds_)

    def fit_transform(self, segments, width):
        return self.fit(segments, width).transform(segments)
