"""Input validation helpers used by the estimator classes and stage functions."""

import numpy as np

from .errors import InvalidInputError


def check_gray_image(img):
    """Validate and return a 2-D uint8 grayscale image array.

    Accepts anything array-like with integer values in [0, 255].
    """
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError("image has a zero dimension")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.number):
            raise InvalidInputError(f"image dtype {arr.dtype} is not numeric")
        if arr.min() < 0 or arr.max() > 255:
            raise InvalidInputError("image intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def check_edge_image(edges):
    """Validate and return a binary edge map: 2-D uint8 with values in {0, 255}."""
    arr = np.asarray(edges)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"expected a non-empty 2-D edge map, got shape {arr.shape}")
    vals = np.unique(arr)
    if not np.isin(vals, (0, 255)).all():
        raise InvalidInputError("edge map must be binary with values in {0, 255}")
    return arr.astype(np.uint8)


def check_segments(segments):
    """Validate and return line segments as an (N, 4) int array of x1,y1,x2,y2."""
    arr = np.asarray(segments)
    if arr.size == 0:
        return np.empty((0, 4), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise InvalidInputError(f"expected segments of shape (N, 4), got {arr.shape}")
    if not np.issubdtype(arr.dtype, np.number):
        raise InvalidInputError("segment coordinates must be numeric")
    return arr.astype(np.int64)


def normalize_segments(segments):
    """Order each segment so x1 <= x2, breaking x1 == x2 ties by y1 <= y2.

    The strict ordering stated for the endpoint coordinates cannot hold for
    vertical lines, so ties fall back to the y ordering.
    """
    segs = check_segments(segments).copy()
    if len(segs) == 0:
        return segs
    flip = (segs[:, 0] > segs[:, 2]) | ((segs[:, 0] == segs[:, 2]) & (segs[:, 1] > segs[:, 3]))
    segs[flip] = segs[flip][:, [2, 3, 0, 1]]
    return segs


def check_finite_matrix(X, name="X"):
    """Validate a 2-D float matrix with finite entries."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr
