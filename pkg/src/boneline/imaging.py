"""Grayscale enhancement and binary edge-map generation for X-ray images.

The enhancement pipeline runs, in order: white-space removal, histogram
equalization, gamma correction, median denoising, unsharp masking.  Edge maps
come from a self-contained Canny implementation (Sobel gradients, 4-sector
non-maximum suppression, double-threshold hysteresis).
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ConfigError, InvalidInputError, InvalidThresholdError
from .validation import check_gray_image


@dataclass
class EnhancementConfig:
    """Knobs for the enhancement pipeline; every step the pipeline runs is exposed.

    denoise_kernel is a median-filter window and must be odd; white_threshold
    clamps near-saturated pixels (the film border) to the image median before
    equalization so they cannot dominate the histogram.
    """

    gamma: float = 1.2
    unsharp_amount: float = 1.0
    unsharp_radius: float = 2.0
    denoise_kernel: int = 3
    white_threshold: int = 250
    canny_low: int = 50
    canny_high: int = 150

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigError("gamma must be positive")
        if self.unsharp_amount < 0:
            raise ConfigError("unsharp_amount must be nonnegative")
        if self.unsharp_radius < 0:
            raise ConfigError("unsharp_radius must be nonnegative")
        if self.denoise_kernel < 1 or self.denoise_kernel % 2 == 0:
            raise ConfigError("denoise_kernel must be odd and >= 1")
        if not 0 <= self.white_threshold <= 255:
            raise ConfigError("white_threshold must be an 8-bit intensity")
        if self.canny_low >= self.canny_high:
            raise ConfigError("canny_low must be below canny_high")


def gaussian_kernel_1d(radius):
    """Normalized 1-D Gaussian kernel with sigma=radius, truncated at 3 sigma."""
    if radius <= 0:
        return np.array([1.0])
    half = max(1, int(np.ceil(3.0 * radius)))
    xs = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-0.5 * (xs / radius) ** 2)
    return k / k.sum()


def gaussian_blur(img, radius):
    """Separable Gaussian blur with reflect padding (numpy 'reflect' mode)."""
    arr = np.asarray(img, dtype=np.float64)
    k = gaussian_kernel_1d(radius)
    if k.size == 1:
        return arr.copy()
    half = k.size // 2
    padded = np.pad(arr, ((0, 0), (half, half)), mode="reflect")
    out = np.apply_along_axis(lambda row: np.convolve(row, k, mode="valid"), 1, padded)
    padded = np.pad(out, ((half, half), (0, 0)), mode="reflect")
    return np.apply_along_axis(lambda col: np.convolve(col, k, mode="valid"), 0, padded)


def remove_white_space(img, white_threshold):
    """Clamp near-saturated pixels to the image median."""
    arr = img.astype(np.float64)
    med = float(np.median(arr))
    out = arr.copy()
    out[arr >= white_threshold] = min(med, float(white_threshold))
    return out


def equalize(img):
    """Classic histogram equalization over 256 levels.

    A single-level image is returned unchanged (the usual cdf formula is
    undefined there, and stretching a constant image is meaningless).
    """
    arr = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    hist = np.bincount(arr.ravel(), minlength=256)
    nonzero = np.nonzero(hist)[0]
    if nonzero.size <= 1:
        return arr.astype(np.float64)
    cdf = np.cumsum(hist)
    cdf_min = cdf[nonzero[0]]
    total = arr.size
    lut = np.rint((cdf - cdf_min) / (total - cdf_min) * 255.0)
    return lut[arr].astype(np.float64)


def gamma_correct(img, gamma):
    """Map intensities through v -> 255 * (v/255)^(1/gamma)."""
    arr = np.clip(np.asarray(img, dtype=np.float64), 0, 255)
    return 255.0 * (arr / 255.0) ** (1.0 / gamma)


def unsharp_mask(img, amount, radius):
    """Sharpen by adding amount * (image - gaussian_blur(image, radius))."""
    arr = np.asarray(img, dtype=np.float64)
    if amount == 0 or radius <= 0:
        return arr.copy()
    return arr + amount * (arr - gaussian_blur(arr, radius))


def enhance(img, cfg=None):
    """Run the full enhancement pipeline and return a uint8 image of equal size."""
    arr = check_gray_image(img)
    cfg = cfg or EnhancementConfig()
    out = remove_white_space(arr, cfg.white_threshold)
    out = equalize(out)
    out = gamma_correct(out, cfg.gamma)
    if cfg.denoise_kernel > 1:
        out = ndimage.median_filter(out, size=cfg.denoise_kernel, mode="reflect")
    out = unsharp_mask(out, cfg.unsharp_amount, cfg.unsharp_radius)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def sobel_gradients(img):
    """Gradient components (gx, gy) via 3x3 Sobel with replicated borders."""
    arr = np.asarray(img, dtype=np.float64)
    padded = np.pad(arr, 1, mode="edge")
    h, w = arr.shape
    windows = np.lib.stride_tricks.sliding_window_view(padded, (3, 3))
    gx = np.einsum("ijkl,kl->ij", windows, _SOBEL_X)
    gy = np.einsum("ijkl,kl->ij", windows, _SOBEL_Y)
    assert gx.shape == (h, w)
    return gx, gy


def _nms(mag, angle):
    """Thin gradient ridges: keep a pixel only if it dominates both neighbors
    along the gradient direction (strictly on one side to break plateau ties)."""
    h, w = mag.shape
    deg = np.rad2deg(angle) % 180.0
    sector = np.zeros_like(deg, dtype=np.int8)
    sector[(deg >= 22.5) & (deg < 67.5)] = 1
    sector[(deg >= 67.5) & (deg < 112.5)] = 2
    sector[(deg >= 112.5) & (deg < 157.5)] = 3

    padded = np.pad(mag, 1, mode="constant")

    def shifted(dy, dx):
        return padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]

    # (prev, next) neighbor offsets per sector, along the gradient direction
    neighbors = {
        0: ((0, -1), (0, 1)),
        1: ((1, -1), (-1, 1)),
        2: ((-1, 0), (1, 0)),
        3: ((-1, -1), (1, 1)),
    }
    keep = np.zeros_like(mag, dtype=bool)
    for s, ((py, px), (ny, nx)) in neighbors.items():
        sel = sector == s
        keep |= sel & (mag > shifted(py, px)) & (mag >= shifted(ny, nx))
    return np.where(keep, mag, 0.0)


def canny(img, low=50, high=150):
    """Binary edge map via Sobel gradients, non-maximum suppression and hysteresis.

    Weak pixels (>= low) survive only when 8-connected to a strong pixel
    (>= high).  Output values are {0, 255}.
    """
    if low >= high:
        raise InvalidThresholdError(f"canny low threshold {low} must be below high {high}")
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"expected a non-empty 2-D image, got {arr.shape}")
    gx, gy = sobel_gradients(arr)
    mag = np.hypot(gx, gy)
    angle = np.arctan2(gy, gx)
    thin = _nms(mag, angle)
    strong = thin >= high
    weak = thin >= low
    labels, n = ndimage.label(weak, structure=np.ones((3, 3)))
    if n == 0:
        return np.zeros(arr.shape, dtype=np.uint8)
    keep_ids = np.unique(labels[strong])
    keep_ids = keep_ids[keep_ids != 0]
    edges = np.isin(labels, keep_ids)
    return np.where(edges, 255, 0).astype(np.uint8)


class ImageEnhancer(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping the enhancement pipeline."""

    def __init__(self, gamma=1.2, unsharp_amount=1.0, unsharp_radius=2.0,
                 denoise_kernel=3, white_threshold=250):
        self.gamma = gamma
        self.unsharp_amount = unsharp_amount
        self.unsharp_radius = unsharp_radius
        self.denoise_kernel = denoise_kernel
        self.white_threshold = white_threshold

    def fit(self, X, y=None):
        return self

    def _config(self):
        return EnhancementConfig(
            gamma=self.gamma,
            unsharp_amount=self.unsharp_amount,
            unsharp_radius=self.unsharp_radius,
            denoise_kernel=self.denoise_kernel,
            white_threshold=self.white_threshold,
        )

    def transform(self, X):
        return enhance(X, self._config())


class CannyEdgeDetector(BaseEstimator, TransformerMixin):
    """Stateless transformer producing {0, 255} edge maps."""

    def __init__(self, low=50, high=150):
        self.low = low
        self.high = high

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return canny(X, self.low, self.high)
