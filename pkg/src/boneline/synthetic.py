"""Synthetic leg X-ray corpus with planted fracture patterns.

Each image carries a bright vertical shaft (two long edges), a planted
fracture (short horizontal strokes crossing the shaft, their endpoints inside
a known rectangle) and faint vertical flesh strokes near the margins.  The
generator returns the ground-truth rectangle so detected lines can be labeled
with the same endpoint rule the interactive labeling applies.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .adpo import borrow_lines, optimize_min_line_length
from .errors import NoRegionError
from .features import LineFeatureExtractor
from .hough import ADPO_BASE, HoughParams, detect_lines
from .imaging import EnhancementConfig, canny, enhance
from .labeling import FRACTURE, RegionSelection, apply_region
from .network import LabeledDataset
from .region_filter import BoneRegionFilter, window_length
from .validation import normalize_segments


@dataclass
class SyntheticImage:
    image_id: str
    pixels: np.ndarray
    fracture_rect: tuple  # (x, y, width, height)


def make_fracture_image(seed, width=128, height=192):
    """One synthetic leg image and its ground-truth fracture rectangle.

    The shaft is two full-height bright strokes; the fracture is two thick
    bands fused across the marrow cavity, with short granule strokes between
    them that only the adaptive profile picks up.  One long proximal stroke
    per image ends at a depth that straddles the rectangle boundary across
    images, reproducing the mislabeling that area selection causes; faint
    marginal strokes act as surrounding flesh.
    """
    rng = np.random.default_rng(np.random.SeedSequence((0x51, seed)))
    img = np.full((height, width), 30, dtype=np.uint8)
    cx = width // 2 + int(rng.integers(-4, 5))
    half = 22

    # bone shaft: two full-height bright strokes
    for x in (cx - half, cx + half):
        img[4:height - 4, x:x + 2] = 220

    # flesh: one long faint vertical stroke near each margin
    for x in (6, width - 9):
        y0 = int(rng.integers(15, height - 115))
        img[y0:y0 + 100, x:x + 2] = 120

    # fracture: two thick bright bands spanning the marrow cavity, fused
    # with the shaft strokes so there are no free band-end cap edges.  The
    # band edges sit farther apart than the line gap can bridge, and the
    # inner shaft faces split at the bands into mid-length vertical pieces
    # whose endpoints land inside the fracture rectangle.
    y_f = int(rng.integers(66, 77))
    for y_band in (y_f, y_f + 78):
        img[y_band:y_band + 24, cx - 21:cx + 23] = 220
    rect = (cx - 23, y_f - 20, 48, 124)

    # granule strokes between the bands: short fracture detail only the
    # adaptive profile keeps, clear of the band edges by more than the
    # bridgeable gap
    for x_off in (-15, 0, 15):
        x = cx + x_off + int(rng.integers(-1, 2))
        y0 = y_f + 40 + int(rng.integers(0, 4))
        img[y0:y0 + 19, x:x + 2] = 180

    # proximal texture: one long stroke safely above the rectangle and two
    # whose lower endpoints straddle the rectangle boundary across images,
    # so area selection mislabels the deepest ones exactly as a drawn
    # rectangle would
    slots = [-15, 0, 15]
    safe = int(rng.integers(0, 3))
    for i, x_off in enumerate(slots):
        x = cx + x_off + int(rng.integers(-1, 2))
        if i == safe:
            y0 = int(rng.integers(10, y_f - 55))
        else:
            y0 = int(rng.integers(y_f - 53, y_f - 41))
        img[y0:y0 + 28, x:x + 2] = 180
    return img, rect


def make_corpus(n_images=52, seed=0, width=128, height=192):
    corpus = []
    for i in range(n_images):
        pixels, rect = make_fracture_image(seed * 1000 + i, width, height)
        corpus.append(SyntheticImage(image_id=f"synth{i:03d}", pixels=pixels,
                                     fracture_rect=rect))
    return corpus


def detect_scheme_lines(edges, scheme="standard", seed=0, standard_params=None,
                        adpo_base=None, adpo_absolute=False, window_frac=0.05,
                        smooth_radius=None):
    """Detected lines for one edge map under either detection profile.

    The adaptive profile optimizes the minimum line length, borrows the two
    sets below it and keeps only lines inside the bone-density bounds; when
    no usable density profile exists it falls back to the unfiltered lines.
    Smoothing defaults to the full window length, which rides out the spiky
    profiles that sparse synthetic line sets produce.
    """
    if scheme == "standard":
        return detect_lines(edges, standard_params or HoughParams(), seed)
    if scheme != "adpo":
        raise ValueError(f"unknown scheme {scheme!r}")
    sweep = optimize_min_line_length(edges, adpo_base or ADPO_BASE, seed=seed,
                                     absolute=adpo_absolute)
    lines = borrow_lines(sweep)
    if len(lines) == 0:
        return lines
    if smooth_radius is None:
        smooth_radius = 2 * window_length(edges.shape[1], window_frac)
    try:
        kept = BoneRegionFilter(window_frac=window_frac,
                                smooth_radius=smooth_radius).fit_transform(
            lines, edges.shape[1])
    except NoRegionError:
        warnings.warn("no bone region found; keeping all lines", stacklevel=2)
        return lines
    return kept if len(kept) else lines


def build_image_dataset(image, scheme="standard", seed=0, enhancement=None,
                        standard_params=None, adpo_base=None, adpo_absolute=False,
                        bin_width=1.0, knee_frac=0.2, foot_frac=0.2, window_frac=0.05):
    """Full pipeline for one synthetic image: enhance, edge-detect, extract
    lines per scheme, extract features and label by the planted rectangle."""
    cfg = enhancement or EnhancementConfig()
    enhanced = enhance(image.pixels, cfg)
    edges = canny(enhanced, cfg.canny_low, cfg.canny_high)
    lines = detect_scheme_lines(edges, scheme, seed, standard_params,
                                adpo_base, adpo_absolute, window_frac)
    lines = normalize_segments(lines)
    n = len(lines)
    if n == 0:
        return LabeledDataset(X=np.empty((0, 16)), y=np.empty(0),
                              image_ids=[], line_ids=[])
    extractor = LineFeatureExtractor(bin_width=bin_width, knee_frac=knee_frac,
                                     foot_frac=foot_frac)
    X = extractor.fit_transform(lines, image.pixels.shape[0])
    rx, ry, rw, rh = image.fracture_rect
    sel = RegionSelection(image_id=image.image_id, x=rx, y=ry, width=rw, height=rh)
    records = apply_region(lines, sel)
    y = np.array([1.0 if r.label == FRACTURE else -1.0 for r in records])
    return LabeledDataset(X=X, y=y, image_ids=[image.image_id] * n,
                          line_ids=list(range(n)))


def build_corpus_datasets(corpus, scheme="standard", seed=0, **kwargs):
    """Per-image labeled datasets for a whole corpus (deterministic per seed)."""
    return [build_image_dataset(img, scheme=scheme, seed=seed + i, **kwargs)
            for i, img in enumerate(corpus)]
