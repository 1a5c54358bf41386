"""Line-based fracture detection for long-bone X-ray images.

The pipeline enhances an X-ray, extracts a binary edge map, detects line
segments with a probabilistic Hough transform, summarizes each line with 13
geometric features plus region indicators, and classifies lines as fractured
or not with a small tanh network.  An adaptive profile tunes the Hough
minimum line length per image and isolates the leg-bone region before
classification.
"""

from .adpo import (AdpoLineDetector, AdpoSweep, average_gradient, borrow_lines,
                   optimize_min_line_length)
from .analysis import (ContributionReport, correlation_matrix, jacobi_eigh,
                       pca_contribution)
from .errors import (AnalysisError, BonelineError, ConfigError, DegenerateRocError,
                     DivergenceError, EmptyInputError, InvalidInputError,
                     InvalidThresholdError, NoRegionError, NotFoundError)
from .evaluation import (CaseResult, ConfusionCounts, RocCurve, image_case_sweep,
                         line_case_sweep, metrics, roc)
from .features import (FEATURE_NAMES, GradientReference, LineFeatureExtractor,
                       assign_region, extract, extract_features, gradient_reference,
                       line_gradients_deg)
from .hough import (HoughLineDetector, HoughParams, detect_lines,
                    detect_lines_exhaustive, hough_accumulator, polar_of)
from .imaging import (CannyEdgeDetector, EnhancementConfig, ImageEnhancer, canny,
                      enhance)
from .labeling import (LabelRecord, LabelStore, RegionSelection, apply_region,
                       export_dataset)
from .network import (FractureLineClassifier, LabeledDataset, NetworkModel,
                      TrainingConfig, classify, gradient_check, infer, train)
from .region_filter import (BoneRegionFilter, bone_bounds, density_profile,
                            filter_leg_lines)
from .validation import normalize_segments

__version__ = "0.1.0"

__all__ = [
    "AdpoLineDetector", "AdpoSweep", "average_gradient", "borrow_lines",
    "optimize_min_line_length",
    "ContributionReport", "correlation_matrix", "jacobi_eigh", "pca_contribution",
    "AnalysisError", "BonelineError", "ConfigError", "DegenerateRocError",
    "DivergenceError", "EmptyInputError", "InvalidInputError",
    "InvalidThresholdError", "NoRegionError", "NotFoundError",
    "CaseResult", "ConfusionCounts", "RocCurve", "image_case_sweep",
    "line_case_sweep", "metrics", "roc",
    "FEATURE_NAMES", "GradientReference", "LineFeatureExtractor", "assign_region",
    "extract", "extract_features", "gradient_reference", "line_gradients_deg",
    "HoughLineDetector", "HoughParams", "detect_lines", "detect_lines_exhaustive",
    "hough_accumulator", "polar_of",
    "CannyEdgeDetector", "EnhancementConfig", "ImageEnhancer", "canny", "enhance",
    "LabelRecord", "LabelStore", "RegionSelection", "apply_region", "export_dataset",
    "FractureLineClassifier", "LabeledDataset", "NetworkModel", "TrainingConfig",
    "classify", "gradient_check", "infer", "train",
    "BoneRegionFilter", "bone_bounds", "density_profile", "filter_leg_lines",
    "normalize_segments",
]
