"""Pipeline configuration: one TOML file with per-scheme Hough profiles.

Every key is validated on load and unknown sections or keys are rejected, so
a typo cannot silently fall back to a default.
"""

import math
from dataclasses import dataclass, fields

from .errors import ConfigError
from .hough import HoughParams
from .imaging import EnhancementConfig
from .network import TrainingConfig

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


@dataclass
class AdpoConfig:
    rho: float = 1.0
    theta_deg: float = 1.0
    max_line_gap: float = 13.0
    absolute_argmax: bool = False

    def base_params(self):
        return HoughParams(rho=self.rho, theta=math.radians(self.theta_deg),
                           threshold=1, min_line_length=1.0,
                           max_line_gap=self.max_line_gap)


@dataclass
class FeatureConfig:
    bin_width: float = 1.0
    knee_frac: float = 0.2
    foot_frac: float = 0.2

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ConfigError("bin_width must be positive")
        if not (0 <= self.knee_frac and 0 <= self.foot_frac
                and self.knee_frac + self.foot_frac < 1):
            raise ConfigError("region fractions must be nonnegative and sum below 1")


@dataclass
class RegionConfig:
    window_frac: float = 0.05
    smooth_radius: int = -1  # -1: half the window length

    def __post_init__(self):
        if not 0 < self.window_frac <= 1:
            raise ConfigError("window_frac must lie in (0, 1]")


@dataclass
class EvalConfig:
    n_cases: int = 20
    sims: int = 10
    train_images: int = 29
    test_images: int = 23
    group_size: int = 5
    max_lines: int = 1500
    master_seed: int = 0

    def __post_init__(self):
        for name in ("n_cases", "sims", "train_images", "test_images",
                     "group_size", "max_lines"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")


@dataclass
class CorpusConfig:
    n_images: int = 52
    width: int = 128
    height: int = 192

    def __post_init__(self):
        if self.n_images < 2 or self.width < 32 or self.height < 32:
            raise ConfigError("corpus must have at least 2 images of usable size")


@dataclass
class PipelineConfig:
    enhancement: EnhancementConfig
    standard: HoughParams
    adpo: AdpoConfig
    features: FeatureConfig
    region: RegionConfig
    training: TrainingConfig
    evaluation: EvalConfig
    corpus: CorpusConfig


def default_config():
    return PipelineConfig(
        enhancement=EnhancementConfig(),
        standard=HoughParams(),
        adpo=AdpoConfig(),
        features=FeatureConfig(),
        region=RegionConfig(),
        training=TrainingConfig(),
        evaluation=EvalConfig(),
        corpus=CorpusConfig(),
    )


_SECTION_TYPES = {
    "enhancement": EnhancementConfig,
    "standard": HoughParams,
    "adpo": AdpoConfig,
    "features": FeatureConfig,
    "region": RegionConfig,
    "training": TrainingConfig,
    "evaluation": EvalConfig,
    "corpus": CorpusConfig,
}

# the [standard] section uses degrees for readability; HoughParams wants radians
_STANDARD_KEYS = {"rho", "theta_deg", "threshold", "min_line_length", "max_line_gap"}


def _build_section(name, cls, values):
    if name == "standard":
        unknown = set(values) - _STANDARD_KEYS
        if unknown:
            raise ConfigError(f"unknown key(s) in [standard]: {sorted(unknown)}")
        kwargs = dict(values)
        if "theta_deg" in kwargs:
            kwargs["theta"] = math.radians(kwargs.pop("theta_deg"))
        return HoughParams(**kwargs)
    allowed = {f.name for f in fields(cls)}
    unknown = set(values) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {sorted(unknown)}")
    return cls(**values)


def parse_config(text):
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}")
    unknown = set(doc) - set(_SECTION_TYPES)
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTION_TYPES.items():
        values = doc.get(name, {})
        if not isinstance(values, dict):
            raise ConfigError(f"[{name}] must be a table")
        try:
            kwargs[name] = _build_section(name, cls, values)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid [{name}] section: {exc}")
    return PipelineConfig(**kwargs)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
