"""Pipeline configuration and the line-oriented config file format."""

from dataclasses import dataclass, fields


class ConfigError(Exception):
    """Bad key, bad value, or unreadable config file."""


@dataclass
class PipelineConfig:
    """Every tunable of the diarization pipeline, with defaults."""

    frame_ms: float = 25.0
    hop_ms: float = 10.0
    n_fft: int = 0              # 0 = smallest power of two >= frame length
    n_filters: int = 26
    n_coeffs: int = 13
    delta_width: int = 2
    vad_alpha: float = 0.15
    vad_percentile: float = 10.0
    vad_hangover_frames: int = 5
    vad_min_speech_frames: int = 10
    bic_lambda: float = 1.0
    min_seg_frames: int = 100
    window_grow_frames: int = 50
    refine_radius_frames: int = 25
    split_stride: int = 10
    bic_feature_dims: int = 13
    cluster_threshold: float = -1.0  # negative = auto (largest merge-distance gap)
    max_components: int = 4
    seed: int = 42

    def validate(self):
        if self.frame_ms <= 0 or self.hop_ms <= 0:
            raise ConfigError("frame_ms and hop_ms must be positive")
        if self.hop_ms > self.frame_ms:
            raise ConfigError("hop_ms must not exceed frame_ms")
        if not 0 < self.vad_alpha < 1:
            raise ConfigError("vad_alpha must be in (0, 1)")
        if self.bic_lambda <= 0:
            raise ConfigError("bic_lambda must be positive")
        if self.bic_feature_dims > 3 * self.n_coeffs:
            raise ConfigError("bic_feature_dims exceeds the stacked feature dim")
        if self.min_seg_frames < 2 * (self.bic_feature_dims + 1):
            raise ConfigError(
                "min_seg_frames must be at least 2*(bic_feature_dims + 1) "
                "so covariances are estimable"
            )
        return self


def load_config(path):
    """Parse a `key = value` config file with `#` comments.

    Unknown keys are hard errors so typos cannot silently change runs.
    """
    casts = {"float": float, "int": int, float: float, int: int}
    types = {f.name: casts[f.type] for f in fields(PipelineConfig)}
    cfg = PipelineConfig()
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                setattr(cfg, key, types[key](value))
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: bad {types[key].__name__} value "
                    f"{value!r} for {key}"
                ) from None
    return cfg.validate()
