"""GMM-based speaker diarization: features, VAD, BIC segmentation,
agglomerative clustering, and evaluation metrics."""

from .audio_io import AudioBuffer, frame_rms, load_wav, rms, write_wav
from .config import PipelineConfig, load_config
from .pipeline import Diarization, parse_rttm, run_pipeline, write_rttm

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "Diarization",
    "PipelineConfig",
    "frame_rms",
    "load_config",
    "load_wav",
    "parse_rttm",
    "rms",
    "run_pipeline",
    "write_rttm",
    "write_wav",
    "__version__",
]
