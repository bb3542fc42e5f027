"""Energy-based voice activity detection with adaptive thresholding."""

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass
class VadDecision:
    """Per-frame speech mask plus the regions and threshold behind it."""

    mask: np.ndarray            # bool, one entry per frame
    speech_regions: list        # [(start_frame, end_frame), ...) half-open
    threshold_used: float
    noise_floor: float


def estimate_noise_floor(energies, percentile=10.0):
    """Noise floor as a low percentile of the frame energies."""
    energies = np.asarray(energies, float)
    if energies.size == 0:
        raise ValueError("empty energy sequence")
    return float(np.percentile(energies, percentile))


def _regions_from_mask(mask):
    regions = []
    start = None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            regions.append((start, i))
            start = None
    if start is not None:
        regions.append((start, len(mask)))
    return regions


def detect_speech(energies, alpha=0.15, percentile=10.0, hangover_frames=5,
                  min_speech_frames=10):
    """Threshold frame energies adaptively and smooth the raw mask.

    threshold = noise_floor + alpha * (max_energy - noise_floor).
    Non-speech gaps of at most hangover_frames inside speech are filled;
    speech runs shorter than min_speech_frames are deleted.
    """
    energies = np.asarray(energies, float)
    if energies.size == 0:
        raise ValueError("empty energy sequence")
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")

    noise_floor = estimate_noise_floor(energies, percentile)
    peak = float(energies.max())
    threshold = noise_floor + alpha * (peak - noise_floor)

    if peak == noise_floor:
        warnings.warn("degenerate energy profile (peak equals noise floor); "
                      "classifying entire signal as non-speech")
        mask = np.zeros(energies.size, dtype=bool)
        return VadDecision(mask, [], threshold, noise_floor)

    mask = energies > threshold

    # hangover: bridge short non-speech gaps between speech runs
    regions = _regions_from_mask(mask)
    for (_, prev_end), (start, _) in zip(regions, regions[1:]):
        if start - prev_end <= hangover_frames:
            mask[prev_end:start] = True

    # drop speech runs that are too short to be real speech
    for start, end in _regions_from_mask(mask):
        if end - start < min_speech_frames:
            mask[start:end] = False

    return VadDecision(mask, _regions_from_mask(mask), threshold, noise_floor)


def vad_csv(energies, decision, sink):
    """Write frame_index,energy,is_speech rows."""
    sink.write("frame_index,energy,is_speech\n")
    for i, (e, s) in enumerate(zip(energies, decision.mask)):
        sink.write(f"{i},{e!r},{int(s)}\n")
