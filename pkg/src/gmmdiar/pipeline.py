"""End-to-end diarization pipeline and RTTM serialization."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import audio_io, clustering, features, segmentation, vad
from .config import PipelineConfig


class PipelineError(Exception):
    """A stage failed; the stage name is recorded for the CLI."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass
class Diarization:
    """Speaker-labeled turns, sorted by onset and non-overlapping."""

    file_id: str
    turns: list  # [(onset_s, duration_s, speaker_label), ...]


@dataclass
class PipelineArtifacts:
    """Intermediate products kept for dumps and figures."""

    energies: np.ndarray = None
    vad_decision: object = None
    feature_matrix: object = None
    segments: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    dendrogram: object = None
    threshold: float = None


def _seg_config(cfg):
    return segmentation.SegmentationConfig(
        penalty_weight=cfg.bic_lambda,
        min_seg_frames=cfg.min_seg_frames,
        window_grow_frames=cfg.window_grow_frames,
        refine_radius_frames=cfg.refine_radius_frames,
        split_stride=cfg.split_stride,
        bic_feature_dims=cfg.bic_feature_dims,
    )


def run_pipeline(wav_path, cfg=None, buffer=None, file_id=None,
                 artifacts=None):
    """Diarize one recording: VAD, MFCC(+deltas), delta-BIC segmentation,
    then agglomerative clustering with speaker labels by first appearance.

    Pass `buffer` to skip the file read (the path is then only used for
    the file id).  `artifacts`, if given a PipelineArtifacts, collects
    intermediates for dumps.
    """
    cfg = cfg or PipelineConfig()
    if file_id is None:
        file_id = _file_id(wav_path)
    art = artifacts if artifacts is not None else PipelineArtifacts()

    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - rewrapped with stage name
            raise PipelineError(name, exc) from exc

    if buffer is None:
        buffer = stage("load", audio_io.load_wav, wav_path)

    sr = buffer.sample_rate_hz
    frame_len = round(cfg.frame_ms * sr / 1000)
    hop = round(cfg.hop_ms * sr / 1000)
    art.energies = stage("frame_rms", audio_io.frame_rms, buffer, frame_len, hop)
    art.vad_decision = stage(
        "vad", vad.detect_speech, art.energies, cfg.vad_alpha,
        cfg.vad_percentile, cfg.vad_hangover_frames, cfg.vad_min_speech_frames,
    )
    if not art.vad_decision.speech_regions:
        warnings.warn("no speech detected")
        return Diarization(file_id, [])

    base = stage("mfcc", features.mfcc, buffer, cfg.frame_ms, cfg.hop_ms,
                 cfg.n_fft or None, cfg.n_filters, cfg.n_coeffs,
                 source=file_id)
    full = stage("deltas", features.stack_deltas, base, cfg.delta_width)
    art.feature_matrix = full
    bic_feats = full.vectors[:, :cfg.bic_feature_dims]

    seg_cfg = _seg_config(cfg)
    segs = stage("segment", segmentation.detect_change_points, bic_feats,
                 art.vad_decision.speech_regions, seg_cfg, cfg.hop_ms)
    segs = stage("refine", segmentation.refine_boundaries, segs, bic_feats,
                 seg_cfg, cfg.hop_ms)
    art.segments = segs

    if cfg.cluster_threshold < 0:
        # one unbounded run yields both the gap threshold and, by replay,
        # the labels the threshold-stopped run would produce
        _, dend = stage("cluster", clustering.agglomerate, segs,
                        full.vectors, np.inf, cfg.max_components, cfg.seed)
        threshold = clustering.threshold_from_dendrogram(dend)
        labels = clustering.cut_at_threshold(dend, threshold)
    else:
        threshold = cfg.cluster_threshold
        labels, dend = stage("cluster", clustering.agglomerate, segs,
                             full.vectors, threshold, cfg.max_components,
                             cfg.seed)
    art.threshold = threshold
    art.labels = labels
    art.dendrogram = dend

    turns = []
    for seg, label in zip(segs, labels):
        dur = seg.end_s - seg.start_s
        if turns and turns[-1][2] == label and \
                abs(turns[-1][0] + turns[-1][1] - seg.start_s) < 1e-9:
            onset, prev_dur, _ = turns[-1]
            turns[-1] = (onset, prev_dur + dur, label)
        else:
            turns.append((seg.start_s, dur, label))
    return Diarization(file_id, turns)


def _file_id(path):
    name = str(path).replace("\\", "/").rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0] if "." in name else name


def write_rttm(diarization, sink=None):
    """Serialize turns as RTTM SPEAKER lines; returns the text."""
    lines = [
        f"SPEAKER {diarization.file_id} 1 {onset:.3f} {dur:.3f} "
        f"<NA> <NA> {label} <NA> <NA>\n"
        for onset, dur, label in diarization.turns
    ]
    text = "".join(lines)
    if sink is not None:
        sink.write(text)
    return text


def parse_rttm(text):
    """Parse RTTM SPEAKER lines into a Diarization."""
    file_id = ""
    turns = []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] != "SPEAKER" or len(parts) < 8:
            raise ValueError(f"bad RTTM line: {raw!r}")
        file_id = parts[1]
        turns.append((float(parts[3]), float(parts[4]), parts[7]))
    turns.sort(key=lambda t: t[0])
    return Diarization(file_id, turns)


def diarization_timeline(diarization):
    """Turns as (start_s, end_s, label) entries for DER scoring."""
    return [(onset, onset + dur, label) for onset, dur, label in diarization.turns]
