"""Speaker change-point detection over the feature stream via delta-BIC."""

from dataclasses import dataclass, field

import numpy as np

COV_REGULARIZER = 1e-6  # added to the covariance diagonal before the determinant


@dataclass
class SegmentationConfig:
    penalty_weight: float = 1.0     # lambda in the BIC penalty term
    min_seg_frames: int = 100       # 1.0 s at 10 ms hop
    window_grow_frames: int = 50
    refine_radius_frames: int = 25
    split_stride: int = 10
    bic_feature_dims: int = 13      # feature columns used for split decisions

    def __post_init__(self):
        if self.penalty_weight <= 0:
            raise ValueError("penalty_weight must be positive")


@dataclass
class Segment:
    """Half-open frame interval [start_frame, end_frame) with times in seconds."""

    start_frame: int
    end_frame: int
    start_s: float
    end_s: float
    short: bool = False  # region was below min_seg_frames

    @property
    def n_frames(self):
        return self.end_frame - self.start_frame


def _logdet_cov(X):
    """Log-determinant of the biased sample covariance, diagonally regularized."""
    n, d = X.shape
    xc = X - X.mean(axis=0)
    cov = xc.T @ xc / n + COV_REGULARIZER * np.eye(d)
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0 or not np.isfinite(logdet):
        raise ValueError("non-finite covariance determinant after regularization")
    return logdet


def delta_bic(X, split, penalty_weight=1.0):
    """BIC gain of modeling X as two full-covariance Gaussians split at `split`.

    Positive values favor the split.  Both halves must have at least
    d+1 rows so the covariance estimates are non-singular.
    """
    X = np.atleast_2d(np.asarray(X, float))
    n, d = X.shape
    if not d + 1 <= split <= n - (d + 1):
        raise ValueError(f"split {split} leaves a half shorter than d+1={d + 1}")
    n1, n2 = split, n - split
    penalty_terms = d + d * (d + 1) / 2
    return (
        n / 2 * _logdet_cov(X)
        - n1 / 2 * _logdet_cov(X[:split])
        - n2 / 2 * _logdet_cov(X[split:])
        - penalty_weight / 2 * penalty_terms * np.log(n)
    )


def _candidate_splits(window_len, d, cfg):
    lo = max(cfg.min_seg_frames, d + 1)
    hi = window_len - max(cfg.min_seg_frames, d + 1)
    return range(lo, hi + 1, cfg.split_stride)


def _frame_to_s(frame, hop_ms):
    return frame * hop_ms / 1000.0


def detect_change_points(features, speech_regions, cfg=None, hop_ms=10.0):
    """Growing-window delta-BIC scan within each speech region.

    `features` is the (n_frames, d) matrix used for split decisions.
    Each region is scanned independently; regions shorter than
    min_seg_frames come back as one short-flagged segment.
    """
    cfg = cfg or SegmentationConfig()
    X = np.atleast_2d(np.asarray(features, float))
    d = X.shape[1]
    segments = []
    for r0, r1 in speech_regions:
        if r1 - r0 < cfg.min_seg_frames:
            segments.append(Segment(r0, r1, _frame_to_s(r0, hop_ms),
                                    _frame_to_s(r1, hop_ms), short=True))
            continue
        pos = r0
        win_end = min(pos + 2 * cfg.min_seg_frames, r1)
        while pos < r1:
            W = X[pos:win_end]
            best_split, best_val = None, 0.0
            for c in _candidate_splits(win_end - pos, d, cfg):
                val = delta_bic(W, c, cfg.penalty_weight)
                if val > best_val:
                    best_split, best_val = c, val
            if best_split is not None:
                boundary = pos + best_split
                segments.append(Segment(pos, boundary, _frame_to_s(pos, hop_ms),
                                        _frame_to_s(boundary, hop_ms)))
                pos = boundary
                win_end = min(pos + 2 * cfg.min_seg_frames, r1)
            elif win_end < r1:
                win_end = min(win_end + cfg.window_grow_frames, r1)
            else:
                segments.append(Segment(pos, r1, _frame_to_s(pos, hop_ms),
                                        _frame_to_s(r1, hop_ms),
                                        short=r1 - pos < cfg.min_seg_frames))
                break
    return segments


def refine_boundaries(segments, features, cfg=None, hop_ms=10.0):
    """Re-place each interior boundary at the local delta-BIC argmax.

    Candidates span refine_radius_frames around the current boundary over
    the union of the two adjacent segments; the boundary moves only if
    the best delta-BIC there is positive.
    """
    cfg = cfg or SegmentationConfig()
    if cfg.refine_radius_frames == 0 or len(segments) < 2:
        return list(segments)
    X = np.atleast_2d(np.asarray(features, float))
    d = X.shape[1]
    out = [Segment(s.start_frame, s.end_frame, s.start_s, s.end_s, s.short)
           for s in segments]
    for i in range(len(out) - 1):
        left, right = out[i], out[i + 1]
        if left.end_frame != right.start_frame:
            continue  # boundaries across silence are not refinable
        lo, hi = left.start_frame, right.end_frame
        W = X[lo:hi]
        b = left.end_frame
        c_lo = max(b - cfg.refine_radius_frames - lo, d + 1)
        c_hi = min(b + cfg.refine_radius_frames - lo, (hi - lo) - (d + 1))
        best_c, best_val = None, 0.0
        for c in range(c_lo, c_hi + 1):
            val = delta_bic(W, c, cfg.penalty_weight)
            if val > best_val:
                best_c, best_val = c, val
        if best_c is not None:
            new_b = lo + best_c
            left.end_frame = new_b
            left.end_s = _frame_to_s(new_b, hop_ms)
            right.start_frame = new_b
            right.start_s = left.end_s
    return out
