"""Evaluation metrics: word error rate and diarization error rate."""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

FRAME_S = 0.01  # evaluation grid for DER
MAX_REF_SPEAKERS = 8  # exhaustive permutation mapping cap


@dataclass
class WerResult:
    rate: float
    substitutions: int
    insertions: int
    deletions: int


@dataclass
class DerResult:
    rate: float
    missed_s: float
    false_alarm_s: float
    confusion_s: float
    scored_speech_s: float


def tokenize(text):
    """Case-folded whitespace tokenization."""
    return text.lower().split()


def wer(reference, hypothesis):
    """Word error rate from a unit-cost Levenshtein alignment.

    Ties in the traceback prefer substitution over insertion over
    deletion.  The rate is (S + I + D) / len(reference) and can exceed 1.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    if not ref:
        raise ValueError("empty reference")
    nr, nh = len(ref), len(hyp)
    dp = np.zeros((nr + 1, nh + 1), dtype=np.int64)
    dp[:, 0] = np.arange(nr + 1)
    dp[0, :] = np.arange(nh + 1)
    for i in range(1, nr + 1):
        for j in range(1, nh + 1):
            sub = dp[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1])
            dp[i, j] = min(sub, dp[i, j - 1] + 1, dp[i - 1, j] + 1)

    subs = ins = dels = 0
    i, j = nr, nh
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i, j] == dp[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]):
            subs += ref[i - 1] != hyp[j - 1]
            i, j = i - 1, j - 1
        elif j > 0 and dp[i, j] == dp[i, j - 1] + 1:
            ins += 1
            j -= 1
        else:
            dels += 1
            i -= 1
    return WerResult((subs + ins + dels) / nr, subs, ins, dels)


def _frame_labels(entries, n_frames, label_ids):
    """Per-frame label id (-1 = no speech) from (start, end, label) entries."""
    out = np.full(n_frames, -1, dtype=np.int64)
    centers = (np.arange(n_frames) + 0.5) * FRAME_S
    for start, end, label in entries:
        out[(centers >= start) & (centers < end)] = label_ids[label]
    return out


def der(reference, hypothesis, collar_s=0.25):
    """Diarization error rate with boundary collars and optimal mapping.

    `reference` and `hypothesis` are sequences of (start_s, end_s,
    speaker_label).  Frames within collar_s of any reference boundary
    are excluded; hypothesis labels are mapped one-to-one onto
    reference labels by exhaustive permutation to maximize overlap.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    for start, end, _ in ref + hyp:
        if end <= start:
            raise ValueError("timeline entries must have end > start")
    ref_labels = sorted({lab for _, _, lab in ref})
    hyp_labels = sorted({lab for _, _, lab in hyp})
    if not ref_labels:
        raise ValueError("reference contains no speech")
    if len(ref_labels) > MAX_REF_SPEAKERS:
        raise ValueError(
            f"{len(ref_labels)} reference speakers exceed the "
            f"{MAX_REF_SPEAKERS}-speaker exhaustive-mapping cap"
        )

    t_max = max(end for _, end, _ in ref + hyp)
    n_frames = int(np.ceil(t_max / FRAME_S)) + 1
    r = _frame_labels(ref, n_frames, {l: i for i, l in enumerate(ref_labels)})
    h = _frame_labels(hyp, n_frames, {l: i for i, l in enumerate(hyp_labels)})

    centers = (np.arange(n_frames) + 0.5) * FRAME_S
    scored = np.ones(n_frames, dtype=bool)
    for start, end, _ in ref:
        scored &= np.abs(centers - start) > collar_s
        scored &= np.abs(centers - end) > collar_s

    r, h = r[scored], h[scored]
    ref_speech = r >= 0
    hyp_speech = h >= 0

    # optimal one-to-one mapping of hypothesis labels onto reference labels
    n_h = len(hyp_labels)
    slots = list(range(len(ref_labels))) + [-1] * max(0, n_h - len(ref_labels))
    both = ref_speech & hyp_speech
    h_both, r_both = h[both], r[both]
    best_overlap, best_map = -1, np.zeros(0, dtype=np.int64)
    for perm in set(permutations(slots, n_h)):
        mapping = np.array(perm, dtype=np.int64)
        overlap = int(np.count_nonzero(mapping[h_both] == r_both))
        if overlap > best_overlap:
            best_overlap, best_map = overlap, mapping

    missed = int(np.count_nonzero(ref_speech & ~hyp_speech))
    false_alarm = int(np.count_nonzero(hyp_speech & ~ref_speech))
    confusion = int(np.count_nonzero(best_map[h_both] != r_both)) if n_h else 0
    scored_speech = int(np.count_nonzero(ref_speech))
    if scored_speech == 0:
        raise ValueError("no scored reference speech (collar removed everything)")
    rate = (missed + false_alarm + confusion) / scored_speech
    return DerResult(rate, missed * FRAME_S, false_alarm * FRAME_S,
                     confusion * FRAME_S, scored_speech * FRAME_S)
