"""Synthetic multi-speaker audio fixtures with known ground truth.

Each synthetic speaker is a harmonic source (a fundamental plus two
harmonics at speaker-specific frequencies) amplitude-modulated by seeded
noise, so different speakers have clearly distinct spectral envelopes
and the true speaker timeline is known by construction.
"""

import numpy as np

from .audio_io import AudioBuffer

GAP_S = 0.3
HARMONIC_AMPS = (1.0, 0.5, 0.25)


def speaker_wave(fundamental_hz, duration_s, sample_rate_hz, rng):
    """One turn of a synthetic voice: harmonic stack with a noisy envelope."""
    n = int(round(duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    wave = np.zeros(n)
    for k, amp in enumerate(HARMONIC_AMPS, start=1):
        phase = rng.uniform(0, 2 * np.pi)
        wave += amp * np.sin(2 * np.pi * k * fundamental_hz * t + phase)
    # slow random envelope in [0.6, 1.0]: ~25 ms smoothing of white noise
    envelope = rng.standard_normal(n)
    win = max(1, sample_rate_hz // 40)
    envelope = np.convolve(envelope, np.ones(win) / win, mode="same")
    span = envelope.max() - envelope.min()
    if span > 0:
        envelope = 0.6 + 0.4 * (envelope - envelope.min()) / span
    else:
        envelope = np.full(n, 0.8)
    wave *= envelope * (0.3 / sum(HARMONIC_AMPS))
    # short fade-in/out to avoid clicks at turn edges
    fade = min(n // 2, sample_rate_hz // 100)
    if fade:
        ramp = np.linspace(0.0, 1.0, fade)
        wave[:fade] *= ramp
        wave[-fade:] *= ramp[::-1]
    return wave


def synth_fixture(fundamentals_hz, turn_plan, sample_rate_hz=16000, seed=0,
                  gap_s=GAP_S):
    """Generate a multi-speaker recording and its reference timeline.

    `fundamentals_hz` lists one fundamental per speaker; `turn_plan` is a
    sequence of (speaker_index, duration_s) placed back to back with
    gap_s of silence between turns, or (speaker_index, start_s,
    duration_s) with explicit onsets.  Overlapping explicit turns are
    rejected.  Returns (AudioBuffer, timeline) where timeline entries
    are (start_s, end_s, "S<speaker_index>").
    """
    if not fundamentals_hz:
        raise ValueError("need at least one speaker")
    placed = []
    cursor = gap_s
    for turn in turn_plan:
        if len(turn) == 2:
            spk, dur = turn
            start = cursor
        else:
            spk, start, dur = turn
        if dur <= 0:
            raise ValueError("turn duration must be positive")
        if not 0 <= spk < len(fundamentals_hz):
            raise ValueError(f"unknown speaker index {spk}")
        placed.append((spk, float(start), float(dur)))
        cursor = start + dur + gap_s

    placed.sort(key=lambda p: p[1])
    for (_, s1, d1), (_, s2, _) in zip(placed, placed[1:]):
        if s2 < s1 + d1:
            raise ValueError("overlapping turn plan")

    rng = np.random.default_rng(seed)
    total_s = placed[-1][1] + placed[-1][2] + gap_s if placed else 1.0
    samples = np.zeros(int(round(total_s * sample_rate_hz)))
    timeline = []
    for spk, start, dur in placed:
        wave = speaker_wave(fundamentals_hz[spk], dur, sample_rate_hz, rng)
        i0 = int(round(start * sample_rate_hz))
        samples[i0:i0 + len(wave)] += wave
        timeline.append((start, start + dur, f"S{spk}"))
    return AudioBuffer(np.clip(samples, -1.0, 1.0), sample_rate_hz), timeline


def two_speaker_fixture(seed=0, n_turns=4, turn_s=4.7, sample_rate_hz=16000):
    """Alternating two-speaker fixture (~20 s for the defaults)."""
    plan = [(i % 2, turn_s) for i in range(n_turns)]
    return synth_fixture((120.0, 280.0), plan, sample_rate_hz, seed)
