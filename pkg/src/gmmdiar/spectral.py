"""Framing, windowing, Fourier analysis, and spectrogram construction."""

import warnings
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer


@dataclass
class FrameMatrix:
    """Stacked signal frames; frame t starts at sample t*hop."""

    frames: np.ndarray  # (n_frames, frame_len)
    frame_len: int
    hop: int
    sample_rate_hz: int

    @property
    def n_frames(self):
        return self.frames.shape[0]


@dataclass
class Spectrogram:
    """One-sided STFT: power, magnitude and phase per frame and bin."""

    power: np.ndarray       # (n_frames, n_bins), magnitude**2
    magnitudes: np.ndarray
    phases: np.ndarray      # informational; unused downstream
    n_fft: int
    sample_rate_hz: int
    hop: int

    @property
    def bin_hz(self):
        return self.sample_rate_hz / self.n_fft

    @property
    def n_frames(self):
        return self.power.shape[0]

    @property
    def n_bins(self):
        return self.power.shape[1]


def frame_signal(buffer, frame_ms, hop_ms):
    """Slice a signal into overlapping raw (unwindowed) frames.

    Durations are milliseconds; typical frame lengths are 10-100 ms and
    values outside that range only warn.
    """
    if frame_ms <= 0 or hop_ms <= 0:
        raise ValueError("frame_ms and hop_ms must be positive")
    if hop_ms > frame_ms:
        raise ValueError("hop_ms must not exceed frame_ms (frames must overlap or tile)")
    if not 10 <= frame_ms <= 100:
        warnings.warn(f"frame_ms={frame_ms} outside the typical 10-100 ms range")
    sr = buffer.sample_rate_hz
    frame_len = round(frame_ms * sr / 1000)
    hop = round(hop_ms * sr / 1000)
    x = buffer.samples
    if frame_len > x.size:
        raise ValueError("frame longer than signal")
    n_frames = (x.size - frame_len) // hop + 1
    idx = (np.arange(n_frames) * hop)[:, None] + np.arange(frame_len)[None, :]
    return FrameMatrix(x[idx].copy(), frame_len, hop, sr)


def hamming_window(n):
    """Symmetric Hamming window: w[i] = 0.54 - 0.46*cos(2*pi*i/(n-1))."""
    if n < 2:
        raise ValueError("window length must be >= 2")
    i = np.arange(n)
    return 0.54 - 0.46 * np.cos(2 * np.pi * i / (n - 1))


def apply_window(frames, window):
    """Multiply every frame by the window coefficients."""
    window = np.asarray(window, float)
    if window.size != frames.frame_len:
        raise ValueError(
            f"window length {window.size} != frame_len {frames.frame_len}"
        )
    return FrameMatrix(
        frames.frames * window[None, :], frames.frame_len, frames.hop,
        frames.sample_rate_hz,
    )


def _check_n_fft(n_fft, frame_len):
    if n_fft < 1 or n_fft & (n_fft - 1):
        raise ValueError(f"n_fft={n_fft} is not a power of two")
    if n_fft < frame_len:
        raise ValueError(f"n_fft={n_fft} shorter than frame length {frame_len}")


def real_dft(frame, n_fft):
    """One-sided DFT of a real frame zero-padded to n_fft.

    Returns (magnitudes, phases) for bins 0..n_fft/2.
    """
    frame = np.asarray(frame, float)
    _check_n_fft(n_fft, frame.size)
    spec = np.fft.rfft(frame, n=n_fft)
    return np.abs(spec), np.angle(spec)


def next_pow2(n):
    p = 1
    while p < n:
        p *= 2
    return p


def stft(buffer, frame_ms=25.0, hop_ms=10.0, n_fft=None):
    """Short-time Fourier transform: frame, Hamming-window, transform.

    n_fft defaults to the smallest power of two >= frame length.
    """
    frames = frame_signal(buffer, frame_ms, hop_ms)
    if n_fft is None:
        n_fft = next_pow2(frames.frame_len)
    _check_n_fft(n_fft, frames.frame_len)
    windowed = apply_window(frames, hamming_window(frames.frame_len))
    spec = np.fft.rfft(windowed.frames, n=n_fft, axis=1)
    mag = np.abs(spec)
    return Spectrogram(
        power=mag * mag,
        magnitudes=mag,
        phases=np.angle(spec),
        n_fft=n_fft,
        sample_rate_hz=buffer.sample_rate_hz,
        hop=frames.hop,
    )


def spectrogram_csv(spec, sink):
    """Write the power matrix as CSV: frame_index,time_s,bin_hz_0,..."""
    hop_s = spec.hop / spec.sample_rate_hz
    header = "frame_index,time_s," + ",".join(
        f"bin_hz_{spec.bin_hz * k:g}" for k in range(spec.n_bins)
    )
    sink.write(header + "\n")
    for t in range(spec.n_frames):
        row = ",".join(repr(v) for v in spec.power[t])
        sink.write(f"{t},{t * hop_s:.6f},{row}\n")
