"""WAV file loading and frame-level energy measures."""

import struct

import numpy as np


class WavError(Exception):
    """Base class for WAV reading failures."""


class MalformedHeader(WavError):
    """The file is not a parseable RIFF/WAVE container."""


class UnsupportedFormat(WavError):
    """The file is valid RIFF/WAVE but uses an encoding we do not read."""


class AudioBuffer:
    """Immutable mono audio signal with a fixed sample rate.

    Samples are floats in [-1.0, 1.0]; time semantics are exact:
    duration_seconds = len(samples) / sample_rate_hz.
    """

    __slots__ = ("samples", "sample_rate_hz")

    def __init__(self, samples, sample_rate_hz):
        if sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional (mono)")
        samples.setflags(write=False)
        self.samples = samples
        self.sample_rate_hz = int(sample_rate_hz)

    def __len__(self):
        return len(self.samples)

    @property
    def duration_seconds(self):
        return len(self.samples) / self.sample_rate_hz


def _read_chunks(data):
    """Yield (chunk_id, payload) for every chunk after the RIFF header."""
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        payload = data[pos + 8:pos + 8 + size]
        yield cid, payload
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def load_wav(path):
    """Read a RIFF/WAVE file into an AudioBuffer.

    Accepts PCM 16-bit and IEEE-float 32-bit samples, 1 or 2 channels.
    16-bit integers are scaled by 1/32768; stereo is downmixed by the
    per-sample channel mean.
    """
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeader("not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, chunk in _read_chunks(data):
        if cid == b"fmt ":
            fmt = chunk
        elif cid == b"data":
            payload = chunk
        # unknown chunks (LIST, fact, ...) are ignored

    if fmt is None or len(fmt) < 16:
        raise MalformedHeader("missing or truncated 'fmt ' chunk")
    if payload is None:
        raise MalformedHeader("missing 'data' chunk")

    audio_format, n_channels, sample_rate, _, _, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if audio_format == 0xFFFE and len(fmt) >= 40:
        # WAVE_FORMAT_EXTENSIBLE: first two bytes of the SubFormat GUID
        (audio_format,) = struct.unpack_from("<H", fmt, 24)

    if audio_format not in (1, 3):
        raise UnsupportedFormat(
            f"compression code {audio_format} in chunk 'fmt ' (PCM/float only)"
        )
    if n_channels not in (1, 2):
        raise UnsupportedFormat(f"{n_channels} channels in chunk 'fmt ' (mono/stereo only)")

    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        raw = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedFormat(
            f"{bits}-bit samples with format code {audio_format} in chunk 'fmt '"
        )

    if n_channels == 2:
        raw = raw[: len(raw) // 2 * 2].reshape(-1, 2).mean(axis=1)
    return AudioBuffer(raw, sample_rate)


def write_wav(path, buffer):
    """Write an AudioBuffer as mono 16-bit PCM."""
    pcm = np.clip(np.round(np.asarray(buffer.samples) * 32768.0), -32768, 32767)
    pcm = pcm.astype("<i2").tobytes()
    sr = buffer.sample_rate_hz
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, 1, 1, sr, sr * 2, 2, 16,
        b"data", len(pcm),
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(pcm)


def rms(samples):
    """Root mean square of a non-empty amplitude sequence."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("rms of empty input is undefined")
    return float(np.sqrt(np.mean(samples * samples)))


def frame_rms(buffer, frame_len, hop):
    """Per-frame RMS over fixed-length frames.

    Frame t covers samples [t*hop, t*hop + frame_len); the trailing
    partial frame is discarded.  Returns an array of
    floor((len - frame_len)/hop) + 1 values.
    """
    x = buffer.samples if isinstance(buffer, AudioBuffer) else np.asarray(buffer, float)
    if x.size == 0:
        raise ValueError("empty signal")
    if frame_len > x.size:
        raise ValueError(f"frame_len {frame_len} exceeds signal length {x.size}")
    if hop < 1:
        raise ValueError("hop must be >= 1")
    n_frames = (x.size - frame_len) // hop + 1
    starts = np.arange(n_frames) * hop
    idx = starts[:, None] + np.arange(frame_len)[None, :]
    return np.sqrt(np.mean(x[idx] ** 2, axis=1))
