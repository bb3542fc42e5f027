"""MFCC extraction: mel filterbank, log energies, DCT, and delta features."""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .spectral import stft

LOG_FLOOR = 1e-10  # applied before the log so digital silence stays finite


def hz_to_mel(f):
    """Map frequency in Hz to the mel scale: 2595*log10(1 + f/700)."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("negative frequency")
    out = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(m):
    """Inverse of hz_to_mel."""
    m = np.asarray(m, dtype=float)
    out = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class MelFilterbank:
    """Triangular filters equally spaced on the mel scale, peak 1.0."""

    weights: np.ndarray          # (n_filters, n_bins)
    edge_freqs_hz: np.ndarray    # n_filters + 2 edge frequencies
    n_filters: int


@dataclass
class FeatureMatrix:
    """Per-frame feature vectors with frame timing metadata."""

    vectors: np.ndarray        # (n_frames, dim)
    frame_times_s: np.ndarray  # frame start times, step hop_ms/1000
    frame_ms: float
    hop_ms: float
    source: str = ""

    @property
    def n_frames(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[1]


def build_filterbank(n_filters, n_fft, sample_rate_hz, f_min=0.0, f_max=None):
    """Construct a mel filterbank over the one-sided FFT bins.

    Edges are uniform in mel between f_min and f_max, snapped to bins by
    k = floor((n_fft+1)*f/sample_rate_hz).  Each triangle peaks at 1.0 at
    its center bin; filter j's center bin is filter j+1's left edge.
    """
    if f_max is None:
        f_max = sample_rate_hz / 2
    if not 0 <= f_min < f_max:
        raise ValueError("need 0 <= f_min < f_max")
    if f_max > sample_rate_hz / 2:
        raise ValueError(f"f_max={f_max} exceeds Nyquist {sample_rate_hz / 2}")
    if n_filters < 2:
        raise ValueError("n_filters must be >= 2")

    mels = np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_filters + 2)
    freqs = mel_to_hz(mels)
    bins = np.floor((n_fft + 1) * freqs / sample_rate_hz).astype(int)
    if np.any(np.diff(bins) < 1):
        raise ValueError(
            "adjacent filter edges collapse to the same bin; "
            "reduce n_filters or increase n_fft"
        )

    n_bins = n_fft // 2 + 1
    weights = np.zeros((n_filters, n_bins))
    for j in range(n_filters):
        left, center, right = bins[j], bins[j + 1], bins[j + 2]
        for k in range(left, center):
            weights[j, k] = (k - left) / (center - left)
        for k in range(center, min(right, n_bins - 1) + 1):
            weights[j, k] = (right - k) / (right - center)
    return MelFilterbank(weights, freqs, n_filters)


def log_mel_energies(spec, fb):
    """Natural log of mel-filtered power per frame, floored at LOG_FLOOR."""
    if fb.weights.shape[1] != spec.n_bins:
        raise ValueError(
            f"filterbank bins {fb.weights.shape[1]} != spectrogram bins {spec.n_bins}"
        )
    energies = spec.power @ fb.weights.T
    return np.log(np.maximum(energies, LOG_FLOOR))


def dct_ii(values, n_out):
    """Orthonormal DCT-II, truncated to the first n_out coefficients."""
    values = np.asarray(values, float)
    n = values.shape[-1]
    if n_out > n:
        raise ValueError(f"n_out={n_out} exceeds input length {n}")
    return scipy.fft.dct(values, type=2, norm="ortho", axis=-1)[..., :n_out]


def mfcc(buffer, frame_ms=25.0, hop_ms=10.0, n_fft=None, n_filters=26,
         n_coeffs=13, f_min=0.0, f_max=None, source=""):
    """Mel-frequency cepstral coefficients of an AudioBuffer."""
    spec = stft(buffer, frame_ms, hop_ms, n_fft)
    fb = build_filterbank(n_filters, spec.n_fft, buffer.sample_rate_hz,
                          f_min, f_max)
    coeffs = dct_ii(log_mel_energies(spec, fb), n_coeffs)
    times = np.arange(coeffs.shape[0]) * (hop_ms / 1000.0)
    return FeatureMatrix(coeffs, times, frame_ms, hop_ms, source)


def _delta_array(x, width):
    """Regression delta with edge replication.

    d[t] = sum_{m=1..M} m*(x[t+m] - x[t-m]) / (2*sum m^2)
    """
    if width < 1:
        raise ValueError("delta width must be >= 1")
    x = np.asarray(x, float)
    t_max = x.shape[0]
    denom = 2.0 * sum(m * m for m in range(1, width + 1))
    out = np.zeros_like(x)
    for m in range(1, width + 1):
        fwd = np.clip(np.arange(t_max) + m, 0, t_max - 1)
        back = np.clip(np.arange(t_max) - m, 0, t_max - 1)
        out += m * (x[fwd] - x[back])
    return out / denom


def delta(features, width=2):
    """First temporal derivative of a FeatureMatrix (same shape)."""
    return FeatureMatrix(
        _delta_array(features.vectors, width), features.frame_times_s,
        features.frame_ms, features.hop_ms, features.source,
    )


def stack_deltas(features, width=2):
    """Concatenate [x, delta(x), delta(delta(x))] per frame."""
    d1 = _delta_array(features.vectors, width)
    d2 = _delta_array(d1, width)
    return FeatureMatrix(
        np.hstack([features.vectors, d1, d2]), features.frame_times_s,
        features.frame_ms, features.hop_ms, features.source,
    )


def features_csv(features, sink):
    """Write features as CSV: frame_index,time_s,c0..cN."""
    header = "frame_index,time_s," + ",".join(
        f"c{i}" for i in range(features.dim)
    )
    sink.write(header + "\n")
    for t in range(features.n_frames):
        row = ",".join(repr(v) for v in features.vectors[t])
        sink.write(f"{t},{features.frame_times_s[t]:.6f},{row}\n")
