import io

import numpy as np
import pytest

from gmmdiar import spectral
from gmmdiar.audio_io import AudioBuffer
from oracles import naive_dft


def tone(freq, duration=1.0, sr=16000, amp=0.5):
    t = np.arange(int(duration * sr)) / sr
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t), sr)


def test_frame_signal_unit_conversion():
    buf = AudioBuffer(np.zeros(16000), 16000)
    fm = spectral.frame_signal(buf, 25, 10)
    assert fm.frame_len == 400
    assert fm.hop == 160


def test_frame_signal_count():
    buf = AudioBuffer(np.zeros(16000), 16000)
    fm = spectral.frame_signal(buf, 25, 10)
    assert fm.n_frames == 98
    # index enumeration oracle
    assert fm.n_frames == len([s for s in range(0, 16000, 160) if s + 400 <= 16000])


def test_frame_signal_starts():
    buf = AudioBuffer(np.arange(100) / 100.0, 1000)
    fm = spectral.frame_signal(buf, 20, 10)
    for t in range(fm.n_frames):
        np.testing.assert_array_equal(fm.frames[t],
                                      buf.samples[t * fm.hop:t * fm.hop + 20])


def test_frame_signal_soft_bound_warns():
    buf = AudioBuffer(np.zeros(16000), 16000)
    with pytest.warns(UserWarning):
        fm = spectral.frame_signal(buf, 120, 50)
    assert fm.n_frames > 0


def test_frame_signal_rejects_bad_durations():
    buf = AudioBuffer(np.zeros(1600), 16000)
    with pytest.raises(ValueError):
        spectral.frame_signal(buf, 25, 30)  # hop > frame
    with pytest.raises(ValueError):
        spectral.frame_signal(buf, -5, 1)
    with pytest.raises(ValueError):
        spectral.frame_signal(AudioBuffer(np.zeros(10), 16000), 25, 10)


def test_hamming_endpoints_and_midpoint():
    w = spectral.hamming_window(11)
    assert w[0] == pytest.approx(0.08)
    assert w[10] == pytest.approx(0.08)
    assert w[5] == pytest.approx(1.0)


def test_hamming_symmetry():
    for n in (2, 5, 32, 401):
        w = spectral.hamming_window(n)
        np.testing.assert_allclose(w, w[::-1], rtol=0, atol=1e-15)


def test_hamming_too_short():
    with pytest.raises(ValueError):
        spectral.hamming_window(1)


def test_apply_window_identity_and_zero():
    fm = spectral.FrameMatrix(np.ones((3, 4)), 4, 2, 8000)
    same = spectral.apply_window(fm, np.ones(4))
    np.testing.assert_array_equal(same.frames, fm.frames)
    fm.frames[1] = 0.0
    out = spectral.apply_window(fm, spectral.hamming_window(4))
    assert np.all(out.frames[1] == 0.0)


def test_apply_window_hamming4_values():
    fm = spectral.FrameMatrix(np.ones((1, 4)), 4, 2, 8000)
    out = spectral.apply_window(fm, spectral.hamming_window(4))
    # w[1] = 0.54 - 0.46*cos(2*pi/3) = 0.77
    np.testing.assert_allclose(out.frames[0], [0.08, 0.77, 0.77, 0.08])


def test_apply_window_length_mismatch():
    fm = spectral.FrameMatrix(np.ones((1, 4)), 4, 2, 8000)
    with pytest.raises(ValueError):
        spectral.apply_window(fm, np.ones(5))


def test_real_dft_impulse():
    mag, _ = spectral.real_dft([1, 0, 0, 0, 0, 0, 0, 0], 8)
    np.testing.assert_allclose(mag, np.ones(5), atol=1e-12)


def test_real_dft_cosine_bin():
    x = np.cos(2 * np.pi * 2 * np.arange(8) / 8)
    mag, _ = spectral.real_dft(x, 8)
    expected = np.abs(naive_dft(x, 8))
    np.testing.assert_allclose(mag, expected, atol=1e-9)
    assert mag[2] == pytest.approx(4.0)
    assert np.all(np.delete(mag, 2) < 1e-9)


def test_real_dft_zero_frame():
    mag, _ = spectral.real_dft(np.zeros(16), 16)
    assert np.all(mag == 0)


def test_real_dft_matches_naive_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(2, 65))
        n_fft = spectral.next_pow2(n)
        x = rng.standard_normal(n)
        got_mag, got_phase = spectral.real_dft(x, n_fft)
        ref = naive_dft(x, n_fft)
        scale = max(1.0, np.abs(ref).max())
        np.testing.assert_allclose(got_mag, np.abs(ref), atol=1e-9 * scale)


def test_real_dft_linearity():
    rng = np.random.default_rng(8)
    x, y = rng.standard_normal(32), rng.standard_normal(32)
    a, b = 2.5, -1.25
    fx = np.fft.rfft(x, 32)
    fy = np.fft.rfft(y, 32)
    fz = np.fft.rfft(a * x + b * y, 32)
    np.testing.assert_allclose(fz, a * fx + b * fy, atol=1e-9)


def test_real_dft_contract_errors():
    with pytest.raises(ValueError):
        spectral.real_dft(np.zeros(8), 12)  # not a power of two
    with pytest.raises(ValueError):
        spectral.real_dft(np.zeros(16), 8)  # n_fft < frame


def test_stft_tone_peak_bin():
    spec = spectral.stft(tone(1000), 25, 10, 512)
    assert spec.bin_hz == pytest.approx(31.25)
    peaks = np.argmax(spec.power, axis=1)
    assert np.all(peaks == 32)


def test_stft_silence():
    spec = spectral.stft(AudioBuffer(np.zeros(16000), 16000))
    assert np.all(spec.power == 0.0)


def test_stft_shape_and_power():
    spec = spectral.stft(tone(440), 25, 10)
    assert spec.n_fft == 512
    assert spec.power.shape == (98, 257)
    np.testing.assert_allclose(spec.power, spec.magnitudes ** 2, rtol=1e-12)


def test_stft_parseval_every_frame():
    buf = tone(523.3, duration=0.3)
    fm = spectral.frame_signal(buf, 25, 10)
    windowed = spectral.apply_window(fm, spectral.hamming_window(fm.frame_len))
    spec = spectral.stft(buf, 25, 10)
    n_fft = spec.n_fft
    for t in range(spec.n_frames):
        time_energy = float(np.sum(windowed.frames[t] ** 2))
        m = spec.magnitudes[t]
        freq_energy = (m[0] ** 2 + m[-1] ** 2 + 2 * np.sum(m[1:-1] ** 2)) / n_fft
        assert freq_energy == pytest.approx(time_energy, rel=1e-6)


def test_spectrogram_csv_shape():
    spec = spectral.stft(tone(440, duration=0.1), 25, 10)
    sink = io.StringIO()
    spectral.spectrogram_csv(spec, sink)
    lines = sink.getvalue().strip().split("\n")
    assert lines[0].startswith("frame_index,time_s,bin_hz_0")
    assert len(lines) == spec.n_frames + 1
