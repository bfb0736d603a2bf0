"""Continuous-signal frontend: turning signals into classed events.

Hosts peak extraction (the event detector used by the demos), the frame
energy / envelope feature extractors, a composed-sine test-signal
generator, and the thresholded windowed-synchronization score.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import peak_prominences

from .errors import ConfigError, ZeroOccurrencesError

__all__ = [
    "Signal",
    "PeakDetectorConfig",
    "ComposedSignalConfig",
    "detect_peaks",
    "rms_energy",
    "envelope",
    "synth_composed",
    "threshold_sync_score",
]


@dataclass(frozen=True)
class Signal:
    """A sampled continuous signal; ``rate`` in samples per second."""

    samples: np.ndarray
    rate: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ConfigError("signal samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("signal contains non-finite values")
        if self.rate <= 0:
            raise ConfigError("sample rate must be positive")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class PeakDetectorConfig:
    min_prominence: float = 0.0
    min_separation: int = 1

    def __post_init__(self):
        if self.min_prominence < 0:
            raise ConfigError("min_prominence must be >= 0")
        if self.min_separation < 1:
            raise ConfigError("min_separation must be >= 1")


def detect_peaks(signal: Signal, config: PeakDetectorConfig) -> np.ndarray:
    """Indices of strict local maxima, prominence-filtered and thinned.

    Thinning is greedy: candidates are visited from highest to lowest
    (earlier index first among equal heights) and kept only when at least
    ``min_separation`` samples from every already kept peak.
    """
    x = signal.samples
    if x.size == 0:
        raise ConfigError("cannot detect peaks in an empty signal")
    if x.size < 3:
        return np.empty(0, dtype=np.int64)
    interior = (x[1:-1] > x[:-2]) & (x[1:-1] > x[2:])
    candidates = np.flatnonzero(interior) + 1
    if candidates.size and config.min_prominence > 0:
        prom = peak_prominences(x, candidates)[0]
        candidates = candidates[prom >= config.min_prominence]
    if candidates.size == 0:
        return np.empty(0, dtype=np.int64)
    order = np.lexsort((candidates, -x[candidates]))
    kept: list[int] = []
    for idx in candidates[order]:
        if all(abs(int(idx) - k) >= config.min_separation for k in kept):
            kept.append(int(idx))
    kept.sort()
    return np.asarray(kept, dtype=np.int64)


def rms_energy(signal: Signal, frame_len: int) -> Signal:
    """Per-frame root-mean-square energy over non-overlapping frames.

    The trailing partial frame is dropped; the output rate is the frame
    rate.
    """
    if frame_len < 1:
        raise ConfigError("frame_len must be >= 1")
    x = signal.samples
    n_frames = x.size // frame_len
    frames = x[:n_frames * frame_len].reshape(n_frames, frame_len)
    return Signal(np.sqrt(np.mean(frames * frames, axis=1)),
                  rate=signal.rate / frame_len)


def envelope(energy: Signal, window: int) -> Signal:
    """Sliding maximum over a trailing window of ``window`` frames."""
    if window < 1:
        raise ConfigError("window must be >= 1")
    x = energy.samples
    if x.size == 0 or window == 1:
        return Signal(x, rate=energy.rate)
    padded = np.concatenate((np.full(window - 1, -np.inf), x))
    view = np.lib.stride_tricks.sliding_window_view(padded, window)
    return Signal(view.max(axis=1), rate=energy.rate)


@dataclass(frozen=True)
class ComposedSignalConfig:
    """Composed-sine test signal: a dominant constant-frequency sine, a
    smaller sine whose frequency falls linearly, and smoothed noise.

    Frequencies are in cycles per sample.  Defaults give a dominant
    50-sample period so peak trains of the composite follow the dominant
    component.
    """

    n_samples: int = 2000
    rate: float = 100.0
    main_amp: float = 1.0
    main_freq: float = 1.0 / 50.0
    main_phase: float = 0.37       # avoids exact sample ties at the crest
    minor_amp: float = 0.2
    minor_freq_start: float = 0.055
    minor_freq_end: float = 0.018
    noise_amp: float = 0.35
    noise_smooth: int = 11
    seed: int = 7


def synth_composed(config: ComposedSignalConfig = ComposedSignalConfig()
                   ) -> tuple[Signal, dict[str, Signal]]:
    """Deterministic composed signal and its three components.

    Returns the composite (pointwise sum) and a dict with ``main``,
    ``minor`` and ``noise`` components for independent peak extraction.
    """
    n = config.n_samples
    t = np.arange(n, dtype=np.float64)
    main = config.main_amp * np.sin(2.0 * np.pi * config.main_freq * t
                                    + config.main_phase)
    # Linear sweep from minor_freq_start to minor_freq_end over the signal.
    sweep = (config.minor_freq_start * t
             + (config.minor_freq_end - config.minor_freq_start)
             * t * t / (2.0 * max(n - 1, 1)))
    minor = config.minor_amp * np.sin(2.0 * np.pi * sweep)
    rng = np.random.default_rng(config.seed)
    noise = config.noise_amp * rng.standard_normal(n)
    if config.noise_smooth > 1:
        kernel = np.ones(config.noise_smooth) / config.noise_smooth
        noise = np.convolve(noise, kernel, mode="same")
    composite = main + minor + noise
    rate = config.rate
    return (Signal(composite, rate),
            {"main": Signal(main, rate),
             "minor": Signal(minor, rate),
             "noise": Signal(noise, rate)})


def threshold_sync_score(per_window_s: Sequence[float], y: int) -> float:
    """Share of windows with any synchronization, per occurrence count.

    Counts windows whose pairwise value is strictly positive and divides
    by ``y`` (the number of relevant occurrences), so zero at the
    threshold contributes nothing.
    """
    if y <= 0:
        raise ZeroOccurrencesError("occurrence count must be positive")
    s = np.asarray(per_window_s, dtype=np.float64)
    return float(np.count_nonzero(s > 0.0) / y)
