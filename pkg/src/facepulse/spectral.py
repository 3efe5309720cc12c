"""Windowed spectral heart-rate estimation.

The conditioned pulse signal is cut into fixed-length windows; each
window's dominant in-band frequency (Hann-windowed, zero-padded DFT,
quadratic peak refinement) becomes one bpm estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyBandError,
    EmptySeriesError,
    InputError,
    SessionTooShortError,
)
from .pulse import DEFAULT_BAND, BandLimits, PulseSignal

ZERO_PAD_FACTOR = 8


@dataclass(frozen=True)
class WindowSpec:
    """Window length and hop in seconds; hop defaults to the length
    (non-overlapping windows)."""

    length: float
    hop: float | None = None

    def __post_init__(self):
        hop = self.length if self.hop is None else self.hop
        object.__setattr__(self, "hop", hop)
        if self.length <= 0:
            raise InputError(f"window length must be positive, got {self.length}")
        if not 0 < hop <= self.length:
            raise InputError(f"hop must satisfy 0 < hop <= length, got {hop}")


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray
    power: np.ndarray


@dataclass(frozen=True)
class HrEstimate:
    window_start: float
    window_end: float
    bpm: float


@dataclass(frozen=True)
class HrSeries:
    estimates: tuple[HrEstimate, ...]
    window_spec: WindowSpec

    def __len__(self) -> int:
        return len(self.estimates)

    @property
    def bpm_values(self) -> np.ndarray:
        return np.array([e.bpm for e in self.estimates])

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return [(e.window_start, e.window_end) for e in self.estimates]


def partition_windows(n_samples: int, fps: float, spec: WindowSpec) -> list[tuple[int, int]]:
    """Start/end sample indices of every full window; trailing partial
    samples are discarded.  Raises SessionTooShortError if no window fits."""
    win = int(round(spec.length * fps))
    hop = int(round(spec.hop * fps))
    if win < 2:
        raise InputError(f"window of {win} samples ({spec.length} s at {fps} fps) too short")
    if hop < 1:
        raise InputError(f"hop of {spec.hop} s is below one sample at {fps} fps")
    if n_samples < win:
        raise SessionTooShortError(
            f"{n_samples} samples cannot fit one {win}-sample window")
    return [(k * hop, k * hop + win) for k in range((n_samples - win) // hop + 1)]


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def periodogram(samples: np.ndarray, fps: float) -> Spectrum:
    """Hann-windowed, zero-padded magnitude-squared DFT.

    The segment mean is removed before windowing so a flat input has no
    off-DC leakage; padding to 8x the next power of two gives a bin
    spacing of fps / padded_length Hz.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < 2:
        raise InputError(f"periodogram needs at least 2 samples, got {n}")
    windowed = (samples - samples.mean()) * np.hanning(n)
    padded = ZERO_PAD_FACTOR * _next_pow2(n)
    spectrum = np.fft.rfft(windowed, padded)
    return Spectrum(
        freqs=np.fft.rfftfreq(padded, 1.0 / fps),
        power=np.abs(spectrum) ** 2,
    )


def peak_bpm(spectrum: Spectrum, band: BandLimits = DEFAULT_BAND) -> float:
    """Dominant in-band frequency as bpm.

    Argmax of power over [f_lo, f_hi] (ties resolve to the lower
    frequency), refined by a quadratic fit through the peak bin and its
    neighbours, clamped back to the band.
    """
    freqs, power = spectrum.freqs, spectrum.power
    in_band = np.flatnonzero((freqs >= band.f_lo) & (freqs <= band.f_hi))
    if in_band.size == 0:
        raise EmptyBandError(
            f"no spectrum bins inside {band.f_lo}..{band.f_hi} Hz")
    k = in_band[np.argmax(power[in_band])]
    f_peak = freqs[k]
    if 0 < k < len(power) - 1:
        p_lo, p0, p_hi = power[k - 1], power[k], power[k + 1]
        denom = p_lo - 2.0 * p0 + p_hi
        if denom != 0.0:
            shift = 0.5 * (p_lo - p_hi) / denom
            f_peak += np.clip(shift, -0.5, 0.5) * (freqs[1] - freqs[0])
    return float(np.clip(60.0 * f_peak, band.bpm_lo, band.bpm_hi))


def estimate_series(signal: PulseSignal, spec: WindowSpec,
                    band: BandLimits = DEFAULT_BAND) -> HrSeries:
    """One bpm estimate per window of an already-conditioned pulse signal."""
    min_len = 2.0 / band.f_lo
    if spec.length < min_len:
        raise InputError(
            f"window of {spec.length} s holds fewer than two cycles at "
            f"{band.f_lo} Hz; need at least {min_len:.2f} s")
    windows = partition_windows(len(signal), signal.fps, spec)
    estimates = tuple(
        HrEstimate(
            window_start=start / signal.fps,
            window_end=end / signal.fps,
            bpm=peak_bpm(periodogram(signal.samples[start:end], signal.fps), band),
        )
        for start, end in windows
    )
    return HrSeries(estimates=estimates, window_spec=spec)


def session_mean(series: HrSeries) -> float:
    """Arithmetic mean of all window estimates."""
    if len(series) == 0:
        raise EmptySeriesError("heart-rate series has no estimates")
    return float(series.bpm_values.mean())
