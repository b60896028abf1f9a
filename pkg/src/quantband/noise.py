"""Synthesis of 1/f^alpha Gaussian noise, optionally with spectral peaks.

The generator shapes a complex Gaussian spectrum in the frequency domain:
bin k gets amplitude f_k^(-alpha/2) (times the square root of the peak
multiplier when Gaussian peaks are requested), the DC bin is zeroed, the
Nyquist bin is forced real, and the result is inverse-transformed. The
output is zero-mean and peak-normalized to 1, so a full-scale range of 2
covers it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# Full-scale range that exactly covers a peak-normalized synthetic signal.
SYNTH_FULL_SCALE = 2.0


@dataclass(frozen=True, eq=False)
class Signal:
    """A uniformly sampled real-valued time series."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 2:
            raise ValidationError("signal must be a 1-D array with at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("signal contains non-finite samples")
        if not (self.sample_rate_hz > 0 and np.isfinite(self.sample_rate_hz)):
            raise ValidationError(f"sample rate must be positive, got {self.sample_rate_hz}")

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def nyquist_hz(self) -> float:
        return self.sample_rate_hz / 2.0

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz


@dataclass(frozen=True)
class PeakSpec:
    """A Gaussian spectral peak riding on the power-law background.

    The peak multiplies the target PSD by
    ``1 + amplitude_factor * exp(-(f - center_hz)^2 / (2 * width_hz^2))``.
    """

    center_hz: float
    width_hz: float
    amplitude_factor: float

    def validate(self, sample_rate_hz: float) -> None:
        nyquist = sample_rate_hz / 2.0
        if not (0.0 < self.center_hz < nyquist):
            raise ValidationError(
                f"peak center {self.center_hz} Hz must lie in (0, {nyquist}) Hz"
            )
        if not (self.width_hz > 0 and np.isfinite(self.width_hz)):
            raise ValidationError(f"peak width must be positive, got {self.width_hz}")
        if not (self.amplitude_factor >= 0 and np.isfinite(self.amplitude_factor)):
            raise ValidationError(
                f"peak amplitude factor must be >= 0, got {self.amplitude_factor}"
            )
        if self.center_hz + 3.0 * self.width_hz >= nyquist:
            raise ValidationError(
                f"peak at {self.center_hz} Hz with width {self.width_hz} Hz extends "
                f"past the Nyquist frequency {nyquist} Hz"
            )


@dataclass(frozen=True)
class SynthesisSpec:
    """Deterministic recipe for one synthetic 1/f^alpha signal."""

    alpha: float
    n_samples: int
    sample_rate_hz: float
    seed: int = 0
    peaks: tuple[PeakSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "peaks", tuple(self.peaks))
        if not (np.isfinite(self.alpha) and self.alpha >= 0):
            raise ValidationError(f"alpha must be finite and >= 0, got {self.alpha}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 16:
            raise ValidationError(f"n_samples must be an integer >= 16, got {self.n_samples}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        if not (self.sample_rate_hz > 0 and np.isfinite(self.sample_rate_hz)):
            raise ValidationError(f"sample rate must be positive, got {self.sample_rate_hz}")
        for peak in self.peaks:
            peak.validate(self.sample_rate_hz)


def _peak_multiplier(spec: SynthesisSpec, freqs: np.ndarray) -> np.ndarray:
    mult = np.ones_like(freqs)
    for peak in spec.peaks:
        mult += peak.amplitude_factor * np.exp(
            -((freqs - peak.center_hz) ** 2) / (2.0 * peak.width_hz**2)
        )
    return mult


def target_psd_shape(spec: SynthesisSpec, freqs: np.ndarray) -> np.ndarray:
    """Evaluate the synthesis target f^(-alpha) * peak multiplier.

    The result is defined up to a single global scale factor; only the
    shape is meaningful. Frequencies must be strictly positive and at
    most the Nyquist frequency.
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    if freqs.size == 0:
        raise ValidationError("no frequencies given")
    if not np.all(freqs > 0):
        raise ValidationError("frequencies must be strictly positive")
    if np.any(freqs > spec.sample_rate_hz / 2.0):
        raise ValidationError("frequencies must not exceed the Nyquist frequency")
    return freqs ** (-spec.alpha) * _peak_multiplier(spec, freqs)


def synthesize(spec: SynthesisSpec) -> Signal:
    """Generate a 1/f^alpha Gaussian signal from a synthesis spec.

    The same spec (including seed) always yields a bit-identical signal.
    The output is zero-mean with max |sample| = 1.
    """
    n = spec.n_samples
    rng = np.random.default_rng(spec.seed)

    freqs = np.fft.rfftfreq(n, d=1.0 / spec.sample_rate_hz)
    shape = np.zeros(freqs.size)
    shape[1:] = freqs[1:] ** (-spec.alpha / 2.0) * np.sqrt(
        _peak_multiplier(spec, freqs[1:])
    )

    re = rng.standard_normal(freqs.size)
    im = rng.standard_normal(freqs.size)
    spectrum = (re + 1j * im) * shape
    spectrum[0] = 0.0
    if n % 2 == 0:
        # Nyquist bin of an even-length real FFT must be real.
        spectrum[-1] = re[-1] * shape[-1]

    samples = np.fft.irfft(spectrum, n=n)
    samples -= samples.mean()
    samples /= np.max(np.abs(samples))
    return Signal(samples, spec.sample_rate_hz)
