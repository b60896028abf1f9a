"""PSD estimation, log-log slope fitting and empirical noise floors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .errors import ValidationError
from .noise import Signal

DEFAULT_SEGMENT_LEN = 4096
DEFAULT_OVERLAP = 0.5
MIN_FIT_BINS = 10
# Noise floors are read from the upper quarter of the frequency range.
FLOOR_BAND_FRACTION = 0.75


@dataclass(frozen=True, eq=False)
class Psd:
    """One-sided power spectral density on a positive frequency grid."""

    freqs_hz: np.ndarray
    power: np.ndarray
    df_hz: float

    def __post_init__(self):
        freqs = np.asarray(self.freqs_hz, dtype=np.float64)
        power = np.asarray(self.power, dtype=np.float64)
        object.__setattr__(self, "freqs_hz", freqs)
        object.__setattr__(self, "power", power)
        if freqs.size != power.size:
            raise ValidationError("frequency and power arrays differ in length")
        if freqs.size < 2 or freqs[0] <= 0 or np.any(np.diff(freqs) <= 0):
            raise ValidationError("frequencies must be strictly increasing and positive")
        if not np.all(np.isfinite(power)) or np.any(power < 0):
            raise ValidationError("power values must be finite and nonnegative")
        if not (self.df_hz > 0):
            raise ValidationError(f"bin width must be positive, got {self.df_hz}")

    @property
    def max_freq_hz(self) -> float:
        return float(self.freqs_hz[-1])


@dataclass(frozen=True)
class SpectralFit:
    """Least-squares line fit of log10 power against log10 frequency.

    ``slope`` estimates -alpha; ``intercept_log10`` is the log10 power
    density at 1 Hz, so the power-law coefficient is 10**intercept_log10.
    """

    slope: float
    intercept_log10: float
    fit_band_hz: tuple[float, float]
    rms_residual: float

    @property
    def alpha_hat(self) -> float:
        return -self.slope

    @property
    def s0_hat(self) -> float:
        return 10.0**self.intercept_log10


def welch_psd(
    signal: Signal,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    overlap_fraction: float = DEFAULT_OVERLAP,
) -> Psd:
    """Welch PSD with a Hann window, density scaling, DC bin dropped.

    Per-segment means are removed, so the estimate is invariant to the
    signal mean. The grid runs from one bin width up to the Nyquist
    frequency.
    """
    if segment_len > signal.n_samples:
        raise ValidationError(
            f"segment length {segment_len} exceeds signal length {signal.n_samples}"
        )
    if segment_len < 8:
        raise ValidationError(f"segment length too small: {segment_len}")
    if not 0 <= overlap_fraction < 1:
        raise ValidationError(f"overlap fraction must be in [0, 1), got {overlap_fraction}")
    freqs, power = scipy.signal.welch(
        signal.samples,
        fs=signal.sample_rate_hz,
        window="hann",
        nperseg=segment_len,
        noverlap=int(overlap_fraction * segment_len),
        detrend="constant",
        scaling="density",
    )
    df = float(freqs[1] - freqs[0])
    return Psd(freqs[1:], power[1:], df)


def default_fit_band(psd: Psd) -> tuple[float, float]:
    """Fit band [10 * df, f_max / 2], i.e. up to a quarter of the sample rate.

    The lower edge skips the poorly estimated first bins; the upper edge
    keeps clear of the roll-off near Nyquist.
    """
    return 10.0 * psd.df_hz, psd.max_freq_hz / 2.0


def fit_slope(psd: Psd, band_hz: tuple[float, float]) -> SpectralFit:
    """Ordinary least squares of log10(power) on log10(freq) within a band."""
    f_low, f_high = band_hz
    if not (0 < f_low < f_high):
        raise ValidationError(f"invalid fit band {band_hz}")
    mask = (psd.freqs_hz >= f_low) & (psd.freqs_hz <= f_high)
    n_bins = int(np.count_nonzero(mask))
    if n_bins < MIN_FIT_BINS:
        raise ValidationError(
            f"fit band {band_hz} contains {n_bins} bins, need at least {MIN_FIT_BINS}"
        )
    power = psd.power[mask]
    if np.any(power <= 0):
        raise ValidationError("fit band contains zero power bins")
    log_f = np.log10(psd.freqs_hz[mask])
    log_p = np.log10(power)
    slope, intercept = np.polyfit(log_f, log_p, 1)
    residual = log_p - (slope * log_f + intercept)
    return SpectralFit(
        slope=float(slope),
        intercept_log10=float(intercept),
        fit_band_hz=(float(f_low), float(f_high)),
        rms_residual=float(np.sqrt(np.mean(residual**2))),
    )


def empirical_noise_floor(psd: Psd) -> float:
    """Median power over the upper quarter of the frequency range."""
    if psd.freqs_hz.size < 8:
        raise ValidationError("PSD too short for a floor estimate (need >= 8 bins)")
    upper = psd.power[psd.freqs_hz >= FLOOR_BAND_FRACTION * psd.max_freq_hz]
    return float(np.median(upper))


def band_power(psd: Psd, f_low: float, f_high: float) -> float:
    """Trapezoidal integral of the PSD over [f_low, f_high]."""
    if not (0 < f_low < f_high):
        raise ValidationError(f"invalid band ({f_low}, {f_high})")
    if f_high > psd.max_freq_hz or f_low < psd.freqs_hz[0] - psd.df_hz:
        raise ValidationError(
            f"band ({f_low}, {f_high}) Hz outside PSD support "
            f"[{psd.freqs_hz[0]}, {psd.max_freq_hz}] Hz"
        )
    mask = (psd.freqs_hz >= f_low) & (psd.freqs_hz <= f_high)
    if np.count_nonzero(mask) < 2:
        raise ValidationError(f"band ({f_low}, {f_high}) Hz spans fewer than 2 bins")
    return float(np.trapezoid(psd.power[mask], psd.freqs_hz[mask]))
