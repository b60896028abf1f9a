"""Cutoff-frequency scaling law, crossing detection and noise-color checks.

A 1/f^alpha signal quantized at N bits sinks below the flat quantization
noise floor at a cutoff frequency f_c(N); each extra bit multiplies that
cutoff by 2^(2/alpha). This module evaluates the closed-form cutoff,
detects the crossing on measured PSDs, and classifies whether the
quantization error itself is spectrally white.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoUsableBandError, ValidationError
from .noise import Signal, SYNTH_FULL_SCALE, SynthesisSpec, synthesize
from .quantizer import QuantizerConfig, error_signal, quantize
from .spectral import Psd, default_fit_band, fit_slope, welch_psd

# Crossing detector: moving-average width (bins) and required run length.
SMOOTH_WINDOW = 9
MIN_RUN = 5
# |slope| below this counts as white quantization noise.
WHITE_SLOPE_THRESHOLD = 0.1

FLOOR_THEORETICAL = "theoretical"
FLOOR_EMPIRICAL = "empirical"


@dataclass(frozen=True)
class CutoffEstimate:
    """An effective cutoff frequency and the noise floor that produced it."""

    f_c_hz: float
    floor_value: float
    floor_method: str
    exceeded_nyquist: bool


@dataclass(frozen=True)
class NoiseColorReport:
    """Spectral slope of the quantization error at one bit depth."""

    bits: int
    noise_slope: float
    is_white: bool


def scaling_ratio(alpha: float) -> float:
    """Bandwidth gained per additional bit: 2^(2/alpha)."""
    if not (alpha > 0 and np.isfinite(alpha)):
        raise ValidationError(f"scaling law undefined for alpha = {alpha}")
    return float(2.0 ** (2.0 / alpha))


def predicted_cutoff(
    alpha: float,
    s0: float,
    sample_rate_hz: float,
    cfg: QuantizerConfig,
) -> CutoffEstimate:
    """Closed-form cutoff (6 S_0 f_s / R^2)^(1/alpha) * 2^(2N/alpha).

    The value is returned even when it exceeds the Nyquist frequency;
    ``exceeded_nyquist`` flags that case.
    """
    if not (alpha > 0 and np.isfinite(alpha)):
        raise ValidationError(f"alpha must be positive, got {alpha}")
    if not (s0 > 0 and np.isfinite(s0)):
        raise ValidationError(f"S_0 must be positive, got {s0}")
    if not (sample_rate_hz > 0 and np.isfinite(sample_rate_hz)):
        raise ValidationError(f"sample rate must be positive, got {sample_rate_hz}")
    base = 6.0 * s0 * sample_rate_hz / cfg.full_scale**2
    f_c = base ** (1.0 / alpha) * 2.0 ** (2.0 * cfg.bits / alpha)
    if not np.isfinite(f_c):
        raise ValidationError(
            f"cutoff is not finite for alpha={alpha}, s0={s0}, bits={cfg.bits}"
        )
    floor = cfg.step**2 / (6.0 * sample_rate_hz)
    return CutoffEstimate(
        f_c_hz=float(f_c),
        floor_value=floor,
        floor_method=FLOOR_THEORETICAL,
        exceeded_nyquist=bool(f_c > sample_rate_hz / 2.0),
    )


def _smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; windows shrink at the edges."""
    kernel = np.ones(window)
    sums = np.convolve(values, kernel, mode="same")
    counts = np.convolve(np.ones_like(values), kernel, mode="same")
    return sums / counts


def detect_cutoff(
    psd: Psd,
    floor_value: float,
    floor_method: str = FLOOR_THEORETICAL,
    smooth_window: int = SMOOTH_WINDOW,
    min_run: int = MIN_RUN,
) -> CutoffEstimate:
    """Find the lowest frequency where the PSD sinks under a noise floor.

    log10 power is smoothed with a centered moving average, and the
    crossing must stay below the floor for ``min_run`` consecutive bins;
    the first bin of that run is reported. If the smoothed PSD never
    drops below the floor the Nyquist-end frequency is returned with
    ``exceeded_nyquist`` set. A floor above the entire PSD raises
    NoUsableBandError.
    """
    if not (floor_value > 0 and np.isfinite(floor_value)):
        raise ValidationError(f"floor must be positive, got {floor_value}")
    tiny = np.finfo(np.float64).tiny
    log_power = np.log10(np.maximum(psd.power, tiny))
    smoothed = _smooth(log_power, smooth_window)
    below = smoothed < np.log10(floor_value)

    if below.all():
        raise NoUsableBandError(
            f"noise floor {floor_value:.3e} lies above the entire PSD; no usable band"
        )

    if below.size >= min_run:
        run_lengths = np.convolve(below.astype(np.int64), np.ones(min_run, dtype=np.int64), mode="valid")
        starts = np.nonzero(run_lengths == min_run)[0]
        if starts.size:
            return CutoffEstimate(
                f_c_hz=float(psd.freqs_hz[starts[0]]),
                floor_value=float(floor_value),
                floor_method=floor_method,
                exceeded_nyquist=False,
            )

    return CutoffEstimate(
        f_c_hz=psd.max_freq_hz,
        floor_value=float(floor_value),
        floor_method=floor_method,
        exceeded_nyquist=True,
    )


def measure_noise_slope(
    signal: Signal,
    cfg: QuantizerConfig,
    white_threshold: float = WHITE_SLOPE_THRESHOLD,
    segment_len: int | None = None,
) -> NoiseColorReport:
    """Quantize, extract e[n], and fit the slope of its PSD.

    The error is white when |slope| stays below ``white_threshold``.
    """
    quantized = quantize(signal, cfg)
    err = error_signal(signal, quantized)
    if segment_len is None:
        segment_len = min(4096, err.n_samples)
    psd = welch_psd(err, segment_len)
    fit = fit_slope(psd, default_fit_band(psd))
    return NoiseColorReport(
        bits=cfg.bits,
        noise_slope=fit.slope,
        is_white=bool(abs(fit.slope) < white_threshold),
    )


def mean_noise_slope(
    alpha: float,
    bits: int,
    trials: int,
    master_seed: int,
    n_samples: int = 100_000,
    sample_rate_hz: float = 2000.0,
) -> float:
    """Mean quantization-noise slope over independent trials.

    Trial i uses seed master_seed + i, so results do not depend on
    execution order.
    """
    cfg = QuantizerConfig(bits=bits, full_scale=SYNTH_FULL_SCALE)
    slopes = []
    for i in range(trials):
        spec = SynthesisSpec(alpha, n_samples, sample_rate_hz, seed=master_seed + i)
        slopes.append(measure_noise_slope(synthesize(spec), cfg).noise_slope)
    return float(np.mean(slopes))


def find_n_min(
    alpha: float,
    bit_range: tuple[int, int],
    trials: int,
    master_seed: int,
    n_samples: int = 100_000,
    sample_rate_hz: float = 2000.0,
    white_threshold: float = WHITE_SLOPE_THRESHOLD,
) -> int | None:
    """Smallest bit depth in range whose mean noise slope is white.

    Whiteness is decided on the mean slope across trials. Returns None
    when no bit depth in the range qualifies.
    """
    n_lo, n_hi = bit_range
    if n_lo > n_hi:
        raise ValidationError(f"empty bit range {bit_range}")
    signals = [
        synthesize(SynthesisSpec(alpha, n_samples, sample_rate_hz, seed=master_seed + i))
        for i in range(trials)
    ]
    for bits in range(n_lo, n_hi + 1):
        cfg = QuantizerConfig(bits=bits, full_scale=SYNTH_FULL_SCALE)
        slopes = [measure_noise_slope(sig, cfg).noise_slope for sig in signals]
        if abs(float(np.mean(slopes))) < white_threshold:
            return bits
    return None
