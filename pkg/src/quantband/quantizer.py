"""Uniform mid-rise quantization and quantization-error extraction.

The quantizer has 2^N reconstruction levels at +/-(k + 1/2) * delta with
delta = R / 2^N, no level at zero, nearest-level rounding (ties at cell
boundaries round toward the upper cell) and saturation to the outermost
level outside [-R/2, R/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .noise import Signal

MAX_BITS = 24


@dataclass(frozen=True)
class QuantizerConfig:
    """Bit depth and full-scale range of a uniform quantizer."""

    bits: int
    full_scale: float

    def __post_init__(self):
        if int(self.bits) != self.bits or not (1 <= self.bits <= MAX_BITS):
            raise ValidationError(f"bits must be an integer in [1, {MAX_BITS}], got {self.bits}")
        object.__setattr__(self, "bits", int(self.bits))
        if not (self.full_scale > 0 and np.isfinite(self.full_scale)):
            raise ValidationError(f"full-scale range must be positive, got {self.full_scale}")

    @property
    def step(self) -> float:
        """Quantization step delta = R / 2^N."""
        return self.full_scale / 2**self.bits


def quantize_values(values: np.ndarray, cfg: QuantizerConfig) -> np.ndarray:
    """Map each value to its nearest mid-rise reconstruction level."""
    values = np.asarray(values, dtype=np.float64)
    half_levels = 2 ** (cfg.bits - 1)
    idx = np.floor(values / cfg.step)
    np.clip(idx, -half_levels, half_levels - 1, out=idx)
    return (idx + 0.5) * cfg.step


def quantize(signal: Signal, cfg: QuantizerConfig) -> Signal:
    """Quantize a signal; sample rate is unchanged."""
    return Signal(quantize_values(signal.samples, cfg), signal.sample_rate_hz)


def saturation_count(signal: Signal, cfg: QuantizerConfig) -> int:
    """Number of samples strictly outside [-R/2, R/2]."""
    return int(np.count_nonzero(np.abs(signal.samples) > cfg.full_scale / 2.0))


def error_signal(original: Signal, quantized: Signal) -> Signal:
    """Quantization error e[n] = x_q[n] - x[n]."""
    if original.n_samples != quantized.n_samples:
        raise ValidationError(
            f"length mismatch: {original.n_samples} vs {quantized.n_samples}"
        )
    if original.sample_rate_hz != quantized.sample_rate_hz:
        raise ValidationError(
            f"sample rate mismatch: {original.sample_rate_hz} vs {quantized.sample_rate_hz}"
        )
    return Signal(quantized.samples - original.samples, original.sample_rate_hz)


def theoretical_noise_floor(cfg: QuantizerConfig, sample_rate_hz: float) -> float:
    """One-sided quantization noise PSD delta^2 / (6 * f_s) under the white model."""
    if not (sample_rate_hz > 0 and np.isfinite(sample_rate_hz)):
        raise ValidationError(f"sample rate must be positive, got {sample_rate_hz}")
    return cfg.step**2 / (6.0 * sample_rate_hz)
