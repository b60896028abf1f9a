"""End-to-end experiment runners and their report types.

Each runner is deterministic under a fixed master seed: trial i always
uses seed master_seed + i, and aggregation does not depend on execution
order. Set QUANTBAND_THREADS > 1 to run trials on a thread pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoMeasurableBandError, NoUsableBandError, ValidationError
from .noise import PeakSpec, Signal, SYNTH_FULL_SCALE, SynthesisSpec, synthesize
from .quantizer import (
    QuantizerConfig,
    error_signal,
    quantize,
    saturation_count,
    theoretical_noise_floor,
)
from .scaling import (
    FLOOR_EMPIRICAL,
    FLOOR_THEORETICAL,
    WHITE_SLOPE_THRESHOLD,
    CutoffEstimate,
    detect_cutoff,
    measure_noise_slope,
    predicted_cutoff,
    scaling_ratio,
)
from .spectral import (
    DEFAULT_SEGMENT_LEN,
    band_power,
    default_fit_band,
    empirical_noise_floor,
    fit_slope,
    welch_psd,
)

DEFAULT_SEED = 1234

# Conventional EEG band edges; Gamma runs up to the Nyquist frequency.
BAND_EDGES = (
    ("delta", 0.5, 4.0),
    ("theta", 4.0, 8.0),
    ("alpha", 8.0, 13.0),
    ("beta", 13.0, 30.0),
)
GAMMA_LOW_HZ = 30.0
# A band power ratio in this range counts as preserved.
PRESERVED_RANGE = (0.8, 1.2)


def standard_bands(nyquist_hz: float) -> list[tuple[str, float, float]]:
    """Delta through Gamma band edges for a given Nyquist frequency."""
    if nyquist_hz <= GAMMA_LOW_HZ:
        raise ValidationError(
            f"Nyquist frequency {nyquist_hz} Hz leaves no room for a Gamma band"
        )
    return [*BAND_EDGES, ("gamma", GAMMA_LOW_HZ, nyquist_hz)]


def _max_workers() -> int:
    raw = os.environ.get("QUANTBAND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_trials(fn, n_trials: int) -> list:
    """Evaluate fn(trial_index) for every trial, preserving index order."""
    workers = _max_workers()
    if workers == 1:
        return [fn(i) for i in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_trials)))


@dataclass(frozen=True)
class ValidationConfig:
    """Configuration of a scaling-law validation run."""

    alpha: float
    sample_rate_hz: float
    n_samples: int
    bit_range: tuple[int, int]
    trials: int
    master_seed: int = DEFAULT_SEED
    floor_method: str = FLOOR_THEORETICAL
    peaks: tuple[PeakSpec, ...] = field(default_factory=tuple)
    segment_len: int = DEFAULT_SEGMENT_LEN

    def __post_init__(self):
        object.__setattr__(self, "bit_range", (int(self.bit_range[0]), int(self.bit_range[1])))
        object.__setattr__(self, "peaks", tuple(self.peaks))
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        n_lo, n_hi = self.bit_range
        if n_lo < 1 or n_lo > n_hi:
            raise ValidationError(f"invalid bit range {self.bit_range}")
        if self.floor_method not in (FLOOR_THEORETICAL, FLOOR_EMPIRICAL):
            raise ValidationError(f"unknown floor method {self.floor_method!r}")

    @property
    def bits(self) -> list[int]:
        return list(range(self.bit_range[0], self.bit_range[1] + 1))


@dataclass(frozen=True)
class BitCutoffStats:
    """Detected cutoffs at one bit depth, aggregated over trials."""

    bits: int
    mean_f_c_hz: float | None
    std_f_c_hz: float | None
    valid_trials: int
    excluded: bool


@dataclass(frozen=True)
class StepRatio:
    """Measured cutoff ratio between two consecutive bit depths."""

    bits_low: int
    bits_high: int
    mean_ratio: float
    std_ratio: float
    n_trials: int
    rel_error: float


@dataclass(frozen=True)
class ValidationReport:
    config: ValidationConfig
    predicted_ratio: float
    per_bit_cutoffs: list[BitCutoffStats]
    ratios: list[StepRatio]
    measured_ratio_mean: float
    measured_ratio_std: float
    mean_error: float
    excluded_bits: list[int]


def _trial_cutoffs(cfg: ValidationConfig, trial: int) -> dict[int, float]:
    """Detected sub-Nyquist cutoffs per bit depth for one trial.

    A bit depth is dropped (Nyquist-flagged) when the detected crossing
    reaches the end of the grid, when the closed-form cutoff predicted
    from the trial's fitted slope and intercept exceeds f_s/2, or when
    the floor buries the whole PSD.
    """
    nyquist = cfg.sample_rate_hz / 2.0
    spec = SynthesisSpec(
        cfg.alpha,
        cfg.n_samples,
        cfg.sample_rate_hz,
        seed=cfg.master_seed + trial,
        peaks=cfg.peaks,
    )
    signal = synthesize(spec)
    psd = welch_psd(signal, cfg.segment_len)
    fit = fit_slope(psd, default_fit_band(psd))

    cutoffs: dict[int, float] = {}
    for bits in cfg.bits:
        qcfg = QuantizerConfig(bits=bits, full_scale=SYNTH_FULL_SCALE)
        if cfg.floor_method == FLOOR_THEORETICAL:
            floor = theoretical_noise_floor(qcfg, cfg.sample_rate_hz)
        else:
            q_psd = welch_psd(quantize(signal, qcfg), cfg.segment_len)
            floor = empirical_noise_floor(q_psd)
        try:
            detected = detect_cutoff(psd, floor, cfg.floor_method)
        except NoUsableBandError:
            continue
        if detected.exceeded_nyquist:
            continue
        if fit.alpha_hat > 0 and fit.s0_hat > 0:
            predicted = predicted_cutoff(fit.alpha_hat, fit.s0_hat, cfg.sample_rate_hz, qcfg)
            if predicted.f_c_hz > nyquist:
                continue
        cutoffs[bits] = detected.f_c_hz
    return cutoffs


def run_validation(cfg: ValidationConfig) -> ValidationReport:
    """Measure cutoff ratios across bit depths and compare to 2^(2/alpha).

    Per trial: synthesize, estimate the PSD, and detect the cutoff at
    each bit depth against the configured noise floor (the empirical
    floor comes from the quantized signal's own PSD). Ratios are formed
    per trial between consecutive bit depths that are both measurable in
    that trial; Nyquist-flagged depths are excluded.
    """
    predicted = scaling_ratio(cfg.alpha)
    per_trial = _run_trials(lambda i: _trial_cutoffs(cfg, i), cfg.trials)

    per_bit: list[BitCutoffStats] = []
    excluded_bits: list[int] = []
    for bits in cfg.bits:
        values = [c[bits] for c in per_trial if bits in c]
        excluded = not values
        if excluded:
            excluded_bits.append(bits)
        per_bit.append(
            BitCutoffStats(
                bits=bits,
                mean_f_c_hz=float(np.mean(values)) if values else None,
                std_f_c_hz=float(np.std(values)) if values else None,
                valid_trials=len(values),
                excluded=excluded,
            )
        )

    steps: list[StepRatio] = []
    pooled: list[float] = []
    for low, high in zip(cfg.bits[:-1], cfg.bits[1:]):
        if low in excluded_bits or high in excluded_bits:
            continue
        ratios = [c[high] / c[low] for c in per_trial if low in c and high in c]
        if not ratios:
            continue
        mean_ratio = float(np.mean(ratios))
        steps.append(
            StepRatio(
                bits_low=low,
                bits_high=high,
                mean_ratio=mean_ratio,
                std_ratio=float(np.std(ratios)),
                n_trials=len(ratios),
                rel_error=abs(mean_ratio - predicted) / predicted,
            )
        )
        pooled.extend(ratios)

    if not steps:
        raise NoMeasurableBandError(
            f"no consecutive bit depths in {cfg.bit_range} have measurable "
            f"sub-Nyquist cutoffs (alpha={cfg.alpha}, f_s={cfg.sample_rate_hz} Hz)"
        )

    return ValidationReport(
        config=cfg,
        predicted_ratio=predicted,
        per_bit_cutoffs=per_bit,
        ratios=steps,
        measured_ratio_mean=float(np.mean(pooled)),
        measured_ratio_std=float(np.std(pooled)),
        mean_error=float(np.mean([s.rel_error for s in steps])),
        excluded_bits=excluded_bits,
    )


@dataclass(frozen=True)
class NoiseColorCell:
    alpha: float
    bits: int
    noise_slope: float
    is_white: bool


@dataclass(frozen=True)
class NoiseColorSweepReport:
    alphas: list[float]
    bit_range: tuple[int, int]
    trials: int
    n_samples: int
    sample_rate_hz: float
    master_seed: int
    cells: list[NoiseColorCell]
    n_min: dict[float, int | None]


def run_noise_color_sweep(
    alphas: list[float],
    bit_range: tuple[int, int],
    trials: int,
    n_samples: int = 100_000,
    sample_rate_hz: float = 2000.0,
    master_seed: int = DEFAULT_SEED,
    white_threshold: float = WHITE_SLOPE_THRESHOLD,
) -> NoiseColorSweepReport:
    """Mean quantization-noise slope over an (alpha, bits) grid.

    Whiteness at each cell is judged on the mean slope across trials;
    n_min per alpha is the first white bit depth in the range.
    """
    n_lo, n_hi = int(bit_range[0]), int(bit_range[1])
    if n_lo < 1 or n_lo > n_hi:
        raise ValidationError(f"invalid bit range {bit_range}")
    cells: list[NoiseColorCell] = []
    n_min: dict[float, int | None] = {}
    for alpha in alphas:
        signals = _run_trials(
            lambda i, a=alpha: synthesize(
                SynthesisSpec(a, n_samples, sample_rate_hz, seed=master_seed + i)
            ),
            trials,
        )
        first_white = None
        for bits in range(n_lo, n_hi + 1):
            qcfg = QuantizerConfig(bits=bits, full_scale=SYNTH_FULL_SCALE)
            slopes = [measure_noise_slope(sig, qcfg).noise_slope for sig in signals]
            mean_slope = float(np.mean(slopes))
            white = abs(mean_slope) < white_threshold
            if white and first_white is None:
                first_white = bits
            cells.append(
                NoiseColorCell(alpha=alpha, bits=bits, noise_slope=mean_slope, is_white=white)
            )
        n_min[alpha] = first_white
    return NoiseColorSweepReport(
        alphas=list(alphas),
        bit_range=(n_lo, n_hi),
        trials=trials,
        n_samples=n_samples,
        sample_rate_hz=sample_rate_hz,
        master_seed=master_seed,
        cells=cells,
        n_min=n_min,
    )


@dataclass(frozen=True)
class SensitivityRow:
    delta_alpha: float
    perturbed_alpha: float
    predicted_ratio: float
    rel_error: float


@dataclass(frozen=True)
class SensitivityReport:
    config: ValidationConfig
    measured_ratio: float
    baseline_rel_error: float
    rows: list[SensitivityRow]


def run_sensitivity(cfg: ValidationConfig, perturbations: list[float]) -> SensitivityReport:
    """Prediction error when the scaling ratio is computed at alpha + delta.

    The error of each perturbed prediction is taken relative to the
    measured ratio of the unperturbed validation run, so the row at
    delta = 0 reproduces the baseline error.
    """
    for delta in perturbations:
        if cfg.alpha + delta <= 0:
            raise ValidationError(f"perturbation {delta} makes alpha nonpositive")
    base = run_validation(cfg)
    measured = base.measured_ratio_mean
    rows = []
    for delta in perturbations:
        perturbed = cfg.alpha + delta
        pred = scaling_ratio(perturbed)
        rows.append(
            SensitivityRow(
                delta_alpha=delta,
                perturbed_alpha=perturbed,
                predicted_ratio=pred,
                rel_error=abs(pred - measured) / measured,
            )
        )
    baseline = abs(scaling_ratio(cfg.alpha) - measured) / measured
    return SensitivityReport(
        config=cfg, measured_ratio=measured, baseline_rel_error=baseline, rows=rows
    )


@dataclass(frozen=True)
class PeakRobustnessRow:
    peak: PeakSpec
    mean_rel_error: float
    measured_ratio: float
    error_vs_baseline: float


@dataclass(frozen=True)
class PeakRobustnessReport:
    config: ValidationConfig
    baseline: ValidationReport
    rows: list[PeakRobustnessRow]


def run_peak_robustness(base: ValidationConfig, peaks: list[PeakSpec]) -> PeakRobustnessReport:
    """Validation error with each spectral peak injected, one at a time.

    The baseline is the peak-free validation of the same config; with no
    peaks the report reduces to that baseline exactly.
    """
    baseline = run_validation(replace(base, peaks=()))
    rows = []
    for peak in peaks:
        peak.validate(base.sample_rate_hz)
        report = run_validation(replace(base, peaks=(peak,)))
        rows.append(
            PeakRobustnessRow(
                peak=peak,
                mean_rel_error=report.mean_error,
                measured_ratio=report.measured_ratio_mean,
                error_vs_baseline=report.mean_error - baseline.mean_error,
            )
        )
    return PeakRobustnessReport(config=base, baseline=baseline, rows=rows)


@dataclass(frozen=True)
class BandPowerRow:
    band: str
    f_low_hz: float
    f_high_hz: float
    power_original: float
    power_quantized: float
    ratio: float
    preserved: bool


@dataclass(frozen=True)
class BandPowerReport:
    bits: int
    full_scale: float
    sample_rate_hz: float
    n_samples: int
    rows: list[BandPowerRow]


def run_band_power(
    signal: Signal,
    cfg: QuantizerConfig,
    bands: list[tuple[str, float, float]] | None = None,
    segment_len: int | None = None,
) -> BandPowerReport:
    """Quantized-to-original band power ratios from Welch PSDs."""
    if bands is None:
        bands = standard_bands(signal.nyquist_hz)
    if segment_len is None:
        segment_len = min(DEFAULT_SEGMENT_LEN, signal.n_samples)
    for _, f_low, f_high in bands:
        if not (0 < f_low < f_high <= signal.nyquist_hz):
            raise ValidationError(
                f"band ({f_low}, {f_high}) Hz outside (0, {signal.nyquist_hz}] Hz"
            )
    psd_orig = welch_psd(signal, segment_len)
    psd_quant = welch_psd(quantize(signal, cfg), segment_len)
    rows = []
    for name, f_low, f_high in bands:
        p_orig = band_power(psd_orig, f_low, f_high)
        p_quant = band_power(psd_quant, f_low, f_high)
        ratio = p_quant / p_orig
        rows.append(
            BandPowerRow(
                band=name,
                f_low_hz=f_low,
                f_high_hz=f_high,
                power_original=p_orig,
                power_quantized=p_quant,
                ratio=ratio,
                preserved=bool(PRESERVED_RANGE[0] <= ratio <= PRESERVED_RANGE[1]),
            )
        )
    return BandPowerReport(
        bits=cfg.bits,
        full_scale=cfg.full_scale,
        sample_rate_hz=signal.sample_rate_hz,
        n_samples=signal.n_samples,
        rows=rows,
    )


@dataclass(frozen=True)
class AnalysisReport:
    """Single-signal analysis: fit, noise color, floors and cutoffs."""

    sample_rate_hz: float
    n_samples: int
    bits: int
    full_scale: float
    alpha_hat: float
    s0_hat: float
    fit_band_hz: tuple[float, float]
    fit_rms_residual: float
    noise_slope: float
    noise_is_white: bool
    saturated_samples: int
    theoretical_floor: float
    empirical_floor: float
    cutoff_theoretical: CutoffEstimate
    cutoff_empirical: CutoffEstimate
    predicted_cutoff_hz: float
    predicted_exceeds_nyquist: bool


def analyze_signal(
    signal: Signal,
    cfg: QuantizerConfig,
    segment_len: int | None = None,
) -> AnalysisReport:
    """Run the per-signal pipeline: fit the spectrum, quantize, locate cutoffs."""
    if segment_len is None:
        segment_len = min(DEFAULT_SEGMENT_LEN, signal.n_samples)
    psd = welch_psd(signal, segment_len)
    fit = fit_slope(psd, default_fit_band(psd))
    quantized = quantize(signal, cfg)
    err = error_signal(signal, quantized)
    err_fit = fit_slope(welch_psd(err, segment_len), default_fit_band(psd))

    floor_th = theoretical_noise_floor(cfg, signal.sample_rate_hz)
    floor_emp = empirical_noise_floor(welch_psd(quantized, segment_len))
    cut_th = detect_cutoff(psd, floor_th, FLOOR_THEORETICAL)
    cut_emp = detect_cutoff(psd, floor_emp, FLOOR_EMPIRICAL)

    if fit.alpha_hat > 0:
        pred = predicted_cutoff(fit.alpha_hat, fit.s0_hat, signal.sample_rate_hz, cfg)
        pred_fc, pred_flag = pred.f_c_hz, pred.exceeded_nyquist
    else:
        pred_fc, pred_flag = float("nan"), True

    return AnalysisReport(
        sample_rate_hz=signal.sample_rate_hz,
        n_samples=signal.n_samples,
        bits=cfg.bits,
        full_scale=cfg.full_scale,
        alpha_hat=fit.alpha_hat,
        s0_hat=fit.s0_hat,
        fit_band_hz=fit.fit_band_hz,
        fit_rms_residual=fit.rms_residual,
        noise_slope=err_fit.slope,
        noise_is_white=bool(abs(err_fit.slope) < WHITE_SLOPE_THRESHOLD),
        saturated_samples=saturation_count(signal, cfg),
        theoretical_floor=floor_th,
        empirical_floor=floor_emp,
        cutoff_theoretical=cut_th,
        cutoff_empirical=cut_emp,
        predicted_cutoff_hz=pred_fc,
        predicted_exceeds_nyquist=pred_flag,
    )


# Preset configurations for the validation sweeps: alpha = 1.5 at 200 kHz
# (bits 5-6), alpha = 2.0 and 2.5 at 20 kHz (bits 7-12).
VALIDATION_PRESETS: dict[str, ValidationConfig] = {
    "paper-alpha15": ValidationConfig(
        alpha=1.5, sample_rate_hz=200_000.0, n_samples=100_000, bit_range=(5, 6), trials=20
    ),
    "paper-alpha20": ValidationConfig(
        alpha=2.0, sample_rate_hz=20_000.0, n_samples=100_000, bit_range=(7, 12), trials=20
    ),
    "paper-alpha25": ValidationConfig(
        alpha=2.5, sample_rate_hz=20_000.0, n_samples=100_000, bit_range=(7, 12), trials=20
    ),
}

# Noise-color sweep preset: alpha = 2 over bits 4-8.
TABLE2_PRESET = {
    "alphas": [2.0],
    "bit_range": (4, 8),
    "trials": 20,
    "n_samples": 100_000,
    "sample_rate_hz": 2000.0,
}
