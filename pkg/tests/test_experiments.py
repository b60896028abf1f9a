import os
from dataclasses import replace

import pytest

from quantband.errors import NoMeasurableBandError, ValidationError
from quantband.experiments import (
    ValidationConfig,
    analyze_signal,
    run_band_power,
    run_noise_color_sweep,
    run_peak_robustness,
    run_sensitivity,
    run_validation,
    standard_bands,
)
from quantband.noise import PeakSpec, Signal, SynthesisSpec, synthesize
from quantband.quantizer import QuantizerConfig

SMALL = ValidationConfig(
    alpha=2.0, sample_rate_hz=2000.0, n_samples=30_000, bit_range=(5, 6), trials=3
)


class TestRunValidation:
    def test_deterministic(self):
        assert run_validation(SMALL) == run_validation(SMALL)

    def test_report_shape(self):
        rep = run_validation(SMALL)
        assert rep.predicted_ratio == 2.0
        assert [b.bits for b in rep.per_bit_cutoffs] == [5, 6]
        assert len(rep.ratios) == 1
        assert rep.ratios[0].n_trials == 3
        assert rep.measured_ratio_mean == pytest.approx(2.0, rel=0.2)

    def test_all_bits_beyond_nyquist_raises(self):
        cfg = replace(SMALL, bit_range=(11, 12))
        with pytest.raises(NoMeasurableBandError):
            run_validation(cfg)

    def test_empirical_floor_method_runs(self):
        rep = run_validation(replace(SMALL, floor_method="empirical"))
        assert rep.ratios

    def test_order_independent_under_threads(self):
        serial = run_validation(SMALL)
        os.environ["QUANTBAND_THREADS"] = "4"
        try:
            threaded = run_validation(SMALL)
        finally:
            del os.environ["QUANTBAND_THREADS"]
        assert serial == threaded

    def test_invalid_configs_rejected(self):
        with pytest.raises(ValidationError):
            ValidationConfig(2.0, 2000.0, 30_000, (6, 5), 3)
        with pytest.raises(ValidationError):
            ValidationConfig(2.0, 2000.0, 30_000, (5, 6), 0)
        with pytest.raises(ValidationError):
            ValidationConfig(2.0, 2000.0, 30_000, (5, 6), 3, floor_method="magic")


class TestRunSensitivity:
    def test_zero_perturbation_matches_baseline(self):
        rep = run_sensitivity(SMALL, [-0.2, 0.0, 0.2])
        zero_row = next(r for r in rep.rows if r.delta_alpha == 0.0)
        assert zero_row.rel_error == rep.baseline_rel_error

    def test_error_formula(self):
        rep = run_sensitivity(SMALL, [0.5])
        row = rep.rows[0]
        expected = abs(2.0 ** (2.0 / 2.5) - rep.measured_ratio) / rep.measured_ratio
        assert row.rel_error == pytest.approx(expected, rel=1e-12)

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(ValidationError):
            run_sensitivity(SMALL, [-2.0])


class TestRunPeakRobustness:
    def test_peak_free_equals_validation(self):
        rep = run_peak_robustness(SMALL, [])
        assert rep.baseline == run_validation(SMALL)
        assert rep.rows == []

    def test_zero_amplitude_peak_matches_baseline(self):
        rep = run_peak_robustness(SMALL, [PeakSpec(100.0, 10.0, 0.0)])
        assert rep.rows[0].mean_rel_error == rep.baseline.mean_error
        assert rep.rows[0].error_vs_baseline == 0.0

    def test_peak_rejected_for_rate(self):
        with pytest.raises(ValidationError):
            run_peak_robustness(SMALL, [PeakSpec(999.0, 10.0, 1.0)])


class TestRunNoiseColorSweep:
    def test_grid_and_n_min(self):
        rep = run_noise_color_sweep(
            [0.0, 1.0], (4, 5), trials=2, n_samples=30_000, sample_rate_hz=2000.0, master_seed=5
        )
        assert len(rep.cells) == 4
        assert rep.n_min[0.0] == 4  # white input is white at any depth
        assert all(c.is_white for c in rep.cells if c.alpha == 0.0)

    def test_deterministic(self):
        kwargs = dict(
            alphas=[1.0], bit_range=(4, 4), trials=2,
            n_samples=30_000, sample_rate_hz=2000.0, master_seed=5,
        )
        assert run_noise_color_sweep(**kwargs) == run_noise_color_sweep(**kwargs)


class TestRunBandPower:
    def make_signal(self, n=8192, seed=1):
        return synthesize(SynthesisSpec(1.56, n, 160.0, seed=seed))

    def test_high_bits_preserve_everything(self):
        rep = run_band_power(self.make_signal(), QuantizerConfig(16, 2.0))
        for row in rep.rows:
            assert 0.99 <= row.ratio <= 1.01
            assert row.preserved

    def test_band_names_and_edges(self):
        rep = run_band_power(self.make_signal(), QuantizerConfig(8, 2.0))
        assert [r.band for r in rep.rows] == ["delta", "theta", "alpha", "beta", "gamma"]
        assert rep.rows[-1].f_high_hz == 80.0

    def test_rescaling_invariance(self):
        # Scaling the signal by 2 with the range scaled the same way
        # leaves every band ratio untouched (bit-exact for powers of 2).
        sig = self.make_signal()
        doubled = Signal(2.0 * sig.samples, sig.sample_rate_hz)
        a = run_band_power(sig, QuantizerConfig(6, 2.0))
        b = run_band_power(doubled, QuantizerConfig(6, 4.0))
        for ra, rb in zip(a.rows, b.rows):
            assert ra.ratio == pytest.approx(rb.ratio, rel=1e-12)

    def test_band_outside_nyquist_rejected(self):
        with pytest.raises(ValidationError):
            run_band_power(
                self.make_signal(), QuantizerConfig(8, 2.0), bands=[("bad", 10.0, 200.0)]
            )

    def test_standard_bands_requires_room(self):
        with pytest.raises(ValidationError):
            standard_bands(25.0)
        bands = standard_bands(80.0)
        assert bands[-1] == ("gamma", 30.0, 80.0)


class TestAnalyzeSignal:
    def test_pipeline_self_consistency(self):
        sig = synthesize(SynthesisSpec(2.0, 65_536, 2000.0, seed=12))
        rep = analyze_signal(sig, QuantizerConfig(8, 2.0))
        assert rep.alpha_hat == pytest.approx(2.0, abs=0.1)
        assert rep.saturated_samples == 0
        assert rep.theoretical_floor == pytest.approx(5.0862630208e-09, rel=1e-9)
        # Detected cutoff consistent with the closed form at the fitted
        # parameters, when measurable.
        if not rep.cutoff_theoretical.exceeded_nyquist:
            assert rep.cutoff_theoretical.f_c_hz == pytest.approx(
                rep.predicted_cutoff_hz, rel=0.15
            )

    def test_low_bits_flag_colored_noise(self):
        sig = synthesize(SynthesisSpec(2.0, 65_536, 2000.0, seed=12))
        rep = analyze_signal(sig, QuantizerConfig(4, 2.0))
        assert not rep.noise_is_white
