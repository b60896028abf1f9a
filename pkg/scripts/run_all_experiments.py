#!/usr/bin/env python3
"""Run the full experiment battery and write reports under results/.

Covers: scaling-law validation with theoretical and empirical noise
floors for alpha in {1.5, 2.0, 2.5}, the noise-color table for alpha=2,
N_min per alpha, alpha-sensitivity, spectral-peak robustness, and the
band-power preservation proxy at 160 Hz.

Usage: python scripts/run_all_experiments.py [--out results] [--seed 1234]
"""

import argparse
import pathlib
import sys
from dataclasses import replace

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from quantband.errors import NoMeasurableBandError
from quantband.experiments import (
    DEFAULT_SEED,
    TABLE2_PRESET,
    VALIDATION_PRESETS,
    run_band_power,
    run_noise_color_sweep,
    run_peak_robustness,
    run_sensitivity,
    run_validation,
)
from quantband.io import write_report
from quantband.noise import PeakSpec, SynthesisSpec, synthesize
from quantband.quantizer import QuantizerConfig
from quantband.scaling import find_n_min


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name, preset in VALIDATION_PRESETS.items():
        for floor in ("theoretical", "empirical"):
            cfg = replace(preset, master_seed=args.seed, floor_method=floor)
            tag = f"{name}-{floor}"
            try:
                report = run_validation(cfg)
            except NoMeasurableBandError as exc:
                print(f"{tag}: SKIPPED ({exc})")
                continue
            write_report(report, out / f"validation-{tag}.json", "json")
            print(
                f"{tag}: ratio {report.measured_ratio_mean:.3f} "
                f"+/- {report.measured_ratio_std:.3f} "
                f"(predicted {report.predicted_ratio:.3f}, "
                f"error {report.mean_error * 100:.1f}%, "
                f"excluded {report.excluded_bits or 'none'})"
            )

    sweep = run_noise_color_sweep(master_seed=args.seed, **TABLE2_PRESET)
    write_report(sweep, out / "noise-color-alpha2.csv", "csv")
    for cell in sweep.cells:
        print(f"noise color alpha={cell.alpha} N={cell.bits}: "
              f"slope {cell.noise_slope:+.3f} ({'white' if cell.is_white else 'colored'})")

    for alpha in (1.0, 1.5, 2.0, 2.5, 3.0):
        n_min = find_n_min(alpha, (4, 12), trials=20, master_seed=args.seed)
        print(f"N_min(alpha={alpha}) = {'none up to 12 bits' if n_min is None else n_min}")

    sens_cfg = replace(VALIDATION_PRESETS["paper-alpha20"], master_seed=args.seed)
    sens = run_sensitivity(sens_cfg, [-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3])
    write_report(sens, out / "sensitivity-alpha2.json", "json")
    for row in sens.rows:
        print(f"sensitivity delta={row.delta_alpha:+.1f}: error {row.rel_error * 100:.1f}%")

    peaks_cfg = replace(
        VALIDATION_PRESETS["paper-alpha20"],
        sample_rate_hz=2000.0, bit_range=(5, 6), master_seed=args.seed,
    )
    peaks = run_peak_robustness(
        peaks_cfg, [PeakSpec(10.0, 2.0, 50.0), PeakSpec(100.0, 20.0, 0.25)]
    )
    write_report(peaks, out / "peak-robustness.json", "json")
    print(f"peaks baseline error: {peaks.baseline.mean_error * 100:.2f}%")
    for row in peaks.rows:
        print(f"peak {row.peak.center_hz:g} Hz x{row.peak.amplitude_factor:g}: "
              f"error {row.mean_rel_error * 100:.2f}%")

    proxy = synthesize(SynthesisSpec(1.56, 8192, 160.0, seed=args.seed))
    for bits in (4, 6, 8):
        report = run_band_power(proxy, QuantizerConfig(bits=bits, full_scale=2.0))
        write_report(report, out / f"band-power-{bits}bit.csv", "csv")
        summary = ", ".join(f"{r.band} {r.ratio:.2f}" for r in report.rows)
        print(f"band power at {bits} bits: {summary}")

    print(f"\nreports written to {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
