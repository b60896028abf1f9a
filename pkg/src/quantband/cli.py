"""Command-line front end: synthesis, analysis and experiment runners.

Every run is reproducible: identical flags and seed produce an identical
report payload (modulo the timestamp in the metadata block). Exit codes:
0 success, 1 runtime/file errors, 2 argument or validation errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import QuantbandError, SignalIoError, ValidationError
from .experiments import (
    DEFAULT_SEED,
    TABLE2_PRESET,
    VALIDATION_PRESETS,
    ValidationConfig,
    analyze_signal,
    run_band_power,
    run_noise_color_sweep,
    run_peak_robustness,
    run_sensitivity,
    run_validation,
)
from .io import (
    FORMAT_CSV,
    FORMAT_RAW,
    SignalFileSpec,
    read_signal,
    write_report,
    write_signal,
)
from .noise import PeakSpec, SynthesisSpec, synthesize
from .quantizer import QuantizerConfig
from .scaling import find_n_min

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

# Defaults for the peak-robustness experiment: cutoffs at these settings
# land near 83 Hz (5 bits) and 166 Hz (6 bits), so a 100 Hz peak sits in
# the cutoff region while a 10 Hz peak stays far below it.
PEAKS_BASE = ValidationConfig(
    alpha=2.0, sample_rate_hz=2000.0, n_samples=100_000, bit_range=(5, 6), trials=20
)
DEFAULT_PEAKS = (PeakSpec(10.0, 2.0, 50.0), PeakSpec(100.0, 20.0, 0.25))


def _parse_peak(text: str) -> PeakSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"peak must be center:width:amplitude, got {text!r}")
    try:
        center, width, amp = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"peak fields must be numeric, got {text!r}") from None
    return PeakSpec(center_hz=center, width_hz=width, amplitude_factor=amp)


def _parse_bit_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) == 1:
        parts = [parts[0], parts[0]]
    if len(parts) != 2:
        raise ValidationError(f"bit range must be lo:hi, got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValidationError(f"bit range fields must be integers, got {text!r}") from None
    return lo, hi


def _parse_band(text: str) -> tuple[str, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"band must be name:f_low:f_high, got {text!r}")
    try:
        return parts[0], float(parts[1]), float(parts[2])
    except ValueError:
        raise ValidationError(f"band edges must be numeric, got {text!r}") from None


def _signal_format(path: str, explicit: str | None) -> str:
    if explicit:
        return FORMAT_CSV if explicit == "csv" else FORMAT_RAW
    return FORMAT_CSV if Path(path).suffix.lower() == ".csv" else FORMAT_RAW


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _emit(args, report, default_name: str) -> None:
    out = args.out or f"{default_name}.{args.format}"
    write_report(report, out, args.format)
    if args.quiet:
        print(out)
    else:
        print(f"report written to {out}")


def _full_scale_for(signal, override: float | None) -> float:
    # Full-scale mapping: the quantizer range covers the signal exactly,
    # matching the synthetic convention (peak 1, R = 2).
    if override is not None:
        return override
    peak = float(np.max(np.abs(signal.samples)))
    if peak == 0:
        raise ValidationError("signal is identically zero; pass --range explicitly")
    return 2.0 * peak


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    parser.add_argument("--out", help="output path (default derived from the command)")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="report format")
    parser.add_argument(
        "--quiet", action="store_true", help="print only the output path"
    )


def _validation_config(args) -> ValidationConfig:
    if args.preset:
        if args.preset not in VALIDATION_PRESETS:
            raise ValidationError(
                f"unknown preset {args.preset!r}; choose from {sorted(VALIDATION_PRESETS)}"
            )
        cfg = VALIDATION_PRESETS[args.preset]
    else:
        cfg = ValidationConfig(
            alpha=args.alpha,
            sample_rate_hz=args.fs,
            n_samples=args.n,
            bit_range=_parse_bit_range(args.bits),
            trials=args.trials,
        )
    return replace(cfg, master_seed=args.seed, floor_method=args.floor)


def cmd_synth(args) -> int:
    spec = SynthesisSpec(
        alpha=args.alpha,
        n_samples=args.n,
        sample_rate_hz=args.fs,
        seed=args.seed,
        peaks=tuple(_parse_peak(p) for p in args.peak or []),
    )
    signal = synthesize(spec)
    fmt = _signal_format(args.out, args.file_format)
    write_signal(signal, SignalFileSpec(args.out, fmt, args.fs))
    if args.quiet:
        print(args.out)
    else:
        print(f"wrote {signal.n_samples} samples ({fmt}) to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    fmt = _signal_format(args.infile, args.file_format)
    signal = read_signal(
        SignalFileSpec(args.infile, fmt, args.fs, channel_index=args.channel)
    )
    cfg = QuantizerConfig(bits=args.bits, full_scale=_full_scale_for(signal, args.range))
    report = analyze_signal(signal, cfg)
    if not args.quiet:
        print(f"samples:            {report.n_samples} at {report.sample_rate_hz} Hz")
        print(f"fitted alpha:       {report.alpha_hat:.3f}")
        print(f"fitted S0 (1 Hz):   {report.s0_hat:.4e}")
        print(f"noise slope:        {report.noise_slope:+.3f} "
              f"({'white' if report.noise_is_white else 'colored'})")
        print(f"saturated samples:  {report.saturated_samples}")
        print(f"theoretical floor:  {report.theoretical_floor:.4e}")
        print(f"empirical floor:    {report.empirical_floor:.4e}")
        for label, cut in (
            ("f_c (theoretical)", report.cutoff_theoretical),
            ("f_c (empirical)", report.cutoff_empirical),
        ):
            flag = " [beyond Nyquist]" if cut.exceeded_nyquist else ""
            print(f"{label}:  {cut.f_c_hz:.1f} Hz{flag}")
        flag = " [beyond Nyquist]" if report.predicted_exceeds_nyquist else ""
        print(f"f_c (closed form):  {report.predicted_cutoff_hz:.1f} Hz{flag}")
    if args.out:
        write_report(report, args.out, args.format)
        print(args.out if args.quiet else f"report written to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _validation_config(args)
    report = run_validation(cfg)
    _say(
        args,
        f"alpha={cfg.alpha}: measured ratio {report.measured_ratio_mean:.3f} "
        f"+/- {report.measured_ratio_std:.3f} (predicted {report.predicted_ratio:.3f}, "
        f"mean error {report.mean_error * 100:.1f}%, "
        f"excluded bits {report.excluded_bits or 'none'})",
    )
    _emit(args, report, "validation_report")
    return EXIT_OK


def cmd_noise_color(args) -> int:
    if args.preset:
        if args.preset != "paper-table2":
            raise ValidationError(f"unknown preset {args.preset!r}; expected 'paper-table2'")
        params = dict(TABLE2_PRESET)
    else:
        params = {
            "alphas": args.alpha,
            "bit_range": _parse_bit_range(args.bits),
            "trials": args.trials,
            "n_samples": args.n,
            "sample_rate_hz": args.fs,
        }
    report = run_noise_color_sweep(master_seed=args.seed, **params)
    for alpha in report.alphas:
        n_min = report.n_min[alpha]
        _say(args, f"alpha={alpha}: N_min={'none' if n_min is None else n_min}")
    _emit(args, report, "noise_color_report")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    cfg = _validation_config(args)
    report = run_sensitivity(cfg, args.delta)
    worst = max(report.rows, key=lambda r: r.rel_error)
    _say(
        args,
        f"alpha={cfg.alpha}: baseline error {report.baseline_rel_error * 100:.1f}%, "
        f"worst {worst.rel_error * 100:.1f}% at delta={worst.delta_alpha:+.2f}",
    )
    _emit(args, report, "sensitivity_report")
    return EXIT_OK


def cmd_peaks(args) -> int:
    cfg = _validation_config(args)
    peaks = [_parse_peak(p) for p in args.peak] if args.peak else list(DEFAULT_PEAKS)
    report = run_peak_robustness(cfg, peaks)
    _say(args, f"baseline error {report.baseline.mean_error * 100:.2f}%")
    for row in report.rows:
        _say(
            args,
            f"peak {row.peak.center_hz:g} Hz (width {row.peak.width_hz:g}, "
            f"{row.peak.amplitude_factor:g}x): error {row.mean_rel_error * 100:.2f}%",
        )
    _emit(args, report, "peak_robustness_report")
    return EXIT_OK


def cmd_bands(args) -> int:
    fmt = _signal_format(args.infile, args.file_format)
    signal = read_signal(
        SignalFileSpec(args.infile, fmt, args.fs, channel_index=args.channel)
    )
    cfg = QuantizerConfig(bits=args.bits, full_scale=_full_scale_for(signal, args.range))
    bands = [_parse_band(b) for b in args.band] if args.band else None
    report = run_band_power(signal, cfg, bands)
    for row in report.rows:
        _say(
            args,
            f"{row.band:>6} [{row.f_low_hz:g}, {row.f_high_hz:g}] Hz: "
            f"ratio {row.ratio:.3f} ({'preserved' if row.preserved else 'distorted'})",
        )
    _emit(args, report, "band_power_report")
    return EXIT_OK


def cmd_nmin(args) -> int:
    lo, hi = _parse_bit_range(args.bits)
    result = find_n_min(
        args.alpha, (lo, hi), trials=args.trials, master_seed=args.seed,
        n_samples=args.n, sample_rate_hz=args.fs,
    )
    print("none" if result is None else result)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantband",
        description="Quantization-bandwidth scaling analysis for 1/f^alpha signals.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a 1/f^alpha signal file")
    p.add_argument("--alpha", type=float, required=True, help="spectral slope (>= 0)")
    p.add_argument("--n", type=int, default=100_000, help="number of samples")
    p.add_argument("--fs", type=float, required=True, help="sample rate in Hz")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument(
        "--peak", action="append", metavar="C:W:A",
        help="Gaussian peak center:width:amplitude (repeatable)",
    )
    p.add_argument("--out", required=True, help="output file (.csv or raw float64)")
    p.add_argument("--file-format", choices=["csv", "raw"], help="override format inference")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("analyze", help="fit, quantize and locate cutoffs for a signal file")
    p.add_argument("--in", dest="infile", required=True, help="input signal file")
    p.add_argument("--fs", type=float, required=True, help="sample rate in Hz")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--range", type=float, help="full-scale range (default: 2 * max|x|)")
    p.add_argument("--channel", type=int, default=0, help="CSV column index")
    p.add_argument("--file-format", choices=["csv", "raw"])
    p.add_argument("--out", help="optionally write the report here")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_analyze)

    def experiment_parser(name, help_text, preset_help):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("--preset", help=preset_help)
        q.add_argument("--alpha", type=float, default=2.0)
        q.add_argument("--fs", type=float, default=20_000.0)
        q.add_argument("--n", type=int, default=100_000)
        q.add_argument("--bits", default="7:12", help="bit range lo:hi")
        q.add_argument("--trials", type=int, default=20)
        q.add_argument(
            "--floor", choices=["theoretical", "empirical"], default="theoretical"
        )
        _add_common(q)
        return q

    p = experiment_parser(
        "validate",
        "measure cutoff ratios across bit depths vs 2^(2/alpha)",
        "paper-alpha15 | paper-alpha20 | paper-alpha25",
    )
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("noise-color", help="quantization-noise slope over an (alpha, bits) grid")
    p.add_argument("--preset", help="paper-table2")
    p.add_argument("--alpha", type=float, action="append", help="repeatable")
    p.add_argument("--bits", default="4:12", help="bit range lo:hi")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--fs", type=float, default=2000.0)
    p.add_argument("--trials", type=int, default=20)
    _add_common(p)
    p.set_defaults(fn=cmd_noise_color)

    p = experiment_parser(
        "sensitivity",
        "scaling prediction error under perturbed alpha",
        "paper-alpha15 | paper-alpha20 | paper-alpha25",
    )
    p.add_argument(
        "--delta", type=float, action="append",
        default=None, help="alpha perturbation (repeatable)",
    )
    p.set_defaults(fn=cmd_sensitivity)

    p = sub.add_parser("peaks", help="validation error with spectral peaks injected")
    p.add_argument("--preset", help="optional validation preset for the base config")
    p.add_argument("--alpha", type=float, default=PEAKS_BASE.alpha)
    p.add_argument("--fs", type=float, default=PEAKS_BASE.sample_rate_hz)
    p.add_argument("--n", type=int, default=PEAKS_BASE.n_samples)
    p.add_argument("--bits", default="5:6", help="bit range lo:hi")
    p.add_argument("--trials", type=int, default=PEAKS_BASE.trials)
    p.add_argument("--floor", choices=["theoretical", "empirical"], default="theoretical")
    p.add_argument("--peak", action="append", metavar="C:W:A", help="repeatable")
    _add_common(p)
    p.set_defaults(fn=cmd_peaks)

    p = sub.add_parser("bands", help="band power preservation under quantization")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fs", type=float, required=True)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--range", type=float, help="full-scale range (default: 2 * max|x|)")
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--file-format", choices=["csv", "raw"])
    p.add_argument(
        "--band", action="append", metavar="NAME:LO:HI",
        help="band definition (repeatable; default delta..gamma)",
    )
    _add_common(p)
    p.set_defaults(fn=cmd_bands)

    p = sub.add_parser("nmin", help="smallest bit depth with white quantization noise")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--bits", default="4:12")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--fs", type=float, default=2000.0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(fn=cmd_nmin)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "sensitivity" and args.delta is None:
        args.delta = [-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3]
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SignalIoError, QuantbandError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
