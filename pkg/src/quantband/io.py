"""Signal file ingestion and report serialization.

Signals travel as single-column (or column-selected) CSV or as raw
little-endian float64 with no header; the sample rate is always supplied
out of band. Reports serialize to JSON (full structure plus metadata) or
to CSV (the primary numeric table, one row per grid point).
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    EmptySignalError,
    MalformedSampleError,
    NonFiniteSampleError,
    UnreadableFileError,
    ValidationError,
)
from .experiments import (
    AnalysisReport,
    BandPowerReport,
    NoiseColorSweepReport,
    PeakRobustnessReport,
    SensitivityReport,
    ValidationReport,
)
from .noise import Signal

FORMAT_CSV = "csv"
FORMAT_RAW = "raw_f64_le"

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SignalFileSpec:
    """Where a signal lives on disk and how to decode it."""

    path: str
    format: str
    sample_rate_hz: float
    channel_index: int = 0

    def __post_init__(self):
        if self.format not in (FORMAT_CSV, FORMAT_RAW):
            raise ValidationError(f"unknown signal format {self.format!r}")
        if not (self.sample_rate_hz > 0 and np.isfinite(self.sample_rate_hz)):
            raise ValidationError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if self.channel_index < 0:
            raise ValidationError(f"channel index must be >= 0, got {self.channel_index}")


def _parse_csv_row(line: str, channel: int, row: int, path: str) -> float:
    fields = line.split(",")
    if channel >= len(fields):
        raise MalformedSampleError(
            f"row has {len(fields)} columns, wanted column {channel}",
            path=path,
            location=f"row {row}",
        )
    text = fields[channel].strip()
    try:
        value = float(text)
    except ValueError:
        raise MalformedSampleError(
            f"could not parse {text!r} as a number", path=path, location=f"row {row}"
        ) from None
    if not np.isfinite(value):
        raise NonFiniteSampleError(
            f"sample is {text}", path=path, location=f"row {row}"
        )
    return value


def _read_csv_samples(spec: SignalFileSpec) -> np.ndarray:
    try:
        text = Path(spec.path).read_text()
    except OSError as exc:
        raise UnreadableFileError(str(exc), path=spec.path) from exc
    except UnicodeDecodeError as exc:
        raise UnreadableFileError(f"not a text file: {exc}", path=spec.path) from exc

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EmptySignalError("file contains no samples", path=spec.path)

    # A single header line is tolerated: skip the first line iff it does
    # not parse as numbers.
    start = 0
    try:
        _parse_csv_row(lines[0], spec.channel_index, 1, spec.path)
    except MalformedSampleError:
        start = 1
    if start == len(lines):
        raise EmptySignalError("file contains only a header", path=spec.path)

    values = [
        _parse_csv_row(line, spec.channel_index, row, spec.path)
        for row, line in enumerate(lines[start:], start=start + 1)
    ]
    return np.asarray(values, dtype=np.float64)


def _read_raw_samples(spec: SignalFileSpec) -> np.ndarray:
    try:
        raw = Path(spec.path).read_bytes()
    except OSError as exc:
        raise UnreadableFileError(str(exc), path=spec.path) from exc
    if not raw:
        raise EmptySignalError("file contains no samples", path=spec.path)
    if len(raw) % 8:
        raise MalformedSampleError(
            f"file size {len(raw)} is not a multiple of 8",
            path=spec.path,
            location=f"byte {len(raw) - len(raw) % 8}",
        )
    values = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    bad = np.nonzero(~np.isfinite(values))[0]
    if bad.size:
        raise NonFiniteSampleError(
            f"sample {bad[0]} is {values[bad[0]]}",
            path=spec.path,
            location=f"byte offset {8 * int(bad[0])}",
        )
    return values


def read_signal(spec: SignalFileSpec) -> Signal:
    """Load a signal file according to its spec."""
    if spec.format == FORMAT_CSV:
        values = _read_csv_samples(spec)
    else:
        values = _read_raw_samples(spec)
    if values.size < 2:
        raise EmptySignalError(
            f"need at least 2 samples, found {values.size}", path=spec.path
        )
    return Signal(values, spec.sample_rate_hz)


def write_signal(signal: Signal, spec: SignalFileSpec) -> None:
    """Write a signal; raw round-trips bit-exactly, CSV to 17 significant digits."""
    path = Path(spec.path)
    if spec.format == FORMAT_CSV:
        lines = "\n".join(f"{x:.17g}" for x in signal.samples)
        path.write_text(lines + "\n")
    else:
        path.write_bytes(signal.samples.astype("<f8").tobytes())


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return _jsonable(value.item())
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(value).items()}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _find_seed(report) -> int | None:
    config = getattr(report, "config", None)
    return getattr(config, "master_seed", getattr(report, "master_seed", None))


def report_to_dict(report) -> dict:
    """JSON-ready dict: schema version, metadata block, then report fields."""
    payload = _jsonable(report)
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": {
            "tool": "quantband",
            "version": __version__,
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "report_type": type(report).__name__,
            "master_seed": _jsonable(_find_seed(report)),
        },
        "report": payload,
    }


def _csv_rows(report) -> tuple[list[str], list[list]]:
    if isinstance(report, NoiseColorSweepReport):
        header = ["alpha", "bits", "noise_slope", "is_white"]
        rows = [[c.alpha, c.bits, c.noise_slope, c.is_white] for c in report.cells]
    elif isinstance(report, ValidationReport):
        header = ["alpha", "bits", "mean_f_c_hz", "std_f_c_hz", "valid_trials", "excluded"]
        rows = [
            [report.config.alpha, b.bits, b.mean_f_c_hz, b.std_f_c_hz, b.valid_trials, b.excluded]
            for b in report.per_bit_cutoffs
        ]
    elif isinstance(report, SensitivityReport):
        header = ["delta_alpha", "perturbed_alpha", "predicted_ratio", "rel_error"]
        rows = [[r.delta_alpha, r.perturbed_alpha, r.predicted_ratio, r.rel_error] for r in report.rows]
    elif isinstance(report, PeakRobustnessReport):
        header = [
            "center_hz", "width_hz", "amplitude_factor",
            "mean_rel_error", "measured_ratio", "error_vs_baseline",
        ]
        rows = [
            [r.peak.center_hz, r.peak.width_hz, r.peak.amplitude_factor,
             r.mean_rel_error, r.measured_ratio, r.error_vs_baseline]
            for r in report.rows
        ]
    elif isinstance(report, BandPowerReport):
        header = ["band", "f_low_hz", "f_high_hz", "power_original", "power_quantized", "ratio", "preserved"]
        rows = [
            [r.band, r.f_low_hz, r.f_high_hz, r.power_original, r.power_quantized, r.ratio, r.preserved]
            for r in report.rows
        ]
    elif isinstance(report, AnalysisReport):
        header = ["field", "value"]
        rows = [[k, v] for k, v in _jsonable(report).items()]
    else:
        raise ValidationError(f"no CSV schema for report type {type(report).__name__}")
    return header, rows


def write_report(report, path, format: str = "json") -> None:
    """Serialize an experiment report to JSON or CSV."""
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(report_to_dict(report), indent=2) + "\n")
    elif format == "csv":
        header, rows = _csv_rows(report)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        raise ValidationError(f"unknown report format {format!r}")
