import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantband.errors import (
    EmptySignalError,
    MalformedSampleError,
    NonFiniteSampleError,
    UnreadableFileError,
    ValidationError,
)
from quantband.experiments import ValidationConfig, run_noise_color_sweep, run_validation
from quantband.io import (
    FORMAT_CSV,
    FORMAT_RAW,
    SignalFileSpec,
    read_signal,
    report_to_dict,
    write_report,
    write_signal,
)
from quantband.noise import Signal


class TestReadCsv:
    def test_plain_column(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("0.1\n0.2\n0.3\n")
        sig = read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0))
        assert np.allclose(sig.samples, [0.1, 0.2, 0.3])
        assert sig.sample_rate_hz == 100.0

    def test_header_skipped(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("value\n1.0\n2.0\n")
        sig = read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0))
        assert np.allclose(sig.samples, [1.0, 2.0])

    def test_channel_selection(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("t,ch0,ch1\n0,1.0,10.0\n1,2.0,20.0\n")
        sig = read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0, channel_index=2))
        assert np.allclose(sig.samples, [10.0, 20.0])

    def test_missing_file(self, tmp_path):
        with pytest.raises(UnreadableFileError):
            read_signal(SignalFileSpec(str(tmp_path / "nope.csv"), FORMAT_CSV, 100.0))

    def test_non_numeric_row_has_context(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("1.0\nbogus\n3.0\n")
        with pytest.raises(MalformedSampleError, match="row 2"):
            read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0))

    def test_nan_rejected(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("1.0\nnan\n")
        with pytest.raises(NonFiniteSampleError, match="row 2"):
            read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0))

    def test_empty_file(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("")
        with pytest.raises(EmptySignalError):
            read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0))

    def test_header_only(self, tmp_path):
        p = tmp_path / "sig.csv"
        p.write_text("value\n")
        with pytest.raises(EmptySignalError):
            read_signal(SignalFileSpec(str(p), FORMAT_CSV, 100.0))


class TestRawFormat:
    def test_byte_count_maps_to_samples(self, tmp_path):
        p = tmp_path / "sig.f64"
        values = np.arange(5, dtype="<f8")
        p.write_bytes(values.tobytes())
        sig = read_signal(SignalFileSpec(str(p), FORMAT_RAW, 100.0))
        assert sig.n_samples == 5

    def test_truncated_file_rejected(self, tmp_path):
        p = tmp_path / "sig.f64"
        p.write_bytes(b"\x00" * 12)
        with pytest.raises(MalformedSampleError, match="multiple of 8"):
            read_signal(SignalFileSpec(str(p), FORMAT_RAW, 100.0))

    def test_nonfinite_sample_located(self, tmp_path):
        p = tmp_path / "sig.f64"
        values = np.array([1.0, np.inf, 3.0], dtype="<f8")
        p.write_bytes(values.tobytes())
        with pytest.raises(NonFiniteSampleError, match="byte offset 8"):
            read_signal(SignalFileSpec(str(p), FORMAT_RAW, 100.0))

    @given(
        values=st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            min_size=2,
            max_size=128,
        )
    )
    @settings(max_examples=50)
    def test_round_trip_bit_exact(self, values, tmp_path_factory):
        p = tmp_path_factory.mktemp("raw") / "sig.f64"
        spec = SignalFileSpec(str(p), FORMAT_RAW, 250.0)
        write_signal(Signal(np.array(values), 250.0), spec)
        back = read_signal(spec)
        assert np.array_equal(back.samples, np.array(values))


class TestWriteSignal:
    def test_csv_round_trip_precision(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.standard_normal(64)
        p = tmp_path / "sig.csv"
        spec = SignalFileSpec(str(p), FORMAT_CSV, 100.0)
        write_signal(Signal(values, 100.0), spec)
        back = read_signal(spec)
        assert np.max(np.abs(back.samples - values)) <= 1e-12

    def test_signal_shorter_than_two_rejected(self):
        with pytest.raises(ValidationError):
            Signal(np.array([1.0]), 100.0)

    def test_unknown_format_rejected(self):
        with pytest.raises(ValidationError):
            SignalFileSpec("x.bin", "parquet", 100.0)


SMALL = ValidationConfig(
    alpha=2.0, sample_rate_hz=2000.0, n_samples=30_000, bit_range=(5, 6), trials=2
)


class TestWriteReport:
    def test_validation_json_schema(self, tmp_path):
        rep = run_validation(SMALL)
        out = tmp_path / "rep.json"
        write_report(rep, out, "json")
        payload = json.loads(out.read_text())
        assert payload["schema_version"] == 1
        assert payload["metadata"]["tool"] == "quantband"
        assert payload["metadata"]["master_seed"] == SMALL.master_seed
        body = payload["report"]
        for key in (
            "config",
            "per_bit_cutoffs",
            "ratios",
            "predicted_ratio",
            "mean_error",
            "excluded_bits",
        ):
            assert key in body
        assert body["config"]["alpha"] == 2.0

    def test_noise_color_csv_columns(self, tmp_path):
        rep = run_noise_color_sweep(
            [1.0], (4, 5), trials=2, n_samples=30_000, sample_rate_hz=2000.0, master_seed=3
        )
        out = tmp_path / "rep.csv"
        write_report(rep, out, "csv")
        lines = out.read_text().splitlines()
        assert lines[0] == "alpha,bits,noise_slope,is_white"
        assert len(lines) == 3

    def test_reruns_identical_apart_from_timestamp(self, tmp_path):
        rep = run_validation(SMALL)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_report(rep, a, "json")
        write_report(run_validation(SMALL), b, "json")
        da, db = json.loads(a.read_text()), json.loads(b.read_text())
        da["metadata"].pop("created_utc")
        db["metadata"].pop("created_utc")
        assert da == db

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValidationError):
            write_report(run_validation(SMALL), tmp_path / "r.x", "yaml")

    def test_report_to_dict_handles_numpy_scalars(self):
        payload = report_to_dict(run_validation(SMALL))
        json.dumps(payload)  # must be serializable without numpy types
