"""Tests for array bundles, scan tables, manifests and the run ledger"""

import json
from pathlib import Path

import numpy as np
import pytest

from cli.config import parse_config
from experiments.scans import ScanRecord, ScanResult
from guardrails.exceptions import UsageError, ValidationError
from storage.bundles import read_bundle, write_bundle
from storage.manifest import build_manifest, read_manifest, write_manifest
from storage.run_ledger import RunLedger
from storage.tables import METRIC_COLUMNS, read_scan_csv, write_scan_csv


# Bundles

@pytest.mark.parametrize("complex_values", [False, True])
def test_bundle_is_bit_exact(tmp_path, rng, complex_values):
    array = rng.normal(size=(7, 5))
    if complex_values:
        array = array + 1j * rng.normal(size=(7, 5))
    bundle = write_bundle(tmp_path, "kernel", array, provenance="abc")
    assert bundle.kind == ("complex128" if complex_values else "real64")
    assert (tmp_path / "kernel.bin").stat().st_size == bundle.nbytes

    loaded, record = read_bundle(tmp_path / "kernel.json")
    assert np.array_equal(loaded, array)
    assert loaded.dtype == bundle.dtype
    assert record == bundle


def test_bundle_manifest_fields(tmp_path):
    write_bundle(tmp_path, "sigma", np.eye(4), provenance="deadbeef")
    record = json.loads((tmp_path / "sigma.json").read_text())
    assert record == {
        'name': 'sigma', 'kind': 'real64', 'shape': [4, 4], 'data_path': 'sigma.bin',
        'provenance': 'deadbeef', 'byte_order': 'little'
    }


def test_bundle_integer_array_is_stored_real(tmp_path):
    bundle = write_bundle(tmp_path, "counts", np.arange(6).reshape(2, 3))
    loaded, _ = read_bundle(tmp_path / "counts.json")
    assert bundle.kind == "real64"
    assert loaded.tolist() == [[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]]


def test_bundle_truncated_data_is_rejected(tmp_path):
    write_bundle(tmp_path, "jsa", np.ones((3, 3)))
    data = tmp_path / "jsa.bin"
    data.write_bytes(data.read_bytes()[:-8])
    with pytest.raises(ValidationError):
        read_bundle(tmp_path / "jsa.json")


def test_bundle_rejects_non_numeric(tmp_path):
    with pytest.raises(UsageError):
        write_bundle(tmp_path, "labels", np.array(["a", "b"]))


# Scan tables

def _scan() -> ScanResult:
    records = [
        ScanRecord({'n_bins': 2, 'bin_width': 0.1}, True, 0.123456789012345, 2.5, 0.5000000001),
        ScanRecord({'n_bins': 2, 'bin_width': 0.3}, False),
        ScanRecord({'n_bins': 3, 'bin_width': 0.1}, True, error="not resolved"),
        ScanRecord({'n_bins': 3, 'bin_width': 0.3}, True, 0.9, 1.0 / 3.0, 0.5),
    ]
    return ScanResult("scan", {'n_bins': [2, 3], 'bin_width': [0.1, 0.3]}, records)


def test_scan_csv_header_and_values(tmp_path):
    scan = _scan()
    path = write_scan_csv(scan, tmp_path / "tables" / "scan.csv")
    lines = path.read_text().split("\n")
    assert lines[0] == ",".join(["n_bins", "bin_width", *METRIC_COLUMNS])
    assert "\r" not in path.read_text()

    rows = read_scan_csv(path)
    assert len(rows) == 4
    assert rows[0]['n_bins'] == 2
    assert rows[0]['feasible'] is True
    assert rows[0]['purity'] == pytest.approx(0.123456789012345, abs=1e-12)
    assert rows[3]['squeezing_db'] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert rows[1]['feasible'] is False
    assert rows[1]['purity'] is None and rows[1]['symplectic_min'] is None
    # a failed point stays feasible with empty metrics
    assert rows[2]['feasible'] is True
    assert rows[2]['purity'] is None and rows[2]['squeezing_db'] is None


# Manifest

def test_manifest_echoes_config_and_hash(tmp_path):
    config = parse_config('experiment = "estimate-nin"')
    manifest = build_manifest(config, "0.1.0", {'total': 0.5}, {'heatmap': 'h.json'}, {'n_in': np.int64(200)})
    path = write_manifest(manifest, tmp_path / "manifest.json")
    stored = read_manifest(path)
    assert stored['config_hash'] == config.config_hash()
    assert stored['config']['estimator']['delta_in'] == 5.0
    assert stored['metrics'] == {'n_in': 200}
    assert stored['timings_s'] == {'total': 0.5}


def test_config_hash_follows_content():
    base = parse_config('experiment = "demo-beamsplitter"')
    assert base.config_hash() == parse_config('experiment = "demo-beamsplitter"\ngrid_n = 1500').config_hash()
    assert base.config_hash() != base.with_overrides(grid_n=400).config_hash()
    assert len(base.config_hash()) == 64


# Run ledger

def test_ledger_records_runs_and_artifacts(tmp_path):
    ledger = RunLedger(tmp_path / "ledger.db")
    first = ledger.record_run("demo-beamsplitter", "h1", "0.1.0", 0, 1.5, {'purity': 0.9}, "ok")
    ledger.record_artifacts(first, {'jsa': tmp_path / "jsa.json"}, kinds={'jsa': 'bundle'})
    second = ledger.record_run("demo-beamsplitter", "h2", "0.1.0", 2, 0.5, message="bad width")
    third = ledger.record_run("estimate-nin", "h1", "0.1.0", 0, 0.1, {'n_in': 200})

    run = ledger.get_run(first)
    assert run['status'] == 'success'
    assert run['metrics'] == {'purity': 0.9}
    assert run['artifacts'] == {'jsa': str(tmp_path / "jsa.json")}
    assert ledger.get_run(second)['status'] == 'failed'
    assert ledger.get_run(999) is None
    assert ledger.find_runs("h1") == [first, third]


def test_ledger_stats_and_export(tmp_path):
    ledger = RunLedger(tmp_path / "ledger.db")
    ledger.record_run("scan-binwidth", "h", "0.1.0", 0, 2.0)
    ledger.record_run("scan-binwidth", "h", "0.1.0", 0, 4.0)
    ledger.record_run("demo-beamsplitter", "g", "0.1.0", 1, 1.0, message="boom")

    stats = ledger.get_run_stats()
    assert stats['total_runs'] == 3
    assert stats['successful_runs'] == 2
    assert stats['success_rate'] == 0.667
    assert {'experiment': 'scan-binwidth', 'count': 2, 'avg_duration_s': 3.0} in stats['experiment_stats']
    assert stats['recent_failures'] == [{'experiment': 'demo-beamsplitter', 'exit_code': 1, 'message': 'boom'}]

    path = ledger.export_ledger_data(str(tmp_path / "export.json"))
    exported = json.loads(Path(path).read_text())
    assert len(exported['runs']) == 3
    assert exported['artifacts'] == []
