import io
import json

import pytest

from app.cli import main
from app.config import RELAY_TAPS_POLAR
from app.results import CSV_HEADER, load_config_sidecar


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def tiny_config(tmp_path):
    return write_json(
        tmp_path / "tiny.json",
        {
            "signal_code": {"taps": [list(t) for t in RELAY_TAPS_POLAR], "polar": True, "k": 6, "p": 3},
            "decoder": {"metric_bias": 1.0, "max_expansions": 300},
            "snr_db": [10, 20],
            "trials": 4,
            "seed": 5,
            "pilot_samples": 600,
            "out": str(tmp_path / "curves.csv"),
        },
    )


def test_rate(capsys):
    assert main(["rate", "--h", "1,0", "--snr-db", "0"]) == 0
    assert capsys.readouterr().out.strip() == "a=(1,0) R=1.0"


def test_rate_user_count_mismatch(capsys):
    assert main(["rate", "--h", "1,0.5i", "--snr-db", "10", "--L", "3"]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_snf(tmp_path, capsys):
    path = write_json(tmp_path / "J.json", {"J": [[[3, 0], [-1, 0]], [[0, 0], [1, 0]]]})
    assert main(["snf", "--input", path]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "D = diag(1, 3)"
    assert "invariant factors: 3" in out


def test_snf_json_output(tmp_path, capsys):
    path = write_json(tmp_path / "J.json", {"J": [[[3, 0], [-1, 0]], [[0, 0], [1, 0]]]})
    assert main(["snf", "--input", path, "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert set(body) == {"P", "D", "Q", "invariant_factors"}
    assert body["D"] == [[[1, 0], [0, 0]], [[0, 0], [3, 0]]]
    assert body["invariant_factors"] == ["3"]
    assert len(body["P"]) == len(body["Q"]) == 2
    assert all(len(entry) == 2 for row in body["P"] + body["Q"] for entry in row)


def test_snf_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps([[[2, 0], [0, 0]], [[0, 0], [3, 0]]])))
    assert main(["snf"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "D = diag(1, 6)"


def test_analyze_partition(tmp_path, capsys):
    path = write_json(
        tmp_path / "partition.json",
        {
            "G": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
            "J": [[[3, 0], [0, 0]], [[0, 0], [3, 0]]],
        },
    )
    assert main(["analyze-partition", "--input", path]) == 0
    out = capsys.readouterr().out
    assert "index: 81" in out
    assert "vector space: F_9^2" in out


def test_analyze_partition_without_field(tmp_path, capsys):
    path = write_json(tmp_path / "p.json", {"G": [[[1, 0]]], "J": [[[2, 0]]]})
    assert main(["analyze-partition", "--input", path]) == 0
    out = capsys.readouterr().out
    assert "index: 4" in out
    assert "vector space: no" in out


def test_singular_matrix_is_reported(tmp_path, capsys):
    path = write_json(tmp_path / "J.json", {"J": [[[1, 0], [2, 0]], [[2, 0], [4, 0]]]})
    assert main(["snf", "--input", path]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_field_is_reported(tmp_path, capsys):
    path = write_json(tmp_path / "p.json", {"G": [[[1, 0]]]})
    assert main(["analyze-partition", "--input", path]) == 2
    assert "missing field" in capsys.readouterr().err


def test_usage_errors_exit():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["simulate", "--scheme", "ldpc"])


def test_simulate_missing_config(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 2
    assert "config file not found" in capsys.readouterr().err


def test_simulate_invalid_config(tmp_path, capsys):
    path = write_json(tmp_path / "bad.json", {"signal_code": {"taps": [[0.5, 0]], "k": 4, "p": 5}, "snr_db": [0], "trials": 1})
    assert main(["simulate", "--config", path]) == 2
    assert "invalid signal_code.p" in capsys.readouterr().err


def test_simulate_is_byte_identical(tiny_config, tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", tiny_config, "--out", str(first), "--workers", "1"]) == 0
    assert main(["simulate", "--config", tiny_config, "--out", str(second), "--workers", "2"]) == 0
    assert first.read_bytes() == second.read_bytes()

    lines = first.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 2 * 2
    assert {line.split(",")[1] for line in lines[1:]} == {"signal-code", "qam"}

    out = capsys.readouterr().out
    assert "gap at 90% of ceiling" in out

    sidecar = load_config_sidecar(first)
    assert sidecar.out == str(first)
    assert sidecar.trials == 4
    assert sidecar.signal_code.k == 6


def test_simulate_overrides(tiny_config, tmp_path):
    out = tmp_path / "qam.csv"
    args = ["simulate", "--config", tiny_config, "--out", str(out), "--trials", "2", "--seed", "8"]
    assert main(args + ["--scheme", "qam", "--workers", "1"]) == 0
    sidecar = load_config_sidecar(out)
    assert (sidecar.trials, sidecar.seed) == (2, 8)
    rows = out.read_text(encoding="utf-8").splitlines()[1:]
    assert all(row.split(",")[1] == "qam" and row.split(",")[2] == "2" for row in rows)
