"""End-to-end CLI tests: commands, exit codes, CSV formats, SVG output."""

import numpy as np
import pytest

from fractalcodim import csvio
from fractalcodim.cli import main, table_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRunCommand:
    def test_lienard_table_row(self, capsys, tmp_path):
        trace = tmp_path / "trace.csv"
        summary = tmp_path / "run.csv"
        code, out, _ = run_cli(
            capsys,
            "run",
            "--model",
            "lienard",
            "--j",
            "0",
            "--a",
            "1",
            "--y0",
            "0.001",
            "--iters",
            "100",
            "--trace",
            str(trace),
            "--csv",
            str(summary),
        )
        assert code == 0
        assert "selected (cahen):" in out
        value = float(out.split("selected (cahen):")[1].split()[0])
        assert value == pytest.approx(1.0 / 3.0, abs=0.015)
        assert "codimension: 1" in out
        # trace file: fixed column set, one row per height, re-parseable
        text = trace.read_text()
        header, rows = csvio.read_rows(text)
        assert header == ["k", "y_k", "est_cahen", "est_borel", "est_tailnucleus"]
        assert len(rows) == 101
        assert rows[0][1] == pytest.approx(0.001)
        records = csvio.read_records(summary.read_text())
        assert records[0]["model"] == "lienard j=0 a=1"
        assert records[0]["codimension"] == 1

    def test_normalform_run(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "run",
            "--model",
            "normalform",
            "--n",
            "2",
            "--m",
            "1",
            "--j",
            "0",
            "--alpha",
            "1",
            "--beta",
            "1",
            "--y0",
            "0.1",
            "--iters",
            "300",
        )
        assert code == 0
        assert "orientation=entry-solved" in out

    def test_degenerate_model_exits_3(self, capsys):
        code, _, err = run_cli(
            capsys,
            "run",
            "--model",
            "lienard",
            "--j",
            "0",
            "--a",
            "0",
            "--y0",
            "0.001",
            "--iters",
            "10",
        )
        assert code == 3
        assert "DegenerateModel" in err

    def test_non_admissible_height_exits_3(self, capsys):
        code, _, err = run_cli(
            capsys,
            "run",
            "--model",
            "lienard",
            "--j",
            "0",
            "--a",
            "1",
            "--y0",
            "0.9",
            "--iters",
            "10",
        )
        assert code == 3
        assert "NonAdmissibleHeight" in err

    def test_missing_model_params_exit_2(self, capsys):
        code, _, err = run_cli(
            capsys, "run", "--model", "lienard", "--j", "0", "--y0", "0.001", "--iters", "10"
        )
        assert code == 2
        assert "--a" in err

    def test_too_few_iterations_exit_2(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "run",
            "--model",
            "lienard",
            "--j",
            "0",
            "--a",
            "1",
            "--y0",
            "0.001",
            "--iters",
            "1",
        )
        assert code == 2

    def test_numeric_failure_exits_4(self, capsys):
        # integrand pole inside the integration range
        code, _, err = run_cli(
            capsys,
            "run",
            "--model",
            "normalform",
            "--n",
            "2",
            "--m",
            "1",
            "--j",
            "0",
            "--alpha",
            "-10",
            "--beta",
            "1",
            "--y0",
            "0.04",
            "--iters",
            "10",
        )
        assert code == 4
        assert "QuadratureFailure" in err


class TestTableCommand:
    def test_table1_values_and_determinism(self, capsys, tmp_path):
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        assert run_cli(capsys, "table", "1", "--out", str(p1))[0] == 0
        assert run_cli(capsys, "table", "1", "--out", str(p2))[0] == 0
        b1 = p1.read_bytes()
        assert b1 == p2.read_bytes()
        records = csvio.read_records(b1.decode())
        assert len(records) == 7
        assert all(r["status"] == "ok" for r in records)
        row_j3 = [r for r in records if r["j"] == 3][0]
        assert abs(row_j3["result"] - 7.0 / 9.0) < 0.015
        row_j49 = [r for r in records if r["j"] == 49][0]
        assert row_j49["codimension"] == 50

    def test_table2_rows_near_one_third(self, capsys):
        code, out, _ = run_cli(capsys, "table", "2")
        assert code == 0
        records = csvio.read_records(out)
        assert len(records) == 4
        for r in records:
            assert abs(r["result"] - 1.0 / 3.0) < 0.015

    def test_table_csv_roundtrip_idempotent(self):
        text = table_csv(1)
        header, rows = csvio.read_rows(text)
        again = csvio.write_rows(header, rows)
        assert again == text

    def test_bad_table_id(self, capsys):
        assert run_cli(capsys, "table", "7")[0] == 2


class TestChirpCommand:
    def test_chirp_svg_and_estimate(self, capsys, tmp_path):
        svg_path = tmp_path / "chirp.svg"
        code, out, _ = run_cli(
            capsys,
            "chirp",
            "--model",
            "normalform",
            "--n",
            "2",
            "--m",
            "1",
            "--j",
            "0",
            "--alpha",
            "1",
            "--beta",
            "1",
            "--y0",
            "0.1",
            "--iters",
            "800",
            "--svg",
            str(svg_path),
        )
        assert code == 0
        assert "box-count dimension:" in out
        assert "theoretical chirp dimension: 1" in out
        text = svg_path.read_text()
        assert text.startswith("<svg")
        assert 'width="800" height="600"' in text
        assert "<polyline" in text  # critical curve drawn

    def test_zero_iterations_usage_error(self, capsys):
        code, _, err = run_cli(
            capsys,
            "chirp",
            "--model",
            "lienard",
            "--j",
            "1",
            "--a",
            "1",
            "--y0",
            "0.1",
            "--iters",
            "0",
        )
        assert code == 2
        assert "usage error" in err


class TestCodimSeriesCommand:
    def test_constant_h1(self, capsys):
        code, out, _ = run_cli(capsys, "codim-series", "--h1", "1")
        assert code == 0
        assert "codimension: 1" in out
        assert "CONSISTENT" in out
        assert "alpha=-3" in out

    def test_odd_h1_infinite(self, capsys):
        code, out, _ = run_cli(capsys, "codim-series", "--h1", "0,1")
        assert code == 0
        assert "infinite up to truncation order" in out

    def test_x_squared_codimension_two(self, capsys):
        code, out, _ = run_cli(capsys, "codim-series", "--h1", "0,0,1")
        assert code == 0
        assert "codimension: 2" in out

    def test_bad_coefficients(self, capsys):
        code, _, err = run_cli(capsys, "codim-series", "--h1", "zero")
        assert code == 2


def test_trace_csv_determinism(tmp_path, capsys):
    args = [
        "run",
        "--model",
        "twostroke",
        "--alpha",
        "1",
        "--delta",
        "1",
        "--gamma",
        "1",
        "--y0",
        "0.1",
        "--iters",
        "50",
    ]
    pa = tmp_path / "a.csv"
    pb = tmp_path / "b.csv"
    assert main(args + ["--trace", str(pa)]) == 0
    assert main(args + ["--trace", str(pb)]) == 0
    capsys.readouterr()
    assert pa.read_bytes() == pb.read_bytes()
