"""CLI behavior: report structure, exit codes, series/figure emission."""

import json

import numpy as np
import pytest

from cohcert import cli, design


def run(argv):
    return cli.main(argv)


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestCoherenceCommand:
    def test_identity_reports_zero_mu(self, tmp_path):
        mat = tmp_path / "x.csv"
        design.write_matrix_csv(np.eye(4), mat)
        out = tmp_path / "report.json"
        assert run(["coherence", "--input", str(mat), "--out", str(out),
                    "--no-timestamp"]) == 0
        doc = load(out)
        assert doc["schema_version"] == 1
        assert doc["report"]["mu"] == 0.0
        assert doc["report"]["gershgorin"][0] == {"s": 1, "bound": 0.0}
        assert "timestamp" not in doc and "wall_time_s" not in doc

    def test_timestamp_present_by_default(self, tmp_path):
        mat = tmp_path / "x.csv"
        design.write_matrix_csv(np.eye(3), mat)
        out = tmp_path / "report.json"
        assert run(["coherence", "--input", str(mat), "--out", str(out)]) == 0
        doc = load(out)
        assert "timestamp" in doc and "wall_time_s" in doc


class TestWeakRipCommand:
    def test_report_series_and_plot(self, tmp_path):
        out = tmp_path / "r.json"
        series = tmp_path / "r.csv"
        plot = tmp_path / "r.png"
        assert run(["weak-rip", "--generate", "gaussian:12:30:3", "--s0", "2",
                    "--r", "0.6", "--alpha", "1", "--trials", "40", "--seed", "9",
                    "--out", str(out), "--series", str(series), "--plot", str(plot),
                    "--no-timestamp"]) == 0
        doc = load(out)
        rep = doc["report"]
        assert rep["trials"] == 40
        assert 0.0 <= rep["empirical_failure_rate"] <= 1.0
        assert rep["theoretical_bound"] == 1.0 and rep["vacuous"] is True
        lines = series.read_text().strip().splitlines()
        assert lines[0] == "trial,gram_deviation,failure"
        assert len(lines) == 41
        # CSV floats round-trip at full precision
        first = float(lines[1].split(",")[1])
        assert repr(first) == lines[1].split(",")[1]
        assert plot.stat().st_size > 0


class TestWeakRipSweep:
    def test_sweep_series_one_row_per_threshold(self, tmp_path):
        series = tmp_path / "sweep.csv"
        out = tmp_path / "sweep.json"
        assert run(["weak-rip", "--generate", "gaussian:12:30:3", "--s0", "2",
                    "--r", "0.3", "--alpha", "1", "--trials", "50", "--seed", "2",
                    "--r-sweep", "0.1,0.2,0.3,0.4,0.5", "--series", str(series),
                    "--out", str(out), "--no-timestamp"]) == 0
        lines = series.read_text().strip().splitlines()
        assert lines[0] == "r,failures,failure_rate"
        assert len(lines) == 6
        rep = load(out)["report"]
        assert len(rep["r_sweep"]) == 5
        rates = [row["failure_rate"] for row in rep["r_sweep"]]
        assert rates == sorted(rates, reverse=True)


class TestConstantsCommand:
    def test_parameter_mode_matches_library(self, tmp_path):
        out = tmp_path / "c.json"
        assert run(["constants", "--s0", "2", "--mu", "0.001", "--alpha", "2",
                    "--p", "256", "--out", str(out), "--no-timestamp"]) == 0
        rep = load(out)["report"]
        consts = rep["weak_nsp_constants"]
        assert consts["eps_min"] == pytest.approx(0.0009434782241906612, rel=1e-12)
        assert consts["eps_max"] == pytest.approx(0.2047987529817257, rel=1e-12)
        assert consts["C_stated"] == pytest.approx(3.0019292217912374, rel=1e-12)
        assert consts["C_proof"] == pytest.approx(2.3301924026344785, rel=1e-12)
        assert consts["spectral_window"] == [0.75, 1.25]
        # both formula variants present side by side
        assert "eps_min_alt" in consts and "eps_max_alt" in consts
        growth = rep["growth_bounds"]
        assert "eps_max_general" in growth

    def test_regime_error_exit_code(self, tmp_path, capsys):
        code = run(["constants", "--s0", "1", "--mu", "0.9", "--p", "64",
                    "--no-timestamp"])
        assert code == 3
        assert "is false" in capsys.readouterr().err

    def test_validation_error_exit_code(self):
        assert run(["constants", "--s0", "2", "--no-timestamp"]) == 2


class TestWeakNspCommand:
    def test_failed_certificate_is_data_not_error(self, tmp_path):
        mat = tmp_path / "pair.csv"
        design.write_matrix_csv(np.array([[1.0, 1.0]]), mat)
        out = tmp_path / "nsp.json"
        assert run(["weak-nsp", "--input", str(mat), "--s0", "1", "--C", "0.5",
                    "--trials", "4", "--seed", "2", "--out", str(out),
                    "--no-timestamp"]) == 0
        rep = load(out)["report"]
        assert rep["pass_rate"] == 0.0
        assert rep["certificates"][0]["worst_ratio"] == 1.0

    def test_capacity_error_exit_code(self, tmp_path, capsys):
        code = run(["weak-nsp", "--generate", "gaussian:4:12:1", "--s0", "2",
                    "--C", "1.0", "--trials", "2", "--no-timestamp"])
        assert code == 4
        assert "capacity" in capsys.readouterr().err

    def test_unbounded_ratio_serialized_as_inf_string(self, tmp_path):
        mat = tmp_path / "pair.csv"
        design.write_matrix_csv(np.array([[1.0, 1.0]]), mat)
        out = tmp_path / "nsp.json"
        assert run(["weak-nsp", "--input", str(mat), "--s0", "2", "--C", "1.0",
                    "--trials", "2", "--seed", "0", "--out", str(out),
                    "--no-timestamp"]) == 0
        rep = load(out)["report"]
        assert rep["certificates"][0]["worst_ratio"] == "inf"


class TestRecoverCommand:
    def test_single_solve(self, tmp_path):
        mat = tmp_path / "x.csv"
        design.write_matrix_csv(np.eye(3), mat)
        yfile = tmp_path / "y.csv"
        yfile.write_text("0.0,1.0,0.0\n")
        out = tmp_path / "rec.json"
        assert run(["recover", "--input", str(mat), "--y", str(yfile),
                    "--out", str(out), "--no-timestamp"]) == 0
        rep = load(out)["report"]
        assert rep["status"] == "optimal"
        assert rep["beta_hat"] == [0.0, 1.0, 0.0]

    def test_experiment_mode(self, tmp_path):
        out = tmp_path / "exp.json"
        assert run(["recover", "--generate", "gaussian:8:12:4", "--support", "1,5",
                    "--trials", "15", "--seed", "6", "--out", str(out),
                    "--no-timestamp"]) == 0
        rep = load(out)["report"]
        assert rep["mode"] == "experiment"
        assert rep["trials"] == 15
        assert rep["success_rate"] == 1.0

    def test_needs_a_mode(self):
        assert run(["recover", "--generate", "gaussian:4:6:1", "--no-timestamp"]) == 2


class TestGenerateCommand:
    def test_matrix_written_and_loadable(self, tmp_path, capsys):
        out = tmp_path / "design.csv"
        assert run(["generate", "gaussian:6:10:5", "--out", str(out),
                    "--no-timestamp"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["report"]["n"] == 6 and doc["report"]["p"] == 10
        m = design.read_matrix_csv(out)
        assert m.shape == (6, 10)
        norms = np.sqrt(np.sum(m ** 2, axis=0))
        assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_bad_spec_exit_code(self, tmp_path):
        assert run(["generate", "gaussian:6:10", "--out",
                    str(tmp_path / "x.csv"), "--no-timestamp"]) == 2

    def test_round_trip_reproduces_reports(self, tmp_path):
        # A design written to CSV and read back certifies identically.
        out = tmp_path / "d.csv"
        run(["generate", "gaussian:8:14:9", "--out", str(out), "--no-timestamp"])
        r1 = tmp_path / "a.json"
        r2 = tmp_path / "b.json"
        run(["weak-rip", "--generate", "gaussian:8:14:9", "--s0", "2", "--r", "0.5",
             "--alpha", "1", "--trials", "20", "--seed", "3", "--out", str(r1),
             "--no-timestamp"])
        run(["weak-rip", "--input", str(out), "--s0", "2", "--r", "0.5",
             "--alpha", "1", "--trials", "20", "--seed", "3", "--out", str(r2),
             "--no-timestamp"])
        a = load(r1)["report"]
        b = load(r2)["report"]
        assert a["failures"] == b["failures"]
        assert a["empirical_failure_rate"] == b["empirical_failure_rate"]


class TestSeriesHelper:
    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        cli.emit_series([], ["a", "b"], path)
        assert path.read_text() == "a,b\n"

    def test_series_flag_rejected_without_series(self, tmp_path):
        assert run(["constants", "--s0", "2", "--mu", "0.001", "--p", "64",
                    "--series", str(tmp_path / "s.csv"), "--no-timestamp"]) == 2


class TestPerturbVerifyCommand:
    def test_summary_counts(self, tmp_path):
        out = tmp_path / "pv.json"
        series = tmp_path / "pv.csv"
        assert run(["perturb-verify", "--generate", "gaussian:12:24:2",
                    "--s0", "2,3", "--trials", "25", "--seed", "4",
                    "--out", str(out), "--series", str(series),
                    "--no-timestamp"]) == 0
        rep = load(out)["report"]
        assert rep["trials"] == 25
        assert rep["min_violations"] == 0 and rep["max_violations"] == 0
        assert rep["min_checked"] + rep["skipped_min"] == 25
        lines = series.read_text().strip().splitlines()
        assert len(lines) == 26
