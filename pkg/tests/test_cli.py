"""End-to-end CLI behavior: commands, files, JSON reports, exit codes."""

import json
import math
from importlib import resources

import jsonschema
import numpy as np
import pytest

from framestats.cli import main

SCHEMA = json.loads(
    resources.files("framestats").joinpath("report_schema.json").read_text()
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    report = json.loads(captured.out) if code == 0 and captured.out.strip() else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return code, report, captured.err


class TestSynth:
    def test_uniform_rows(self, tmp_path, capsys):
        out = tmp_path / "u.csv"
        code, report, _ = run_cli(
            capsys, "synth", "--model", "uniform", "--dim", "3",
            "--n", "500", "--seed", "1", "--out", str(out),
        )
        assert code == 0
        assert report["results"]["rows"] == 500
        lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert lines[0] == "x1,x2,x3"
        assert len(lines) == 501
        assert all(len(l.split(",")) == 3 for l in lines[1:])

    def test_fntf_mixture_rows(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        code, report, _ = run_cli(
            capsys, "synth", "--model", "fntf-mixture", "--components", "3",
            "--kappa", "10", "--n", "10000", "--seed", "7", "--out", str(out),
        )
        assert code == 0
        assert report["results"]["rows"] == 10000
        assert len(out.read_text().splitlines()) == 10001

    def test_byte_identical_reruns(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["synth", "--model", "watson", "--kappa", "5", "--n", "300", "--seed", "3"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_thread_count_does_not_change_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["synth", "--model", "mixture", "--director-angles", "0,1.0472,2.0944",
                "--kappa", "10", "--n", "4000", "--seed", "11"]
        assert main(argv + ["--threads", "1", "--out", str(a)]) == 0
        assert main(argv + ["--threads", "8", "--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_reports_are_deterministic(self, tmp_path, capsys):
        argv = ["synth", "--model", "uniform", "--dim", "2", "--n", "50",
                "--seed", "2", "--out", str(tmp_path / "r.csv")]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_degrees_flag(self, tmp_path, capsys):
        out = tmp_path / "d.csv"
        code, report, _ = run_cli(
            capsys, "synth", "--model", "watson", "--kappa", "50",
            "--director-angle", "90", "--degrees", "--n", "200",
            "--seed", "5", "--out", str(out),
        )
        assert code == 0
        pts = np.loadtxt(out, delimiter=",", skiprows=1)
        # concentrated around +-e2
        assert np.mean(pts[:, 1] ** 2) > 0.9

    def test_missing_params_exit_domain(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "synth", "--model", "watson", "--n", "10",
            "--out", str(tmp_path / "x.csv"),
        )
        assert code == 3
        assert "kappa" in err

    def test_usage_error_exit_one(self, capsys):
        code, _, _ = run_cli(capsys, "synth", "--model", "nope", "--n", "1", "--out", "x")
        assert code == 1


class TestRoundTrip:
    def test_reserialization_is_byte_identical(self, tmp_path, capsys):
        from framestats.dataio import read_sample_csv, write_sample_csv

        src = tmp_path / "s.csv"
        assert main(["synth", "--model", "uniform", "--dim", "3", "--n", "2000",
                     "--seed", "13", "--out", str(src)]) == 0
        capsys.readouterr()
        sample = read_sample_csv(src)
        back = tmp_path / "back.csv"
        write_sample_csv(back, sample.points)
        assert back.read_bytes() == src.read_bytes()


class TestTest:
    def test_rayleigh_single_point(self, tmp_path, capsys):
        f = tmp_path / "one.csv"
        f.write_text("x1,x2\n1,0\n")
        code, report, _ = run_cli(capsys, "test", "--in", str(f), "--method", "rayleigh")
        assert code == 0
        res = report["results"]["tests"]["rayleigh"]
        assert res["statistic"] == pytest.approx(2.0)
        assert res["p_value"] == pytest.approx(0.3678794, abs=1e-6)
        assert res["reject"] is False  # and exit code stayed 0

    def test_bingham_fails_to_reject_fntf_mixture(self, tmp_path, capsys):
        f = tmp_path / "mix.csv"
        assert main(["synth", "--model", "fntf-mixture", "--components", "3",
                     "--kappa", "10", "--n", "10000", "--seed", "7",
                     "--out", str(f)]) == 0
        capsys.readouterr()
        code, report, _ = run_cli(capsys, "test", "--in", str(f), "--method", "all",
                                  "--level", "0.05")
        assert code == 0
        assert report["results"]["tests"]["bingham"]["reject"] is False

    def test_bingham_rejects_single_director(self, tmp_path, capsys):
        f = tmp_path / "w.csv"
        assert main(["synth", "--model", "watson", "--kappa", "10", "--n", "100",
                     "--seed", "5", "--out", str(f)]) == 0
        capsys.readouterr()
        code, report, _ = run_cli(capsys, "test", "--in", str(f), "--level", "0.01")
        assert code == 0
        assert report["results"]["tests"]["bingham"]["reject"] is True

    def test_theta_column_input(self, tmp_path, capsys):
        f = tmp_path / "t.csv"
        f.write_text("theta\n0\n1.5707963267948966\n")
        code, report, _ = run_cli(capsys, "test", "--in", str(f), "--method", "bingham")
        assert code == 0
        assert report["results"]["tests"]["bingham"]["statistic"] == pytest.approx(0.0, abs=1e-12)

    def test_malformed_rows_exit_data(self, tmp_path, capsys):
        f = tmp_path / "bad.csv"
        f.write_text("x1,x2\n1,0\noops,0\n# comment\n0,1,9\n")
        code, _, err = run_cli(capsys, "test", "--in", str(f))
        assert code == 2
        assert "3" in err and "5" in err  # offending line numbers

    def test_missing_file_exit_data(self, capsys):
        code, _, _ = run_cli(capsys, "test", "--in", "/nonexistent/x.csv")
        assert code == 2

    def test_bad_level_exit_domain(self, tmp_path, capsys):
        f = tmp_path / "one.csv"
        f.write_text("x1,x2\n1,0\n")
        code, _, _ = run_cli(capsys, "test", "--in", str(f), "--level", "1.5")
        assert code == 3


class TestFrame:
    def test_harmonic(self, capsys):
        code, report, _ = run_cli(capsys, "frame", "harmonic", "--n", "3")
        assert code == 0
        assert report["results"]["angles"] == pytest.approx(
            [0.0, math.pi / 3, 2 * math.pi / 3]
        )
        assert report["results"]["defect"] <= 1e-12

    def test_potential_antipodal_pair(self, tmp_path, capsys):
        f = tmp_path / "pair.csv"
        f.write_text("x1,x2\n1,0\n-1,0\n")
        code, report, _ = run_cli(capsys, "frame", "potential", "--in", str(f))
        assert code == 0
        res = report["results"]
        assert res["frame_potential"] == pytest.approx(1.0)
        assert res["riesz_potential"] == pytest.approx(2.0)
        assert res["fractional"] == pytest.approx(0.5)

    def test_bounds_and_check(self, tmp_path, capsys):
        f = tmp_path / "basis.csv"
        f.write_text("x1,x2\n1,0\n0,1\n")
        code, report, _ = run_cli(capsys, "frame", "bounds", "--in", str(f))
        assert code == 0
        assert report["results"]["lower"] == pytest.approx(1.0)
        assert report["results"]["is_tight"] is True
        code, report, _ = run_cli(capsys, "frame", "check", "--in", str(f),
                                  "--tol", "1e-12")
        assert code == 0
        assert report["results"]["is_fntf"] is True

    def test_tighten(self, tmp_path, capsys):
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(9, 2))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        f = tmp_path / "r.csv"
        from framestats.dataio import write_sample_csv

        write_sample_csv(f, pts)
        out = tmp_path / "tight.csv"
        code, report, _ = run_cli(capsys, "frame", "tighten", "--in", str(f),
                                  "--tol", "1e-9", "--out", str(out))
        assert code == 0
        res = report["results"]
        assert res["converged"] is True
        assert abs(res["final_potential"] - 0.5) <= 1e-8
        trace = np.asarray(res["trace"])
        assert np.all(np.diff(trace) <= 0.0)
        assert out.exists()

    def test_frame_requires_input(self, capsys):
        code, _, _ = run_cli(capsys, "frame", "bounds")
        assert code == 1


class TestOrder:
    def _write_rods(self, path, rods):
        from framestats.dataio import write_rods_csv

        write_rods_csv(path, rods)

    def test_parallel_rods(self, tmp_path, capsys):
        from framestats.order import Rod

        rods = [Rod(float(x), float(y), 0.3) for x in range(10) for y in range(10)]
        f = tmp_path / "rods.csv"
        self._write_rods(f, rods)
        code, report, _ = run_cli(capsys, "order", "--in", str(f),
                                  "--radius", "1.5", "--cell-size", "1")
        assert code == 0
        assert report["results"]["order_parameter"] == pytest.approx(1.0)

    def test_single_rod_field_absent(self, tmp_path, capsys):
        from framestats.order import Rod

        f = tmp_path / "one.csv"
        self._write_rods(f, [Rod(0.0, 0.0, 1.0)])
        out = tmp_path / "field.csv"
        code, report, _ = run_cli(capsys, "order", "--in", str(f), "--radius", "1",
                                  "--cell-size", "1", "--min-count", "5",
                                  "--field-out", str(out))
        assert code == 0
        assert report["results"]["order_parameter"] == pytest.approx(1.0)
        assert report["results"]["field"]["populated"] == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "cx,cy,lambda,director_angle,count"
        assert rows[1].split(",")[2] == ""  # absent lambda

    def test_missing_column_schema_error(self, tmp_path, capsys):
        f = tmp_path / "bad.csv"
        f.write_text("x,y\n0,0\n")
        code, _, err = run_cli(capsys, "order", "--in", str(f), "--radius", "1",
                               "--cell-size", "1")
        assert code == 2
        assert "theta" in err


class TestFit:
    def test_three_director_fit(self, tmp_path, capsys):
        f = tmp_path / "mix.csv"
        assert main(["synth", "--model", "fntf-mixture", "--components", "3",
                     "--kappa", "20", "--n", "6000", "--seed", "21",
                     "--out", str(f)]) == 0
        capsys.readouterr()
        code, report, _ = run_cli(capsys, "fit", "--in", str(f),
                                  "--components", "3", "--seed", "21")
        assert code == 0
        res = report["results"]
        assert res["converged"] is True
        got = res["director_angles"]
        want = [0.0, math.pi / 3, 2 * math.pi / 3]

        def axial(a, b):
            d = abs(a - b) % math.pi
            return min(d, math.pi - d)

        from itertools import permutations

        best = min(
            max(axial(got[p[i]], want[i]) for i in range(3))
            for p in permutations(range(3))
        )
        assert best < math.radians(2.0)
        assert res["kappa"][0] == pytest.approx(20.0, rel=0.15)
        assert len(res["widths"]) == 3

    def test_too_few_points_domain_error(self, tmp_path, capsys):
        f = tmp_path / "five.csv"
        f.write_text("theta\n0.1\n0.2\n0.3\n0.4\n0.5\n")
        code, _, err = run_cli(capsys, "fit", "--in", str(f), "--components", "3")
        assert code == 3
        assert "n >= 10" in err


class TestHelp:
    @pytest.mark.parametrize("cmd", ["synth", "test", "frame", "order", "fit"])
    def test_subcommand_help(self, cmd, capsys):
        code = main([cmd, "--help"])
        out = capsys.readouterr().out
        assert code == 0
        assert "usage" in out.lower()
