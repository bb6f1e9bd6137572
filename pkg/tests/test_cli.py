"""Command-line interface: file formats, exit codes, determinism."""

import dataclasses
import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

import ulamkit.cli as cli
from ulamkit import Field, Norm, Trajectory
from ulamkit.cli import (
    main,
    read_grid,
    read_spec,
    read_trajectory_csv,
    write_trajectory_csv,
)


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def spec23(tmp_path):
    """Roots 2 and 3: x_{n+2} = 5 x_{n+1} - 6 x_n."""
    return write_json(tmp_path / "spec23.json", {"p": 2, "a": [5.0, -6.0]})


@pytest.fixture
def doubling(tmp_path):
    """Order-1 doubling spec plus the trajectory 0, 1, 3, 7."""
    spec = write_json(tmp_path / "spec2.json", {"p": 1, "a": [2.0]})
    traj = tmp_path / "traj.csv"
    lines = ["n,comp_0_re,comp_0_im"] + [
        f"{i},{v},0.0" for i, v in enumerate([0.0, 1.0, 3.0, 7.0])
    ]
    traj.write_text("\n".join(lines) + "\n")
    return spec, str(traj)


class TestSpecIO:
    def test_defaults(self, spec23):
        spec = read_spec(spec23)
        assert spec.order == 2
        assert_allclose(np.asarray(spec.coefficients), [5.0, -6.0], rtol=0, atol=0)
        assert spec.field is Field.REAL
        assert spec.dim == 1
        assert spec.norm is Norm.SUP

    def test_complex_entries(self, tmp_path):
        path = write_json(
            tmp_path / "s.json",
            {"p": 1, "a": [[0.0, 2.0]], "field": "complex", "dim": 3, "norm": "euclid"},
        )
        spec = read_spec(path)
        assert_allclose(np.asarray(spec.coefficients), [2j], rtol=0, atol=0)
        assert spec.dim == 3
        assert spec.norm is Norm.EUCLID

    @pytest.mark.parametrize(
        "raw, fragment",
        [
            ({"a": [2.0]}, '"p"'),
            ({"p": 0, "a": []}, '"p"'),
            ({"p": 2, "a": [5.0]}, '"a"'),
            ({"p": 1, "a": [True]}, 'field "a" entry 0'),
            ({"p": 1, "a": [2.0], "norm": "max"}, '"norm"'),
            ({"p": 1, "a": [2.0], "field": "rational"}, '"field"'),
            ({"p": 1, "a": [2.0], "dim": 0}, '"dim"'),
            ({"p": 1, "a": [2.0], "extra": 1}, "unknown field"),
        ],
    )
    def test_diagnostics_name_the_field(self, tmp_path, raw, fragment):
        path = write_json(tmp_path / "bad.json", raw)
        with pytest.raises(ValueError, match="spec .*" + fragment.replace('"', '.')):
            read_spec(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="invalid JSON"):
            read_spec(str(path))

    def test_real_field_rejects_complex_coefficient(self, tmp_path):
        path = write_json(tmp_path / "s.json", {"p": 1, "a": [[2.0, 1.0]]})
        with pytest.raises(ValueError, match="spec "):
            read_spec(path)


class TestTrajectoryIO:
    def test_round_trip(self, tmp_path, rng, spec23):
        spec = dataclasses.replace(read_spec(spec23), field=Field.COMPLEX, dim=2)
        values = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
        path = tmp_path / "t.csv"
        write_trajectory_csv(str(path), Trajectory(values=values))
        loaded = read_trajectory_csv(str(path), spec)
        assert_allclose(loaded.values, values, rtol=0, atol=0)

    def test_header_mismatch(self, tmp_path, spec23):
        path = tmp_path / "t.csv"
        path.write_text("n,x_re,x_im\n0,1.0,0.0\n")
        with pytest.raises(ValueError, match="header"):
            read_trajectory_csv(str(path), read_spec(spec23))

    def test_bad_index_column(self, tmp_path, spec23):
        path = tmp_path / "t.csv"
        path.write_text("n,comp_0_re,comp_0_im\n0,1.0,0.0\n5,2.0,0.0\n")
        with pytest.raises(ValueError, match="row 2.*n column"):
            read_trajectory_csv(str(path), read_spec(spec23))

    def test_non_numeric_cell(self, tmp_path, spec23):
        path = tmp_path / "t.csv"
        path.write_text("n,comp_0_re,comp_0_im\n0,oops,0.0\n")
        with pytest.raises(ValueError, match="non-numeric"):
            read_trajectory_csv(str(path), read_spec(spec23))

    def test_real_field_rejects_imaginary_part(self, tmp_path, spec23):
        path = tmp_path / "t.csv"
        path.write_text("n,comp_0_re,comp_0_im\n0,1.0,0.5\n")
        with pytest.raises(ValueError, match="comp_0_im"):
            read_trajectory_csv(str(path), read_spec(spec23))

    def test_empty_file(self, tmp_path, spec23):
        path = tmp_path / "t.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_trajectory_csv(str(path), read_spec(spec23))


class TestGridIO:
    def test_basic(self, tmp_path):
        path = write_json(
            tmp_path / "g.json", {"p": 2, "grid": [[2.0, [0.0, 3.0]], [-2.0]]}
        )
        p, lists = read_grid(path)
        assert p == 2
        assert lists == [[2.0 + 0j, 3.0j], [-2.0 + 0j]]

    def test_polar(self, tmp_path):
        path = write_json(
            tmp_path / "g.json",
            {"p": 1, "grid": [[[2.0, 0.0], [2.0, np.pi / 2]]], "polar": True},
        )
        _, lists = read_grid(path)
        assert_allclose(
            np.array(lists[0]), [2.0 + 0j, 2.0j], rtol=0, atol=1e-15
        )

    @pytest.mark.parametrize(
        "raw, fragment",
        [
            ({"grid": [[2.0]]}, '"p"'),
            ({"p": 2, "grid": [[2.0]]}, "2 candidate lists"),
            ({"p": 1, "grid": [2.0]}, "entry 0 must be a list"),
            ({"p": 1, "grid": [[2.0]], "rows": 3}, "unknown field"),
            ({"p": 1, "grid": [["x"]]}, r"entry 0\[0\]"),
        ],
    )
    def test_diagnostics(self, tmp_path, raw, fragment):
        path = write_json(tmp_path / "g.json", raw)
        with pytest.raises(ValueError, match=fragment.replace('"', '.')):
            read_grid(path)


class TestExitCodes:
    def test_analyze_ok(self, spec23, capsys):
        assert main(["analyze", "--spec", spec23, "--no-plot"]) == 0
        out = capsys.readouterr().out
        assert "classical constant: 0.5" in out
        assert "sharp constant: 0.4999999999" in out

    def test_missing_spec_file(self, tmp_path, capsys):
        code = main(["analyze", "--spec", str(tmp_path / "nope.json"), "--no-plot"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_spec(self, tmp_path, capsys):
        path = write_json(tmp_path / "bad.json", {"p": 2, "a": [5.0]})
        assert main(["constant", "--spec", path, "--no-plot"]) == 1
        assert '"a"' in capsys.readouterr().err

    def test_usage_errors(self, spec23, capsys):
        assert main(["analyze", "--spec", spec23, "--frobnicate"]) == 1
        assert main(["analyze"]) == 1
        assert main(["explode", "--spec", spec23]) == 1
        assert main(["shadow", "--spec", spec23]) == 1  # --traj is required
        assert "error:" in capsys.readouterr().err

    @pytest.mark.parametrize("raw", [{"p": 1, "a": [1.0]}, {"p": 2, "a": [2.0, -1.0]}])
    def test_unit_circle_exits_two(self, tmp_path, capsys, raw):
        path = write_json(tmp_path / "circle.json", raw)
        assert main(["analyze", "--spec", path, "--no-plot"]) == 2
        assert main(["constant", "--spec", path, "--no-plot"]) == 2
        assert "not Ulam stable" in capsys.readouterr().err

    def test_near_degenerate_exits_three(self, tmp_path, capsys):
        # exact double root at 3
        path = write_json(tmp_path / "double3.json", {"p": 2, "a": [6.0, -9.0]})
        assert main(["constant", "--spec", path, "--no-plot"]) == 3
        captured = capsys.readouterr()
        assert "classical constant: 0.2499999999" in captured.out
        assert "degenerate" in captured.err
        assert main(["analyze", "--spec", path, "--no-plot"]) == 3

    def test_short_trajectory_exits_one(self, tmp_path, spec23, capsys):
        traj = tmp_path / "t.csv"
        traj.write_text("n,comp_0_re,comp_0_im\n0,1.0,0.0\n1,2.0,0.0\n")
        code = main(["shadow", "--spec", spec23, "--traj", str(traj), "--no-plot"])
        assert code == 1
        assert "order+1" in capsys.readouterr().err

    def test_shadow_verification_failure_exits_four(
        self, doubling, capsys, monkeypatch
    ):
        spec, traj = doubling
        from ulamkit.shadowing import VerificationReport

        monkeypatch.setattr(
            cli,
            "verify_shadow",
            lambda *a, **k: VerificationReport(
                residual=1.0,
                residual_limit=1e-9,
                max_deviation=1.0,
                deviation_limit=1e-9,
                passed=False,
            ),
        )
        code = main(["shadow", "--spec", spec, "--traj", traj, "--no-plot"])
        assert code == 4
        assert "FAIL" in capsys.readouterr().out

    def test_verify_failure_exits_four(self, spec23, capsys, monkeypatch):
        monkeypatch.setattr(cli, "_verify_determinants", lambda *a: ["det mismatch"])
        code = main(["constant", "--spec", spec23, "--verify", "--no-plot"])
        assert code == 4
        assert "det mismatch" in capsys.readouterr().err

    def test_tol_unreachable_exits_five(self, tmp_path, capsys):
        path = write_json(tmp_path / "slow.json", {"p": 1, "a": [1.00002]})
        code = main(["constant", "--spec", path, "--tol", "1e-10", "--no-plot"])
        assert code == 5
        assert "tolerance unreachable" in capsys.readouterr().err


class TestAnalyze:
    def test_mixed_spectrum_reports_classical_only(self, tmp_path, capsys):
        # roots 0.5 and 2
        path = write_json(tmp_path / "mixed.json", {"p": 2, "a": [2.5, -1.0]})
        assert main(["analyze", "--spec", path, "--no-plot"]) == 0
        out = capsys.readouterr().out
        assert "classical constant: 2" in out
        assert "not applicable" in out

    def test_writes_payload_and_convergence(self, tmp_path, spec23, capsys):
        out = tmp_path / "run"
        code = main(
            ["analyze", "--spec", spec23, "--out", str(out), "--no-plot"]
        )
        assert code == 0
        payload = json.loads((tmp_path / "run.json").read_text())
        assert payload["manifest"]["command"] == "analyze"
        assert payload["result"]["ulam_stable"] is True
        assert payload["result"]["best"]["value"] == pytest.approx(0.5, abs=1e-9)
        lines = (tmp_path / "run.csv").read_text().splitlines()
        assert lines[0] == "s,partial,tail"
        assert len(lines) == 1 + payload["result"]["best"]["terms"]

    def test_circle_payload_still_written(self, tmp_path, capsys):
        path = write_json(tmp_path / "circle.json", {"p": 1, "a": [1.0]})
        out = tmp_path / "run"
        assert main(["analyze", "--spec", path, "--out", str(out), "--no-plot"]) == 2
        payload = json.loads((tmp_path / "run.json").read_text())
        assert payload["result"]["ulam_stable"] is False
        assert payload["result"]["best"] is None

    def test_verify_passes(self, spec23, capsys):
        assert main(["analyze", "--spec", spec23, "--verify", "--no-plot"]) == 0
        assert "all cross-checks passed" in capsys.readouterr().out


class TestConstant:
    def test_frozen_doubling(self, tmp_path, capsys):
        path = write_json(tmp_path / "s.json", {"p": 1, "a": [2.0]})
        assert main(["constant", "--spec", path, "--no-plot"]) == 0
        out = capsys.readouterr().out
        assert "classical constant: 1.0" in out
        assert "sharp constant: 0.99999999" in out

    def test_payload_records_manifest(self, tmp_path, spec23):
        out = tmp_path / "kr"
        code = main(
            [
                "constant", "--spec", spec23, "--tol", "1e-11",
                "--seed", "7", "--out", str(out), "--no-plot",
            ]
        )
        assert code == 0
        payload = json.loads((tmp_path / "kr.json").read_text())
        manifest = payload["manifest"]
        assert manifest["command"] == "constant"
        assert manifest["tol"] == 1e-11
        assert manifest["seed"] == 7
        assert manifest["version"]
        best = payload["result"]["best"]
        assert best["value"] == pytest.approx(0.5, abs=1e-10)
        assert best["tail_bound"] <= 1e-11

    def test_deterministic_bytes(self, tmp_path, spec23):
        out = str(tmp_path / "same")
        blobs = []
        for _ in range(2):
            assert main(["constant", "--spec", spec23, "--out", out, "--no-plot"]) == 0
            blobs.append(
                ((tmp_path / "same.json").read_bytes(), (tmp_path / "same.csv").read_bytes())
            )
        assert blobs[0] == blobs[1]

    def test_verify_passes(self, spec23, capsys):
        assert main(["constant", "--spec", spec23, "--verify", "--no-plot"]) == 0
        assert "all cross-checks passed" in capsys.readouterr().out


class TestShadow:
    def test_frozen_doubling_example(self, doubling, tmp_path, capsys):
        spec, traj = doubling
        out = tmp_path / "shadow"
        code = main(
            ["shadow", "--spec", spec, "--traj", traj, "--out", str(out), "--no-plot"]
        )
        assert code == 0
        captured = capsys.readouterr().out
        assert "eps measured: 1.0" in captured
        assert "verification: pass" in captured
        lines = (tmp_path / "shadow.csv").read_text().splitlines()
        assert lines[0] == "n,comp_0_re,comp_0_im,cert_error,deviation"
        assert lines[1] == "0,0.875,0.0,0.125,0.875"
        assert lines[2] == "1,1.75,0.0,0.25,0.75"
        assert lines[3] == "2,3.5,0.0,0.5,0.5"
        assert lines[4] == "3,7.0,0.0,1.0,0.0"
        payload = json.loads((tmp_path / "shadow.json").read_text())["result"]
        assert payload["pass"] is True
        assert payload["eps"] == 1.0
        assert payload["residual"] == 0.0
        assert payload["coefficients"] == [[[0.875, 0.0]]]

    def test_verify_dual_path(self, doubling, capsys):
        spec, traj = doubling
        code = main(["shadow", "--spec", spec, "--traj", traj, "--verify", "--no-plot"])
        assert code == 0
        assert "all cross-checks passed" in capsys.readouterr().out

    def test_second_order_round_trip(self, tmp_path, rng, spec23, capsys):
        # simulate roots {2, 3} with a small forcing, then shadow it
        from ulamkit import Forcing, characteristic_roots, simulate

        spec_obj = read_spec(spec23)
        roots = characteristic_roots(spec_obj)
        f = Forcing.from_values(
            0.01 * rng.normal(size=(18, 1)).astype(complex), norm=spec_obj.norm
        )
        traj = simulate(spec_obj, np.array([[1.0], [1.0]], dtype=complex), f, 20)
        path = tmp_path / "t.csv"
        write_trajectory_csv(str(path), traj)
        code = main(["shadow", "--spec", spec23, "--traj", str(path), "--no-plot"])
        assert code == 0
        assert "verification: pass" in capsys.readouterr().out


class TestAdversary:
    def test_doubling_attains_constant(self, tmp_path, capsys):
        path = write_json(tmp_path / "s.json", {"p": 1, "a": [2.0]})
        out = tmp_path / "adv"
        code = main(
            [
                "adversary", "--spec", path, "--eps", "0.5",
                "--tol", "0.01", "--out", str(out), "--no-plot",
            ]
        )
        assert code == 0
        payload = json.loads((tmp_path / "adv.json").read_text())["result"]
        assert payload["pass"] is True
        assert payload["kr"] == pytest.approx(1.0, abs=1e-9)
        assert payload["ratio"] <= payload["kr"] + payload["tail_budget"] + 1e-9
        assert payload["ratio"] >= (1.0 - 0.011) * payload["kr"]
        lines = (tmp_path / "adv.csv").read_text().splitlines()
        assert lines[0] == "s,partial_ratio"
        assert len(lines) == 1 + payload["terms"]

    def test_verify_passes(self, spec23, capsys):
        code = main(["adversary", "--spec", spec23, "--verify", "--no-plot"])
        assert code == 0
        assert "all cross-checks passed" in capsys.readouterr().out

    def test_gap_above_budget_exits_four(self, spec23, monkeypatch, capsys):
        real = cli.sharpness_experiment

        def widened(*args, **kwargs):
            report = real(*args, **kwargs)
            return dataclasses.replace(report, gap=1.0)

        monkeypatch.setattr(cli, "sharpness_experiment", widened)
        assert main(["adversary", "--spec", spec23, "--no-plot"]) == 4


class TestSweep:
    def grid_file(self, tmp_path):
        return write_json(
            tmp_path / "grid.json",
            {"p": 2, "grid": [[2.0], [3.0, -2.0, 1.0, 2.0000000001]]},
        )

    def test_rows_and_skips(self, tmp_path, capsys):
        path = self.grid_file(tmp_path)
        assert main(["sweep", "--spec", path, "--no-plot"]) == 0
        captured = capsys.readouterr()
        lines = captured.out.splitlines()
        assert lines[0] == "index,root_0_re,root_0_im,root_1_re,root_1_im,classical,best,ratio"
        rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
        assert set(rows) == {"0", "1"}
        assert float(rows["0"][-2]) == pytest.approx(0.5, abs=1e-9)      # {2, 3} best
        assert float(rows["0"][-1]) == pytest.approx(1.0, abs=1e-9)
        assert float(rows["1"][-1]) == pytest.approx(1.0 / 3.0, abs=1e-9)  # {2, -2}
        assert "skipped point 2" in captured.err  # root on the unit circle
        assert "skipped point 3" in captured.err  # near-degenerate pair

    def test_empty_grid_header_only(self, tmp_path, capsys):
        path = write_json(tmp_path / "empty.json", {"p": 1, "grid": [[]]})
        assert main(["sweep", "--spec", path, "--no-plot"]) == 0
        out = capsys.readouterr().out
        assert out == "index,root_0_re,root_0_im,classical,best,ratio\n"

    def test_output_files_and_summary(self, tmp_path, capsys):
        path = self.grid_file(tmp_path)
        out = tmp_path / "sweep"
        assert main(["sweep", "--spec", path, "--out", str(out), "--no-plot"]) == 0
        assert "sweep: 2 rows, 2 skipped" in capsys.readouterr().out
        payload = json.loads((tmp_path / "sweep.json").read_text())
        assert payload["result"] == {"points": 4, "rows": 2, "skipped": 2}
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_thread_count_does_not_change_bytes(self, tmp_path, monkeypatch):
        path = self.grid_file(tmp_path)
        blobs = []
        for threads in ("1", "7"):
            monkeypatch.setenv("ULAM_THREADS", threads)
            out = tmp_path / f"t{threads}"
            assert main(["sweep", "--spec", path, "--out", str(out), "--no-plot"]) == 0
            blobs.append((tmp_path / f"t{threads}.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_invalid_thread_count(self, tmp_path, monkeypatch, capsys):
        path = self.grid_file(tmp_path)
        monkeypatch.setenv("ULAM_THREADS", "zero")
        assert main(["sweep", "--spec", path, "--no-plot"]) == 1
        monkeypatch.setenv("ULAM_THREADS", "0")
        assert main(["sweep", "--spec", path, "--no-plot"]) == 1
        assert "ULAM_THREADS" in capsys.readouterr().err

    def test_verify_failure_exits_four(self, tmp_path, monkeypatch, capsys):
        path = self.grid_file(tmp_path)
        monkeypatch.setattr(cli, "_verify_determinants", lambda *a: ["det mismatch"])
        assert main(["sweep", "--spec", path, "--verify", "--no-plot"]) == 4
        assert "verification failed" in capsys.readouterr().err


class TestFigures:
    def test_out_renders_png(self, tmp_path, spec23):
        out = tmp_path / "fig"
        assert main(["analyze", "--spec", spec23, "--out", str(out)]) == 0
        png = tmp_path / "fig.png"
        assert png.exists()
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_no_plot_suppresses_png(self, tmp_path, spec23):
        out = tmp_path / "fig"
        assert main(["analyze", "--spec", spec23, "--out", str(out), "--no-plot"]) == 0
        assert not (tmp_path / "fig.png").exists()

    def test_out_suffix_is_stripped(self, tmp_path, spec23):
        out = tmp_path / "fig.json"
        assert main(["constant", "--spec", spec23, "--out", str(out), "--no-plot"]) == 0
        assert (tmp_path / "fig.json").exists()
        assert (tmp_path / "fig.csv").exists()


class TestModuleEntry:
    def test_version_flag(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ulamkit", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip()

    def test_subprocess_analyze(self, spec23):
        proc = subprocess.run(
            [sys.executable, "-m", "ulamkit", "analyze", "--spec", spec23, "--no-plot"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "classical constant: 0.5" in proc.stdout
