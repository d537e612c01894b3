import csv
import json

import pytest

from heliotrope.cli import main
from heliotrope.sphere import angle_between, direction_from_angles


def _read_rows(path):
    with open(path) as f:
        header = f.readline()
        assert header.startswith("# ")
        json.loads(header[2:])  # header comment is the serialized RunConfig
        return list(csv.DictReader(f))


class TestOrient:
    def test_uniform_recipe_converges_at_start(self, tmp_path):
        code = main(["orient", "--recipe", "uniform", "--start", "20,45", "--out", str(tmp_path)])
        assert code == 0
        rows = _read_rows(tmp_path / "summary.csv")
        assert rows[0]["converged"] == "1"
        assert float(rows[0]["zenith_deg"]) == pytest.approx(20.0, abs=1e-3)

    def test_point_sun_final_near_sun(self, tmp_path):
        code = main(
            ["orient", "--recipe", "sun:35,150", "--start", "70,330", "--out", str(tmp_path)]
        )
        assert code == 0
        row = _read_rows(tmp_path / "summary.csv")[0]
        final = direction_from_angles(float(row["zenith_deg"]), float(row["azimuth_deg"]))
        assert angle_between(final, direction_from_angles(35.0, 150.0)) < 7.1

    def test_max_iters_exit_code(self, tmp_path):
        code = main(
            [
                "orient",
                "--recipe",
                "sun:35,150",
                "--start",
                "80,330",
                "--max-iters",
                "1",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 2

    def test_missing_map_file(self, tmp_path):
        code = main(["orient", "--map", str(tmp_path / "nope.pfm"), "--out", str(tmp_path)])
        assert code == 1

    def test_unknown_flag_exits_one(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["orient", "--recipe", "uniform", "--frobnicate", "--out", str(tmp_path)])
        assert exc.value.code == 1


class TestScalespace:
    def test_mode_counts_decrease(self, tmp_path, capsys):
        code = main(
            ["scalespace", "--profile-seed", "0", "--tilts", "5,45,90", "--out", str(tmp_path)]
        )
        assert code == 0
        printed = capsys.readouterr().out
        counts = [int(line.split()[-3]) for line in printed.splitlines() if "blurred" in line]
        assert counts == sorted(counts, reverse=True)
        assert counts[-1] == 1
        for tilt in ("5", "45", "90"):
            assert (tmp_path / f"profile_tilt{tilt}.csv").exists()
        assert (tmp_path / "scalespace.png").exists()


class TestBenchmarkCommand:
    def test_uniform_corpus_all_perfect(self, tmp_path):
        code = main(
            [
                "benchmark",
                "--corpus",
                "uniform",
                "--count",
                "2",
                "--starts",
                "4",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 0
        for row in _read_rows(tmp_path / "benchmark.csv"):
            assert float(row["mean_pct_of_optimal"]) == pytest.approx(100.0, abs=0.5)

    def test_unknown_strategy(self, tmp_path):
        code = main(["benchmark", "--strategies", "voodoo", "--out", str(tmp_path)])
        assert code == 1


class TestDeterminism:
    def test_sweep_tilt_byte_identical(self, tmp_path):
        args = [
            "sweep-tilt",
            "--count",
            "2",
            "--corpus",
            "multimodal",
            "--tilts",
            "5,45",
            "--starts",
            "4",
            "--grid-size",
            "64",
        ]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert (out_a / "sweep.csv").read_bytes() == (out_b / "sweep.csv").read_bytes()

    def test_simulate_day_byte_identical(self, tmp_path):
        args = [
            "simulate-day",
            "--lat",
            "40.71",
            "--lon",
            "-74.01",
            "--date",
            "2024-06-20",
            "--tz",
            "-4",
            "--interval",
            "120",
            "--grid-size",
            "32",
        ]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        for name in ("summary.csv", "ledger_proposed.csv", "ledger_sun_tracker.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_orient_byte_identical(self, tmp_path):
        args = ["orient", "--recipe", "7", "--start", "50,200", "--grid-size", "64"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(args + ["--out", str(out_a)])
        main(args + ["--out", str(out_b)])
        assert (out_a / "trajectory.csv").read_bytes() == (out_b / "trajectory.csv").read_bytes()


class TestSimulateDayCommand:
    def test_canyon_batch_outputs(self, tmp_path):
        code = main(
            [
                "simulate-day",
                "--lat",
                "40.71",
                "--lon",
                "-74.01",
                "--date",
                "2024-06-20",
                "--tz",
                "-4",
                "--interval",
                "120",
                "--grid-size",
                "32",
                "--locations",
                "2",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 0
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "histograms.csv").exists()
        assert (tmp_path / "histograms.png").exists()
        rows = _read_rows(tmp_path / "summary.csv")
        assert len({r["location_id"] for r in rows}) == 2

    def test_bad_date(self, tmp_path):
        code = main(
            [
                "simulate-day",
                "--lat",
                "0",
                "--lon",
                "0",
                "--date",
                "garbage",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 1
