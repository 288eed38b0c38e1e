"""End-to-end tests of the command line front end.

These drive run() with argv lists, never a subprocess, so exit codes and
emitted files are checked directly.  Determinism matters throughout: the
same flags must produce byte-identical data files.
"""

from __future__ import annotations

import csv
import json

import pytest

from treesnake.cli import run
from treesnake.plane_tree import tree_from_line


def read_json_stdout(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestVerifySubcommand:
    def test_reroot_identity_passes(self, capsys):
        assert run(["verify", "--identity", "reroot", "--n", "3"]) == 0
        report = read_json_stdout(capsys)
        assert report["identity"] == "reroot"
        assert report["equal"] is True

    def test_closed_identity_with_pm1(self, capsys):
        assert run(["verify", "--identity", "reroot-closed", "--n", "2",
                    "--gamma", "pm1"]) == 0
        assert read_json_stdout(capsys)["equal"] is True

    def test_census(self, capsys):
        assert run(["verify", "--identity", "census", "--n", "3"]) == 0
        report = read_json_stdout(capsys)
        assert [e["well_labelled"] for e in report["entries"]] == [2, 9, 54]

    def test_size_law(self, capsys):
        assert run(["verify", "--identity", "size-law", "--n", "4"]) == 0
        assert read_json_stdout(capsys)["equal"] is True

    def test_quad_battery(self, capsys):
        assert run(["verify", "--identity", "quad", "--n", "2"]) == 0
        report = read_json_stdout(capsys)
        assert report["checked"] == 9
        assert report["failures"] == []

    def test_report_file_written(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert run(["verify", "--identity", "census", "--n", "2",
                    "--out", str(out)]) == 0
        on_disk = json.loads(out.read_text())
        assert on_disk == read_json_stdout(capsys)

    def test_bad_n_is_usage_error(self, capsys):
        assert run(["verify", "--identity", "census", "--n", "0"]) == 2
        capsys.readouterr()


class TestSampleSubcommand:
    def test_plain_trees_parse_back(self, tmp_path, capsys):
        out = tmp_path / "trees.csv"
        assert run(["sample", "--measure", "Pi-n", "--n", "5", "--samples", "8",
                    "--seed", "11", "--out", str(out)]) == 0
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert len(rows) == 8
        for row in rows:
            assert tree_from_line(row["tree"]).n_edges == 5
        payload = read_json_stdout(capsys)
        assert payload["manifest"]["subcommand"] == "sample"
        assert payload["summary"]["rows"] == 8

    def test_labelled_trees_have_labels_column(self, tmp_path, capsys):
        out = tmp_path / "spatial.csv"
        assert run(["sample", "--measure", "P-n-x", "--n", "3", "--x", "2",
                    "--samples", "5", "--seed", "4", "--out", str(out)]) == 0
        capsys.readouterr()
        rows = list(csv.DictReader(out.read_text().splitlines()))
        for row in rows:
            labels = [int(v) for v in row["labels"].split(";")]
            assert labels[0] == 2
            assert len(labels) == tree_from_line(row["tree"]).size

    def test_conditioned_labels_stay_positive(self, tmp_path, capsys):
        out = tmp_path / "cond.csv"
        assert run(["sample", "--measure", "Pbar-n-x", "--n", "4", "--x", "1",
                    "--samples", "6", "--seed", "2", "--out", str(out)]) == 0
        capsys.readouterr()
        for row in csv.DictReader(out.read_text().splitlines()):
            assert min(int(v) for v in row["labels"].split(";")) >= 1

    def test_same_seed_same_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sample", "--measure", "P-n-x", "--n", "4", "--samples", "10",
                "--seed", "77"]
        assert run(argv + ["--out", str(a)]) == 0
        assert run(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_worker_split_covers_budget(self, tmp_path, capsys):
        out = tmp_path / "w.csv"
        assert run(["sample", "--measure", "Pi-n", "--n", "3", "--samples", "5",
                    "--seed", "6", "--workers", "3", "--out", str(out)]) == 0
        capsys.readouterr()
        assert len(out.read_text().splitlines()) == 6

    def test_sized_measure_requires_n(self, capsys):
        assert run(["sample", "--measure", "Pi-n", "--samples", "2",
                    "--seed", "1"]) == 2
        capsys.readouterr()

    def test_seed_is_mandatory(self):
        with pytest.raises(SystemExit) as exc:
            run(["sample", "--measure", "Pi", "--samples", "1"])
        assert exc.value.code == 2

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 2


class TestQuadSubcommand:
    def test_one_face_frequency_table(self, tmp_path, capsys):
        out = tmp_path / "freq.csv"
        assert run(["quad", "--n", "1", "--samples", "400", "--seed", "7",
                    "--out", str(out)]) == 0
        payload = read_json_stdout(capsys)
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert payload["summary"]["distinct_codes"] == 2
        assert len(rows) == 2
        assert sum(int(r["count"]) for r in rows) == 400

    def test_reproducible(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["quad", "--n", "2", "--samples", "300", "--seed", "13"]
        assert run(argv + ["--out", str(a)]) == 0
        assert run(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()


class TestSnakeSubcommand:
    def test_range_csv(self, tmp_path, capsys):
        out = tmp_path / "ranges.csv"
        assert run(["snake", "--grid", "128", "--samples", "40", "--seed", "3",
                    "--out", str(out)]) == 0
        payload = read_json_stdout(capsys)
        lines = out.read_text().splitlines()
        assert lines[0] == "value"
        values = [float(v) for v in lines[1:]]
        assert len(values) == 40
        assert all(v > 0 for v in values)
        assert payload["summary"]["mean_range"] > 0

    def test_degenerate_grid_rejected(self, capsys):
        assert run(["snake", "--grid", "1", "--samples", "5", "--seed", "1"]) == 2
        capsys.readouterr()


class TestCompareSubcommand:
    def test_report_shape_and_exit_consistency(self, capsys):
        status = run(["compare", "--discrete-n", "40", "--grid", "256",
                      "--samples", "400", "--seed", "21"])
        report = read_json_stdout(capsys)
        assert set(report) >= {"statistic", "n_a", "n_b", "threshold", "pass"}
        assert report["n_a"] == 400 and report["n_b"] == 400
        assert status == (0 if report["pass"] else 1)

    def test_report_file_matches_stdout(self, tmp_path, capsys):
        out = tmp_path / "ks.json"
        status = run(["compare", "--discrete-n", "30", "--grid", "128",
                      "--samples", "200", "--seed", "5", "--out", str(out)])
        assert status in (0, 1)
        assert json.loads(out.read_text()) == read_json_stdout(capsys)
