"""End-to-end command-line runs against a synthetic on-disk dataset."""

import json
import subprocess
import sys

import numpy as np
import pytest

from topokernel import __version__
from topokernel.cli import main

from conftest import separable_graphs, write_tu_dataset


def read_manifest(path):
    out = {}
    for line in path.read_text().splitlines():
        key, _, value = line.partition(" = ")
        out[key] = value
    return out


@pytest.fixture(scope="module")
def data_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    graphs, labels = separable_graphs(n_per_class=6, seed=33)
    write_tu_dataset(root / "TOY12", "TOY12", graphs, labels)
    return root


def run(data_root, out, *argv):
    return main([*argv, "--dataset-dir", str(data_root), "--out", str(out)])


class TestFingerprint:
    def test_writes_csv_and_manifest(self, data_root, tmp_path, capsys):
        out = tmp_path / "fp.csv"
        rc = run(data_root, out, "fingerprint", "--dataset", "TOY12")
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "graph_id,wiener,estrada,randic,label"
        assert len(lines) == 13
        assert "wrote 12 fingerprints" in capsys.readouterr().out
        manifest = read_manifest(tmp_path / "fp.csv.manifest.txt")
        assert manifest["command"].startswith("topokernel fingerprint")
        assert manifest["version"] == __version__
        assert manifest["rows"] == "12"
        assert manifest["schema"] == "wiener,estrada,randic"
        assert manifest["dataset"] == "TOY12"

    def test_rerun_byte_identical(self, data_root, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(data_root, a, "fingerprint", "--dataset", "TOY12") == 0
        assert run(data_root, b, "fingerprint", "--dataset", "TOY12") == 0
        assert a.read_bytes() == b.read_bytes()

    def test_custom_schema(self, data_root, tmp_path):
        out = tmp_path / "fp.csv"
        rc = run(
            data_root, out, "fingerprint", "--dataset", "TOY12",
            "--schema", "randic,wiener",
        )
        assert rc == 0
        assert out.read_text().splitlines()[0] == "graph_id,randic,wiener,label"

    def test_unknown_schema_index_is_usage_error(self, data_root, tmp_path, capsys):
        out = tmp_path / "fp.csv"
        rc = run(
            data_root, out, "fingerprint", "--dataset", "TOY12",
            "--schema", "wiener,zagreb",
        )
        assert rc == 2
        assert "unknown index 'zagreb'" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_dataset_is_data_error(self, data_root, tmp_path, capsys):
        out = tmp_path / "fp.csv"
        rc = run(data_root, out, "fingerprint", "--dataset", "NOPE")
        assert rc == 1
        assert "NOPE_A.txt" in capsys.readouterr().err

    def test_env_var_dataset_dir(self, data_root, tmp_path, monkeypatch):
        monkeypatch.setenv("TOPOKERNEL_DATA_DIR", str(data_root))
        out = tmp_path / "fp.csv"
        rc = main(["fingerprint", "--dataset", "TOY12", "--out", str(out)])
        assert rc == 0
        assert out.exists()


class TestGram:
    def test_efv_gram_with_sidecar(self, data_root, tmp_path):
        out = tmp_path / "gram.csv"
        rc = run(
            data_root, out, "gram", "--dataset", "TOY12",
            "--method", "efv", "--gamma", "0.5",
        )
        assert rc == 0
        rows = [line.split(",") for line in out.read_text().splitlines()]
        assert len(rows) == 12 and all(len(r) == 12 for r in rows)
        values = np.array([[float(v) for v in r] for r in rows])
        assert np.allclose(np.diag(values), 1.0)
        assert np.allclose(values, values.T)
        meta = json.loads((tmp_path / "gram.csv.meta.json").read_text())
        assert meta["method"] == "efv"
        assert meta["params"]["gamma"] == 0.5
        assert meta["dataset"] == "TOY12"
        assert meta["size"] == 12
        assert meta["build_seconds"] >= 0.0
        manifest = read_manifest(tmp_path / "gram.csv.manifest.txt")
        assert manifest["method"] == "efv"

    def test_lctk_gram_records_weights(self, data_root, tmp_path):
        out = tmp_path / "gram.csv"
        rc = run(
            data_root, out, "gram", "--dataset", "TOY12",
            "--method", "lctk", "--gamma", "1.0", "--weights", "0.5,0.3,0.2",
        )
        assert rc == 0
        manifest = read_manifest(tmp_path / "gram.csv.manifest.txt")
        assert manifest["weights"] == "0.5;0.29999999999999999;0.20000000000000001"

    def test_wl_gram_needs_no_gamma(self, data_root, tmp_path):
        out = tmp_path / "gram.csv"
        rc = run(
            data_root, out, "gram", "--dataset", "TOY12", "--method", "wl", "--h", "2"
        )
        assert rc == 0
        meta = json.loads((tmp_path / "gram.csv.meta.json").read_text())
        assert meta["method"] == "wl"
        assert meta["params"]["h"] == 2

    def test_lctk_without_weights_is_usage_error(self, data_root, tmp_path, capsys):
        out = tmp_path / "gram.csv"
        rc = run(
            data_root, out, "gram", "--dataset", "TOY12",
            "--method", "lctk", "--gamma", "1.0",
        )
        assert rc == 2
        assert "--weights" in capsys.readouterr().err

    def test_two_weights_is_usage_error(self, data_root, tmp_path, capsys):
        out = tmp_path / "gram.csv"
        rc = run(
            data_root, out, "gram", "--dataset", "TOY12",
            "--method", "lctk", "--gamma", "1.0", "--weights", "0.5,0.5",
        )
        assert rc == 2
        assert "exactly three" in capsys.readouterr().err

    def test_missing_gamma_is_usage_error(self, data_root, tmp_path, capsys):
        out = tmp_path / "gram.csv"
        rc = run(data_root, out, "gram", "--dataset", "TOY12", "--method", "efv")
        assert rc == 2
        assert "--gamma" in capsys.readouterr().err

    def test_unknown_method_is_usage_error(self, data_root, tmp_path, capsys):
        out = tmp_path / "gram.csv"
        rc = run(data_root, out, "gram", "--dataset", "TOY12", "--method", "rw")
        assert rc == 2
        assert "unknown method" in capsys.readouterr().err


class TestEvaluate:
    def test_cv_run(self, data_root, tmp_path, capsys):
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "evaluate", "--dataset", "TOY12",
            "--method", "efv", "--c", "10", "--gamma", "0.5",
            "--k", "3", "--seed", "4",
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        cells = lines[1].split(",")
        assert cells[0] == "TOY12" and cells[1] == "efv"
        assert 0.0 <= float(cells[5]) <= 1.0
        assert cells[9] == "4"
        assert "accuracy" in capsys.readouterr().out
        manifest = read_manifest(tmp_path / "results.csv.manifest.txt")
        assert manifest["k"] == "3"
        assert manifest["C"] == "10"

    def test_rerun_byte_identical(self, data_root, tmp_path):
        args = (
            "evaluate", "--dataset", "TOY12", "--method", "single_wiener",
            "--c", "1", "--gamma", "1", "--k", "3", "--seed", "0",
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(data_root, a, *args) == 0
        assert run(data_root, b, *args) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_holdout_mode(self, data_root, tmp_path):
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "evaluate", "--dataset", "TOY12",
            "--method", "efv", "--c", "10", "--gamma", "0.5",
            "--holdout", "0.75", "--seed", "1",
        )
        assert rc == 0
        manifest = read_manifest(tmp_path / "results.csv.manifest.txt")
        assert manifest["train_fraction"] == "0.75"
        assert "k" not in manifest

    def test_bad_holdout_fraction(self, data_root, tmp_path, capsys):
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "evaluate", "--dataset", "TOY12",
            "--method", "efv", "--c", "10", "--gamma", "0.5", "--holdout", "1.5",
        )
        assert rc == 2
        assert "--holdout" in capsys.readouterr().err

    def test_nonpositive_c(self, data_root, tmp_path, capsys):
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "evaluate", "--dataset", "TOY12",
            "--method", "efv", "--c", "-1", "--gamma", "0.5",
        )
        assert rc == 2
        assert "--c must be positive" in capsys.readouterr().err

    def test_wl_evaluate(self, data_root, tmp_path):
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "evaluate", "--dataset", "TOY12",
            "--method", "wl", "--h", "2", "--c", "1", "--k", "3",
        )
        assert rc == 0
        cells = out.read_text().splitlines()[1].split(",")
        assert cells[1] == "wl" and cells[4] == ""


class TestGridsearch:
    def test_grid_file_run(self, data_root, tmp_path, capsys):
        grid = tmp_path / "grid.txt"
        grid.write_text(
            "# small grid\n"
            "c = 1 10\n"
            "gamma = 0.5\n"
            "weights = 0.5, 0.3, 0.2\n"
            "weights = 1, 0, 0\n"
        )
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--method", "lctk", "--grid-file", str(grid), "--k", "3",
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5  # header + 2 weights * 2 C * 1 gamma
        manifest = read_manifest(tmp_path / "results.csv.manifest.txt")
        assert manifest["cells"] == "4"
        assert float(manifest["best_mean_acc"]) >= 0.5
        assert manifest["best_C"] in ("1", "10")
        assert "best accuracy" in capsys.readouterr().out

    def test_best_row_present_in_csv(self, data_root, tmp_path):
        grid = tmp_path / "grid.txt"
        grid.write_text("c = 1\ngamma = 0.5 1\nweights = 1, 0, 0\n")
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--method", "lctk", "--grid-file", str(grid), "--k", "3",
        )
        assert rc == 0
        manifest = read_manifest(tmp_path / "results.csv.manifest.txt")
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        best = [
            r for r in rows
            if float(r[3]) == float(manifest["best_C"])
            and float(r[4]) == float(manifest["best_gamma"])
        ]
        assert best
        assert float(best[0][5]) == float(manifest["best_mean_acc"])

    def test_wl_gridsearch_c_axis_only(self, data_root, tmp_path):
        grid = tmp_path / "grid.txt"
        grid.write_text("c = 0.5 5\n")
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--method", "wl", "--h", "1", "--grid-file", str(grid), "--k", "3",
        )
        assert rc == 0
        assert len(out.read_text().splitlines()) == 3

    def test_malformed_grid_line_reports_position(self, data_root, tmp_path, capsys):
        grid = tmp_path / "grid.txt"
        grid.write_text("c = 1\ngamma 0.5\n")
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--grid-file", str(grid),
        )
        assert rc == 2
        assert f"{grid}:2" in capsys.readouterr().err

    def test_unknown_grid_key(self, data_root, tmp_path, capsys):
        grid = tmp_path / "grid.txt"
        grid.write_text("cc = 1\n")
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--grid-file", str(grid),
        )
        assert rc == 2
        assert "unknown key 'cc'" in capsys.readouterr().err

    def test_bad_weights_in_grid_file(self, data_root, tmp_path, capsys):
        grid = tmp_path / "grid.txt"
        grid.write_text("weights = 0.9, 0.9, 0.9\n")
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--grid-file", str(grid),
        )
        assert rc == 2
        assert "sum to 1" in capsys.readouterr().err

    def test_missing_grid_file(self, data_root, tmp_path, capsys):
        out = tmp_path / "results.csv"
        rc = run(
            data_root, out, "gridsearch", "--dataset", "TOY12",
            "--grid-file", str(tmp_path / "absent.txt"),
        )
        assert rc == 2
        assert "cannot read grid file" in capsys.readouterr().err


class TestBench:
    def test_two_methods(self, data_root, tmp_path, capsys):
        out = tmp_path / "timing.csv"
        rc = run(
            data_root, out, "bench", "--dataset", "TOY12",
            "--methods", "single_randic,wl", "--reps", "2", "--h", "1",
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "dataset,method,reps,mean_s,std_s"
        assert len(lines) == 3
        assert lines[1].split(",")[1] == "single_randic"
        assert lines[2].split(",")[1] == "wl"
        assert all(line.split(",")[2] == "2" for line in lines[1:])
        assert capsys.readouterr().out.count("+/-") == 2

    def test_zero_reps(self, data_root, tmp_path, capsys):
        out = tmp_path / "timing.csv"
        rc = run(
            data_root, out, "bench", "--dataset", "TOY12",
            "--methods", "efv", "--reps", "0",
        )
        assert rc == 2
        assert "--reps" in capsys.readouterr().err


class TestScaling:
    def test_rows_written(self, tmp_path, capsys):
        out = tmp_path / "scaling.csv"
        rc = main([
            "scaling", "--p", "0.2", "--sizes", "8,12",
            "--methods", "randic,wiener", "--seed", "1", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,p,method,seconds,seed"
        assert len(lines) == 5
        assert "wrote 4 scaling rows" in capsys.readouterr().out
        manifest = read_manifest(tmp_path / "scaling.csv.manifest.txt")
        assert manifest["sizes"] == "8,12"

    def test_p_out_of_range(self, tmp_path, capsys):
        rc = main([
            "scaling", "--p", "1.5", "--sizes", "8",
            "--methods", "randic", "--out", str(tmp_path / "s.csv"),
        ])
        assert rc == 2
        assert "--p must be in [0, 1]" in capsys.readouterr().err

    def test_bad_sizes(self, tmp_path, capsys):
        rc = main([
            "scaling", "--p", "0.2", "--sizes", "8,oops",
            "--methods", "randic", "--out", str(tmp_path / "s.csv"),
        ])
        assert rc == 2
        assert "--sizes" in capsys.readouterr().err

    def test_descending_sizes(self, tmp_path, capsys):
        rc = main([
            "scaling", "--p", "0.2", "--sizes", "12,8",
            "--methods", "randic", "--out", str(tmp_path / "s.csv"),
        ])
        assert rc == 2
        assert "ascending" in capsys.readouterr().err


class TestParser:
    def test_no_command_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_module_entry_point(self, data_root, tmp_path):
        out = tmp_path / "fp.csv"
        proc = subprocess.run(
            [
                sys.executable, "-m", "topokernel", "fingerprint",
                "--dataset-dir", str(data_root), "--dataset", "TOY12",
                "--out", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
        assert "wrote 12 fingerprints" in proc.stdout
