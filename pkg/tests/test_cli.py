"""CLI surface: command round trips, library equivalence, exit codes."""

import json

import numpy as np
import pytest

from subsketch import (
    SketchSpec,
    apply as lib_apply,
    build_osnap,
    exact_leverage,
    load_matrix,
    load_sketch,
    save_matrix,
)
from subsketch.cli import EXIT_IO, EXIT_OK, EXIT_PARAMETER, EXIT_VERIFY, main


@pytest.fixture
def matrix_file(tmp_path):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((200, 6))
    path = tmp_path / "A.mtx"
    save_matrix(path, A)
    return path, A


class TestSketchCommand:
    def test_sketch_then_apply_matches_library(self, tmp_path, matrix_file):
        mpath, A = matrix_file
        skt = tmp_path / "s.skt"
        out = tmp_path / "out.mtx"
        rc = main(["sketch", "--kind", "osnap", "--m", "64", "--n", "200",
                   "--p", "0.125", "--seed", "1", "--out", str(skt)])
        assert rc == EXIT_OK
        rc = main(["apply", str(skt), str(mpath), "--out", str(out)])
        assert rc == EXIT_OK
        spec = SketchSpec(kind="osnap", m=64, n=200, p=0.125, seed=1,
                          degree_k=8, family="kwise")
        want = lib_apply(build_osnap(spec), A)
        got = load_matrix(out)
        np.testing.assert_array_equal(got, want)

    def test_less_ic_needs_scores(self, tmp_path):
        rc = main(["sketch", "--kind", "less-ic", "--m", "32", "--p", "0.25",
                   "--out", str(tmp_path / "s.skt")])
        assert rc == EXIT_PARAMETER

    def test_less_ic_with_scores(self, tmp_path, matrix_file):
        mpath, A = matrix_file
        scores_path = tmp_path / "scores.json"
        rc = main(["leverage", str(mpath), "--exact", "--out", str(scores_path)])
        assert rc == EXIT_OK
        rc = main(["sketch", "--kind", "less-ic", "--m", "64", "--s", "8",
                   "--scores", str(scores_path), "--seed", "2",
                   "--out", str(tmp_path / "s.skt")])
        assert rc == EXIT_OK
        sk = load_sketch(tmp_path / "s.skt")
        assert sk.spec.kind == "less-ic"
        assert "scores_sha256" in sk.spec.extras

    def test_structural_error_exit_code(self, tmp_path):
        rc = main(["sketch", "--kind", "osnap", "--m", "4", "--n", "3",
                   "--p", "0.75", "--out", str(tmp_path / "s.skt")])
        assert rc == EXIT_PARAMETER


class TestLeverageCommand:
    def test_exact_scores_roundtrip(self, tmp_path, matrix_file):
        mpath, A = matrix_file
        out = tmp_path / "scores.json"
        assert main(["leverage", str(mpath), "--exact", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        np.testing.assert_allclose(payload["z"], exact_leverage(A).z, atol=1e-12)

    def test_gamma_mode(self, tmp_path, matrix_file):
        mpath, _ = matrix_file
        out = tmp_path / "scores.json"
        rc = main(["leverage", str(mpath), "--gamma", "0.5", "--seed", "3",
                   "--out", str(out)])
        assert rc == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["beta1"] >= 4.0


class TestApplyCommand:
    def test_missing_file_is_io_error(self, tmp_path):
        rc = main(["apply", str(tmp_path / "none.skt"), str(tmp_path / "none.mtx"),
                   "--out", str(tmp_path / "o.mtx")])
        assert rc == EXIT_IO

    def test_dimension_mismatch_is_parameter_error(self, tmp_path, matrix_file):
        mpath, _ = matrix_file
        skt = tmp_path / "s.skt"
        main(["sketch", "--kind", "osnap", "--m", "16", "--n", "50",
              "--p", "0.25", "--out", str(skt)])
        rc = main(["apply", str(skt), str(mpath), "--out", str(tmp_path / "o.mtx")])
        assert rc == EXIT_PARAMETER

    def test_malformed_matrix_is_io_error(self, tmp_path):
        skt = tmp_path / "s.skt"
        main(["sketch", "--kind", "osnap", "--m", "16", "--n", "50",
              "--p", "0.25", "--out", str(skt)])
        bad = tmp_path / "bad.mtx"
        bad.write_text("not a matrix market file\n")
        rc = main(["apply", str(skt), str(bad), "--out", str(tmp_path / "o.mtx")])
        assert rc == EXIT_IO


class TestVerifyCommand:
    def test_passing_config(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "experiment": "embedding",
            "kind": "gaussian-dense",
            "d": 8,
            "n": 256,
            "eps": 0.9,
            "delta": 0.05,
            "trials": 20,
            "seed": 4,
            "sampler": "haar",
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "report.json"
        rc = main(["verify", "--config", str(path), "--out", str(out)])
        assert rc == EXIT_OK
        report = json.loads(out.read_text())
        assert report["result"]["failure_fraction"] == 0.0

    def test_failing_config_exit_4(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "experiment": "embedding",
            "kind": "gaussian-dense",
            "d": 8,
            "n": 64,
            "m": 16,
            "eps": 0.05,
            "delta": 0.05,
            "trials": 10,
            "seed": 5,
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert main(["verify", "--config", str(path)]) == EXIT_VERIFY

    def test_bad_schema_version(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"schema_version": 99}))
        assert main(["verify", "--config", str(path)]) == EXIT_PARAMETER

    def test_missing_keys_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"schema_version": 1, "experiment": "embedding",
                                    "kind": "osnap"}))
        assert main(["verify", "--config", str(path)]) == EXIT_PARAMETER

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{nope")
        assert main(["verify", "--config", str(path)]) == EXIT_IO

    def test_score_adapted_embedding_config(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "experiment": "embedding",
            "kind": "less-ic",
            "d": 4,
            "n": 256,
            "m": 96,
            "s": 12,
            "eps": 0.6,
            "delta": 0.1,
            "trials": 15,
            "seed": 8,
            "sampler": "haar",
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "report.json"
        assert main(["verify", "--config", str(path), "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["config"]["m"] == 96

    def test_moment_config(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "experiment": "gamma_moment",
            "kind": "osnap",
            "d": 8,
            "n": 128,
            "m": 64,
            "s": 16,
            "eps": 0.5,
            "delta": 0.05,
            "q": 1,
            "trials": 30,
            "seed": 6,
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "probe.json"
        assert main(["verify", "--config", str(path), "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["result"]["estimate"] > 0


class TestBenchCommand:
    def test_s_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["bench", "--sweep", "s", "--kind", "osnap", "--trials", "5",
                   "--n", "256", "--d", "4", "--out", str(out)])
        assert rc == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("kind,")
        assert len(lines) > 1

    def test_nnz_sweep_trend(self, tmp_path):
        out = tmp_path / "nnz.csv"
        rc = main(["bench", "--sweep", "nnz", "--n", "2048", "--d", "8",
                   "--out", str(out)])
        assert rc == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("nnz,")
        assert len(lines) == 5

    def test_needs_mode(self):
        assert main(["bench"]) == EXIT_PARAMETER


class TestPipelineCommand:
    def test_pipeline_run(self, tmp_path, matrix_file):
        mpath, _ = matrix_file
        out = tmp_path / "embedded.mtx"
        report_path = tmp_path / "report.json"
        rc = main(["pipeline", str(mpath), "--eps", "0.5", "--kind", "less-ic",
                   "--seed", "7", "--validate", "--out", str(out),
                   "--report", str(report_path)])
        assert rc == EXIT_OK
        report = json.loads(report_path.read_text())
        assert report["nnz_sketch"] <= report["nnz_bound"]
        embedded = load_matrix(out)
        assert embedded.shape == (report["m"], 6)
