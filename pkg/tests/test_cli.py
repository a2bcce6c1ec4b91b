import csv
import json

import pytest

from provdistill import cli, evalkit

TINY = {"synth": {"n_processes": 30, "n_files": 250, "n_sockets": 30, "benign_events": 2500,
                  "attack_chains": 2, "chain_length": 3},
        "featurize": {"dim": 8, "epochs": 2},
        "distill": {"iterations": 3},
        "gnn": {"epochs": 20}}


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(TINY))
    return str(path)


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def featurized(tmp_path, config):
    wd = tmp_path / "wd"
    for stage in ("synth", "ingest", "featurize"):
        assert run("--config", config, "--workdir", wd, stage) == 0
    return wd


def _csv_rows(path):
    return list(csv.reader(open(path, newline="")))


def test_pipeline_single_cell(tmp_path, config):
    wd = tmp_path / "wd"
    assert run("--config", config, "--workdir", wd, "pipeline", "--methods", "random", "--r", "0.05") == 0
    rows = _csv_rows(wd / "eval" / "comparison.csv")
    assert tuple(rows[0]) == evalkit.CSV_HEADER
    assert [(r[0], r[1]) for r in rows[1:]] == [("random", "0.05"), ("full", "NA")]
    for stage in ("synth", "ingest", "featurize", "distill/random_r0.05", "train/full", "detect/full", "eval/full"):
        assert (wd / stage / "manifest.json").exists()


def test_sgdd_exits_one(featurized, config, capsys):
    assert run("--config", config, "--workdir", featurized, "distill", "--method", "sgdd", "--r", "0.05") == 1
    assert "strategy not implemented" in capsys.readouterr().err


def test_eval_without_detect(featurized, config, capsys):
    assert run("--config", config, "--workdir", featurized, "eval") == 1
    assert "MissingArtifact" in capsys.readouterr().err


def test_stage_without_inputs(tmp_path, capsys):
    assert run("--workdir", tmp_path, "featurize") == 1
    assert "MissingArtifact" in capsys.readouterr().err


def test_checksum_mismatch(featurized, config, capsys):
    with open(featurized / "featurize" / "train_features.bin", "r+b") as fh:
        fh.seek(20)
        fh.write(b"\xff\xff")
    assert run("--config", config, "--workdir", featurized, "distill", "--method", "random", "--r", "0.1") == 1
    assert "ChecksumMismatch" in capsys.readouterr().err


def test_stage_by_stage_matches_pipeline(featurized, config, tmp_path):
    base = ("--config", config, "--workdir", featurized)
    assert run(*base, "distill", "--method", "kcenter", "--r", "0.1") == 0
    for stage in ("train", "detect"):
        assert run(*base, stage, "--method", "kcenter", "--r", "0.1") == 0
        assert run(*base, stage, "--method", "full") == 0
    assert run(*base, "eval", "--ground-truth", featurized / "synth" / "ground_truth.json") == 0
    staged = _csv_rows(featurized / "eval" / "comparison.csv")
    other = tmp_path / "other"
    assert run("--config", config, "--workdir", other, "pipeline", "--methods", "kcenter", "--r", "0.1") == 0
    piped = _csv_rows(other / "eval" / "comparison.csv")
    strip = lambda rows: [r[:-1] for r in rows]  # drop wall-clock column
    assert strip(staged) == strip(piped)


@pytest.mark.parametrize("argv", [
    ["synth", "--bogus"],
    ["distill", "--method", "random"],
    ["pipeline", "--r", "abc"],
    [],
])
def test_usage_errors(tmp_path, argv):
    assert run("--workdir", tmp_path, *argv) == 2


def test_missing_workdir_is_usage_error(monkeypatch):
    monkeypatch.delenv(cli.ENV_WORKDIR, raising=False)
    assert run("synth") == 2


def test_bad_config_is_usage_error(tmp_path):
    bad = tmp_path / "c.json"
    bad.write_text('{"distil": {}}')
    assert run("--config", bad, "--workdir", tmp_path, "synth") == 2
    bad.write_text("{")
    assert run("--config", bad, "--workdir", tmp_path, "synth") == 2
    bad.write_text('{"distill": {"iterations": 2}}')
    assert run("--config", bad, "--workdir", tmp_path, "distill", "--method", "gcdm", "--r", "2") == 2


def test_workdir_from_environment(tmp_path, config, monkeypatch):
    monkeypatch.setenv(cli.ENV_WORKDIR, str(tmp_path / "env"))
    assert run("--config", config, "synth") == 0
    assert (tmp_path / "env" / "synth" / "manifest.json").exists()


def test_flags_override_config(tmp_path, config):
    cfg = cli.load_config(config, cli._overrides(cli.build_parser().parse_args(
        ["--workdir", str(tmp_path), "--seed", "9", "synth", "--chain-length", "5"])))
    assert cfg["synth"]["chain_length"] == 5 and cfg["synth"]["n_files"] == 250
    assert cli.synth_config(cfg).seed == 9
    assert cfg["workdir"] == str(tmp_path)


def test_global_flags_after_subcommand(tmp_path, config):
    assert run("synth", "--config", config, "--workdir", tmp_path / "late") == 0


def test_sweep_rates_accepted(tmp_path):
    cfg = cli.load_config(None, {"workdir": str(tmp_path), "distill": {"r": list(evalkit.R_SWEEP)}})
    cells = cli.pipeline_runs(cfg)
    assert len(cells) == 5 * 7 + 1
    for m, r in cells[:-1]:
        cli.distill_config(cfg, m, r)
        assert cli.parse_run_id(cli.run_id(m, r)) == (m, r)


def test_rerun_is_cached_and_reproducible(featurized, config):
    manifest = featurized / "featurize" / "manifest.json"
    before = manifest.read_bytes()
    stamp = manifest.stat().st_mtime_ns
    assert run("--config", config, "--workdir", featurized, "featurize") == 0
    assert manifest.stat().st_mtime_ns == stamp  # up to date, not rewritten
    assert run("--config", config, "--workdir", featurized, "featurize", "--force") == 0
    assert manifest.read_bytes() == before
