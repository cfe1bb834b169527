from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from earlywarn.cli import main
from earlywarn.series import read_series_csv

GOLDEN = Path(__file__).parent / "golden"


def _fixture_args(fixture_dir: Path, out: Path | str, *extra: str) -> list[str]:
    return ["run", "--config", str(fixture_dir / "config.json"), "--tweets", str(fixture_dir / "tweets.jsonl"),
            "--cases", str(fixture_dir / "cases.csv"), "--out", str(out), *extra]


def _tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def fixture_run(tmp_path_factory, fixture_dir):
    out = tmp_path_factory.mktemp("run") / "out"
    assert main(_fixture_args(fixture_dir, out)) == 0
    return out


def test_run_matches_golden(fixture_run):
    assert (fixture_run / "report.csv").read_bytes() == (GOLDEN / "report.csv").read_bytes()


def test_run_output_tree(fixture_run):
    names = set(_tree(fixture_run))
    assert {"report.csv", "distribution.csv", "resolved_config.json", "ingest_stats.json",
            "location_misses.csv"} <= names
    assert {n for n in names if n.startswith("charts/")} == {
        "charts/Arizona.svg", "charts/California.svg", "charts/Colorado.svg", "charts/New_York.svg",
        "charts/Wyoming.svg"}
    assert not list(fixture_run.parent.glob(".out.partial-*"))


def test_run_stats_and_misses(fixture_run):
    stats = json.loads((fixture_run / "ingest_stats.json").read_text())
    t = stats["tweets"]
    assert t["tweets"]["malformed"] == 1 and t["tweets"]["duplicate_ids"] == 1
    assert t["tweets"]["rejected_window"] == 1
    assert t["filtered_out"] == 2 and t["unlocated"] == 2
    assert stats["cases"]["bad_cells"] == 1 and stats["cases"]["monotonic_repairs"] == 2
    misses = (fixture_run / "location_misses.csv").read_text().splitlines()
    assert misses == ["raw_location,count", ",1", "Gotham City,1"]


def test_resolved_config_precedence(fixture_run, tmp_path, fixture_dir):
    cfg = json.loads((fixture_run / "resolved_config.json").read_text())
    assert cfg["study_end"] == "2020-03-31"  # from the config file
    assert cfg["threshold"] == 100  # default
    assert cfg["format"] == "csv"
    out = tmp_path / "o"
    assert main(_fixture_args(fixture_dir, out, "--format", "json", "--threshold", "150")) == 0
    cfg = json.loads((out / "resolved_config.json").read_text())
    assert cfg["format"] == "json" and cfg["threshold"] == 150
    assert (out / "report.json").exists() and not (out / "report.csv").exists()


def test_identical_runs_identical_trees(tmp_path, fixture_dir, monkeypatch):
    trees = []
    for name in ("a", "b"):
        cwd = tmp_path / name
        cwd.mkdir()
        monkeypatch.chdir(cwd)
        assert main(_fixture_args(fixture_dir, "out", "--workers", "4")) == 0
        trees.append(_tree(cwd / "out"))
    assert trees[0] == trees[1]


def test_state_filter(tmp_path, fixture_dir):
    out = tmp_path / "o"
    assert main(_fixture_args(fixture_dir, out, "--states", "New_York, USA")) == 0
    lines = (out / "report.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith('"New_York, USA",')
    assert [p.name for p in (out / "charts").iterdir()] == ["New_York.svg"]


def test_unknown_state_is_an_error(tmp_path, fixture_dir, capsys):
    assert main(_fixture_args(fixture_dir, tmp_path / "o", "--states", "Gotham, USA")) == 1
    assert "Gotham" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_missing_tweet_file(tmp_path, fixture_dir, capsys):
    missing = tmp_path / "no_such_tweets.jsonl"
    args = _fixture_args(fixture_dir, tmp_path / "o")
    args[args.index("--tweets") + 1] = str(missing)
    assert main(args) != 0
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and str(missing) in err[0]
    assert not (tmp_path / "o").exists()


def test_failure_leaves_no_partial_output(tmp_path, fixture_dir, monkeypatch):
    from earlywarn import report

    def boom(*a, **kw):
        raise report.EarlyWarnError("disk full")

    monkeypatch.setattr(report, "render_chart", boom)
    assert main(_fixture_args(fixture_dir, tmp_path / "o")) == 1
    assert list(tmp_path.iterdir()) == []


def test_bad_config_key(tmp_path, fixture_dir, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tresh": 5}))
    args = _fixture_args(fixture_dir, tmp_path / "o")
    args[args.index("--config") + 1] = str(cfg)
    assert main(args) == 1
    assert "tresh" in capsys.readouterr().err


def test_detect_subcommand(fixture_dir, capsys):
    args = _fixture_args(fixture_dir, "unused")[:-2]
    args[0] = "detect"
    assert main(args + ["--state", "Arizona, USA"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["formal_outbreak"] == "2020-03-21"
    assert out["changepoint"]["informal_date"] == "2020-03-11"
    assert out["changepoint"]["cost_piecewise"] <= out["changepoint"]["cost_single_line"]


def test_chart_subcommand(tmp_path, fixture_dir):
    args = _fixture_args(fixture_dir, "unused")[:-2]
    args[0] = "chart"
    svg = tmp_path / "az.svg"
    assert main(args + ["--state", "Arizona, USA", "--svg", str(svg)]) == 0
    assert 'id="informal-marker"' in svg.read_text()


def test_ingest_subcommand(tmp_path, fixture_dir):
    args = _fixture_args(fixture_dir, tmp_path / "o")
    args[0] = "ingest"
    assert main(args) == 0
    tw = read_series_csv(tmp_path / "o" / "tweet_series.csv")
    cs = read_series_csv(tmp_path / "o" / "case_series.csv")
    assert sum(s.total for s in tw) == 978 + 1054 + 658 + 592 + 1
    assert [s.state_token for s in cs] == ["Arizona, USA", "California, USA", "New_York, USA", "Wyoming, USA"]


def test_synth_subcommand(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["synth", "--length", "5", "--breakpoint", "2", "--base-level", "0", "--slope", "1",
                 "--growth-rate", "0.6931471805599453", "--crossing-day", "3", "--out", str(out)]) == 0
    tweets, cases = read_series_csv(out)
    assert tweets.values.tolist() == [0, 1, 2, 4, 8]
    assert cases.kind == "cumulative_cases" and cases.values[2:4].tolist() == [100, 101]


def test_fetch_cases_unreachable(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("OUTBREAK_CACHE_DIR", str(tmp_path))
    assert main(["fetch-cases", "--cases-url", "http://127.0.0.1:9/x.csv"]) == 1
    assert "cannot download" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "earlywarn", "synth", "--length", "3", "--out",
                           str(tmp_path / "s.csv")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "s.csv").read_text().splitlines()[1] == '"Synthetic, USA",2019-12-01,10,tweet_count'
