import csv
import json
import warnings

import numpy as np
import pytest

from tdamix import pipeline
from tdamix.cli import main
from tdamix.config import load_config_file, validate_config
from tdamix.errors import PipelineError
from tdamix.io import read_csv

SMALL = {
    "M": 300, "s": 40, "k_range": [2, 3], "grid_points": 100, "g_range": [1, 2],
    "runs": 2, "seed": 7,
}


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("small")
    return out, pipeline.run_pipeline(validate_config(SMALL), out_dir=out)


def test_declared_files_exist_and_parse(small_run):
    out, manifest = small_run
    for name, header in manifest["files"].items():
        got, rows = read_csv(out / name)
        assert got == header, name
        assert rows and all(len(r) == len(header) for r in rows), name
        assert all(np.all(np.isfinite([v for v in r if v != float("inf")])) for r in rows)
    expected = {"population.csv", "landmarks_k2.csv", "landmarks_k3.csv", "table1.csv", "table2.csv",
                "imse_raw.csv", "diagram_pop.csv", "diagram_sample_0.csv", "landscape_pop.csv",
                "landscape_sample_0.csv", "density_pop.csv", "density_sample_0.csv"}
    assert expected <= set(manifest["files"])
    assert not (out / ".partial").exists()
    assert json.loads((out / "manifest.json").read_text()) == manifest


def test_table_contents(small_run):
    out, manifest = small_run
    _, t1 = read_csv(out / "table1.csv")
    assert [int(r[0]) for r in t1] == [2, 3]
    _, t2 = read_csv(out / "table2.csv")
    _, raw = read_csv(out / "imse_raw.csv")
    assert len(raw) == 2 * 2
    for g, mean in t2:
        assert mean == pytest.approx(np.mean([r[2] for r in raw if r[0] == g]), rel=1e-15)
    s = manifest["summary"]
    assert s["k_star"] in (2, 3) and s["g_star"] in (1, 2)
    assert s["table1"][str(s["k_star"])] == min(s["table1"].values())


def test_population_rows_on_torus(small_run):
    out, _ = small_run
    _, rows = read_csv(out / "population.csv")
    p = np.array(rows)[:, 1:]
    assert p.shape == (300, 3)
    rho = np.hypot(p[:, 0], p[:, 1])
    np.testing.assert_allclose((3 - rho) ** 2 + p[:, 2] ** 2, 4.0, atol=1e-9)


def test_manifest_contents(small_run):
    _, manifest = small_run
    assert manifest["seed"] == 7
    assert "numpy" in manifest["versions"]
    s = manifest["summary"]
    for key in ("population_landscape_mean", "sample_landscape_mean", "sample_landscape_std"):
        assert np.isfinite(s[key])


def test_floats_round_trip(small_run):
    out, manifest = small_run
    with (out / "table1.csv").open() as fh:
        rows = list(csv.reader(fh))[1:]
    for k, v in rows:
        assert float(v) == manifest["summary"]["table1"][k]


def test_rerun_from_manifest_reproduces_summary(small_run, tmp_path):
    out, manifest = small_run
    cfg = validate_config(load_config_file(out / "manifest.json"))
    again = pipeline.run_pipeline(cfg, out_dir=tmp_path)
    assert again["summary"] == manifest["summary"]
    for name in manifest["files"]:
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes()


def test_bandwidth_grid_stage(tmp_path):
    cfg = validate_config({**SMALL, "k_range": [2], "g_range": [1], "runs": 1,
                           "h_grid": [0.005, 0.02, 0.08]})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # minimum may sit on the grid edge
        manifest = pipeline.run_pipeline(cfg, out_dir=tmp_path)
    header, rows = read_csv(tmp_path / "bandwidth_risk.csv")
    assert header == ["h", "J"] and [r[0] for r in rows] == [0.005, 0.02, 0.08]
    best = min(rows, key=lambda r: r[1])[0]
    assert manifest["summary"]["bandwidth"] == best


def test_stage_failure_leaves_partial_marker(tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("simulated failure")

    monkeypatch.setattr(pipeline, "rips_persistence", broken)
    cfg = validate_config({**SMALL, "k_range": [2]})
    with pytest.raises(PipelineError) as e:
        pipeline.run_pipeline(cfg, out_dir=tmp_path)
    assert e.value.stage == "population_tda"
    assert (tmp_path / ".partial").exists()
    assert (tmp_path / "table1.csv").exists() and not (tmp_path / "manifest.json").exists()


def test_cli_stage_failure_exit_code(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise RuntimeError("simulated failure")

    monkeypatch.setattr(pipeline, "rips_persistence", broken)
    cfg = tmp_path / "small.cfg"
    cfg.write_text("M: 300\ns: 40\nk_range: [2]\ngrid_points: 100\ng_range: [1]\nruns: 1\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o"), "-q"]) == 1
    assert "population_tda" in capsys.readouterr().err


def test_cli_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = tmp_path / "small.cfg"
    cfg.write_text("M: 300\ns: 40\nk_range: [2]\ng_range: [1]\nruns: 1\n")
    assert main(["--config", str(cfg), "--out", str(blocker / "sub"), "-q"]) == 1


def test_cli_success_and_seed_override(tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("M: 300\ns: 40\nk_range: [2]\ngrid_points: 100\ng_range: [1, 2]\nruns: 1\n")
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out", str(out), "--seed", "99", "-q"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 99 and manifest["config"]["M"] == 300
