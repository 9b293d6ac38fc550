import os
from pathlib import Path

import pytest
import yaml

from fpfree.cli import main
from fpfree.config import ConfigError, ExperimentConfig, catalog_rows, load_config, resolve_target

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "tests" / "fixtures" / "injected-bug-runmin.yaml"


def write(tmp_path, **kw):
    base = {"schema_version": 1, "experiment": "lipschitz-estimate", "target": "lin:l2",
            "samples": 20, "horizon": 5, "seed": 0, "output_dir": str(tmp_path / "out"),
            "params": {"support": 16}}
    base.update(kw)
    p = tmp_path / "cfg.yaml"
    p.write_text(yaml.safe_dump(base))
    return p


def test_list_contains_required_targets(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "lin:l2" in out and "medina:segment2d" in out
    names = {row[0] for row in catalog_rows()}
    assert {"lin:l2", "affine:q=0.5", "thmM4:alpha=0.5", "medina:flat3d"} <= names


@pytest.mark.parametrize("name", [row[0] for row in catalog_rows()])
def test_catalog_names_parse(name):
    assert resolve_target(name).name == name


def test_config_roundtrip(tmp_path):
    cfg = load_config(write(tmp_path))
    again = ExperimentConfig.from_dict(yaml.safe_load(cfg.dump()))
    assert again == cfg


def test_target_parsing():
    t = resolve_target("lin:l3")
    assert t.params["p"] == 3.0 and t.params["support"] == 256
    t = resolve_target("hilbert:alpha=0.5,lam=1", {"dim": 4})
    assert t.params["alpha"] == 0.5 and t.params["dim"] == 4
    for bad in ("nosuch", "lin:l3", "medina:cube", "shift:l2", "lin:x"):
        with pytest.raises(ConfigError):
            resolve_target(bad, {"p": 2.0} if bad == "lin:l3" else None)
    with pytest.raises(ConfigError):
        resolve_target("lin:l2", {"bogus": 1})
    with pytest.raises(ConfigError):
        resolve_target("lin:l2", {"support": 2.5})


@pytest.mark.parametrize("bad", [
    {"schema_version": 2}, {"experiment": "nope"}, {"samples": 0}, {"horizon": "x"},
    {"target": "medina:segment2d"}, {"extra": 1},
])
def test_config_errors_exit_3(tmp_path, bad):
    assert main(["run", str(write(tmp_path, **bad))]) == 3


def test_malformed_yaml_exit_3(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("experiment: [unclosed")
    assert main(["run", str(p)]) == 3
    assert main(["run", str(tmp_path / "missing.yaml")]) == 3


def test_out_of_range_parameter_exit_3(tmp_path):
    cfg = write(tmp_path, experiment="flatness", target="thmM4:alpha=1.5", params={})
    assert main(["run", str(cfg)]) == 3


def test_solver_failure_exit_4(tmp_path):
    cfg = write(tmp_path, experiment="flatness", target="thmM4:alpha=0.99", params={})
    assert main(["run", str(cfg)]) == 4


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_output_exit_5(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    assert main(["run", str(write(tmp_path)), "--out", str(locked / "x")]) == 5


def test_output_is_a_file_exit_5(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["run", str(write(tmp_path)), "--out", str(blocker / "sub")]) == 5


def test_run_writes_reports_and_is_deterministic(tmp_path, capsys):
    cfg = write(tmp_path)
    assert main(["run", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["run", str(cfg), "--out", str(tmp_path / "b")]) == 0
    for f in ("measurements.csv", "verdicts.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert (tmp_path / "a" / "manifest.json").exists()
    assert "PASS" in capsys.readouterr().out


def test_seed_override_changes_output(tmp_path):
    cfg = write(tmp_path)
    main(["run", str(cfg), "--out", str(tmp_path / "a"), "--no-svg"])
    main(["run", str(cfg), "--out", str(tmp_path / "b"), "--seed", "9", "--no-svg"])
    a = (tmp_path / "a" / "measurements.csv").read_bytes()
    assert a != (tmp_path / "b" / "measurements.csv").read_bytes()
    assert not (tmp_path / "a" / "plot.svg").exists()


def test_injected_bug_fixture_exit_2(tmp_path):
    assert main(["run", str(FIXTURE), "--out", str(tmp_path / "bug")]) == 2
    data = yaml.safe_load(FIXTURE.read_text())
    data["params"]["bound_scale"] = 1.0
    p = tmp_path / "fixed.yaml"
    p.write_text(yaml.safe_dump(data))
    assert main(["run", str(p), "--out", str(tmp_path / "ok")]) == 0
