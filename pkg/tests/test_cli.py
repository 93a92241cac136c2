import json

import numpy as np
import pytest

from cavity_eit import ConfigError, RunConfig
from cavity_eit.cli import main

SMALL_CONFIG = """
# compact sweep for fast end-to-end runs
start = -0.7
stop = 0.7
n_points = 29
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    return str(path)


def test_config_defaults_round_trip():
    config = RunConfig()
    assert RunConfig.from_text(config.to_text()) == config


def test_config_covers_every_physics_parameter():
    import dataclasses

    from cavity_eit import PhysicsParams

    param_fields = {f.name for f in dataclasses.fields(PhysicsParams)}
    assert param_fields <= set(RunConfig.keys())
    assert set(RunConfig.keys()) - param_fields == {"start", "stop", "n_points"}


def test_config_round_trip_with_overrides():
    config = RunConfig(g=2.5, n_max=3, n_points=51, delta_p=-12.5)
    assert RunConfig.from_text(config.to_text()) == config


def test_config_parses_values_and_comments():
    config = RunConfig.from_text("g = 4.2  # stronger coupling\n\nn_atoms = 2\n")
    assert config.g == 4.2
    assert config.n_atoms == 2
    assert config.kappa == 0.4


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match=r"cfg:2: unknown key 'coupling'"):
        RunConfig.from_text("g = 3.0\ncoupling = 1.0\n", source="cfg")


def test_config_rejects_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        RunConfig.from_text("g = 3.0\ng = 4.0\n")


def test_config_rejects_bad_value():
    with pytest.raises(ConfigError, match="n_max"):
        RunConfig.from_text("n_max = 2.5\n")
    with pytest.raises(ConfigError, match="kappa"):
        RunConfig.from_text("kappa = fast\n")


def test_config_rejects_bad_physics():
    with pytest.raises(ConfigError):
        RunConfig.from_text("gamma = -1.0\n")
    with pytest.raises(ConfigError):
        RunConfig.from_text("start = 2.0\nstop = 1.0\n")


def _read_rows(path):
    with open(path, encoding="utf-8") as handle:
        lines = [ln.rstrip("\n") for ln in handle if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


def test_eit_sweep_csv_layout(tmp_path, small_config):
    out = tmp_path / "sweep.csv"
    status = main(
        [
            "eit-sweep",
            "--config", small_config,
            "--engine", "both",
            "--three-level",
            "--out", str(out),
            "--deterministic",
        ]
    )
    assert status == 0
    header, rows = _read_rows(out)
    assert header == [
        "delta_MHz", "T_rel", "photon_number",
        "absorption_part", "dispersion_part", "engine", "residual",
    ]
    assert len(rows) == 29 * 2
    keys = [(float(r[0]), r[5]) for r in rows]
    assert keys == sorted(keys)
    for row in rows:
        if row[5] == "me":
            assert row[3] == "" and row[4] == "" and row[6] != ""
        else:
            assert row[5] == "sc"
            assert row[3] != "" and row[4] != "" and row[6] == ""
        assert 0.0 <= float(row[1]) <= 1.5


def test_eit_sweep_atoms_override(tmp_path, small_config):
    out = tmp_path / "sweep0.csv"
    status = main(
        ["eit-sweep", "--config", small_config, "--atoms", "0",
         "--out", str(out), "--deterministic"]
    )
    assert status == 0
    _, rows = _read_rows(out)
    for row in rows:
        # empty cavity: flat at 1 up to the n_max=2 truncation bias (~3%)
        assert float(row[1]) == pytest.approx(1.0, abs=4e-2)


def test_cavity_scan_empty_is_symmetric_peak(tmp_path):
    out = tmp_path / "scan.csv"
    status = main(
        ["cavity-scan", "--atoms", "0", "--points", "41",
         "--out", str(out), "--deterministic"]
    )
    assert status == 0
    header, rows = _read_rows(out)
    assert header[0] == "delta_p_cav_MHz"
    grid = np.array([float(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    peak = int(np.argmax(values))
    assert grid[peak] == pytest.approx(0.0, abs=1e-12)
    # peak 1.0 up to the n_max=2 truncation bias of the default config
    assert values[peak] == pytest.approx(1.0, abs=4e-2)
    assert np.allclose(values, values[::-1], atol=1e-9)


def test_analyze_reports_extrema(tmp_path, small_config, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["eit-sweep", "--config", small_config, "--out", str(out),
                 "--deterministic"]) == 0
    assert main(["analyze", "--in", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["sweep_column"] == "delta_MHz"
    engines = report["engines"]
    assert set(engines) == {"me"}
    me = engines["me"]
    assert me["delta_max_MHz"] < me["delta_min_MHz"]
    assert 0.1 < me["separation_MHz"] < 0.5
    assert me["T_min"] < me["T_max"]


def test_analyze_rejects_garbage(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n", encoding="utf-8")
    assert main(["analyze", "--in", str(bad)]) == 2
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "ConfigError"


def test_converge_csv(tmp_path):
    config = tmp_path / "c.cfg"
    config.write_text("n_p = 0.001\n", encoding="utf-8")
    out = tmp_path / "converge.csv"
    status = main(
        ["converge", "--config", str(config), "--nmax-list", "1,2",
         "--out", str(out), "--deterministic"]
    )
    assert status == 0
    header, rows = _read_rows(out)
    assert header == ["n_max", "delta_MHz", "T_rel", "photon_number"]
    assert len(rows) == 6
    assert [r[0] for r in rows] == ["1"] * 3 + ["2"] * 3


def test_converge_rejects_bad_list(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert main(["converge", "--nmax-list", "2,two", "--out", str(out)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_deterministic_runs_are_byte_identical(tmp_path, small_config):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    for path in (first, second):
        assert main(["eit-sweep", "--config", small_config, "--engine", "both",
                     "--out", str(path), "--deterministic"]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_timestamp_header_unless_deterministic(tmp_path, small_config):
    stamped = tmp_path / "t.csv"
    plain = tmp_path / "p.csv"
    assert main(["eit-sweep", "--config", small_config, "--atoms", "0",
                 "--out", str(stamped)]) == 0
    assert main(["eit-sweep", "--config", small_config, "--atoms", "0",
                 "--out", str(plain), "--deterministic"]) == 0
    assert stamped.read_text(encoding="utf-8").startswith("# generated ")
    assert not plain.read_text(encoding="utf-8").startswith("#")


def test_bad_config_file_exits_with_error_record(tmp_path, capsys):
    config = tmp_path / "broken.cfg"
    config.write_text("coupling = 1.0\n", encoding="utf-8")
    out = tmp_path / "o.csv"
    assert main(["eit-sweep", "--config", str(config), "--out", str(out)]) == 2
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "ConfigError"
    assert "coupling" in record["message"]


def test_missing_output_directory(tmp_path, small_config, capsys):
    target = tmp_path / "nowhere" / "o.csv"
    assert main(["eit-sweep", "--config", small_config, "--out", str(target)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_thread_cap_env(tmp_path, small_config, monkeypatch):
    monkeypatch.setenv("EIT_SIM_THREADS", "2")
    out = tmp_path / "threads.csv"
    assert main(["eit-sweep", "--config", small_config, "--out", str(out),
                 "--deterministic"]) == 0
    monkeypatch.setenv("EIT_SIM_THREADS", "zero")
    assert main(["eit-sweep", "--config", small_config, "--out", str(out)]) == 2


def test_exit_status_reflects_flagged_records():
    from cavity_eit.cli import _exit_status
    from cavity_eit.sweep import SpectrumRecord

    clean = SpectrumRecord(0.0, 1.0, 0.1, None, None, 1e-12, "me")
    flagged = SpectrumRecord(0.1, 1.0, 0.1, None, None, 1e-3, "me", converged=False)
    assert _exit_status([clean, clean]) == 0
    assert _exit_status([clean, flagged]) == 1


def test_twelve_significant_digits(tmp_path, small_config):
    out = tmp_path / "digits.csv"
    assert main(["eit-sweep", "--config", small_config, "--out", str(out),
                 "--deterministic"]) == 0
    _, rows = _read_rows(out)
    value = rows[0][1]
    assert float(value) == pytest.approx(float(f"{float(value):.12g}"), rel=0, abs=0)
    # formatting uses up to 12 significant digits
    mantissa = value.replace("-", "").replace(".", "").lstrip("0").split("e")[0]
    assert len(mantissa) <= 12
