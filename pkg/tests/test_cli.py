import csv

import pytest

from trwnoc.cli import main


def run(args, tmp_path):
    return main(list(args) + ["--out", str(tmp_path)])


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_synth_then_import(tmp_path, capsys):
    assert run(["synth-channel"], tmp_path) == 0
    cir = tmp_path / "cir.csv"
    assert read_rows(cir)[0] == ["time_s", "real", "imag"]
    out = tmp_path / "imp"
    assert main(["import-cir", str(cir), "--out", str(out)]) == 0
    assert (out / "tr_filter.csv").exists()
    assert "focusing_gain_db=" in capsys.readouterr().out


@pytest.mark.parametrize("command, name", [
    ("sweep-rate", "sweep_rate"),
    ("sweep-snr", "sweep_snr"),
    ("spatial-map", "spatial_map"),
    ("temporal-focus", "temporal_focus"),
    ("interference-probe", "interference_probe"),
])
def test_experiments(tmp_path, command, name):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("link.schemes = ['bpsk']\nlink.rates = [10e9]\nlink.snr_grid = [0, 6]\n"
                   "cavity.max_order = 3\n")
    assert run([command, "--config", str(cfg), "--bits", "100", "--seed", "5"], tmp_path) == 0
    assert (tmp_path / f"{name}.csv").exists()
    assert (tmp_path / f"{name}.svg").exists()


def test_no_plot_and_replot(tmp_path):
    assert run(["temporal-focus", "--no-plot"], tmp_path) == 0
    assert not (tmp_path / "temporal_focus.svg").exists()
    assert (tmp_path / "temporal_focus_summary.csv").exists()
    svg = tmp_path / "t.svg"
    assert main(["plot", str(tmp_path / "temporal_focus.csv"), "--out", str(svg)]) == 0
    assert svg.read_bytes().startswith(b"<?xml")


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("experiment.seed = 1\nlink.rates = []\n")
    assert run(["sweep-rate", "--config", str(cfg)], tmp_path) == 2
    err = capsys.readouterr().err
    assert "link.rates" in err and "line 2" in err


def test_bad_override_is_config_error(tmp_path):
    assert run(["sweep-rate", "--bits", "0"], tmp_path) == 2
    assert run(["sweep-rate", "--seed", "-1"], tmp_path) == 2


def test_runtime_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "trace.csv"
    bad.write_text("0,1,0\n1e-12,oops,0\n")
    assert main(["import-cir", str(bad), "--out", str(tmp_path)]) == 3
    assert "line 2" in capsys.readouterr().err


def test_missing_file_is_runtime_error(tmp_path):
    assert main(["plot", str(tmp_path / "nope.csv")]) == 3


def test_empty_table_plot_fails(tmp_path):
    t = tmp_path / "empty.csv"
    t.write_text("schema_version,experiment,scheme\n")
    assert main(["plot", str(t)]) == 3
    assert not (tmp_path / "empty.svg").exists()


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2
