from dataclasses import replace

import pytest

from trwnoc.exceptions import DomainError
from trwnoc.experiments import (
    RESULT_COLUMNS,
    ExperimentKind,
    ExperimentSpec,
    ResultsTable,
    run_experiment,
)
from trwnoc.plotting import ber_floor, emit_plot

SPEC = ExperimentSpec(n_bits=200, schemes=("cw_ask",), rates=(2e9, 20e9), snr_grid=(0.0, 8.0),
                      max_order=3, grid_size=21)


def rate_table(bers):
    t = ResultsTable("sweep_rate", RESULT_COLUMNS, name="sweep_rate")
    for rate, ber in zip((1e9, 2e9, 3e9), bers):
        for tr in (True, False):
            t.append(scheme="cw_ask", tr=tr, rate_hz=rate, snr_db=16.0, n_bits=1000,
                     n_errors=int(ber * 1000), ber=ber, ber_ci_hi=0.003, delta_a=0.5,
                     sigma=0.1, seed=0)
    return t


def test_empty_table_writes_nothing(tmp_path):
    out = tmp_path / "x.svg"
    with pytest.raises(DomainError):
        emit_plot(ResultsTable("sweep_rate", RESULT_COLUMNS), "auto", out)
    assert list(tmp_path.iterdir()) == []


def test_unknown_kind(tmp_path):
    with pytest.raises(DomainError):
        emit_plot(rate_table([0.1, 0.1, 0.1]), "pie", tmp_path / "x.svg")
    assert list(tmp_path.iterdir()) == []


@pytest.mark.parametrize("kind", list(ExperimentKind))
def test_every_experiment_renders_identically(tmp_path, kind):
    table = run_experiment(replace(SPEC, experiment=kind))
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(table, "auto", a)
    emit_plot(table, "auto", b)
    data = a.read_bytes()
    assert data.startswith(b"<?xml") and b"<svg" in data
    assert data == b.read_bytes()


def test_zero_ber_points_are_drawn(tmp_path):
    zero = tmp_path / "zero.svg"
    emit_plot(rate_table([0.0, 0.0, 0.0]), "ber_rate", zero)
    shifted = tmp_path / "shifted.svg"
    emit_plot(rate_table([1e-7, 1e-7, 1e-7]), "ber_rate", shifted)
    assert zero.read_bytes() != shifted.read_bytes()


def test_ber_floor():
    assert ber_floor([0.0, 0.0]) == pytest.approx(1e-7)
    # never above 1e-7 so the marker sits below any measurable point
    assert ber_floor([0.0, 3e-4, 0.2]) == pytest.approx(1e-7)
    assert ber_floor([None, 1e-9]) == pytest.approx(1e-10)
