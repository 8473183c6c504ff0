import math

import numpy as np
import pytest

import qite_ising.cli as cli
from qite_ising.cli import (
    cost_estimate,
    delta_cv_mean,
    layer_scan,
    main,
    peak_locate,
    run_sweep,
)
from qite_ising.errors import NumericalAbortError
from qite_ising.lattice import Lattice
from qite_ising.model import IsingSpec
from qite_ising.thermo import ThermoPoint


def make_curve(ks, cvs):
    return [
        ThermoPoint(K=k, E=0.0, E2=0.0, M=0.0, M2=0.0, Cv=c, chi=0.0)
        for k, c in zip(ks, cvs)
    ]


def test_peak_locate_triangle_apex():
    ks = [0.0, 0.1, 0.2, 0.3, 0.4]
    peak = peak_locate(make_curve(ks, [0.0, 0.5, 1.0, 0.5, 0.0]))
    assert peak.k_peak == pytest.approx(0.2)
    assert not peak.at_boundary


def test_peak_locate_parabola_offgrid():
    ks = np.linspace(0.0, 1.0, 11)
    cvs = 1.0 - (ks - 0.437) ** 2
    peak = peak_locate(make_curve(ks, cvs))
    assert peak.k_peak == pytest.approx(0.437, abs=1e-12)


def test_peak_locate_boundary_flagged():
    ks = [0.0, 0.1, 0.2, 0.3, 0.4]
    peak = peak_locate(make_curve(ks, [0.0, 0.1, 0.2, 0.3, 0.4]))
    assert peak.at_boundary
    assert peak.k_peak == pytest.approx(0.4)


def test_peak_locate_needs_five_points():
    with pytest.raises(ValueError):
        peak_locate(make_curve([0.0, 0.1], [0.0, 0.1]))


def test_run_sweep_grid_alignment():
    spec = IsingSpec(lattice=Lattice((2,)))
    result = run_sweep(spec, 1, k_max=0.2)
    np.testing.assert_allclose(result.k_values, np.arange(0, 0.2001, 0.02), atol=1e-12)
    assert [p.K for p in result.reference] == pytest.approx(list(result.k_values))
    # the sweep records and the exact curve sit on one shared grid
    assert len(result.trace.thermo) == len(result.reference)


def test_run_sweep_rejects_incommensurate_grid():
    spec = IsingSpec(lattice=Lattice((2,)))
    with pytest.raises(ValueError):
        run_sweep(spec, 1, dtau=0.002, grid_step=0.01)


def test_delta_cv_mean_zero_for_identical_curves():
    spec = IsingSpec(lattice=Lattice((2,)))
    result = run_sweep(spec, 1, k_max=0.2)
    clone = cli.SweepResult(
        spec=result.spec,
        layers=result.layers,
        trace=result.trace,
        reference=result.trace.thermo,
    )
    assert delta_cv_mean(clone) == 0.0


def test_layer_scan_chain_below_euler_tolerance():
    spec = IsingSpec(lattice=Lattice((2,)))
    rows = layer_scan(spec, [1])
    assert rows[0][0] == 1
    assert rows[0][1] < 1e-2


def test_cost_estimate_paper_mode():
    est = cost_estimate(2, 3, "paper")
    assert est.time_units == 1259712.0
    assert est.exponents["time"] == (6, 9)
    assert est.exponents["expectations"] == (4, 6)
    assert est.exponents["gates"] == (2, 3)


def test_cost_estimate_dual_numbers():
    est = cost_estimate(2, 3, "dual")
    assert est.time_units == 11664.0
    assert est.exponents["time"] == (4, 6)


def test_cost_estimate_unit_side():
    paper = cost_estimate(3, 1, "paper")
    dual = cost_estimate(3, 1, "dual")
    assert paper.time_units == 3.0 ** 6
    assert dual.time_units == 3.0 ** 4


def test_cost_estimate_validation():
    with pytest.raises(ValueError):
        cost_estimate(0, 3)
    with pytest.raises(ValueError):
        cost_estimate(2, 3, "other")


# ---------------------------------------------------------------------------
# the command-line surface
# ---------------------------------------------------------------------------

def test_cli_sweep_roundtrip(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(
        ["sweep", "--dims", "2", "--layers", "1", "--kmax", "0.1", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == (
        "K,tau,E_qite,E2_qite,M_qite,M2_qite,Cv_qite,chi_qite,"
        "E_ed,E2_ed,M_ed,M2_ed,Cv_ed,chi_ed"
    )
    assert len(lines) == 7
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[6]) == 0.0  # Cv at K=0
    assert "wrote 6 grid points" in capsys.readouterr().out


def test_cli_sweep_stdout_default(capsys):
    code = main(["sweep", "--dims", "2", "--layers", "1", "--kmax", "0.04"])
    assert code == 0
    captured = capsys.readouterr().out
    assert captured.startswith("K,tau,")
    assert len(captured.splitlines()) == 4


def test_cli_reruns_are_byte_identical(tmp_path):
    args = ["sweep", "--dims", "2x2", "--layers", "2", "--kmax", "0.2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_gnuplot_script(tmp_path):
    out = tmp_path / "curve.csv"
    code = main(
        ["sweep", "--dims", "2", "--layers", "1", "--kmax", "0.1", "--out", str(out), "--gnuplot"]
    )
    assert code == 0
    script = (tmp_path / "curve.gp").read_text()
    assert str(out) in script
    assert "Cv qite" in script


def test_cli_layers_csv(tmp_path):
    out = tmp_path / "layers.csv"
    code = main(
        ["layers", "--dims", "2", "--layer-list", "1,2", "--kmax", "0.1", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "L,delta_cv_mean"
    assert [row.split(",")[0] for row in lines[1:]] == ["1", "2"]


def test_cli_alpha_scan(tmp_path, capsys):
    out = tmp_path / "alpha.csv"
    code = main(
        [
            "alpha-scan", "--dims", "2", "--alphas", "1,inf",
            "--layers", "1", "--kmax", "0.1", "--out", str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("alpha,K,tau,")
    assert len(lines) == 13
    assert lines[1].split(",")[0] == "1"
    assert lines[7].split(",")[0] == "inf"
    assert "K_peak" in capsys.readouterr().out


def test_cli_peak_ed_near_crossover(capsys):
    code = main(["peak", "--dims", "3x3", "--kmax", "1.0", "--grid-step", "0.01"])
    assert code == 0
    out = capsys.readouterr().out
    k_peak = float(out.split("K_peak=")[1].split()[0])
    assert abs(k_peak - 0.441) < 0.05


def test_cli_peak_qite_matches_closed_form(capsys):
    # two-site chain: Cv per site peaks where beta*tanh(beta) = 1
    code = main(
        ["peak", "--dims", "2", "--source", "qite", "--layers", "1", "--kmax", "1.6"]
    )
    assert code == 0
    out = capsys.readouterr().out
    k_peak = float(out.split("K_peak=")[1].split()[0])
    assert abs(k_peak - 1.19968) < 0.02


def test_cli_peak_boundary_reported(capsys):
    code = main(["peak", "--dims", "2", "--kmax", "0.5"])
    assert code == 0
    assert "at_boundary=1" in capsys.readouterr().out


def test_cli_cost_output(tmp_path, capsys):
    out = tmp_path / "cost.csv"
    code = main(["cost", "--dims", "3x3", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "time = 1259712 units" in printed
    rows = out.read_text().splitlines()
    assert rows[0] == "quantity,value,d_power,nd_power"
    assert rows[-1] == "time,1259712,6,9"
    assert main(["cost", "--dims", "3x3", "--mode", "dual"]) == 0


def test_cli_cost_requires_hypercubic(capsys):
    assert main(["cost", "--dims", "3x4"]) == 2


def test_cli_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# sweep settings\n"
        "dims = 2\n"
        "layers = 1\n"
        "kmax = 0.1\n"
        "grid-step = 0.02  # hyphens normalize\n"
    )
    base = tmp_path / "base.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(base)]) == 0
    assert len(base.read_text().splitlines()) == 7

    shorter = tmp_path / "short.csv"
    code = main(
        ["sweep", "--config", str(cfg), "--kmax", "0.04", "--out", str(shorter)]
    )
    assert code == 0
    # the command-line kmax wins over the file's 0.1
    assert len(shorter.read_text().splitlines()) == 4


def test_cli_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("dims = 2\nshots = 100\n")
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_cli_config_missing_file():
    assert main(["sweep", "--dims", "2", "--config", "/nonexistent/path.cfg"]) == 2


def test_cli_invalid_arguments():
    assert main([]) == 2
    assert main(["sweep"]) == 2  # dims missing
    assert main(["sweep", "--dims", "3y3"]) == 2
    assert main(["sweep", "--dims", "2", "--rcond", "2.0"]) == 2
    assert main(["sweep", "--dims", "2", "--kmax", "-1"]) == 2
    assert main(["peak", "--dims", "2", "--source", "bogus"]) == 2
    assert main(["frobnicate"]) == 2


def test_cli_resource_guard_exit_code(capsys):
    assert main(["sweep", "--dims", "6x6", "--layers", "1"]) == 3
    assert "resource guard" in capsys.readouterr().err


def test_cli_numerical_abort_exit_code(monkeypatch, capsys):
    def blow_up(*args, **kwargs):
        raise NumericalAbortError("synthetic non-finite update")

    monkeypatch.setattr(cli, "run_sweep", blow_up)
    assert main(["sweep", "--dims", "2"]) == 4
    assert "numerical abort" in capsys.readouterr().err
