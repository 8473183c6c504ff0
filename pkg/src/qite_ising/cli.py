"""Command-line experiment drivers and their library-level entry points.

Subcommands: sweep (QITE vs enumeration thermodynamic curves), layers (depth
convergence metric), alpha-scan (interaction-range comparison), peak
(specific-heat peak location), cost (asymptotic cost model).  All numeric
output is CSV with 12 significant digits; runs with identical configuration
produce byte-identical files.

Exit codes: 0 success, 2 invalid arguments or config, 3 resource guard
violation, 4 numerical abort inside the evolution loop.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence, TextIO

import numpy as np

from .ansatz import build_ansatz
from .ed import reference_curve
from .errors import NumericalAbortError, ResourceLimitError
from .evolver import EvolverConfig, EvolutionTrace, evolve
from .lattice import Lattice
from .model import IsingSpec
from .thermo import ThermoPoint

__all__ = [
    "SweepResult",
    "PeakResult",
    "CostEstimate",
    "run_sweep",
    "delta_cv_mean",
    "layer_scan",
    "peak_locate",
    "cost_estimate",
    "main",
    "entry",
]


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    """One evolution trace plus the enumeration reference on the same K grid."""

    spec: IsingSpec
    layers: int
    trace: EvolutionTrace
    reference: list[ThermoPoint]

    @property
    def k_values(self) -> np.ndarray:
        return self.trace.k_values


def _record_stride(grid_step: float, coupling: float, dtau: float) -> int:
    per_step = 2.0 * coupling * dtau
    ratio = grid_step / per_step
    stride = round(ratio)
    if stride < 1 or abs(ratio - stride) > 1e-9 * max(1.0, ratio):
        raise ValueError(
            f"grid step {grid_step} is not an integer multiple of the K advance "
            f"per Euler step ({per_step:g})"
        )
    return stride


def run_sweep(
    spec: IsingSpec,
    layers: int,
    dtau: float = 0.002,
    k_max: float = 1.0,
    rcond: float = 1e-8,
    grid_step: float = 0.02,
    record_residual: bool = False,
) -> SweepResult:
    """Evolve up to K_max, recording every grid_step in K, and pair each
    record with the exact curve at the same K."""
    if k_max <= 0:
        raise ValueError(f"K_max must be positive, got {k_max}")
    stride = _record_stride(grid_step, spec.coupling, dtau)
    config = EvolverConfig(
        tau_max=k_max / (2.0 * spec.coupling),
        dtau=dtau,
        svd_rcond=rcond,
        record_stride=stride,
        record_residual=record_residual,
    )
    ansatz = build_ansatz(spec, layers)
    trace = evolve(ansatz, spec, config)
    reference = reference_curve(spec, list(trace.k_values))
    return SweepResult(spec=spec, layers=layers, trace=trace, reference=reference)


def delta_cv_mean(result: SweepResult) -> float:
    """Mean absolute specific-heat deviation from the exact curve,
    trapezoidal in K over the sweep window."""
    k = result.k_values
    if k.shape[0] < 2:
        raise ValueError("need at least two grid points")
    diff = np.abs(
        np.array([p.Cv for p in result.trace.thermo])
        - np.array([p.Cv for p in result.reference])
    )
    return float(np.trapezoid(diff, k) / (k[-1] - k[0]))


def layer_scan(
    spec: IsingSpec,
    layer_list: Sequence[int],
    dtau: float = 0.002,
    k_max: float = 1.0,
    rcond: float = 1e-8,
    grid_step: float = 0.02,
) -> list[tuple[int, float]]:
    """delta_cv_mean per ansatz depth."""
    if not layer_list:
        raise ValueError("empty layer list")
    if any(l < 1 for l in layer_list):
        raise ValueError("layer counts must be >= 1")
    rows = []
    for layers in layer_list:
        result = run_sweep(spec, layers, dtau=dtau, k_max=k_max, rcond=rcond, grid_step=grid_step)
        rows.append((int(layers), delta_cv_mean(result)))
    return rows


class PeakResult(NamedTuple):
    k_peak: float
    at_boundary: bool


def peak_locate(curve: Sequence[ThermoPoint]) -> PeakResult:
    """Specific-heat peak position by 3-point parabolic interpolation.

    A maximum on the first or last grid point cannot be interpolated; the raw
    argmax comes back flagged instead.
    """
    if len(curve) < 5:
        raise ValueError(f"need at least 5 grid points, got {len(curve)}")
    cv = np.array([p.Cv for p in curve])
    k = np.array([p.K for p in curve])
    peak = int(np.argmax(cv))
    if peak == 0 or peak == len(curve) - 1:
        return PeakResult(k_peak=float(k[peak]), at_boundary=True)
    a, b, _ = np.polyfit(k[peak - 1 : peak + 2], cv[peak - 1 : peak + 2], 2)
    if a == 0.0:
        return PeakResult(k_peak=float(k[peak]), at_boundary=False)
    return PeakResult(k_peak=float(-b / (2.0 * a)), at_boundary=False)


@dataclass(frozen=True)
class CostEstimate:
    """Asymptotic operation counts in arbitrary units, with the (D power,
    N_d power) exponent pair per quantity."""

    steps: float
    expectations: float
    gates: float
    time_units: float
    exponents: dict[str, tuple[int, int]]


def cost_estimate(dimension: int, side: int, mode: str = "paper") -> CostEstimate:
    """Evaluate the cost model: time ~ steps x expectations x gates.

    In "paper" mode the number of expectation values per step scales as the
    square of the parameter count, D**4 N_d**(2D+2); "dual" mode replaces it
    with the linear count D**2 N_d**(D+1).  Gates per circuit are
    D**2 N_d**(D+1) in both; the step count is treated as order one.
    """
    if dimension < 1 or side < 1:
        raise ValueError("dimension and side must be positive")
    if mode not in ("paper", "dual"):
        raise ValueError(f"mode must be 'paper' or 'dual', got {mode!r}")
    gates_exp = (2, dimension + 1)
    expect_exp = (4, 2 * dimension + 2) if mode == "paper" else (2, dimension + 1)
    time_exp = (expect_exp[0] + gates_exp[0], expect_exp[1] + gates_exp[1])
    as_value = lambda dp, np_: float(dimension**dp * side**np_)
    return CostEstimate(
        steps=1.0,
        expectations=as_value(*expect_exp),
        gates=as_value(*gates_exp),
        time_units=as_value(*time_exp),
        exponents={
            "steps": (0, 0),
            "expectations": expect_exp,
            "gates": gates_exp,
            "time": time_exp,
        },
    )


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline=""), True


_SWEEP_FIELDS = ("E", "E2", "M", "M2", "Cv", "chi")


def _sweep_rows(result: SweepResult):
    for tau, q, r in zip(result.trace.taus, result.trace.thermo, result.reference):
        row = [_fmt(q.K), _fmt(tau)]
        row += [_fmt(getattr(q, f)) for f in _SWEEP_FIELDS]
        row += [_fmt(getattr(r, f)) for f in _SWEEP_FIELDS]
        yield row


def write_sweep_csv(result: SweepResult, out: TextIO) -> None:
    header = ["K", "tau"]
    header += [f"{f}_qite" for f in _SWEEP_FIELDS]
    header += [f"{f}_ed" for f in _SWEEP_FIELDS]
    out.write(",".join(header) + "\n")
    for row in _sweep_rows(result):
        out.write(",".join(row) + "\n")


def write_alpha_scan_csv(results: list[tuple[float, SweepResult]], out: TextIO) -> None:
    header = ["alpha", "K", "tau"]
    header += [f"{f}_qite" for f in _SWEEP_FIELDS]
    header += [f"{f}_ed" for f in _SWEEP_FIELDS]
    out.write(",".join(header) + "\n")
    for alpha, result in results:
        for row in _sweep_rows(result):
            out.write(",".join([_fmt(alpha)] + row) + "\n")


def _write_gnuplot(csv_path: str, script_path: Path, alpha_scan: bool) -> None:
    offset = 1 if alpha_scan else 0
    cv_q, cv_e = 7 + offset, 13 + offset
    chi_q, chi_e = 8 + offset, 14 + offset
    script = "\n".join(
        [
            "set datafile separator ','",
            "set xlabel 'K'",
            "set key top left",
            f"plot '{csv_path}' using {1 + offset}:{cv_q} with lines title 'Cv qite', \\",
            f"     '' using {1 + offset}:{cv_e} with lines title 'Cv ed', \\",
            f"     '' using {1 + offset}:{chi_q} with lines title 'chi qite', \\",
            f"     '' using {1 + offset}:{chi_e} with lines title 'chi ed'",
            "pause -1",
            "",
        ]
    )
    script_path.write_text(script)


# ---------------------------------------------------------------------------
# argument and config-file handling
# ---------------------------------------------------------------------------

def _parse_dims(text: str) -> tuple[int, ...]:
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"cannot parse lattice dims {text!r}; expected e.g. 3x3") from None
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"lattice dims must be positive, got {text!r}")
    return dims


def _parse_alpha(text: str) -> float:
    text = text.strip().lower()
    if text in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse alpha {text!r}") from None


def _parse_alpha_list(text: str) -> tuple[float, ...]:
    return tuple(_parse_alpha(p) for p in text.split(",") if p.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ValueError(f"cannot parse integer list {text!r}") from None


def _parse_bool(text: str) -> bool:
    text = text.strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


_CONVERTERS = {
    "dims": _parse_dims,
    "alpha": _parse_alpha,
    "coupling": float,
    "layers": int,
    "dtau": float,
    "kmax": float,
    "rcond": float,
    "grid_step": float,
    "out": str,
    "layer_list": _parse_int_list,
    "alphas": _parse_alpha_list,
    "source": str,
    "mode": str,
    "gnuplot": _parse_bool,
}

_DEFAULTS = {
    "dims": None,
    "alpha": math.inf,
    "coupling": 1.0,
    "layers": 2,
    "dtau": 0.002,
    "kmax": 1.0,
    "rcond": 1e-8,
    "grid_step": 0.02,
    "out": None,
    "layer_list": (1, 2, 3, 4),
    "alphas": (1.0, 2.0, math.inf),
    "source": "ed",
    "mode": "paper",
    "gnuplot": False,
}


def _load_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        if key not in _CONVERTERS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        entries[key] = value.strip()
    return entries


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path is not None:
        for key, raw in _load_config_file(config_path).items():
            cfg[key] = _CONVERTERS[key](raw)
    for key, converter in _CONVERTERS.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            cfg[key] = converter(cli_value) if isinstance(cli_value, str) else cli_value
    return cfg


def _spec_from(cfg: dict) -> IsingSpec:
    if cfg["dims"] is None:
        raise ValueError("lattice dims are required (flag --dims or config key dims)")
    return IsingSpec(
        lattice=Lattice(cfg["dims"]), alpha=cfg["alpha"], coupling=cfg["coupling"]
    )


def _validate_common(cfg: dict) -> None:
    if cfg["coupling"] <= 0:
        raise ValueError(f"coupling must be positive, got {cfg['coupling']}")
    if cfg["dtau"] <= 0:
        raise ValueError(f"dtau must be positive, got {cfg['dtau']}")
    if cfg["kmax"] <= 0:
        raise ValueError(f"kmax must be positive, got {cfg['kmax']}")
    if not 0 < cfg["rcond"] < 1:
        raise ValueError(f"rcond must lie in (0, 1), got {cfg['rcond']}")
    if cfg["grid_step"] <= 0:
        raise ValueError(f"grid step must be positive, got {cfg['grid_step']}")
    if cfg["layers"] < 1:
        raise ValueError(f"layers must be >= 1, got {cfg['layers']}")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dims", help="lattice dims, e.g. 3x3 or 2x2x2")
    parser.add_argument("--alpha", help="interaction-range exponent, a float or 'inf'")
    parser.add_argument("--coupling", help="ferromagnetic coupling J (default 1.0)")
    parser.add_argument("--layers", help="ansatz depth L (default 2)")
    parser.add_argument("--dtau", help="Euler step length (default 0.002)")
    parser.add_argument("--kmax", help="largest K = J*beta to reach (default 1.0)")
    parser.add_argument("--rcond", help="pseudo-inverse eigenvalue cutoff (default 1e-8)")
    parser.add_argument("--grid-step", dest="grid_step", help="K spacing of records (default 0.02)")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--config", help="key = value config file; flags override it")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qite-ising",
        description="Thermal-state curves of the long-range Ising model by "
        "variational imaginary-time evolution, with exact enumeration baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="QITE and exact curves over a K grid")
    _add_common_flags(p_sweep)
    p_sweep.add_argument(
        "--gnuplot", action="store_const", const=True, default=None,
        help="also write a gnuplot script next to --out",
    )

    p_layers = sub.add_parser("layers", help="depth convergence of the specific-heat error")
    _add_common_flags(p_layers)
    p_layers.add_argument(
        "--layer-list", dest="layer_list", help="comma-separated depths (default 1,2,3,4)"
    )

    p_alpha = sub.add_parser("alpha-scan", help="sweep several interaction ranges")
    _add_common_flags(p_alpha)
    p_alpha.add_argument(
        "--alphas", help="comma-separated alpha values, 'inf' allowed (default 1,2,inf)"
    )

    p_peak = sub.add_parser("peak", help="locate the specific-heat peak")
    _add_common_flags(p_peak)
    p_peak.add_argument(
        "--source", choices=("ed", "qite"), default=None,
        help="curve to search: exact enumeration (default) or the QITE sweep",
    )

    p_cost = sub.add_parser("cost", help="asymptotic cost model, arbitrary units")
    _add_common_flags(p_cost)
    p_cost.add_argument(
        "--mode", choices=("paper", "dual"), default=None,
        help="expectation-count scaling: quadratic in parameters (paper) or linear (dual)",
    )

    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_sweep(cfg: dict) -> int:
    _validate_common(cfg)
    spec = _spec_from(cfg)
    result = run_sweep(
        spec,
        cfg["layers"],
        dtau=cfg["dtau"],
        k_max=cfg["kmax"],
        rcond=cfg["rcond"],
        grid_step=cfg["grid_step"],
    )
    out, owned = _open_out(cfg["out"])
    try:
        write_sweep_csv(result, out)
    finally:
        if owned:
            out.close()
    if cfg["gnuplot"]:
        if cfg["out"] is None:
            raise ValueError("--gnuplot needs --out to point the script at a file")
        _write_gnuplot(cfg["out"], Path(cfg["out"]).with_suffix(".gp"), alpha_scan=False)
    if cfg["out"] is not None:
        print(f"wrote {len(result.trace.thermo)} grid points to {cfg['out']}")
    return 0


def _cmd_layers(cfg: dict) -> int:
    _validate_common(cfg)
    spec = _spec_from(cfg)
    rows = layer_scan(
        spec,
        cfg["layer_list"],
        dtau=cfg["dtau"],
        k_max=cfg["kmax"],
        rcond=cfg["rcond"],
        grid_step=cfg["grid_step"],
    )
    out, owned = _open_out(cfg["out"])
    try:
        out.write("L,delta_cv_mean\n")
        for layers, dcv in rows:
            out.write(f"{layers},{_fmt(dcv)}\n")
    finally:
        if owned:
            out.close()
    if cfg["out"] is not None:
        print(f"wrote {len(rows)} depths to {cfg['out']}")
    return 0


def _cmd_alpha_scan(cfg: dict) -> int:
    _validate_common(cfg)
    if cfg["dims"] is None:
        raise ValueError("lattice dims are required (flag --dims or config key dims)")
    if not cfg["alphas"]:
        raise ValueError("empty alpha list")
    results = []
    for alpha in cfg["alphas"]:
        spec = IsingSpec(
            lattice=Lattice(cfg["dims"]), alpha=alpha, coupling=cfg["coupling"]
        )
        results.append(
            (
                alpha,
                run_sweep(
                    spec,
                    cfg["layers"],
                    dtau=cfg["dtau"],
                    k_max=cfg["kmax"],
                    rcond=cfg["rcond"],
                    grid_step=cfg["grid_step"],
                ),
            )
        )
    out, owned = _open_out(cfg["out"])
    try:
        write_alpha_scan_csv(results, out)
    finally:
        if owned:
            out.close()
    for alpha, result in results:
        qite_peak = peak_locate(result.trace.thermo)
        ed_peak = peak_locate(result.reference)
        flag = " (boundary)" if qite_peak.at_boundary or ed_peak.at_boundary else ""
        print(
            f"alpha={_fmt(alpha)}: K_peak qite={_fmt(qite_peak.k_peak)} "
            f"ed={_fmt(ed_peak.k_peak)}{flag}"
        )
    return 0


def _cmd_peak(cfg: dict) -> int:
    _validate_common(cfg)
    spec = _spec_from(cfg)
    if cfg["source"] not in ("ed", "qite"):
        raise ValueError(f"peak source must be 'ed' or 'qite', got {cfg['source']!r}")
    if cfg["source"] == "qite":
        result = run_sweep(
            spec,
            cfg["layers"],
            dtau=cfg["dtau"],
            k_max=cfg["kmax"],
            rcond=cfg["rcond"],
            grid_step=cfg["grid_step"],
        )
        curve = result.trace.thermo
    else:
        n_points = round(cfg["kmax"] / cfg["grid_step"])
        grid = [i * cfg["grid_step"] for i in range(n_points + 1)]
        curve = reference_curve(spec, grid)
    peak = peak_locate(curve)
    if cfg["out"] is not None:
        from .ed import curve_to_csv

        curve_to_csv(curve, cfg["out"])
        print(f"wrote {len(curve)} grid points to {cfg['out']}")
    suffix = " at_boundary=1" if peak.at_boundary else ""
    print(f"K_peak={_fmt(peak.k_peak)} source={cfg['source']}{suffix}")
    return 0


def _cmd_cost(cfg: dict) -> int:
    if cfg["dims"] is None:
        raise ValueError("lattice dims are required (flag --dims or config key dims)")
    dims = cfg["dims"]
    if len(set(dims)) != 1:
        raise ValueError(f"cost model needs a hypercubic lattice, got {dims}")
    estimate = cost_estimate(len(dims), dims[0], cfg["mode"])
    lines = [
        ("steps", estimate.steps),
        ("expectations", estimate.expectations),
        ("gates", estimate.gates),
        ("time", estimate.time_units),
    ]
    if cfg["out"] is not None:
        with open(cfg["out"], "w", newline="") as fh:
            fh.write("quantity,value,d_power,nd_power\n")
            for name, value in lines:
                dp, ndp = estimate.exponents[name]
                fh.write(f"{name},{_fmt(value)},{dp},{ndp}\n")
    for name, value in lines:
        dp, ndp = estimate.exponents[name]
        print(f"{name} = {_fmt(value)} units (D^{dp} * N_d^{ndp}, mode={cfg['mode']})")
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "layers": _cmd_layers,
    "alpha-scan": _cmd_alpha_scan,
    "peak": _cmd_peak,
    "cost": _cmd_cost,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _effective_config(args)
        return _COMMANDS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return 3
    except NumericalAbortError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
