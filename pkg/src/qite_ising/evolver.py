"""Variational imaginary-time evolution by the McLachlan principle.

Per Euler step the loop builds

    M[mu, nu] = 2 Re <d_mu phi | d_nu phi>
    V[mu]     = -2 Re <d_mu phi | H | phi>

solves M theta_dot = V by a regularized pseudo-inverse and updates
theta <- theta + dtau * theta_dot.  A state prepared at imaginary time tau
carries the thermal physics of inverse temperature beta = 2 tau, so records
are labeled K = 2 tau J.

The assembly exploits two structural facts.  First, the derivative state
|d_mu phi> is the gate sequence with an extra -i sigma_mu inserted after gate
mu, so all N derivative states share prefixes: one forward sweep yields every
chi_mu = -i sigma_mu U_mu ... U_1 |+~> for the cost of 2N gate applications.
Off-diagonal M entries then need only the (N^2)/2 remaining rotations
(M[mu, nu] = 2 Re <U_nu ... U_{mu+1} chi_mu | chi_nu>).  Second, H is diagonal,
so H|phi> is an elementwise product and V costs one backward sweep.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import _kernels
from .errors import NumericalAbortError, ResourceLimitError
from .ansatz import Ansatz
from .model import IsingSpec, build_hamiltonian, build_observables
from .pauli import WeightedPauliSum, dense_matrix, diagonal_energies
from .statevector import StateVector, apply_ansatz, derivative_state, init_plus_state
from .thermo import ThermoPoint, measure_thermal_point

__all__ = [
    "EvolverConfig",
    "EvolutionTrace",
    "assemble_M",
    "assemble_V",
    "solve_theta_dot",
    "evolve",
    "probe_angles",
    "mclachlan_residual",
    "trace_to_csv",
]

RESIDUAL_MAX_QUBITS = 10


@dataclass(frozen=True)
class EvolverConfig:
    """Step length, horizon and solver regularization for one evolution."""

    tau_max: float
    dtau: float = 0.002
    svd_rcond: float = 1e-8
    record_stride: int = 1
    record_residual: bool = False

    def __post_init__(self):
        if self.tau_max < 0:
            raise ValueError(f"tau_max must be nonnegative, got {self.tau_max}")
        if self.dtau <= 0:
            raise ValueError(f"dtau must be positive, got {self.dtau}")
        if self.tau_max > 0 and self.dtau > self.tau_max + 1e-15:
            raise ValueError("dtau exceeds tau_max")
        if not 0 < self.svd_rcond < 1:
            raise ValueError(f"svd_rcond must lie in (0, 1), got {self.svd_rcond}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")

    def num_steps(self) -> int:
        if self.tau_max == 0:
            return 0
        ratio = self.tau_max / self.dtau
        n = round(ratio)
        if abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                f"tau_max/dtau = {ratio} is not an integer step count"
            )
        return int(n)


@dataclass
class EvolutionTrace:
    """Recorded history of one evolution run.

    residuals aligns with taus and holds nan where the McLachlan distance was
    not computed (disabled, or the final record which has no update).
    zero_update_steps lists Euler steps where every M eigenvalue fell below
    the cutoff and theta_dot was forced to zero.
    """

    taus: np.ndarray
    thetas: np.ndarray
    thermo: list[ThermoPoint]
    residuals: np.ndarray
    zero_update_steps: tuple[int, ...] = ()
    coupling: float = 1.0

    @property
    def k_values(self) -> np.ndarray:
        return 2.0 * self.coupling * self.taus


# ---------------------------------------------------------------------------
# assembly primitives
# ---------------------------------------------------------------------------

def _gate_constants(ansatz: Ansatz) -> list[tuple[int, int, complex, float]]:
    return [string.kernel_constants for string, _ in ansatz.gates]


def _forward(consts, params, amps, chis=None) -> None:
    """Run the gate sequence on ``amps`` in place.  When ``chis`` is given,
    row k receives -i sigma_k applied to the state right after gate k."""
    for k, (x_mask, z_mask, phase, pair_sign) in enumerate(consts):
        theta = params[k]
        msin = -1j * math.sin(theta) * phase
        _kernels.rotate_inplace(amps, x_mask, z_mask, math.cos(theta), msin, pair_sign)
        if chis is not None:
            np.copyto(chis[k], amps)
            _kernels.pauli_inplace(chis[k], x_mask, z_mask, -1j * phase, pair_sign)


def _assemble_m(consts, params, chis, scratch) -> np.ndarray:
    n = len(consts)
    m = np.empty((n, n), dtype=np.float64)
    for mu in range(n):
        m[mu, mu] = 2.0 * float(np.vdot(chis[mu], chis[mu]).real)
        np.copyto(scratch, chis[mu])
        for nu in range(mu + 1, n):
            x_mask, z_mask, phase, pair_sign = consts[nu]
            theta = params[nu]
            msin = -1j * math.sin(theta) * phase
            _kernels.rotate_inplace(scratch, x_mask, z_mask, math.cos(theta), msin, pair_sign)
            val = 2.0 * float(np.vdot(scratch, chis[nu]).real)
            m[mu, nu] = val
            m[nu, mu] = val
    return m


def _assemble_v(consts, params, chis, h_phi) -> np.ndarray:
    """Backward sweep; ``h_phi`` enters as H|phi> and is consumed."""
    n = len(consts)
    v = np.empty(n, dtype=np.float64)
    for mu in range(n - 1, -1, -1):
        v[mu] = -2.0 * float(np.vdot(chis[mu], h_phi).real)
        if mu > 0:
            x_mask, z_mask, phase, pair_sign = consts[mu]
            theta = -params[mu]
            msin = -1j * math.sin(theta) * phase
            _kernels.rotate_inplace(h_phi, x_mask, z_mask, math.cos(theta), msin, pair_sign)
    return v


def _apply_sum(observable: WeightedPauliSum, amps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps)
    scratch = np.empty_like(amps)
    for s, c in observable.items():
        np.copyto(scratch, amps)
        x_mask, z_mask, phase, pair_sign = s.kernel_constants
        _kernels.pauli_inplace(scratch, x_mask, z_mask, phase, pair_sign)
        out += c * scratch
    return out


def _prepare(ansatz: Ansatz, params, base: StateVector | None):
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (ansatz.num_params,):
        raise ValueError(f"expected {ansatz.num_params} parameters, got shape {params.shape}")
    state = init_plus_state(ansatz.num_qubits) if base is None else base.copy()
    if state.num_qubits != ansatz.num_qubits:
        raise ValueError("base state register does not match the ansatz")
    return params, state


def assemble_M(ansatz: Ansatz, params, base: StateVector | None = None) -> np.ndarray:
    """The metric 2 Re <d_mu phi | d_nu phi>; symmetric, PSD, diagonal 2."""
    params, state = _prepare(ansatz, params, base)
    consts = _gate_constants(ansatz)
    n = ansatz.num_params
    dim = state.amplitudes.shape[0]
    chis = np.empty((n, dim), dtype=np.complex128)
    _forward(consts, params, state.amplitudes, chis)
    return _assemble_m(consts, params, chis, np.empty(dim, dtype=np.complex128))


def assemble_V(
    ansatz: Ansatz,
    params,
    hamiltonian: WeightedPauliSum,
    base: StateVector | None = None,
) -> np.ndarray:
    """The force vector -2 Re <d_mu phi | H | phi>, H applied term-wise."""
    params, state = _prepare(ansatz, params, base)
    if len(hamiltonian) and hamiltonian.num_qubits != ansatz.num_qubits:
        raise ValueError("Hamiltonian register does not match the ansatz")
    consts = _gate_constants(ansatz)
    n = ansatz.num_params
    dim = state.amplitudes.shape[0]
    chis = np.empty((n, dim), dtype=np.complex128)
    _forward(consts, params, state.amplitudes, chis)
    if len(hamiltonian) == 0:
        return np.zeros(n, dtype=np.float64)
    if hamiltonian.is_diagonal:
        energies = diagonal_energies(hamiltonian, ansatz.num_qubits)
        h_phi = energies * state.amplitudes
    else:
        h_phi = _apply_sum(hamiltonian, state.amplitudes)
    return _assemble_v(consts, params, chis, h_phi)


def _solve(m: np.ndarray, v: np.ndarray, rcond: float) -> tuple[np.ndarray, int]:
    """Minimal-norm least-squares solution and the retained rank."""
    if m.shape[0] == 0:
        return np.zeros(0, dtype=np.float64), 0
    eigvals, eigvecs = np.linalg.eigh(m)
    lam_max = float(np.abs(eigvals).max())
    if lam_max == 0.0:
        return np.zeros_like(v), 0
    keep = np.abs(eigvals) >= rcond * lam_max
    rank = int(keep.sum())
    if rank == 0:
        return np.zeros_like(v), 0
    projected = (eigvecs.T @ v)[keep] / eigvals[keep]
    return eigvecs[:, keep] @ projected, rank


def solve_theta_dot(m: np.ndarray, v: np.ndarray, rcond: float = 1e-8) -> np.ndarray:
    """Solve M theta_dot = V, discarding eigenvalues below rcond * lambda_max.

    When every eigenvalue falls below the cutoff the zero vector comes back;
    evolve() flags such steps in the trace diagnostics.
    """
    m = np.asarray(m, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != v.shape[0]:
        raise ValueError(f"shape mismatch: M {m.shape}, V {v.shape}")
    return _solve(m, v, rcond)[0]


# ---------------------------------------------------------------------------
# the evolution loop
# ---------------------------------------------------------------------------

def evolve(ansatz: Ansatz, spec: IsingSpec, config: EvolverConfig) -> EvolutionTrace:
    """Euler-integrate the ansatz angles from |+>^n up to tau_max.

    Records fall on every ``record_stride``-th step plus the final one; each
    record holds tau, a copy of theta, a ThermoPoint at beta = 2 tau and
    optionally the McLachlan residual of the step taken there.
    """
    if ansatz.num_qubits != spec.num_qubits:
        raise ValueError("ansatz register does not match the spec's lattice")
    base = init_plus_state(spec.num_qubits)
    hamiltonian = build_hamiltonian(spec)
    observables = build_observables(spec)
    energies = diagonal_energies(hamiltonian, spec.num_qubits)
    n_steps = config.num_steps()

    consts = _gate_constants(ansatz)
    n = ansatz.num_params
    dim = base.amplitudes.shape[0]
    chis = np.empty((n, dim), dtype=np.complex128)
    scratch = np.empty(dim, dtype=np.complex128)
    theta = np.zeros(n, dtype=np.float64)

    taus: list[float] = []
    thetas: list[np.ndarray] = []
    thermo: list[ThermoPoint] = []
    residuals: list[float] = []
    zero_update_steps: list[int] = []

    for step in range(n_steps + 1):
        tau = step * config.dtau
        recording = step % config.record_stride == 0 or step == n_steps
        updating = step < n_steps

        amps = base.amplitudes.copy()
        _forward(consts, theta, amps, chis if updating else None)
        phi = StateVector(amps, spec.num_qubits)

        if recording:
            taus.append(tau)
            thetas.append(theta.copy())
            thermo.append(
                measure_thermal_point(
                    phi, observables, 2.0 * tau, spec.coupling, spec.num_qubits
                )
            )

        if updating:
            m = _assemble_m(consts, theta, chis, scratch)
            v = _assemble_v(consts, theta, chis, energies * amps)
            theta_dot, rank = _solve(m, v, config.svd_rcond)
            if not np.all(np.isfinite(theta_dot)):
                raise NumericalAbortError(
                    f"non-finite parameter velocity at step {step} (tau={tau:g}); "
                    f"M may be ill-conditioned at rcond={config.svd_rcond:g}"
                )
            if rank == 0 and n > 0:
                zero_update_steps.append(step)
            if recording:
                residuals.append(
                    mclachlan_residual(ansatz, theta, theta_dot, hamiltonian)
                    if config.record_residual
                    else math.nan
                )
            theta = theta + config.dtau * theta_dot
        elif recording:
            residuals.append(math.nan)

    return EvolutionTrace(
        taus=np.array(taus, dtype=np.float64),
        thetas=np.array(thetas, dtype=np.float64).reshape(len(taus), n),
        thermo=thermo,
        residuals=np.array(residuals, dtype=np.float64),
        zero_update_steps=tuple(zero_update_steps),
        coupling=spec.coupling,
    )


def probe_angles(
    ansatz: Ansatz,
    hamiltonian: WeightedPauliSum,
    steps: int,
    dtau: float = 0.002,
    rcond: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Short evolution that records only angles and velocities.

    Returns (thetas, theta_dots) of shapes (steps+1, N) and (steps, N); the
    pruning stage uses the peak magnitudes to spot parameters that never move.
    """
    if steps < 1:
        raise ValueError(f"need at least one probe step, got {steps}")
    if not hamiltonian.is_diagonal:
        raise ValueError("probe expects a diagonal Hamiltonian")
    consts = _gate_constants(ansatz)
    n = ansatz.num_params
    base = init_plus_state(ansatz.num_qubits)
    energies = diagonal_energies(hamiltonian, ansatz.num_qubits)
    dim = base.amplitudes.shape[0]
    chis = np.empty((n, dim), dtype=np.complex128)
    scratch = np.empty(dim, dtype=np.complex128)
    theta = np.zeros(n, dtype=np.float64)
    thetas = np.empty((steps + 1, n), dtype=np.float64)
    theta_dots = np.empty((steps, n), dtype=np.float64)
    for step in range(steps):
        thetas[step] = theta
        amps = base.amplitudes.copy()
        _forward(consts, theta, amps, chis)
        m = _assemble_m(consts, theta, chis, scratch)
        v = _assemble_v(consts, theta, chis, energies * amps)
        theta_dot, _ = _solve(m, v, rcond)
        if not np.all(np.isfinite(theta_dot)):
            raise NumericalAbortError(f"non-finite parameter velocity at probe step {step}")
        theta_dots[step] = theta_dot
        theta = theta + dtau * theta_dot
    thetas[steps] = theta
    return thetas, theta_dots


def mclachlan_residual(
    ansatz: Ansatz,
    params,
    theta_dot,
    hamiltonian: WeightedPauliSum,
    base: StateVector | None = None,
) -> float:
    """Frobenius distance between the parametrized density-matrix velocity and
    the imaginary-time flow -{H, rho} + 2<H> rho.  Dense construction, so the
    register is capped at RESIDUAL_MAX_QUBITS; diagnostic use only.
    """
    if ansatz.num_qubits > RESIDUAL_MAX_QUBITS:
        raise ResourceLimitError(
            f"residual needs dense {2**ansatz.num_qubits} x {2**ansatz.num_qubits} matrices; "
            f"cap is {RESIDUAL_MAX_QUBITS} qubits"
        )
    theta_dot = np.asarray(theta_dot, dtype=np.float64)
    if theta_dot.shape != (ansatz.num_params,):
        raise ValueError("theta_dot length does not match the ansatz")
    phi = apply_ansatz(ansatz, params, base).amplitudes
    rho = np.outer(phi, phi.conj())
    drho = np.zeros_like(rho)
    for k in range(ansatz.num_params):
        if theta_dot[k] == 0.0:
            continue
        deriv = derivative_state(ansatz, params, k, base).amplitudes
        drho += theta_dot[k] * (np.outer(deriv, phi.conj()) + np.outer(phi, deriv.conj()))
    if hamiltonian.is_diagonal:
        energies = diagonal_energies(hamiltonian, ansatz.num_qubits)
        h_rho = energies[:, None] * rho
        rho_h = rho * energies[None, :]
        mean_h = float((np.abs(phi) ** 2) @ energies)
    else:
        h_mat = dense_matrix(hamiltonian)
        h_rho = h_mat @ rho
        rho_h = rho @ h_mat
        mean_h = float(np.vdot(phi, h_mat @ phi).real)
    flow = -(h_rho + rho_h) + 2.0 * mean_h * rho
    return float(np.linalg.norm(drho - flow))


def trace_to_csv(trace: EvolutionTrace, path: Union[str, Path]) -> None:
    """Header ``tau,K,E,E2,M,M2,Cv,chi,residual``; residual blank when nan."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau", "K", "E", "E2", "M", "M2", "Cv", "chi", "residual"])
        for tau, point, res in zip(trace.taus, trace.thermo, trace.residuals):
            row = [
                f"{v:.12g}"
                for v in (tau, point.K, point.E, point.E2, point.M, point.M2, point.Cv, point.chi)
            ]
            row.append("" if math.isnan(res) else f"{res:.12g}")
            writer.writerow(row)
