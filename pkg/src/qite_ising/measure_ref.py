"""Step-fitted imaginary-time evolution circuits (desk-scale reference).

Each small step of e^{-dtau H_m} acting on the current normalized state is
reproduced by a unitary exp(-i sum_I a_I sigma_I) over a pool of candidate
strings; the coefficients come from a statevector least-squares fit, so this
module validates circuit structure and depth claims rather than emulating a
measurement-based protocol.  The returned coefficients are the rotation
angles themselves: the emitted gate for (sigma, a) is exp(-i a sigma).

Pools contain only strings with an odd number of Y letters: for a real
Hamiltonian acting on a real-amplitude state the even-Y strings provably
acquire zero coefficients.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ansatz import relevant_strings_for_bond
from .model import IsingSpec, build_hamiltonian
from .pauli import PauliString, WeightedPauliSum, commutes, dense_matrix, diagonal_energies
from .statevector import StateVector, init_plus_state
from .statevector import _rotate_inplace  # shared gate kernel path
from .errors import ResourceLimitError

__all__ = [
    "MeasureStep",
    "MeasureCircuit",
    "fit_step_coefficients",
    "build_measure_circuit",
    "merge_commuting_rotations",
    "apply_gate_list",
    "odd_y_pool",
]

MEASURE_MAX_QUBITS = 8
_GN_MAX_ITERS = 8
_GN_TOL = 1e-13


@dataclass(frozen=True)
class MeasureStep:
    """One fitted step: candidate strings, their fitted angles, the step size."""

    pauli_pool: tuple[PauliString, ...]
    coefficients: tuple[float, ...]
    dtau: float

    def __post_init__(self):
        if len(self.pauli_pool) != len(self.coefficients):
            raise ValueError("pool and coefficient lengths differ")
        if len(set(self.pauli_pool)) != len(self.pauli_pool):
            raise ValueError("pool strings must be distinct")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise ValueError("coefficients must be finite")

    def gates(self) -> list[tuple[PauliString, float]]:
        return list(zip(self.pauli_pool, self.coefficients))


@dataclass
class MeasureCircuit:
    """Layered gate list; layer k holds every gate of Trotter step k."""

    num_qubits: int
    layers: list[list[tuple[PauliString, float]]]

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def flatten(self) -> list[tuple[PauliString, float]]:
        return [gate for layer in self.layers for gate in layer]

    def apply_to(self, state: StateVector) -> StateVector:
        return apply_gate_list(state, self.flatten())

    def describe(self) -> str:
        lines = []
        for k, layer in enumerate(self.layers):
            for string, angle in layer:
                lines.append(f"layer {k}: {string} -> angle {angle:.12g}")
        return "\n".join(lines)


def apply_gate_list(
    state: StateVector, gates: list[tuple[PauliString, float]]
) -> StateVector:
    """Sequentially apply exp(-i a sigma) for each (sigma, a)."""
    out = state.copy()
    for string, angle in gates:
        _rotate_inplace(out.amplitudes, string, angle)
    return out


def odd_y_pool(num_qubits: int, sites: list[int]) -> list[PauliString]:
    """All Pauli strings supported inside ``sites`` with an odd Y count,
    enumerated deterministically (letter patterns in lexicographic order)."""
    sites = sorted(set(sites))
    pool = []
    for letters in itertools.product("IXYZ", repeat=len(sites)):
        if sum(1 for l in letters if l == "Y") % 2 == 1:
            ops = {q: l for q, l in zip(sites, letters) if l != "I"}
            pool.append(PauliString.from_ops(num_qubits, ops))
    return pool


def _dense_pool(pool: list[PauliString]) -> list[np.ndarray]:
    return [dense_matrix(s) for s in pool]


def _step_unitary_apply(pool_dense, coeffs, amps) -> np.ndarray:
    """exp(-i sum_I a_I sigma_I) amps via Hermitian eigendecomposition."""
    gen = np.zeros_like(pool_dense[0])
    for a, mat in zip(coeffs, pool_dense):
        gen += a * mat
    eigvals, eigvecs = np.linalg.eigh(gen)
    return eigvecs @ (np.exp(-1j * eigvals) * (eigvecs.conj().T @ amps))


def _real_lstsq(columns: np.ndarray, rhs: np.ndarray, rcond: float) -> np.ndarray:
    """Least squares over real coefficients of complex columns; minimal-norm
    solution when the normal matrix is singular."""
    stacked = np.concatenate([columns.real, columns.imag], axis=0)
    target = np.concatenate([rhs.real, rhs.imag])
    solution, *_ = np.linalg.lstsq(stacked, target, rcond=rcond)
    return solution


def fit_step_coefficients(
    state: StateVector,
    term: WeightedPauliSum,
    pool: list[PauliString],
    dtau: float,
    rcond: float = 1e-8,
    max_dtau: float = 0.01,
) -> np.ndarray:
    """Angles a such that exp(-i sum a_I sigma_I)|state> tracks the normalized
    exp(-dtau term)|state>.

    A linearized least-squares solve seeds Gauss-Newton refinement, iterated
    to a fixed point (at most 8 rounds); for a mutually commuting pool the
    refinement uses the exact Jacobian, for wider pools it remains a
    first-order fit.  Per-step infidelity is O(dtau^2) either way.
    """
    if not pool:
        raise ValueError("empty candidate pool")
    if len(set(pool)) != len(pool):
        raise ValueError("pool strings must be distinct")
    if dtau < 0:
        raise ValueError(f"dtau must be nonnegative, got {dtau}")
    if dtau > max_dtau * (1 + 1e-12):
        raise ValueError(f"dtau={dtau} exceeds the small-step bound {max_dtau}")
    if not term.is_diagonal:
        raise ValueError("only diagonal Hamiltonian terms are supported")
    nq = state.num_qubits
    if nq > MEASURE_MAX_QUBITS:
        raise ResourceLimitError(
            f"step fitting builds dense matrices; cap is {MEASURE_MAX_QUBITS} qubits"
        )
    if any(s.num_qubits != nq for s in pool):
        raise ValueError("pool register does not match the state")

    amps = state.amplitudes
    values = diagonal_energies(term, nq)
    weights = np.exp(-dtau * (values - values.min()))
    target = weights * amps
    target = target / np.linalg.norm(target)

    # linearized seed: target - amps ~ sum_I a_I (-i sigma_I amps)
    columns = np.empty((amps.shape[0], len(pool)), dtype=np.complex128)
    for idx, string in enumerate(pool):
        col = amps.copy()
        x_mask, z_mask, phase, pair_sign = string.kernel_constants
        _kernels.pauli_inplace(col, x_mask, z_mask, -1j * phase, pair_sign)
        columns[:, idx] = col
    coeffs = _real_lstsq(columns, target - amps, rcond)

    pool_dense = _dense_pool(pool)
    for _ in range(_GN_MAX_ITERS):
        evolved = _step_unitary_apply(pool_dense, coeffs, amps)
        residual = target - evolved
        jac = np.empty_like(columns)
        for idx, mat in enumerate(pool_dense):
            jac[:, idx] = -1j * (mat @ evolved)
        delta = _real_lstsq(jac, residual, rcond)
        coeffs = coeffs + delta
        if np.abs(delta).max() < _GN_TOL:
            break
    return coeffs


def _default_pool(nq: int, term_string: PauliString) -> list[PauliString]:
    support = term_string.support
    if len(support) != 2:
        raise ValueError(f"expected a two-site term, got support {support}")
    j, i = support
    return relevant_strings_for_bond(nq, i, j)


def build_measure_circuit(
    spec: IsingSpec,
    tau: float,
    dtau: float,
    widen_radius: int | None = None,
    rcond: float = 1e-8,
) -> MeasureCircuit:
    """tau/dtau sequential fitted Trotter steps over the Hamiltonian terms.

    Per step, each term is fitted on its own pool: by default the two-string
    set of its bond; with ``widen_radius`` r, all odd-Y strings supported on
    the bond's sites plus every site within Manhattan distance r of them.
    """
    if dtau <= 0:
        raise ValueError(f"dtau must be positive, got {dtau}")
    ratio = tau / dtau
    n_steps = round(ratio)
    if abs(ratio - n_steps) > 1e-9 * max(1.0, abs(ratio)) or n_steps < 1:
        raise ValueError(f"tau/dtau = {ratio} is not a positive integer step count")
    nq = spec.num_qubits
    hamiltonian = build_hamiltonian(spec)
    terms = list(hamiltonian.items())

    pools: list[list[PauliString]] = []
    for string, _ in terms:
        if widen_radius is None:
            pools.append(_default_pool(nq, string))
        else:
            ball = {
                site
                for site in spec.lattice.sites()
                for anchor in string.support
                if spec.lattice.distance(site, anchor) <= widen_radius
            }
            pools.append(odd_y_pool(nq, sorted(ball)))

    state = init_plus_state(nq)
    layers: list[list[tuple[PauliString, float]]] = []
    for _ in range(n_steps):
        layer: list[tuple[PauliString, float]] = []
        for (string, coeff), pool in zip(terms, pools):
            term = WeightedPauliSum([(string, coeff)])
            fitted = fit_step_coefficients(
                state, term, pool, dtau, rcond=rcond, max_dtau=max(dtau, 0.01)
            )
            gates = list(zip(pool, (float(a) for a in fitted)))
            layer.extend(gates)
            state = apply_gate_list(state, gates)
        layers.append(layer)
    return MeasureCircuit(num_qubits=nq, layers=layers)


def merge_commuting_rotations(circuit) -> list[tuple[PauliString, float]]:
    """Collapse a gate list by sliding each rotation left across commuting
    neighbors and summing angles on identical strings.

    Accepts a MeasureCircuit or a flat (string, angle) list.  The merged
    list's action on any state equals the input's exactly: a gate only ever
    moves across gates it commutes with.
    """
    gates = circuit.flatten() if isinstance(circuit, MeasureCircuit) else list(circuit)
    merged: list[list] = []
    for string, angle in gates:
        placed = False
        for entry in reversed(merged):
            if entry[0] == string:
                entry[1] += angle
                placed = True
                break
            if not commutes(entry[0], string):
                break
        if not placed:
            merged.append([string, angle])
    return [(string, float(angle)) for string, angle in merged]
