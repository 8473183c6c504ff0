"""Noiseless statevector simulation of Pauli rotations on a qubit register.

Amplitude layout matches the kernel convention: index s holds the basis state
whose bit q is the value of qubit q.  Y acts as Y|0> = i|1>, Y|1> = -i|0>, so
e.g. Z1 Y0 |++> = -i |-->, which fixes every sign downstream.

The qubit count is capped (default 24) because every operation walks the full
2^n amplitude array; requests beyond the cap raise ResourceLimitError rather
than thrash.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

from . import _kernels
from .errors import ResourceLimitError
from .pauli import PauliString, WeightedPauliSum, diagonal_energies

if TYPE_CHECKING:  # pragma: no cover
    from .ansatz import Ansatz

__all__ = [
    "DEFAULT_MAX_QUBITS",
    "StateVector",
    "init_plus_state",
    "apply_pauli_rotation",
    "apply_pauli_string",
    "apply_ansatz",
    "derivative_state",
    "expectation",
    "exact_qite_state",
]

DEFAULT_MAX_QUBITS = 24


@dataclass
class StateVector:
    """A 2^n complex amplitude vector plus its qubit count."""

    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"amplitude array of shape {self.amplitudes.shape} does not match "
                f"{self.num_qubits} qubits"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_qubits(num_qubits: int, max_qubits: int | None) -> None:
    cap = DEFAULT_MAX_QUBITS if max_qubits is None else max_qubits
    if num_qubits < 1:
        raise ValueError(f"need at least one qubit, got {num_qubits}")
    if num_qubits > cap:
        raise ResourceLimitError(
            f"{num_qubits} qubits exceeds the statevector cap of {cap}"
        )


def init_plus_state(num_qubits: int, max_qubits: int | None = None) -> StateVector:
    """|+>^n: the uniform superposition every evolution starts from."""
    _check_qubits(num_qubits, max_qubits)
    dim = 1 << num_qubits
    amps = np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)
    return StateVector(amps, num_qubits)


def _rotate_inplace(amps: np.ndarray, string: PauliString, angle: float) -> None:
    """amps <- exp(-i angle sigma) amps."""
    x_mask, z_mask, phase, pair_sign = string.kernel_constants
    msin = -1j * math.sin(angle) * phase
    _kernels.rotate_inplace(amps, x_mask, z_mask, math.cos(angle), msin, pair_sign)


def _pauli_inplace(amps: np.ndarray, string: PauliString, extra: complex = 1.0) -> None:
    """amps <- extra * sigma amps."""
    x_mask, z_mask, phase, pair_sign = string.kernel_constants
    _kernels.pauli_inplace(amps, x_mask, z_mask, extra * phase, pair_sign)


def apply_pauli_rotation(state: StateVector, string: PauliString, angle: float) -> StateVector:
    """exp(-i angle sigma) |state> as a new state; the input is untouched."""
    if string.num_qubits != state.num_qubits:
        raise ValueError("Pauli string register does not match the state")
    out = state.copy()
    _rotate_inplace(out.amplitudes, string, angle)
    return out


def apply_pauli_string(state: StateVector, string: PauliString) -> StateVector:
    """sigma |state> as a new state."""
    if string.num_qubits != state.num_qubits:
        raise ValueError("Pauli string register does not match the state")
    out = state.copy()
    _pauli_inplace(out.amplitudes, string)
    return out


def expectation(state: StateVector, observable: Union[PauliString, WeightedPauliSum]) -> float:
    """<state| O |state>, exactly real for Hermitian O.

    Diagonal sums take the fast path through basis probabilities; anything
    else applies the strings one by one.
    """
    if isinstance(observable, PauliString):
        observable = WeightedPauliSum([(observable, 1.0)])
    if len(observable) == 0:
        return 0.0
    if observable.num_qubits != state.num_qubits:
        raise ValueError("observable register does not match the state")
    if observable.is_diagonal:
        terms = observable.sorted_terms()
        z_masks = np.array([s.z_mask for s, _ in terms], dtype=np.int64)
        coeffs = np.array([c for _, c in terms], dtype=np.float64)
        return float(
            _kernels.weighted_diag_expect(state.probabilities(), z_masks, coeffs)
        )
    acc = 0.0
    scratch = np.empty_like(state.amplitudes)
    for s, c in observable.items():
        np.copyto(scratch, state.amplitudes)
        _pauli_inplace(scratch, s)
        acc += c * float(np.vdot(state.amplitudes, scratch).real)
    return acc


def apply_ansatz(ansatz: "Ansatz", params: np.ndarray, base: StateVector | None = None) -> StateVector:
    """Run the full gate sequence with the given angles on |+>^n (or ``base``)."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (ansatz.num_params,):
        raise ValueError(
            f"expected {ansatz.num_params} parameters, got shape {params.shape}"
        )
    state = init_plus_state(ansatz.num_qubits) if base is None else base.copy()
    if state.num_qubits != ansatz.num_qubits:
        raise ValueError("base state register does not match the ansatz")
    amps = state.amplitudes
    for k, (string, _) in enumerate(ansatz.gates):
        _rotate_inplace(amps, string, params[k])
    return state


def derivative_state(
    ansatz: "Ansatz",
    params: np.ndarray,
    index: int,
    base: StateVector | None = None,
) -> StateVector:
    """The parameter-derivative vector d/d theta_index of the ansatz state.

    Computed by inserting -i sigma directly after gate ``index`` in the
    sequence; the result is unit norm but not a physical state.
    """
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (ansatz.num_params,):
        raise ValueError(
            f"expected {ansatz.num_params} parameters, got shape {params.shape}"
        )
    if not 0 <= index < ansatz.num_params:
        raise ValueError(f"parameter index {index} out of range")
    state = init_plus_state(ansatz.num_qubits) if base is None else base.copy()
    if state.num_qubits != ansatz.num_qubits:
        raise ValueError("base state register does not match the ansatz")
    amps = state.amplitudes
    for k, (string, _) in enumerate(ansatz.gates):
        _rotate_inplace(amps, string, params[k])
        if k == index:
            _pauli_inplace(amps, string, extra=-1j)
    return state


def exact_qite_state(
    hamiltonian: WeightedPauliSum,
    tau: float,
    max_qubits: int | None = None,
) -> StateVector:
    """Normalized exp(-tau H) |+>^n for a diagonal H, computed in closed form.

    Energies are shifted by their minimum before exponentiation so large tau
    stays finite; the shift cancels in the normalization.
    """
    if tau < 0:
        raise ValueError(f"imaginary time must be nonnegative, got {tau}")
    if not hamiltonian.is_diagonal:
        raise ValueError("exact_qite_state requires a diagonal Hamiltonian")
    nq = hamiltonian.num_qubits
    _check_qubits(nq, max_qubits)
    energies = diagonal_energies(hamiltonian, nq)
    weights = np.exp(-tau * (energies - energies.min()))
    amps = weights / np.linalg.norm(weights)
    return StateVector(amps.astype(np.complex128), nq)
