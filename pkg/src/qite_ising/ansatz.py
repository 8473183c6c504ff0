"""Variational ansatz construction.

Each layer holds one sub-layer of Z_i Y_j rotations over the interacting pair
set (canonical pair order, (i, j) with i > j sorted by (j, i)) followed by one
sub-layer of Y_i Z_j rotations over the same pairs.  Every gate owns its own
angle, so the parameter count is 2 * (#pairs) * layers.  At zero angles the
circuit is the identity.

The pair set follows the Hamiltonian topology: nearest neighbors for the
alpha = inf model, all pairs otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import nearest_neighbor_pairs, site_pairs
from .model import IsingSpec
from .pauli import PauliString, WeightedPauliSum

__all__ = [
    "Ansatz",
    "relevant_strings_for_bond",
    "build_ansatz",
    "ansatz_from_pool",
    "prune_irrelevant",
    "estimate_transition_layers",
]


@dataclass(frozen=True)
class Ansatz:
    """Ordered rotation-gate sequence with one free angle per gate.

    ``gates[k]`` is (string, parameter index); parameter indices are exactly
    0..N-1 in gate order.  ``layer_boundaries`` has num_layers + 1 entries,
    with layer k spanning gates[layer_boundaries[k]:layer_boundaries[k+1]].
    """

    num_qubits: int
    gates: tuple[tuple[PauliString, int], ...]
    layer_boundaries: tuple[int, ...]

    def __post_init__(self):
        for k, (string, idx) in enumerate(self.gates):
            if idx != k:
                raise ValueError("parameter indices must be 0..N-1 in gate order")
            if string.num_qubits != self.num_qubits:
                raise ValueError("gate register does not match the ansatz")
        if len(self.layer_boundaries) < 2 or self.layer_boundaries[0] != 0:
            raise ValueError("layer_boundaries must start at 0 and delimit >= 1 layer")
        if self.layer_boundaries[-1] != len(self.gates):
            raise ValueError("layer_boundaries must end at the gate count")
        if any(a > b for a, b in zip(self.layer_boundaries, self.layer_boundaries[1:])):
            raise ValueError("layer_boundaries must be nondecreasing")

    @property
    def num_params(self) -> int:
        return len(self.gates)

    @property
    def num_layers(self) -> int:
        return len(self.layer_boundaries) - 1

    def layer_gates(self, layer: int) -> tuple[tuple[PauliString, int], ...]:
        lo, hi = self.layer_boundaries[layer], self.layer_boundaries[layer + 1]
        return self.gates[lo:hi]

    def describe(self) -> str:
        """One line per gate: "layer k: STRING -> param m"."""
        lines = []
        for layer in range(self.num_layers):
            for string, idx in self.layer_gates(layer):
                lines.append(f"layer {layer}: {string} -> param {idx}")
        return "\n".join(lines)


def relevant_strings_for_bond(num_qubits: int, i: int, j: int) -> list[PauliString]:
    """The two generator strings a Z_i Z_j bond keeps: Z_i Y_j and Y_i Z_j."""
    if i == j:
        raise ValueError(f"bond needs two distinct sites, got ({i}, {j})")
    return [
        PauliString.from_ops(num_qubits, {i: "Z", j: "Y"}),
        PauliString.from_ops(num_qubits, {i: "Y", j: "Z"}),
    ]


def _interacting_pairs(spec: IsingSpec) -> list[tuple[int, int]]:
    if spec.is_nearest_neighbor:
        return nearest_neighbor_pairs(spec.lattice)
    return site_pairs(spec.lattice)


def build_ansatz(spec: IsingSpec, layers: int) -> Ansatz:
    """Layered ZY/YZ ansatz over the spec's interacting pairs."""
    if layers < 1:
        raise ValueError(f"need at least one layer, got {layers}")
    nq = spec.num_qubits
    pairs = _interacting_pairs(spec)
    if not pairs:
        raise ValueError("spec has no interacting pairs")
    gates: list[tuple[PauliString, int]] = []
    boundaries = [0]
    for _ in range(layers):
        for i, j in pairs:
            zy, _ = relevant_strings_for_bond(nq, i, j)
            gates.append((zy, len(gates)))
        for i, j in pairs:
            _, yz = relevant_strings_for_bond(nq, i, j)
            gates.append((yz, len(gates)))
        boundaries.append(len(gates))
    return Ansatz(nq, tuple(gates), tuple(boundaries))


def ansatz_from_pool(num_qubits: int, pool: list[PauliString], layers: int = 1) -> Ansatz:
    """Single-sub-layer ansatz repeating an explicit string pool; mainly for
    pruning studies with hand-chosen candidate sets."""
    if layers < 1:
        raise ValueError(f"need at least one layer, got {layers}")
    if not pool:
        raise ValueError("empty string pool")
    gates: list[tuple[PauliString, int]] = []
    boundaries = [0]
    for _ in range(layers):
        for string in pool:
            gates.append((string, len(gates)))
        boundaries.append(len(gates))
    return Ansatz(num_qubits, tuple(gates), tuple(boundaries))


def prune_irrelevant(
    ansatz: Ansatz,
    hamiltonian: WeightedPauliSum,
    probe_steps: int = 25,
    threshold: float = 1e-12,
    dtau: float = 0.002,
    rcond: float = 1e-8,
) -> Ansatz:
    """Drop gates whose angles provably stay zero.

    Stage one removes strings with an even number of Y letters (their angles
    cannot move for a real Hamiltonian acting on a real state).  Stage two
    runs a short evolution probe and removes gates whose |theta| and
    |theta_dot| never exceed ``threshold``.  Gate order survives; parameters
    are re-indexed.  ``threshold = 0`` prunes nothing, since floating-point
    updates are never exactly zero-bounded.
    """
    if probe_steps < 1:
        raise ValueError(f"probe needs at least one step, got {probe_steps}")
    from .evolver import probe_angles

    odd_positions = {k for k, (s, _) in enumerate(ansatz.gates) if s.y_parity == 1}
    reduced = _rebuild(ansatz, keep_positions=odd_positions)
    if reduced.num_params == 0:
        return reduced
    thetas, theta_dots = probe_angles(reduced, hamiltonian, probe_steps, dtau, rcond)
    peak = np.maximum(np.abs(thetas).max(axis=0), np.abs(theta_dots).max(axis=0))
    return _rebuild(reduced, keep_positions={k for k in range(reduced.num_params) if peak[k] > threshold})


def _rebuild(ansatz: Ansatz, keep_positions: set[int]) -> Ansatz:
    """New ansatz keeping only the listed gate positions, preserving order and
    recomputing layer boundaries."""
    gates: list[tuple[PauliString, int]] = []
    boundaries = [0]
    for layer in range(ansatz.num_layers):
        lo = ansatz.layer_boundaries[layer]
        for offset, (string, _) in enumerate(ansatz.layer_gates(layer)):
            if lo + offset in keep_positions:
                gates.append((string, len(gates)))
        boundaries.append(len(gates))
    return Ansatz(ansatz.num_qubits, tuple(gates), tuple(boundaries))


def estimate_transition_layers(dimension: int, side: int, gates_per_step: int = 2) -> tuple[float, float]:
    """Bounds on the depth where the layer-limited error plateaus.

    A correlation front needs D * N_d / 2 steps to cross the periodic lattice
    and each layer advances it by between 1 and ``gates_per_step`` steps,
    giving D*N_d/(2G) <= L* <= D*N_d/2.
    """
    if dimension < 1 or side < 1 or gates_per_step < 1:
        raise ValueError("all arguments must be positive")
    upper = dimension * side / 2.0
    return upper / gates_per_step, upper
