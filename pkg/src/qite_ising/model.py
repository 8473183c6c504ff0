"""Ferromagnetic Ising Hamiltonians with power-law couplings.

H = -sum_{i>j} J / r_ij**alpha Z_i Z_j  -  h sum_i Z_i

with r_ij the periodic Manhattan distance.  alpha = inf selects the
nearest-neighbor model: only r = 1 bonds survive, each with coupling J.
One qubit is assigned per lattice site, qubit index = site index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lattice import Lattice, nearest_neighbor_pairs, site_pairs
from .pauli import PauliString, WeightedPauliSum, multiply_sums

__all__ = ["IsingSpec", "IsingObservables", "bond_pairs", "build_hamiltonian", "build_observables"]


@dataclass(frozen=True)
class IsingSpec:
    """Problem definition: lattice, interaction range alpha, coupling J, field h."""

    lattice: Lattice
    alpha: float = math.inf
    coupling: float = 1.0
    field_h: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive (or inf), got {self.alpha}")
        if not (self.coupling > 0):
            raise ValueError(f"coupling J must be positive, got {self.coupling}")

    @property
    def num_qubits(self) -> int:
        return self.lattice.volume

    @property
    def is_nearest_neighbor(self) -> bool:
        return math.isinf(self.alpha)


@dataclass(frozen=True)
class IsingObservables:
    """Operators measured along an evolution: H, H^2, Z_total, Z_total^2."""

    h: WeightedPauliSum
    h2: WeightedPauliSum = field(repr=False)
    z_tot: WeightedPauliSum = field(repr=False)
    z_tot2: WeightedPauliSum = field(repr=False)


def bond_pairs(spec: IsingSpec) -> list[tuple[int, int, float]]:
    """Interacting pairs (i, j, J_ij) with i > j, in canonical pair order.

    Nearest-neighbor mode keeps only distance-1 pairs at full strength J;
    finite alpha couples every pair with J / r**alpha.
    """
    lat = spec.lattice
    if spec.is_nearest_neighbor:
        return [(i, j, spec.coupling) for (i, j) in nearest_neighbor_pairs(lat)]
    return [
        (i, j, spec.coupling / lat.distance(i, j) ** spec.alpha)
        for (i, j) in site_pairs(lat)
    ]


def build_hamiltonian(spec: IsingSpec) -> WeightedPauliSum:
    nq = spec.num_qubits
    if nq < 2:
        raise ValueError("the pair interaction needs at least two sites")
    terms: list[tuple[PauliString, float]] = [
        (PauliString.from_ops(nq, {i: "Z", j: "Z"}), -jij)
        for (i, j, jij) in bond_pairs(spec)
    ]
    if spec.field_h != 0.0:
        terms.extend(
            (PauliString.from_ops(nq, {q: "Z"}), -spec.field_h) for q in range(nq)
        )
    return WeightedPauliSum(terms)


def build_observables(spec: IsingSpec) -> IsingObservables:
    h = build_hamiltonian(spec)
    nq = spec.num_qubits
    z_tot = WeightedPauliSum(
        [(PauliString.from_ops(nq, {q: "Z"}), 1.0) for q in range(nq)]
    )
    return IsingObservables(
        h=h,
        h2=multiply_sums(h, h),
        z_tot=z_tot,
        z_tot2=multiply_sums(z_tot, z_tot),
    )
