"""Thermal states of the long-range Ising model by variational imaginary
time evolution, checked against exact enumeration.

The moving parts: build an :class:`IsingSpec`, turn it into a layered ZY/YZ
ansatz with :func:`build_ansatz`, integrate the McLachlan equations with
:func:`evolve`, and compare the recorded thermodynamics against
:func:`reference_curve`.  The ``qite-ising`` console script drives the same
machinery from the command line.
"""

from .errors import NumericalAbortError, ResourceLimitError
from .lattice import Lattice, nearest_neighbor_pairs, site_pairs
from .pauli import (
    PauliString,
    WeightedPauliSum,
    commutes,
    dense_matrix,
    diagonal_energies,
    multiply_strings,
    multiply_sums,
)
from .model import IsingObservables, IsingSpec, bond_pairs, build_hamiltonian, build_observables
from .statevector import (
    StateVector,
    apply_ansatz,
    apply_pauli_rotation,
    apply_pauli_string,
    derivative_state,
    exact_qite_state,
    expectation,
    init_plus_state,
)
from .ansatz import (
    Ansatz,
    ansatz_from_pool,
    build_ansatz,
    estimate_transition_layers,
    prune_irrelevant,
    relevant_strings_for_bond,
)
from .evolver import (
    EvolutionTrace,
    EvolverConfig,
    assemble_M,
    assemble_V,
    evolve,
    mclachlan_residual,
    solve_theta_dot,
    trace_to_csv,
)
from .measure_ref import (
    MeasureCircuit,
    MeasureStep,
    apply_gate_list,
    build_measure_circuit,
    fit_step_coefficients,
    merge_commuting_rotations,
)
from .thermo import ThermoPoint, measure_thermal_point, thermo_from_expectations
from .ed import GibbsSums, gibbs_sums, reference_curve
from .cli import (
    CostEstimate,
    PeakResult,
    SweepResult,
    cost_estimate,
    delta_cv_mean,
    layer_scan,
    peak_locate,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Ansatz",
    "CostEstimate",
    "EvolutionTrace",
    "EvolverConfig",
    "GibbsSums",
    "IsingObservables",
    "IsingSpec",
    "Lattice",
    "MeasureCircuit",
    "MeasureStep",
    "NumericalAbortError",
    "PauliString",
    "PeakResult",
    "ResourceLimitError",
    "StateVector",
    "SweepResult",
    "ThermoPoint",
    "WeightedPauliSum",
    "ansatz_from_pool",
    "apply_ansatz",
    "apply_gate_list",
    "apply_pauli_rotation",
    "apply_pauli_string",
    "assemble_M",
    "assemble_V",
    "bond_pairs",
    "build_ansatz",
    "build_hamiltonian",
    "build_measure_circuit",
    "build_observables",
    "commutes",
    "cost_estimate",
    "delta_cv_mean",
    "dense_matrix",
    "derivative_state",
    "diagonal_energies",
    "estimate_transition_layers",
    "evolve",
    "exact_qite_state",
    "expectation",
    "fit_step_coefficients",
    "gibbs_sums",
    "init_plus_state",
    "layer_scan",
    "mclachlan_residual",
    "measure_thermal_point",
    "merge_commuting_rotations",
    "multiply_strings",
    "multiply_sums",
    "nearest_neighbor_pairs",
    "peak_locate",
    "prune_irrelevant",
    "reference_curve",
    "relevant_strings_for_bond",
    "run_sweep",
    "site_pairs",
    "solve_theta_dot",
    "thermo_from_expectations",
    "trace_to_csv",
]
