"""Thermodynamic quantities from raw expectation values.

Units put k_B = 1, so 1/T = beta and the fluctuation relations read

    Cv  = beta**2 * (<H^2> - <H>^2) / volume
    chi = beta    * (<Z_tot^2> - <Z_tot>^2) / volume

with chi evaluated at zero field.  K = J * beta is the dimensionless
temperature axis everything is plotted against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import IsingObservables
from .statevector import StateVector, expectation

__all__ = ["ThermoPoint", "thermo_from_expectations", "measure_thermal_point"]


@dataclass(frozen=True)
class ThermoPoint:
    K: float
    E: float
    E2: float
    M: float
    M2: float
    Cv: float
    chi: float


def thermo_from_expectations(
    E: float,
    E2: float,
    M: float,
    M2: float,
    beta: float,
    coupling: float,
    volume: int,
) -> ThermoPoint:
    if volume < 1:
        raise ValueError(f"volume must be at least 1, got {volume}")
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    cv = beta * beta * (E2 - E * E) / volume
    chi = beta * (M2 - M * M) / volume
    return ThermoPoint(K=coupling * beta, E=E, E2=E2, M=M, M2=M2, Cv=cv, chi=chi)


def measure_thermal_point(
    state: StateVector,
    observables: IsingObservables,
    beta: float,
    coupling: float,
    volume: int,
) -> ThermoPoint:
    """Evaluate H, H^2, Z_tot, Z_tot^2 on a state prepared at tau = beta/2."""
    return thermo_from_expectations(
        E=expectation(state, observables.h),
        E2=expectation(state, observables.h2),
        M=expectation(state, observables.z_tot),
        M2=expectation(state, observables.z_tot2),
        beta=beta,
        coupling=coupling,
        volume=volume,
    )
