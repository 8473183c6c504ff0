import math

import numpy as np
import pytest

from qite_ising.lattice import Lattice
from qite_ising.model import IsingSpec, bond_pairs, build_hamiltonian, build_observables
from qite_ising.pauli import PauliString, commutes, dense_matrix


def test_spec_validation():
    lat = Lattice((2,))
    with pytest.raises(ValueError):
        IsingSpec(lattice=lat, alpha=0.0)
    with pytest.raises(ValueError):
        IsingSpec(lattice=lat, alpha=-1.0)
    with pytest.raises(ValueError):
        IsingSpec(lattice=lat, coupling=0.0)
    assert IsingSpec(lattice=lat).is_nearest_neighbor
    assert not IsingSpec(lattice=lat, alpha=2.0).is_nearest_neighbor


def test_two_site_chain_single_bond():
    spec = IsingSpec(lattice=Lattice((2,)))
    h = build_hamiltonian(spec)
    assert h.sorted_terms() == [(PauliString.from_label("Z1Z0", 2), -1.0)]


def test_nn_hamiltonian_3x3():
    spec = IsingSpec(lattice=Lattice((3, 3)))
    h = build_hamiltonian(spec)
    terms = h.sorted_terms()
    assert len(terms) == 18
    assert all(c == -1.0 for _, c in terms)
    assert all(s.weight == 2 and s.is_diagonal for s, _ in terms)


def test_long_range_couplings_3x3():
    spec = IsingSpec(lattice=Lattice((3, 3)), alpha=2.0)
    h = build_hamiltonian(spec)
    assert len(h.sorted_terms()) == 36
    lat = spec.lattice
    coeffs = {frozenset({i, j}): c for (i, j, c) in bond_pairs(spec)}
    i, j = lat.index((0, 0)), lat.index((1, 1))
    assert lat.distance(i, j) == 2
    assert coeffs[frozenset({i, j})] == pytest.approx(1.0 / 4.0)


def test_bond_pairs_scale_with_coupling_and_alpha():
    spec = IsingSpec(lattice=Lattice((3,)), alpha=1.0, coupling=2.0)
    pairs = bond_pairs(spec)
    # 3-site ring: every pair at distance 1
    assert [(i, j) for i, j, _ in pairs] == [(1, 0), (2, 0), (2, 1)]
    assert all(c == pytest.approx(2.0) for _, _, c in pairs)


def test_field_term():
    spec = IsingSpec(lattice=Lattice((2,)), field_h=0.3)
    h = build_hamiltonian(spec)
    consts = dict(h.sorted_terms())
    assert consts[PauliString.from_label("Z0", 2)] == pytest.approx(-0.3)
    assert consts[PauliString.from_label("Z1", 2)] == pytest.approx(-0.3)
    assert consts[PauliString.from_label("Z1Z0", 2)] == pytest.approx(-1.0)


def test_single_site_rejected():
    with pytest.raises(ValueError):
        build_hamiltonian(IsingSpec(lattice=Lattice((1,))))


def test_observables_two_qubits():
    spec = IsingSpec(lattice=Lattice((2,)))
    obs = build_observables(spec)
    assert obs.h2.sorted_terms() == [(PauliString.identity(2), 1.0)]
    expected_zt2 = {
        PauliString.identity(2): 2.0,
        PauliString.from_label("Z1Z0", 2): 2.0,
    }
    assert dict(obs.z_tot2.sorted_terms()) == pytest.approx(expected_zt2)


def test_observables_2x2_ztot_squared():
    spec = IsingSpec(lattice=Lattice((2, 2)))
    obs = build_observables(spec)
    consts = dict(obs.z_tot2.sorted_terms())
    assert consts.pop(PauliString.identity(4)) == pytest.approx(4.0)
    assert len(consts) == 6
    assert all(c == pytest.approx(2.0) for c in consts.values())


def test_observables_match_dense_small():
    for dims, alpha in [((2,), math.inf), ((2, 2), math.inf), ((4,), 2.0)]:
        spec = IsingSpec(lattice=Lattice(dims), alpha=alpha)
        obs = build_observables(spec)
        h = dense_matrix(obs.h)
        np.testing.assert_allclose(dense_matrix(obs.h2), h @ h, atol=1e-12)
        zt = dense_matrix(obs.z_tot)
        np.testing.assert_allclose(dense_matrix(obs.z_tot2), zt @ zt, atol=1e-12)


def test_everything_commutes():
    spec = IsingSpec(lattice=Lattice((2, 2)), alpha=3.0)
    obs = build_observables(spec)
    strings = [s for group in (obs.h, obs.h2, obs.z_tot, obs.z_tot2) for s, _ in group.sorted_terms()]
    assert all(commutes(a, b) for a in strings for b in strings)


def test_large_alpha_approaches_nearest_neighbor():
    spec = IsingSpec(lattice=Lattice((3, 3)), alpha=64.0)
    far = [c for i, j, c in bond_pairs(spec) if spec.lattice.distance(i, j) >= 2]
    assert far and max(far) <= 2.0 ** -64
