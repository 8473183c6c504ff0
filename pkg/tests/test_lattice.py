import itertools

import numpy as np
import pytest

from qite_ising.lattice import Lattice, nearest_neighbor_pairs, site_pairs


def test_volume_and_dimension():
    lat = Lattice((3, 3))
    assert lat.volume == 9
    assert lat.ndim == 2
    assert Lattice((2, 2, 2)).volume == 8
    assert Lattice((2,)).volume == 2


def test_invalid_dims_rejected():
    with pytest.raises(ValueError):
        Lattice(())
    with pytest.raises(ValueError):
        Lattice((3, 0))
    with pytest.raises(ValueError):
        Lattice((3, -2))


def test_index_coords_roundtrip_row_major():
    lat = Lattice((3, 3))
    assert lat.coords(0) == (0, 0)
    assert lat.coords(8) == (2, 2)
    # last axis runs fastest
    assert lat.coords(1) == (0, 1)
    lat3 = Lattice((2, 2, 2))
    assert lat3.coords(5) == (1, 0, 1)
    for i in range(lat3.volume):
        assert lat3.index(lat3.coords(i)) == i


def test_index_out_of_range():
    lat = Lattice((2, 2))
    with pytest.raises(ValueError):
        lat.coords(4)
    with pytest.raises(ValueError):
        lat.coords(-1)


def test_periodic_manhattan_distance():
    lat = Lattice((3, 3))
    assert lat.distance(lat.index((0, 0)), lat.index((2, 2))) == 2
    lat4 = Lattice((4, 4))
    assert lat4.distance(lat4.index((0, 0)), lat4.index((0, 2))) == 2
    lat8 = Lattice((2, 2, 2))
    assert lat8.distance(lat8.index((0, 0, 0)), lat8.index((1, 1, 1))) == 3


def test_distance_symmetry_and_zero():
    for dims in [(2,), (4,), (3, 3), (4, 4), (2, 3, 3)]:
        lat = Lattice(dims)
        for i, j in itertools.combinations(range(lat.volume), 2):
            assert lat.distance(i, j) == lat.distance(j, i)
            assert lat.distance(i, j) >= 1
        for i in range(lat.volume):
            assert lat.distance(i, i) == 0


def test_distance_translation_invariance():
    lat = Lattice((3, 4))
    rng = np.random.default_rng(11)
    for _ in range(200):
        i, j = rng.integers(0, lat.volume, size=2)
        shift = tuple(int(s) for s in rng.integers(0, 4, size=2))
        ci, cj = lat.coords(int(i)), lat.coords(int(j))
        si = lat.index(tuple((c + s) % n for c, s, n in zip(ci, shift, lat.dims)))
        sj = lat.index(tuple((c + s) % n for c, s, n in zip(cj, shift, lat.dims)))
        assert lat.distance(int(i), int(j)) == lat.distance(si, sj)


def test_all_pairs_count_and_order():
    lat = Lattice((3, 3))
    pairs = site_pairs(lat)
    assert len(pairs) == 36
    assert all(i > j for i, j in pairs)
    assert pairs == sorted(pairs, key=lambda p: (p[1], p[0]))
    # every unordered pair exactly once
    assert len({frozenset(p) for p in pairs}) == 36


def test_nearest_neighbor_pair_sets():
    assert len(nearest_neighbor_pairs(Lattice((3, 3)))) == 18
    # on the 2x2 torus both directions wrap onto the same neighbor, so the
    # distinct distance-1 pairs number 4, not two per site per axis
    pairs = nearest_neighbor_pairs(Lattice((2, 2)))
    assert len(pairs) == 4
    assert len({frozenset(p) for p in pairs}) == 4
    assert len(nearest_neighbor_pairs(Lattice((2,)))) == 1


def test_nearest_neighbor_is_distance_one_subset():
    lat = Lattice((2, 3, 3))
    nn = nearest_neighbor_pairs(lat)
    assert nn == [(i, j) for i, j in site_pairs(lat) if lat.distance(i, j) == 1]
