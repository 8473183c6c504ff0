"""Hypercubic lattice with periodic boundaries and Manhattan distances.

Sites are indexed in row-major order: for dims (N_1, ..., N_D) the site with
coordinates (c_1, ..., c_D) gets index c_1 * (N_2 * ... * N_D) + ... + c_D,
so the last dimension varies fastest.  Index 0 is the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

__all__ = ["Lattice", "site_pairs", "nearest_neighbor_pairs"]


@dataclass(frozen=True)
class Lattice:
    """Finite hypercubic lattice, periodic in every direction."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) == 0:
            raise ValueError("lattice needs at least one dimension")
        if any(not isinstance(n, int) or n < 1 for n in self.dims):
            raise ValueError(f"dims must be positive integers, got {self.dims}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def volume(self) -> int:
        return math.prod(self.dims)

    def coords(self, site: int) -> tuple[int, ...]:
        if not 0 <= site < self.volume:
            raise ValueError(f"site {site} outside lattice of volume {self.volume}")
        out = []
        for n in reversed(self.dims):
            out.append(site % n)
            site //= n
        return tuple(reversed(out))

    def index(self, coords: tuple[int, ...]) -> int:
        if len(coords) != self.ndim:
            raise ValueError(f"expected {self.ndim} coordinates, got {len(coords)}")
        site = 0
        for c, n in zip(coords, self.dims):
            if not 0 <= c < n:
                raise ValueError(f"coordinate {c} outside [0, {n})")
            site = site * n + c
        return site

    def sites(self) -> range:
        return range(self.volume)

    def distance(self, a: int, b: int) -> int:
        """Manhattan distance with wrap-around in every direction."""
        ca, cb = self.coords(a), self.coords(b)
        return sum(min(abs(x - y), n - abs(x - y)) for x, y, n in zip(ca, cb, self.dims))


def site_pairs(lat: Lattice) -> list[tuple[int, int]]:
    """All unordered site pairs as (i, j) with i > j, sorted by (j, i)."""
    return [(i, j) for j, i in itertools.combinations(lat.sites(), 2)]


def nearest_neighbor_pairs(lat: Lattice) -> list[tuple[int, int]]:
    """The subset of :func:`site_pairs` at Manhattan distance exactly 1.

    On periodic lattices with some N_d == 2 the two directions along that axis
    reach the same neighbor, but each unordered pair still appears once here.
    """
    return [(i, j) for (i, j) in site_pairs(lat) if lat.distance(i, j) == 1]
