"""Pauli strings and real-weighted Pauli sums on a fixed qubit register.

A string stores one letter per qubit (dense tuple, entry q for qubit q) and
renders as e.g. "Z3Y0", highest qubit first, identity letters omitted.  Basis
state integers put qubit q at bit q, matching the kernel convention, so the
dense matrix of a string is kron(letter_{n-1}, ..., letter_0).

Phases follow the textbook single-qubit products (XY = iZ and cyclic); the
two-string product tracks the accumulated power of i exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Union

import numpy as np

from . import _kernels

__all__ = [
    "COEFF_TOL",
    "PauliString",
    "WeightedPauliSum",
    "multiply_strings",
    "commutes",
    "multiply_sums",
    "dense_matrix",
    "diagonal_energies",
]

COEFF_TOL = 1e-14

_LETTERS = "IXYZ"
_CODE = {c: k for k, c in enumerate(_LETTERS)}

# _PROD_LETTER[a][b] and _PROD_PHASE[a][b]: sigma_a . sigma_b = i**phase . sigma_letter
_PROD_LETTER = [
    [0, 1, 2, 3],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [3, 2, 1, 0],
]
_PROD_PHASE = [
    [0, 0, 0, 0],
    [0, 0, 1, 3],
    [0, 3, 0, 1],
    [0, 1, 3, 0],
]

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

_LABEL_TOKEN = re.compile(r"([IXYZ])(\d+)")

_SINGLE_QUBIT_DENSE = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class PauliString:
    """Immutable Pauli string; ``letters[q]`` is the code (0..3 = I,X,Y,Z) on qubit q."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if len(self.letters) == 0:
            raise ValueError("empty Pauli string")
        if any(l not in (0, 1, 2, 3) for l in self.letters):
            raise ValueError(f"invalid letter codes in {self.letters}")

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls((0,) * num_qubits)

    @classmethod
    def from_ops(cls, num_qubits: int, ops: Mapping[int, str]) -> "PauliString":
        """Build from a {qubit: letter} mapping, e.g. ``from_ops(4, {3: "Z", 0: "Y"})``."""
        letters = [0] * num_qubits
        for q, ch in ops.items():
            if not 0 <= q < num_qubits:
                raise ValueError(f"qubit {q} outside register of {num_qubits}")
            if ch not in _CODE:
                raise ValueError(f"unknown Pauli letter {ch!r}")
            letters[q] = _CODE[ch]
        return cls(tuple(letters))

    @classmethod
    def from_label(cls, label: str, num_qubits: int) -> "PauliString":
        """Parse "Z3Y0" style labels; "I" alone is the identity."""
        label = label.strip()
        if label == "I":
            return cls.identity(num_qubits)
        ops: dict[int, str] = {}
        consumed = 0
        for m in _LABEL_TOKEN.finditer(label):
            consumed += len(m.group(0))
            q = int(m.group(2))
            if q in ops:
                raise ValueError(f"qubit {q} repeated in label {label!r}")
            ops[q] = m.group(1)
        if consumed != len(label.replace(" ", "")) or not ops:
            raise ValueError(f"cannot parse Pauli label {label!r}")
        return cls.from_ops(num_qubits, ops)

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    @cached_property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, l in enumerate(self.letters) if l != 0)

    @cached_property
    def weight(self) -> int:
        return len(self.support)

    @cached_property
    def y_count(self) -> int:
        return sum(1 for l in self.letters if l == 2)

    @property
    def y_parity(self) -> int:
        return self.y_count & 1

    @cached_property
    def is_diagonal(self) -> bool:
        return all(l in (0, 3) for l in self.letters)

    @cached_property
    def x_mask(self) -> int:
        m = 0
        for q, l in enumerate(self.letters):
            if l in (1, 2):
                m |= 1 << q
        return m

    @cached_property
    def z_mask(self) -> int:
        m = 0
        for q, l in enumerate(self.letters):
            if l in (2, 3):
                m |= 1 << q
        return m

    @cached_property
    def kernel_constants(self) -> tuple[int, int, complex, float]:
        """(x_mask, z_mask, i**y_count, pair sign) as consumed by the kernels.

        The pair sign is (-1)**popcount(x_mask & z_mask); it relates the z-parity
        signs of the two basis states a bit-flip mask connects.
        """
        phase = _I_POWERS[self.y_count & 3]
        pair_sign = -1.0 if (self.x_mask & self.z_mask).bit_count() & 1 else 1.0
        return self.x_mask, self.z_mask, phase, pair_sign

    def __str__(self) -> str:
        if not self.support:
            return "I"
        return "".join(f"{_LETTERS[self.letters[q]]}{q}" for q in reversed(self.support))

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r}, num_qubits={self.num_qubits})"


def multiply_strings(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product a.b as (phase, string); the phase is a power of i."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("cannot multiply strings on different registers")
    phase_pow = 0
    letters = []
    for la, lb in zip(a.letters, b.letters):
        phase_pow += _PROD_PHASE[la][lb]
        letters.append(_PROD_LETTER[la][lb])
    return _I_POWERS[phase_pow & 3], PauliString(tuple(letters))


def commutes(a: PauliString, b: PauliString) -> bool:
    """True when [a, b] = 0: an even number of positions with distinct non-identity letters."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("cannot compare strings on different registers")
    clashes = sum(
        1 for la, lb in zip(a.letters, b.letters) if la != 0 and lb != 0 and la != lb
    )
    return clashes % 2 == 0


class WeightedPauliSum:
    """Real linear combination of Pauli strings on one register.

    Construction merges duplicate strings, drops coefficients with magnitude
    at most ``COEFF_TOL`` and rejects non-real weights.  Term order follows
    first insertion; :meth:`sorted_terms` gives a canonical ordering.
    """

    __slots__ = ("_terms", "_num_qubits")

    def __init__(
        self,
        terms: Union[Mapping[PauliString, float], Iterable[tuple[PauliString, float]]] = (),
    ):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: dict[PauliString, float] = {}
        nq = None
        for string, coeff in items:
            if isinstance(coeff, complex):
                if abs(coeff.imag) > COEFF_TOL:
                    raise ValueError(f"non-real coefficient {coeff} for {string}")
                coeff = coeff.real
            coeff = float(coeff)
            if nq is None:
                nq = string.num_qubits
            elif string.num_qubits != nq:
                raise ValueError("mixed register sizes in one sum")
            acc[string] = acc.get(string, 0.0) + coeff
        self._terms = {s: c for s, c in acc.items() if abs(c) > COEFF_TOL}
        self._num_qubits = nq

    @property
    def terms(self) -> Mapping[PauliString, float]:
        return MappingProxyType(self._terms)

    @property
    def num_qubits(self) -> int:
        if self._num_qubits is None:
            raise ValueError("empty sum has no register size")
        return self._num_qubits

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, string: PauliString) -> bool:
        return string in self._terms

    def coefficient(self, string: PauliString) -> float:
        return self._terms.get(string, 0.0)

    def items(self):
        return self._terms.items()

    def sorted_terms(self) -> list[tuple[PauliString, float]]:
        return sorted(self._terms.items(), key=lambda kv: kv[0].letters)

    @property
    def is_diagonal(self) -> bool:
        return all(s.is_diagonal for s in self._terms)

    def l1_norm(self) -> float:
        return sum(abs(c) for c in self._terms.values())

    def __add__(self, other: "WeightedPauliSum") -> "WeightedPauliSum":
        merged = dict(self._terms)
        for s, c in other.items():
            merged[s] = merged.get(s, 0.0) + c
        return WeightedPauliSum(merged)

    def __mul__(self, scalar: float) -> "WeightedPauliSum":
        return WeightedPauliSum({s: c * scalar for s, c in self._terms.items()})

    __rmul__ = __mul__

    def allclose(self, other: "WeightedPauliSum", tol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= tol for k in keys)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c:+.6g}*{s}" for s, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"WeightedPauliSum({len(self)} terms on {self._num_qubits} qubits)"


def multiply_sums(a: WeightedPauliSum, b: WeightedPauliSum) -> WeightedPauliSum:
    """Operator product of two sums.

    Raises when any cross term picks up a non-real phase, which cannot happen
    for products of diagonal sums (the use here: squares of H and Z_total).
    """
    acc: dict[PauliString, float] = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            phase, prod = multiply_strings(sa, sb)
            if abs(phase.imag) > COEFF_TOL:
                raise ValueError(
                    f"product term {sa} . {sb} has non-real phase {phase}; "
                    "the result would leave the real-weighted algebra"
                )
            acc[prod] = acc.get(prod, 0.0) + ca * cb * phase.real
    ordered = sorted(acc.items(), key=lambda kv: kv[0].letters)
    return WeightedPauliSum(ordered)


def dense_matrix(op: Union[PauliString, WeightedPauliSum]) -> np.ndarray:
    """Explicit 2^n x 2^n matrix; intended for small test systems only."""
    if isinstance(op, PauliString):
        mat = np.ones((1, 1), dtype=np.complex128)
        for l in reversed(op.letters):
            mat = np.kron(mat, _SINGLE_QUBIT_DENSE[l])
        return mat
    out = None
    for s, c in op.items():
        term = c * dense_matrix(s)
        out = term if out is None else out + term
    if out is None:
        raise ValueError("dense_matrix of an empty sum is ambiguous")
    return out


def diagonal_energies(op: WeightedPauliSum, num_qubits: int | None = None) -> np.ndarray:
    """Eigenvalue of a diagonal sum on every computational basis state.

    Entry s is sum_t c_t * (-1)**popcount(s & z_mask_t); identity terms
    contribute their coefficient to every state.
    """
    if not op.is_diagonal:
        raise ValueError("diagonal_energies needs a sum of I/Z strings only")
    nq = op.num_qubits if num_qubits is None else num_qubits
    if num_qubits is not None and len(op) and op.num_qubits != num_qubits:
        raise ValueError("num_qubits disagrees with the sum's register")
    terms = op.sorted_terms()
    z_masks = np.array([s.z_mask for s, _ in terms], dtype=np.int64)
    coeffs = np.array([c for _, c in terms], dtype=np.float64)
    return _kernels.config_energies(z_masks, coeffs, 1 << nq)
