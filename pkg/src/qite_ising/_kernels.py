"""Hot numeric kernels, in two interchangeable flavours.

Every function here operates on raw numpy arrays plus integer bit masks; the
object-level modules (statevector, evolver, ed) translate Pauli strings into
masks and call through the module-level names below.

Two implementations exist:

* ``numba``: tight @njit loops over the amplitude index.  This is the default
  whenever numba imports cleanly.
* ``numpy``: vectorised fallback with no compiled dependency.

Selection happens once at import from the environment variable
``QITE_ISING_NUMBA`` ("1" force numba, "0" force numpy, unset or "auto" pick
numba when available) and can be changed at runtime with :func:`set_backend`.

Conventions baked into the kernels: basis state ``s`` is an integer whose bit
``q`` holds qubit ``q`` (qubit 0 is the least significant bit), and a Pauli
string is carried as ``x_mask`` (bits with X or Y), ``z_mask`` (bits with Y or
Z) plus scalar phase factors the caller precomputes.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

__all__ = [
    "active_backend",
    "available_backends",
    "get_kernels",
    "set_backend",
    "rotate_inplace",
    "pauli_inplace",
    "weighted_diag_expect",
    "config_energies",
    "magnetizations",
]


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

_index_cache: dict[int, np.ndarray] = {}
_pair_cache: dict[tuple[int, int], np.ndarray] = {}


def _indices(n: int) -> np.ndarray:
    arr = _index_cache.get(n)
    if arr is None:
        arr = np.arange(n, dtype=np.int64)
        _index_cache[n] = arr
    return arr


def _lower_half(n: int, high_bit: int) -> np.ndarray:
    """All basis indices below n whose bit ``high_bit`` is clear."""
    key = (n, high_bit)
    arr = _pair_cache.get(key)
    if arr is None:
        idx = _indices(n)
        arr = idx[(idx >> high_bit) & 1 == 0]
        _pair_cache[key] = arr
    return arr


def _parity_signs(values: np.ndarray) -> np.ndarray:
    """(-1)**popcount(v) for each int64 entry, as float64."""
    v = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return 1.0 - 2.0 * (v & 1)


def _np_rotate_inplace(amps, x_mask, z_mask, cos_t, msin, pair_sign):
    n = amps.shape[0]
    if x_mask == 0:
        signs = _parity_signs(_indices(n) & z_mask)
        amps *= cos_t + msin * signs
        return
    lo = _lower_half(n, int(x_mask).bit_length() - 1)
    hi = lo ^ x_mask
    sign_lo = _parity_signs(lo & z_mask)
    a_lo = amps[lo]
    a_hi = amps[hi]
    amps[lo] = cos_t * a_lo + (msin * pair_sign) * (sign_lo * a_hi)
    amps[hi] = cos_t * a_hi + msin * (sign_lo * a_lo)


def _np_pauli_inplace(amps, x_mask, z_mask, phase, pair_sign):
    n = amps.shape[0]
    if x_mask == 0:
        signs = _parity_signs(_indices(n) & z_mask)
        amps *= phase * signs
        return
    lo = _lower_half(n, int(x_mask).bit_length() - 1)
    hi = lo ^ x_mask
    sign_lo = _parity_signs(lo & z_mask)
    a_lo = amps[lo]
    a_hi = amps[hi]
    amps[lo] = (phase * pair_sign) * (sign_lo * a_hi)
    amps[hi] = phase * (sign_lo * a_lo)


def _np_weighted_diag_expect(probs, z_masks, coeffs):
    idx = _indices(probs.shape[0])
    total = 0.0
    for t in range(z_masks.shape[0]):
        signs = _parity_signs(idx & z_masks[t])
        total += coeffs[t] * float(probs @ signs)
    return total


def _np_config_energies(z_masks, coeffs, n_states):
    idx = _indices(n_states)
    out = np.zeros(n_states, dtype=np.float64)
    for t in range(z_masks.shape[0]):
        out += coeffs[t] * _parity_signs(idx & z_masks[t])
    return out


def _np_magnetizations(n_states, num_qubits):
    counts = np.bitwise_count(_indices(n_states)).astype(np.float64)
    return num_qubits - 2.0 * counts


_NUMPY = SimpleNamespace(
    name="numpy",
    rotate_inplace=_np_rotate_inplace,
    pauli_inplace=_np_pauli_inplace,
    weighted_diag_expect=_np_weighted_diag_expect,
    config_energies=_np_config_energies,
    magnetizations=_np_magnetizations,
)


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

def _build_numba_backend():
    from numba import njit

    @njit(cache=True)
    def nb_rotate_inplace(amps, x_mask, z_mask, cos_t, msin, pair_sign):
        n = amps.shape[0]
        if x_mask == 0:
            for s in range(n):
                v = s & z_mask
                v ^= v >> 32
                v ^= v >> 16
                v ^= v >> 8
                v ^= v >> 4
                v ^= v >> 2
                v ^= v >> 1
                sign = -1.0 if v & 1 else 1.0
                amps[s] = (cos_t + msin * sign) * amps[s]
            return
        high = 0
        t = x_mask
        while t > 1:
            t >>= 1
            high += 1
        high_bit = 1 << high
        for s in range(n):
            if s & high_bit:
                continue
            p = s ^ x_mask
            v = s & z_mask
            v ^= v >> 32
            v ^= v >> 16
            v ^= v >> 8
            v ^= v >> 4
            v ^= v >> 2
            v ^= v >> 1
            sign_s = -1.0 if v & 1 else 1.0
            a_s = amps[s]
            a_p = amps[p]
            amps[s] = cos_t * a_s + (msin * pair_sign * sign_s) * a_p
            amps[p] = cos_t * a_p + (msin * sign_s) * a_s

    @njit(cache=True)
    def nb_pauli_inplace(amps, x_mask, z_mask, phase, pair_sign):
        n = amps.shape[0]
        if x_mask == 0:
            for s in range(n):
                v = s & z_mask
                v ^= v >> 32
                v ^= v >> 16
                v ^= v >> 8
                v ^= v >> 4
                v ^= v >> 2
                v ^= v >> 1
                if v & 1:
                    amps[s] = -phase * amps[s]
                else:
                    amps[s] = phase * amps[s]
            return
        high = 0
        t = x_mask
        while t > 1:
            t >>= 1
            high += 1
        high_bit = 1 << high
        for s in range(n):
            if s & high_bit:
                continue
            p = s ^ x_mask
            v = s & z_mask
            v ^= v >> 32
            v ^= v >> 16
            v ^= v >> 8
            v ^= v >> 4
            v ^= v >> 2
            v ^= v >> 1
            sign_s = -1.0 if v & 1 else 1.0
            a_s = amps[s]
            a_p = amps[p]
            amps[s] = (phase * pair_sign * sign_s) * a_p
            amps[p] = (phase * sign_s) * a_s

    @njit(cache=True)
    def nb_weighted_diag_expect(probs, z_masks, coeffs):
        total = 0.0
        n = probs.shape[0]
        for t in range(z_masks.shape[0]):
            zm = z_masks[t]
            acc = 0.0
            for s in range(n):
                v = s & zm
                v ^= v >> 32
                v ^= v >> 16
                v ^= v >> 8
                v ^= v >> 4
                v ^= v >> 2
                v ^= v >> 1
                if v & 1:
                    acc -= probs[s]
                else:
                    acc += probs[s]
            total += coeffs[t] * acc
        return total

    @njit(cache=True)
    def nb_config_energies(z_masks, coeffs, n_states):
        out = np.zeros(n_states, dtype=np.float64)
        for t in range(z_masks.shape[0]):
            zm = z_masks[t]
            c = coeffs[t]
            for s in range(n_states):
                v = s & zm
                v ^= v >> 32
                v ^= v >> 16
                v ^= v >> 8
                v ^= v >> 4
                v ^= v >> 2
                v ^= v >> 1
                if v & 1:
                    out[s] -= c
                else:
                    out[s] += c
        return out

    @njit(cache=True)
    def nb_magnetizations(n_states, num_qubits):
        out = np.empty(n_states, dtype=np.float64)
        for s in range(n_states):
            v = s
            count = 0
            while v:
                v &= v - 1
                count += 1
            out[s] = num_qubits - 2.0 * count
        return out

    return SimpleNamespace(
        name="numba",
        rotate_inplace=nb_rotate_inplace,
        pauli_inplace=nb_pauli_inplace,
        weighted_diag_expect=nb_weighted_diag_expect,
        config_energies=nb_config_energies,
        magnetizations=nb_magnetizations,
    )


_BACKENDS: dict[str, SimpleNamespace] = {"numpy": _NUMPY}

try:
    _BACKENDS["numba"] = _build_numba_backend()
except ImportError:  # pragma: no cover - exercised only without numba installed
    pass


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_kernels(name: str) -> SimpleNamespace:
    """Fetch one backend's kernel namespace without switching the active one."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}") from None


def set_backend(name: str) -> None:
    """Rebind the module-level kernel entry points to the named backend."""
    ns = get_kernels(name)
    globals().update(
        rotate_inplace=ns.rotate_inplace,
        pauli_inplace=ns.pauli_inplace,
        weighted_diag_expect=ns.weighted_diag_expect,
        config_energies=ns.config_energies,
        magnetizations=ns.magnetizations,
        _active=name,
    )


def active_backend() -> str:
    return _active


def _initial_choice() -> str:
    flag = os.environ.get("QITE_ISING_NUMBA", "auto").strip().lower()
    if flag in ("1", "true", "on", "yes"):
        if "numba" not in _BACKENDS:
            raise RuntimeError("QITE_ISING_NUMBA=1 but numba is not importable")
        return "numba"
    if flag in ("0", "false", "off", "no"):
        return "numpy"
    return "numba" if "numba" in _BACKENDS else "numpy"


_active = ""
set_backend(_initial_choice())
