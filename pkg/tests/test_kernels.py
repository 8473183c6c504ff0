"""Backend parity: the numba kernels must agree with the plain numpy ones."""

import numpy as np
import pytest

from qite_ising import _kernels
from qite_ising.pauli import PauliString

HAVE_NUMBA = "numba" in _kernels.available_backends()
needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not built")


def random_state(rng, nq):
    amps = rng.normal(size=1 << nq) + 1j * rng.normal(size=1 << nq)
    return amps / np.linalg.norm(amps)


def random_string(rng, nq):
    return PauliString(tuple(int(k) for k in rng.integers(0, 4, size=nq)))


def test_numpy_backend_always_available():
    assert "numpy" in _kernels.available_backends()


def test_set_backend_roundtrip():
    before = _kernels.active_backend()
    try:
        _kernels.set_backend("numpy")
        assert _kernels.active_backend() == "numpy"
    finally:
        _kernels.set_backend(before)
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


def test_env_flag_selection(monkeypatch):
    monkeypatch.setenv("QITE_ISING_NUMBA", "0")
    assert _kernels._initial_choice() == "numpy"
    monkeypatch.setenv("QITE_ISING_NUMBA", "off")
    assert _kernels._initial_choice() == "numpy"
    monkeypatch.setenv("QITE_ISING_NUMBA", "auto")
    assert _kernels._initial_choice() in _kernels.available_backends()
    if HAVE_NUMBA:
        monkeypatch.setenv("QITE_ISING_NUMBA", "1")
        assert _kernels._initial_choice() == "numba"


def test_parity_signs_match_popcount():
    values = np.arange(4096, dtype=np.int64)
    got = _kernels._parity_signs(values.copy())
    expected = 1.0 - 2.0 * (np.bitwise_count(values) & 1)
    np.testing.assert_array_equal(got, expected)


@needs_numba
@pytest.mark.parametrize("nq", [1, 3, 6])
def test_rotate_backends_agree(nq):
    rng = np.random.default_rng(101 + nq)
    np_k = _kernels.get_kernels("numpy")
    nb_k = _kernels.get_kernels("numba")
    for _ in range(20):
        string = random_string(rng, nq)
        x, z, phase, pair_sign = string.kernel_constants
        angle = float(rng.uniform(-3, 3))
        cos_t = np.cos(angle)
        msin = -1j * np.sin(angle) * phase
        a = random_state(rng, nq)
        b = a.copy()
        np_k.rotate_inplace(a, x, z, cos_t, msin, pair_sign)
        nb_k.rotate_inplace(b, x, z, cos_t, msin, pair_sign)
        np.testing.assert_allclose(a, b, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("nq", [2, 5])
def test_pauli_apply_backends_agree(nq):
    rng = np.random.default_rng(7 + nq)
    np_k = _kernels.get_kernels("numpy")
    nb_k = _kernels.get_kernels("numba")
    for _ in range(20):
        string = random_string(rng, nq)
        x, z, phase, pair_sign = string.kernel_constants
        extra = complex(rng.normal(), rng.normal())
        a = random_state(rng, nq)
        b = a.copy()
        np_k.pauli_inplace(a, x, z, phase * extra, pair_sign)
        nb_k.pauli_inplace(b, x, z, phase * extra, pair_sign)
        np.testing.assert_allclose(a, b, atol=1e-14)


@needs_numba
def test_diag_expect_backends_agree():
    rng = np.random.default_rng(55)
    nq = 6
    probs = np.abs(random_state(rng, nq)) ** 2
    z_masks = rng.integers(0, 1 << nq, size=9).astype(np.int64)
    coeffs = rng.normal(size=9)
    a = _kernels.get_kernels("numpy").weighted_diag_expect(probs, z_masks, coeffs)
    b = _kernels.get_kernels("numba").weighted_diag_expect(probs, z_masks, coeffs)
    assert a == pytest.approx(b, abs=1e-13)


@needs_numba
def test_config_energies_backends_agree():
    rng = np.random.default_rng(77)
    nq = 7
    z_masks = rng.integers(0, 1 << nq, size=12).astype(np.int64)
    coeffs = rng.normal(size=12)
    a = _kernels.get_kernels("numpy").config_energies(z_masks, coeffs, 1 << nq)
    b = _kernels.get_kernels("numba").config_energies(z_masks, coeffs, 1 << nq)
    np.testing.assert_allclose(a, b, atol=1e-13)


@needs_numba
def test_magnetizations_backends_agree():
    a = _kernels.get_kernels("numpy").magnetizations(1 << 8, 8)
    b = _kernels.get_kernels("numba").magnetizations(1 << 8, 8)
    np.testing.assert_array_equal(a, b)
    # spot value: state 0 has every spin up
    assert a[0] == 8.0
    assert a[(1 << 8) - 1] == -8.0
