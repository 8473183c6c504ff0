"""Micro-benchmark of the statevector kernels, numpy vs numba.

Times the four hot kernels on a synthetic register, then a short end-to-end
parameter evolution on the 3x3 lattice with each backend.  The numba columns
only appear when the extension imports; a warm-up call keeps JIT compilation
out of the timings.

    python3 benchmarks/bench_kernels.py --qubits 16 --repeats 20
"""

import argparse
import time

import numpy as np

from qite_ising import _kernels
from qite_ising.ansatz import build_ansatz
from qite_ising.evolver import EvolverConfig, evolve
from qite_ising.lattice import Lattice
from qite_ising.model import IsingSpec, build_hamiltonian
from qite_ising.pauli import PauliString


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def kernel_cases(num_qubits, rng):
    """Callable per kernel name, parametrized over a backend namespace."""
    dim = 1 << num_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    amps /= np.linalg.norm(amps)
    string = PauliString.from_label(f"Z{num_qubits - 1}Y0", num_qubits)
    x_mask, z_mask, phase, pair_sign = string.kernel_constants
    probs = np.abs(amps) ** 2
    n_terms = 24
    z_masks = rng.integers(1, dim, size=n_terms).astype(np.int64)
    coeffs = rng.normal(size=n_terms)

    def rotate(k):
        work = amps.copy()
        k.rotate_inplace(work, x_mask, z_mask, np.cos(0.3), -1j * np.sin(0.3) * phase, pair_sign)

    def pauli(k):
        work = amps.copy()
        k.pauli_inplace(work, x_mask, z_mask, phase, pair_sign)

    def diag_expect(k):
        k.weighted_diag_expect(probs, z_masks, coeffs)

    def energies(k):
        k.config_energies(z_masks, coeffs, dim)

    def magnet(k):
        k.magnetizations(dim, num_qubits)

    return [
        ("rotate_inplace", rotate),
        ("pauli_inplace", pauli),
        ("weighted_diag_expect", diag_expect),
        ("config_energies", energies),
        ("magnetizations", magnet),
    ]


def bench_kernels(num_qubits, repeats, rng):
    backends = _kernels.available_backends()
    cases = kernel_cases(num_qubits, rng)
    print(f"kernels on {num_qubits} qubits (best of {repeats}, seconds)")
    header = f"{'kernel':24s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) > 1:
        header += f"{'numba gain':>11s}"
    print(header)
    for name, fn in cases:
        timed = {}
        for backend in backends:
            k = _kernels.get_kernels(backend)
            fn(k)  # warm-up, compiles on first numba call
            timed[backend] = time_call(lambda: fn(k), repeats)
        row = f"{name:24s}" + "".join(f"{timed[b]:12.2e}" for b in backends)
        if "numba" in timed and "numpy" in timed:
            row += f"{timed['numpy'] / timed['numba']:10.1f}x"
        print(row)


def bench_evolve(repeats):
    spec = IsingSpec(lattice=Lattice((3, 3)))
    ansatz = build_ansatz(spec, 2)
    config = EvolverConfig(tau_max=0.1, dtau=0.002)
    print(f"\nevolve 3x3 depth 2, {config.num_steps()} steps (best of {repeats}, seconds)")
    previous = _kernels.active_backend()
    try:
        for backend in _kernels.available_backends():
            _kernels.set_backend(backend)
            evolve(ansatz, spec, config)  # warm-up
            best = time_call(lambda: evolve(ansatz, spec, config), repeats)
            print(f"{backend:>8s}: {best:.3f}")
    finally:
        _kernels.set_backend(previous)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=16)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--skip-evolve", action="store_true")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    bench_kernels(args.qubits, args.repeats, rng)
    if not args.skip_evolve:
        bench_evolve(max(3, args.repeats // 5))


if __name__ == "__main__":
    main()
