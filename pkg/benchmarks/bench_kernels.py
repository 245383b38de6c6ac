"""Time the numba kernels against their numpy twins.

Run with ``python3 benchmarks/bench_kernels.py``. The first numba call of
each kernel is timed separately (it includes compilation).
"""

import argparse
import time

import numpy as np

from lieforge import _kernels
from lieforge.invariance import build_suN_generators
from lieforge.pauli import random_pauli_string
from lieforge.trotter import tfim_generators


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _masks(strings):
    return (np.array([p.x_mask for p in strings], dtype=np.int64),
            np.array([p.z_mask for p in strings], dtype=np.int64))


def cases():
    su32 = build_suN_generators(5, "B_II").strings()
    gx, gz = _masks(su32)
    yield "closure_bfs su(32)", (
        lambda: _kernels.closure_bfs_numpy(gx, gz, 5, 1 << 10),
        lambda: _kernels.closure_bfs_numba(gx, gz, 5, 1 << 10),
    )
    tx, tz = _masks(tfim_generators(8))
    yield "closure_bfs TFIM n=8", (
        lambda: _kernels.closure_bfs_numpy(tx, tz, 8, 1 << 10),
        lambda: _kernels.closure_bfs_numba(tx, tz, 8, 1 << 10),
    )
    rng = np.random.default_rng(0)
    sx, sz = _masks([random_pauli_string(6, rng) for _ in range(200)])
    yield "structure_table 200 strings", (
        lambda: _kernels.structure_table_numpy(sx, sz, 6),
        lambda: _kernels.structure_table_numba(sx, sz, 6),
    )
    dx, dz = _masks([random_pauli_string(8, rng) for _ in range(64)])
    coefs = rng.normal(size=64).astype(np.complex128)
    yield "pauli_dense n=8, 64 terms", (
        lambda: _kernels.pauli_dense_numpy(dx, dz, coefs, 8),
        lambda: _kernels.pauli_dense_numba(dx, dz, coefs, 8),
    )


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    print(f"{'kernel':32s} {'numpy [s]':>11s} {'numba 1st [s]':>14s} {'numba [s]':>11s} {'speedup':>8s}")
    for name, (np_fn, nb_fn) in cases():
        first = _best(nb_fn, 1)
        t_np = _best(np_fn, args.repeat)
        t_nb = _best(nb_fn, args.repeat)
        print(f"{name:32s} {t_np:11.4f} {first:14.4f} {t_nb:11.5f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
