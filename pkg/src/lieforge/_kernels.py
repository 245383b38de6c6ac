"""Hot inner loops over packed Pauli masks.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version producing identical results (same element order, same values).
The active pair is chosen at import time; set ``LIEFORGE_DISABLE_NUMBA=1``
to force the numpy path. Both variants stay importable under explicit
names so tests and ``benchmarks/bench_kernels.py`` can compare them.

Mask convention: a string on n qubits is a pair of int64 masks whose bit
``n - 1 - k`` holds the X (resp. Z) component of the k-th letter, so the
leftmost letter is the most significant bit, matching ``np.kron`` order.
Table-based kernels index a ``4**n`` lookup array and therefore require
``n <= TABLE_KERNEL_MAX_QUBITS``.
"""

import numpy as np

from ._config import numba_disabled

try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _popcount_np(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def anticommute_row_numpy(x, z, xs, zs):
    """Boolean mask: which strings in (xs, zs) anticommute with (x, z)."""
    return (_popcount_np((xs & z) ^ (zs & x)) & 1).astype(bool)


def closure_bfs_numpy(gx, gz, n, capacity):
    gx = np.asarray(gx, dtype=np.int64)
    gz = np.asarray(gz, dtype=np.int64)
    xs = np.zeros(capacity, dtype=np.int64)
    zs = np.zeros(capacity, dtype=np.int64)
    pa = np.full(capacity, -1, dtype=np.int64)
    pb = np.full(capacity, -1, dtype=np.int64)
    table = np.zeros(1 << (2 * n), dtype=np.uint8)
    count = 0
    for k in range(gx.shape[0]):
        key = (int(gx[k]) << n) | int(gz[k])
        if table[key]:
            continue
        if count == capacity:
            return xs, zs, pa, pb, count, True
        table[key] = 1
        xs[count] = gx[k]
        zs[count] = gz[k]
        count += 1
    i = 0
    while i < count:
        xi = xs[i]
        zi = zs[i]
        ac = np.nonzero(anticommute_row_numpy(xi, zi, xs[:i], zs[:i]))[0]
        if ac.size:
            rx = xs[ac] ^ xi
            rz = zs[ac] ^ zi
            keys = (rx << n) | rz
            fresh = table[keys] == 0
            if fresh.any():
                idx = np.nonzero(fresh)[0]
                _, first = np.unique(keys[idx], return_index=True)
                idx = idx[np.sort(first)]
                m = idx.size
                if count + m > capacity:
                    return xs, zs, pa, pb, count, True
                table[keys[idx]] = 1
                xs[count:count + m] = rx[idx]
                zs[count:count + m] = rz[idx]
                pa[count:count + m] = ac[idx]
                pb[count:count + m] = i
                count += m
        i += 1
    return xs, zs, pa, pb, count, False


def structure_table_numpy(xs, zs, n):
    """Commutator table of a closed string basis.

    Returns ``(target, coef)``, both (m, m): ``[iP_a, iP_b] = coef[a, b] * i P_target[a, b]``
    with coef in {0, +2, -2}; target is -1 where the strings commute.
    """
    xs = np.asarray(xs, dtype=np.int64)
    zs = np.asarray(zs, dtype=np.int64)
    m = xs.shape[0]
    lookup = np.full(1 << (2 * n), -1, dtype=np.int64)
    lookup[(xs << n) | zs] = np.arange(m)
    target = np.full((m, m), -1, dtype=np.int64)
    coef = np.zeros((m, m), dtype=np.int64)
    yc = _popcount_np(xs & zs)
    for a in range(m):
        ac = anticommute_row_numpy(xs[a], zs[a], xs, zs)
        b = np.nonzero(ac)[0]
        if b.size == 0:
            continue
        rx = xs[a] ^ xs[b]
        rz = zs[a] ^ zs[b]
        e = (yc[a] + yc[b] + 2 * _popcount_np(zs[a] & xs[b]) - _popcount_np(rx & rz)) % 4
        target[a, b] = lookup[(rx << n) | rz]
        coef[a, b] = np.where(e == 1, -2, 2)
    return target, coef


def pauli_dense_numpy(xs, zs, coefs, n):
    """Dense sum_k coefs[k] * P_k (no factor i)."""
    d = 1 << n
    cols = np.arange(d, dtype=np.int64)
    out = np.zeros((d, d), dtype=np.complex128)
    phases = np.array([1, 1j, -1, -1j])
    for x, z, c in zip(np.asarray(xs, dtype=np.int64), np.asarray(zs, dtype=np.int64), coefs):
        ph = phases[int(np.bitwise_count(np.int64(x & z))) % 4]
        sign = 1 - 2 * (_popcount_np(cols & z) & 1)
        out[cols ^ x, cols] += c * ph * sign
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _popcount(v):
        c = 0
        while v:
            v &= v - 1
            c += 1
        return c

    @njit(cache=True)
    def anticommute_row_numba(x, z, xs, zs):
        out = np.empty(xs.shape[0], dtype=np.bool_)
        for j in range(xs.shape[0]):
            out[j] = (_popcount((xs[j] & z) ^ (zs[j] & x)) & 1) == 1
        return out

    @njit(cache=True)
    def closure_bfs_numba(gx, gz, n, capacity):
        xs = np.zeros(capacity, dtype=np.int64)
        zs = np.zeros(capacity, dtype=np.int64)
        pa = np.full(capacity, -1, dtype=np.int64)
        pb = np.full(capacity, -1, dtype=np.int64)
        table = np.zeros(1 << (2 * n), dtype=np.uint8)
        count = 0
        for k in range(gx.shape[0]):
            key = (gx[k] << n) | gz[k]
            if table[key]:
                continue
            if count == capacity:
                return xs, zs, pa, pb, count, True
            table[key] = 1
            xs[count] = gx[k]
            zs[count] = gz[k]
            count += 1
        i = 0
        while i < count:
            xi = xs[i]
            zi = zs[i]
            for j in range(i):
                if _popcount((xs[j] & zi) ^ (zs[j] & xi)) & 1:
                    rx = xs[j] ^ xi
                    rz = zs[j] ^ zi
                    key = (rx << n) | rz
                    if table[key] == 0:
                        if count == capacity:
                            return xs, zs, pa, pb, count, True
                        table[key] = 1
                        xs[count] = rx
                        zs[count] = rz
                        pa[count] = j
                        pb[count] = i
                        count += 1
            i += 1
        return xs, zs, pa, pb, count, False

    @njit(cache=True)
    def structure_table_numba(xs, zs, n):
        m = xs.shape[0]
        lookup = np.full(1 << (2 * n), -1, dtype=np.int64)
        for a in range(m):
            lookup[(xs[a] << n) | zs[a]] = a
        target = np.full((m, m), -1, dtype=np.int64)
        coef = np.zeros((m, m), dtype=np.int64)
        for a in range(m):
            ya = _popcount(xs[a] & zs[a])
            for b in range(m):
                if _popcount((xs[a] & zs[b]) ^ (zs[a] & xs[b])) & 1:
                    rx = xs[a] ^ xs[b]
                    rz = zs[a] ^ zs[b]
                    e = (ya + _popcount(xs[b] & zs[b]) + 2 * _popcount(zs[a] & xs[b])
                         - _popcount(rx & rz)) % 4
                    target[a, b] = lookup[(rx << n) | rz]
                    coef[a, b] = -2 if e == 1 else 2
        return target, coef

    @njit(cache=True)
    def pauli_dense_numba(xs, zs, coefs, n):
        d = 1 << n
        out = np.zeros((d, d), dtype=np.complex128)
        for k in range(xs.shape[0]):
            x = xs[k]
            z = zs[k]
            e = _popcount(x & z) % 4
            if e == 0:
                ph = 1.0 + 0.0j
            elif e == 1:
                ph = 1j
            elif e == 2:
                ph = -1.0 + 0.0j
            else:
                ph = -1j
            val = coefs[k] * ph
            for c in range(d):
                if _popcount(c & z) & 1:
                    out[c ^ x, c] -= val
                else:
                    out[c ^ x, c] += val
        return out

else:  # pragma: no cover
    anticommute_row_numba = None
    closure_bfs_numba = None
    structure_table_numba = None
    pauli_dense_numba = None


if HAVE_NUMBA and not numba_disabled():
    BACKEND = "numba"
    anticommute_row = anticommute_row_numba
    closure_bfs = closure_bfs_numba
    structure_table = structure_table_numba
    _pauli_dense_impl = pauli_dense_numba
else:
    BACKEND = "numpy"
    anticommute_row = anticommute_row_numpy
    closure_bfs = closure_bfs_numpy
    structure_table = structure_table_numpy
    _pauli_dense_impl = pauli_dense_numpy


def pauli_dense(xs, zs, coefs, n):
    return _pauli_dense_impl(
        np.asarray(xs, dtype=np.int64),
        np.asarray(zs, dtype=np.int64),
        np.asarray(coefs, dtype=np.complex128),
        n,
    )
