"""Lie closure of generating sets, symbolic and dense.

The symbolic path exploits that ``[iP, iQ]`` is zero or ``+-2 iR`` for a
single string R, so the closure of string generators is spanned by the
strings reachable through pairwise products of anticommuting strings.
The dense path keeps a Hilbert-Schmidt orthonormal basis and admits a new
direction whenever a commutator leaves the current span.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from ._config import RANK_TOL, TABLE_KERNEL_MAX_QUBITS
from .dense import as_array, is_anti_hermitian, realvec, unrealvec
from .errors import ClosureError, DimensionMismatchError, RoleError
from .generators import GeneratorSet
from .pauli import PauliString, PauliSum, commutator, string_matrix, symplectic_commutes


@dataclass
class LieBasis:
    """Basis of a closed Lie algebra.

    For ``flavor == "symbolic"`` each element of ``strings`` stands for
    ``i P``; for ``flavor == "dense"``, ``mats`` holds HS-orthonormal
    anti-Hermitian matrices. ``provenance[k]`` is ``None`` for generators
    and otherwise the parent index pair ``(a, b)`` such that element k is
    (the new part of) ``[b_a, b_b]``.
    """

    flavor: str
    strings: tuple = ()
    mats: np.ndarray | None = None
    provenance: list = field(default_factory=list)
    n_qubits: int | None = None
    saturated: bool = False
    _ad: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.strings) if self.flavor == "symbolic" else int(self.mats.shape[0])

    @property
    def matrix_dim(self) -> int:
        if self.flavor == "symbolic":
            return 1 << self.n_qubits
        return int(self.mats.shape[1])

    def __len__(self):
        return self.dim

    def labels(self) -> list[str]:
        return [p.label for p in self.strings]

    def matrices(self) -> np.ndarray:
        """HS-orthonormal dense elements; symbolic strings map to ``iP / sqrt(d)``."""
        if self.flavor == "dense":
            return self.mats
        d = self.matrix_dim
        out = np.empty((self.dim, d, d), dtype=np.complex128)
        for k, p in enumerate(self.strings):
            out[k] = 1j * string_matrix(p) / np.sqrt(d)
        return out

    def to_dict(self) -> dict:
        out = {"flavor": self.flavor, "dim": self.dim, "provenance": [None if p is None else list(p) for p in self.provenance]}
        if self.flavor == "symbolic":
            out["n_qubits"] = self.n_qubits
            out["basis"] = self.labels()
        else:
            out["saturated"] = bool(self.saturated)
            out["basis"] = [{"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()} for m in self.mats]
        return out


# -- symbolic ----------------------------------------------------------------

def _as_strings(gens) -> list[PauliString]:
    if isinstance(gens, GeneratorSet):
        return gens.strings()
    out = []
    for g in gens:
        if isinstance(g, str):
            g = PauliString.from_label(g)
        elif isinstance(g, PauliSum):
            if not g.is_single_string():
                raise ValueError("symbolic closure needs single-string generators")
            g = next(iter(g))
        out.append(g)
    return out


def _closure_python(strings: list[PauliString]):
    """Set-based BFS used above the table-kernel size limit; same visiting order."""
    xs = [p.x_mask for p in strings]
    zs = [p.z_mask for p in strings]
    seen = set()
    bx, bz, pa, pb = [], [], [], []
    for x, z in zip(xs, zs):
        if (x, z) in seen:
            continue
        seen.add((x, z))
        bx.append(x)
        bz.append(z)
        pa.append(-1)
        pb.append(-1)
    i = 0
    while i < len(bx):
        xi, zi = bx[i], bz[i]
        for j in range(i):
            if ((bx[j] & zi) ^ (bz[j] & xi)).bit_count() & 1:
                key = (bx[j] ^ xi, bz[j] ^ zi)
                if key not in seen:
                    seen.add(key)
                    bx.append(key[0])
                    bz.append(key[1])
                    pa.append(j)
                    pb.append(i)
        i += 1
    return bx, bz, pa, pb


def pauli_closure(gens, use_kernel: bool | None = None) -> LieBasis:
    """Closure of Pauli-string generators as a canonically sorted string basis.

    Coefficients are irrelevant: the real span of the reachable strings is
    the algebra. Generators are sorted before the search, so the result
    (provenance included) does not depend on input order.
    """
    strings = _as_strings(gens)
    if not strings:
        raise ValueError("empty generator set")
    n = strings[0].n
    for p in strings:
        if p.n != n:
            raise DimensionMismatchError("generators act on different registers")
    strings = sorted(set(strings), key=lambda p: p.label)
    if use_kernel is None:
        use_kernel = n <= TABLE_KERNEL_MAX_QUBITS
    if use_kernel:
        gx = np.array([p.x_mask for p in strings], dtype=np.int64)
        gz = np.array([p.z_mask for p in strings], dtype=np.int64)
        full = (1 << (2 * n)) - 1
        capacity = min(max(1024, 4 * len(strings)), full + 1)
        while True:
            xs, zs, pa, pb, count, overflow = _kernels.closure_bfs(gx, gz, n, capacity)
            if not overflow:
                break
            capacity = min(2 * capacity, full + 1)
        xs, zs, pa, pb = (a[:count].tolist() for a in (xs, zs, pa, pb))
    else:
        xs, zs, pa, pb = _closure_python(strings)
    found = [PauliString(n, x, z) for x, z in zip(xs, zs)]
    order = sorted(range(len(found)), key=lambda k: found[k].label)
    rank = {old: new for new, old in enumerate(order)}
    prov = []
    for old in order:
        prov.append(None if pa[old] < 0 else (rank[pa[old]], rank[pb[old]]))
    return LieBasis("symbolic", strings=tuple(found[k] for k in order), provenance=prov, n_qubits=n)


# -- dense -------------------------------------------------------------------

def _dense_list(gens) -> list[np.ndarray]:
    if isinstance(gens, GeneratorSet):
        return gens.dense()
    return [as_array(g) for g in gens]


def dense_closure(gens, rank_tol: float = RANK_TOL, max_dim: int | None = None) -> LieBasis:
    """Closure of anti-Hermitian matrices as an HS-orthonormal basis.

    Pairs are visited in a fixed order (element i against every earlier
    element j); a commutator is admitted when its residual after projecting
    out the current span exceeds ``rank_tol`` times its own norm. Newly
    admitted elements are paired in turn, so reaching the end of the list
    is a full sweep with nothing left to add.
    """
    mats = _dense_list(gens)
    if not mats:
        raise ValueError("empty generator set")
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise DimensionMismatchError("generators have different dimensions")
        if not is_anti_hermitian(m, 1e-9):
            raise RoleError("dense closure needs anti-Hermitian generators")
    cap = d * d if max_dim is None else int(max_dim)
    vlen = 2 * d * d
    q = np.zeros((min(cap, d * d) + 1, vlen))
    count = 0
    prov: list = []

    def admit(v, norm0, parent, block_start):
        nonlocal count
        if norm0 <= 1e-300:
            return False
        r = v
        for _ in range(2):
            r = r - (q[:count] @ r) @ q[:count]
        nr = np.linalg.norm(r)
        if nr <= rank_tol * norm0:
            return False
        if count >= cap:
            raise ClosureError(f"closure exceeded the configured maximum dimension {cap}")
        q[count] = r / nr
        count += 1
        prov.append(parent)
        return True

    for g in mats:
        v = realvec(g)
        admit(v, np.linalg.norm(v), None, 0)

    i = 0
    while i < count:
        if i > 0:
            bi = unrealvec(q[i], d)
            bj = unrealvec(q[:i], d)
            comm = bi @ bj - bj @ bi  # [b_i, b_j] for j < i
            v = realvec(comm)
            norms = np.linalg.norm(v, axis=1)
            base = count
            r = v - (v @ q[:base].T) @ q[:base]
            for j in range(i):
                # commutator of two unit elements: anything this small is zero
                if norms[j] <= 1e-12:
                    continue
                rj = r[j]
                if count > base:
                    rj = rj - (q[base:count] @ rj) @ q[base:count]
                if np.linalg.norm(rj) <= rank_tol * norms[j]:
                    continue
                admit(rj, norms[j], (i, j), base)
        i += 1

    out = unrealvec(q[:count], d)
    return LieBasis("dense", mats=out, provenance=prov, n_qubits=_log2_or_none(d), saturated=count >= d * d - 1)


def _log2_or_none(d):
    return int(d).bit_length() - 1 if d & (d - 1) == 0 else None


def closure(gens, rank_tol: float = RANK_TOL) -> LieBasis:
    """Symbolic closure for single-string generator sets, dense otherwise."""
    if isinstance(gens, GeneratorSet) and gens.is_pauli_strings:
        return pauli_closure(gens)
    return dense_closure(gens, rank_tol=rank_tol)


def as_dense_basis(basis: LieBasis) -> LieBasis:
    if basis.flavor == "dense":
        return basis
    return LieBasis("dense", mats=basis.matrices(), provenance=list(basis.provenance),
                    n_qubits=basis.n_qubits, saturated=basis.dim >= basis.matrix_dim ** 2 - 1)


# -- structure ---------------------------------------------------------------

def structure_constants(basis: LieBasis):
    """Exact string table for a symbolic basis: ``(target, coef)`` arrays."""
    if basis.flavor != "symbolic":
        raise ValueError("structure_constants is for symbolic bases")
    xs = np.array([p.x_mask for p in basis.strings], dtype=np.int64)
    zs = np.array([p.z_mask for p in basis.strings], dtype=np.int64)
    n = basis.n_qubits
    if n <= TABLE_KERNEL_MAX_QUBITS:
        return _kernels.structure_table(xs, zs, n)
    m = basis.dim
    index = {p: k for k, p in enumerate(basis.strings)}
    target = np.full((m, m), -1, dtype=np.int64)
    coef = np.zeros((m, m), dtype=np.int64)
    for a, p in enumerate(basis.strings):
        for b, q in enumerate(basis.strings):
            c = commutator(PauliSum.from_string(p), PauliSum.from_string(q))
            for r, val in c.items():
                target[a, b] = index[r]
                coef[a, b] = int(round(val))
    return target, coef


MAX_ADJOINT_DIM = 512


def adjoint_matrices(basis: LieBasis) -> np.ndarray:
    """Real array ``ad`` with ``ad[i][k, j]`` the b_k-coefficient of ``[b_i, b_j]``.

    Symbolic bases use the unnormalized strings ``iP`` as coordinates, so
    entries are exactly 0 or +-2. Dense bases use their orthonormal elements.
    """
    if basis._ad is not None:
        return basis._ad
    m = basis.dim
    if m > MAX_ADJOINT_DIM:
        raise ValueError(f"basis of dimension {m} too large for dense adjoint matrices (cap {MAX_ADJOINT_DIM})")
    ad = np.zeros((m, m, m))
    if basis.flavor == "symbolic":
        target, coef = structure_constants(basis)
        a_idx, b_idx = np.nonzero(target >= 0)
        ad[a_idx, target[a_idx, b_idx], b_idx] = coef[a_idx, b_idx]
    else:
        b = basis.mats
        q = realvec(b)
        for i in range(m - 1):
            rest = b[i + 1:]
            comm = b[i] @ rest - rest @ b[i]
            block = realvec(comm) @ q.T  # (j, k)
            ad[i, :, i + 1:] = block.T
            ad[i + 1:, :, i] = -block
    ad.setflags(write=False)
    basis._ad = ad
    return ad


def killing_form(basis: LieBasis) -> np.ndarray:
    ad = adjoint_matrices(basis)
    m = ad.shape[0]
    return ad.reshape(m, -1) @ ad.transpose(0, 2, 1).reshape(m, -1).T


def contains(basis: LieBasis, x) -> tuple[bool, float]:
    """Membership test with relative residual ``||x - proj(x)|| / ||x||``."""
    if basis.flavor == "symbolic" and isinstance(x, (PauliSum, PauliString, str)):
        if isinstance(x, str):
            x = PauliString.from_label(x)
        if isinstance(x, PauliString):
            x = PauliSum.from_string(x)
        if x.n != basis.n_qubits:
            raise DimensionMismatchError("operator and basis act on different registers")
        total = x.norm()
        if total == 0:
            return True, 0.0
        inside = set(basis.strings)
        outside = np.sqrt(sum(c * c for p, c in x.items() if p not in inside))
        res = float(outside / total)
        return res <= 1e-9, res
    m = as_array(x)
    mats = basis.matrices()
    if m.shape != mats.shape[1:]:
        raise DimensionMismatchError("operator and basis have different dimensions")
    v = realvec(m)
    total = np.linalg.norm(v)
    if total == 0:
        return True, 0.0
    q = realvec(mats)
    r = v - (q @ v) @ q
    res = float(np.linalg.norm(r) / total)
    return res <= 1e-9, res


# -- cyclicity ---------------------------------------------------------------

@dataclass
class CyclicityReport:
    """Outcome of the bounded stable-extension search.

    ``witnesses[(i, j)]`` is the chain ``[k_1, ..., k_l]`` (generator
    indices) with ``[A_kl, [..., [A_k1, [A_j, A_i]]]]`` proportional to
    ``[A_j, A_i]``, or None when none was found within ``depth_budget``.
    """

    verdict: str
    witnesses: dict
    depth_budget: int

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "depth_budget": self.depth_budget,
            "witnesses": [{"pair": [i, j], "chain": None if c is None else list(c)}
                          for (i, j), c in sorted(self.witnesses.items())],
        }


class _SymbolicOps:
    def __init__(self, ops):
        self.ops = ops

    @staticmethod
    def bracket(a, b):
        return commutator(a, b)

    @staticmethod
    def inner(a, b):
        return a.dot(b)

    @staticmethod
    def key(a):
        nrm = a.norm()
        items = a.sorted_items()
        sign = 1.0 if items[0][1] > 0 else -1.0
        return tuple((p.label, round(sign * c / nrm, 9)) for p, c in items)


class _DenseOps:
    def __init__(self, ops):
        self.ops = ops

    @staticmethod
    def bracket(a, b):
        return a @ b - b @ a

    @staticmethod
    def inner(a, b):
        return float(np.vdot(a, b).real)

    @staticmethod
    def key(a):
        v = realvec(a)
        v = v / np.linalg.norm(v)
        k = int(np.argmax(np.abs(v) > 1e-7))
        if v[k] < 0:
            v = -v
        return np.round(v, 8).tobytes()


def _norm(alg, a):
    return np.sqrt(max(alg.inner(a, a), 0.0))


def replay_chain(gens, i: int, j: int, chain: Sequence[int]):
    """Return ``[A_kl, [..., [A_k1, [A_j, A_i]]]]`` and the seed ``[A_j, A_i]``."""
    alg = _adapter(gens)
    ops = alg.ops
    seed = alg.bracket(ops[j], ops[i])
    cur = seed
    for k in chain:
        cur = alg.bracket(ops[k], cur)
    return cur, seed


def _adapter(gens):
    if isinstance(gens, GeneratorSet):
        return _SymbolicOps(list(gens.ops)) if gens.is_symbolic else _DenseOps(gens.dense())
    gens = list(gens)
    if gens and all(isinstance(g, PauliSum) for g in gens):
        return _SymbolicOps(gens)
    return _DenseOps([as_array(g) for g in gens])


def proportionality_residual(y, c, gens_like) -> float:
    alg = _adapter(gens_like)
    cc = alg.inner(c, c)
    yy = alg.inner(y, y)
    if yy == 0 or cc == 0:
        return np.inf
    coef = alg.inner(c, y) / cc
    return float(_norm(alg, y - coef * c) / np.sqrt(yy))


def is_cyclic(gens, depth_budget: int = 6) -> CyclicityReport:
    """Bounded search for stable extensions of every non-commuting pair.

    The verdict is ``"cyclic"`` when every pair has a witness chain of
    length at most ``depth_budget`` and ``"unknown"`` otherwise; the
    property is existential, so a failed bounded search proves nothing.
    """
    alg = _adapter(gens)
    ops = alg.ops
    L = len(ops)
    norms = [_norm(alg, a) for a in ops]
    witnesses = {}
    for i in range(L):
        for j in range(i + 1, L):
            seed = alg.bracket(ops[j], ops[i])
            sn = _norm(alg, seed)
            if sn <= 1e-10 * norms[i] * norms[j]:
                continue
            witnesses[(i, j)] = _search_chain(alg, seed, sn, norms, depth_budget)
    verdict = "cyclic" if all(c is not None for c in witnesses.values()) else "unknown"
    return CyclicityReport(verdict, witnesses, depth_budget)


def _search_chain(alg, seed, seed_norm, norms, depth_budget):
    ops = alg.ops
    seen = {alg.key(seed)}
    frontier = deque([(seed, seed_norm, ())])
    for _ in range(depth_budget):
        nxt = deque()
        for cur, cn, chain in frontier:
            for k, a in enumerate(ops):
                y = alg.bracket(a, cur)
                yn = _norm(alg, y)
                if yn <= 1e-10 * norms[k] * cn:
                    continue
                cand = chain + (k,)
                coef = alg.inner(seed, y) / (seed_norm * seed_norm)
                # explicit residual: the difference of squares cancels badly
                if _norm(alg, y - coef * seed) <= 1e-9 * yn:
                    return list(cand)
                key = alg.key(y)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((y, yn, cand))
        frontier = nxt
        if not frontier:
            break
    return None


def cyclicity_witness_ok(gens, report: CyclicityReport, tol: float = 1e-9) -> bool:
    """Replay every recorded chain and confirm proportionality."""
    for (i, j), chain in report.witnesses.items():
        if chain is None:
            continue
        y, seed = replay_chain(gens, i, j, chain)
        if proportionality_residual(y, seed, gens) >= tol:
            return False
    return True


def symbolic_pairs_commute(p: PauliString, q: PauliString) -> bool:
    return symplectic_commutes(p, q)
