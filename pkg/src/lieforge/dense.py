"""Numerical dense-operator primitives.

Everything here is a pure function of its inputs. Matrices may be passed
either as :class:`DenseOperator` or as plain ``numpy`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import GROUP_TOL_REL, RANK_TOL, ROLE_TOL
from .errors import DimensionMismatchError, RoleError

ROLES = ("hermitian", "anti_hermitian", "unitary", "general")


def _role_residual(m: np.ndarray, role: str) -> float:
    scale = max(np.linalg.norm(m), 1e-300)
    if role == "hermitian":
        return np.linalg.norm(m - m.conj().T) / scale
    if role == "anti_hermitian":
        return np.linalg.norm(m + m.conj().T) / scale
    if role == "unitary":
        d = m.shape[0]
        return np.linalg.norm(m.conj().T @ m - np.eye(d)) / d
    return 0.0


@dataclass(frozen=True)
class DenseOperator:
    """A d x d complex matrix tagged with its role.

    The role is validated on construction (``check=False`` skips it for
    internally produced operators whose role holds by construction).
    """

    matrix: np.ndarray
    role: str = "general"
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        object.__setattr__(self, "matrix", m)
        if self.check and self.role != "general":
            res = _role_residual(m, self.role)
            if res > ROLE_TOL:
                raise RoleError(f"matrix is not {self.role} (residual {res:.3e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def as_array(m) -> np.ndarray:
    if isinstance(m, DenseOperator):
        return m.matrix
    if hasattr(m, "items") and hasattr(m, "n"):  # PauliSum
        from .pauli import to_dense

        return to_dense(m).matrix
    return np.asarray(m, dtype=np.complex128)


def is_hermitian(m, tol: float = ROLE_TOL) -> bool:
    return _role_residual(as_array(m), "hermitian") <= tol


def is_anti_hermitian(m, tol: float = ROLE_TOL) -> bool:
    return _role_residual(as_array(m), "anti_hermitian") <= tol


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt pairing ``Tr(a^dagger b)``."""
    a, b = as_array(a), as_array(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def operator_norm(m) -> float:
    """Largest singular value."""
    a = as_array(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) and their orthogonal projectors."""

    eigenvalues: tuple
    projectors: tuple

    @property
    def K(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p.matrix for lam, p in zip(self.eigenvalues, self.projectors))


def _hermitian_eigh(m, what="operator"):
    a = as_array(m)
    if not is_hermitian(a):
        raise RoleError(f"{what} must be Hermitian")
    return np.linalg.eigh((a + a.conj().T) / 2)


def spectral_projectors(chi, group_tol: float | None = None) -> SpectralDecomposition:
    """Group the spectrum of a Hermitian ``chi`` into eigenspace projectors.

    Eigenvalues closer than ``group_tol`` (default ``1e-8 * max|lambda|``)
    share one projector. Clusters are returned in descending eigenvalue
    order, so ``chi = Z`` gives ``Pi_1 = |0><0|`` for ``lambda = +1``.
    """
    w, v = _hermitian_eigh(chi, "chi")
    if group_tol is None:
        group_tol = GROUP_TOL_REL * max(np.max(np.abs(w)), 1.0)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    clusters = [[0]]
    for k in range(1, len(w)):
        if abs(w[k] - w[clusters[-1][-1]]) <= group_tol:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    eigs, projs = [], []
    for idx in clusters:
        vec = v[:, idx]
        eigs.append(float(np.mean(w[idx])))
        projs.append(DenseOperator(vec @ vec.conj().T, role="hermitian", check=False))
    return SpectralDecomposition(tuple(eigs), tuple(projs))


def evolve(h, t: float) -> DenseOperator:
    """``exp(-i h t)`` for Hermitian ``h`` via eigendecomposition."""
    w, v = _hermitian_eigh(h, "Hamiltonian")
    if t == 0:
        return DenseOperator(np.eye(w.shape[0], dtype=np.complex128), role="unitary", check=False)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    return DenseOperator(u, role="unitary", check=False)


def nullspace(rows, rank_tol: float = RANK_TOL, dim: int | None = None, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (as rows) of ``{v : rows @ v = 0}``.

    Singular values below ``rank_tol * scale`` count as zero, where
    ``scale`` defaults to the largest singular value. With no rows the
    whole space (of size ``dim``) is returned.
    """
    a = np.asarray(rows)
    if a.size == 0:
        if dim is None:
            if a.ndim == 2:
                dim = a.shape[1]
            else:
                raise ValueError("dim is required for an empty constraint set")
        return np.eye(dim, dtype=a.dtype if a.size else np.float64)
    if a.ndim == 1:
        a = a[None, :]
    ncols = a.shape[1]
    # Tall inputs only need the thin factorization to expose all of vh.
    _, s, vh = np.linalg.svd(a, full_matrices=a.shape[0] < ncols)
    if scale is None:
        scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > rank_tol * scale)) if scale > 0 else 0
    return vh[rank:ncols].conj()


def orthonormal_rows(vectors, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis for the row span, via SVD with a relative cut."""
    a = np.asarray(vectors)
    if a.size == 0:
        return a.reshape(0, a.shape[-1] if a.ndim == 2 else 0)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return vh[:0]
    rank = int(np.sum(s > rank_tol * s[0]))
    return vh[:rank]


# -- real vectorization of anti-Hermitian / Hermitian matrices -------------

def realvec(m: np.ndarray) -> np.ndarray:
    """Flatten so that ``realvec(a) @ realvec(b) == Re Tr(a^dagger b)``."""
    m = np.asarray(m)
    flat = m.reshape(*m.shape[:-2], -1)
    return np.concatenate([flat.real, flat.imag], axis=-1)


def unrealvec(v: np.ndarray, d: int) -> np.ndarray:
    half = v.shape[-1] // 2
    return (v[..., :half] + 1j * v[..., half:]).reshape(*v.shape[:-1], d, d)


# -- commutants ------------------------------------------------------------

def _cluster_eigvecs(w, v, tol):
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol:
            groups.append(v[:, start:k])
            start = k
    return groups


def commutant_of_normal(ops, dim: int, rank_tol: float = RANK_TOL, seed: int = 1234) -> np.ndarray:
    """Complex HS-orthonormal basis of ``{X : [X, A] = 0 for all A in ops}``.

    ``ops`` must be anti-Hermitian (or Hermitian). The search space is first
    cut down to the commutant of one generic real combination ``G`` of the
    ops (block-diagonal in the eigenbasis of G; grouping is deliberately
    loose, which can only enlarge the space), then refined by one SVD per
    op. Returns an array of shape (k, dim, dim).
    """
    ops = [as_array(a) for a in ops]
    if not ops:
        basis = np.zeros((dim * dim, dim, dim), dtype=np.complex128)
        for k in range(dim * dim):
            basis[k].flat[k] = 1.0
        return basis
    herm = [1j * a if is_anti_hermitian(a, 1e-8) else a for a in ops]
    for h in herm:
        if not is_hermitian(h, 1e-8):
            raise RoleError("commutant refinement needs Hermitian or anti-Hermitian inputs")
    rng = np.random.default_rng(seed)
    weights = rng.normal(size=len(herm))
    g = sum(wk * h for wk, h in zip(weights, herm))
    g = (g + g.conj().T) / 2
    w, v = np.linalg.eigh(g)
    scale = max(np.max(np.abs(w)), 1.0)
    groups = _cluster_eigvecs(w, v, 1e-6 * scale)
    blocks = []
    for vec in groups:
        m = vec.shape[1]
        for a in range(m):
            for b in range(m):
                blocks.append(np.outer(vec[:, a], vec[:, b].conj()))
    basis = np.array(blocks)
    return refine_commutant(basis, ops, rank_tol)


def refine_commutant(basis: np.ndarray, ops, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Restrict an HS-orthonormal ``basis`` to the elements commuting with every op."""
    for a in ops:
        if basis.shape[0] == 0:
            break
        a = as_array(a)
        comm = basis @ a - a @ basis
        k = comm.reshape(basis.shape[0], -1).T
        scale = 2.0 * max(operator_norm(a), 1e-300)
        coeffs = nullspace(k, rank_tol=rank_tol, scale=scale)
        basis = np.tensordot(coeffs, basis, axes=(1, 0))
    return basis


def real_span_basis(mats: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Real orthonormal basis of the real span of real and imaginary parts of real-structured matrices.

    Used when a complex basis spans a space that is closed under complex
    conjugation (e.g. the commutant of a set of real matrices).
    """
    stack = np.concatenate([mats.real, mats.imag], axis=0).reshape(2 * mats.shape[0], -1)
    rows = orthonormal_rows(stack, rank_tol)
    return rows.reshape(-1, *mats.shape[1:])
