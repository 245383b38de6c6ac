"""Minimal su(2^N) generating sets and commutant-based simulability indices.

The second half of this module computes the commutant of a generator set,
the center of that commutant, central projections of generators onto the
center, the projection overlap O(P, Q), and the percentage change D_c of
the closure dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import COMMUTANT_DIM_LIMIT, DOUBLED_COMMUTANT_DIM_LIMIT, RANK_TOL
from .closure import closure
from .dense import as_array, commutant_of_normal, orthonormal_rows, realvec, refine_commutant, unrealvec
from .errors import DenseLimitError, DimensionMismatchError
from .generators import GeneratorSet
from .pauli import PauliString, PauliSum

ZERO_PROJECTION_TOL = 1e-12


# -- builders ----------------------------------------------------------------

def _site_string(n: int, letters: dict[int, str]) -> str:
    out = ["I"] * n
    for site, letter in letters.items():
        out[site - 1] = letter
    return "".join(out)


def _a2_padded(N: int) -> list[str]:
    return [
        _site_string(N, {1: "X"}),
        _site_string(N, {1: "Y"}),
        _site_string(N, {2: "X"}),
        _site_string(N, {2: "Y"}),
        _site_string(N, {1: "Y", 2: "Y"}),
    ]


def build_su4_minimal() -> GeneratorSet:
    """The five-string set ``{iXI, iYI, iIX, iIY, iYY}`` generating su(4)."""
    return GeneratorSet.from_pauli(_a2_padded(2), names=["x1", "y1", "x2", "y2", "y1y2"])


def build_suN_generators(N: int, variant: str = "B_II") -> GeneratorSet:
    """2N + 1 Pauli strings generating su(2^N).

    The su(4) set on qubits 1-2 is padded with identities and extended by

    * ``B_I``: ``X_2 Z_3 ... Z_{i-1} Y_i`` and ``Y_2 Z_3 ... Z_{i-1} X_i`` for i = 3..N
    * ``B_II``: nearest-neighbour ``X_i Y_{i+1}`` and ``Y_i X_{i+1}`` for i = 2..N-1
    """
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    if variant not in ("B_I", "B_II"):
        raise ValueError(f"unknown variant {variant!r}")
    labels = _a2_padded(N)
    names = ["x1", "y1", "x2", "y2", "y1y2"]
    if variant == "B_I":
        for i in range(3, N + 1):
            chain = {j: "Z" for j in range(3, i)}
            labels.append(_site_string(N, {2: "X", **chain, i: "Y"}))
            labels.append(_site_string(N, {2: "Y", **chain, i: "X"}))
            names += [f"xz{i}", f"yz{i}"]
    else:
        for i in range(2, N):
            labels.append(_site_string(N, {i: "X", i + 1: "Y"}))
            labels.append(_site_string(N, {i: "Y", i + 1: "X"}))
            names += [f"x{i}y{i + 1}", f"y{i}x{i + 1}"]
    return GeneratorSet.from_pauli(labels, names=names)


# -- commutant and center ------------------------------------------------------

def _dense_gens(gens, dim=None) -> tuple[list[np.ndarray], int]:
    if isinstance(gens, GeneratorSet):
        return gens.dense(), gens.dim
    mats = [as_array(g) for g in gens]
    if not mats:
        if dim is None:
            raise ValueError("dim is required for an empty generator list")
        return [], int(dim)
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise DimensionMismatchError("generators have different dimensions")
    if dim is not None and dim != d:
        raise DimensionMismatchError(f"generators have dimension {d}, expected {dim}")
    return mats, d


@dataclass
class CommutantBasis:
    """HS-orthonormal basis (shape (k, d, d)) of the commutant."""

    ops: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.ops.shape[0])


@dataclass
class CenterBasis:
    """HS-orthonormal anti-Hermitian basis ``rho_alpha = i h_alpha`` of the center."""

    rho: np.ndarray

    @property
    def k(self) -> int:
        return int(self.rho.shape[0])


def commutant(gens, dim: int | None = None, rank_tol: float = RANK_TOL) -> CommutantBasis:
    """All X with ``[X, A] = 0`` for every generator A."""
    mats, d = _dense_gens(gens, dim)
    if d > COMMUTANT_DIM_LIMIT:
        raise DenseLimitError("commutant matrix dimension", d, COMMUTANT_DIM_LIMIT)
    return CommutantBasis(commutant_of_normal(mats, d, rank_tol))


def _hermitian_span(mats: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal Hermitian basis of a *-closed span."""
    herm = np.concatenate([(mats + mats.conj().transpose(0, 2, 1)) / 2,
                           (mats - mats.conj().transpose(0, 2, 1)) / 2j])
    rows = orthonormal_rows(realvec(herm), rank_tol)
    return unrealvec(rows, mats.shape[1])


def center_of_commutant(gens, dim: int | None = None, rank_tol: float = RANK_TOL, seed: int = 1234) -> CenterBasis:
    """Center of the commutant: commutant elements commuting with the whole commutant.

    The commutant is first cut down against a few random elements of
    itself (fast shrinkage), then against every basis element, so the
    result is exact regardless of the random draw.
    """
    comm = commutant(gens, dim, rank_tol).ops
    rng = np.random.default_rng(seed)
    probes = [np.tensordot(rng.normal(size=comm.shape[0]) + 1j * rng.normal(size=comm.shape[0]), comm, axes=1)
              for _ in range(2)]
    probes = [p for q in probes for p in ((q + q.conj().T) / 2, (q - q.conj().T) / 2j)]
    cen = refine_commutant(comm, probes, rank_tol)
    cen = refine_commutant(cen, list(comm), rank_tol)
    h = _hermitian_span(cen, rank_tol)
    return CenterBasis(1j * h)


def central_projection_matrix(gens, center: CenterBasis) -> np.ndarray:
    """Matrix of ``Re Tr(rho_alpha^dagger g_beta)``, shape (k, len(gens))."""
    mats, d = _dense_gens(gens)
    if center.k and center.rho.shape[1] != d:
        raise DimensionMismatchError(f"center acts on dimension {center.rho.shape[1]}, generators on {d}")
    if not mats:
        return np.zeros((center.k, 0))
    raw = np.einsum("aij,bij->ab", center.rho.conj(), np.array(mats))
    scale = max(1.0, float(np.max(np.abs(raw))))
    if np.max(np.abs(raw.imag)) > 1e-9 * scale:
        raise ValueError("central projections have imaginary parts; generators must be anti-Hermitian")
    return raw.real


def doubled_commutant_dim(gens, dim: int | None = None, rank_tol: float = RANK_TOL) -> int:
    """Dimension of the commutant of ``{M (x) I + I (x) M}``; capped at d = 8."""
    mats, d = _dense_gens(gens, dim)
    if d > DOUBLED_COMMUTANT_DIM_LIMIT:
        raise DenseLimitError("doubled commutant dimension", d, DOUBLED_COMMUTANT_DIM_LIMIT)
    eye = np.eye(d)
    doubled = [np.kron(m, eye) + np.kron(eye, m) for m in mats]
    return int(commutant_of_normal(doubled, d * d, rank_tol).shape[0])


# -- indices -------------------------------------------------------------------

def _rank(m: np.ndarray, rank_tol: float = RANK_TOL) -> tuple[int, list[float]]:
    if m.size == 0:
        return 0, []
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] <= ZERO_PROJECTION_TOL:
        return 0, s.tolist()
    return int(np.sum(s > rank_tol * s[0])), s.tolist()


def overlap_from_vectors(p_vectors, q_vectors, rank_tol: float = RANK_TOL) -> float:
    """O = ``||proj_{span P} Q||^2 / ||Q||^2`` with vectors as columns.

    Returns 1 when Q projects to zero. For several Q columns the squared
    norms are summed (Frobenius).
    """
    p = np.asarray(p_vectors, dtype=float)
    q = np.asarray(q_vectors, dtype=float)
    p = p[:, None] if p.ndim == 1 else p
    q = q[:, None] if q.ndim == 1 else q
    if p.shape[0] != q.shape[0]:
        raise DimensionMismatchError(f"vectors of length {p.shape[0]} and {q.shape[0]}")
    qq = float(np.sum(q * q))
    if qq <= ZERO_PROJECTION_TOL ** 2:
        return 1.0
    if p.size == 0:
        return 0.0
    # rank decided with an absolute floor so rounding noise spans nothing
    _, s, vh = np.linalg.svd(p.T, full_matrices=False)
    rank = int(np.sum(s > max(rank_tol * s[0], ZERO_PROJECTION_TOL))) if s.size else 0
    proj = vh[:rank] @ q
    return float(np.sum(proj * proj) / qq)


def percentage_change_from_dims(dim_p: int, dim_pq: int) -> float:
    if dim_p <= 0:
        raise ValueError("dim P must be positive")
    return (dim_pq - dim_p) / dim_p * 100.0


def percentage_change(P: GeneratorSet, Q: GeneratorSet, rank_tol: float = RANK_TOL) -> float:
    """Relative growth (in percent) of the closure dimension when Q is added to P."""
    dim_p = closure(P, rank_tol).dim
    dim_pq = closure(P.union(Q), rank_tol).dim
    return percentage_change_from_dims(dim_p, dim_pq)


def _dedupe_columns(mats: list[np.ndarray]) -> list[int]:
    """Indices of generators that are not scalar multiples of an earlier one."""
    keep, units = [], []
    for k, m in enumerate(mats):
        v = realvec(m)
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        v = v / nv
        if any(abs(abs(v @ u) - 1.0) < 1e-12 for u in units):
            continue
        keep.append(k)
        units.append(v)
    return keep


@dataclass
class OverlapReport:
    T_tilde: np.ndarray
    T: np.ndarray
    T_Q: np.ndarray
    rank_T_tilde: int
    rank_T: int
    singular_T_tilde: list
    singular_T: list
    overlap: float
    dim_P: int
    dim_PQ: int
    d_c: float
    center_dim: int
    lemma2_cond1: bool | None
    lemma2_cond2: bool
    doubled_dims: tuple | None = None
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "T_tilde": self.T_tilde.tolist(),
            "T": self.T.tolist(),
            "T_Q": self.T_Q.tolist(),
            "rank_T_tilde": self.rank_T_tilde,
            "rank_T": self.rank_T,
            "singular_T_tilde": list(self.singular_T_tilde),
            "singular_T": list(self.singular_T),
            "overlap": self.overlap,
            "dim_P": self.dim_P,
            "dim_PQ": self.dim_PQ,
            "d_c": self.d_c,
            "center_dim": self.center_dim,
            "lemma2_cond1": "not evaluated" if self.lemma2_cond1 is None else self.lemma2_cond1,
            "lemma2_cond2": self.lemma2_cond2,
            "doubled_dims": None if self.doubled_dims is None else list(self.doubled_dims),
            "tolerances": dict(self.tolerances),
        }


def projection_overlap(P: GeneratorSet, Q: GeneratorSet, rank_tol: float = RANK_TOL,
                       center_rotation: np.ndarray | None = None, evaluate_cond1: bool = True) -> OverlapReport:
    """Central projections of P and P u Q onto the center of ``(P u Q)'`` and the derived indices.

    ``center_rotation`` (k x k orthogonal) re-expresses the center in a
    different orthonormal basis; every reported index is invariant under it.
    """
    if P.dim != Q.dim:
        raise DimensionMismatchError(f"P acts on dimension {P.dim}, Q on {Q.dim}")
    pq = P.union(Q)
    center = center_of_commutant(pq, rank_tol=rank_tol)
    if center_rotation is not None:
        center = CenterBasis(np.tensordot(np.asarray(center_rotation), center.rho, axes=1))
    p_mats, q_mats = P.dense(), Q.dense()
    p_keep = _dedupe_columns(p_mats)
    all_mats = p_mats + q_mats
    pq_keep = _dedupe_columns(all_mats)
    t_tilde = central_projection_matrix([p_mats[k] for k in p_keep], center)
    t_full = central_projection_matrix([all_mats[k] for k in pq_keep], center)
    t_q = central_projection_matrix(q_mats, center)
    r1, s1 = _rank(t_tilde, rank_tol)
    r2, s2 = _rank(t_full, rank_tol)
    overlap = overlap_from_vectors(t_tilde, t_q, rank_tol) if center.k else 1.0

    dim_p = closure(P, rank_tol).dim
    dim_pq = closure(pq, rank_tol).dim
    cond1, doubled = None, None
    if evaluate_cond1 and P.dim <= DOUBLED_COMMUTANT_DIM_LIMIT:
        doubled = (doubled_commutant_dim(P, rank_tol=rank_tol), doubled_commutant_dim(pq, rank_tol=rank_tol))
        cond1 = doubled[0] == doubled[1]
    return OverlapReport(
        T_tilde=t_tilde, T=t_full, T_Q=t_q,
        rank_T_tilde=r1, rank_T=r2, singular_T_tilde=s1, singular_T=s2,
        overlap=overlap, dim_P=dim_p, dim_PQ=dim_pq,
        d_c=percentage_change_from_dims(dim_p, dim_pq),
        center_dim=center.k, lemma2_cond1=cond1, lemma2_cond2=(r1 == r2),
        doubled_dims=doubled,
        tolerances={"rank_tol": rank_tol, "zero_projection_tol": ZERO_PROJECTION_TOL},
    )


def simulability_check(P: GeneratorSet, Q: GeneratorSet, rank_tol: float = RANK_TOL) -> OverlapReport:
    """Both sufficient conditions; cond1 is None ("not evaluated") above d = 8."""
    return projection_overlap(P, Q, rank_tol=rank_tol)


# -- central-spin example --------------------------------------------------------

# Reference projection vectors for the central-spin example, in the basis
# (rho_1, rho_2) = (i I_8, i Z_1), together with its closure dimensions.
CENTRAL_SPIN_REFERENCE = {
    "P": [[0.0, 1.0], [0.0, 2.0]],
    "Q1": [[0.0, 2.0]],
    "Q2": [[0.3, 0.5]],
    "dims": (4, 5),
}


def central_spin_sets(J2: float = 1.0) -> dict[str, GeneratorSet]:
    """P = {iH1, iH2}, Q1 = {iH3}, Q2 = {iH4} on three qubits."""
    h1 = PauliSum.from_labels([(1.0, "XII"), (J2, "XXI"), (J2, "YYI"), (J2, "ZZI")])
    h2 = PauliSum.from_labels([(1.0, "ZII")])
    h3 = PauliSum.from_labels([(2.0, "ZII"), (0.5, "XXI")])
    h4 = PauliSum.from_labels([(0.5, "ZII"), (0.3, "III")])
    return {
        "P": GeneratorSet.from_pauli([h1, h2], names=["H1", "H2"]),
        "Q1": GeneratorSet.from_pauli([h3], names=["H3"]),
        "Q2": GeneratorSet.from_pauli([h4], names=["H4"]),
    }


def central_spin_example(J2: float = 1.0, rank_tol: float = RANK_TOL) -> dict:
    """Indices from the reference vectors next to the full recomputation from the operators."""
    ref = CENTRAL_SPIN_REFERENCE
    p_cols = np.array(ref["P"]).T
    formula = {
        "O_Q1": overlap_from_vectors(p_cols, np.array(ref["Q1"]).T),
        "O_Q2": overlap_from_vectors(p_cols, np.array(ref["Q2"]).T),
        "rank_T_tilde": _rank(p_cols)[0],
        "rank_T1": _rank(np.hstack([p_cols, np.array(ref["Q1"]).T]))[0],
        "rank_T2": _rank(np.hstack([p_cols, np.array(ref["Q2"]).T]))[0],
        "d_c": percentage_change_from_dims(*ref["dims"]),
    }
    sets = central_spin_sets(J2)
    pipeline = {}
    for key in ("Q1", "Q2"):
        pipeline[key] = projection_overlap(sets["P"], sets[key], rank_tol=rank_tol).to_dict()
    return {"J2": J2, "formula_level": formula, "pipeline_level": pipeline}


def string_set(labels) -> list[PauliString]:
    return [PauliString.from_label(lab) for lab in labels]
