"""Direct-sum composition of generating sets through an ancilla register.

Each block's generators are tensored with a spectral projector of a
Hermitian label operator ``chi`` acting on the ancilla, so generators of
different blocks commute and the composed closure is the direct sum of
the block closures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2

import numpy as np

from ._config import RANK_TOL
from .closure import dense_closure
from .dense import DenseOperator, as_array, evolve, is_hermitian, spectral_projectors
from .errors import CompositionError, DimensionMismatchError
from .generators import GeneratorSet

CROSS_TOL = 1e-10
VANDERMONDE_COND_MAX = 1e12
LEAVE_ONE_OUT_MAX_GENS = 16
LEAVE_ONE_OUT_MAX_DIM = 64


def ancilla_qubits(K: int) -> int:
    """Ancilla qubits needed to label K blocks."""
    if K < 1:
        raise ValueError("need at least one block")
    return ceil(log2(K)) if K > 1 else 0


def default_chi(K: int) -> np.ndarray:
    """``diag(0, 1, ..., K-1)`` padded with ``K-1`` on ceil(log2 K) qubits."""
    size = 1 << ancilla_qubits(K)
    return np.diag([float(min(i, K - 1)) for i in range(size)]).astype(np.complex128)


def _check_blocks(sets) -> int:
    if not sets:
        raise CompositionError("no generator sets to compose")
    d = sets[0].dim
    for s in sets:
        if s.dim != d:
            raise DimensionMismatchError(f"blocks have different system dimensions ({s.dim} vs {d})")
    return d


def compose_with_projectors(sets: list[GeneratorSet], projectors) -> GeneratorSet:
    """``{A_{m,l} (x) P_m}`` for explicitly supplied ancilla operators ``P_m``.

    No orthogonality is enforced here, so this also builds deliberately
    broken compositions for testing ``verify_composition``.
    """
    _check_blocks(sets)
    projectors = [as_array(p) for p in projectors]
    if len(projectors) < len(sets):
        raise CompositionError(f"{len(sets)} blocks but only {len(projectors)} projectors")
    names, mats, block_of = [], [], []
    for m, s in enumerate(sets):
        pm = projectors[m]
        for name, a in zip(s.names, s.dense()):
            names.append(f"{name}@{m + 1}")
            mats.append(np.kron(a, pm))
            block_of.append(m)
    meta = {"projectors": projectors[: len(sets)], "block_of": block_of, "kind": "projectors"}
    return GeneratorSet.from_dense(mats, names, meta)


def compose_projectors(sets: list[GeneratorSet], chi=None) -> GeneratorSet:
    """Direct-sum generating set ``A' = U_m {A_{m,l} (x) Pi_m}``.

    Parameters
    ----------
    sets : list of GeneratorSet
        The K blocks, all on one system register.
    chi : array_like, optional
        Hermitian ancilla operator with at least K distinct eigenvalues;
        block m uses the projector of the m-th largest eigenvalue. Defaults
        to :func:`default_chi`.
    """
    K = len(sets)
    _check_blocks(sets)
    chi = default_chi(K) if chi is None else as_array(chi)
    spec = spectral_projectors(chi)
    if spec.K < K:
        raise CompositionError(f"chi has {spec.K} distinct eigenvalues, {K} blocks requested")
    out = compose_with_projectors(sets, [p.matrix for p in spec.projectors[:K]])
    out.meta["eigenvalues"] = list(spec.eigenvalues[:K])
    return out


def compose_powers(gens: GeneratorSet, chi, K: int) -> GeneratorSet:
    """K copies via powers: ``{A_i (x) chi^j : j = 0..K-1}``.

    ``chi`` must have exactly K distinct eigenvalues; a badly conditioned
    Vandermonde matrix of those eigenvalues means the powers no longer
    span the K projectors and is rejected.
    """
    chi = as_array(chi)
    spec = spectral_projectors(chi)
    if spec.K != K:
        raise CompositionError(f"chi has {spec.K} distinct eigenvalues, expected exactly {K}")
    lam = np.array(spec.eigenvalues)
    vander = np.vander(lam, K, increasing=True)
    cond = np.linalg.cond(vander) if K > 1 else 1.0
    if not np.isfinite(cond) or cond > VANDERMONDE_COND_MAX:
        raise CompositionError(f"eigenvalues too close: Vandermonde condition number {cond:.3e}")
    names, mats = [], []
    power = np.eye(chi.shape[0], dtype=np.complex128)
    for j in range(K):
        for name, a in zip(gens.names, gens.dense()):
            names.append(f"{name}^{j}")
            mats.append(np.kron(a, power))
        power = power @ chi
    meta = {
        "projectors": [p.matrix for p in spec.projectors],
        "eigenvalues": list(spec.eigenvalues),
        "vandermonde_cond": float(cond),
        "kind": "powers",
    }
    return GeneratorSet.from_dense(mats, names, meta)


def block_evolution(a, pi, t: float) -> DenseOperator:
    """``exp(-i H t) (x) pi + I (x) (I - pi)`` with ``a = iH``."""
    a = as_array(a)
    pi = as_array(pi)
    if not is_hermitian(pi, 1e-10) or np.linalg.norm(pi @ pi - pi) > 1e-10 * max(np.linalg.norm(pi), 1.0):
        raise ValueError("pi is not an orthogonal projector")
    u = evolve(-1j * a, t).matrix
    eye_s = np.eye(a.shape[0])
    full = np.kron(u, pi) + np.kron(eye_s, np.eye(pi.shape[0]) - pi)
    return DenseOperator(full, role="unitary", check=False)


@dataclass
class CompositionReport:
    block_dims: list[int]
    composed_dim: int
    cross_commutator_max: float
    ancilla_dim: int
    system_dim: int
    qubit_cost: int | None
    total_qubits: int | None
    n_generators: int
    leave_one_out_dims: list[int] | None = None
    tolerances: dict = field(default_factory=dict)

    @property
    def direct_sum_ok(self) -> bool:
        return self.composed_dim == sum(self.block_dims) and self.cross_commutator_max <= CROSS_TOL

    @property
    def minimal(self) -> bool | None:
        if self.leave_one_out_dims is None:
            return None
        return all(d < self.composed_dim for d in self.leave_one_out_dims)

    @property
    def verdict(self) -> str:
        return "pass" if self.direct_sum_ok else "fail"

    def to_dict(self) -> dict:
        return {
            "block_dims": list(self.block_dims),
            "composed_dim": self.composed_dim,
            "sum_block_dims": int(sum(self.block_dims)),
            "cross_commutator_max": self.cross_commutator_max,
            "ancilla_dim": self.ancilla_dim,
            "system_dim": self.system_dim,
            "qubit_cost": self.qubit_cost,
            "total_qubits": self.total_qubits,
            "n_generators": self.n_generators,
            "leave_one_out_dims": self.leave_one_out_dims,
            "minimal": self.minimal,
            "verdict": self.verdict,
            "tolerances": dict(self.tolerances),
        }


def verify_composition(sets: list[GeneratorSet], composed: GeneratorSet, rank_tol: float = RANK_TOL,
                       leave_one_out: bool = True) -> CompositionReport:
    """Check the direct-sum structure of a composed set.

    All cross-block generator pairs ``[a (x) P_m, b (x) P_n]`` are formed
    (the sets are small, so no sampling). Leave-one-out closures are run
    when the composed algebra is small enough.
    """
    d_sys = _check_blocks(sets)
    projectors = composed.meta.get("projectors")
    if projectors is None:
        raise CompositionError("composed set carries no projectors")
    K = len(sets)
    if len(projectors) < K:
        raise CompositionError(f"{K} blocks but {len(projectors)} projectors recorded")
    block_dims = [dense_closure(s, rank_tol=rank_tol).dim for s in sets]
    composed_dim = dense_closure(composed, rank_tol=rank_tol).dim

    cross = 0.0
    lifted = [[np.kron(a, as_array(projectors[m])) for a in s.dense()] for m, s in enumerate(sets)]
    for m in range(K):
        for n in range(m + 1, K):
            for x in lifted[m]:
                for y in lifted[n]:
                    cross = max(cross, float(np.linalg.norm(x @ y - y @ x)))

    loo = None
    if leave_one_out and len(composed) <= LEAVE_ONE_OUT_MAX_GENS and composed_dim <= LEAVE_ONE_OUT_MAX_DIM:
        mats = composed.dense()
        loo = [dense_closure(mats[:k] + mats[k + 1:], rank_tol=rank_tol).dim if len(mats) > 1 else 0
               for k in range(len(mats))]

    d_anc = as_array(projectors[0]).shape[0]
    n_sys = int(log2(d_sys)) if d_sys & (d_sys - 1) == 0 else None
    anc_qubits = int(log2(d_anc)) if d_anc & (d_anc - 1) == 0 else None
    qubit_cost = None if n_sys is None else n_sys + ancilla_qubits(K)
    total = None if n_sys is None or anc_qubits is None else n_sys + anc_qubits
    return CompositionReport(
        block_dims=block_dims,
        composed_dim=composed_dim,
        cross_commutator_max=cross,
        ancilla_dim=d_anc,
        system_dim=d_sys,
        qubit_cost=qubit_cost,
        total_qubits=total,
        n_generators=len(composed),
        leave_one_out_dims=loo,
        tolerances={"rank_tol": rank_tol, "cross_tol": CROSS_TOL},
    )
