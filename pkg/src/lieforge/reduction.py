"""Ideal decomposition of reductive algebras and filtering onto target ideals.

Sub-bases are stored as coordinate rows with respect to the parent
:class:`LieBasis`. Coordinates of a symbolic basis refer to the strings
``iP`` and those of a dense basis to its orthonormal matrices; in both
cases the coordinate inner product is proportional to the
Hilbert-Schmidt one, so orthonormal coordinate rows give orthonormal
matrices via :meth:`LieBasis.matrices`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import RANK_TOL
from .closure import LieBasis, adjoint_matrices, dense_closure
from .dense import as_array, commutant_of_normal, nullspace, orthonormal_rows, real_span_basis, realvec
from .errors import DecompositionError, DimensionMismatchError, FilterError, NonReductiveError
from .generators import GeneratorSet

KILLING_TOL = 1e-8
CONTAINMENT_TOL = 1e-8
FILTER_COMPONENT_TOL = 1e-6


@dataclass
class SubBasis:
    """Orthonormal coordinate rows ``coords`` (r x m) spanning a subspace of ``parent``."""

    parent: LieBasis
    coords: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])

    def matrices(self) -> np.ndarray:
        if self.dim == 0:
            d = self.parent.matrix_dim
            return np.zeros((0, d, d), dtype=np.complex128)
        return np.tensordot(self.coords, self.parent.matrices(), axes=1)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "coords": np.round(self.coords, 12).tolist()}


def _ad_of(ad: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.tensordot(x, ad, axes=1)


def _center_coords(ad: np.ndarray, rank_tol: float) -> np.ndarray:
    m = ad.shape[0]
    if m == 0:
        return np.zeros((0, 0))
    # row block i: sum_j c_j ad[j][:, i] = 0
    rows = ad.transpose(2, 1, 0).reshape(m * m, m)
    scale = max(float(np.max(np.abs(ad))), 1.0) if ad.size else 1.0
    return nullspace(rows, rank_tol, dim=m, scale=scale).real


def lie_center(basis: LieBasis, rank_tol: float = RANK_TOL) -> SubBasis:
    """Elements commuting with the whole algebra."""
    ad = adjoint_matrices(basis)
    return SubBasis(basis, orthonormal_rows(_center_coords(ad, rank_tol), rank_tol))


def restricted_adjoint(sub: SubBasis) -> np.ndarray:
    """Adjoint matrices of a subalgebra in its own orthonormal coordinates."""
    ad = adjoint_matrices(sub.parent)
    u = sub.coords
    return np.array([u @ _ad_of(ad, u[a]) @ u.T for a in range(sub.dim)]).reshape(sub.dim, sub.dim, sub.dim)


def _canonical_rows(coords: np.ndarray, rank_tol: float) -> np.ndarray:
    """Basis-independent orthonormal rows: Gram-Schmidt of projected unit vectors in index order."""
    r, m = coords.shape
    if r == 0:
        return coords
    proj = coords.T @ coords
    out = []
    for k in range(m):
        v = proj[:, k].copy()
        for u in out:
            v -= (u @ v) * u
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            v = v / nv
            for u in out:
                v -= (u @ v) * u
            out.append(v / np.linalg.norm(v))
        if len(out) == r:
            break
    return np.array(out)


@dataclass
class IdealDecomposition:
    basis: LieBasis
    center: SubBasis
    ideals: list
    attempts: int = 1
    killing_eigs: list = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.ideals]

    def to_dict(self) -> dict:
        return {
            "dim": self.basis.dim,
            "center_dim": self.center.dim,
            "ideal_dims": self.dims,
            "attempts": self.attempts,
        }


def ideal_decomposition(basis: LieBasis, seed: int = 0, max_retries: int = 8,
                        rank_tol: float = RANK_TOL) -> IdealDecomposition:
    """Split a reductive algebra into its center and simple ideals.

    The simple ideals are the eigenspaces of a random symmetric element of
    the commutant of the adjoint action on the derived algebra. A draw is
    accepted when the number of eigenvalue clusters equals the commutant
    dimension; otherwise a new element is drawn, up to ``max_retries``.
    """
    ad = adjoint_matrices(basis)
    m = basis.dim
    center = orthonormal_rows(_center_coords(ad, rank_tol), rank_tol)
    derived = orthonormal_rows(ad.transpose(0, 2, 1).reshape(m * m, m), rank_tol) if m else np.zeros((0, 0))
    if derived.shape[0] + center.shape[0] != m:
        raise NonReductiveError(
            f"center ({center.shape[0]}) and derived algebra ({derived.shape[0]}) do not span the algebra ({m})")
    r = derived.shape[0]
    center_sub = SubBasis(basis, _canonical_rows(center, rank_tol) if center.shape[0] else center.reshape(0, m))
    if r == 0:
        return IdealDecomposition(basis, center_sub, [], 0, [])

    restricted = np.array([derived @ _ad_of(ad, derived[a]) @ derived.T for a in range(r)])
    killing = restricted.reshape(r, -1) @ restricted.transpose(0, 2, 1).reshape(r, -1).T
    keig = np.linalg.eigvalsh((killing + killing.T) / 2)
    if np.min(np.abs(keig)) <= KILLING_TOL * np.max(np.abs(keig)):
        raise NonReductiveError("Killing form is degenerate on the derived algebra")

    comm = real_span_basis(commutant_of_normal(list(restricted), r, rank_tol), rank_tol)
    n_ideals = comm.shape[0]
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_retries + 1):
        x = np.tensordot(rng.normal(size=n_ideals), comm, axes=1)
        s = (x + x.T) / 2
        w, v = np.linalg.eigh(s)
        tol = 1e-6 * max(np.max(np.abs(w)), 1e-300)
        groups, start = [], 0
        for k in range(1, r + 1):
            if k == r or w[k] - w[k - 1] > tol:
                groups.append(v[:, start:k])
                start = k
        if len(groups) == n_ideals:
            break
    else:
        raise DecompositionError(f"could not separate {n_ideals} ideals in {max_retries} draws")

    ideals = []
    for g in groups:
        coords = _canonical_rows(g.T @ derived, rank_tol)
        ideals.append(coords)
    ideals.sort(key=lambda c: int(np.argmax(np.abs(c[0]) > 1e-6)))
    return IdealDecomposition(basis, center_sub, [SubBasis(basis, c) for c in ideals], attempt, keig.tolist())


# -- filtering -------------------------------------------------------------------

@dataclass
class FilterOperator:
    """Filtering element ``F`` with its components on the decomposition."""

    F: np.ndarray
    coords: np.ndarray
    components: dict
    central_component: float
    target_indices: list

    def to_dict(self) -> dict:
        return {
            "target_indices": list(self.target_indices),
            "component_norms": {str(k): float(np.linalg.norm(v)) for k, v in sorted(self.components.items())},
            "central_component_norm": float(self.central_component),
        }


def _check_noncentral(dec: IdealDecomposition, j: int, comp: np.ndarray) -> None:
    ad = adjoint_matrices(dec.basis)
    if np.linalg.norm(_ad_of(ad, comp)) <= 1e-9 * max(np.linalg.norm(comp), 1e-300):
        raise FilterError(f"component on ideal {j} is central (ad vanishes)")


def build_filter(dec: IdealDecomposition, targets, seed: int = 0) -> FilterOperator:
    """``F = sum_j F_j`` with ``F_j`` a random unit element of ideal j, j in ``targets`` (0-based)."""
    targets = sorted(set(int(t) for t in targets))
    if not targets:
        raise FilterError("empty target set")
    for j in targets:
        if not 0 <= j < len(dec.ideals):
            raise FilterError(f"target {j} outside 0..{len(dec.ideals) - 1}")
    rng = np.random.default_rng(seed)
    m = dec.basis.dim
    coords = np.zeros(m)
    comps = {}
    for j in targets:
        ideal = dec.ideals[j]
        g = rng.normal(size=ideal.dim)
        c = (g / np.linalg.norm(g)) @ ideal.coords
        _check_noncentral(dec, j, c)
        comps[j] = c
        coords += c
    F = np.tensordot(coords, dec.basis.matrices(), axes=1)
    return FilterOperator(F, coords, comps, 0.0, targets)


def filter_from_operator(dec: IdealDecomposition, F, rank_tol: float = RANK_TOL) -> FilterOperator:
    """Wrap a user-supplied F; targets are the ideals it has a component on.

    A central component is allowed (it drops out of every commutator).
    """
    F = as_array(F)
    mats = dec.basis.matrices()
    if F.shape != mats.shape[1:]:
        raise DimensionMismatchError(f"F has shape {F.shape}, algebra acts on {mats.shape[1:]}")
    q = realvec(mats)
    v = realvec(F)
    # coordinates against the orthonormal matrices; symbolic structure
    # constants differ from these only by an overall factor
    coords = q @ v
    resid = np.linalg.norm(v - (q @ v) @ q)
    if resid > 1e-8 * max(np.linalg.norm(v), 1e-300):
        raise FilterError(f"F is not in the algebra (relative residual {resid / np.linalg.norm(v):.3e})")
    comps, targets = {}, []
    total = np.linalg.norm(coords)
    for j, ideal in enumerate(dec.ideals):
        c = (ideal.coords @ coords) @ ideal.coords
        if np.linalg.norm(c) > FILTER_COMPONENT_TOL * total:
            _check_noncentral(dec, j, c)
            comps[j] = c
            targets.append(j)
    if not targets:
        raise FilterError("F has no component on any simple ideal")
    central = np.linalg.norm(dec.center.coords @ coords) if dec.center.dim else 0.0
    return FilterOperator(F, coords, comps, float(central), targets)


def reduce(A: GeneratorSet, F, zero_tol: float = 1e-10) -> GeneratorSet:
    """``A' = {[F, A] : [F, A] != 0}``, each element scaled to unit HS norm."""
    f = F.F if isinstance(F, FilterOperator) else as_array(F)
    mats = A.dense()
    if f.shape != mats[0].shape:
        raise DimensionMismatchError(f"F has shape {f.shape}, generators {mats[0].shape}")
    fn = np.linalg.norm(f)
    names, out = [], []
    for name, a in zip(A.names, mats):
        c = f @ a - a @ f
        nc = np.linalg.norm(c)
        if nc <= zero_tol * fn * np.linalg.norm(a):
            continue
        names.append(f"[F,{name}]")
        out.append(c / nc)
    if not out:
        raise FilterError("every commutator [F, A] vanishes; F centralizes the generating set")
    return GeneratorSet.from_dense(out, names)


def _span_residuals(mats: np.ndarray, target: np.ndarray) -> np.ndarray:
    q = realvec(target)
    v = realvec(mats)
    nv = np.linalg.norm(v, axis=1)
    r = v - (v @ q.T) @ q
    return np.linalg.norm(r, axis=1) / np.where(nv > 0, nv, 1.0)


@dataclass
class ReductionReport:
    dim_h_target: int
    dim_closure_Aprime: int
    containment_residual: float
    n_Aprime: int
    target_indices: list
    ideal_dims: list
    center_dim: int
    tolerances: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        ok = self.dim_closure_Aprime == self.dim_h_target and self.containment_residual <= CONTAINMENT_TOL
        return "pass" if ok else "fail"

    def to_dict(self) -> dict:
        return {
            "dim_h_target": self.dim_h_target,
            "dim_closure_Aprime": self.dim_closure_Aprime,
            "containment_residual": self.containment_residual,
            "n_Aprime": self.n_Aprime,
            "target_indices": list(self.target_indices),
            "ideal_dims": list(self.ideal_dims),
            "center_dim": self.center_dim,
            "verdict": self.verdict,
            "tolerances": dict(self.tolerances),
        }


def target_matrices(dec: IdealDecomposition, targets) -> np.ndarray:
    mats = [dec.ideals[j].matrices() for j in sorted(set(targets))]
    return np.concatenate(mats) if mats else np.zeros((0,) + dec.basis.matrices().shape[1:])


def verify_reduction(A: GeneratorSet, F, dec: IdealDecomposition, targets=None,
                     rank_tol: float = RANK_TOL) -> tuple[ReductionReport, GeneratorSet]:
    """Close ``reduce(A, F)`` and compare with the sum of the target ideals."""
    if targets is None:
        if not isinstance(F, FilterOperator):
            raise ValueError("targets are required when F is a bare operator")
        targets = F.target_indices
    a_prime = reduce(A, F)
    cl = dense_closure(a_prime, rank_tol=rank_tol)
    h = target_matrices(dec, targets)
    resid = float(np.max(_span_residuals(cl.mats, h))) if h.shape[0] else 1.0
    report = ReductionReport(
        dim_h_target=int(h.shape[0]),
        dim_closure_Aprime=cl.dim,
        containment_residual=resid,
        n_Aprime=len(a_prime),
        target_indices=sorted(set(int(t) for t in targets)),
        ideal_dims=dec.dims,
        center_dim=dec.center.dim,
        tolerances={"rank_tol": rank_tol, "containment_tol": CONTAINMENT_TOL},
    )
    return report, a_prime


def _ideal_matrices(ideal) -> np.ndarray:
    if isinstance(ideal, SubBasis):
        return ideal.matrices()
    if isinstance(ideal, LieBasis):
        return ideal.matrices()
    return np.asarray([as_array(m) for m in ideal])


def check_prop2(ideal, F=None, trials: int = 1, seed: int = 0, rank_tol: float = RANK_TOL) -> bool:
    """Do the first-order commutators ``[F, b]`` regenerate the ideal?

    With ``F=None`` each of ``trials`` draws uses a random unit element of
    the ideal; otherwise the supplied F is tested once.
    """
    mats = _ideal_matrices(ideal)
    if mats.shape[0] == 0:
        raise ValueError("empty ideal")
    rng = np.random.default_rng(seed)
    fs = [as_array(F)] if F is not None else [np.tensordot(g / np.linalg.norm(g), mats, axes=1)
                                               for g in (rng.normal(size=mats.shape[0]) for _ in range(trials))]
    for f in fs:
        if np.linalg.norm(f) == 0:
            raise FilterError("F is zero")
        comms = [f @ b - b @ f for b in mats]
        norms = [np.linalg.norm(c) for c in comms]
        if max(norms) <= 1e-10 * np.linalg.norm(f):
            raise FilterError("F is central in the ideal")
        gens = [c / n for c, n in zip(comms, norms) if n > 1e-10 * np.linalg.norm(f)]
        cl = dense_closure(gens, rank_tol=rank_tol)
        if cl.dim != mats.shape[0]:
            return False
        if np.max(_span_residuals(cl.mats, mats)) > CONTAINMENT_TOL:
            return False
    return True


# -- truncated oscillators ------------------------------------------------------------

@dataclass
class FockOperators:
    """Truncated single-mode operators embedded in ``mode_count`` modes.

    Each attribute is a list indexed by mode (0-based). ``S_prime`` is
    ``(a^dag)^2 - a^2``, which is already anti-Hermitian.
    """

    d_trunc: int
    mode_count: int
    a: list
    a_dag: list
    X: list
    P: list
    N: list
    S: list
    S_prime: list
    safe: np.ndarray

    @property
    def dim(self) -> int:
        return self.d_trunc ** self.mode_count

    def generators(self) -> GeneratorSet:
        """``{iX_j, iP_j, iN_j, iS_j}`` for every mode."""
        names, mats = [], []
        for j in range(self.mode_count):
            for lab, op in (("X", self.X), ("P", self.P), ("N", self.N), ("S", self.S)):
                names.append(f"i{lab}{j + 1}")
                mats.append(1j * op[j])
        return GeneratorSet.from_dense(mats, names)

    def on_safe(self, m: np.ndarray) -> np.ndarray:
        """Compress an operator to the safe subspace."""
        return self.safe @ m @ self.safe


def _embed(op: np.ndarray, j: int, d: int, modes: int) -> np.ndarray:
    out = np.eye(1)
    for k in range(modes):
        out = np.kron(out, op if k == j else np.eye(d))
    return out


def fock_operators(d_trunc: int, mode_count: int = 1) -> FockOperators:
    """Ladder and quadrature operators truncated to ``d_trunc`` levels per mode.

    The safe subspace keeps the lowest ``d_trunc - 2`` levels of every
    mode; relations that move at most two levels up are exact there.
    """
    if d_trunc < 4:
        raise ValueError(f"truncation too small: d_trunc = {d_trunc}, need at least 4")
    if mode_count < 1:
        raise ValueError("need at least one mode")
    a1 = np.diag(np.sqrt(np.arange(1, d_trunc)), k=1).astype(np.complex128)
    ad1 = a1.conj().T
    singles = {
        "a": a1,
        "a_dag": ad1,
        "X": a1 + ad1,
        "P": 1j * (ad1 - a1),
        "N": ad1 @ a1,
        "S": a1 @ a1 + ad1 @ ad1,
        "S_prime": ad1 @ ad1 - a1 @ a1,
    }
    fam = {k: [_embed(v, j, d_trunc, mode_count) for j in range(mode_count)] for k, v in singles.items()}
    keep = np.diag([1.0 if n < d_trunc - 2 else 0.0 for n in range(d_trunc)])
    safe = np.eye(1)
    for _ in range(mode_count):
        safe = np.kron(safe, keep)
    return FockOperators(d_trunc, mode_count, safe=safe.astype(np.complex128), **fam)


def number_filter(fock: FockOperators, omegas) -> np.ndarray:
    """``F = i sum_j omega_j N_j`` over the first ``len(omegas)`` modes."""
    omegas = list(omegas)
    if len(omegas) > fock.mode_count:
        raise ValueError("more frequencies than modes")
    if len(set(omegas)) != len(omegas) or any(w == 0 for w in omegas):
        raise ValueError("frequencies must be distinct and nonzero")
    return 1j * sum(w * fock.N[j] for j, w in enumerate(omegas))


def _direction_residual(mats: np.ndarray, target: np.ndarray, rank_tol: float = RANK_TOL) -> float:
    rows = orthonormal_rows(realvec(target), rank_tol)
    v = realvec(mats)
    r = v - (v @ rows.T) @ rows
    return float(np.max(np.linalg.norm(r, axis=1) / np.linalg.norm(v, axis=1)))


def oscillator_example(d_trunc: int = 8, mode_count: int = 2, S: int = 1, omegas=None, seed: int = 0,
                       rank_tol: float = RANK_TOL) -> dict:
    """Filter the truncated multi-mode generating set onto its first S modes.

    Reports the reduction verdict, how well the filtered directions match
    ``span{iX_j, iP_j, S'_j : j <= S}`` (on the full truncated space and on
    the safe subspace), and the measured canonical relations.
    """
    if not 1 <= S <= mode_count:
        raise ValueError(f"S must lie in 1..{mode_count}")
    omegas = list(omegas) if omegas is not None else [float(j + 1) for j in range(S)]
    fock = fock_operators(d_trunc, mode_count)
    A = fock.generators()
    cl = dense_closure(A, rank_tol=rank_tol)
    dec = ideal_decomposition(cl, seed=seed)
    filt = filter_from_operator(dec, number_filter(fock, omegas))
    report, a_prime = verify_reduction(A, filt, dec, rank_tol=rank_tol)
    expected = np.array([m for j in range(S) for m in (1j * fock.X[j], 1j * fock.P[j], fock.S_prime[j])])
    got = np.array(a_prime.dense())
    safe = fock.safe
    got_safe = np.array([safe @ m @ safe for m in got])
    exp_safe = np.array([safe @ m @ safe for m in expected])
    eye = np.eye(fock.dim)

    def rel(m):
        return float(np.linalg.norm(safe @ m @ safe))

    X, P, N, Sq, Sp = fock.X[0], fock.P[0], fock.N[0], fock.S[0], fock.S_prime[0]
    ssp = Sq @ Sp - Sp @ Sq
    relations = {
        "XP_minus_2iI": rel(X @ P - P @ X - 2j * eye),
        "NX_plus_iP": rel(N @ X - X @ N + 1j * P),
        "NP_minus_iX": rel(N @ P - P @ N - 1j * X),
        "NS_minus_2Sprime": rel(N @ Sq - Sq @ N - 2 * Sp),
        "SSprime_minus_8N_minus_4I": rel(ssp - 8 * N - 4 * eye),
        "SSprime_minus_4N": rel(ssp - 4 * N),
    }
    return {
        "d_trunc": d_trunc,
        "mode_count": mode_count,
        "S": S,
        "omegas": omegas,
        "closure_dim": cl.dim,
        "decomposition": dec.to_dict(),
        "filter": filt.to_dict(),
        "reduction": report.to_dict(),
        "a_prime_names": list(a_prime.names),
        "direction_residual": _direction_residual(got, expected, rank_tol),
        "direction_residual_safe": _direction_residual(got_safe, exp_safe, rank_tol),
        "relations_safe": relations,
        "a_prime": a_prime,
    }
