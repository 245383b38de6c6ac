"""Ising chains, the interaction-picture product formula and its error study.

``H = H0 + alpha * H1`` with ``H0`` the transverse-field chain and ``H1``
the longitudinal field split into one fragment per site. The product
formula is

    U_apx(t) = e^{-itH0} prod_g ( e^{itH0} e^{-it(H0 + alpha H1_g)} )

and its error is compared against the double-integral commutator bound.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .closure import pauli_closure
from .dense import as_array, evolve, operator_norm
from .errors import DenseLimitError
from .pauli import PauliString, PauliSum, hermitian_matrix

SWEEP_MAX_QUBITS = 8
TFIM_DIM_MAX_QUBITS = 8
LTFIM_DIM_MAX_QUBITS = 5
FIT_FLOOR = 1e-12
FIT_CEIL = 0.5
QUADRATURE_NODES = 33


@dataclass(frozen=True)
class IsingSpec:
    """Open chain ``h_zz sum Z_j Z_{j+1} + h_z sum Z_j + h_x sum X_j``."""

    n: int
    h_zz: float = 1.0
    h_z: float = 0.0
    h_x: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chain length must be at least 2, got {self.n}")

    @property
    def alpha(self) -> float:
        if self.h_zz == 0:
            raise ZeroDivisionError("alpha = h_z / h_zz needs h_zz != 0")
        return self.h_z / self.h_zz


def _site(n: int, letters: dict[int, str]) -> PauliString:
    lab = ["I"] * n
    for k, v in letters.items():
        lab[k] = v
    return PauliString.from_label("".join(lab))


def build_tfim(spec: IsingSpec) -> PauliSum:
    """Coefficients of the Hermitian TFIM Hamiltonian (the sum stands for ``iH``)."""
    n = spec.n
    terms = {}
    for j in range(n - 1):
        terms[_site(n, {j: "Z", j + 1: "Z"})] = spec.h_zz
    for j in range(n):
        terms[_site(n, {j: "X"})] = spec.h_x
    return PauliSum(n, terms)


def longitudinal_field(n: int, h_z: float = 1.0) -> PauliSum:
    return PauliSum(n, {_site(n, {j: "Z"}): h_z for j in range(n)})


def build_ltfim(spec: IsingSpec) -> PauliSum:
    return build_tfim(spec) + longitudinal_field(spec.n, spec.h_z)


def site_fragments(n: int, scale: float = 1.0) -> list[PauliSum]:
    """``scale * Z_g`` for every site g."""
    return [PauliSum(n, {_site(n, {g: "Z"}): scale}) for g in range(n)]


# -- algebra dimensions --------------------------------------------------------

def tfim_generators(n: int) -> list[PauliString]:
    return [_site(n, {j: "Z", j + 1: "Z"}) for j in range(n - 1)] + [_site(n, {j: "X"}) for j in range(n)]


def ltfim_generators(n: int) -> list[PauliString]:
    return tfim_generators(n) + [_site(n, {j: "Z"}) for j in range(n)]


def dla_dims(n_list, ltfim: bool = True) -> list[dict]:
    """Closure dimensions of the TFIM (and LTFIM) generator sets.

    Each row also carries the quadratic prediction ``n**2`` and whether
    the measured TFIM dimension matches it.
    """
    rows = []
    for n in n_list:
        if n < 2:
            raise ValueError("chain length must be at least 2")
        if n > TFIM_DIM_MAX_QUBITS:
            raise DenseLimitError("TFIM closure chain length", n, TFIM_DIM_MAX_QUBITS)
        d_t = pauli_closure(tfim_generators(n)).dim
        row = {"n": n, "dim_tfim": d_t, "n_squared": n * n, "matches_n_squared": d_t == n * n,
               "n_2n_minus_1": n * (2 * n - 1)}
        if ltfim and n <= LTFIM_DIM_MAX_QUBITS:
            row["dim_ltfim"] = pauli_closure(ltfim_generators(n)).dim
            row["four_n_minus_1"] = 4 ** n - 1
        else:
            row["dim_ltfim"] = None
        rows.append(row)
    return rows


# -- product formula ---------------------------------------------------------------

def _herm(h) -> np.ndarray:
    return hermitian_matrix(h) if isinstance(h, PauliSum) else as_array(h)


def u_apx(h0, fragments, alpha: float, t: float) -> np.ndarray:
    """Interaction-picture product formula; each factor via eigendecomposition."""
    H0 = _herm(h0)
    frags = [_herm(f) for f in fragments]
    u0 = evolve(H0, t).matrix
    u0_inv = u0.conj().T
    out = u0
    for f in frags:
        out = out @ u0_inv @ evolve(H0 + alpha * f, t).matrix
    return out


def exact_evolution(h0, fragments, alpha: float, t: float) -> np.ndarray:
    H = _herm(h0) + alpha * sum(_herm(f) for f in fragments)
    return evolve(H, t).matrix


def phase_min_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min_phi ||u - e^{i phi} v||`` from the eigenphases of ``v^dagger u``."""
    w = np.linalg.eigvals(v.conj().T @ u)
    theta = np.sort(np.mod(np.angle(w), 2 * np.pi))
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * np.pi]]))
    arc = 2 * np.pi - np.max(gaps)
    return float(2 * np.sin(arc / 4))


def _simpson_weights(npts: int) -> np.ndarray:
    if npts < 3 or npts % 2 == 0:
        raise ValueError("composite Simpson needs an odd number of nodes >= 3")
    w = np.ones(npts)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return w / (3 * (npts - 1))


def commutator_integral(h0, fragments, t: float, nodes: int = QUADRATURE_NODES) -> float:
    """``int_0^t dnu int_0^nu ds sum_{g1<g2} ||[H~_g1(s), H~_g2(nu)]||``.

    The triangle is mapped to the unit square with ``s = nu * u``;
    composite Simpson with ``nodes`` points per axis. Interaction-picture
    operators are formed in the eigenbasis of H0, which leaves the norms
    unchanged.
    """
    if t == 0:
        return 0.0
    H0 = _herm(h0)
    lam, V = np.linalg.eigh(H0)
    frags = [V.conj().T @ _herm(f) @ V for f in fragments]
    r = len(frags)
    if r < 2:
        return 0.0
    grid = np.linspace(0.0, 1.0, nodes)
    w = _simpson_weights(nodes)

    def tilde(tau):
        ph = np.exp(1j * tau * lam)
        return [(ph[:, None] * f) * ph.conj()[None, :] for f in frags]

    total = 0.0
    for wi, x in zip(w, grid):
        nu = t * x
        if nu == 0:
            continue
        at_nu = tilde(nu)
        inner = 0.0
        for wj, u in zip(w, grid):
            at_s = tilde(nu * u)
            acc = 0.0
            for g1 in range(r):
                for g2 in range(g1 + 1, r):
                    a, b = at_s[g1], at_nu[g2]
                    acc += np.linalg.svd(a @ b - b @ a, compute_uv=False)[0]
            inner += wj * acc
        total += wi * nu * inner
    return float(t * total)


def product_formula_bound(h0, fragments, alpha: float, t: float, nodes: int = QUADRATURE_NODES) -> float:
    return alpha * alpha * commutator_integral(h0, fragments, t, nodes)


def exactness_residuals(n: int = 2, t: float = 0.7, alpha: float = 0.3, h_zz: float = 1.0, h_x: float = 1.0) -> dict:
    """Operator-norm residuals of the alpha = 0 and single-fragment identities."""
    spec = IsingSpec(n, h_zz, 0.0, h_x)
    h0 = build_tfim(spec)
    frags = site_fragments(n, h_zz)
    u0 = evolve(_herm(h0), t).matrix
    r_alpha0 = operator_norm(u_apx(h0, frags, 0.0, t) - u0)
    h1 = longitudinal_field(n, h_zz)
    r_single = operator_norm(u_apx(h0, [h1], alpha, t) - exact_evolution(h0, [h1], alpha, t))
    return {"alpha0": float(r_alpha0), "single_fragment": float(r_single)}


# -- sweep ---------------------------------------------------------------------------

def loglog_slope(x, y, floor: float = FIT_FLOOR, ceil: float = FIT_CEIL) -> float | None:
    """Least-squares slope of log y vs log x over points inside (floor, ceil)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (y >= floor) & (y <= ceil) & (x > 0)
    if np.count_nonzero(keep) < 2:
        return None
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


@dataclass
class TrotterReport:
    h_zz: float
    h_x: float
    points: list
    slopes: dict
    bound_constant: float | None
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "h_zz": self.h_zz,
            "h_x": self.h_x,
            "points": self.points,
            "slopes": self.slopes,
            "bound_constant": self.bound_constant,
            "tolerances": dict(self.tolerances),
        }

    def to_csv(self) -> str:
        cols = ["n", "alpha", "t", "err_apx", "err_apx_phase_min", "err_tfim", "bound"]
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        for p in self.points:
            wr.writerow([repr(p[c]) if isinstance(p[c], float) else p[c] for c in cols])
        return buf.getvalue()


def error_sweep(n_list, alpha_list, t_list, h_zz: float = 1.0, h_x: float = 1.0,
                with_bound: bool = True, nodes: int = QUADRATURE_NODES) -> TrotterReport:
    """Both error notions over the (n, alpha, t) grid, with log-log slope fits.

    ``alpha = h_z / h_zz``; fragments are ``h_zz * Z_g`` so that
    ``H_LTFIM = H0 + alpha * sum_g fragment_g``.
    """
    n_list = sorted(int(n) for n in n_list)
    alpha_list = sorted(float(a) for a in alpha_list)
    t_list = sorted(float(t) for t in t_list)
    for n in n_list:
        if n > SWEEP_MAX_QUBITS:
            raise DenseLimitError("trotter sweep chain length", n, SWEEP_MAX_QUBITS)
    points = []
    slopes = {"t": [], "alpha": [], "t_tfim": [], "alpha_tfim": []}
    for n in n_list:
        spec = IsingSpec(n, h_zz, 0.0, h_x)
        h0 = build_tfim(spec)
        H0 = _herm(h0)
        frags = site_fragments(n, h_zz)
        H1 = sum(_herm(f) for f in frags)
        integrals = {t: commutator_integral(h0, frags, t, nodes) for t in t_list} if with_bound else {}
        grid = {}
        for alpha in alpha_list:
            for t in t_list:
                u = evolve(H0 + alpha * H1, t).matrix
                ua = u_apx(h0, frags, alpha, t)
                u_tfim = evolve(H0, t).matrix
                rec = {
                    "n": n,
                    "alpha": alpha,
                    "t": t,
                    "err_apx": operator_norm(u - ua),
                    "err_apx_phase_min": phase_min_distance(u, ua),
                    "err_tfim": operator_norm(u - u_tfim),
                    "bound": alpha * alpha * integrals[t] if with_bound else None,
                }
                grid[(alpha, t)] = rec
                points.append(rec)
        for alpha in alpha_list:
            ys = [grid[(alpha, t)]["err_apx"] for t in t_list]
            yt = [grid[(alpha, t)]["err_tfim"] for t in t_list]
            slopes["t"].append({"n": n, "alpha": alpha, "slope": loglog_slope(t_list, ys)})
            slopes["t_tfim"].append({"n": n, "alpha": alpha, "slope": loglog_slope(t_list, yt)})
        for t in t_list:
            ys = [grid[(a, t)]["err_apx"] for a in alpha_list]
            yt = [grid[(a, t)]["err_tfim"] for a in alpha_list]
            slopes["alpha"].append({"n": n, "t": t, "slope": loglog_slope(alpha_list, ys)})
            slopes["alpha_tfim"].append({"n": n, "t": t, "slope": loglog_slope(alpha_list, yt)})
    ratios = [p["err_apx"] / (p["n"] ** 2 * p["alpha"] ** 2 * p["t"] ** 2)
              for p in points if p["alpha"] > 0 and p["t"] > 0]
    return TrotterReport(
        h_zz=h_zz, h_x=h_x, points=points, slopes=slopes,
        bound_constant=max(ratios) if ratios else None,
        tolerances={"fit_floor": FIT_FLOOR, "fit_ceil": FIT_CEIL, "quadrature_nodes": nodes},
    )
