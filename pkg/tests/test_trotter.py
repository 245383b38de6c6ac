import numpy as np
import pytest

from lieforge.dense import evolve, operator_norm
from lieforge.errors import DenseLimitError
from lieforge.pauli import PauliString, hermitian_matrix
from lieforge.trotter import (
    IsingSpec,
    build_ltfim,
    build_tfim,
    commutator_integral,
    dla_dims,
    error_sweep,
    exact_evolution,
    exactness_residuals,
    longitudinal_field,
    loglog_slope,
    phase_min_distance,
    product_formula_bound,
    site_fragments,
    u_apx,
)

P = PauliString.from_label


def test_tfim_terms():
    h = build_tfim(IsingSpec(2, h_zz=1.5, h_x=0.7))
    assert dict(h.terms) == {P("ZZ"): 1.5, P("XI"): 0.7, P("IX"): 0.7}


def test_ltfim_difference():
    spec = IsingSpec(3, h_zz=1.0, h_z=0.25, h_x=0.5)
    diff = build_ltfim(spec) - build_tfim(spec)
    assert diff == longitudinal_field(3, 0.25)
    assert spec.alpha == 0.25


@pytest.mark.parametrize("n", [2, 3, 4])
def test_field_norm(n):
    assert operator_norm(hermitian_matrix(longitudinal_field(n))) == pytest.approx(n)


def test_spec_validation():
    with pytest.raises(ValueError):
        IsingSpec(1)
    with pytest.raises(ZeroDivisionError):
        IsingSpec(2, h_zz=0.0).alpha


def test_dla_dims():
    rows = dla_dims([2, 3])
    assert rows[0]["dim_tfim"] == 6 and rows[0]["dim_ltfim"] >= 7
    assert rows[0]["matches_n_squared"] is False
    assert [r["dim_tfim"] for r in rows] == [r["n_2n_minus_1"] for r in rows]
    assert rows[1]["dim_ltfim"] == 63
    with pytest.raises(DenseLimitError):
        dla_dims([9])


def test_exactness_identities():
    res = exactness_residuals(n=3)
    assert res["alpha0"] < 1e-12 and res["single_fragment"] < 1e-12


def test_unitarity():
    h0 = build_tfim(IsingSpec(3))
    u = u_apx(h0, site_fragments(3), 0.3, 0.8)
    assert np.linalg.norm(u.conj().T @ u - np.eye(8)) <= 1e-10 * 8


def test_zero_time_and_zero_field():
    h0 = build_tfim(IsingSpec(2))
    frags = site_fragments(2)
    assert operator_norm(u_apx(h0, frags, 0.2, 0.0) - exact_evolution(h0, frags, 0.2, 0.0)) == 0
    rep = error_sweep([2], [0.0, 0.1], [0.0, 0.1], with_bound=False)
    for p in rep.points:
        if p["t"] == 0:
            assert p["err_apx"] < 1e-15
        if p["alpha"] == 0:
            assert p["err_tfim"] < 1e-15


def test_n2_error_below_bound():
    h0 = build_tfim(IsingSpec(2))
    frags = site_fragments(2)
    for t in (0.1, 0.4, 1.0):
        u = exact_evolution(h0, frags, 0.2, t)
        err = operator_norm(u - u_apx(h0, frags, 0.2, t))
        assert err <= product_formula_bound(h0, frags, 0.2, t) * (1 + 1e-6)


def test_commutator_integral_nonzero():
    # interaction-picture fragments spread and stop commuting
    h0 = build_tfim(IsingSpec(2))
    assert commutator_integral(h0, site_fragments(2), 0.5) > 0
    assert commutator_integral(h0, site_fragments(2)[:1], 0.5) == 0


def test_phase_min_distance():
    u = evolve(np.diag([1.0, -1.0]), 0.3).matrix
    assert phase_min_distance(u, np.exp(0.4j) * u) == pytest.approx(0.0, abs=1e-12)
    v = evolve(np.diag([1.0, -1.0]), 0.5).matrix
    assert phase_min_distance(u, v) <= operator_norm(u - v) + 1e-12


def test_loglog_slope():
    x = np.geomspace(0.1, 1, 6)
    assert loglog_slope(x, 0.01 * x ** 2) == pytest.approx(2.0)
    assert loglog_slope(x, np.full(6, 1e-14)) is None


def test_sweep_structure_and_monotone():
    t_list = list(np.geomspace(0.02, 0.32, 5))
    rep = error_sweep([3], [0.05, 0.1], t_list, with_bound=True, nodes=9)
    assert len(rep.points) == 10
    for a in (0.05, 0.1):
        errs = [p["err_apx"] for p in rep.points if p["alpha"] == a]
        assert all(e2 >= e1 for e1, e2 in zip(errs, errs[1:]))
    for s in rep.slopes["alpha"]:
        assert s["slope"] == pytest.approx(2.0, abs=0.1)
    for s in rep.slopes["alpha_tfim"]:
        assert s["slope"] == pytest.approx(1.0, abs=0.1)
    csv_text = rep.to_csv()
    assert csv_text.splitlines()[0] == "n,alpha,t,err_apx,err_apx_phase_min,err_tfim,bound"
    assert len(csv_text.splitlines()) == 11


def test_sweep_limit():
    with pytest.raises(DenseLimitError):
        error_sweep([9], [0.1], [0.1])
