import numpy as np
import pytest

from lieforge.closure import LieBasis, dense_closure, is_cyclic, pauli_closure
from lieforge.dense import realvec
from lieforge.errors import FilterError, NonReductiveError
from lieforge.generators import GeneratorSet
from lieforge.invariance import build_su4_minimal
from lieforge.pauli import PauliString, string_matrix
from lieforge.reduction import (
    IdealDecomposition,
    SubBasis,
    build_filter,
    check_prop2,
    filter_from_operator,
    fock_operators,
    ideal_decomposition,
    lie_center,
    number_filter,
    oscillator_example,
    reduce,
    verify_reduction,
)


def ipauli(label):
    return 1j * string_matrix(PauliString.from_label(label))


TWO_QUBIT = ["XI", "YI", "ZI", "IX", "IY", "IZ"]


def span_distance(a, b):
    """Largest sine of the principal angles between two row spaces."""
    qa, _ = np.linalg.qr(a.T)
    qb, _ = np.linalg.qr(b.T)
    return float(np.linalg.norm(qb - qa @ (qa.T @ qb), 2))


def test_lie_center_examples(dipole):
    assert lie_center(pauli_closure(["X", "Y"])).dim == 0
    assert lie_center(pauli_closure(["ZI", "IZ"])).dim == 2
    assert lie_center(dense_closure(dipole)).dim == 1


def test_decomposition_two_qubits():
    dec = ideal_decomposition(pauli_closure(TWO_QUBIT))
    assert dec.dims == [3, 3] and dec.center.dim == 0
    for a in dec.ideals:
        for b in dec.ideals:
            if a is b:
                continue
            for x in a.matrices():
                for y in b.matrices():
                    assert np.linalg.norm(x @ y - y @ x) < 1e-9


def test_decomposition_su2():
    dec = ideal_decomposition(pauli_closure(["X", "Y"]))
    assert dec.dims == [3] and dec.center.dim == 0


def test_decomposition_with_center():
    dec = ideal_decomposition(pauli_closure(["XII", "YII", "IXI", "IYI", "IIZ"]))
    assert dec.dims == [3, 3] and dec.center.dim == 1


def test_ideals_closed_and_centerless():
    basis = pauli_closure(["XII", "YII", "IXI", "IYI", "IIZ"])
    dec = ideal_decomposition(basis)
    for ideal in dec.ideals:
        mats = ideal.matrices()
        q = realvec(mats)
        for x in mats:
            for y in mats:
                v = realvec(x @ y - y @ x)
                assert np.linalg.norm(v - (q @ v) @ q) < 1e-9
        assert lie_center(dense_closure(list(mats))).dim == 0


def test_decomposition_reconstructs():
    basis = pauli_closure(["XII", "YII", "IXI", "IYI", "IIZ"])
    dec = ideal_decomposition(basis)
    rows = np.vstack([dec.center.coords] + [i.coords for i in dec.ideals])
    assert rows.shape[0] == basis.dim
    np.testing.assert_allclose(rows @ rows.T, np.eye(basis.dim), atol=1e-9)


def test_seed_independence():
    basis = pauli_closure(["XII", "YII", "IXI", "IYI", "IIZ", "IIX"])
    a = ideal_decomposition(basis, seed=0)
    b = ideal_decomposition(basis, seed=99)
    assert a.dims == b.dims
    for x, y in zip(a.ideals, b.ideals):
        assert span_distance(x.coords, y.coords) < 1e-8


def test_non_reductive_rejected():
    # span{h, e} with [h, e] = 2e is solvable and not abelian
    e = np.array([[0, 1], [0, 0]], dtype=complex)
    h = np.diag([1.0, -1.0]).astype(complex)
    nonred = LieBasis("dense", mats=np.array([h / np.sqrt(2), e]), provenance=[None, None])
    with pytest.raises(NonReductiveError):
        ideal_decomposition(nonred)


def test_build_filter_examples():
    dec = ideal_decomposition(pauli_closure(["X", "Y"]))
    f = build_filter(dec, [0])
    assert f.target_indices == [0]
    assert np.linalg.norm(f.coords) == pytest.approx(1.0)
    with pytest.raises(FilterError):
        build_filter(dec, [])
    with pytest.raises(FilterError):
        build_filter(dec, [1])


def test_build_filter_rejects_central_fake_ideal(dipole):
    basis = dense_closure(dipole)
    dec = ideal_decomposition(basis)
    fake = IdealDecomposition(basis, dec.center, dec.ideals + [SubBasis(basis, dec.center.coords)])
    with pytest.raises(FilterError, match="central"):
        build_filter(fake, [len(fake.ideals) - 1])


def test_reduce_keep_first():
    A = GeneratorSet.from_pauli(["XI", "YI", "IX", "IY"])
    a_prime = reduce(A, ipauli("ZI"))
    assert a_prime.names == ["[F,g1]", "[F,g2]"]
    mats = a_prime.dense()
    for m, lab in zip(mats, ["YI", "XI"]):
        assert abs(abs(np.vdot(m, ipauli(lab))) / 2 - 1) < 1e-12
    dec = ideal_decomposition(pauli_closure(["XI", "YI", "IX", "IY"]))
    rep, _ = verify_reduction(A, filter_from_operator(dec, ipauli("ZI")), dec)
    assert rep.dim_closure_Aprime == 3 and rep.containment_residual < 1e-9 and rep.verdict == "pass"


def test_reduce_central_filter_errors():
    A = GeneratorSet.from_pauli(["XI", "YI"])
    with pytest.raises(FilterError, match="vanishes"):
        reduce(A, ipauli("IZ"))


def test_all_targets_recovers_derived_algebra():
    A = GeneratorSet.from_pauli(["XII", "YII", "IXI", "IYI", "IIZ"])
    dec = ideal_decomposition(pauli_closure(A))
    rep, _ = verify_reduction(A, build_filter(dec, [0, 1], seed=3), dec)
    assert rep.dim_closure_Aprime == 6 and rep.verdict == "pass"


def test_single_commuting_generator_sabotage():
    # qubit 1 is touched by ZI and XI only through one non-commuting pair:
    # [F, A] with F = ZI keeps only [ZI, XI], which closes to u(1)
    A = GeneratorSet.from_pauli(["ZI", "XI", "IX", "IY"])
    dec = ideal_decomposition(pauli_closure(A))
    filt = filter_from_operator(dec, ipauli("ZI"))
    rep, _ = verify_reduction(A, filt, dec)
    assert rep.dim_h_target == 3
    assert rep.dim_closure_Aprime == 1
    assert rep.verdict == "fail"


@pytest.mark.parametrize("trial", range(50))
def test_random_cyclic_reduction(trial):
    rng = np.random.default_rng(1000 + trial)
    mats = []
    for q in (0, 1):
        labs = ["XII", "YII"] if q == 0 else ["IXI", "IYI"]
        c = rng.normal(size=(2, 2))
        while abs(np.linalg.det(c)) < 0.1:
            c = rng.normal(size=(2, 2))
        mats += [c[r, 0] * ipauli(labs[0]) + c[r, 1] * ipauli(labs[1]) for r in range(2)]
    mats.append(ipauli("IIZ"))
    mats[0] = mats[0] + rng.normal() * ipauli("IIZ")
    A = GeneratorSet.from_dense(mats)
    dec = ideal_decomposition(dense_closure(A), seed=trial)
    assert dec.dims == [3, 3] and dec.center.dim == 1
    targets = [[0], [1], [0, 1]][trial % 3]
    rep, _ = verify_reduction(A, build_filter(dec, targets, seed=trial), dec)
    assert rep.dim_closure_Aprime == 3 * len(targets)
    assert rep.verdict == "pass"


def test_random_set_is_cyclic():
    rng = np.random.default_rng(7)
    c = rng.normal(size=(2, 2))
    mats = [c[r, 0] * ipauli("X") + c[r, 1] * ipauli("Y") for r in range(2)]
    assert is_cyclic(mats).verdict == "cyclic"


def test_first_order_commutators_examples():
    su2 = pauli_closure(["X", "Y"])
    assert check_prop2(su2, ipauli("Z"))
    with pytest.raises(FilterError):
        check_prop2(su2, np.zeros((2, 2)))


def test_first_order_commutators_random_su4():
    assert check_prop2(pauli_closure(build_su4_minimal()), trials=50, seed=5)


def test_first_order_commutators_random_ideals():
    dec = ideal_decomposition(pauli_closure(["XII", "YII", "IXI", "IYI", "IIZ"]))
    for ideal in dec.ideals:
        assert check_prop2(ideal, trials=50, seed=1)


def test_fock_entries_and_relations():
    fock = fock_operators(6, 1)
    a = fock.a[0]
    for n in range(5):
        assert a[n, n + 1] == pytest.approx(np.sqrt(n + 1))
    X, P, N = fock.X[0], fock.P[0], fock.N[0]
    assert np.linalg.norm(fock.on_safe(N @ X - X @ N + 1j * P)) < 1e-12
    assert np.linalg.norm(fock.on_safe(X @ P - P @ X - 2j * np.eye(6))) < 1e-12
    with pytest.raises(ValueError):
        fock_operators(3)


def test_number_filter_validation():
    fock = fock_operators(4, 2)
    with pytest.raises(ValueError):
        number_filter(fock, [1.0, 1.0])
    with pytest.raises(ValueError):
        number_filter(fock, [1.0, 2.0, 3.0])


@pytest.fixture(scope="module")
def small_oscillator():
    return oscillator_example(d_trunc=6, mode_count=2, S=1)


def test_oscillator_reduction(small_oscillator):
    res = small_oscillator
    assert res["closure_dim"] == 2 * 35 + 1
    assert res["decomposition"]["ideal_dims"] == [35, 35]
    assert res["reduction"]["verdict"] == "pass"
    assert res["reduction"]["dim_closure_Aprime"] == 35
    assert res["a_prime_names"] == ["[F,iX1]", "[F,iP1]", "[F,iS1]"]
    assert res["direction_residual"] < 1e-9


def test_oscillator_relations(small_oscillator):
    rel = small_oscillator["relations_safe"]
    for key in ("XP_minus_2iI", "NX_plus_iP", "NP_minus_iX", "NS_minus_2Sprime", "SSprime_minus_8N_minus_4I"):
        assert rel[key] < 1e-10
    assert rel["SSprime_minus_4N"] > 1.0
