import numpy as np
import pytest

from lieforge.closure import (
    adjoint_matrices,
    closure,
    contains,
    cyclicity_witness_ok,
    dense_closure,
    is_cyclic,
    killing_form,
    pauli_closure,
    proportionality_residual,
    replay_chain,
)
from lieforge.dense import realvec
from lieforge.errors import ClosureError, RoleError
from lieforge.generators import GeneratorSet
from lieforge.pauli import PauliString, PauliSum, commutator, random_pauli_string, string_matrix


def dense_images(labels):
    return [1j * string_matrix(PauliString.from_label(s)) for s in labels]


TFIM2 = ["ZZ", "XI", "IX"]


def test_su2_closure():
    b = pauli_closure(["X", "Y"])
    assert b.labels() == ["X", "Y", "Z"]
    assert b.provenance[:2] == [None, None]


def test_tfim2_closure():
    b = pauli_closure(TFIM2)
    assert sorted(b.labels()) == sorted(["ZZ", "XI", "IX", "YZ", "ZY", "YY"])


def test_a2_generates_su4():
    assert pauli_closure(["XI", "YI", "IX", "IY", "YY"]).dim == 15


def test_dense_examples(dipole, heisenberg):
    assert dense_closure(dense_images(["X", "Y"])).dim == 3
    assert dense_closure(dipole).dim == 4
    assert dense_closure(heisenberg).dim == 1


def test_dense_basis_orthonormal():
    b = dense_closure(dense_images(TFIM2))
    v = realvec(b.mats)
    np.testing.assert_allclose(v @ v.T, np.eye(b.dim), atol=1e-9)
    for m in b.mats:
        assert np.linalg.norm(m + m.conj().T) < 1e-12


def test_dense_rejects_hermitian():
    with pytest.raises(RoleError):
        dense_closure([np.diag([1.0, -1.0])])


def test_max_dim_guard():
    with pytest.raises(ClosureError):
        dense_closure(dense_images(["X", "Y"]), max_dim=2)


def test_saturated_flag():
    assert dense_closure(dense_images(["XI", "YI", "IX", "IY", "YY"])).saturated
    assert not dense_closure(dense_images(TFIM2)).saturated


@pytest.mark.parametrize("seed", range(8))
def test_oracle_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    labels = [random_pauli_string(n, rng).label for _ in range(2 + seed % 3)]
    labels = [s for s in labels if set(s) != {"I"}] or ["X" * n]
    assert pauli_closure(labels).dim == dense_closure(dense_images(labels)).dim


def test_order_independence():
    rng = np.random.default_rng(11)
    labels = [random_pauli_string(3, rng).label for _ in range(4)]
    a = pauli_closure(labels)
    for _ in range(3):
        perm = list(rng.permutation(labels))
        b = pauli_closure(perm)
        assert a.labels() == b.labels() and a.provenance == b.provenance


def test_kernel_matches_python_path():
    labels = ["XIII", "YIII", "IXII", "IYII", "IIXZ", "ZZYI"]
    a = pauli_closure(labels, use_kernel=True)
    b = pauli_closure(labels, use_kernel=False)
    assert a.labels() == b.labels() and a.provenance == b.provenance


def test_monotone_and_idempotent():
    rng = np.random.default_rng(5)
    mats = []
    last = 0
    for _ in range(4):
        mats.append(dense_images([random_pauli_string(2, rng).label])[0] * rng.normal())
        if np.linalg.norm(mats[-1]) == 0 or np.allclose(mats[-1], 0):
            continue
        d = dense_closure(mats).dim
        assert d >= last
        last = d
    b = dense_closure(mats)
    assert dense_closure(list(b.mats)).dim == b.dim


def test_provenance_replays():
    b = dense_closure(dense_images(["XI", "IX", "ZZ"]))
    for k, p in enumerate(b.provenance):
        if p is None:
            continue
        i, j = p
        c = b.mats[i] @ b.mats[j] - b.mats[j] @ b.mats[i]
        # child is the new part of the bracket: it must lie in span(b_0..b_k) with a nonzero b_k part
        v = realvec(c)
        q = realvec(b.mats[: k + 1])
        assert np.linalg.norm(v - (q @ v) @ q) < 1e-9 * np.linalg.norm(v)
        assert abs(q[k] @ v) > 1e-9
    s = pauli_closure(TFIM2)
    for k, p in enumerate(s.provenance):
        if p is None:
            continue
        c = commutator(PauliSum.from_string(s.strings[p[0]]), PauliSum.from_string(s.strings[p[1]]))
        assert list(c.terms) == [s.strings[k]]


def test_adjoint_su2():
    b = pauli_closure(["X", "Y"])
    ad = adjoint_matrices(b)
    # [X, Y] = 2iZ in Pauli normalization: ad_X maps Y to Z with magnitude 2 (up to overall basis scale)
    assert abs(ad[0][2, 1]) > 0
    nz = np.abs(ad[np.abs(ad) > 1e-12])
    np.testing.assert_allclose(nz / nz[0], 1.0)
    for i in range(3):
        np.testing.assert_allclose(ad[i][:, i], 0)
        np.testing.assert_allclose(ad[i], -ad[i].T, atol=1e-12)


def test_adjoint_abelian():
    b = pauli_closure(["ZI", "IZ"])
    assert np.all(adjoint_matrices(b) == 0)


def test_killing_tfim_nondegenerate():
    k = killing_form(pauli_closure(TFIM2))
    ev = np.linalg.eigvalsh(k)
    assert np.min(np.abs(ev)) > 1e-8 * np.max(np.abs(ev))


def test_contains_examples():
    su2 = pauli_closure(["X", "Y"])
    assert contains(su2, "Z") == (True, 0.0)
    assert contains(su2, "X")[0]
    tf = pauli_closure(TFIM2)
    ok, res = contains(tf, "XX")
    assert not ok and res == 1.0
    dense = dense_closure(dense_images(TFIM2))
    assert not contains(dense, dense_images(["XX"])[0])[0]
    assert contains(dense, dense_images(["YY"])[0])[0]


def test_closure_dispatch():
    g = GeneratorSet.from_pauli(TFIM2)
    assert closure(g).flavor == "symbolic"
    g2 = GeneratorSet.from_pauli([PauliSum.from_labels([(1, "XI"), (1, "IX")])])
    assert closure(g2).flavor == "dense"


def test_cyclic_su2():
    g = GeneratorSet.from_pauli(["X", "Y"])
    rep = is_cyclic(g)
    assert rep.verdict == "cyclic"
    assert cyclicity_witness_ok(g, rep)
    y, seed = replay_chain(g, 0, 1, rep.witnesses[(0, 1)])
    assert proportionality_residual(y, seed, g) < 1e-9


def test_cyclic_vacuous():
    rep = is_cyclic(GeneratorSet.from_pauli(["ZI", "IZ", "ZZ"]))
    assert rep.verdict == "cyclic" and rep.witnesses == {}


def test_cyclic_depth_zero_unknown():
    rep = is_cyclic(GeneratorSet.from_pauli(["X", "Y"]), depth_budget=0)
    assert rep.verdict == "unknown"
    assert rep.witnesses[(0, 1)] is None


def test_cyclic_dense_agrees():
    rep = is_cyclic(dense_images(["X", "Y"]))
    assert rep.verdict == "cyclic"
    assert cyclicity_witness_ok(dense_images(["X", "Y"]), rep)
