"""Fermionic operator algebra checked against dense ladder matrices."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fermion_matrix, fixture_path, load_problem
from qcff.chemio import MolecularIntegrals, read_integral_file
from qcff.fermion import (
    FermionOperator,
    build_hamiltonian,
    commutator,
    determinants,
    normal_order,
    number_operator,
    sz_operator,
    to_sparse,
)

factor = st.tuples(st.integers(0, 2), st.booleans())


def test_anticommutator_identity():
    out = normal_order(FermionOperator.from_label("0 0^"))
    assert out.approx_equal(FermionOperator.identity() - FermionOperator.from_label("0^ 0"))


def test_creation_operators_reorder_with_sign():
    out = normal_order(FermionOperator.from_label("0^ 1^"))
    assert out.approx_equal(FermionOperator.from_label("1^ 0^", -1.0))


def test_repeated_operator_vanishes():
    assert len(normal_order(FermionOperator.from_label("2^ 1 2^"))) == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(factor, min_size=1, max_size=4), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_normal_order_preserves_matrix(factors, coeff):
    op = FermionOperator.term(factors, coeff)
    assert np.allclose(fermion_matrix(op, 3), fermion_matrix(normal_order(op), 3), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(factor, min_size=1, max_size=4), st.lists(factor, min_size=1, max_size=3))
def test_normal_order_idempotent_and_linear(f1, f2):
    a, b = FermionOperator.term(f1, 0.7), FermionOperator.term(f2, -1.3j)
    na = normal_order(a)
    assert normal_order(na).approx_equal(na)
    assert normal_order(a + b).approx_equal(na + normal_order(b))


def test_one_orbital_one_electron_term():
    h = np.array([[-1.0]])
    ints = MolecularIntegrals(1, 1, 0.0, h, np.zeros((1,) * 4))
    expect = FermionOperator.from_label("0^ 0", -1.0) + FermionOperator.from_label("1^ 1", -1.0)
    assert build_hamiltonian(ints).approx_equal(expect)


def test_one_orbital_coulomb_term():
    u = 0.6
    eri = np.full((1,) * 4, u)
    ints = MolecularIntegrals(1, 2, 0.0, np.zeros((1, 1)), eri)
    H = build_hamiltonian(ints)
    # only the doubly occupied state feels u
    mat = fermion_matrix(H, 2)
    assert np.allclose(np.diag(mat).real, [0, 0, 0, u])
    assert np.allclose(mat - np.diag(np.diag(mat)), 0)


def test_core_energy_is_identity_term():
    ints = MolecularIntegrals(1, 1, 0.75, np.zeros((1, 1)), np.zeros((1,) * 4))
    assert build_hamiltonian(ints).terms == {(): 0.75}


@pytest.mark.parametrize("name", ["h2", "heh+", "h4_chain"])
def test_hamiltonian_symmetries(name):
    _, H, _, m = load_problem(name)
    assert H.approx_equal(normal_order(H.adjoint()))
    assert len(commutator(H, number_operator(m))) == 0
    assert len(commutator(H, sz_operator(m))) == 0


def test_hamiltonian_matches_dense_oracle_for_h2():
    _, H, _, m = load_problem("h2")
    mat = fermion_matrix(H, m)
    occ2 = [i for i in range(16) if bin(i).count("1") == 2]
    ground = np.linalg.eigvalsh(mat[np.ix_(occ2, occ2)])[0]
    assert ground == pytest.approx(-1.1373, abs=1e-3)


def test_determinants_counts():
    from math import comb

    assert len(determinants(6, 2)) == comb(6, 2)
    assert len(determinants(6)) == 64
    # interleaved spins: sz2 = N_alpha - N_beta
    assert len(determinants(6, 2, sz2=0)) == 9


def test_sparse_matrix_agrees_with_dense_oracle():
    ints = read_integral_file(fixture_path("h2"))
    H = build_hamiltonian(ints)
    dets = determinants(4, 2)
    sub = to_sparse(H, dets).toarray()
    full = fermion_matrix(H, 4)
    assert np.allclose(np.linalg.eigvalsh(sub), np.linalg.eigvalsh(
        full[np.ix_(*[[i for i in range(16) if bin(i).count("1") == 2]] * 2)]), atol=1e-12)
