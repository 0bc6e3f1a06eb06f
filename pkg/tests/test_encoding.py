"""Pauli algebra and the Jordan-Wigner map against dense oracles."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fermion_matrix, ladder_matrix, load_problem, pauli_matrix
from qcff.encoding import PauliTerm, QubitOperator, jordan_wigner, multiply, qubit_count_bounds
from qcff.errors import DomainError, ParseError
from qcff.fermion import FermionOperator, normal_order

labels3 = st.lists(st.sampled_from("IXYZ"), min_size=3, max_size=3)


def term_of(label, coeff=1.0):
    text = " ".join(f"{p}{q}" for q, p in enumerate(label) if p != "I")
    return PauliTerm.from_label(text, len(label), coeff)


def test_single_qubit_products():
    x, z = PauliTerm.from_label("X0", 1), PauliTerm.from_label("Z0", 1)
    xz = multiply(x, z)
    assert xz.label() == "Y0" and xz.coeff == -1j
    zz = multiply(z, z)
    assert zz.is_identity() and zz.coeff == 1


@settings(max_examples=60)
@given(labels3, labels3)
def test_product_matches_matrix_product(a, b):
    prod = multiply(term_of(a), term_of(b))
    assert np.allclose(prod.to_matrix(), pauli_matrix(a) @ pauli_matrix(b))


@settings(max_examples=40)
@given(labels3, labels3, labels3)
def test_product_is_associative(a, b, c):
    pa, pb, pc = term_of(a), term_of(b), term_of(c)
    left, right = (pa * pb) * pc, pa * (pb * pc)
    assert left.key == right.key and left.coeff == right.coeff


@given(st.sampled_from("XYZ"), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_square_of_single_pauli(p, c):
    t = PauliTerm.from_label(f"{p}0", 1, c)
    sq = t * t
    assert sq.is_identity() and sq.coeff == pytest.approx(c * c)
    assert (t * t.with_coeff(np.conj(c))).coeff == pytest.approx(abs(c) ** 2)


@settings(max_examples=40)
@given(labels3, labels3)
def test_commutation_flag_matches_matrices(a, b):
    ma, mb = pauli_matrix(a), pauli_matrix(b)
    assert term_of(a).commutes_with(term_of(b)) == np.allclose(ma @ mb, mb @ ma)


def test_multiply_rejects_width_mismatch():
    with pytest.raises(DomainError):
        multiply(PauliTerm.from_label("X0", 1), PauliTerm.from_label("X0", 2))


def test_label_parsing_errors():
    with pytest.raises(ParseError):
        PauliTerm.from_label("Q0", 2)
    with pytest.raises(DomainError):
        PauliTerm.from_label("X5", 2)


def test_text_round_trip():
    op = QubitOperator.parse("0.5 * X0 Z1\n-0.25j * Y2\n1.5 *\n", 3)
    assert QubitOperator.parse(op.to_text(), 3).approx_equal(op)
    assert op.coefficient("Y2") == -0.25j


def test_jw_creation_on_first_mode():
    op = jordan_wigner(FermionOperator.from_label("0^"), 2)
    assert op.coefficient("X0") == 0.5 and op.coefficient("Y0") == -0.5j
    assert len(op) == 2


def test_jw_creation_carries_z_string():
    op = jordan_wigner(FermionOperator.from_label("2^"), 4)
    assert op.coefficient("Z0 Z1 X2") == 0.5
    assert op.coefficient("Z0 Z1 Y2") == -0.5j


def test_jw_number_operator():
    op = jordan_wigner(FermionOperator.from_label("0^ 0"), 1)
    assert op.coefficient("") == 0.5 and op.coefficient("Z0") == -0.5


def test_jw_rejects_out_of_range_mode():
    with pytest.raises(DomainError):
        jordan_wigner(FermionOperator.from_label("4^"), 4)


@pytest.mark.parametrize("mode,dagger", [(0, False), (2, True), (3, False)])
def test_jw_ladder_matches_graded_tensor_product(mode, dagger):
    op = FermionOperator.term([(mode, dagger)])
    assert np.allclose(jordan_wigner(op, 4).to_matrix(), ladder_matrix(mode, dagger, 4))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5))
def test_jw_preserves_anticommutation(i, j):
    op = FermionOperator.from_label(f"{i} {j}^") + FermionOperator.from_label(f"{j}^ {i}")
    mat = jordan_wigner(op, 6).to_matrix()
    expect = np.eye(64) if i == j else np.zeros((64, 64))
    assert np.allclose(mat, expect, atol=1e-12)


@pytest.mark.parametrize("name", ["h2", "heh+", "h2_stretched"])
def test_jw_hamiltonian_is_hermitian(name):
    _, _, qh, _ = load_problem(name)
    assert qh.is_hermitian()


@pytest.mark.parametrize("name", ["h2", "heh+"])
def test_jw_spectrum_matches_fermionic_spectrum(name):
    _, fh, qh, m = load_problem(name)
    ev_q = np.linalg.eigvalsh(qh.to_matrix())
    ev_f = np.linalg.eigvalsh(fermion_matrix(fh, m))
    assert np.max(np.abs(ev_q - ev_f)) < 1e-10


def test_jw_spectrum_three_orbitals_random_operator():
    rng = np.random.default_rng(3)
    op = FermionOperator()
    for _ in range(12):
        p, q, r, s = rng.integers(0, 6, size=4)
        c = rng.normal()
        op = op + FermionOperator.from_label(f"{p}^ {q}", c) + FermionOperator.from_label(f"{q}^ {p}", c)
        t = FermionOperator.from_label(f"{p}^ {q}^ {r} {s}", c)
        op = op + t + t.adjoint()
    op = normal_order(op)
    ev_q = np.linalg.eigvalsh(jordan_wigner(op, 6).to_matrix())
    ev_f = np.linalg.eigvalsh(fermion_matrix(op, 6))
    assert np.max(np.abs(ev_q - ev_f)) < 1e-10


def test_qubit_count_bounds():
    assert qubit_count_bounds(4, 2) == (3, 4)
    assert qubit_count_bounds(4, 0) == (0, 4)
    lower, upper = qubit_count_bounds(88, 52)
    assert lower == math.ceil(math.log2(math.comb(88, 52))) and lower <= upper == 88
    with pytest.raises(DomainError):
        qubit_count_bounds(4, 5)


@given(st.integers(1, 200).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m))))
def test_qubit_lower_bound_is_tight(mn):
    m, n = mn
    lower, _ = qubit_count_bounds(m, n)
    configs = math.comb(m, n)
    assert 2 ** lower >= configs and (lower == 0 or 2 ** (lower - 1) < configs)
