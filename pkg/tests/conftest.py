"""Shared fixtures and independent dense oracles for the test suite."""
import json
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"
CHEMICAL_ACCURACY = 1.6e-3
FIXTURES = ("h2", "h2_stretched", "heh+", "lih", "h4_chain", "h2o")

# acceptance verdict lines keyed by criterion number
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])


@lru_cache(maxsize=None)
def reference_energies():
    return json.loads((DATA / "reference_energies.json").read_text())


def fixture_path(name):
    return DATA / f"{name}.fcidump"


@lru_cache(maxsize=None)
def load_problem(name, n_core=0):
    """(integrals, fermion H, JW qubit H, n_modes) for a fixture molecule."""
    from qcff.chemio import active_space_reduce, read_integral_file
    from qcff.encoding import jordan_wigner
    from qcff.fermion import build_hamiltonian

    ints = read_integral_file(fixture_path(name))
    if n_core:
        ints = active_space_reduce(ints, n_core)
    fh = build_hamiltonian(ints)
    m = 2 * ints.n_orbitals
    return ints, fh, jordan_wigner(fh, m), m


# ----------------------------------------------------------------------------
# Dense oracles written independently of the package internals.

_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|: removes a particle
_Z = np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": _I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": _Z,
}


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def ladder_matrix(mode, dagger, n_modes):
    """Annihilation/creation operator as a graded tensor product (mode 0 leftmost)."""
    op = _SIGMA_MINUS.conj().T if dagger else _SIGMA_MINUS
    return kron_all([_Z] * mode + [op] + [_I2] * (n_modes - mode - 1))


def fermion_matrix(op, n_modes):
    dim = 1 << n_modes
    out = np.zeros((dim, dim), dtype=complex)
    for factors, c in op.terms.items():
        m = np.eye(dim, dtype=complex)
        for mode, dagger in factors:
            m = m @ ladder_matrix(mode, dagger, n_modes)
        out += c * m
    return out


def pauli_matrix(label_by_qubit):
    """Dense matrix of a string given as a list of 'I'/'X'/'Y'/'Z' per qubit."""
    return kron_all([PAULI[p] for p in label_by_qubit])


def random_pauli_label(rng, n, max_weight=None):
    while True:
        label = [rng.choice(list("IXYZ")) for _ in range(n)]
        w = sum(p != "I" for p in label)
        if w and (max_weight is None or w <= max_weight):
            return label


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_HEADER = " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"

# (name, text, expected error class name, line number expected in the message or None)
MALFORMED_FCIDUMP = (
    ("empty file", "", "ParseError", None),
    ("missing header", "0.5 1 1 1 1\n", "ParseError", 1),
    ("unterminated header", " &FCI NORB=2,NELEC=2,\n0.5 1 1 1 1\n", "ParseError", 1),
    ("missing NELEC", " &FCI NORB=2,MS2=0,\n &END\n0.5 0 0 0 0\n", "ParseError", 1),
    ("too few fields", _HEADER + "0.5 1 1 1 1\n0.25 1 1\n", "ParseError", 6),
    ("non-numeric value", _HEADER + "abc 1 1 1 1\n", "ParseError", 5),
    ("index out of range", _HEADER + "0.5 3 1 1 1\n", "ParseError", 5),
    ("invalid index pattern", _HEADER + "0.5 1 0 1 0\n", "ParseError", 5),
    ("conflicting duplicate", _HEADER + "0.5 1 2 1 2\n0.6 2 1 2 1\n", "IntegrityError", 6),
    ("too many electrons", " &FCI NORB=2,NELEC=5,MS2=1,\n &END\n0.5 0 0 0 0\n", "DomainError", None),
)
