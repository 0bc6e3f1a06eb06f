"""Dense statevector simulation.

Amplitudes are stored big-endian: qubit 0 is the most significant bit of the
basis index, so ``|q0 q1 ... q_{n-1}>`` reads left to right.
"""
from __future__ import annotations

import os
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np

from .encoding import PauliTerm, QubitOperator, pauli_action
from .errors import CapacityError, ContractViolation, DomainError
from .synth import Circuit, gate_matrix

DEFAULT_MAX_QUBITS = 24
HERMITIAN_TOL = 1e-10


def max_qubits() -> int:
    """Simulator width cap; ``QCFF_MAX_QUBITS`` overrides the default of 24."""
    return int(os.environ.get("QCFF_MAX_QUBITS", DEFAULT_MAX_QUBITS))


class StateVector:
    """``2**n`` complex amplitudes of an ``n``-qubit pure state."""

    def __init__(self, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        n = amplitudes.size.bit_length() - 1
        if amplitudes.ndim != 1 or amplitudes.size != 1 << n:
            raise DomainError("amplitude count must be a power of two")
        self.amplitudes = amplitudes
        self.n_qubits = n

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return prepare_reference([0] * n_qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probability(self, bits: Sequence[int]) -> float:
        return float(abs(self.amplitudes[_index(bits)]) ** 2)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def _index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(bool(b))
    return idx


def prepare_reference(occupation: Sequence[int]) -> StateVector:
    """Computational basis state with qubit ``q`` set iff ``occupation[q]``."""
    n = len(occupation)
    if n > max_qubits():
        raise CapacityError(f"{n} qubits exceeds the simulator cap of {max_qubits()}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[_index(occupation)] = 1.0
    return StateVector(amps)


def _apply_1q(psi: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    view = psi.reshape(1 << q, 2, 1 << (n - q - 1))
    return np.einsum("ab,ibj->iaj", u, view).reshape(-1)


def _apply_cnot(psi: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    view = psi.reshape((2,) * n)
    a = [slice(None)] * n
    b = [slice(None)] * n
    a[control] = b[control] = 1
    a[target], b[target] = 0, 1
    a, b = tuple(a), tuple(b)
    tmp = view[a].copy()
    view[a] = view[b]
    view[b] = tmp
    return psi


def apply_circuit(state: StateVector, circuit: Circuit, inplace: bool = False) -> StateVector:
    """Apply the gates of ``circuit`` in order.

    With ``inplace=True`` the input buffer is reused and the input object is
    returned updated.
    """
    if circuit.width != state.n_qubits:
        raise ContractViolation(f"circuit width {circuit.width} != state width {state.n_qubits}")
    out = state if inplace else state.copy()
    psi, n = out.amplitudes, out.n_qubits
    for g in circuit.gates:
        if g.kind == "CNOT":
            psi = _apply_cnot(psi, n, *g.qubits)
        else:
            psi = _apply_1q(psi, n, g.qubits[0], gate_matrix(g))
    out.amplitudes[...] = psi
    return out


@lru_cache(maxsize=65536)
def _action(n: int, x: int, z: int) -> Tuple[np.ndarray, np.ndarray]:
    return pauli_action(n, x, z)


def apply_pauli(state: StateVector, term: PauliTerm) -> np.ndarray:
    """Amplitudes of ``P |psi>`` for a Pauli term (coefficient included)."""
    src, phase = _action(state.n_qubits, term.x, term.z)
    return term.coeff * phase * state.amplitudes[src]


def apply_pauli_rotation(state: StateVector, term: PauliTerm, angle: float) -> StateVector:
    """In place ``|psi> <- exp(i * angle * P) |psi>`` for a unit-coefficient string.

    Equal to running the circuit from :func:`qcff.synth.synthesize_pauli_exp`
    but without materializing gates.
    """
    if angle == 0.0 or term.is_identity():
        if term.is_identity():
            state.amplitudes *= np.exp(1j * angle)
        return state
    src, phase = _action(state.n_qubits, term.x, term.z)
    psi = state.amplitudes
    state.amplitudes = np.cos(angle) * psi + (1j * np.sin(angle)) * phase * psi[src]
    return state


def apply_rotations(state: StateVector, rotations: Iterable[Tuple[PauliTerm, float]]) -> StateVector:
    out = state.copy()
    for term, angle in rotations:
        apply_pauli_rotation(out, term, angle)
    return out


def expectation(state: StateVector, op: QubitOperator) -> float:
    """Exact ``<psi|H|psi>`` summed term by term.

    Raises:
        ContractViolation: width mismatch or a non-Hermitian operator.
    """
    if op.n_qubits != state.n_qubits:
        raise ContractViolation(f"operator width {op.n_qubits} != state width {state.n_qubits}")
    if not op.is_hermitian(HERMITIAN_TOL):
        raise ContractViolation("expectation requires a Hermitian operator")
    psi = state.amplitudes
    total = 0.0 + 0.0j
    for (x, z), c in op.terms.items():
        if x == 0 and z == 0:
            # states are normalized, so the identity term is its coefficient
            total += c
            continue
        src, phase = _action(state.n_qubits, x, z)
        total += c * np.vdot(psi, phase * psi[src])
    if abs(total.imag) > HERMITIAN_TOL:
        raise ContractViolation(f"expectation has imaginary part {total.imag:.3e}")
    return float(total.real)


class SparseEnergy:
    """Cached sparse-matrix evaluator of ``<psi|H|psi>`` for repeated calls."""

    def __init__(self, op: QubitOperator):
        if not op.is_hermitian(HERMITIAN_TOL):
            raise ContractViolation("energy evaluator requires a Hermitian operator")
        self.n_qubits = op.n_qubits
        self.matrix = op.to_sparse()

    def __call__(self, state: StateVector) -> float:
        psi = state.amplitudes
        return float(np.vdot(psi, self.matrix @ psi).real)
