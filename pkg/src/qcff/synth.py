"""Circuits for exponentiated Pauli strings, gate counting and depth.

Angle convention shared with :mod:`qcff.sim`: ``RZ(phi) = diag(e^{-i phi/2},
e^{i phi/2})``, so ``exp(i theta Z) = RZ(-2 theta)``.  A string
exponential ``exp(i theta P)`` is built from a basis change (``H`` for X,
``Y_basis_dg`` for Y), a CNOT ladder onto the highest active qubit, one RZ,
and the mirror image.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .encoding import PauliTerm
from .errors import DomainError, ParseError

_S2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    # basis change taking Z to Y: Y_basis Z Y_basis^dag = Y
    "Y_basis": np.array([[1, 1j], [1j, 1]], dtype=complex) * _S2,
    "Y_basis_dg": np.array([[1, -1j], [-1j, 1]], dtype=complex) * _S2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
ONE_QUBIT = frozenset(_FIXED) | {"RZ"}
GATE_KINDS = ONE_QUBIT | {"CNOT"}


@dataclass(frozen=True)
class Gate:
    """A gate on explicit qubits; ``CNOT`` qubits are ``(control, target)``."""

    kind: str
    qubits: Tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise DomainError(f"unknown gate {self.kind!r}")
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.qubits) != arity:
            raise DomainError(f"{self.kind} acts on {arity} qubit(s)")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise DomainError("CNOT control equals target")
        if (self.kind == "RZ") != (self.angle is not None):
            raise DomainError("only RZ carries an angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind == "CNOT"

    def __str__(self):
        qs = " ".join(str(q) for q in self.qubits)
        return f"RZ {qs} {self.angle!r}" if self.kind == "RZ" else f"{self.kind} {qs}"


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 matrix of a one-qubit gate."""
    if g.kind == "RZ":
        return np.diag([np.exp(-0.5j * g.angle), np.exp(0.5j * g.angle)])
    if g.kind == "CNOT":
        raise DomainError("gate_matrix covers one-qubit gates only")
    return _FIXED[g.kind]


class Circuit:
    """Ordered gate list on ``width`` qubits."""

    def __init__(self, width: int, gates: Iterable[Gate] = ()):
        self.width = width
        self.gates: List[Gate] = []
        self.extend(gates)

    def append(self, g: Gate):
        if any(not 0 <= q < self.width for q in g.qubits):
            raise DomainError(f"gate {g} outside width {self.width}")
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]):
        for g in gates:
            self.append(g)

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise DomainError("circuit widths differ")
        return Circuit(self.width, self.gates + other.gates)

    def two_qubit_count(self) -> int:
        return sum(g.is_two_qubit for g in self.gates)

    def depth(self, two_qubit_only: bool = False) -> int:
        return schedule_depth(self, two_qubit_only)

    def to_netlist(self) -> str:
        """One gate per line after a ``qubits N`` header."""
        return f"qubits {self.width}\n" + "".join(f"{g}\n" for g in self.gates)

    @classmethod
    def from_netlist(cls, text: str) -> "Circuit":
        lines = [(n, ln.split()) for n, ln in enumerate(text.splitlines(), 1) if ln.strip()]
        if not lines or lines[0][1][0] != "qubits" or len(lines[0][1]) != 2:
            raise ParseError("netlist must start with 'qubits N'", 1)
        circ = cls(int(lines[0][1][1]))
        for lineno, parts in lines[1:]:
            try:
                if parts[0] == "RZ":
                    gate = Gate("RZ", (int(parts[1]),), float(parts[2]))
                else:
                    gate = Gate(parts[0], tuple(int(p) for p in parts[1:]))
                circ.append(gate)
            except (ValueError, IndexError, DomainError) as exc:
                raise ParseError(str(exc) or "bad gate line", lineno) from None
        return circ

    def to_matrix(self) -> np.ndarray:
        """Dense unitary (small widths only)."""
        from .sim import StateVector, apply_circuit

        dim = 1 << self.width
        cols = [apply_circuit(StateVector(np.eye(dim, dtype=complex)[:, j]), self).amplitudes
                for j in range(dim)]
        return np.stack(cols, axis=1)


def _ladder(term: PauliTerm, support: Sequence[int], angle: float) -> List[Gate]:
    pre, post = [], []
    for q in support:
        p = term.pauli(q)
        if p == "X":
            pre.append(Gate("H", (q,)))
            post.append(Gate("H", (q,)))
        elif p == "Y":
            pre.append(Gate("Y_basis_dg", (q,)))
            post.append(Gate("Y_basis", (q,)))
    chain = [Gate("CNOT", (a, b)) for a, b in zip(support, support[1:])]
    return pre + chain + [Gate("RZ", (support[-1],), -2.0 * angle)] + chain[::-1] + post


def synthesize_pauli_exp(term: PauliTerm, angle: float) -> Circuit:
    """Circuit for ``exp(i * angle * P)`` with ``P`` the unit string of ``term``.

    The coefficient of ``term`` is ignored.  Uses exactly ``2(w-1)`` CNOTs
    for a weight-``w`` string.

    Raises:
        DomainError: for the identity string (a global phase has no circuit).
    """
    if term.is_identity():
        raise DomainError("identity string has no circuit; fold it into the global phase")
    return Circuit(term.n_qubits, _ladder(term, term.support, angle))


def synthesize_rotations(n_qubits: int, rotations: Iterable[Tuple[PauliTerm, float]]) -> Circuit:
    circ = Circuit(n_qubits)
    for term, angle in rotations:
        if not term.is_identity():
            circ.extend(synthesize_pauli_exp(term, angle).gates)
    return circ


def schedule_depth(circuit: Circuit, two_qubit_only: bool = False) -> int:
    """ASAP layer count.

    Each gate lands one layer after the latest gate sharing any of its
    qubits.  With ``two_qubit_only`` single-qubit gates are ignored.
    """
    ready = [0] * circuit.width
    depth = 0
    for g in circuit.gates:
        if two_qubit_only and not g.is_two_qubit:
            continue
        layer = 1 + max(ready[q] for q in g.qubits)
        for q in g.qubits:
            ready[q] = layer
        depth = max(depth, layer)
    return depth


# ---------------------------------------------------------------- gate counts

def _term_cnots(term: PauliTerm, indices: Sequence[int], mode: str) -> int:
    if mode == "naive":
        w = term.weight
    elif mode == "optimized":
        w = sum(1 for q in set(indices) if (term.x | term.z) >> q & 1)
    else:
        raise DomainError(f"unknown counting mode {mode!r}")
    return 2 * (w - 1)


def count_two_qubit_gates(spec, n_qubits: int, n_electrons: int, mode: str = "naive") -> int:
    """CNOTs of the Trotterized ansatz by explicit enumeration.

    ``naive`` counts the full string weight including Jordan-Wigner ladders;
    ``optimized`` counts only the excitation qubits, modelling ladder
    cancellation between neighbouring strings.  Each generator is weighted
    by its multiplicity.
    """
    if spec.n_qubits != n_qubits or spec.n_electrons != n_electrons:
        raise DomainError("ansatz was built for a different (M, eta)")
    total = 0
    for g in spec.generators:
        per = sum(_term_cnots(t, g.indices, mode) for t, _ in g.pauli_strings(n_qubits))
        total += g.multiplicity * per
    return total


def uccsd_gate_count(n_qubits: int, n_electrons: int, mode: str = "naive") -> int:
    """Closed form of :func:`count_two_qubit_gates` for UCCSD.

    With occupied orbitals first, a double ``(i<j -> a<b)`` has 8 strings of
    weight ``4 + (j-i-1) + (b-a-1)`` and a single ``i -> a`` has 2 strings
    of weight ``a-i+1``.
    """
    n_o, n_v = n_electrons, n_qubits - n_electrons
    if not 0 < n_o < n_qubits:
        raise DomainError(f"need 0 < eta < M, got eta={n_o}, M={n_qubits}")
    if mode == "optimized":
        return 4 * n_o * n_v + 48 * math.comb(n_o, 2) * math.comb(n_v, 2)
    if mode != "naive":
        raise DomainError(f"unknown counting mode {mode!r}")
    doubles = 16 * (math.comb(n_o, 2) * math.comb(n_v, 2)
                    + math.comb(n_v, 2) * math.comb(n_o + 1, 3)
                    + math.comb(n_o, 2) * math.comb(n_v + 1, 3))
    # sum over i < a of (a - i) with i occupied and a virtual
    singles = 4 * (n_o * n_v * (n_v + 1) // 2 + n_v * n_o * (n_o - 1) // 2)
    return doubles + singles


def kupccgsd_gate_count(n_qubits: int, k: int = 1, mode: str = "naive") -> int:
    """Closed form for k-UpCCGSD.

    Paired doubles carry no Jordan-Wigner ladder (the two ladders inside each
    alpha/beta pair cancel), so they cost ``8 * 6`` CNOTs per ordered pair in
    either mode.  Same-spin singles ``p -> q`` cost ``8 (q - p)`` naive and
    ``4`` optimized per spin.
    """
    if n_qubits % 2:
        raise DomainError("k-UpCCGSD needs an even number of spin orbitals")
    n = n_qubits // 2
    doubles = 48 * n * (n - 1)
    if mode == "naive":
        singles = 16 * math.comb(n + 1, 3)
    elif mode == "optimized":
        singles = 8 * math.comb(n, 2)
    else:
        raise DomainError(f"unknown counting mode {mode!r}")
    return k * (doubles + singles)


# ---------------------------------------------------------------- nesting and depth

def _pair_groups(n_qubits: int) -> List[List[Tuple[int, int]]]:
    n = n_qubits // 2
    groups: Dict[int, List[Tuple[int, int]]] = {}
    for q, p in combinations(range(1, n + 1), 2):
        groups.setdefault(p + q, []).append((p, q))
    return [sorted(groups[s], reverse=True) for s in sorted(groups)]


def nesting_partition(n_qubits: int) -> List[List[Tuple[int, int]]]:
    """Group spatial pairs ``(p, q)``, ``p > q``, 1-based, by the sum ``p + q``.

    Pairs inside one group are mutually nested and act on disjoint orbitals,
    so their paired-double circuits can run concurrently.  Groups are
    returned in increasing order of ``p + q``.
    """
    if n_qubits % 2 or n_qubits < 8:
        raise DomainError(f"nesting partition needs even M >= 8, got {n_qubits}")
    return _pair_groups(n_qubits)


def _block_profile(circuit: Circuit) -> Tuple[np.ndarray, np.ndarray]:
    """Max-plus summary of a block circuit on its local wires.

    Returns ``(dep, base)``: ``dep[i, j]`` is the longest gate path from the
    entry of wire ``j`` to the exit of wire ``i`` (``-inf`` if unconnected)
    and ``base[i]`` the exit layer when every wire enters at time 0.
    """
    w = circuit.width
    dep = np.full((w, w), -np.inf)
    for j in range(w):
        ready = np.full(w, -np.inf)
        ready[j] = 0
        for g in circuit.gates:
            lay = 1 + max(ready[q] for q in g.qubits)
            for q in g.qubits:
                ready[q] = lay
        dep[:, j] = ready
    base = np.zeros(w)
    for g in circuit.gates:
        lay = 1 + max(base[q] for q in g.qubits)
        for q in g.qubits:
            base[q] = lay
    return dep, base


def _relabel(circuit: Circuit, mapping: Dict[int, int], width: int) -> Circuit:
    return Circuit(width, [Gate(g.kind, tuple(mapping[q] for q in g.qubits), g.angle)
                           for g in circuit.gates])


def kupccgsd_block() -> Circuit:
    """Circuit for one spatial pair of a k-UpCCGSD repetition on wires 0..3.

    Wires are ``(2q, 2q+1, 2p, 2p+1)`` of the pair ``p > q``.  The block holds
    the paired double for both orderings followed by the alpha and beta
    singles; singles use their excitation qubits only (ladder-cancelled
    form, matching the optimized count).  Angles are placeholders.
    """
    from .ansatz import PAIRED_DOUBLE, SINGLE, ExcitationGenerator

    block = Circuit(4)
    pd = ExcitationGenerator(PAIRED_DOUBLE, (0, 1, 2, 3), 0)
    for _ in range(2):
        for term, _b in pd.pauli_strings(4):
            block.extend(synthesize_pauli_exp(term, 0.1).gates)
    for i, a in ((0, 2), (1, 3)):
        keep = 1 << i | 1 << a
        for term, _b in ExcitationGenerator(SINGLE, (i, a), 0).pauli_strings(4):
            local = PauliTerm(4, term.x & keep, term.z & keep)
            block.extend(synthesize_pauli_exp(local, 0.1).gates)
    return block


def _group_wires(n_qubits: int) -> List[np.ndarray]:
    """Per nesting group, the 4 wires of each pair (same order as the partition)."""
    n = n_qubits // 2
    out = []
    for total in range(3, 2 * n):
        q = np.arange(max(1, total - n), (total + 1) // 2)
        p = total - q
        lo, hi = 2 * (q - 1), 2 * (p - 1)
        out.append(np.stack([lo, lo + 1, hi, hi + 1], axis=1))
    return out


@lru_cache(maxsize=2)
def _kupccgsd_profile(two_qubit_only: bool):
    block = kupccgsd_block()
    if two_qubit_only:
        block = Circuit(4, [g for g in block.gates if g.is_two_qubit])
    return _block_profile(block)


def build_kupccgsd_circuit(n_qubits: int) -> Circuit:
    """One materialized repetition in nesting-group order (small M)."""
    block = kupccgsd_block()
    circ = Circuit(n_qubits)
    for wires in _group_wires(n_qubits):
        for row in wires:
            circ.extend(_relabel(block, dict(enumerate(row.tolist())), n_qubits).gates)
    return circ


def estimate_kupccgsd_depth(n_qubits: int, k: int = 1, two_qubit_only: bool = False) -> int:
    """Depth of ``k`` sequential k-UpCCGSD repetitions under ASAP scheduling.

    Nesting groups run one after another; the pairs inside a group act on
    disjoint qubits and run concurrently.  For one repetition the result
    equals ``schedule_depth(build_kupccgsd_circuit(M))``, but it is computed
    group by group with a max-plus profile of the per-pair block, so ``M``
    in the thousands is cheap.
    """
    if n_qubits % 2 or n_qubits < 2:
        raise DomainError("k-UpCCGSD needs an even number of spin orbitals")
    if k < 1:
        raise DomainError("k must be >= 1")
    dep, base = _kupccgsd_profile(two_qubit_only)
    ready = np.zeros(n_qubits)
    for wires in _group_wires(n_qubits):
        entry = ready[wires]  # (pairs, 4)
        ready[wires] = np.maximum((entry[:, None, :] + dep[None, :, :]).max(axis=2), base)
    return k * int(ready.max())
