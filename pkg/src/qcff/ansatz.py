"""UCCSD and k-UpCCGSD generator lists and their first-order Trotterization.

Each generator ``G = T - T^dag`` is anti-Hermitian, so its Jordan-Wigner
image is ``sum_s i b_s P_s`` with real ``b_s``.  The strings of one generator
mutually commute, hence ``exp(t G) = prod_s exp(i t b_s P_s)`` exactly and
the only Trotter error comes from splitting different generators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .encoding import PauliTerm, jordan_wigner
from .errors import ContractViolation, DomainError
from .fermion import FermionOperator, normal_order

SINGLE = "single"
DOUBLE = "double"
PAIRED_DOUBLE = "paired_double"


@dataclass(frozen=True)
class ExcitationGenerator:
    """One excitation ``T`` (from occupied-like to virtual-like indices).

    Attributes:
        kind: ``single``, ``double`` or ``paired_double``.
        indices: spin-orbital indices ``(i, a)`` or ``(i, j, a, b)``; paired
            doubles store the expanded ``(2p, 2p+1, 2q, 2q+1)``.
        param: parameter slot.
        multiplicity: how many Trotter terms this generator stands for when
            counting gates.  Paired doubles are counted over ordered spatial
            pairs, so each unordered pair has multiplicity 2.
    """

    kind: str
    indices: Tuple[int, ...]
    param: int
    multiplicity: int = 1

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise DomainError(f"repeated index in {self.indices}")
        expected = 2 if self.kind == SINGLE else 4
        if len(self.indices) != expected:
            raise DomainError(f"{self.kind} needs {expected} indices")

    def excitation(self) -> FermionOperator:
        if self.kind == SINGLE:
            i, a = self.indices
            return FermionOperator.term([(a, True), (i, False)])
        i, j, a, b = self.indices
        return FermionOperator.term([(a, True), (b, True), (j, False), (i, False)])

    def operator(self) -> FermionOperator:
        """``T - T^dag`` in canonical form."""
        t = self.excitation()
        return normal_order(t - t.adjoint())

    def pauli_strings(self, n_qubits: int) -> Tuple[Tuple[PauliTerm, float], ...]:
        """``(unit string, b_s)`` pairs with ``JW(G) = sum_s i b_s P_s``."""
        return _strings(self.kind, self.indices, n_qubits)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "param": self.param,
                "multiplicity": self.multiplicity}


@lru_cache(maxsize=None)
def _strings(kind, indices, n_qubits):
    gen = ExcitationGenerator(kind, indices, 0)
    qop = jordan_wigner(gen.operator(), n_qubits)
    out = []
    for term in qop:
        c = complex(term.coeff)
        if abs(c.real) > 1e-12:
            raise ContractViolation("generator image is not anti-Hermitian")
        out.append((term.with_coeff(1.0), c.imag))
    return tuple(out)


@dataclass
class AnsatzSpec:
    """Ordered generators plus the reference determinant.

    ``generators`` lists one repetition block per ``k``; parameter slots are
    dense ``0..n_params-1`` across blocks.
    """

    kind: str
    n_qubits: int
    n_electrons: int
    generators: List[ExcitationGenerator]
    k: int = 1
    reference: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.reference:
            self.reference = tuple(int(q < self.n_electrons) for q in range(self.n_qubits))
        slots = sorted({g.param for g in self.generators})
        if slots != list(range(len(slots))):
            raise ContractViolation("parameter slots are not dense")

    @property
    def n_params(self) -> int:
        return len({g.param for g in self.generators})

    def count(self, kind: str) -> int:
        return sum(1 for g in self.generators if g.kind == kind)

    def term_count(self, kind: str) -> int:
        """Trotter terms of ``kind`` including multiplicities."""
        return sum(g.multiplicity for g in self.generators if g.kind == kind)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_qubits": self.n_qubits,
            "n_electrons": self.n_electrons,
            "k": self.k,
            "n_params": self.n_params,
            "reference": list(self.reference),
            "generators": [g.to_dict() for g in self.generators],
        }


def build_uccsd(n_qubits: int, n_electrons: int) -> AnsatzSpec:
    """UCCSD over all occupied -> virtual spin-orbital excitations.

    Doubles come first, then singles, each in lexicographic index order.
    """
    if not 0 < n_electrons < n_qubits:
        raise DomainError(f"UCCSD needs 0 < eta < M, got eta={n_electrons}, M={n_qubits}")
    occ = range(n_electrons)
    virt = range(n_electrons, n_qubits)
    gens: List[ExcitationGenerator] = []
    for i, j in combinations(occ, 2):
        for a, b in combinations(virt, 2):
            gens.append(ExcitationGenerator(DOUBLE, (i, j, a, b), len(gens)))
    for i in occ:
        for a in virt:
            gens.append(ExcitationGenerator(SINGLE, (i, a), len(gens)))
    return AnsatzSpec("uccsd", n_qubits, n_electrons, gens)


def uccsd_param_count(n_qubits: int, n_electrons: int) -> int:
    n_v = n_qubits - n_electrons
    return n_electrons * n_v + math.comb(n_electrons, 2) * math.comb(n_v, 2)


def build_kupccgsd(n_qubits: int, k: int = 1, n_electrons: int | None = None) -> AnsatzSpec:
    """k repetitions of paired doubles followed by spin-conserving generalized singles.

    Args:
        n_qubits: spin-orbital count ``M`` (even).
        k: number of independent repetition blocks.
        n_electrons: reference filling; defaults to half filling.
    """
    if n_qubits % 2 or n_qubits < 2:
        raise DomainError(f"k-UpCCGSD needs an even number of spin orbitals, got {n_qubits}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    n_electrons = n_qubits // 2 if n_electrons is None else n_electrons
    if not 0 < n_electrons < n_qubits:
        raise DomainError(f"need 0 < eta < M, got eta={n_electrons}")
    n_spatial = n_qubits // 2
    gens: List[ExcitationGenerator] = []
    slot = 0
    for _ in range(k):
        for p, q in combinations(range(n_spatial), 2):
            gens.append(ExcitationGenerator(
                PAIRED_DOUBLE, (2 * p, 2 * p + 1, 2 * q, 2 * q + 1), slot, multiplicity=2))
            slot += 1
        for p, q in combinations(range(n_qubits), 2):
            if (p - q) % 2 == 0:
                gens.append(ExcitationGenerator(SINGLE, (p, q), slot))
                slot += 1
    return AnsatzSpec("kupccgsd", n_qubits, n_electrons, gens, k=k)


def generator_matrix(spec: AnsatzSpec, params: Sequence[float]) -> np.ndarray:
    """Dense ``sum_g t_g JW(G_g)``; intended for small oracle checks."""
    _check_params(spec, params)
    dim = 1 << spec.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for g in spec.generators:
        for term, b in g.pauli_strings(spec.n_qubits):
            out += 1j * b * params[g.param] * term.to_matrix()
    return out


def _check_params(spec, params):
    if len(params) != spec.n_params:
        raise ContractViolation(f"expected {spec.n_params} parameters, got {len(params)}")


def trotterize(spec: AnsatzSpec, params: Sequence[float]) -> List[Tuple[PauliTerm, float]]:
    """First-order, single-step product of string exponentials.

    Returns ``(P, theta)`` pairs meaning ``exp(i theta P)``, applied in list
    order.  Generator order is preserved and strings inside a generator are
    emitted in sorted ``(x, z)`` order.
    """
    _check_params(spec, params)
    out = []
    for g in spec.generators:
        t = float(params[g.param])
        for term, b in g.pauli_strings(spec.n_qubits):
            out.append((term, t * b))
    return out


class TrotterTable:
    """Precomputed strings of an ansatz for fast repeated Trotterization.

    ``angles(params)`` returns the angle of every string as one array.
    """

    def __init__(self, spec: AnsatzSpec):
        self.spec = spec
        self.terms: List[PauliTerm] = []
        slots, weights = [], []
        for g in spec.generators:
            for term, b in g.pauli_strings(spec.n_qubits):
                self.terms.append(term)
                slots.append(g.param)
                weights.append(b)
        self.slots = np.array(slots, dtype=int)
        self.weights = np.array(weights, dtype=float)

    def angles(self, params: Sequence[float]) -> np.ndarray:
        _check_params(self.spec, params)
        return np.asarray(params, dtype=float)[self.slots] * self.weights

    def rotations(self, params: Sequence[float]) -> List[Tuple[PauliTerm, float]]:
        return list(zip(self.terms, self.angles(params).tolist()))


def summary(spec: AnsatzSpec) -> Dict[str, int]:
    out = {"n_params": spec.n_params, "k": spec.k}
    for kind in (SINGLE, DOUBLE, PAIRED_DOUBLE):
        if spec.count(kind):
            out[f"{kind}_generators"] = spec.count(kind)
            out[f"{kind}_terms"] = spec.term_count(kind)
    return out
