"""Pauli strings in binary symplectic form and the Jordan-Wigner encoding.

A Pauli string on ``n`` qubits is a pair of bitmasks ``(x, z)``; bit ``q`` of
each mask refers to qubit ``q``. The per-qubit pair encodes

    (0, 0) -> I    (1, 0) -> X    (0, 1) -> Z    (1, 1) -> Y

and the string with masks ``(x, z)`` denotes the tensor product of those
single-qubit Hermitian Paulis, i.e. ``i^{|x & z|} X^x Z^z`` (``Y = iXZ``).
Python integers serve as arbitrarily wide packed bitvectors, so GF(2)
arithmetic is plain ``^``/``&`` on ints.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ParseError
from .fermion import FermionOperator

PRUNE_TOL = 1e-14

_I_POWERS = (1, 1j, -1, -1j)
_LABELS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_TOKEN = re.compile(r"^([XYZI])(\d+)$")


def _bits(mask: int) -> int:
    return mask.bit_count()


def symplectic_product(x1: int, z1: int, x2: int, z2: int) -> int:
    """Return 0 if the two strings commute and 1 if they anticommute."""
    return (_bits(x1 & z2) + _bits(z1 & x2)) & 1


def product_phase(x1: int, z1: int, x2: int, z2: int) -> Tuple[int, int, int]:
    """Multiply two unit-coefficient strings.

    Returns ``(x, z, k)`` such that ``P1 P2 = i**k * P(x, z)``.
    """
    x3, z3 = x1 ^ x2, z1 ^ z2
    k = _bits(x1 & z1) + _bits(x2 & z2) - _bits(x3 & z3) + 2 * _bits(z1 & x2)
    return x3, z3, k % 4


@dataclass(frozen=True)
class PauliTerm:
    """A coefficient times a Pauli string on ``n_qubits`` qubits."""

    n_qubits: int
    x: int = 0
    z: int = 0
    coeff: complex = 1.0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if self.x >= limit or self.z >= limit or self.x < 0 or self.z < 0:
            raise ValueError("Pauli masks exceed the qubit count")

    @classmethod
    def from_label(cls, label: str, n_qubits: int, coeff: complex = 1.0) -> "PauliTerm":
        """Build from a sparse label such as ``"X0 Z1 Y4"`` (empty = identity)."""
        x = z = 0
        for tok in label.split():
            m = _TOKEN.match(tok)
            if m is None:
                raise ParseError(f"bad Pauli token {tok!r}")
            kind, q = m.group(1), int(m.group(2))
            if q >= n_qubits:
                raise DomainError(f"qubit {q} out of range for {n_qubits} qubits")
            if kind in "XY":
                x |= 1 << q
            if kind in "ZY":
                z |= 1 << q
        return cls(n_qubits, x, z, coeff)

    @property
    def key(self) -> Tuple[int, int]:
        return (self.x, self.z)

    @property
    def weight(self) -> int:
        return _bits(self.x | self.z)

    @property
    def support(self) -> Tuple[int, ...]:
        mask = self.x | self.z
        return tuple(q for q in range(self.n_qubits) if mask >> q & 1)

    def pauli(self, q: int) -> str:
        return _LABELS[(self.x >> q & 1, self.z >> q & 1)]

    def label(self) -> str:
        return " ".join(f"{self.pauli(q)}{q}" for q in self.support)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def with_coeff(self, coeff: complex) -> "PauliTerm":
        return PauliTerm(self.n_qubits, self.x, self.z, coeff)

    def commutes_with(self, other: "PauliTerm") -> bool:
        return symplectic_product(self.x, self.z, other.x, other.z) == 0

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        return self.with_coeff(self.coeff * other)

    def __rmul__(self, other):
        return self.with_coeff(self.coeff * other)

    def __str__(self):
        return f"{format_coeff(self.coeff)} * {self.label()}".rstrip()

    def to_matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix; qubit 0 is the leftmost tensor factor."""
        return self.coeff * pauli_sparse(self.n_qubits, self.x, self.z).toarray()


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Product ``a * b`` with the exact phase."""
    if a.n_qubits != b.n_qubits:
        raise DomainError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    x, z, k = product_phase(a.x, a.z, b.x, b.z)
    return PauliTerm(a.n_qubits, x, z, a.coeff * b.coeff * _I_POWERS[k])


def format_coeff(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}j"
    return f"({c.real!r}{c.imag:+}j)"


def pauli_action(n_qubits: int, x: int, z: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index map and phases of a unit Pauli string on a statevector.

    Uses the big-endian amplitude layout of :mod:`qcff.sim` (qubit ``q`` is
    bit ``n-1-q`` of the amplitude index).  Returns ``(src, phase)`` with
    ``(P psi)[c] = phase[c] * psi[src[c]]``.
    """
    xr = _reverse_bits(x, n_qubits)
    zr = _reverse_bits(z, n_qubits)
    idx = np.arange(1 << n_qubits, dtype=np.uint64)
    src = idx ^ np.uint64(xr)
    parity = np.bitwise_count(src & np.uint64(zr)) & 1
    phase = _I_POWERS[_bits(x & z) % 4] * (1 - 2 * parity.astype(np.float64))
    return src.astype(np.intp), phase.astype(complex)


def pauli_sparse(n_qubits: int, x: int, z: int) -> sp.csr_matrix:
    src, phase = pauli_action(n_qubits, x, z)
    dim = 1 << n_qubits
    return sp.csr_matrix((phase, (np.arange(dim), src)), shape=(dim, dim))


def _reverse_bits(mask: int, n: int) -> int:
    out = 0
    for q in range(n):
        if mask >> q & 1:
            out |= 1 << (n - 1 - q)
    return out


class QubitOperator:
    """Linear combination of Pauli strings, keyed by ``(x, z)`` masks."""

    def __init__(self, n_qubits: int, terms: Dict[Tuple[int, int], complex] | None = None):
        self.n_qubits = n_qubits
        self.terms: Dict[Tuple[int, int], complex] = {}
        for key, c in (terms or {}).items():
            self._add(key, c)
        self.prune()

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[PauliTerm]) -> "QubitOperator":
        op = cls(n_qubits)
        for t in terms:
            if t.n_qubits != n_qubits:
                raise DomainError("qubit count mismatch")
            op._add(t.key, t.coeff)
        op.prune()
        return op

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "QubitOperator":
        return cls(n_qubits, {(0, 0): coeff})

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "QubitOperator":
        """Inverse of :meth:`to_text`; one ``"c * X0 Z1"`` term per line."""
        op = cls(n_qubits)
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coeff, sep, label = line.partition("*")
            try:
                c = complex(coeff.strip().replace(" ", ""))
            except ValueError:
                raise ParseError(f"bad coefficient {coeff.strip()!r}", lineno) from None
            t = PauliTerm.from_label(label if sep else "", n_qubits, c)
            op._add(t.key, t.coeff)
        op.prune()
        return op

    def _add(self, key, c):
        self.terms[key] = self.terms.get(key, 0.0) + c

    def prune(self, tol: float = PRUNE_TOL) -> "QubitOperator":
        self.terms = {k: complex(c) for k, c in self.terms.items() if abs(c) > tol}
        return self

    def __iter__(self) -> Iterator[PauliTerm]:
        for (x, z), c in sorted(self.terms.items()):
            yield PauliTerm(self.n_qubits, x, z, c)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, label: str) -> complex:
        t = PauliTerm.from_label(label, self.n_qubits)
        return self.terms.get(t.key, 0.0)

    def constant(self) -> complex:
        return self.terms.get((0, 0), 0.0)

    def copy(self) -> "QubitOperator":
        return QubitOperator(self.n_qubits, dict(self.terms))

    def __add__(self, other: "QubitOperator") -> "QubitOperator":
        self._check(other)
        out = self.copy()
        for k, c in other.terms.items():
            out._add(k, c)
        return out.prune()

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, QubitOperator):
            self._check(other)
            out = QubitOperator(self.n_qubits)
            for (x1, z1), c1 in self.terms.items():
                for (x2, z2), c2 in other.terms.items():
                    x, z, k = product_phase(x1, z1, x2, z2)
                    out._add((x, z), c1 * c2 * _I_POWERS[k])
            return out.prune()
        return QubitOperator(self.n_qubits, {k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def _check(self, other):
        if other.n_qubits != self.n_qubits:
            raise DomainError(f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}")

    def adjoint(self) -> "QubitOperator":
        return QubitOperator(self.n_qubits, {k: c.conjugate() for k, c in self.terms.items()})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) < tol for c in self.terms.values())

    def approx_equal(self, other: "QubitOperator", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) < tol for k in keys)

    def to_text(self) -> str:
        return "".join(f"{t}\n" for t in self)

    def __repr__(self):
        return f"QubitOperator(n_qubits={self.n_qubits}, terms={len(self)})"

    def to_sparse(self) -> sp.csr_matrix:
        dim = 1 << self.n_qubits
        mat = sp.csr_matrix((dim, dim), dtype=complex)
        for (x, z), c in self.terms.items():
            mat = mat + c * pauli_sparse(self.n_qubits, x, z)
        return mat.tocsr()

    def to_matrix(self) -> np.ndarray:
        return self.to_sparse().toarray()


class Encoding:
    """Fermion-to-qubit mapping defined by its image of single ladder operators.

    Subclasses implement :meth:`ladder`; products and sums are expanded here.
    """

    name = "abstract"

    def ladder(self, index: int, dagger: bool, n_modes: int) -> QubitOperator:
        raise NotImplementedError

    def transform(self, op: FermionOperator, n_modes: int) -> QubitOperator:
        cache = {}
        out = QubitOperator(n_modes)
        for factors, coeff in op.terms.items():
            term = QubitOperator.identity(n_modes, coeff)
            for idx, dagger in factors:
                if not 0 <= idx < n_modes:
                    raise DomainError(f"mode {idx} out of range for {n_modes} modes")
                if (idx, dagger) not in cache:
                    cache[idx, dagger] = self.ladder(idx, dagger, n_modes)
                term = term * cache[idx, dagger]
            for k, c in term.terms.items():
                out._add(k, c)
        return out.prune()


class JordanWigner(Encoding):
    name = "jordan-wigner"

    def ladder(self, index, dagger, n_modes):
        ladder_z = (1 << index) - 1
        bit = 1 << index
        # a_i -> Z...Z (X + iY)/2, a_i^dag -> Z...Z (X - iY)/2
        return QubitOperator(n_modes, {
            (bit, ladder_z): 0.5,
            (bit, ladder_z | bit): -0.5j if dagger else 0.5j,
        })


JW = JordanWigner()


def jordan_wigner(op: FermionOperator, n_modes: int) -> QubitOperator:
    """Map a fermionic operator on ``n_modes`` spin orbitals to qubits."""
    return JW.transform(op, n_modes)


def qubit_count_bounds(n_modes: int, n_electrons: int) -> Tuple[int, int]:
    """Information-theoretic qubit bounds for ``n_electrons`` in ``n_modes`` modes.

    The lower bound is the smallest ``Q`` with ``C(M, n) <= 2^Q``, computed
    with exact integers; the upper bound is one qubit per mode.
    """
    if not 0 <= n_electrons <= n_modes:
        raise DomainError(f"need 0 <= n <= M, got n={n_electrons}, M={n_modes}")
    configs = math.comb(n_modes, n_electrons)
    return (configs - 1).bit_length(), n_modes
