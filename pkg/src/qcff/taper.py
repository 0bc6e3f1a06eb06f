"""Z2 symmetry detection and qubit tapering.

A Pauli string ``(x, z)`` commutes with every term of ``H`` iff it lies in
the kernel of the check matrix whose rows are the terms written as
``(z | x)``.  The kernel is found by GF(2) elimination on Python ints; a
commuting subset is then chosen by symplectic Gram-Schmidt.  Each generator
``tau`` is paired with a qubit ``q`` where it has a Z or Y and all other
generators have I or X; the Clifford ``U = (X_q + tau)/sqrt(2)`` maps ``tau``
to ``X_q``, after which qubit ``q`` is replaced by the sector eigenvalue.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .encoding import PauliTerm, QubitOperator, symplectic_product
from .errors import ContractViolation, DomainError

_SQRT_HALF = 2 ** -0.5


@dataclass(frozen=True)
class SymmetryGenerator:
    """A Pauli string commuting with the Hamiltonian plus a sector eigenvalue."""

    pauli: PauliTerm
    sector: int = 1

    def __post_init__(self):
        if self.sector not in (1, -1):
            raise DomainError("sector eigenvalue must be +1 or -1")
        if self.pauli.coeff != 1:
            object.__setattr__(self, "pauli", self.pauli.with_coeff(1.0))

    def __str__(self):
        return f"{self.pauli.label()} = {self.sector:+d}"


def _rref(rows: List[int], pivot_order: Sequence[int]) -> List[Tuple[int, int]]:
    """Reduced row echelon form; returns ``(pivot_bit, row)`` pairs."""
    out: List[Tuple[int, int]] = []
    rows = [r for r in rows if r]
    for bit in pivot_order:
        mask = 1 << bit
        hit = next((k for k, r in enumerate(rows) if r & mask), None)
        if hit is None:
            continue
        piv = rows.pop(hit)
        rows = [r ^ piv if r & mask else r for r in rows]
        out = [(b, r ^ piv if r & mask else r) for b, r in out]
        out.append((bit, piv))
        rows = [r for r in rows if r]
        if not rows:
            break
    return out


def _kernel(op: QubitOperator) -> List[Tuple[int, int]]:
    """Basis ``(x, z)`` of strings commuting with every term of ``op``."""
    n = op.n_qubits
    # row (z | x) so that popcount(row & (vx | vz << n)) is the symplectic form
    rows = [z | (x << n) for (x, z) in op.terms if x or z]
    pivots = _rref(rows, range(2 * n))
    pivot_bits = {b for b, _ in pivots}
    basis = []
    for free in range(2 * n):
        if free in pivot_bits:
            continue
        v = 1 << free
        for b, r in pivots:
            if r >> free & 1:
                v |= 1 << b
        basis.append((v & ((1 << n) - 1), v >> n))
    return basis


def _commuting_subset(vectors: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Maximal mutually commuting subspace of the span, by symplectic Gram-Schmidt."""
    vecs = list(vectors)
    keep = []
    while vecs:
        v = vecs.pop(0)
        partner = next((k for k, w in enumerate(vecs) if symplectic_product(*v, *w)), None)
        if partner is None:
            keep.append(v)
            continue
        w = vecs.pop(partner)
        fixed = []
        for u in vecs:
            ux, uz = u
            if symplectic_product(*u, *w):
                ux, uz = ux ^ v[0], uz ^ v[1]
            if symplectic_product(ux, uz, *v):
                ux, uz = ux ^ w[0], uz ^ w[1]
            fixed.append((ux, uz))
        vecs = fixed
        keep.append(v)
    return keep


def find_z2_symmetries(H: QubitOperator) -> List[SymmetryGenerator]:
    """Independent, mutually commuting Pauli symmetries of ``H`` (identity excluded).

    Z-type solutions are preferred, so ``H = Z0 Z1`` yields generators
    spanning ``{Z0, Z1}``.  The result is in reduced echelon form with each
    generator owning a distinct pivot qubit usable by :func:`taper`.
    """
    if not H.is_hermitian():
        raise ContractViolation("symmetry search expects a Hermitian operator")
    n = H.n_qubits
    kernel = _kernel(H)
    # Z-only vectors first so that Gram-Schmidt keeps them
    kernel.sort(key=lambda v: (v[0] != 0, v[0], v[1]))
    gens = _commuting_subset(kernel)
    # echelon form over the (z | x) layout: pivots on Z/Y positions when possible
    rows = _rref([z | (x << n) for x, z in gens], range(2 * n))
    out = []
    for _, r in sorted(rows):
        x, z = r >> n, r & ((1 << n) - 1)
        out.append(SymmetryGenerator(PauliTerm(n, x, z)))
    return out


def _pivots(gens: Sequence[SymmetryGenerator]) -> List[Tuple[int, str]]:
    """Qubit and single-qubit Pauli (``X`` or ``Z``) each generator maps onto."""
    chosen = []
    for i, g in enumerate(gens):
        others = [h.pauli for j, h in enumerate(gens) if j != i]
        pick = None
        for q in range(g.pauli.n_qubits):
            if q in (c[0] for c in chosen):
                continue
            # X_q anticommutes with g iff g has Z or Y at q
            if g.pauli.z >> q & 1 and all(not (h.z >> q & 1) for h in others):
                pick = (q, "X")
                break
        if pick is None:
            for q in range(g.pauli.n_qubits):
                if q in (c[0] for c in chosen):
                    continue
                if g.pauli.x >> q & 1 and all(not (h.x >> q & 1) for h in others):
                    pick = (q, "Z")
                    break
        if pick is None:
            raise ContractViolation(f"generator {g.pauli.label()} is not independent")
        chosen.append(pick)
    return chosen


class Tapering:
    """The Clifford frame and qubit removal defined by a generator set.

    Args:
        gens: mutually commuting, independent generators.
        sector: eigenvalue per generator (defaults to their ``sector`` fields).
    """

    def __init__(self, gens: Sequence[SymmetryGenerator], sector: Optional[Sequence[int]] = None):
        self.gens = list(gens)
        if sector is None:
            sector = [g.sector for g in self.gens]
        if len(sector) != len(self.gens):
            raise ContractViolation(f"{len(sector)} sector values for {len(self.gens)} generators")
        if any(s not in (1, -1) for s in sector):
            raise DomainError("sector values must be +1 or -1")
        self.sector = list(sector)
        for a, b in itertools.combinations(self.gens, 2):
            if not a.pauli.commutes_with(b.pauli):
                raise ContractViolation(f"generators {a.pauli.label()} and {b.pauli.label()} anticommute")
        self.n_qubits = self.gens[0].pauli.n_qubits if self.gens else None
        self.pivots = _pivots(self.gens)
        self.removed = sorted(q for q, _ in self.pivots)

    @property
    def width(self) -> int:
        return self.n_qubits - len(self.gens)

    def _clifford(self, n: int) -> QubitOperator:
        u = QubitOperator.identity(n)
        for g, (q, kind) in zip(self.gens, self.pivots):
            single = PauliTerm.from_label(f"{kind}{q}", n)
            ui = QubitOperator(n, {single.key: _SQRT_HALF, g.pauli.key: _SQRT_HALF})
            u = u * ui
        return u

    def rotate(self, op: QubitOperator) -> QubitOperator:
        """``U^dag op U`` (each factor of ``U`` is Hermitian)."""
        if not self.gens:
            return op.copy()
        u = self._clifford(op.n_qubits)
        return (u.adjoint() * op * u)

    def _reduce(self, x: int, z: int) -> Tuple[int, int, int]:
        """Drop pivot qubits from a rotated string; returns ``(x', z', sign)``."""
        sign = 1
        for (q, kind), s in zip(self.pivots, self.sector):
            px, pz = x >> q & 1, z >> q & 1
            if (px, pz) == (0, 0):
                continue
            if (kind == "X" and (px, pz) == (1, 0)) or (kind == "Z" and (px, pz) == (0, 1)):
                sign *= s
            else:
                raise ContractViolation("operator does not commute with the symmetry generators")
        keep = [q for q in range(self.n_qubits) if q not in self.removed]
        nx = nz = 0
        for k, q in enumerate(keep):
            nx |= (x >> q & 1) << k
            nz |= (z >> q & 1) << k
        return nx, nz, sign

    def taper_operator(self, op: QubitOperator) -> QubitOperator:
        if not self.gens:
            return op.copy()
        out = QubitOperator(self.width)
        for (x, z), c in self.rotate(op).terms.items():
            nx, nz, sign = self._reduce(x, z)
            out._add((nx, nz), sign * c)
        return out.prune()

    def taper_term(self, term: PauliTerm) -> Optional[PauliTerm]:
        """Tapered image of one string, or ``None`` if it breaks a symmetry.

        The image of a unit string is a unit string times ``+-1``.
        """
        if not all(term.commutes_with(g.pauli) for g in self.gens):
            return None
        rotated = self.rotate(QubitOperator.from_terms(term.n_qubits, [term]))
        ((x, z), c), = rotated.terms.items()
        nx, nz, sign = self._reduce(x, z)
        return PauliTerm(self.width, nx, nz, sign * c)

    def reduce_state(self, amplitudes: np.ndarray) -> Optional[np.ndarray]:
        """Project a full statevector onto the sector and drop pivot qubits.

        Returns the normalized tapered amplitudes, or ``None`` when the state
        has no weight in the sector.
        """
        if not self.gens:
            return amplitudes.copy()
        n = self.n_qubits
        u = self._clifford(n).adjoint().to_sparse()
        psi = (u @ amplitudes).reshape((2,) * n)
        for (q, kind), s in sorted(zip(self.pivots, self.sector), reverse=True):
            a0 = np.take(psi, 0, axis=q)
            a1 = np.take(psi, 1, axis=q)
            if kind == "X":
                psi = (a0 + s * a1) * _SQRT_HALF
            else:
                psi = a0 if s == 1 else a1
        psi = psi.reshape(-1)
        norm = np.linalg.norm(psi)
        if norm < 1e-12:
            return None
        return psi / norm


def taper(H: QubitOperator, gens: Sequence[SymmetryGenerator], sector: Sequence[int]) -> QubitOperator:
    """Tapered operator on ``H.n_qubits - len(gens)`` qubits for the given sector."""
    for g in gens:
        for t in H:
            if not t.commutes_with(g.pauli):
                raise ContractViolation(f"{g.pauli.label()} does not commute with {t.label()}")
    return Tapering(gens, sector).taper_operator(H)


def all_sectors(n_gens: int):
    return [list(s) for s in itertools.product((1, -1), repeat=n_gens)]


def reference_amplitudes(occupation: Sequence[int]) -> np.ndarray:
    idx = 0
    for b in occupation:
        idx = (idx << 1) | int(bool(b))
    amps = np.zeros(1 << len(occupation), dtype=complex)
    amps[idx] = 1.0
    return amps


def choose_sector(H: QubitOperator, gens: Sequence[SymmetryGenerator],
                  occupation: Sequence[int]) -> Tuple[List[int], float]:
    """Sector minimizing the tapered expectation on the tapered reference.

    Sectors where the reference has no weight are skipped.
    """
    from .sim import StateVector, expectation

    ref = reference_amplitudes(occupation)
    best: Tuple[Optional[List[int]], float] = (None, np.inf)
    for sector in all_sectors(len(gens)):
        tap = Tapering(gens, sector)
        psi = tap.reduce_state(ref)
        if psi is None:
            continue
        energy = expectation(StateVector(psi), tap.taper_operator(H))
        if energy < best[1] - 1e-12:
            best = (sector, energy)
    if best[0] is None:
        raise ContractViolation("reference state has no weight in any sector")
    return best[0], best[1]
