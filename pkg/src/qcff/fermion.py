"""Second-quantized fermionic operators.

Spin orbitals are interleaved: spatial orbital ``p`` owns spin orbitals
``2p`` (alpha) and ``2p + 1`` (beta).

A term is a tuple of ``(mode, dagger)`` factors read left to right, so
``((1, True), (0, False))`` is ``a+_1 a_0``.  The canonical (normal-ordered)
form places creation operators first in descending mode order, followed by
annihilation operators in ascending order; under this convention the adjoint
of a canonical term is again canonical.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, DomainError

PRUNE_TOL = 1e-14

Factor = Tuple[int, bool]
Term = Tuple[Factor, ...]


class FermionOperator:
    """Sum of coefficient-weighted products of ladder operators."""

    def __init__(self, terms: Optional[Dict[Term, complex]] = None):
        self.terms: Dict[Term, complex] = {}
        for factors, c in (terms or {}).items():
            self._add(tuple((int(i), bool(d)) for i, d in factors), c)
        self.prune()

    @classmethod
    def term(cls, factors: Iterable[Factor], coeff: complex = 1.0) -> "FermionOperator":
        return cls({tuple(factors): coeff})

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "FermionOperator":
        """Parse ``"3^ 1^ 0 2"`` (caret = creation); empty string is identity."""
        factors = []
        for tok in label.split():
            dagger = tok.endswith("^")
            factors.append((int(tok.rstrip("^")), dagger))
        return cls.term(factors, coeff)

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "FermionOperator":
        return cls({(): coeff})

    def _add(self, key: Term, c: complex):
        self.terms[key] = self.terms.get(key, 0.0) + c

    def prune(self, tol: float = PRUNE_TOL) -> "FermionOperator":
        self.terms = {k: c for k, c in self.terms.items() if abs(c) > tol}
        return self

    def copy(self) -> "FermionOperator":
        return FermionOperator(dict(self.terms))

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        out = self.copy()
        for k, c in other.terms.items():
            out._add(k, c)
        return out.prune()

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            out = FermionOperator()
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    out._add(k1 + k2, c1 * c2)
            return out.prune()
        return FermionOperator({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def __neg__(self):
        return self * -1

    def adjoint(self) -> "FermionOperator":
        return FermionOperator({
            tuple((i, not d) for i, d in reversed(k)): complex(c).conjugate()
            for k, c in self.terms.items()
        })

    def max_mode(self) -> int:
        return max((i for k in self.terms for i, _ in k), default=-1)

    def approx_equal(self, other: "FermionOperator", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) < tol for k in keys)

    def __repr__(self):
        return f"FermionOperator(terms={len(self)})"

    def __str__(self):
        lines = []
        for k, c in sorted(self.terms.items()):
            label = " ".join(f"{i}^" if d else str(i) for i, d in k)
            lines.append(f"{c} [{label}]")
        return "\n".join(lines)


def _normal_order_term(factors: Term, coeff: complex, out: FermionOperator):
    factors = list(factors)
    for i in range(1, len(factors)):
        for j in range(i, 0, -1):
            left, right = factors[j - 1], factors[j]
            if right[1] and not left[1]:
                factors[j - 1], factors[j] = right, left
                coeff = -coeff
                if right[0] == left[0]:
                    # a_p a+_p = 1 - a+_p a_p
                    _normal_order_term(tuple(factors[:j - 1] + factors[j + 1:]), -coeff, out)
            elif right[1] == left[1]:
                if right[0] == left[0]:
                    return
                if (right[1] and right[0] > left[0]) or (not right[1] and right[0] < left[0]):
                    factors[j - 1], factors[j] = right, left
                    coeff = -coeff
    out._add(tuple(factors), coeff)


def normal_order(op: FermionOperator) -> FermionOperator:
    """Rewrite ``op`` in canonical form using the anticommutation relations."""
    out = FermionOperator()
    for factors, c in op.terms.items():
        _normal_order_term(factors, c, out)
    return out.prune()


def commutator(a: FermionOperator, b: FermionOperator) -> FermionOperator:
    return normal_order(a * b - b * a)


def number_operator(n_modes: int) -> FermionOperator:
    return FermionOperator({((p, True), (p, False)): 1.0 for p in range(n_modes)})


def sz_operator(n_modes: int) -> FermionOperator:
    """Spin projection for interleaved ordering (even = alpha, odd = beta)."""
    return FermionOperator({
        ((p, True), (p, False)): 0.5 if p % 2 == 0 else -0.5 for p in range(n_modes)
    })


def build_hamiltonian(ints) -> FermionOperator:
    """Spin-orbital electronic Hamiltonian from spatial integrals.

    ``ints`` is a :class:`qcff.chemio.MolecularIntegrals` with chemists'
    two-electron integrals ``(pq|rs)``.  The result is::

        E_core + sum h_pq a+_ps a_qs + 1/2 sum (pq|rs) a+_ps a+_rt a_st a_qs

    summed over spins s, t, returned in canonical form.
    """
    h, eri = ints.h, ints.eri
    terms: Dict[Term, complex] = {}

    def add(key, c):
        terms[key] = terms.get(key, 0.0) + c

    if ints.e_core:
        add((), ints.e_core)
    for p, q in zip(*np.nonzero(np.abs(h) > PRUNE_TOL)):
        for s in (0, 1):
            add(((2 * p + s, True), (2 * q + s, False)), h[p, q])
    for p, q, r, s in zip(*np.nonzero(np.abs(eri) > PRUNE_TOL)):
        v = 0.5 * eri[p, q, r, s]
        for a in (0, 1):
            for b in (0, 1):
                if a == b and (p == r or q == s):
                    continue
                add(((2 * p + a, True), (2 * r + b, True), (2 * s + b, False), (2 * q + a, False)), v)
    return normal_order(FermionOperator(terms))


def determinants(n_modes: int, n_electrons: Optional[int] = None,
                 sz2: Optional[int] = None) -> np.ndarray:
    """Sorted occupation bitstrings (bit ``j`` = mode ``j`` occupied).

    ``n_electrons=None`` gives the whole Fock space; ``sz2`` (= N_alpha -
    N_beta) filters by spin projection.
    """
    if n_modes > 62:
        raise CapacityError("determinant enumeration limited to 62 modes")
    if n_electrons is None:
        dets = np.arange(1 << n_modes, dtype=np.uint64)
    else:
        if not 0 <= n_electrons <= n_modes:
            raise DomainError(f"{n_electrons} electrons do not fit in {n_modes} modes")
        dets = np.fromiter(
            (sum(1 << i for i in occ) for occ in itertools.combinations(range(n_modes), n_electrons)),
            dtype=np.uint64,
        )
        dets.sort()
    if sz2 is not None:
        alpha = np.uint64(sum(1 << i for i in range(0, n_modes, 2)))
        beta = np.uint64(sum(1 << i for i in range(1, n_modes, 2)))
        diff = np.bitwise_count(dets & alpha).astype(int) - np.bitwise_count(dets & beta).astype(int)
        dets = dets[diff == sz2]
    return dets


def to_sparse(op: FermionOperator, dets: np.ndarray) -> sp.csr_matrix:
    """Matrix of ``op`` in the given determinant basis.

    Built directly from the occupation-number action of ladder operators
    (``a_j`` picks up ``(-1)`` per occupied mode below ``j``), without any
    qubit encoding.  Matrix elements leading outside ``dets`` are dropped.
    """
    dim = len(dets)
    rows, cols, vals = [], [], []
    col_index = np.arange(dim)
    for factors, coeff in op.terms.items():
        d = dets.copy()
        valid = np.ones(dim, dtype=bool)
        sign = np.ones(dim)
        for mode, dagger in reversed(factors):
            bit = np.uint64(1 << mode)
            occupied = (d & bit) != 0
            valid &= ~occupied if dagger else occupied
            below = np.bitwise_count(d & np.uint64((1 << mode) - 1)) & 1
            sign *= 1 - 2 * below.astype(float)
            d = d ^ bit
        pos = np.searchsorted(dets, d)
        pos_ok = pos < dim
        valid &= pos_ok
        valid[pos_ok] &= dets[pos[pos_ok]] == d[pos_ok]
        rows.append(pos[valid])
        cols.append(col_index[valid])
        vals.append(coeff * sign[valid])
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    return sp.csr_matrix(
        (np.concatenate(vals).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
