"""Molecular integrals container and frozen-core (active-space) reduction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError

# Index images under which a real chemists'-notation integral (pq|rs) is invariant.
EIGHTFOLD = (
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
)


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    """One- and two-electron integrals over spatial molecular orbitals (Hartree).

    ``eri[p, q, r, s]`` is the chemists'-notation integral ``(pq|rs)``; every
    consumer in this package reads it that way.  ``e_core`` collects nuclear
    repulsion and any frozen-core energy.
    """

    n_orbitals: int
    n_electrons: int
    e_core: float
    h: np.ndarray
    eri: np.ndarray
    ms2: int = 0
    orbsym: tuple = field(default=())

    def __post_init__(self):
        n = self.n_orbitals
        if self.h.shape != (n, n) or self.eri.shape != (n,) * 4:
            raise DomainError("integral arrays do not match n_orbitals")
        if not 0 < self.n_electrons <= 2 * n:
            raise DomainError(f"{self.n_electrons} electrons do not fit in {n} spatial orbitals")

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_orbitals

    def check_symmetry(self, tol: float = 1e-10) -> bool:
        if not np.allclose(self.h, self.h.T, atol=tol, rtol=0):
            return False
        return all(np.allclose(self.eri, self.eri.transpose(perm), atol=tol, rtol=0)
                   for perm in EIGHTFOLD)

    def allclose(self, other: "MolecularIntegrals", tol: float = 1e-12) -> bool:
        return (
            self.n_orbitals == other.n_orbitals
            and self.n_electrons == other.n_electrons
            and self.ms2 == other.ms2
            and abs(self.e_core - other.e_core) <= tol
            and np.allclose(self.h, other.h, atol=tol, rtol=0)
            and np.allclose(self.eri, other.eri, atol=tol, rtol=0)
        )

    def hf_energy(self) -> float:
        """Closed-shell determinant energy with the lowest orbitals doubly filled.

        Only meaningful for an even electron count.
        """
        occ = range(self.n_electrons // 2)
        e = self.e_core
        for i in occ:
            e += 2 * self.h[i, i]
            for j in occ:
                e += 2 * self.eri[i, i, j, j] - self.eri[i, j, j, i]
        return float(e)


def active_space_reduce(ints: MolecularIntegrals, n_core: int) -> MolecularIntegrals:
    """Freeze the lowest ``n_core`` spatial orbitals as doubly occupied.

    Orbitals must already be sorted by ascending energy.  The frozen orbitals
    enter as a mean field: ``e_core`` gains their closed-shell energy and the
    one-electron integrals of the kept orbitals gain the Coulomb-minus-exchange
    potential of the core.
    """
    if n_core < 0 or 2 * n_core > ints.n_electrons or n_core >= ints.n_orbitals:
        raise DomainError(
            f"cannot freeze {n_core} orbitals with {ints.n_electrons} electrons "
            f"in {ints.n_orbitals} orbitals")
    if n_core == 0:
        return ints
    c = slice(0, n_core)
    a = slice(n_core, ints.n_orbitals)
    h, eri = ints.h, ints.eri
    coulomb = np.einsum("ccdd->", eri[c, c, c, c])
    exchange = np.einsum("cddc->", eri[c, c, c, c])
    e_core = ints.e_core + 2 * np.trace(h[c, c]) + 2 * coulomb - exchange
    h_active = (h[a, a]
                + 2 * np.einsum("pqcc->pq", eri[a, a, c, c])
                - np.einsum("pccq->pq", eri[a, c, c, a]))
    return MolecularIntegrals(
        n_orbitals=ints.n_orbitals - n_core,
        n_electrons=ints.n_electrons - 2 * n_core,
        e_core=float(e_core),
        h=h_active,
        eri=np.ascontiguousarray(eri[a, a, a, a]),
        ms2=ints.ms2,
        orbsym=ints.orbsym[n_core:] if ints.orbsym else (),
    )
