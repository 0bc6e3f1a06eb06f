"""Classical force field: energy, analytic gradient and torsion fitting.

Units are kcal/mol for energies, Angstrom for lengths, radians for angles
and elementary charges for ``q``.  The potential is

    1/2 sum k (r - r0)^2 + 1/2 sum tau (theta - theta0)^2
    + 1/2 sum_n V_n (1 + cos(n omega - omega_n))
    + sum C q_i q_j / r_ij + sum 4 eps [(sigma/r)^12 - (sigma/r)^6]

with ``C`` the Coulomb conversion constant (kcal Angstrom / (mol e^2)).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, FitError, ParseError, SingularityError

COULOMB_CONSTANT = 332.0637
UNITS = ("kcal/mol", "hartree")
HARTREE_TO_KCAL = 627.509474


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    k: float
    r0: float


@dataclass(frozen=True)
class Angle:
    """Angle ``i-j-k`` with ``j`` the vertex."""

    i: int
    j: int
    k: int
    tau: float
    theta0: float


@dataclass(frozen=True)
class Torsion:
    """Dihedral ``i-j-k-l`` with terms ``(n, V_n, omega_n)``."""

    atoms: Tuple[int, int, int, int]
    terms: Tuple[Tuple[int, float, float], ...]


@dataclass
class FFParameters:
    """Force-field terms for one molecule.

    Coulomb acts on every pair not listed in ``exclusions``; Lennard-Jones
    acts on the pairs in ``lj`` only.
    """

    n_atoms: int
    bonds: List[Bond] = field(default_factory=list)
    angles: List[Angle] = field(default_factory=list)
    torsions: List[Torsion] = field(default_factory=list)
    charges: Optional[Sequence[float]] = None
    lj: Dict[Tuple[int, int], Tuple[float, float]] = field(default_factory=dict)
    exclusions: FrozenSet[Tuple[int, int]] = frozenset()
    coulomb_constant: float = COULOMB_CONSTANT

    def __post_init__(self):
        n = self.n_atoms
        for b in self.bonds:
            _check_atoms(n, (b.i, b.j))
            if b.k < 0:
                raise DomainError("bond force constant must be >= 0")
        for a in self.angles:
            _check_atoms(n, (a.i, a.j, a.k))
            if a.tau < 0:
                raise DomainError("angle force constant must be >= 0")
        for t in self.torsions:
            _check_atoms(n, t.atoms)
            for period, _, _ in t.terms:
                if int(period) != period or period < 1:
                    raise DomainError(f"torsion periodicity must be a positive integer, got {period}")
        for (i, j), (eps, sigma) in self.lj.items():
            _check_atoms(n, (i, j))
            if eps < 0 or sigma <= 0:
                raise DomainError("LJ needs eps >= 0 and sigma > 0")
        if self.charges is not None and len(self.charges) != n:
            raise DomainError(f"{len(self.charges)} charges for {n} atoms")
        self.exclusions = frozenset(tuple(sorted(p)) for p in self.exclusions)


def _check_atoms(n, idx):
    if len(set(idx)) != len(idx):
        raise DomainError(f"repeated atom in term {idx}")
    if any(not 0 <= a < n for a in idx):
        raise DomainError(f"atom index out of range in {idx}")


def _dihedral(p0, p1, p2, p3):
    """Dihedral angle in ``(-pi, pi]`` and its gradient for the four positions."""
    f, g, h = p0 - p1, p1 - p2, p3 - p2
    a, b = np.cross(f, g), np.cross(h, g)
    aa, bb = a @ a, b @ b
    lg = math.sqrt(g @ g)
    if aa < 1e-20 or bb < 1e-20 or lg < 1e-12:
        raise SingularityError("dihedral undefined for collinear atoms")
    omega = math.atan2((np.cross(b, a) @ g) / lg, a @ b)
    fg, hg = (f @ g) / (aa * lg), (h @ g) / (bb * lg)
    d0 = -lg / aa * a
    d3 = lg / bb * b
    d1 = -d0 + fg * a - hg * b
    d2 = -d3 - fg * a + hg * b
    return omega, (d0, d1, d2, d3)


def dihedral(coords, atoms) -> float:
    x = np.asarray(coords, dtype=float)
    return _dihedral(*(x[a] for a in atoms))[0]


def energy_and_gradient(params: FFParameters, coords) -> Tuple[float, np.ndarray]:
    """Total energy and its gradient (``-forces``) for ``(n_atoms, 3)`` coordinates."""
    x = np.asarray(coords, dtype=float)
    if x.shape != (params.n_atoms, 3):
        raise DomainError(f"expected coordinates of shape ({params.n_atoms}, 3), got {x.shape}")
    grad = np.zeros_like(x)
    energy = 0.0

    for b in params.bonds:
        d = x[b.i] - x[b.j]
        r = math.sqrt(d @ d)
        energy += 0.5 * b.k * (r - b.r0) ** 2
        if r > 0:
            g = b.k * (r - b.r0) / r * d
            grad[b.i] += g
            grad[b.j] -= g

    for a in params.angles:
        u, v = x[a.i] - x[a.j], x[a.k] - x[a.j]
        lu, lv = math.sqrt(u @ u), math.sqrt(v @ v)
        if lu == 0 or lv == 0:
            raise SingularityError(f"angle {a.i}-{a.j}-{a.k} has coincident atoms")
        cos_t = float(np.clip(u @ v / (lu * lv), -1.0, 1.0))
        theta = math.acos(cos_t)
        energy += 0.5 * a.tau * (theta - a.theta0) ** 2
        sin_t = math.sqrt(max(1.0 - cos_t * cos_t, 0.0))
        if sin_t > 1e-12:
            dE = a.tau * (theta - a.theta0) * (-1.0 / sin_t)
            gu = (v / (lu * lv) - cos_t * u / (lu * lu)) * dE
            gv = (u / (lu * lv) - cos_t * v / (lv * lv)) * dE
            grad[a.i] += gu
            grad[a.k] += gv
            grad[a.j] -= gu + gv

    for t in params.torsions:
        omega, gs = _dihedral(*(x[a] for a in t.atoms))
        dE = 0.0
        for n, vn, phase in t.terms:
            energy += 0.5 * vn * (1.0 + math.cos(n * omega - phase))
            dE -= 0.5 * vn * n * math.sin(n * omega - phase)
        for a, g in zip(t.atoms, gs):
            grad[a] += dE * g

    if params.charges is not None:
        q = np.asarray(params.charges, dtype=float)
        for i in range(params.n_atoms):
            if q[i] == 0:
                continue
            for j in range(i):
                if q[j] == 0 or (j, i) in params.exclusions:
                    continue
                d = x[i] - x[j]
                r = math.sqrt(d @ d)
                if r == 0:
                    raise SingularityError(f"atoms {j} and {i} coincide")
                e = params.coulomb_constant * q[i] * q[j] / r
                energy += e
                g = -e / (r * r) * d
                grad[i] += g
                grad[j] -= g

    for (i, j), (eps, sigma) in params.lj.items():
        d = x[i] - x[j]
        r = math.sqrt(d @ d)
        if r == 0:
            raise SingularityError(f"atoms {i} and {j} coincide")
        s6 = (sigma / r) ** 6
        energy += 4 * eps * (s6 * s6 - s6)
        g = 4 * eps * (-12 * s6 * s6 + 6 * s6) / (r * r) * d
        grad[i] += g
        grad[j] -= g

    return energy, grad


def evaluate_energy(params: FFParameters, coords) -> float:
    return energy_and_gradient(params, coords)[0]


def forces(params: FFParameters, coords) -> np.ndarray:
    return -energy_and_gradient(params, coords)[1]


# ---------------------------------------------------------------- torsion fitting

def wrap_angle(a):
    """Map angles to ``[-pi, pi)``."""
    return (np.asarray(a, dtype=float) + np.pi) % (2 * np.pi) - np.pi


@dataclass
class TorsionScan:
    """One-dimensional potential-energy scan along a dihedral."""

    angles: np.ndarray
    energies: np.ndarray
    unit: str = "kcal/mol"

    def __post_init__(self):
        self.angles = wrap_angle(self.angles)
        self.energies = np.asarray(self.energies, dtype=float)
        if self.angles.ndim != 1 or self.angles.shape != self.energies.shape:
            raise DomainError("angles and energies must be 1-D and of equal length")
        if self.unit not in UNITS:
            raise DomainError(f"unit must be one of {UNITS}")
        if not (np.all(np.isfinite(self.angles)) and np.all(np.isfinite(self.energies))):
            raise DomainError("scan contains non-finite values")

    def __len__(self):
        return len(self.angles)


@dataclass
class TorsionFit:
    terms: List[Tuple[int, float, float]]
    offset: float
    rms: float
    unit: str = "kcal/mol"

    def predict(self, angles) -> np.ndarray:
        w = np.asarray(angles, dtype=float)
        out = np.full(w.shape, self.offset)
        for n, v, phase in self.terms:
            out += 0.5 * v * (1 + np.cos(n * w - phase))
        return out


def fit_torsion(scan: TorsionScan, n_max: int) -> TorsionFit:
    """Least-squares fit of ``c + sum_n 1/2 V_n (1 + cos(n w - w_n))``.

    Solved linearly in ``a_n cos(n w) + b_n sin(n w) + c'`` and converted
    with ``V_n = 2 sqrt(a_n^2 + b_n^2) >= 0`` and ``w_n = atan2(b_n, a_n)``.
    The offset ``c`` excludes the ``1/2 V_n`` constants.

    Raises:
        FitError: when the design matrix is rank deficient (fewer than
            ``2 n_max + 1`` distinct angles).
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    w = scan.angles
    cols = [np.ones_like(w)]
    for n in range(1, n_max + 1):
        cols += [np.cos(n * w), np.sin(n * w)]
    A = np.stack(cols, axis=1)
    if len(w) < A.shape[1]:
        raise FitError(f"{len(w)} points cannot determine {A.shape[1]} coefficients (n_max={n_max})")
    coef, _, rank, _ = np.linalg.lstsq(A, scan.energies, rcond=None)
    if rank < A.shape[1]:
        raise FitError(f"rank-deficient torsion fit: rank {rank} < {A.shape[1]}; need more distinct angles")
    resid = scan.energies - A @ coef
    terms = []
    offset = coef[0]
    for n in range(1, n_max + 1):
        a, b = coef[2 * n - 1], coef[2 * n]
        v = 2 * math.hypot(a, b)
        phase = math.atan2(b, a) if v > 1e-12 else 0.0
        terms.append((n, v, phase))
        offset -= 0.5 * v
    return TorsionFit(terms, float(offset), float(np.sqrt(np.mean(resid ** 2))), scan.unit)


# ---------------------------------------------------------------- CSV I/O

def parse_scan_csv(text: str) -> TorsionScan:
    """Parse ``angle_rad,energy`` rows; a ``# unit: <name>`` comment sets the unit."""
    unit = "kcal/mol"
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, _, val = stripped[1:].partition(":")
            if key.strip().lower() == "unit":
                unit = val.strip().lower()
                if unit not in UNITS:
                    raise ParseError(f"unknown unit {unit!r}", lineno)
            continue
        fields = next(csv.reader([stripped]))
        if not header_seen:
            if [f.strip() for f in fields] != ["angle_rad", "energy"]:
                raise ParseError("expected header 'angle_rad,energy'", lineno)
            header_seen = True
            continue
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", lineno)
        try:
            rows.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise ParseError(f"non-numeric value in {stripped!r}", lineno) from None
    if not header_seen:
        raise ParseError("missing header 'angle_rad,energy'")
    if not rows:
        raise ParseError("scan has no data rows")
    arr = np.array(rows)
    try:
        return TorsionScan(arr[:, 0], arr[:, 1], unit)
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def read_scan_csv(path) -> TorsionScan:
    with open(path) as fh:
        return parse_scan_csv(fh.read())


def format_scan_csv(scan: TorsionScan) -> str:
    buf = io.StringIO()
    buf.write(f"# unit: {scan.unit}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["angle_rad", "energy"])
    for a, e in zip(scan.angles, scan.energies):
        writer.writerow([repr(float(a)), repr(float(e))])
    return buf.getvalue()


def format_fit_csv(fit: TorsionFit, digits: int = 10) -> str:
    """``n,V_n,omega_bar`` rows with fixed decimals (``-0`` normalized)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "V_n", "omega_bar"])
    for n, v, phase in fit.terms:
        writer.writerow([n, _fixed(v, digits), _fixed(phase, digits)])
    return buf.getvalue()


def _fixed(x: float, digits: int) -> str:
    s = f"{x:.{digits}f}"
    return s[1:] if s.startswith("-") and float(s) == 0 else s
