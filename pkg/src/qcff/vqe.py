"""Variational quantum eigensolver loop and the FCI oracle.

The energy of parameters ``t`` is ``<ref| U(t)^dag H U(t) |ref>`` with
``U(t)`` the Trotterized ansatz, evaluated exactly on a statevector.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.sparse.linalg

from .ansatz import AnsatzSpec, TrotterTable
from .encoding import QubitOperator
from .errors import CapacityError, ContractViolation, DomainError
from .fermion import FermionOperator, determinants, to_sparse
from .sim import SparseEnergy, StateVector, apply_pauli_rotation, max_qubits, prepare_reference

FCI_MAX_DIM = 10**6
DENSE_MAX_DIM = 2000
OPTIMIZERS = ("nelder_mead", "spsa")
STALL_STEPS = 10


def fci_ground_energy(H: FermionOperator, n_modes: int, n_electrons: int,
                      sz2: Optional[int] = None) -> float:
    """Lowest eigenvalue of ``H`` among determinants with ``n_electrons``.

    Args:
        sz2: optional ``N_alpha - N_beta`` restriction (interleaved spins).

    Raises:
        CapacityError: if ``C(M, eta)`` exceeds one million.
    """
    if not 0 <= n_electrons <= n_modes:
        raise DomainError(f"{n_electrons} electrons do not fit in {n_modes} modes")
    dim = math.comb(n_modes, n_electrons)
    if dim > FCI_MAX_DIM:
        raise CapacityError(f"FCI space of dimension {dim} exceeds {FCI_MAX_DIM}")
    dets = determinants(n_modes, n_electrons, sz2)
    if len(dets) == 0:
        raise DomainError("no determinant matches the requested spin sector")
    mat = to_sparse(H, dets)
    if len(dets) <= DENSE_MAX_DIM:
        return float(scipy.linalg.eigvalsh(mat.toarray())[0])
    vals = scipy.sparse.linalg.eigsh(mat, k=1, which="SA", tol=1e-12)[0]
    return float(vals[0])


@dataclass
class VqeConfig:
    """Optimizer settings.

    Attributes:
        optimizer: ``nelder_mead`` (default) or ``spsa``.
        max_iter: iteration budget per start.
        tol: convergence threshold on energy steps (Hartree).
        init: ``zeros`` (start at the reference) or ``perturbed``.
        init_scale: standard deviation of the ``perturbed`` start.
        seed: RNG seed for perturbed starts, restarts and SPSA.
        restarts: additional perturbed starts; the best result is kept.
    """

    optimizer: str = "nelder_mead"
    max_iter: int = 5000
    tol: float = 1e-7
    init: str = "zeros"
    init_scale: float = 0.01
    seed: int = 0
    restarts: int = 0

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise DomainError(f"optimizer must be one of {OPTIMIZERS}")
        if self.max_iter <= 0:
            raise DomainError("max_iter must be positive")
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        if self.init not in ("zeros", "perturbed"):
            raise DomainError("init must be 'zeros' or 'perturbed'")
        if self.restarts < 0:
            raise DomainError("restarts must be >= 0")


@dataclass
class VqeResult:
    energy: float
    params: List[float]
    iterations: int
    trace: List[float]
    converged: bool
    evaluations: int
    n_qubits: int
    message: str = ""
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class EnergyFunction:
    """``t -> E(t)`` for an ansatz and Hamiltonian, optionally tapered.

    With a :class:`qcff.taper.Tapering`, the Hamiltonian, the reference and
    every ansatz string are mapped into the tapered frame.  Strings that do
    not commute with the symmetry generators are dropped (they would leave
    the sector); parameters left without strings become inactive and are
    held at zero by :func:`run_vqe`.
    """

    def __init__(self, H: QubitOperator, spec: AnsatzSpec, tapering=None):
        if H.n_qubits != spec.n_qubits:
            raise ContractViolation(f"Hamiltonian width {H.n_qubits} != ansatz width {spec.n_qubits}")
        table = TrotterTable(spec)
        self.spec = spec
        self.n_evals = 0
        if tapering is None or not tapering.gens:
            self.width = H.n_qubits
            self._check_width()
            self.H = H
            self.reference = prepare_reference(spec.reference)
            self.terms, keep = table.terms, np.arange(len(table.terms))
        else:
            self.width = tapering.width
            self._check_width()
            self.H = tapering.taper_operator(H)
            from .taper import reference_amplitudes

            if spec.n_qubits > max_qubits():
                raise CapacityError(f"{spec.n_qubits} qubits exceeds the simulator cap of {max_qubits()}")
            psi = tapering.reduce_state(reference_amplitudes(spec.reference))
            if psi is None:
                raise ContractViolation("reference state has no weight in the chosen sector")
            self.reference = StateVector(psi)
            mapped, keep = [], []
            for k, term in enumerate(table.terms):
                image = tapering.taper_term(term)
                if image is not None and not image.is_identity():
                    mapped.append(image)
                    keep.append(k)
            keep = np.array(keep, dtype=int)
            self.terms = [t.with_coeff(1.0) for t in mapped]
            signs = np.array([t.coeff.real for t in mapped])
            table.weights = table.weights.copy()
            table.weights[keep] *= signs
        self.table = table
        self.keep = keep
        self.active = sorted({int(table.slots[k]) for k in keep})
        self.energy_of = SparseEnergy(self.H)

    def _check_width(self):
        if self.width > max_qubits():
            raise CapacityError(
                f"{self.width} qubits exceeds the simulator cap of {max_qubits()}; "
                "try --taper, --frozen-core or raise QCFF_MAX_QUBITS")

    def state(self, params: Sequence[float]) -> StateVector:
        angles = self.table.angles(params)[self.keep]
        psi = self.reference.copy()
        for term, angle in zip(self.terms, angles):
            apply_pauli_rotation(psi, term, float(angle))
        return psi

    def __call__(self, params: Sequence[float]) -> float:
        self.n_evals += 1
        return self.energy_of(self.state(params))


class _Tracker:
    """Records best energies and decides convergence.

    An accepted step is an iteration that lowers the best energy; the run
    has converged once ``STALL_STEPS`` consecutive accepted steps each
    improved by less than ``tol``.
    """

    def __init__(self, tol: float):
        self.tol = tol
        self.best = math.inf
        self.best_x: Optional[np.ndarray] = None
        self.trace: List[float] = []
        self.small = 0
        self.converged = False

    def offer(self, energy: float, x: np.ndarray):
        if energy < self.best:
            self.best, self.best_x = energy, np.array(x, dtype=float)

    def step(self) -> bool:
        if self.trace and self.best < self.trace[-1]:
            if self.trace[-1] - self.best < self.tol:
                self.small += 1
            else:
                self.small = 0
        self.trace.append(self.best)
        if self.small >= STALL_STEPS:
            self.converged = True
        return self.converged


def _nelder_mead(f: Callable, x0: np.ndarray, cfg: VqeConfig, tracker: _Tracker) -> str:
    def wrapped(x):
        e = f(x)
        tracker.offer(e, x)
        return e

    def callback(intermediate_result):
        if tracker.step():
            raise StopIteration

    res = scipy.optimize.minimize(
        wrapped, x0, method="Nelder-Mead", callback=callback,
        options={"maxiter": cfg.max_iter, "maxfev": 20 * cfg.max_iter, "adaptive": True,
                 "xatol": 1e-9, "fatol": 0.1 * cfg.tol},
    )
    if tracker.converged:
        return f"converged: {STALL_STEPS} consecutive steps below tol"
    tracker.converged = bool(res.success)
    return str(res.message)


def _spsa(f: Callable, x0: np.ndarray, cfg: VqeConfig, tracker: _Tracker,
          rng: np.random.Generator) -> str:
    # standard gain sequences; a is calibrated from the first gradient estimate
    c, alpha, gamma = 0.05, 0.602, 0.101
    big_a = 0.1 * cfg.max_iter
    x = x0.copy()
    tracker.offer(f(x), x)
    a = None
    for k in range(cfg.max_iter):
        ck = c / (k + 1) ** gamma
        delta = rng.choice((-1.0, 1.0), size=x.size)
        e_plus, e_minus = f(x + ck * delta), f(x - ck * delta)
        grad = (e_plus - e_minus) / (2 * ck) * delta
        if a is None:
            mag = float(np.mean(np.abs(grad))) or 1.0
            a = 0.1 * (big_a + 1) ** alpha / mag
        x = x - a / (k + 1 + big_a) ** alpha * grad
        tracker.offer(f(x), x)
        if tracker.step():
            return f"converged: {STALL_STEPS} consecutive steps below tol"
    return "iteration budget exhausted"


def run_vqe(H: QubitOperator, spec: AnsatzSpec, cfg: Optional[VqeConfig] = None,
            tapering=None, observer: Optional[Callable[[float], None]] = None) -> VqeResult:
    """Minimize the ansatz energy.

    Deterministic for a fixed config.  Optimizer trouble is reported through
    ``converged=False`` and ``message`` rather than raised.

    Args:
        H: qubit Hamiltonian on ``spec.n_qubits`` qubits.
        spec: ansatz.
        cfg: optimizer settings (defaults to :class:`VqeConfig()`).
        tapering: optional :class:`qcff.taper.Tapering` to run in the
            reduced space.
        observer: called with every evaluated energy.
    """
    cfg = cfg or VqeConfig()
    energy = EnergyFunction(H, spec, tapering)
    rng = np.random.default_rng(cfg.seed)
    active = np.array(energy.active, dtype=int)
    full = np.zeros(spec.n_params)

    def f(x):
        full[:] = 0.0
        full[active] = x
        e = energy(full)
        if observer is not None:
            observer(e)
        return e

    constant_only = set(energy.H.terms) <= {(0, 0)}
    if active.size == 0 or constant_only:
        e0 = f(np.zeros(active.size))
        return VqeResult(e0, full.tolist(), 0, [e0], True, energy.n_evals, energy.width,
                         "nothing to optimize")

    best: Optional[_Tracker] = None
    messages = []
    for start in range(cfg.restarts + 1):
        if cfg.init == "zeros" and start == 0:
            x0 = np.zeros(active.size)
        else:
            x0 = rng.normal(scale=cfg.init_scale, size=active.size)
        tracker = _Tracker(cfg.tol)
        if cfg.optimizer == "nelder_mead":
            messages.append(_nelder_mead(f, x0, cfg, tracker))
        else:
            messages.append(_spsa(f, x0, cfg, tracker, rng))
        if best is None or tracker.best < best.best:
            best = tracker
    full[:] = 0.0
    full[active] = best.best_x
    return VqeResult(
        energy=float(best.best),
        params=full.tolist(),
        iterations=len(best.trace),
        trace=best.trace,
        converged=best.converged,
        evaluations=energy.n_evals,
        n_qubits=energy.width,
        message="; ".join(messages),
        extras={"active_params": int(active.size), "ansatz_strings": len(energy.terms)},
    )


def hf_energy(H: QubitOperator, occupation: Sequence[int]) -> float:
    """``<ref|H|ref>`` for a computational basis reference."""
    from .sim import expectation

    return expectation(prepare_reference(occupation), H)
