"""Command-line front end: ``qcff resources | vqe | taper | fit-torsion``.

Exit codes: 0 success, 1 usage, 2 input or parse problem, 3 domain or
capacity problem.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

from . import __version__
from .ansatz import build_kupccgsd, build_uccsd, summary
from .chemio import (
    active_space_reduce,
    count_active_qubits,
    count_qubits,
    dipeptide_roster,
    electron_count,
    load_catalog,
    parse_roster,
    read_integral_file,
)
from .encoding import jordan_wigner, qubit_count_bounds
from .errors import CatalogError, DomainError, InputError, QcffError
from .fermion import build_hamiltonian

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class ReportRow:
    label: str
    formula: str
    basis: str
    active_space: bool
    qubits: int
    electrons: int
    qubit_lower_bound: int
    uccsd_params: int
    uccsd_naive_cnots: int
    uccsd_optimized_cnots: int
    kupccgsd_k: int
    # parameters live on unordered spatial pairs, gate counts on ordered ones
    kupccgsd_params: int
    kupccgsd_paired_terms: int
    kupccgsd_cnots: int
    kupccgsd_depth: int


REPORT_FIELDS = list(ReportRow.__dataclass_fields__)


def build_report(roster, basis_name: str, active_space: bool, k: int = 1,
                 catalog_path: Optional[str] = None) -> List[ReportRow]:
    from .synth import estimate_kupccgsd_depth, kupccgsd_gate_count, uccsd_gate_count

    catalog = load_catalog(catalog_path)
    basis = catalog[basis_name]
    rows = []
    depth_cache = {}
    for lineno, (label, formula) in enumerate(roster, 1):
        try:
            if active_space:
                m, eta = count_active_qubits(formula, basis.valence)
            else:
                m, eta = count_qubits(formula, basis), electron_count(formula)
        except CatalogError as exc:
            raise CatalogError(f"row {lineno} ({label}): {exc}") from None
        if not 0 < eta < m:
            raise DomainError(f"row {lineno} ({label}): {eta} electrons in {m} spin orbitals")
        if m not in depth_cache:
            depth_cache[m] = estimate_kupccgsd_depth(m, 1)
        n_v = m - eta
        rows.append(ReportRow(
            label=label,
            formula=str(formula),
            basis=basis.name,
            active_space=active_space,
            qubits=m,
            electrons=eta,
            qubit_lower_bound=qubit_count_bounds(m, eta)[0],
            uccsd_params=eta * n_v + math.comb(eta, 2) * math.comb(n_v, 2),
            uccsd_naive_cnots=uccsd_gate_count(m, eta, "naive"),
            uccsd_optimized_cnots=uccsd_gate_count(m, eta, "optimized"),
            kupccgsd_k=k,
            kupccgsd_params=3 * k * math.comb(m // 2, 2),
            kupccgsd_paired_terms=k * (m // 2) * (m // 2 - 1),
            kupccgsd_cnots=kupccgsd_gate_count(m, k, "naive"),
            kupccgsd_depth=k * depth_cache[m],
        ))
    return rows


def format_report(rows: Sequence[ReportRow], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"schema": "qcff-resources", "schema_version": SCHEMA_VERSION,
                           "rows": [asdict(r) for r in rows]}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# qcff-resources schema_version={SCHEMA_VERSION}\n")
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        d = asdict(r)
        d["active_space"] = int(r.active_space)
        writer.writerow(d)
    return buf.getvalue()


def _load_roster(path: Optional[str]):
    if path is None:
        return dipeptide_roster()
    with open(path) as fh:
        return parse_roster(fh.read())


def cmd_resources(args) -> int:
    if args.k < 1:
        raise UsageError("-k must be >= 1")
    rows = build_report(_load_roster(args.roster), args.basis, args.active_space, args.k, args.catalog)
    _emit(format_report(rows, args.format), args.output)
    return EXIT_OK


def _emit(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_problem(args):
    ints = read_integral_file(args.fcidump)
    if args.frozen_core:
        ints = active_space_reduce(ints, args.frozen_core)
    fermion_h = build_hamiltonian(ints)
    n_modes = 2 * ints.n_orbitals
    return ints, fermion_h, jordan_wigner(fermion_h, n_modes), n_modes


def _tapering_for(qubit_h, occupation):
    from .taper import Tapering, choose_sector, find_z2_symmetries

    gens = find_z2_symmetries(qubit_h)
    sector, _ = choose_sector(qubit_h, gens, occupation)
    return Tapering(gens, sector)


def cmd_vqe(args) -> int:
    from .vqe import VqeConfig, fci_ground_energy, hf_energy, run_vqe

    if args.k < 1:
        raise UsageError("-k must be >= 1")
    ints, fermion_h, qubit_h, n_modes = _load_problem(args)
    if args.ansatz == "uccsd":
        spec = build_uccsd(n_modes, ints.n_electrons)
    else:
        spec = build_kupccgsd(n_modes, args.k, ints.n_electrons)
    tapering = _tapering_for(qubit_h, spec.reference) if args.taper else None
    cfg = VqeConfig(optimizer=args.optimizer, max_iter=args.max_iter, tol=args.tol,
                    init=args.init, seed=args.seed, restarts=args.restarts)
    result = run_vqe(qubit_h, spec, cfg, tapering=tapering)
    out = {
        "schema": "qcff-vqe",
        "schema_version": SCHEMA_VERSION,
        "fcidump": args.fcidump,
        "frozen_core": args.frozen_core,
        "ansatz": summary(spec) | {"kind": spec.kind},
        "qubits": n_modes,
        "width": result.n_qubits,
        "tapered": tapering is not None,
        "symmetry_generators": [str(g.pauli.label()) for g in tapering.gens] if tapering else [],
        "sector": tapering.sector if tapering else [],
        "hf_energy": hf_energy(qubit_h, spec.reference) if n_modes <= 24 else None,
        "energy": result.energy,
        "converged": result.converged,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "message": result.message,
        "params": result.params,
        "trace": result.trace,
    }
    if args.fci:
        e_fci = fci_ground_energy(fermion_h, n_modes, ints.n_electrons)
        out["fci_energy"] = e_fci
        out["gap"] = result.energy - e_fci
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_taper(args) -> int:
    import numpy as np

    from .sim import max_qubits

    ints, _, qubit_h, n_modes = _load_problem(args)
    occupation = [int(q < ints.n_electrons) for q in range(n_modes)]
    tapering = _tapering_for(qubit_h, occupation)
    tapered = tapering.taper_operator(qubit_h)
    out = {
        "schema": "qcff-taper",
        "schema_version": SCHEMA_VERSION,
        "qubits": n_modes,
        "width": tapered.n_qubits,
        "symmetry_generators": [g.pauli.label() for g in tapering.gens],
        "sector": tapering.sector,
        "removed_qubits": tapering.removed,
        "terms": len(tapered),
    }
    if args.ground and tapered.n_qubits <= min(max_qubits(), 12):
        out["ground_energy"] = float(np.linalg.eigvalsh(tapered.to_matrix())[0])
    if args.write:
        with open(args.write, "w") as fh:
            fh.write(tapered.to_text())
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_fit_torsion(args) -> int:
    from .ffield import fit_torsion, format_fit_csv, read_scan_csv

    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    fit = fit_torsion(read_scan_csv(args.scan), args.n_max)
    _emit(format_fit_csv(fit), args.output)
    print(f"residual_rms={fit.rms:.6e} {fit.unit} offset={fit.offset:.10f}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qcff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("resources", help="qubit, gate and depth estimates for a roster")
    p.add_argument("--roster", help="file of 'label formula' lines (default: built-in homodipeptides)")
    p.add_argument("--basis", default="sto-3g", help="basis set name (default: sto-3g)")
    p.add_argument("--catalog", help="INI file overriding basis-set function counts")
    p.add_argument("--active-space", action="store_true", help="count valence (full reaction space) orbitals only")
    p.add_argument("-k", type=int, default=1, help="k-UpCCGSD repetitions (default: 1)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(func=cmd_resources)

    def problem_args(p):
        p.add_argument("fcidump", help="FCIDUMP integral file")
        p.add_argument("--frozen-core", type=int, default=0, metavar="N",
                       help="freeze the N lowest spatial orbitals")

    p = sub.add_parser("vqe", help="run VQE on an integral file")
    problem_args(p)
    p.add_argument("--ansatz", choices=("uccsd", "kupccgsd"), default="uccsd")
    p.add_argument("-k", type=int, default=1, help="k-UpCCGSD repetitions (default: 1)")
    p.add_argument("--taper", action="store_true", help="remove Z2-symmetric qubits first")
    p.add_argument("--fci", action="store_true", help="also report the FCI energy and the gap")
    p.add_argument("--optimizer", choices=("nelder_mead", "spsa"), default="nelder_mead")
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-7, help="convergence tolerance in Hartree")
    p.add_argument("--init", choices=("zeros", "perturbed"), default="zeros")
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("taper", help="find Z2 symmetries and taper the qubit Hamiltonian")
    problem_args(p)
    p.add_argument("--ground", action="store_true", help="report the tapered ground energy (small widths)")
    p.add_argument("--write", metavar="PATH", help="write the tapered operator as Pauli text")
    p.set_defaults(func=cmd_taper)

    p = sub.add_parser("fit-torsion", help="fit torsion terms to a dihedral scan CSV")
    p.add_argument("scan", help="CSV with header angle_rad,energy")
    p.add_argument("--n-max", type=int, default=3, help="highest periodicity (default: 3)")
    p.add_argument("-o", "--output", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_fit_torsion)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qcff: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"qcff: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QcffError as exc:
        print(f"qcff: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
