"""Integral-file ingestion, basis-set catalog and active-space accounting."""
from .basis import (
    ATOMIC_NUMBER,
    VALENCE_TABLE,
    BasisCatalog,
    BasisCatalogEntry,
    MolecularFormula,
    amino_acids,
    count_active_qubits,
    count_core_orbitals,
    count_qubits,
    dipeptide_roster,
    dipeptide_roster_text,
    electron_count,
    homodipeptide,
    load_catalog,
    parse_roster,
)
from .fcidump import parse_integral_file, read_integral_file, serialize_integrals, write_integral_file
from .integrals import EIGHTFOLD, MolecularIntegrals, active_space_reduce

__all__ = [
    "ATOMIC_NUMBER", "VALENCE_TABLE", "BasisCatalog", "BasisCatalogEntry", "MolecularFormula", "amino_acids",
    "count_active_qubits", "count_core_orbitals", "count_qubits", "dipeptide_roster",
    "dipeptide_roster_text", "electron_count", "homodipeptide", "load_catalog", "parse_roster",
    "parse_integral_file", "read_integral_file", "serialize_integrals", "write_integral_file",
    "EIGHTFOLD", "MolecularIntegrals", "active_space_reduce",
]
