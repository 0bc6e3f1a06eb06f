"""Molecular formulas, basis-set function counts and qubit accounting."""
from __future__ import annotations

import configparser
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Mapping, Optional, Tuple

from ..errors import CatalogError, ParseError

_ELEMENTS = """
H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn
Ga Ge As Se Br Kr
""".split()
ATOMIC_NUMBER: Dict[str, int] = {el: z for z, el in enumerate(_ELEMENTS, 1)}
_SYMBOLS = frozenset(_ELEMENTS)

_TOKEN = re.compile(r"([A-Z][a-z]?)(\d*)")

# element: (valence orbitals, core orbitals, valence electrons)
VALENCE_TABLE: Dict[str, Tuple[int, int, int]] = {
    "H": (1, 0, 1), "He": (1, 0, 2),
    "Li": (4, 1, 1), "Be": (4, 1, 2), "B": (4, 1, 3), "C": (4, 1, 4),
    "N": (4, 1, 5), "O": (4, 1, 6), "F": (4, 1, 7),
    "P": (4, 5, 5), "S": (4, 5, 6), "Cl": (4, 5, 7),
}


@dataclass(frozen=True)
class MolecularFormula:
    """Element -> atom count, e.g. ``MolecularFormula.parse("C4H8N2O3")``."""

    counts: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        for el, n in self.counts:
            if el not in _SYMBOLS:
                raise CatalogError(f"unknown element symbol {el!r}")
            if n <= 0:
                raise ParseError(f"count for {el} must be positive, got {n}")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "MolecularFormula":
        return cls(tuple(sorted((el, int(n)) for el, n in counts.items() if n)))

    @classmethod
    def parse(cls, text: str) -> "MolecularFormula":
        text = text.strip()
        pos, counts = 0, Counter()
        for m in _TOKEN.finditer(text):
            if m.start() != pos:
                break
            counts[m.group(1)] += int(m.group(2)) if m.group(2) else 1
            pos = m.end()
        if pos != len(text) or not text:
            raise ParseError(f"cannot parse formula {text!r}")
        if any(n <= 0 for n in counts.values()):
            raise ParseError(f"zero atom count in {text!r}")
        return cls.from_counts(counts)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.counts)

    def __add__(self, other: "MolecularFormula") -> "MolecularFormula":
        return MolecularFormula.from_counts(Counter(self.as_dict()) + Counter(other.as_dict()))

    def __sub__(self, other: "MolecularFormula") -> "MolecularFormula":
        left, right = Counter(self.as_dict()), other.as_dict()
        for el, n in right.items():
            if left[el] < n:
                raise ParseError(f"cannot remove {n} {el} from {self}")
            left[el] -= n
        return MolecularFormula.from_counts(left)

    def __mul__(self, k: int) -> "MolecularFormula":
        return MolecularFormula.from_counts({el: n * k for el, n in self.counts})

    __rmul__ = __mul__

    def __str__(self):
        # Hill order: C, H, then alphabetical
        d = self.as_dict()
        if "C" in d:
            order = ["C"] + (["H"] if "H" in d else []) + sorted(el for el in d if el not in ("C", "H"))
        else:
            order = sorted(d)
        return "".join(f"{el}{d[el] if d[el] > 1 else ''}" for el in order)


@dataclass(frozen=True)
class BasisCatalogEntry:
    """Spatial function counts of one basis set plus the element valence table."""

    name: str
    functions: Mapping[str, int]
    valence: Mapping[str, Tuple[int, int, int]] = field(default_factory=lambda: VALENCE_TABLE)

    def __post_init__(self):
        for el, n in self.functions.items():
            if n < 0:
                raise CatalogError(f"{self.name}: negative function count for {el}")
            if el in self.valence and self.valence[el][0] > n:
                raise CatalogError(f"{self.name}: {el} has fewer functions than valence orbitals")

    def spatial_functions(self, element: str) -> int:
        try:
            return self.functions[element]
        except KeyError:
            raise CatalogError(f"element {element} not in basis {self.name}") from None

    def valence_orbitals(self, element: str) -> int:
        return _valence(element, self.valence)[0]

    def core_orbitals(self, element: str) -> int:
        return _valence(element, self.valence)[1]

    def valence_electrons(self, element: str) -> int:
        return _valence(element, self.valence)[2]


def _valence(element, table):
    try:
        return table[element]
    except KeyError:
        raise CatalogError(f"element {element} has no valence data") from None


class BasisCatalog:
    """Name -> :class:`BasisCatalogEntry`; names are case-insensitive."""

    def __init__(self, entries: Mapping[str, BasisCatalogEntry], version: int = 1):
        self.entries = {k.lower(): v for k, v in entries.items()}
        self.version = version

    def __getitem__(self, name: str) -> BasisCatalogEntry:
        try:
            return self.entries[name.lower()]
        except KeyError:
            known = ", ".join(sorted(self.entries))
            raise CatalogError(f"unknown basis {name!r} (known: {known})") from None

    def __contains__(self, name):
        return name.lower() in self.entries

    def names(self) -> List[str]:
        return list(self.entries)


def _read_ini(text: str, base: Optional[Dict[str, Dict[str, int]]] = None):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep element case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"bad basis catalog: {exc}") from None
    tables = {k: dict(v) for k, v in (base or {}).items()}
    version = 1
    for section in parser.sections():
        if section == "catalog":
            version = parser.getint(section, "version", fallback=1)
            continue
        table = tables.setdefault(section.lower(), {})
        for el, val in parser.items(section):
            try:
                table[el] = int(val)
            except ValueError:
                raise ParseError(f"[{section}] {el}: count {val!r} is not an integer") from None
    return tables, version


def load_catalog(override_path=None) -> BasisCatalog:
    """Built-in catalog, optionally overridden by an INI file of the same layout."""
    text = resources.files("qcff.chemio").joinpath("data/basis_catalog.ini").read_text()
    tables, version = _read_ini(text)
    if override_path is not None:
        with open(override_path) as fh:
            tables, version = _read_ini(fh.read(), tables)
    return BasisCatalog({name: BasisCatalogEntry(name, t) for name, t in tables.items()}, version)


def count_qubits(formula: MolecularFormula, basis: BasisCatalogEntry) -> int:
    """Spin-orbital count with every basis function kept."""
    return 2 * sum(n * basis.spatial_functions(el) for el, n in formula.counts)


def electron_count(formula: MolecularFormula, charge: int = 0) -> int:
    """Total electrons of the neutral (or charged) molecule."""
    return sum(n * ATOMIC_NUMBER[el] for el, n in formula.counts) - charge


def count_active_qubits(formula: MolecularFormula,
                        valence: Mapping[str, Tuple[int, int, int]] = VALENCE_TABLE) -> Tuple[int, int]:
    """``(M, eta)`` for the full-reaction (minimal valence) active space.

    Independent of the basis set: one spatial orbital per valence orbital of
    each atom, and only valence electrons are correlated.
    """
    m = 2 * sum(n * _valence(el, valence)[0] for el, n in formula.counts)
    eta = sum(n * _valence(el, valence)[2] for el, n in formula.counts)
    return m, eta


def count_core_orbitals(formula: MolecularFormula,
                        valence: Mapping[str, Tuple[int, int, int]] = VALENCE_TABLE) -> int:
    return sum(n * _valence(el, valence)[1] for el, n in formula.counts)


WATER = MolecularFormula.parse("H2O")


def amino_acids() -> Dict[str, MolecularFormula]:
    text = resources.files("qcff.chemio").joinpath("data/amino_acids.txt").read_text()
    out = {}
    for line in text.splitlines():
        line = line.split("#")[0].strip()
        if line:
            code, formula = line.split()
            out[code] = MolecularFormula.parse(formula)
    return out


def homodipeptide(residue: MolecularFormula) -> MolecularFormula:
    """Condensation of two copies of ``residue`` (loses one water)."""
    return 2 * residue - WATER


def parse_roster(text: str) -> List[Tuple[str, MolecularFormula]]:
    """``label formula`` per line; blank lines and ``#`` comments ignored."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'label formula'", lineno)
        try:
            rows.append((parts[0], MolecularFormula.parse(parts[1])))
        except (ParseError, CatalogError) as exc:
            raise type(exc)(f"line {lineno} ({parts[0]}): {exc}") from None
    return rows


def dipeptide_roster_text() -> str:
    return resources.files("qcff.chemio").joinpath("data/dipeptides.txt").read_text()


def dipeptide_roster() -> List[Tuple[str, MolecularFormula]]:
    """The 20 homodipeptides Xaa-Xaa shipped with the package."""
    return parse_roster(dipeptide_roster_text())
