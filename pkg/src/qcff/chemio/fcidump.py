"""Reading and writing FCIDUMP integral files.

Layout: a Fortran namelist header (``&FCI NORB=..,NELEC=..,MS2=.., &END``)
followed by ``value i j k l`` records with 1-based orbital indices:

* ``i j k l`` all nonzero: two-electron integral ``(ij|kl)``
* ``i j 0 0``: one-electron integral ``h_ij``
* ``i 0 0 0``: orbital energy (kept, not used downstream)
* ``0 0 0 0``: core energy
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from ..errors import DomainError, IntegrityError, ParseError
from .integrals import EIGHTFOLD, MolecularIntegrals

DUPLICATE_TOL = 1e-10

_KEYVAL = re.compile(r"([A-Za-z_]\w*)\s*=\s*([^=]*?)\s*(?=[A-Za-z_]\w*\s*=|$)", re.S)


def _parse_header(lines):
    """Return (header dict, index of first body line)."""
    first = None
    for n, line in enumerate(lines):
        if line.strip():
            first = n
            break
    if first is None:
        raise ParseError("empty file")
    if not lines[first].lstrip().upper().startswith("&FCI"):
        raise ParseError("header must start with &FCI", first + 1)
    chunks = []
    for n in range(first, len(lines)):
        text = lines[n].strip()
        end = re.search(r"(&END|/)\s*$", text, re.I)
        if end:
            chunks.append(text[: end.start()])
            body_start = n + 1
            break
        chunks.append(text)
    else:
        raise ParseError("unterminated header (no &END)", first + 1)
    text = " ".join(chunks)
    text = re.sub(r"^&FCI", "", text, flags=re.I)
    header = {}
    for key, val in _KEYVAL.findall(text):
        items = [v for v in val.replace(",", " ").split() if v]
        try:
            header[key.upper()] = [int(v) for v in items]
        except ValueError:
            raise ParseError(f"non-integer value for {key}", first + 1) from None
    for key in ("NORB", "NELEC"):
        if len(header.get(key, [])) != 1:
            raise ParseError(f"header lacks a single {key} value", first + 1)
    return header, body_start


def _store(slot_values, key, value, lineno):
    old = slot_values.get(key)
    if old is None:
        slot_values[key] = value
    elif abs(old - value) > DUPLICATE_TOL:
        raise IntegrityError(
            f"line {lineno}: entry {key} = {value!r} conflicts with earlier value {old!r}")


def parse_integral_file(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text into :class:`MolecularIntegrals`.

    Raises:
        ParseError: malformed header or record (carries the line number).
        IntegrityError: two records for the same integral disagree beyond 1e-10.
        DomainError: more electrons than spin orbitals.
    """
    lines = text.splitlines()
    header, start = _parse_header(lines)
    norb = header["NORB"][0]
    nelec = header["NELEC"][0]
    ms2 = header.get("MS2", [0])[0]
    if norb <= 0:
        raise ParseError("NORB must be positive")
    if nelec <= 0 or nelec > 2 * norb:
        raise DomainError(f"NELEC={nelec} incompatible with NORB={norb}")

    one, two, orb_e = {}, {}, {}
    core = None
    for lineno, line in enumerate(lines[start:], start + 1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise ParseError(f"expected 'value i j k l', got {len(fields)} fields", lineno)
        try:
            value = float(fields[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError:
            raise ParseError(f"cannot read record {line.strip()!r}", lineno) from None
        if not np.isfinite(value):
            raise ParseError("non-finite integral value", lineno)
        idx = (i, j, k, l)
        if any(x < 0 or x > norb for x in idx):
            raise ParseError(f"orbital index outside 0..{norb}", lineno)
        if i and j and k and l:
            key = min(tuple(idx[p] for p in perm) for perm in EIGHTFOLD)
            _store(two, key, value, lineno)
        elif i and j and not k and not l:
            _store(one, (min(i, j), max(i, j)), value, lineno)
        elif i and not j and not k and not l:
            _store(orb_e, i, value, lineno)
        elif not (i or j or k or l):
            if core is not None and abs(core - value) > DUPLICATE_TOL:
                raise IntegrityError(f"line {lineno}: second core energy {value!r} differs from {core!r}")
            core = value if core is None else core
        else:
            raise ParseError(f"invalid index pattern {idx}", lineno)

    h = np.zeros((norb, norb))
    for (i, j), v in one.items():
        h[i - 1, j - 1] = h[j - 1, i - 1] = v
    eri = np.zeros((norb,) * 4)
    for key, v in two.items():
        base = tuple(x - 1 for x in key)
        for perm in EIGHTFOLD:
            eri[tuple(base[p] for p in perm)] = v
    orbsym = tuple(header.get("ORBSYM", ()))
    return MolecularIntegrals(norb, nelec, float(core or 0.0), h, eri, ms2=ms2,
                              orbsym=orbsym if len(orbsym) == norb else ())


def read_integral_file(path) -> MolecularIntegrals:
    return parse_integral_file(Path(path).read_text())


def serialize_integrals(ints: MolecularIntegrals) -> str:
    """FCIDUMP text with one record per symmetry-unique nonzero integral.

    Values are written with ``repr`` so a parse of the output is exact.
    """
    n = ints.n_orbitals
    orbsym = ints.orbsym or (1,) * n
    out = [
        f" &FCI NORB={n},NELEC={ints.n_electrons},MS2={ints.ms2},",
        "  ORBSYM=" + ",".join(str(s) for s in orbsym) + ",",
        "  ISYM=1,",
        " &END",
    ]
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    v = ints.eri[i, j, k, l]
                    if v != 0.0:
                        out.append(f"{float(v)!r} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            v = ints.h[i, j]
            if v != 0.0:
                out.append(f"{float(v)!r} {i + 1} {j + 1} 0 0")
    out.append(f"{float(ints.e_core)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


def write_integral_file(path, ints: MolecularIntegrals) -> None:
    Path(path).write_text(serialize_integrals(ints))
