"""Regenerate the FCIDUMP fixtures under tests/data with PySCF.

Not part of the package; needs ``pyscf`` in the running interpreter::

    python tools/make_fixtures.py tests/data

Writes one ``<name>.fcidump`` per molecule plus ``reference_energies.json``
holding PySCF's RHF and FCI totals, used as an independent cross-check.
"""
import json
import sys
from pathlib import Path

from pyscf import fci, gto, scf
from pyscf.tools import fcidump

MOLECULES = {
    "h2": dict(atom="H 0 0 0; H 0 0 0.7414", charge=0),
    "h2_stretched": dict(atom="H 0 0 0; H 0 0 1.5", charge=0),
    "heh+": dict(atom="He 0 0 0; H 0 0 0.772", charge=1),
    "lih": dict(atom="Li 0 0 0; H 0 0 1.595", charge=0),
    "h4_chain": dict(atom="H 0 0 0; H 0 0 0.9; H 0 0 1.8; H 0 0 2.7", charge=0),
    "h2o": dict(atom="O 0 0 0.1173; H 0 0.7572 -0.4692; H 0 -0.7572 -0.4692", charge=0),
}


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    refs = {}
    for name, kw in MOLECULES.items():
        mol = gto.M(basis="sto-3g", unit="angstrom", verbose=0, **kw)
        mf = scf.RHF(mol).run()
        fcidump.from_scf(mf, str(outdir / f"{name}.fcidump"))
        e_fci = fci.FCI(mf).kernel()[0]
        refs[name] = {
            "geometry": kw["atom"],
            "basis": "sto-3g",
            "charge": kw["charge"],
            "norb": int(mf.mo_coeff.shape[1]),
            "nelec": int(mol.nelectron),
            "e_hf": float(mf.e_tot),
            "e_fci": float(e_fci),
        }
        if name == "lih":
            # frozen 1s core, full FCI over the remaining orbitals
            from pyscf import mcscf
            cas = mcscf.CASCI(mf, mf.mo_coeff.shape[1] - 1, mol.nelectron - 2)
            refs[name]["e_fci_frozen_core"] = float(cas.kernel()[0])
    (outdir / "reference_energies.json").write_text(json.dumps(refs, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
