#!/usr/bin/env python3
"""Regenerates the committed integral bundles under tests/fixtures.

Needs pyscf + numpy. Not part of the build; the C++ suite only reads the
bundles this writes. Usage: python3 generate_fixtures.py [outdir]
"""
import json
import os
import sys

import numpy as np
from pyscf import gto, scf, fci, lo
from pyscf.grad import rhf as rhf_grad

BASIS = "sto-6g"
BOHR_ANG = 0.529177210903


def ao_derivatives(mol, mf):
    nao = mol.nao
    natm = mol.natm
    ipovlp = mol.intor("int1e_ipovlp")
    ip1 = mol.intor("int2e_ip1")
    hgen = rhf_grad.Gradients(mf).hcore_generator(mol)
    slices = mol.aoslice_by_atom()

    dS = np.zeros((3 * natm, nao, nao))
    dh = np.zeros((3 * natm, nao, nao))
    dg = np.zeros((3 * natm, nao, nao, nao, nao))
    for a in range(natm):
        p0, p1 = slices[a, 2], slices[a, 3]
        x = np.zeros((3, nao, nao))
        x[:, p0:p1, :] = -ipovlp[:, p0:p1, :]
        dS[3 * a:3 * a + 3] = x + x.transpose(0, 2, 1)
        dh[3 * a:3 * a + 3] = hgen(a)
        y = np.zeros((3, nao, nao, nao, nao))
        y[:, p0:p1] = -ip1[:, p0:p1]
        dg[3 * a:3 * a + 3] = (y + y.transpose(0, 2, 1, 3, 4)
                               + y.transpose(0, 3, 4, 1, 2)
                               + y.transpose(0, 3, 4, 2, 1))
    return dS, dh, dg


def to_mo(c, s, h, g, dS, dh, dg):
    s_mo = c.T @ s @ c
    h_mo = c.T @ h @ c
    g_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", c, c, c, c, g, optimize=True)
    dS_mo = np.einsum("pi,xpq,qj->xij", c, dS, c, optimize=True)
    dh_mo = np.einsum("pi,xpq,qj->xij", c, dh, c, optimize=True)
    dg_mo = np.einsum("pi,qj,rk,sl,xpqrs->xijkl", c, c, c, c, dg, optimize=True)
    return s_mo, h_mo, g_mo, dS_mo, dh_mo, dg_mo


def localize(mol, mf):
    occ = mf.mo_occ > 0
    blocks = []
    for mask in (occ, ~occ):
        c = mf.mo_coeff[:, mask]
        if c.shape[1] > 1:
            c = lo.EdmistonRuedenberg(mol, c).kernel()
        blocks.append(c)
    return np.hstack(blocks)


def write_dataset(out, name, arr, entries):
    arr = np.ascontiguousarray(arr, dtype="<f8")
    fname = name + ".f64"
    arr.tofile(os.path.join(out, fname))
    entries.append({"name": name, "shape": list(arr.shape),
                    "dtype": "f64-le", "file": fname})


def export(out, atoms_bohr, orbital_kind="canonical", jitter_seed=None,
           with_fci=True):
    atoms = [(s, np.array(r, dtype=float)) for s, r in atoms_bohr]
    if jitter_seed is not None:
        rng = np.random.default_rng(jitter_seed)
        atoms = [(s, r + rng.normal(0.0, 1e-6, 3)) for s, r in atoms]
    mol = gto.M(atom=[(s, tuple(r)) for s, r in atoms], basis=BASIS,
                unit="Bohr", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError("scf did not converge for " + out)

    c = mf.mo_coeff if orbital_kind == "canonical" else localize(mol, mf)
    s_ao = mol.intor("int1e_ovlp")
    h_ao = mf.get_hcore()
    g_ao = mol.intor("int2e")
    dS, dh, dg = ao_derivatives(mol, mf)
    S, h, g, dS, dh, dg = to_mo(c, s_ao, h_ao, g_ao, dS, dh, dg)

    natm = mol.natm
    de_nuc = rhf_grad.grad_nuc(mol).reshape(3 * natm)

    os.makedirs(out, exist_ok=True)
    entries = []
    write_dataset(out, "S", S, entries)
    write_dataset(out, "h", h, entries)
    write_dataset(out, "g", g, entries)
    write_dataset(out, "dS", dS, entries)
    write_dataset(out, "dh", dh, entries)
    write_dataset(out, "dg", dg, entries)
    write_dataset(out, "positions", mol.atom_coords(), entries)
    write_dataset(out, "charges", mol.atom_charges().astype(float), entries)
    write_dataset(out, "e_nuc", np.array(mol.energy_nuc()), entries)
    write_dataset(out, "de_nuc", de_nuc, entries)

    manifest = {
        "format_version": 1,
        "n_spatial": int(S.shape[0]),
        "n_electrons": int(mol.nelectron),
        "orbital_kind": orbital_kind,
        "basis": BASIS,
        "symbols": [mol.atom_pure_symbol(i) for i in range(natm)],
        "hf_energy": float(mf.e_tot),
        "datasets": entries,
    }
    if with_fci and 2 * S.shape[0] <= 16:
        e, _ = fci.direct_spin1.kernel(h, g, S.shape[0], mol.nelectron,
                                       conv_tol=1e-13, max_cycle=500)
        manifest["fci_energy_electronic"] = float(e)
    with open(os.path.join(out, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=1)
    print(out, S.shape[0], manifest.get("fci_energy_electronic"))


def chain(n, spacing=1.4):
    return [("H", (0.0, 0.0, spacing * k)) for k in range(n)]


def water():
    # experimental gas-phase monomer: r(OH) 0.9572 A, HOH 104.52 deg
    r = 0.9572 / BOHR_ANG
    half = np.deg2rad(104.52) / 2
    return [("O", (0.0, 0.0, 0.0)),
            ("H", (r * np.sin(half), 0.0, r * np.cos(half))),
            ("H", (-r * np.sin(half), 0.0, r * np.cos(half)))]


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(
        os.path.abspath(__file__))
    d_h2 = 0.74084 / BOHR_ANG
    export(os.path.join(root, "h2"), [("H", (0, 0, 0)), ("H", (0, 0, d_h2))])
    for k in (-2, -1, 1, 2):
        tag = ("m" if k < 0 else "p") + str(abs(k))
        export(os.path.join(root, "h2_z1_" + tag),
               [("H", (0, 0, 0)), ("H", (0, 0, d_h2 + k * 1e-3))])
    for n in (4, 6, 8, 10, 12):
        export(os.path.join(root, "hchain%d_loc" % n), chain(n), "localized")
    export(os.path.join(root, "hchain6_can"), chain(6), "canonical")
    export(os.path.join(root, "h2o"), water(), "canonical", jitter_seed=7)
    export(os.path.join(root, "h2o_loc"), water(), "localized", jitter_seed=7)


if __name__ == "__main__":
    main()
