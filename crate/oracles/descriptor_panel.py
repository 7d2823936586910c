"""Reference descriptor values for the frozen 50-molecule panel.

Computed with RDKit (logP, TPSA, counts) and a hand-entered table of IUPAC
2021 conventional atomic weights (molecular weight). Run once; the output
is committed and never regenerated by the build.

    python3 oracles/descriptor_panel.py > crates/core/tests/fixtures/descriptor_panel.tsv
"""

from rdkit import Chem, rdBase
from rdkit.Chem import Crippen, Lipinski, rdMolDescriptors

WEIGHTS = {
    "H": 1.008, "B": 10.81, "C": 12.011, "N": 14.007, "O": 15.999,
    "F": 18.998403162, "Na": 22.98976928, "Si": 28.085, "P": 30.973761998,
    "S": 32.06, "Cl": 35.45, "K": 39.0983, "Br": 79.904, "I": 126.90447,
}

PANEL = [
    ("methane", "C"),
    ("water", "O"),
    ("ethanol", "CCO"),
    ("benzene", "c1ccccc1"),
    ("pyridine", "c1ccncc1"),
    ("pyrrole", "c1cc[nH]c1"),
    ("furan", "c1ccoc1"),
    ("thiophene", "c1ccsc1"),
    ("imidazole", "c1c[nH]cn1"),
    ("naphthalene", "c1ccc2ccccc2c1"),
    ("indole", "c1ccc2[nH]ccc2c1"),
    ("quinoline", "c1ccc2ncccc2c1"),
    ("cyclohexane", "C1CCCCC1"),
    ("acetic_acid", "CC(=O)O"),
    ("acetone", "CC(C)=O"),
    ("acetonitrile", "CC#N"),
    ("nitrobenzene", "[O-][N+](=O)c1ccccc1"),
    ("dimethyl_sulfoxide", "C[S+](C)[O-]"),
    ("dimethyl_sulfone", "CS(C)(=O)=O"),
    ("trimethyl_phosphate", "COP(=O)(OC)OC"),
    ("chloroform", "ClC(Cl)Cl"),
    ("bromobenzene", "Brc1ccccc1"),
    ("iodomethane", "CI"),
    ("trifluorotoluene", "FC(F)(F)c1ccccc1"),
    ("aspirin", "CC(=O)Oc1ccccc1C(=O)O"),
    ("paracetamol", "CC(=O)Nc1ccc(O)cc1"),
    ("ibuprofen", "CC(C)Cc1ccc(C(C)C(=O)O)cc1"),
    ("caffeine", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"),
    ("nicotine", "CN1CCCC1c1cccnc1"),
    ("lidocaine", "CCN(CC)CC(=O)Nc1c(C)cccc1C"),
    ("diazepam", "CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21"),
    ("sulfamethoxazole", "Cc1cc(NS(=O)(=O)c2ccc(N)cc2)no1"),
    ("metformin", "CN(C)C(=N)NC(=N)N"),
    ("glycine_zwitterion", "[NH3+]CC(=O)[O-]"),
    ("sodium_acetate", "CC(=O)[O-].[Na+]"),
    ("tetramethylammonium_chloride", "C[N+](C)(C)C.[Cl-]"),
    ("urea", "NC(N)=O"),
    ("glucose", "OCC1OC(O)C(O)C(O)C1O"),
    ("cholesterol", "CC(C)CCCC(C)C1CCC2C3CC=C4CC(O)CCC4(C)C3CCC12C"),
    ("biphenyl", "c1ccc(-c2ccccc2)cc1"),
    ("diphenyl_ether", "c1ccc(Oc2ccccc2)cc1"),
    ("ethyl_acetate", "CCOC(C)=O"),
    ("n_methylacetamide", "CNC(C)=O"),
    ("thioanisole", "CSc1ccccc1"),
    ("phenylboronic_acid", "OB(O)c1ccccc1"),
    ("tetramethylsilane", "C[Si](C)(C)C"),
    ("morpholine", "C1COCCN1"),
    ("piperazine", "C1CNCCN1"),
    ("2_butanol", "CCC(C)O"),
    ("alanine", "CC(N)C(=O)O"),
]

COLUMNS = [
    "name", "smiles", "mol_weight", "logp", "tpsa", "n_atoms", "n_heavy",
    "n_fragments", "hba", "hbd", "n_rot_bonds", "n_rings", "max_ring_size",
    "n_carbons", "n_heteroatoms", "n_charged_groups", "total_charge",
    "n_aromatic_bonds", "n_stereocenters",
]


def stereocenters(mol):
    ranks = list(Chem.CanonicalRankAtoms(mol, breakTies=False))
    count = 0
    for atom in mol.GetAtoms():
        if atom.GetSymbol() != "C" or atom.GetIsAromatic():
            continue
        if atom.GetDegree() + atom.GetTotalNumHs() != 4 or atom.GetTotalNumHs() > 1:
            continue
        if any(b.GetBondType() != Chem.BondType.SINGLE for b in atom.GetBonds()):
            continue
        nbr = [ranks[n.GetIdx()] for n in atom.GetNeighbors()]
        if len(set(nbr)) == len(nbr):
            count += 1
    return count


def row(name, smiles):
    mol = Chem.MolFromSmiles(smiles)
    withh = Chem.AddHs(mol)
    ring_info = mol.GetRingInfo()
    rings = ring_info.AtomRings()
    heavy = mol.GetNumHeavyAtoms()
    carbons = sum(a.GetSymbol() == "C" for a in mol.GetAtoms())
    values = {
        "name": name,
        "smiles": smiles,
        "mol_weight": "%.6f" % sum(WEIGHTS[a.GetSymbol()] for a in withh.GetAtoms()),
        "logp": "%.6f" % Crippen.MolLogP(mol),
        "tpsa": "%.4f" % rdMolDescriptors.CalcTPSA(mol),
        "n_atoms": withh.GetNumAtoms(),
        "n_heavy": heavy,
        "n_fragments": len(Chem.GetMolFrags(mol)),
        "hba": Lipinski.NOCount(mol),
        "hbd": Lipinski.NHOHCount(mol),
        "n_rot_bonds": rdMolDescriptors.CalcNumRotatableBonds(
            mol, rdMolDescriptors.NumRotatableBondsOptions.Strict
        ),
        "n_rings": len(rings),
        "max_ring_size": max((len(r) for r in rings), default=0),
        "n_carbons": carbons,
        "n_heteroatoms": heavy - carbons,
        "n_charged_groups": sum(a.GetFormalCharge() != 0 for a in mol.GetAtoms()),
        "total_charge": Chem.GetFormalCharge(mol),
        "n_aromatic_bonds": sum(b.GetIsAromatic() for b in mol.GetBonds()),
        "n_stereocenters": stereocenters(mol),
    }
    return "\t".join(str(values[c]) for c in COLUMNS)


def main():
    print("# descriptor reference panel")
    print("# generated by oracles/descriptor_panel.py with RDKit %s" % rdBase.rdkitVersion)
    print("\t".join(COLUMNS))
    for name, smiles in PANEL:
        print(row(name, smiles))


if __name__ == "__main__":
    main()
