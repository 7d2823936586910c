"""Molecules on either side of each feasibility bound, with the rules each
one violates.

Descriptor values come from RDKit (logP, TPSA, counts) and the atomic weight
table shared with the descriptor panel. The canonical key length bound is not
covered here: it depends on the crate's own key and is checked with synthetic
values in the tests. Run once; the output is committed.

    python3 oracles/feasibility_boundary.py > crates/core/tests/fixtures/feasibility_boundary.tsv
"""

from rdkit import Chem, rdBase
from rdkit.Chem import Crippen, Lipinski, rdMolDescriptors

from descriptor_panel import WEIGHTS

POLYOL = "OC(C(O)C(O)C(O)C(O)C(O)C(O)O)C(O)C(O)C(O)C(O)C(O)C(O)"
IODO = "C(I)(I)(I)" + "C(I)(I)" * 7

MOLECULES = [
    ("aspirin", "CC(=O)Oc1ccccc1C(=O)O"),
    ("caffeine", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"),
    ("three_fragments", "CCO.CCN.CCC"),
    ("four_fragments", "CCO.CCN.CCC.CCCl"),
    ("atoms_150", "C=C" + "C" * 48),
    ("atoms_151", "OC" + "C" * 48 + "O"),
    ("mw_below", IODO + "C(Br)(Cl)C(F)(F)C(F)(F)(F)"),
    ("mw_above", IODO + "C(Br)(Br)C(F)CCC"),
    ("hba_20", "C" + "OC" * 20),
    ("hba_21", "C" + "OC" * 21),
    ("hbd_15", "C" + "NC" * 15),
    ("hbd_16", "C" + "NC" * 16),
    ("logp_high_inside", "ClC(Cl)(Cl)" + "C(Cl)(Cl)" * 19 + "C"),
    ("logp_high_outside", "ClC(Cl)(Cl)" + "C(Cl)(Cl)" * 19 + "CCC"),
    ("logp_low_inside", POLYOL + "C(=O)C=O"),
    ("logp_low_outside", POLYOL + "C(=O)C(=O)C(=O)C=O"),
    ("tpsa_high_inside", "N#C" + "C(C#N)" * 12 + "C(N)" * 7 + "C"),
    ("tpsa_outside", "N#C" + "C(C#N)" * 14 + "C(N)" * 7 + "C"),
    ("rotatable_60", "CS" * 31 + "C"),
    ("rotatable_61", "CS" * 31 + "CC"),
    ("polyiodo_chain", "C" + "C(I)(I)" * 9 + "C"),
    ("ethanol", "CCO"),
    ("glucose", "OCC1OC(O)C(O)C(O)C1O"),
    ("two_fragments", "CCO.CCN"),
    ("atoms_149", "C" * 49),
    ("atoms_152", "C" * 50),
    ("hba_19", "C" + "OC" * 19),
    ("hbd_14", "C" + "NC" * 14),
    ("rotatable_59", "CS" * 30 + "CC"),
    ("several_violations", "C" * 70 + ".C.C.C"),
]

BOUNDS = [
    ("fragments", "n_fragments", lambda x: x <= 3),
    ("mol_weight", "mol_weight", lambda x: x <= 2500),
    ("n_atoms", "n_atoms", lambda x: x <= 150),
    ("hba", "hba", lambda x: x <= 20),
    ("hbd", "hbd", lambda x: x <= 15),
    ("logp", "logp", lambda x: -10 <= x <= 25),
    ("tpsa", "tpsa", lambda x: x <= 500),
    ("rotatable_bonds", "n_rot_bonds", lambda x: x <= 60),
]

COLUMNS = ["name", "smiles", "n_fragments", "mol_weight", "n_atoms", "hba", "hbd",
           "logp", "tpsa", "n_rot_bonds", "violated"]


def values(smiles):
    mol = Chem.MolFromSmiles(smiles)
    withh = Chem.AddHs(mol)
    return {
        "n_fragments": len(Chem.GetMolFrags(mol)),
        "mol_weight": sum(WEIGHTS[a.GetSymbol()] for a in withh.GetAtoms()),
        "n_atoms": withh.GetNumAtoms(),
        "hba": Lipinski.NOCount(mol),
        "hbd": Lipinski.NHOHCount(mol),
        "logp": Crippen.MolLogP(mol),
        "tpsa": rdMolDescriptors.CalcTPSA(mol),
        "n_rot_bonds": rdMolDescriptors.CalcNumRotatableBonds(
            mol, rdMolDescriptors.NumRotatableBondsOptions.Strict
        ),
    }


def main():
    print("# feasibility boundary molecules")
    print("# generated by oracles/feasibility_boundary.py with RDKit %s" % rdBase.rdkitVersion)
    print("\t".join(COLUMNS))
    for name, smiles in MOLECULES:
        v = values(smiles)
        violated = [rule for rule, field, ok in BOUNDS if not ok(v[field])]
        cells = [name, smiles]
        for c in COLUMNS[2:-1]:
            x = v[c]
            cells.append("%.6f" % x if isinstance(x, float) else str(x))
        cells.append(",".join(violated) or "-")
        print("\t".join(cells))


if __name__ == "__main__":
    main()
