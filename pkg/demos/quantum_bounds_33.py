"""Quantum, local and one-bit bounds of some 33+1 facets.

For each facet: certify it against the 1408 one-bit vertices, compute L and C
exactly, run the see-saw on its NS projection, and print the figure of merit
and the white-noise resistance.
"""
import numpy as np

from bellcomm.bridge import I3322, I3322_PERM, I3322_SYM, REFERENCE_FACETS_33, chsh_embeddings, \
    decompose_as_sum, ns_project
from bellcomm.io import pretty
from bellcomm.polytope import VRep, is_facet
from bellcomm.quantum import SeesawConfig, bounds_report
from bellcomm.scenario import Scenario, vertex_matrix

s = Scenario(3, 3, 1)
full = VRep(vertex_matrix(s))
cfg = SeesawConfig(restarts=50, seed=0)
lib = [I3322, I3322_PERM, I3322_SYM] + chsh_embeddings(s)
names = ["I3322", "I3322perm", "I3322sym"] + ["CHSH"] * len(chsh_embeddings(s))

print(" facet  facet?  L  C       Q   merit  lambda  schmidt")
for key, q in REFERENCE_FACETS_33.items():
    r = bounds_report(q, cfg)
    lam = f"{r.lam:.4f}" if r.lam is not None else "   -  "
    sc = r.model.schmidt
    print(f"{key:>6} {str(bool(is_facet(q, full))):>7} {r.L:>2} {r.C:>2} {r.Q:>7.4f} "
          f"{r.merit:>7.4f} {lam:>7}  ({sc[0]:.4f}, {sc[1]:.4f})")

print("\nNS projections as sums of relabeled known inequalities:")
for key, q in REFERENCE_FACETS_33.items():
    d = decompose_as_sum(ns_project(q), lib)
    if d is None:
        print(f"  {key}: no two-term decomposition")
    else:
        print(f"  {key}: {names[d.first_source]} + {names[d.second_source]}")

print("\nfacet 232 and its NS projection:")
print(pretty(REFERENCE_FACETS_33[232]))
print(pretty(ns_project(REFERENCE_FACETS_33[232])))
