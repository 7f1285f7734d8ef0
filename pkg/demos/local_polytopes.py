"""Facets of the 22 and 33 local polytopes, grouped into relabeling classes.

22 gives positivity and CHSH; 33 adds I3322.
"""
import time

from bellcomm.bridge import I3322, chsh
from bellcomm.io import pretty
from bellcomm.polytope import VRep, enumerate_facets
from bellcomm.scenario import Scenario, vertex_matrix
from bellcomm.symmetry import canonical_form, reduce_to_classes

for s in [Scenario(2, 2), Scenario(3, 3)]:
    t = time.perf_counter()
    facets = enumerate_facets(VRep(vertex_matrix(s)))
    cat = reduce_to_classes([f.ineq for f in facets], s)
    print(f"{s}: {len(facets)} facets, {len(cat)} classes ({time.perf_counter() - t:.1f} s)")
    for c in cat.classes:
        print(f"  class {c.class_id}: orbit {c.orbit_size}, bound {c.representative.bound}")

s = Scenario(3, 3)
keys = reduce_to_classes([f.ineq for f in enumerate_facets(VRep(vertex_matrix(s)))], s).keys()
print("\nCHSH class present:", canonical_form(chsh(s)).key() in keys)
print("I3322 class present:", canonical_form(I3322).key() in keys)
print("\nI3322 (header row e'_y, first column f_x):")
print(pretty(I3322))
