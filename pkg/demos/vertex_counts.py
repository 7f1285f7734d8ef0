"""How many deterministic strategies does one bit of communication add?

Counts the vertices of the local and one-bit polytopes for a few scenarios
and compares against the closed formula. Note that 33+1 and 42+1 end up with
the same number of vertices.
"""
import time

from bellcomm.scenario import Scenario, expected_vertex_count, polytope_dimension, vertex_matrix

print(f"{'scenario':>9} {'dim':>4} {'vertices':>9} {'formula':>8}")
for X, Y in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (2, 4), (4, 3)]:
    for comm in (0, 1):
        s = Scenario(X, Y, comm)
        t = time.perf_counter()
        n = len(vertex_matrix(s))
        dt = time.perf_counter() - t
        print(f"{str(s):>9} {polytope_dimension(s):>4} {n:>9} {expected_vertex_count(s):>8}"
              f"   ({dt * 1e3:.1f} ms)")
