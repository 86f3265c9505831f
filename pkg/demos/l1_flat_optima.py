"""
With an L1 residual the per-support fit can have a whole face of minimizers.

We look at a 3x3 instance whose 2-sparse level has such a face: a point in
the middle of the face has no zero residuals, which is enough to slide along
it.  The analyzer reports the level as infinite and hands back a second
optimal point as evidence.

Run:  python3 demos/l1_flat_optima.py
"""

import numpy as np

from l0lab import Identity, Instance, check_h2, levels, p1_report, residual_staircase
from l0lab.cardinality import l1_face_point
from l0lab.linalg import l1_optimal_vertices

np.set_printoptions(precision=4, suppress=True)

A = np.array([[-3.0, 2.0, 2.0], [-2.0, 1.0, 0.0], [-3.0, 3.0, 2.0]])
b = np.array([-1.0, -3.0, -3.0])
inst = Instance(A, b, p=1)
seq = levels(residual_staircase(inst), Identity())
print("s =", seq.s.tolist(), " rho =", seq.rho.tolist())
print("columns free of vanishing signed sums:", [check_h2(A[:, j]) for j in range(3)])

for k in range(seq.L + 1):
    rep = p1_report(seq, k)
    print(f"level {k} (s = {seq.levels[k].s}): {rep.finite}, witnesses {rep.witnesses}")

k = 1
S = seq.levels[k].supports[0]
verts = l1_optimal_vertices(A[:, list(S)], b)
print(f"support {S}: {len(verts)} optimal vertices")
for v in verts:
    print("  vertex", v, " residual", A[:, list(S)] @ v - b)
x = l1_face_point(seq, S)
print("face centroid", x, " residual", A @ x - b)
for y in p1_report(seq, k).certificate:
    print("second optimum", y, f" L1 residual {np.abs(A @ y - b).sum():.12f} vs {seq.levels[k].rho}")
