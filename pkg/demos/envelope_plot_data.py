"""
Lower envelope of the lines ``f_i(lam) = s_i + lam * rho_i`` for a hand-made
level table in which one line never touches the envelope.

Writes ``envelope_lines.csv`` (one row per line) and ``envelope_curve.csv``
(F sampled on a grid) into the current directory, ready for any plotting tool.

Run:  python3 demos/envelope_plot_data.py
"""

import csv

import numpy as np

from l0lab import breakpoints, line_records, marginal_F
from l0lab.datasets import synthetic_levels

seq = synthetic_levels()
bp = breakpoints(seq)
print("s   =", seq.s.tolist())
print("rho =", np.round(seq.rho, 4).tolist())
print("breakpoints", bp.lam, "active lines", bp.t)
for i in range(bp.K):
    print(f"  at lam = {bp.lam[i]:g} the lines {sorted(bp.tie_set(i))} meet line {bp.t[i]}")

rows = line_records(seq, bp)
for r in rows:
    state = "on the envelope" if r["active"] else "never active"
    print(f"  line {r['level_index']}: {r['intercept']} + {r['slope']:.4f} lam, {state}")

with open("envelope_lines.csv", "w", newline="") as fh:
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)

F = marginal_F(seq, bp)
grid = np.linspace(0.05, 6.0, 120)
with open("envelope_curve.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["lambda", "F", "active"])
    for lam in grid:
        value, active = F.evaluate(lam)
        w.writerow([f"{lam:.4f}", f"{value:.6f}", " ".join(map(str, sorted(active)))])

# line 3 sits strictly above the envelope everywhere
gap = min(seq.s[3] + lam * seq.rho[3] - F(lam) for lam in grid)
print(f"smallest gap between line 3 and F on the grid: {gap:.4f}")
print("wrote envelope_lines.csv and envelope_curve.csv")
