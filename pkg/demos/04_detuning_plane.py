"""Which state a delayed pulse pair ends in, across the (delta_p, delta_s) plane.

A coarse sweep (default 21 x 21, peak area 500, counterintuitive order) is
compared point by point with the prediction from the surface topology. The
predicted regions are bounded by the axes and by the two hyperbolas where
a crossing sits exactly at the peak Rabi frequency. Pass a grid size and an
area on the command line for a finer or a quicker picture, e.g.
``python 04_detuning_plane.py 41 500`` or ``python 04_detuning_plane.py 21 100``.
A P3 heat map is written as ``detuning_plane_p3.pgm`` in the current
directory.
"""
import sys

import numpy as np

from adiabatic_topology.cli import write_pgm
from adiabatic_topology.sweep import SweepSpec, boundary_curves, efficiency_map, region_prediction

n = int(sys.argv[1]) if len(sys.argv) > 1 else 21
area = float(sys.argv[2]) if len(sys.argv) > 2 else 500.0
axis = np.linspace(-1.2, 1.2, n)
spec = SweepSpec(axis, axis, "counterintuitive", tau=area)
res = efficiency_map(spec)

print(f"dominant final state (> 0.9) vs prediction; rows delta_p from {axis[-1]} down to {axis[0]},"
      f" columns delta_s left to right")
print("  upper case: dominant state matches the prediction, '.' no dominant state, '!' mismatch")
agree = total = 0
for i in range(n - 1, -1, -1):
    row = ""
    for j in range(n):
        try:
            pred = region_prediction(axis[i], axis[j], spec.omega_max, spec.sequence)
        except ValueError:
            row += " "
            continue
        pops = res.populations[i, j]
        k = int(np.argmax(pops)) + 1
        total += 1
        if pops[k - 1] <= 0.9:
            row += "."
        elif k == pred:
            row += "ABC"[k - 1]
            agree += 1
        else:
            row += "!"
    print("  " + row)
print(f"A = |1>, B = |2>, C = |3>;  {agree} of {total} points agree")

curves = boundary_curves(spec.omega_max, axis, axis)
print("boundary polylines:", {name: len(segs) for name, segs in curves.items()})
write_pgm("detuning_plane_p3.pgm", res.p3)
print("wrote detuning_plane_p3.pgm")
