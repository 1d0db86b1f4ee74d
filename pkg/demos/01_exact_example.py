"""Recover a known solution and watch the error shrink with the mesh.

On (-2pi, 2pi) with c+ = cos x + 1 for x >= 0 (zero before) and
h = cos x - sin^2 x for x < 0 (zero after), the solution at lambda = 0 is
u0 = cos x - 1 on the left half and 0 on the right.  Note c+ u0 vanishes
although h does not.
"""

import numpy as np

from critgrad.branch import scenario_spec, solve_u0

print(f"{'n':>6} {'max error':>12} {'ratio':>8}")
prev = None
for n in (100, 200, 400, 800, 1600):
    spec = scenario_spec("example1d", n)
    x = spec.mesh.coords[:, 0]
    u = solve_u0(spec).u
    err = np.max(np.abs(u - np.where(x < 0, np.cos(x) - 1, 0.0)))
    ratio = "" if prev is None else f"{prev / err:8.3f}"
    print(f"{n:6d} {err:12.3e} {ratio}")
    prev = err
print("A ratio near 4 per doubling means second-order accuracy.")
print("max |c+ u0| at n = 1600:", float(np.max(np.abs(spec.cplus * u))))
