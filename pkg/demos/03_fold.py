"""Two positive branches merge at a fold lambda_bar and then disappear.

Data: h = 0.05, c+ = 1 on (0, 1).  Bisection on solvability brackets
lambda_bar; along the way the minimal and the mountain-pass solutions
approach each other.
"""

import numpy as np

from critgrad.branch import find_lambda_bar, scenario_spec, solve_u0, sweep
from critgrad.solve import SolveOptions

opts = SolveOptions()
spec0 = scenario_spec("th2_fold", 200)
u0 = solve_u0(spec0, opts)
lo, hi = find_lambda_bar(spec0, (4.0, 16.0), opts, u0=u0.u)
print(f"lambda_bar in [{lo:.6f}, {hi:.6f}]")
grid = [lo * f for f in (0.2, 0.5, 0.8, 0.9, 0.95, 0.99)]
diagram = sweep(spec0, grid, opts, scenario="fold", u0_record=u0)
pairs = {}
for r in diagram.records:
    pairs.setdefault(r.lam, {})[r.kind] = r
print(f"{'lambda':>10} {'max u1':>10} {'max u2':>10} {'sup |u2 - u1|':>14}")
for lam in grid:
    m, s = pairs[lam]["minimal"], pairs[lam]["mountain_pass"]
    print(f"{lam:10.4f} {m.u.max():10.4f} {s.u.max():10.4f} {np.max(np.abs(s.u - m.u)):14.4f}")
