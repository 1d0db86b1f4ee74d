"""Solvability at lambda = 0 is decided by the sign of m_d.

Data: h = s (constant), c- = 0, mu = 1 on (0, 1).  Then m_0(s) = 1 - s/pi^2
and a solution exists exactly while m_0 > 0.
"""

import numpy as np

from critgrad.branch import scenario_spec, solve_u0
from critgrad.errors import SolverError
from critgrad.model import ProblemSpec
from critgrad.spectral import compute_md

base = scenario_spec("coercive_iff", 200)
print(f"{'s/pi^2':>8} {'m_0':>10} {'1 - s/pi^2':>11} {'solution':>9}")
for k in (0.5, 0.9, 0.99, 1.01, 1.1, 1.5):
    s = k * np.pi**2
    h = np.full(base.mesh.size, s)
    md = compute_md(base.ops, base.cminus, h, base.mu).value
    try:
        rec = solve_u0(ProblemSpec(base.ops, base.mu, base.cplus, base.cminus, h))
        found = f"{rec.u.max():9.3f}"
    except SolverError:
        found = "none"
    print(f"{k:8.2f} {md:10.6f} {1 - k:11.6f} {found:>9}")
print("The last column gives max u when a solution exists.")
