"""The second solution changes sign as lambda crosses gamma1.

Data: h = 0, c+ = 1, c- = 0, mu = 1 on (0, 1), so u0 = 0 and gamma1 = pi^2.
Below gamma1 a positive mountain-pass solution appears.  Above it the
nontrivial solution is negative; it is the minimal solution and a local
minimizer, while the mountain pass between it and large positive fields
returns u0 = 0 itself.
"""

import numpy as np

from critgrad.branch import scenario_spec, solve_at, solve_u0
from critgrad.solve import SolveOptions
from critgrad.spectral import assemble_linearized, principal_eigenvalue

opts = SolveOptions()
spec0 = scenario_spec("th_h0_flip", 400)
u0 = solve_u0(spec0, opts)
ep = principal_eigenvalue(assemble_linearized(spec0, u0.u), spec0.cplus, spec0.ops)
print(f"gamma1 = {ep.gamma1:.8f}   (pi^2 = {np.pi**2:.8f})")
print(f"{'lambda/gamma1':>14} {'kind':>14} {'min u':>10} {'max u':>10} {'energy':>11} {'Morse':>6}")
for f in (0.25, 0.5, 0.75, 1.25, 1.5, 1.75):
    minimal, second, _, _ = solve_at(spec0.with_lambda(f * ep.gamma1), u0.u, opts)
    for r in (minimal, second):
        if r is None:
            continue
        print(f"{f:14.2f} {r.kind:>14} {r.u.min():10.4f} {r.u.max():10.4f} {r.energy:11.4e} "
              f"{str(r.notes.get('morse_index', '')):>6}")
