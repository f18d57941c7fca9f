"""Fokker-Planck solutions away from the closed-form line kappa = 2 - a.

At kappa = 2 (beta = 4 in the usual convention) no closed form is known;
the field is still monotone in x and bounded by [0, 1].
"""

import numpy as np

from hardedge import fp

grid = fp.FPGrid.geometric(0.05, 8.0, 120, 50.0, 0.1, 120)
for kappa, a in ((2.0, 0.0), (2.0, 0.5), (0.5, 1.0)):
    sol = fp.solve_fp(kappa, a, grid)
    i = int(np.argmin(np.abs(grid.t_nodes - 1.0)))
    last = sol.F[i]
    print(f"kappa={kappa} a={a}  F(t=1) at x=0.5,1,4: "
          + ", ".join(f"{np.interp(x, grid.x_nodes, last):.4f}" for x in (0.5, 1.0, 4.0))
          + f"  monotone={bool(np.all(np.diff(last) >= -1e-9))}")
