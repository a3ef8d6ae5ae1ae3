"""Screened Green kernels on the flat model: decay rate and operator norm as the twist shrinks.

Run:  python3 demos/flat_model.py
"""

import math

from hsk.flat_dirac import FlatModelOperator, bump_source, decay_fit, green_norm_bound, k0_l1, solve_flat

print(f"||K0||_L1 = {k0_l1():.12f}   (2 pi = {2 * math.pi:.12f})")

op = FlatModelOperator((math.pi, math.pi), M=256)
g = solve_flat(op, bump_source(op))
print(f"corner twist: fitted decay {decay_fit(g):.4f}, lambda_min {op.lambda_min:.4f}")

print(f"{'twist':>10} {'lambda_min':>11} {'||G||':>10} {'1+1/lam^2':>10}")
for s in (0.4, 0.2, 0.1):
    op = FlatModelOperator((s * math.pi, s * math.pi))
    norm, bound = green_norm_bound(op, box_points=64)
    print(f"{s:>8.1f}pi {op.lambda_min:>11.4f} {norm:>10.3f} {bound:>10.3f}")
