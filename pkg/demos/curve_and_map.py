"""Build a rank-2 Higgs field, its spectral curve and the rational map, then go back.

Run:  python3 demos/curve_and_map.py
"""

import numpy as np

from hsk.elliptic_core import lattice_invariants
from hsk.higgs_model import build_higgs
from hsk.rational_map import deformation_rank, extract_map, hausdorff_to_curve, reconstruct_curve
from hsk.spectral_curve import build_curve, involution_check

L = lattice_invariants(2j)
xi0 = 0.3 + 0.4j

for k in (1, 2, 3):
    phi = build_higgs(k, L, xi0, seed=7)
    C = build_curve(phi)
    R = extract_map(C, seed=0)
    pts = reconstruct_curve(R, L, n=100, seed=1)
    print(f"k={k}: genus {C.genus}, branch points pi1={len(C.pi1_branch)} pi2={len(C.pi2_branch)}, "
          f"symmetric={involution_check(C)}")
    print(f"      R has degree {R.degree}, R(inf) - wp(xi0) = {abs(R.at_infinity() - L.wp(xi0)):.2e}")
    print(f"      roundtrip Hausdorff distance {hausdorff_to_curve(C, pts):.2e}, "
          f"deformation rank {deformation_rank(R)} (expected {2 * k + 1})")

finite = np.array([w for w in build_curve(build_higgs(2, L, xi0, seed=7)).pi2_branch if np.isfinite(w)])
print("finite pi2 branch values for k=2:", np.round(finite, 4))
