"""Residuals of the Hitchin equations for exact, gauged and perturbed configurations.

Run:  python3 demos/hitchin_residuals.py
"""

from hsk.elliptic_core import lattice_invariants
from hsk.hitchin_check import (
    abelian_solution,
    biquard_model,
    direct_sum,
    perturb,
    pure_gauge,
    residual,
    residual_report,
)

L = lattice_invariants(2j)
xi0 = 0.3 + 0.4j

ab = abelian_solution(L, xi0, c=0.2, epsilon=1.0)
rep = residual_report(ab)
print(f"abelian k=1: r1={rep.r1:.2e} r2={rep.r2:.2e} (scale {rep.scale:.3g}), "
      f"{rep.sites} sites, {rep.skipped} skipped near the punctures")

bq = residual_report(biquard_model([0.3j, -0.3j], [1 + 0.5j, -1 - 0.5j]))
print(f"local model: r1={bq.r1:.2e} r2={bq.r2:.2e}")

for d in (1e-4, 1e-3, 1e-2):
    r1, _ = residual(perturb(ab, d, seed=3))
    print(f"perturbation {d:.0e}: r1/delta = {r1 / d:.2f}")

for M in (256, 512):
    a = abelian_solution(L, xi0, c=0.2, epsilon=1.0, M=M)
    b = abelian_solution(L, xi0, c=-0.2, epsilon=-1.0, M=M)
    r1, r2 = residual(pure_gauge(direct_sum(a, b)))
    print(f"nonabelian gauge transform, M={M}: r1={r1:.3e} r2={r2:.3e}")
