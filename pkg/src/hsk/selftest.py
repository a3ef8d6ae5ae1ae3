"""The acceptance suite: twelve numbered checks with fixed seeds and tolerances.

Each check returns a :class:`Check` whose ``details`` hold only deterministic values, so
the serialized report is bit-identical across runs.  Wall-clock times are collected
separately and never enter the report.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .cohomology_ring import degree_of_V, index_c1, ring_eval, scenario
from .elliptic_core import lattice_invariants
from .errors import HskError
from .flat_dirac import (
    FlatModelOperator,
    bump_source,
    decay_fit,
    green_norm_bound,
    k0_asymptotic_ratio,
    k0_l1,
    solve_flat,
    weitzenbock_check,
)
from .flat_dirac import _low_modes
from .higgs_model import build_higgs
from .hitchin_check import (
    abelian_solution,
    biquard_model,
    conformal_flag_check,
    direct_sum,
    perturb,
    residual,
    residual_report,
)
from .rational_map import deformation_rank, extract_map, hausdorff_to_curve, reconstruct_curve
from .spectral_curve import build_curve, eigenline_degree, involution_check, membership_at_poles

TAU = 2j
XI0 = 0.3 + 0.4j
TIME_LIMITS = {1: 1, 2: 1, 3: 30, 4: 120, 5: 1, 6: 300, 7: 300, 8: 120, 9: 1, 10: 60, 11: 120}


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.name}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "details": self.details}


# ----------------------------------------------------------------------------------------


def check_bessel_mass() -> Check:
    v = k0_l1()
    err = abs(v - 2 * math.pi)
    return Check(1, "Bessel mass ||K0||_L1 = 2π", err < 1e-6, {"k0_l1": v, "error": err})


def check_k0_asymptotics() -> Check:
    rows = {}
    ok = True
    for r in (10.0, 20.0):
        dev = abs(k0_asymptotic_ratio(r) - (1 - 1 / (8 * r) + 9 / (128 * r * r)))
        bound = 2 * 75 / (1024 * r**3)
        rows[str(int(r))] = {"deviation": dev, "bound": bound}
        ok &= dev < bound
    return Check(2, "K0 asymptotic expansion at r = 10, 20", ok, rows)


def check_flat_decay() -> Check:
    op = FlatModelOperator((math.pi, math.pi), M=256)
    low = _low_modes(op)[1]
    g = solve_flat(op, bump_source(op, modes=[tuple(int(v) for v in low[0])]))
    rate = decay_fit(g)
    lm = op.lambda_min
    rel = abs(rate / lm - 1)
    return Check(3, "flat-model decay rate ≈ λ_min = √2·π", rel < 0.05,
                 {"decay_rate": rate, "lambda_min": lm, "relative_error": rel})


GREEN_TWISTS = ((math.pi, math.pi), (1.0, 0.5), (0.4 * math.pi, 0.4 * math.pi))
GREEN_SEQUENCE = ((0.4 * math.pi, 0.4 * math.pi), (0.1 * math.pi, 0.1 * math.pi))


def check_green_bound() -> Check:
    rows = []
    ok = True
    for xi in GREEN_TWISTS:
        op = FlatModelOperator(xi)
        norm, bound = green_norm_bound(op)
        rows.append({"xi": list(xi), "norm": norm, "bound": bound, "lambda_min": op.lambda_min})
        ok &= norm <= bound
    seq = []
    for xi in GREEN_SEQUENCE:
        op = FlatModelOperator(xi)
        seq.append((green_norm_bound(op)[0], op.lambda_min))
    growth = seq[1][0] / seq[0][0]
    shrink = seq[0][1] / seq[1][1]
    ok &= growth >= 10 and abs(shrink - 4) < 1e-9
    return Check(4, "Green operator bound and growth as ξ → 0", bool(ok),
                 {"twists": rows, "growth": growth, "lambda_shrink": shrink})


def check_weitzenbock() -> Check:
    rows = []
    ok = True
    for xi in ((math.pi, math.pi), (1.0, 2.0), (0.3, -0.7)):
        w = weitzenbock_check(xi)
        rows.append({"xi": list(xi), **w})
        ok &= w["offdiag"] == 0.0 and w["diag"] <= 1e-12
    return Check(5, "Weitzenböck: D†D is the diagonal scalar laplacian", bool(ok), {"cases": rows})


def _curve_sweep():
    L = lattice_invariants(TAU)
    out = []
    for k in (1, 2, 3):
        for seed in range(1, 21):
            phi = build_higgs(k, L, XI0, seed=seed)
            C = build_curve(phi)
            out.append((k, seed, C))
    return out


def check_curve_invariants(sweep) -> Check:
    bad = []
    for k, seed, C in sweep:
        got = (C.genus, len(C.pi2_branch), len(C.pi1_branch), tuple(C.homology))
        want = (2 * k - 1, 4 * k, 4 * k - 4, (k, 2))
        sym = involution_check(C)
        mem = membership_at_poles(C)
        if got != want or not sym or not mem:
            bad.append({"k": k, "seed": seed, "got": list(got[:3]) + [list(got[3])],
                        "involution": bool(sym), "membership": bool(mem)})
    return Check(6, "spectral-curve genus, branch counts, homology, symmetry, poles", not bad,
                 {"curves": len(sweep), "failures": bad})


def check_riemann_hurwitz(sweep) -> Check:
    bad = [{"k": k, "seed": s} for k, s, C in sweep if len(C.pi2_branch) != len(C.pi1_branch) + 4]
    return Check(7, "Riemann–Hurwitz B2 = B1 + 4", not bad, {"curves": len(sweep), "failures": bad})


def check_rational_map() -> Check:
    L = lattice_invariants(TAU)
    rows = []
    ok = True
    for k in (1, 2, 3):
        C = build_curve(build_higgs(k, L, XI0, seed=7))
        R = extract_map(C, seed=0)
        samples = reconstruct_curve(R, L, n=200, seed=1)
        hd = hausdorff_to_curve(C, samples)
        r_inf = complex(R.at_infinity())
        wp0 = complex(L.wp(XI0))
        ranks = []
        for seed in range(1, 6):
            Rs = extract_map(build_curve(build_higgs(k, L, XI0, seed=100 + seed)), seed=seed)
            ranks.append(deformation_rank(Rs))
        row = {
            "k": k,
            "hausdorff": hd,
            "degree": R.degree,
            "R_inf_error": abs(r_inf - wp0) / max(1.0, abs(wp0)),
            "param_count": 2 * k + 1,
            "ranks": ranks,
        }
        rows.append(row)
        ok &= hd < 1e-8 and R.degree == k and row["R_inf_error"] < 1e-8
        ok &= all(r == 2 * k + 1 for r in ranks)
    return Check(8, "rational map roundtrip, degree, R(∞), deformation rank 2k+1", bool(ok), {"k": rows})


def check_cohomology() -> Check:
    bad = []
    for k in range(1, 11):
        got = {
            "ch_V": scenario("ch_V", k),
            "deg_V": degree_of_V(k),
            "ch_E_check": scenario("ch_E_check", k),
            "deg_I": scenario("deg_I", k).scalar(),
            "index_c1": index_c1(k),
        }
        want = {
            "ch_V": ring_eval("k - 2*th", k=k),
            "deg_V": -2,
            "ch_E_check": ring_eval("2 - k*t*p", k=k),
            "deg_I": 0,
            "index_c1": -k,
        }
        for key in want:
            if got[key] != want[key]:
                bad.append({"k": k, "quantity": key, "got": str(got[key]), "want": str(want[key])})
    return Check(9, "characteristic classes: ch V, deg V, ch Ě, deg I, index c1", not bad,
                 {"k_range": [1, 10], "failures": bad})


def check_hitchin() -> Check:
    L = lattice_invariants(TAU)
    ab = abelian_solution(L, XI0, c=0.2, epsilon=1.0)
    ab_rep = residual_report(ab)
    bq = biquard_model([0.3j, -0.3j], [1 + 0.5j, -1 - 0.5j])
    bq_rep = residual_report(bq)
    k2 = direct_sum(ab, abelian_solution(L, XI0, c=-0.2, epsilon=-1.0))
    flags = {
        "abelian": conformal_flag_check(ab),
        "perturbed": conformal_flag_check(perturb(ab, 1e-3, seed=3)),
        "k2": conformal_flag_check(perturb(k2, 1e-3, seed=4)),
    }
    slopes = [residual(perturb(ab, d, seed=3))[0] / d for d in (1e-4, 1e-3, 1e-2)]
    spread = max(slopes) / min(slopes) - 1
    ok = ab_rep.passes(1e-9) and bq_rep.passes(1e-9) and all(flags.values()) and spread < 0.2
    return Check(10, "Hitchin residuals, conformal flag, linear perturbation response", bool(ok), {
        "abelian": ab_rep.to_dict(),
        "biquard": bq_rep.to_dict(),
        "conformal": flags,
        "slopes": slopes,
        "slope_spread": spread,
    })


def check_eigenline_degree() -> Check:
    L = lattice_invariants(TAU)
    rows = []
    for k in (1, 2):
        for seed in range(1, 6):
            C = build_curve(build_higgs(k, L, XI0, seed=seed))
            try:
                d = eigenline_degree(C, seed=seed)
            except HskError as exc:  # report, do not mask
                d = f"error: {exc}"
            rows.append({"k": k, "seed": seed, "degree": d})
    ok = all(r["degree"] == 0 for r in rows)
    return Check(11, "eigenline bundle degree 0", ok, {"cases": rows})


# ----------------------------------------------------------------------------------------


def run_checks(progress=None) -> tuple:
    """(list of Check for criteria 1–11, {number: seconds})."""
    checks, times = [], {}

    def run(n, fn, *args):
        t = time.perf_counter()
        c = fn(*args)
        times[n] = time.perf_counter() - t
        checks.append(c)
        if progress:
            progress(c, times[n])
        return c

    run(1, check_bessel_mass)
    run(2, check_k0_asymptotics)
    run(3, check_flat_decay)
    run(4, check_green_bound)
    run(5, check_weitzenbock)
    t = time.perf_counter()
    sweep = _curve_sweep()
    build = time.perf_counter() - t
    run(6, check_curve_invariants, sweep)
    times[6] += build
    run(7, check_riemann_hurwitz, sweep)
    times[7] += build
    run(8, check_rational_map)
    run(9, check_cohomology)
    run(10, check_hitchin)
    run(11, check_eigenline_degree)
    return checks, times


def build_report(checks) -> dict:
    return {
        "schema": "hsk/1",
        "version": __version__,
        "command": "selftest",
        "config": {"tau": [TAU.real, TAU.imag], "xi0": [XI0.real, XI0.imag]},
        "invariants": [c.to_dict() for c in checks],
    }


def report_bytes(report: dict) -> bytes:
    """Canonical UTF-8 serialization; the CLI writes exactly these bytes plus a newline."""
    return json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False, default=_json_default).encode("utf-8")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o)}")


def determinism_check(first: bytes, second: bytes) -> Check:
    return Check(12, "determinism: repeated selftest reports are bit-identical", first == second,
                 {"bytes": len(first)})


__all__ = [
    "Check",
    "TIME_LIMITS",
    "run_checks",
    "build_report",
    "report_bytes",
    "determinism_check",
]
