"""Command-line front end.

    hsk curve     --k 2 --tau 0+2i --xi0 0.3+0.4i --seed 7
    hsk ratmap    --k 2 --seed 7
    hsk flatmodel --xi 3.14159,3.14159
    hsk chern     --k 5
    hsk hitchin   --grid 256 --metric poincare
    hsk selftest

Every command prints a JSON report (schema "hsk/1") and, with ``--out DIR``, also writes
it to DIR/<command>.json next to the command's CSV files.  Exit codes: 0 success,
1 invariant violation or numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HskError

SCHEMA = "hsk/1"
COMMANDS = ("curve", "ratmap", "flatmodel", "chern", "hitchin", "selftest")

CSV_HELP = {
    "curve": "branch.csv: map (pi1|pi2), re, im, multiplicity  [pi2 values at infinity: re=im=inf]",
    "ratmap": "coefficients.csv: power, num_re, num_im, den_re, den_im; "
    "samples.csv: xi_re, xi_im, w_re, w_im (reconstructed curve points)",
    "flatmodel": "spectrum.csv: n1, n2, lambda (lowest 25 modes)",
    "chern": "chern.csv: scenario, monomial, coefficient",
    "hitchin": "residuals.csv: configuration, r1, r2, scale1, scale2, passed",
    "selftest": "selftest.csv: criterion, name, passed",
}


class UsageError(Exception):
    pass


def parse_complex(value) -> complex:
    """'a+bi' / 'a+bj' strings, plain numbers or [re, im] pairs."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise UsageError(f"complex pair must have two entries: {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex)):
        return complex(value)
    text = str(value).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise UsageError(f"cannot parse complex number {value!r}") from None


def parse_pair(value) -> tuple:
    if isinstance(value, (list, tuple)):
        parts = value
    else:
        parts = str(value).split(",")
    try:
        out = tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"expected two comma-separated reals, got {value!r}") from None
    if len(out) != 2:
        raise UsageError(f"expected two comma-separated reals, got {value!r}")
    return out


@dataclass
class RunConfig:
    command: str
    tau: complex = 2j
    k: int = 2
    xi0: complex = 0.3 + 0.4j
    epsilon: complex | None = None
    seed: int = 0
    out: str | None = None
    grid: int | None = None
    cutoff: int | None = None
    tol: float | None = None
    metric: str = "euclidean"
    xi: tuple = (math.pi, math.pi)
    repeat: int = 1

    def validate(self):
        if self.tau.imag <= 0:
            raise UsageError("Im(tau) must be positive")
        if self.k < 1:
            raise UsageError("k must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tolerances must be positive")
        if self.grid is not None and self.grid < 8:
            raise UsageError("grid must be >= 8")
        if self.cutoff is not None and self.cutoff < 1:
            raise UsageError("cutoff must be >= 1")
        if self.metric not in ("euclidean", "poincare"):
            raise UsageError("metric must be euclidean or poincare")
        if self.repeat < 1:
            raise UsageError("repeat must be >= 1")

    def to_json(self) -> dict:
        d = asdict(self)
        for key in ("tau", "xi0", "epsilon"):
            if d[key] is not None:
                d[key] = [d[key].real, d[key].imag]
        d["xi"] = list(d["xi"])
        del d["out"]  # output location does not affect results
        return d


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsk", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"hsk {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        s = sub.add_parser(name, help=f"run the {name} pipeline", epilog="CSV output: " + CSV_HELP[name])
        s.add_argument("--config", help="JSON config file; flags override its entries")
        s.add_argument("--k", type=int, help="rank (default 2)")
        s.add_argument("--tau", help="lattice parameter, e.g. 0+2i (default 2i)")
        s.add_argument("--xi0", help="pole position ξ₀ (default 0.3+0.4i)")
        s.add_argument("--epsilon", help="residue scale ε (default: seeded random)")
        s.add_argument("--seed", type=int, help="RNG seed (default 0)")
        s.add_argument("--out", help="output directory for report JSON and CSVs")
        s.add_argument("--grid", type=int, help="grid size M (flatmodel/hitchin, default 256)")
        s.add_argument("--cutoff", type=int, help="Fourier cutoff N (flatmodel, default 8)")
        s.add_argument("--tol", type=float, help="pass/fail tolerance (command specific)")
        s.add_argument("--metric", choices=("euclidean", "poincare"), help="metric flag (hitchin)")
        if name == "flatmodel":
            s.add_argument("--xi", help="twist ξ as 'x,y' (default π,π)")
        if name == "selftest":
            s.add_argument("--repeat", type=int, help="run the suite this many times and compare reports")
    return p


def make_config(args) -> RunConfig:
    base: dict = {}
    if getattr(args, "config", None):
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(base, dict):
            raise UsageError("config file must hold a JSON object")
    merged = dict(base)
    for key in ("k", "tau", "xi0", "epsilon", "seed", "out", "grid", "cutoff", "tol", "metric", "xi", "repeat"):
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    unknown = {k for k in merged if k not in RunConfig.__dataclass_fields__ or k == "command"}
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(command=args.command)
    try:
        for key, v in merged.items():
            if key in ("tau", "xi0"):
                setattr(cfg, key, parse_complex(v))
            elif key == "epsilon":
                cfg.epsilon = None if v is None else parse_complex(v)
            elif key == "xi":
                cfg.xi = parse_pair(v)
            elif key in ("k", "seed", "grid", "cutoff", "repeat"):
                setattr(cfg, key, None if v is None else int(v))
            elif key == "tol":
                cfg.tol = None if v is None else float(v)
            else:
                setattr(cfg, key, v)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg


# ----------------------------------------------------------------------------------------
# helpers


def _c(z):
    z = complex(z)
    if not np.isfinite(z):
        return "inf"
    return [z.real, z.imag]


def _inv(name, passed, value=None, expected=None) -> dict:
    d = {"name": name, "passed": bool(passed)}
    if value is not None:
        d["value"] = value
    if expected is not None:
        d["expected"] = expected
    return d


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False, default=_json_default)


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ----------------------------------------------------------------------------------------
# commands (each returns (result dict, invariants list, {filename: (header, rows)}))


def cmd_curve(cfg: RunConfig):
    from .elliptic_core import lattice_invariants
    from .higgs_model import build_higgs
    from .spectral_curve import build_curve, involution_check, membership_at_poles

    L = lattice_invariants(cfg.tau)
    phi = build_higgs(cfg.k, L, cfg.xi0, seed=cfg.seed, epsilon=cfg.epsilon)
    C = build_curve(phi)
    k = cfg.k
    b1, b2 = len(C.pi1_branch), len(C.pi2_branch)
    sym, mem = involution_check(C), membership_at_poles(C)
    result = C.to_dict()
    result["branch_counts"] = [b1, b2]
    invariants = [
        _inv("genus = 2k−1", C.genus == 2 * k - 1, C.genus, 2 * k - 1),
        _inv("|π₁ branch| = 4k−4", b1 == 4 * k - 4, b1, 4 * k - 4),
        _inv("|π₂ branch| = 4k", b2 == 4 * k, b2, 4 * k),
        _inv("B₂ = B₁ + 4", b2 == b1 + 4),
        _inv("homology class (k, 2)", tuple(C.homology) == (k, 2), list(C.homology), [k, 2]),
        _inv("τ-symmetry", sym),
        _inv("(±ξ₀, ∞) on the curve", mem),
    ]
    mult = list(C.pi1_zeros[1])
    rows = [("pi1", z.real, z.imag, m) for z, m in zip(C.pi1_branch, mult + [1] * (b1 - len(mult)))]
    rows += [("pi2", *(_c(w) if np.isfinite(w) else ("inf", "inf")), 1) for w in C.pi2_branch]
    return result, invariants, {"branch.csv": (("map", "re", "im", "multiplicity"), rows)}


def cmd_ratmap(cfg: RunConfig):
    from .elliptic_core import lattice_invariants
    from .higgs_model import build_higgs
    from .rational_map import deformation_rank, extract_map, hausdorff_to_curve, reconstruct_curve
    from .spectral_curve import build_curve

    tol = cfg.tol or 1e-8
    L = lattice_invariants(cfg.tau)
    C = build_curve(build_higgs(cfg.k, L, cfg.xi0, seed=cfg.seed, epsilon=cfg.epsilon))
    R = extract_map(C, seed=cfg.seed)
    samples = reconstruct_curve(R, L, n=200, seed=cfg.seed + 1)
    hd = hausdorff_to_curve(C, samples)
    wp0 = complex(L.wp(cfg.xi0))
    r_inf = complex(R.at_infinity())
    rank = deformation_rank(R)
    result = R.to_dict(cfg.xi0)
    result.update({"hausdorff": hd, "deformation_rank": rank, "param_count": 2 * cfg.k + 1})
    invariants = [
        _inv("Hausdorff(extract → reconstruct) < tol", hd < tol, hd, tol),
        _inv("deg R = k", R.degree == cfg.k, R.degree, cfg.k),
        _inv("R(∞) = ℘(ξ₀)", abs(r_inf - wp0) <= 1e-8 * max(1.0, abs(wp0)), _c(r_inf), _c(wp0)),
        _inv("deformation rank = 2k+1", rank == 2 * cfg.k + 1, rank, 2 * cfg.k + 1),
    ]
    n = max(R.num.size, R.den.size)
    num = np.pad(R.num, (0, n - R.num.size))
    den = np.pad(R.den, (0, n - R.den.size))
    coeff_rows = [(i, num[i].real, num[i].imag, den[i].real, den[i].imag) for i in range(n)]
    sample_rows = [(complex(x).real, complex(x).imag, complex(w).real, complex(w).imag) for x, w in samples]
    return result, invariants, {
        "coefficients.csv": (("power", "num_re", "num_im", "den_re", "den_im"), coeff_rows),
        "samples.csv": (("xi_re", "xi_im", "w_re", "w_im"), sample_rows),
    }


def cmd_flatmodel(cfg: RunConfig):
    from .flat_dirac import flat_report, torus_spectrum

    M, N = cfg.grid or 256, cfg.cutoff or 8
    tol = cfg.tol or 1e-12
    rep = flat_report(cfg.xi, M=M, N=N, seed=cfg.seed)
    lm = rep["lambda_min"]
    invariants = [
        _inv("‖K₀‖_L¹ = 2π", abs(rep["k0_l1"] - 2 * math.pi) < 1e-6, rep["k0_l1"], 2 * math.pi),
        _inv("decay rate within 5% of λ_min", abs(rep["decay_rate"] / lm - 1) < 0.05, rep["decay_rate"], lm),
        _inv("Green norm ≤ 1 + 1/λ_min²", rep["green_norm"] <= rep["green_bound"], rep["green_norm"], rep["green_bound"]),
        _inv("Weitzenböck deviation ≤ tol", rep["weitzenbock_dev"] <= tol, rep["weitzenbock_dev"], tol),
    ]
    lam, modes, _ = torus_spectrum(cfg.xi, N)
    rows = [(int(m[0]), int(m[1]), float(v)) for m, v in zip(modes[:25], lam[:25])]
    return rep, invariants, {"spectrum.csv": (("n1", "n2", "lambda"), rows)}


def cmd_chern(cfg: RunConfig):
    from .cohomology_ring import SCENARIOS, chern_report, ring_eval, scenario

    k = cfg.k
    rep = chern_report(k)
    result = {
        "ch_V": rep["ch_V"],
        "ch_E_check": rep["ch_E_check"],
        "deg_I": rep["deg_I"],
        "index_c1": rep["index_c1"],
        "deg_V": rep["deg_V"],
        "rank_V": rep["rank_V"],
        "scenarios": [
            {"scenario": s, "k": k, "result_monomials": scenario(s, k).monomials()} for s in SCENARIOS
        ],
    }
    invariants = [
        _inv("ch V = k − 2t̂", scenario("ch_V", k) == ring_eval("k - 2*th", k=k)),
        _inv("deg V = −2", rep["deg_V"] == -2, rep["deg_V"], -2),
        _inv("rank V = k", rep["rank_V"] == k, rep["rank_V"], k),
        _inv("ch Ě = 2 − k·t·p", scenario("ch_E_check", k) == ring_eval("2 - k*t*p", k=k)),
        _inv("deg I = 0", rep["deg_I"] == 0, rep["deg_I"], 0),
        _inv("index c₁ = −k", rep["index_c1"] == -k, rep["index_c1"], -k),
    ]
    rows = [(s, m, c) for s in SCENARIOS for m, c in scenario(s, k).monomials()]
    print("\n".join(f"{s}(k={k}) = {scenario(s, k).format()}" for s in SCENARIOS), file=sys.stderr)
    return result, invariants, {"chern.csv": (("scenario", "monomial", "coefficient"), rows)}


def cmd_hitchin(cfg: RunConfig):
    from .elliptic_core import lattice_invariants
    from .hitchin_check import abelian_solution, biquard_model, conformal_flag_check, perturb, residual_report

    tol = cfg.tol or 1e-9
    M = cfg.grid or 256
    L = lattice_invariants(cfg.tau)
    eps = cfg.epsilon if cfg.epsilon is not None else 1.0
    cfgs = {
        "abelian": abelian_solution(L, cfg.xi0, c=0.2, epsilon=eps, M=M, metric_flag=cfg.metric),
        "biquard": biquard_model([0.3j, -0.3j], [1 + 0.5j, -1 - 0.5j], M=M, metric_flag=cfg.metric),
    }
    reports = {name: residual_report(c) for name, c in cfgs.items()}
    pert = perturb(cfgs["abelian"], 1e-3, seed=cfg.seed)
    reports["perturbed_1e-3"] = residual_report(pert)
    flag = conformal_flag_check(cfgs["abelian"]) and conformal_flag_check(pert)
    result = {name: r.to_dict() for name, r in reports.items()}
    result["conformal_flag"] = flag
    invariants = [
        _inv("abelian residual < tol·scale", reports["abelian"].passes(tol)),
        _inv("Biquard model residual < tol·scale", reports["biquard"].passes(tol)),
        _inv("perturbed residual detected", not reports["perturbed_1e-3"].passes(tol)),
        _inv("residuals independent of metric flag", flag),
    ]
    rows = [(n, r.r1, r.r2, r.scale1, r.scale2, r.passes(tol)) for n, r in reports.items()]
    return result, invariants, {"residuals.csv": (("configuration", "r1", "r2", "scale1", "scale2", "passed"), rows)}


def cmd_selftest(cfg: RunConfig):
    from .selftest import TIME_LIMITS, build_report, determinism_check, report_bytes, run_checks

    def progress(c, dt):
        limit = TIME_LIMITS.get(c.number)
        print(f"{c.line()}  ({dt:.1f} s, limit {limit} s)", file=sys.stderr)

    checks, _ = run_checks(progress)
    first = report_bytes(build_report(checks))
    for _ in range(cfg.repeat - 1):
        again, _ = run_checks()
        c12 = determinism_check(first, report_bytes(build_report(again)))
        print(c12.line(), file=sys.stderr)
        if not c12.passed:
            checks.append(c12)
            break
    else:
        if cfg.repeat > 1:
            checks.append(c12)
    return checks


# ----------------------------------------------------------------------------------------


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        cfg = make_config(args)
    except UsageError as exc:
        print(f"hsk: error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out) if cfg.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    try:
        if cfg.command == "selftest":
            from .selftest import build_report

            checks = cmd_selftest(cfg)
            report = build_report(checks)
            ok = all(c.passed for c in checks)
            csvs = {"selftest.csv": (("criterion", "name", "passed"), [(c.number, c.name, c.passed) for c in checks])}
        else:
            handler = {
                "curve": cmd_curve,
                "ratmap": cmd_ratmap,
                "flatmodel": cmd_flatmodel,
                "chern": cmd_chern,
                "hitchin": cmd_hitchin,
            }[cfg.command]
            result, invariants, csvs = handler(cfg)
            ok = all(i["passed"] for i in invariants)
            report = {
                "schema": SCHEMA,
                "version": __version__,
                "command": cfg.command,
                "config": cfg.to_json(),
                "result": result,
                "invariants": invariants,
            }
    except HskError as exc:
        diag = {
            "schema": SCHEMA,
            "version": __version__,
            "command": cfg.command,
            "config": cfg.to_json(),
            "error": type(exc).__name__,
            "message": str(exc),
            "diagnostics": getattr(exc, "diagnostics", {}),
        }
        print(dump_report(diag))
        return 1
    text = dump_report(report)
    print(text)
    if out:
        (out / f"{cfg.command}.json").write_text(text + "\n", encoding="utf-8")
        for name, (header, rows) in csvs.items():
            _write_csv(out / name, header, rows)
    return 0 if ok else 1


def main() -> int:
    return run(sys.argv[1:])


__all__ = ["run", "main", "RunConfig", "parse_complex", "make_config", "build_parser", "UsageError"]
