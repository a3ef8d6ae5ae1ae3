"""The degree-k rational map R : P¹ → T̂/± ≅ P¹ of a τ-symmetric spectral curve.

The quotient T̂/± is charted by ℘, so R(w) = ℘(ξ_w) for either point ξ_w of the π₂-fiber
over w.  Coefficients are stored ascending (num[i] multiplies w^i) and normalized so that
the largest-modulus denominator coefficient equals 1.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .elliptic_core import EllipticFunction, Lattice, TorusPoint, ef_zero_count
from .errors import DomainError, InvariantViolation, NumericalError, ValidationError
from .spectral_curve import SpectralCurve, fiber_over_w

FIT_TOL = 1e-8
HOLDOUT_TOL = 1e-7
RESULTANT_TOL = 1e-10
INF_TOL = 1e-9  # |den| below this fraction of its scale reads as a pole (fit accuracy ~1e-10)


class ExtractionError(InvariantViolation):
    """The ℘-values of the sampled fibers are not those of a degree-k rational map."""


@dataclass(frozen=True)
class RationalMap:
    num: np.ndarray
    den: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        object.__setattr__(self, "num", np.asarray(self.num, dtype=complex))
        object.__setattr__(self, "den", np.asarray(self.den, dtype=complex))

    @property
    def degree(self) -> int:
        def deg(c):
            nz = np.nonzero(np.abs(c) > 1e-10 * max(1.0, np.max(np.abs(c))))[0]
            return int(nz[-1]) if nz.size else -1

        return max(deg(self.num), deg(self.den))

    def __call__(self, w):
        return eval_map(self, w)

    def normalized(self) -> "RationalMap":
        i = int(np.argmax(np.abs(self.den)))
        c = self.den[i]
        return RationalMap(self.num / c, self.den / c, self.lattice)

    def coefficients(self) -> np.ndarray:
        """The 2k+1 free coefficients: num, then den without its normalized entry."""
        i = int(np.argmax(np.abs(self.den)))
        return np.concatenate([self.num, np.delete(self.den, i)])

    def with_coefficients(self, coeffs) -> "RationalMap":
        i = int(np.argmax(np.abs(self.den)))
        n = self.num.size
        num = np.asarray(coeffs[:n])
        den = np.insert(np.asarray(coeffs[n:]), i, self.den[i])
        return RationalMap(num, den, self.lattice)

    def resultant(self) -> float:
        """|Res(num, den)| scaled by ‖num‖^k‖den‖^k (Sylvester determinant)."""
        k = max(self.num.size, self.den.size) - 1
        a = np.pad(self.num, (0, k + 1 - self.num.size))[::-1]
        b = np.pad(self.den, (0, k + 1 - self.den.size))[::-1]
        S = np.zeros((2 * k, 2 * k), dtype=complex)
        for i in range(k):
            S[i, i : i + k + 1] = a
            S[k + i, i : i + k + 1] = b
        if k == 0:
            return 1.0
        return float(abs(np.linalg.det(S)) / (np.linalg.norm(a) ** k * np.linalg.norm(b) ** k))

    def at_infinity(self) -> complex:
        return eval_map(self, complex("inf"))

    def branch_values(self) -> np.ndarray:
        """The 4k values of w with R(w) ∈ {e₁, e₂, e₃, ∞}, i.e. the π₂ branch values."""
        out = []
        for e in self.lattice.e_values:
            out.extend(_roots(self.num - e * self.den))
        out.extend(_roots(self.den))
        return np.array(out)

    def to_dict(self, xi0=None) -> dict:
        def c(z):
            return [float(z.real), float(z.imag)]

        d = {
            "k": self.degree,
            "tau": c(self.lattice.tau),
            "num": [c(z) for z in self.num],
            "den": [c(z) for z in self.den],
            "p_of_xi0": _json_c(self.at_infinity()),
        }
        d["xi0"] = c(complex(xi0)) if xi0 is not None else None
        return d

    def to_json(self, xi0=None) -> str:
        return json.dumps(self.to_dict(xi0), sort_keys=True)


def _json_c(z):
    z = complex(z)
    return [z.real, z.imag] if np.isfinite(z) else "inf"


def _roots(c):
    c = np.trim_zeros(np.asarray(c, dtype=complex), "b")
    if c.size <= 1:
        return []
    return list(P.polyroots(c))


def eval_map(R: RationalMap, w):
    if not np.isfinite(w):
        k = max(R.num.size, R.den.size) - 1
        a = R.num[k] if R.num.size > k else 0
        b = R.den[k] if R.den.size > k else 0
        if abs(b) <= INF_TOL * np.max(np.abs(R.den)):
            if abs(a) <= INF_TOL * np.max(np.abs(R.num)):
                raise ValidationError("0/0 at infinity: common root")
            return complex("inf")
        return complex(a / b)
    n, d = P.polyval(w, R.num), P.polyval(w, R.den)
    powers = np.abs(w) ** np.arange(R.den.size)
    if abs(d) <= INF_TOL * np.dot(np.abs(R.den), powers):
        if abs(n) <= INF_TOL * np.dot(np.abs(R.num), powers):
            raise ValidationError("0/0: numerator and denominator share a root")
        return complex("inf")
    return complex(n / d)


def fit_map(ws, ys, lattice: Lattice, k: int) -> tuple:
    """Least-squares null vector of num(w) − y·den(w) = 0; returns (map, relative residual)."""
    ws = np.asarray(ws, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    rho = max(1.0, float(np.median(np.abs(ws))))
    x = ws / rho
    V = x[:, None] ** np.arange(k + 1)
    A = np.hstack([V, -ys[:, None] * V])
    A = A / np.linalg.norm(A, axis=1, keepdims=True)
    _, s, vh = np.linalg.svd(A)
    c = vh[-1].conj()
    resid = float(s[-1] / s[0])
    scale = rho ** -np.arange(k + 1)
    R = RationalMap(c[: k + 1] * scale, c[k + 1 :] * scale, lattice).normalized()
    return R, resid


def _fiber_wp(C: SpectralCurve, w):
    pts = fiber_over_w(C, w)
    vals = [complex(C.lattice.wp(p.z)) for p in pts]
    return vals


def _sample_ws(C: SpectralCurve, n: int, rng) -> np.ndarray:
    finite = [b for b in C.pi2_branch if np.isfinite(b)]
    centre = np.mean(finite) if finite else 0j
    radius = 1.0 + (max(abs(b - centre) for b in finite) if finite else 1.0)
    r = radius * rng.uniform(0.3, 1.2, n)
    th = rng.uniform(0, 2 * np.pi, n)
    return centre + r * np.exp(1j * th)


def extract_map(C: SpectralCurve, seed: int = 0, holdout: int = 50) -> RationalMap:
    """Fit R from 4k+4 sampled fibers; verified on ``holdout`` further samples."""
    k = C.k
    rng = np.random.default_rng(seed)
    ws = _sample_ws(C, 4 * k + 4, rng)
    ys = []
    for w in ws:
        y1, y2 = _fiber_wp(C, w)
        if abs(y1 - y2) > 1e-8 * (1 + abs(y1)):
            raise ExtractionError(f"fiber points over w={w:.4g} have different ℘-values; curve not τ-symmetric")
        ys.append(0.5 * (y1 + y2))
    R, resid = fit_map(ws, ys, C.lattice, k)
    if resid > FIT_TOL:
        raise ExtractionError(f"rational fit residual {resid:.2e} exceeds {FIT_TOL}")
    if R.degree != k:
        raise ExtractionError(f"fitted map has degree {R.degree}, expected {k}")
    if R.resultant() < RESULTANT_TOL:
        raise ExtractionError("fitted numerator and denominator share a root")
    hw = _sample_ws(C, holdout, rng)
    for w in hw:
        y = _fiber_wp(C, w)[0]
        r = eval_map(R, w)
        if abs(r - y) > HOLDOUT_TOL * (1 + abs(y)):
            raise ExtractionError(f"holdout mismatch {abs(r - y):.2e} at w={w:.4g}")
    return R


def invert_wp(lattice: Lattice, y) -> list:
    """The two solutions ±ξ of ℘(ξ) = y."""
    if not np.isfinite(y):
        return [0j, 0j]
    if abs(y) > 1e6:
        # chart switch: 1/℘ is regular at 0 and ℘ ≈ ξ⁻²
        xi = 1 / np.sqrt(complex(y))
        for _ in range(40):
            f = 1 / lattice.wp(xi) - 1 / y
            df = -lattice.wp_prime(xi) / lattice.wp(xi) ** 2
            step = f / df
            xi = xi - step
            if abs(step) < 1e-16 * abs(xi):
                break
        return [complex(lattice.reduce(xi)), complex(lattice.reduce(-xi))]
    f = EllipticFunction.wp_at(lattice) - y
    n, zs = ef_zero_count(f)
    if n != 2:
        raise NumericalError("℘-inversion did not return two points", {"y": str(y), "count": n})
    return [complex(z) for z in zs]


def reconstruct_curve(R: RationalMap, lattice: Lattice, ws=None, n: int = 200, seed: int = 1) -> list:
    """Sampled points (ξ, w) with ℘(ξ) = R(w); both ±ξ for each w."""
    if ws is None:
        rng = np.random.default_rng(seed)
        bv = R.branch_values()
        centre = np.mean(bv) if bv.size else 0j
        radius = 1.0 + (np.max(np.abs(bv - centre)) if bv.size else 1.0)
        ws = centre + radius * rng.uniform(0.3, 1.2, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    out = []
    for w in ws:
        for xi in invert_wp(lattice, eval_map(R, w)):
            out.append((xi, complex(w)))
    return out


def hausdorff_to_curve(C: SpectralCurve, samples) -> float:
    """Max torus distance between reconstructed fiber points and those of the original curve."""
    by_w: dict = {}
    for xi, w in samples:
        by_w.setdefault(w, []).append(xi)
    worst = 0.0
    L = C.lattice
    for w, xis in by_w.items():
        orig = [p.z for p in fiber_over_w(C, w)]
        for x in xis:
            worst = max(worst, min(L.distance(x, o) for o in orig))
        for o in orig:
            worst = max(worst, min(L.distance(x, o) for x in xis))
    return worst


def fit_samples(samples, lattice: Lattice, k: int) -> RationalMap:
    kept = [(xi, w) for xi, w in samples if lattice.distance(xi, 0) > 1e-6]
    ws = np.array([w for _, w in kept])
    ys = np.array([complex(lattice.wp(xi)) for xi, _ in kept])
    R, resid = fit_map(ws, ys, lattice, k)
    if resid > FIT_TOL:
        raise ExtractionError(f"rational fit residual {resid:.2e}")
    return R


def deformation_rank(R: RationalMap, h: float = 1e-6) -> int:
    """Rank of d(branch values)/d(normalized coefficients), by central differences."""
    c0 = R.coefficients()
    base = R.branch_values()
    cols = []
    for i in range(c0.size):
        dc = np.zeros_like(c0)
        dc[i] = h * max(1.0, abs(c0[i]))
        plus = _matched(base, R.with_coefficients(c0 + dc).branch_values())
        minus = _matched(base, R.with_coefficients(c0 - dc).branch_values())
        cols.append((plus - minus) / (2 * dc[i]))
    J = np.array(cols).T
    s = np.linalg.svd(J, compute_uv=False)
    return int(np.sum(s > 1e-6 * s[0]))


def _matched(base, vals):
    vals = list(vals)
    out = np.empty_like(base)
    for i, b in enumerate(base):
        j = int(np.argmin([abs(v - b) for v in vals]))
        out[i] = vals.pop(j)
    return out


def param_count(k: int, maps=None) -> int:
    """2k+1, the dimension count; each supplied map is checked for a full-rank deformation."""
    if k < 1:
        raise DomainError("k must be >= 1")
    n = 2 * k + 1
    for R in maps or ():
        r = deformation_rank(R)
        if r < n:
            warnings.warn(f"degenerate map: deformation rank {r} < {n}", RuntimeWarning, stacklevel=2)
    return n


def mobius_map(lattice: Lattice, xi0, c_prime, epsilon, sigma: int = 1) -> RationalMap:
    """R(w) = ℘(ξ₀) + σε℘′(ξ₀)/(w − c′) as a ratio of linear polynomials."""
    p0 = complex(lattice.wp(xi0))
    dp0 = complex(lattice.wp_prime(xi0))
    num = np.array([-p0 * c_prime + sigma * epsilon * dp0, p0])
    den = np.array([-c_prime, 1.0])
    return RationalMap(num, den, lattice).normalized()


__all__ = [
    "RationalMap",
    "ExtractionError",
    "extract_map",
    "eval_map",
    "fit_map",
    "fit_samples",
    "invert_wp",
    "reconstruct_curve",
    "hausdorff_to_curve",
    "deformation_rank",
    "param_count",
    "mobius_map",
]
