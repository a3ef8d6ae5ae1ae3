"""Residuals of the Hitchin equations for sampled pairs (B, Φ) on a punctured grid.

For B = B_ξ dξ + B_ξ̄ dξ̄ (anti-hermitian, so B_ξ̄ = −B_ξ†) and Φ = φ dξ the two equations
are read off as dξ∧dξ̄ and dξ̄ coefficients:

    F_B + [Φ, Φ*]  →  ∂_ξ B_ξ̄ − ∂_ξ̄ B_ξ + [B_ξ, B_ξ̄] + [φ, φ†]
    ∂̄_B Φ         →  ∂_ξ̄ φ + [B_ξ̄, φ]

Neither contracts with a metric, so the residuals are conformally invariant by
construction; the metric flag only enters :func:`residual_density`.

Derivatives use centered 7×7 stencils whose weights are the minimum-norm solution of
moment conditions: exact on every polynomial of total degree ≤ 2 (second order on
general data) and, in addition, exact on ξⁿ and ξ̄ⁿ up to a high order N.  The extra
conditions make meromorphic Higgs fields and (anti)holomorphic connection terms come
out at roundoff level, which is what the exact-solution certificates need.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .elliptic_core import Lattice, TorusPoint
from .errors import DomainError, StencilError, ValidationError
from .higgs_model import higgs_eval, mobius_field

METRIC_FLAGS = ("euclidean", "poincare")
DEFAULT_R0 = 0.08
STENCIL_HALF = 3
MAX_ORDER = 18
MAX_COND = 1e6
ANTI_HERMITIAN_TOL = 1e-12


# ----------------------------------------------------------------------------------------
# stencils


@dataclass(frozen=True)
class Stencil:
    offsets: tuple  # ((di, dj), ...)
    z: np.ndarray  # complex offsets
    d: np.ndarray  # weights for ∂_ξ
    dbar: np.ndarray  # weights for ∂_ξ̄
    order: int  # highest pure power reproduced exactly
    radius: float


def _moment_matrix(zs, N):
    S = [(a, 0) for a in range(N + 1)] + [(0, b) for b in range(1, N + 1)] + [(1, 1)]
    rows = np.array([zs**a * np.conj(zs) ** b for a, b in S])
    norms = np.abs(rows).max(axis=1)
    norms[norms == 0] = 1.0
    return S, rows / norms[:, None], norms


@lru_cache(maxsize=32)
def _stencil_cached(h1: complex, h2: complex, half: int) -> Stencil:
    rng = np.arange(-half, half + 1)
    I, J = np.meshgrid(rng, rng, indexing="ij")
    offsets = tuple(zip(I.ravel().tolist(), J.ravel().tolist()))
    z = I.ravel() * h1 + J.ravel() * h2
    s = max(abs(h1), abs(h2))
    zs = z / s
    for N in range(MAX_ORDER, 1, -1):
        S, A, norms = _moment_matrix(zs, N)
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] > 0 and sv[0] / sv[-1] < MAX_COND:
            break
    else:  # pragma: no cover - degree-2 conditions are always solvable on 7×7
        raise StencilError("no well-conditioned stencil for these grid steps")
    weights = []
    for target in ((1, 0), (0, 1)):
        rhs = np.array([1.0 if m == target else 0.0 for m in S], dtype=complex) / norms
        w = np.linalg.lstsq(A, rhs, rcond=None)[0]
        weights.append(w / s)
    return Stencil(offsets, z, weights[0], weights[1], N, float(np.abs(z).max()))


def stencil(h1, h2, half: int = STENCIL_HALF) -> Stencil:
    """Centered derivative stencil on the grid spanned by complex steps h1, h2."""
    h1, h2 = complex(h1), complex(h2)
    if abs((h1.conjugate() * h2).imag) < 1e-14 * abs(h1) * abs(h2):
        raise DomainError("grid steps must be R-linearly independent")
    return _stencil_cached(h1, h2, half)


# ----------------------------------------------------------------------------------------
# configuration


@dataclass(frozen=True, eq=False)
class HitchinConfiguration:
    k: int
    origin: complex
    h1: complex
    h2: complex
    periodic: bool
    mask: np.ndarray  # (M, M) bool: retained sites
    B_xi: np.ndarray  # (M, M, k, k)
    B_xibar: np.ndarray
    Phi: np.ndarray
    metric_flag: str = "euclidean"
    punctures: tuple = ()
    r0: float = DEFAULT_R0
    lattice: Lattice | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        M = self.mask.shape[0]
        if self.mask.shape != (M, M):
            raise ValidationError("grid must be M×M")
        shape = (M, M, self.k, self.k)
        for name in ("B_xi", "B_xibar", "Phi"):
            if getattr(self, name).shape != shape:
                raise ValidationError(f"{name} must have shape {shape}")
        if self.metric_flag not in METRIC_FLAGS:
            raise ValidationError(f"metric_flag must be one of {METRIC_FLAGS}")
        m = self.mask
        if not np.all(np.isfinite(self.Phi[m])):
            raise ValidationError("Phi must be finite on retained sites")
        defect = self.B_xibar[m] + np.conj(np.swapaxes(self.B_xi[m], -1, -2))
        size = max(1.0, float(np.abs(self.B_xi[m]).max(initial=0.0)))
        if np.abs(defect).max(initial=0.0) > ANTI_HERMITIAN_TOL * size:
            raise ValidationError("connection is not anti-hermitian: B_ξ̄ ≠ −B_ξ†")
        if self.punctures and m.any():
            d = self.puncture_distance()[m]
            if d.min() < self.r0 * (1 - 1e-12):
                raise ValidationError("a retained site lies inside an excluded disc")

    @property
    def M(self) -> int:
        return self.mask.shape[0]

    @property
    def positions(self) -> np.ndarray:
        i = np.arange(self.M)
        I, J = np.meshgrid(i, i, indexing="ij")
        return self.origin + I * self.h1 + J * self.h2

    def puncture_distance(self) -> np.ndarray:
        pos = self.positions
        d = np.full(pos.shape, np.inf)
        for p in self.punctures:
            if self.lattice is not None:
                dp = self.lattice.distance(pos, p)
            else:
                dp = np.abs(pos - p)
            d = np.minimum(d, dp)
        return d

    def with_metric(self, flag: str) -> "HitchinConfiguration":
        return replace(self, metric_flag=flag)


def _grid_mask(pos, punctures, r0, lattice):
    mask = np.ones(pos.shape, dtype=bool)
    for p in punctures:
        dp = lattice.distance(pos, p) if lattice is not None else np.abs(pos - p)
        mask &= dp >= r0
    return mask


# ----------------------------------------------------------------------------------------
# residuals


def _shifted(arr, di, dj, periodic):
    # value at site (i+di, j+dj); non-periodic wrap-around is masked out by the caller
    return np.roll(arr, (-di, -dj), axis=(0, 1))


def _apply(cfg, st, weights, arr):
    """(Σ_j w_j arr(site+o_j), Σ_j |w_j|·‖arr(site+o_j)‖) over all sites."""
    out = np.zeros_like(arr)
    mag = np.zeros(arr.shape[:2])
    for (di, dj), w in zip(st.offsets, weights):
        if w == 0:
            continue
        a = _shifted(arr, di, dj, cfg.periodic)
        out += w * a
        mag += abs(w) * np.linalg.norm(a, axis=(-2, -1))
    return out, mag


def _valid_sites(cfg, st):
    valid = cfg.mask.copy()
    for di, dj in st.offsets:
        valid &= _shifted(cfg.mask, di, dj, cfg.periodic)
    if not cfg.periodic:
        h = max(max(abs(a), abs(b)) for a, b in st.offsets)
        edge = np.zeros_like(valid)
        edge[h : cfg.M - h, h : cfg.M - h] = True
        valid &= edge
    return valid


def _comm(a, b):
    return a @ b - b @ a


def _dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


@dataclass(frozen=True)
class ResidualReport:
    r1: float
    r2: float
    scale1: float
    scale2: float
    sites: int
    skipped: int
    stencil_order: int
    metric_flag: str

    @property
    def scale(self) -> float:
        return max(self.scale1, self.scale2)

    def passes(self, tol: float) -> bool:
        return self.r1 <= tol * self.scale1 and self.r2 <= tol * self.scale2

    def to_dict(self) -> dict:
        return {
            "r1": self.r1,
            "r2": self.r2,
            "scale1": self.scale1,
            "scale2": self.scale2,
            "sites": self.sites,
            "skipped": self.skipped,
            "stencil_order": self.stencil_order,
            "metric_flag": self.metric_flag,
        }


def _pointwise(cfg: HitchinConfiguration):
    st = stencil(cfg.h1, cfg.h2)
    if cfg.punctures and st.radius > cfg.r0 / 2:
        raise StencilError(
            f"stencil radius {st.radius:.3g} exceeds r0/2 = {cfg.r0 / 2:.3g}; refine the grid"
        )
    valid = _valid_sites(cfg, st)
    if not valid.any():
        raise StencilError("no site has its full stencil inside the retained region")
    dBbar, mag_dBbar = _apply(cfg, st, st.d, cfg.B_xibar)
    dbarB, mag_dbarB = _apply(cfg, st, st.dbar, cfg.B_xi)
    dbarPhi, mag_dbarPhi = _apply(cfg, st, st.dbar, cfg.Phi)
    Bx, Bb, P = cfg.B_xi, cfg.B_xibar, cfg.Phi
    F = dBbar - dbarB + _comm(Bx, Bb) + _comm(P, _dagger(P))
    G = dbarPhi + _comm(Bb, P)

    def nrm(a):
        return np.linalg.norm(a, axis=(-2, -1))

    s1 = mag_dBbar + mag_dbarB + 2 * nrm(Bx) * nrm(Bb) + 2 * nrm(P) ** 2
    s2 = mag_dbarPhi + 2 * nrm(Bb) * nrm(P)
    return nrm(F), nrm(G), s1, s2, valid, st


def residual_report(cfg: HitchinConfiguration) -> ResidualReport:
    """Grid maxima of both residuals plus the magnitude scales they cancel against.

    The scale at a site is the sum of the absolute sizes of the terms entering it
    (stencil contributions Σ|w|·‖·‖ and bracket products), so r ≤ tol·scale measures
    relative cancellation.  Sites whose stencil leaves the retained region are skipped.
    """
    F, G, s1, s2, valid, st = _pointwise(cfg)
    return ResidualReport(
        r1=float(F[valid].max()),
        r2=float(G[valid].max()),
        scale1=float(s1[valid].max()),
        scale2=float(s2[valid].max()),
        sites=int(valid.sum()),
        skipped=int(cfg.mask.sum() - valid.sum()),
        stencil_order=st.order,
        metric_flag=cfg.metric_flag,
    )


def residual(cfg: HitchinConfiguration) -> tuple:
    """(r1, r2): grid maxima of ‖F_B + [Φ,Φ*]‖ and ‖∂̄_B Φ‖ as form coefficients."""
    rep = residual_report(cfg)
    return rep.r1, rep.r2


def conformal_factor(cfg: HitchinConfiguration) -> np.ndarray:
    """ρ² with g = ρ²|dξ|²: 1 for the flat metric, a cusp model near each puncture otherwise.

    The cusp model ρ = 1/(d·log(1/d)) uses d = distance to the nearest puncture divided
    by twice the largest such distance on the grid, so that d < 1 everywhere.
    """
    if cfg.metric_flag == "euclidean" or not cfg.punctures:
        return np.ones((cfg.M, cfg.M))
    d = cfg.puncture_distance()
    d = d / (2 * d[np.isfinite(d)].max())
    return 1.0 / (d * np.log(1.0 / d)) ** 2


def residual_density(cfg: HitchinConfiguration) -> np.ndarray:
    """Metric-dependent pointwise size ‖F_B + [Φ,Φ*]‖/ρ² (NaN on skipped sites)."""
    F, _, _, _, valid, _ = _pointwise(cfg)
    out = np.full(F.shape, np.nan)
    out[valid] = F[valid] / conformal_factor(cfg)[valid]
    return out


def conformal_flag_check(cfg: HitchinConfiguration) -> bool:
    """True iff the residual pair is bit-identical for both metric flags."""
    a = residual(cfg.with_metric("euclidean"))
    b = residual(cfg.with_metric("poincare"))
    return a == b


# ----------------------------------------------------------------------------------------
# constructors and transformations


def _constant_field(M, mat):
    mat = np.asarray(mat, dtype=complex)
    return np.broadcast_to(mat, (M, M) + mat.shape).copy()


def abelian_solution(
    lattice: Lattice,
    xi0,
    c=0j,
    epsilon=1.0,
    M: int = 256,
    r0: float = DEFAULT_R0,
    beta=0j,
    metric_flag: str = "euclidean",
) -> HitchinConfiguration:
    """k = 1: flat constant connection β dξ − β̄ dξ̄ and Φ = c + ε(ζ(ξ−ξ₀) − ζ(ξ+ξ₀)) dξ."""
    p = xi0 if isinstance(xi0, TorusPoint) else TorusPoint.of(complex(xi0), lattice)
    if p.is_identity() or p.has_order_two():
        raise DomainError("ξ₀ must not be a point of order ≤ 2")
    h1, h2 = 1.0 / M, lattice.tau / M
    if r0 <= max(abs(h1), abs(h2)):
        raise DomainError(f"puncture radius {r0} does not exclude the poles at grid spacing")
    if 2 * r0 >= lattice.distance(p.z, -p.z):
        raise DomainError("puncture discs around ±ξ₀ overlap")
    phi = mobius_field(lattice, p.z, c, epsilon)
    i = np.arange(M)
    I, J = np.meshgrid(i, i, indexing="ij")
    pos = I * h1 + J * h2
    punct = (p.z, -p.z)
    mask = _grid_mask(pos, punct, r0, lattice)
    Phi = np.zeros((M, M, 1, 1), dtype=complex)
    Phi[mask] = higgs_eval(phi, pos[mask])
    beta = complex(beta)
    return HitchinConfiguration(
        k=1,
        origin=0j,
        h1=h1,
        h2=h2,
        periodic=True,
        mask=mask,
        B_xi=_constant_field(M, [[beta]]),
        B_xibar=_constant_field(M, [[-beta.conjugate()]]),
        Phi=Phi,
        metric_flag=metric_flag,
        punctures=punct,
        r0=r0,
        lattice=lattice,
        meta={"kind": "abelian", "c": complex(c), "epsilon": complex(epsilon), "beta": beta},
    )


def abelian_residues(cfg: HitchinConfiguration) -> list:
    """Residues of φ at the punctures, by the trapezoid rule on a circle of radius 2·r0."""
    if cfg.meta.get("kind") != "abelian":
        raise DomainError("defined for abelian configurations")
    lat = cfg.lattice
    phi = mobius_field(lat, cfg.punctures[0], cfg.meta["c"], cfg.meta["epsilon"])
    theta = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    out = []
    for p in cfg.punctures:
        z = p + 2 * cfg.r0 * np.exp(1j * theta)
        vals = higgs_eval(phi, z)[:, 0, 0]
        out.append(complex(np.mean(vals * (z - p))))
    return out


def biquard_model(
    b,
    phi0,
    M: int = 256,
    R: float = 0.5,
    r0: float = DEFAULT_R0,
    metric_flag: str = "euclidean",
) -> HitchinConfiguration:
    """Local model B = b dξ/ξ + b* dξ̄/ξ̄, Φ = φ₀ dξ/ξ on the square [−R, R]² minus |ξ| < r0.

    b* = −b† keeps B anti-hermitian.  For commuting diagonal b and φ₀ both equations hold
    exactly; other choices are accepted and their residuals reported.
    """
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    phi0 = np.atleast_2d(np.asarray(phi0, dtype=complex))
    if b.ndim == 2 and b.shape[0] == 1 and b.shape[1] > 1:
        b = np.diag(b[0])
    if phi0.ndim == 2 and phi0.shape[0] == 1 and phi0.shape[1] > 1:
        phi0 = np.diag(phi0[0])
    if b.shape != phi0.shape or b.shape[0] != b.shape[1]:
        raise DomainError("b and φ₀ must be square matrices of equal size (or diagonals)")
    k = b.shape[0]
    h = 2 * R / M
    i = np.arange(M)
    I, J = np.meshgrid(i, i, indexing="ij")
    origin = complex(-R, -R)
    pos = origin + I * h + J * 1j * h
    mask = np.abs(pos) >= r0
    z = np.where(mask, pos, 1.0)[..., None, None]
    bstar = -_dagger(b)
    return HitchinConfiguration(
        k=k,
        origin=origin,
        h1=complex(h),
        h2=complex(0, h),
        periodic=False,
        mask=mask,
        B_xi=b / z,
        B_xibar=bstar / np.conj(z),
        Phi=phi0 / z,
        metric_flag=metric_flag,
        punctures=(0j,),
        r0=r0,
        meta={"kind": "biquard"},
    )


def gauge_conjugate(cfg: HitchinConfiguration, U) -> HitchinConfiguration:
    """Constant unitary gauge change: B ↦ U B U†, Φ ↦ U Φ U†."""
    U = np.asarray(U, dtype=complex)
    if not np.allclose(U @ _dagger(U), np.eye(cfg.k), atol=1e-13):
        raise DomainError("U must be unitary")
    Ud = _dagger(U)
    return replace(
        cfg,
        B_xi=U @ cfg.B_xi @ Ud,
        B_xibar=U @ cfg.B_xibar @ Ud,
        Phi=U @ cfg.Phi @ Ud,
    )


def direct_sum(*cfgs: HitchinConfiguration) -> HitchinConfiguration:
    """Block-diagonal configuration from pieces sampled on the same grid."""
    first = cfgs[0]
    for c in cfgs[1:]:
        if c.mask.shape != first.mask.shape or not np.array_equal(c.mask, first.mask):
            raise DomainError("direct sum needs identical grids and masks")
        if (c.h1, c.h2, c.origin, c.periodic) != (first.h1, first.h2, first.origin, first.periodic):
            raise DomainError("direct sum needs identical grids and masks")
    k = sum(c.k for c in cfgs)
    M = first.M

    def block(name):
        out = np.zeros((M, M, k, k), dtype=complex)
        i = 0
        for c in cfgs:
            out[..., i : i + c.k, i : i + c.k] = getattr(c, name)
            i += c.k
        return out

    return replace(
        first,
        k=k,
        B_xi=block("B_xi"),
        B_xibar=block("B_xibar"),
        Phi=block("Phi"),
        meta={**first.meta, "kind": "direct_sum"},
    )


_SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


def pure_gauge(cfg: HitchinConfiguration, amplitude: float = 0.5) -> HitchinConfiguration:
    """Apply the periodic gauge change g = exp(iα(s)X)·exp(iβ(t)Y) to an exact configuration.

    (s, t) are lattice coordinates, α = a·cos 2πs and β = a·sin 2πt.  For k = 1 both
    generators are 1; for k ≥ 2 they are σ₁ and σ₃ on the leading 2×2 block, so g is
    genuinely nonabelian.  The result is still an exact solution
    (B ↦ g⁻¹Bg + g⁻¹dg, Φ ↦ g⁻¹Φg) but its entries are no longer (anti)holomorphic, so the
    discrete residuals show the stencil's O(h²) truncation.
    """
    if cfg.lattice is None or not cfg.periodic:
        raise DomainError("pure_gauge needs a periodic lattice grid")
    k = cfg.k
    X = np.eye(k, dtype=complex)
    Y = np.eye(k, dtype=complex)
    if k >= 2:
        X[:2, :2], Y[:2, :2] = _SIGMA1, _SIGMA3
        X[2:, 2:] = Y[2:, 2:] = 0
    rest = np.eye(k) - (X @ X)  # identity on the untouched block, zero on the σ block
    tau = cfg.lattice.tau
    s, t = cfg.lattice.to_coords(cfg.positions)
    al = amplitude * np.cos(2 * np.pi * s)
    be = amplitude * np.sin(2 * np.pi * t)
    dal = -2 * np.pi * amplitude * np.sin(2 * np.pi * s)
    dbe = 2 * np.pi * amplitude * np.cos(2 * np.pi * t)

    def expi(a, G):  # exp(i a G) for an involution G on its support
        return np.cos(a)[..., None, None] * (X @ X) + 1j * np.sin(a)[..., None, None] * G + rest

    E1, E2 = expi(al, X), expi(be, Y)
    g = E1 @ E2
    gi = _dagger(g)
    B_s = _dagger(E2) @ (1j * dal[..., None, None] * X) @ E2
    B_t = 1j * dbe[..., None, None] * Y
    tb = np.conj(tau)
    dB_xi = (tb * B_s - B_t) / (tb - tau)
    dB_xibar = (tau * B_s - B_t) / (tau - tb)
    return replace(
        cfg,
        B_xi=gi @ cfg.B_xi @ g + dB_xi,
        B_xibar=gi @ cfg.B_xibar @ g + dB_xibar,
        Phi=gi @ cfg.Phi @ g,
        meta={**cfg.meta, "pure_gauge": amplitude},
    )


def perturb(cfg: HitchinConfiguration, delta: float, seed: int = 0) -> HitchinConfiguration:
    """Add δ times fixed seeded noise to B (keeping it anti-hermitian) and to Φ."""
    rng = np.random.default_rng(seed)
    shape = cfg.B_xi.shape
    X = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    Y = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    m = cfg.mask[..., None, None]
    X, Y = X * m, Y * m
    return replace(
        cfg,
        B_xi=cfg.B_xi + delta * X,
        B_xibar=cfg.B_xibar - delta * _dagger(X),
        Phi=cfg.Phi + delta * Y,
    )


# ----------------------------------------------------------------------------------------
# persistence


def _cpx(z):
    return [float(np.real(z)), float(np.imag(z))]


def save(cfg: HitchinConfiguration, path) -> tuple:
    """Write <path>.json (scalars) and <path>.npz (arrays); returns both paths."""
    path = Path(path)
    meta = {
        "schema": "hsk/1",
        "k": cfg.k,
        "origin": _cpx(cfg.origin),
        "h1": _cpx(cfg.h1),
        "h2": _cpx(cfg.h2),
        "periodic": cfg.periodic,
        "metric_flag": cfg.metric_flag,
        "punctures": [_cpx(p) for p in cfg.punctures],
        "r0": cfg.r0,
        "tau": _cpx(cfg.lattice.tau) if cfg.lattice is not None else None,
        "meta": {k: (_cpx(v) if isinstance(v, complex) else v) for k, v in cfg.meta.items()},
    }
    jpath, npath = path.with_suffix(".json"), path.with_suffix(".npz")
    jpath.write_text(json.dumps(meta, indent=2, sort_keys=True))
    np.savez(npath, mask=cfg.mask, B_xi=cfg.B_xi, B_xibar=cfg.B_xibar, Phi=cfg.Phi)
    return jpath, npath


def load(path) -> HitchinConfiguration:
    from .elliptic_core import lattice_invariants

    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    arrays = np.load(path.with_suffix(".npz"))

    def c(v):
        return complex(v[0], v[1])

    lattice = lattice_invariants(c(meta["tau"])) if meta["tau"] is not None else None
    extra = {
        k: (c(v) if isinstance(v, list) and len(v) == 2 else v) for k, v in meta["meta"].items()
    }
    return HitchinConfiguration(
        k=meta["k"],
        origin=c(meta["origin"]),
        h1=c(meta["h1"]),
        h2=c(meta["h2"]),
        periodic=meta["periodic"],
        mask=arrays["mask"],
        B_xi=arrays["B_xi"],
        B_xibar=arrays["B_xibar"],
        Phi=arrays["Phi"],
        metric_flag=meta["metric_flag"],
        punctures=tuple(c(p) for p in meta["punctures"]),
        r0=meta["r0"],
        lattice=lattice,
        meta=extra,
    )


__all__ = [
    "METRIC_FLAGS",
    "Stencil",
    "stencil",
    "HitchinConfiguration",
    "ResidualReport",
    "residual",
    "residual_report",
    "residual_density",
    "conformal_factor",
    "conformal_flag_check",
    "abelian_solution",
    "abelian_residues",
    "biquard_model",
    "gauge_conjugate",
    "direct_sum",
    "pure_gauge",
    "perturb",
    "save",
    "load",
]
