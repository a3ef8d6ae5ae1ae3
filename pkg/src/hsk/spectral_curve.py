"""Spectral curve C = {det(Φ(ξ) − w·I) = 0} ⊂ T̂ × P¹ of a Higgs field.

Branch data of both projections are found with the argument principle on T̂:

* π₁ (to T̂): zeros of the eigenvalue discriminant Π_{i<j}(w_i − w_j)², an elliptic
  function of ξ with poles only at the poles of Φ.
* π₂ (to P¹): ramification points solve F = ∂_ξF = 0.  Since the product
  D(ξ) = Π_j ∂_ξF(ξ, w_j(ξ)) over the k sheets is symmetric, it is elliptic in ξ; its zeros
  give the ξ-coordinates and the sheets with ∂_ξF ≈ 0 give the w-coordinates.  Points at
  w = ∞ (over the poles of Φ) ramify when a diverging sheet has a pole of order > 1.

∂_ξF is assembled from the Faddeev–LeVerrier matrices of Φ, so no eigenvectors are needed.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .elliptic_core import TORUS_TOL, TorusPoint, locate_zeros
from .errors import (
    ClassificationError,
    InvariantViolation,
    NodeError,
    NumericalError,
    PoleError,
    ValidationError,
)
from .higgs_model import HiggsField, higgs_eval

NODE_GAP = 1e-6  # relative eigenvalue gap below which a fiber point is a node
SIMPLE_GAP = 1e-4  # above this the point is unambiguously smooth
COINCIDE = 1e-5  # fiber points closer than this are one double point
DISTINCT = 1e-3


def _sort_lex(w):
    return sorted(w, key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def leverrier(A):
    """Faddeev–LeVerrier on stacked matrices.

    Returns (c, M) with det(wI − A) = Σ_m c[m] w^{k−m} and
    adj(wI − A) = Σ_{m=1}^{k} M[m−1] w^{k−m}.
    """
    A = np.asarray(A, dtype=complex)
    k = A.shape[-1]
    eye = np.broadcast_to(np.eye(k), A.shape)
    c = [np.ones(A.shape[:-2], dtype=complex)]
    Ms = []
    M = np.zeros_like(A)
    for m in range(1, k + 1):
        M = A @ M + c[-1][..., None, None] * eye
        Ms.append(M)
        c.append(-np.trace(A @ M, axis1=-2, axis2=-1) / m)
    return np.stack(c, axis=-1), np.stack(Ms, axis=-3)


class RestrictionKind(enum.Enum):
    SPLIT_DISTINCT = "SplitDistinct"
    INDECOMPOSABLE_F2 = "IndecomposableF2"
    DOUBLE_POINT = "DoublePoint"


@dataclass(frozen=True)
class RestrictionType:
    kind: RestrictionKind
    points: tuple  # fiber ξ's (two for split types, one for F₂)

    @property
    def name(self):
        return self.kind.value


@dataclass(frozen=True)
class BranchPoint:
    xi: complex
    w: complex  # complex('inf') for points at infinity
    multiplicity: int = 1
    node: bool = False


@dataclass
class SpectralCurve:
    source: HiggsField
    validate: bool = True
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def k(self):
        return self.source.k

    @property
    def lattice(self):
        return self.source.lattice

    @property
    def poles(self):
        return [p for p, _ in self.source.pole_points]

    def F(self, xi, w):
        """det(Φ(ξ) − w·I), broadcasting ξ against w."""
        xi = np.asarray(xi, dtype=complex)
        w = np.asarray(w, dtype=complex)
        P = higgs_eval(self.source, xi)
        eye = np.eye(self.k)
        return np.linalg.det(P - w[..., None, None] * eye)

    def F_xi(self, xi, w):
        """∂F/∂ξ via tr(adj(wI − Φ)Φ′)."""
        xi = np.asarray(xi, dtype=complex)
        w = np.asarray(w, dtype=complex)
        P = higgs_eval(self.source, xi)
        dP = higgs_eval(self._dphi, xi)
        _, M = leverrier(P)
        t = np.einsum("...mij,...ji->...m", M, dP)
        powers = w[..., None] ** np.arange(self.k - 1, -1, -1)
        return (-1.0) ** (self.k + 1) * np.sum(t * powers, axis=-1)

    def F_w(self, xi, w):
        xi = np.asarray(xi, dtype=complex)
        w = np.asarray(w, dtype=complex)
        c, _ = leverrier(higgs_eval(self.source, xi))
        k = self.k
        powers = np.stack([(k - m) * w ** max(k - m - 1, 0) for m in range(k)], axis=-1)
        return (-1.0) ** k * np.sum(c[..., :k] * powers, axis=-1)

    @cached_property
    def _dphi(self):
        return self.source.derivative()

    def fiber_function(self, w):
        """(ξ ↦ function vanishing exactly on the π₂-fiber over w, its pole list).

        For the standard simple-pole structure F(·, w)·(℘ − ℘(ξ₀)) is used: it has a fixed
        double pole at 0 instead of poles at ±ξ₀ that nearly cancel against fiber points when
        a finite sheet passes close to ξ₀.
        """
        phi = self.source
        if phi.strict:
            L = self.lattice
            p0 = complex(L.wp(phi.xi0_raw))
            return (lambda x: self.F(x, w) * (L.wp(x) - p0)), [(0j, 2)]
        return (lambda x: self.F(x, w)), self._pole_spec()

    # -- discriminants ------------------------------------------------------------------
    def discriminant(self, xi):
        w = np.linalg.eigvals(higgs_eval(self.source, xi))
        out = np.ones(w.shape[:-1], dtype=complex)
        for i in range(self.k):
            for j in range(i + 1, self.k):
                out = out * (w[..., i] - w[..., j]) ** 2
        return out

    def pi2_function(self, xi):
        """D(ξ) = Π_j ∂_ξF(ξ, w_j(ξ))."""
        xi = np.asarray(xi, dtype=complex)
        P = higgs_eval(self.source, xi)
        dP = higgs_eval(self._dphi, xi)
        _, M = leverrier(P)
        t = np.einsum("...mij,...ji->...m", M, dP)
        w = np.linalg.eigvals(P)
        powers = w[..., :, None] ** np.arange(self.k - 1, -1, -1)
        vals = np.einsum("...jm,...m->...j", powers, t)
        return np.prod(vals, axis=-1)

    # -- cached data --------------------------------------------------------------------
    def _pole_spec(self):
        return [(p, None) for p in self.poles]

    @property
    def pi1_zeros(self):
        if "pi1" not in self._cache:
            if self.k == 1:
                self._cache["pi1"] = ([], [])
            else:
                zs = locate_zeros(self.discriminant, self.lattice, self._pole_spec())
                self._cache["pi1"] = (zs.zeros, zs.multiplicities)
        return self._cache["pi1"]

    @property
    def pi2_points(self) -> list:
        if "pi2" not in self._cache:
            self._cache["pi2"] = self._compute_pi2()
        return self._cache["pi2"]

    def _compute_pi2(self):
        zs = locate_zeros(self.pi2_function, self.lattice, self._pole_spec())
        pts = []
        for xi, mult in zip(zs.zeros, zs.multiplicities):
            w = np.linalg.eigvals(higgs_eval(self.source, xi))
            fx = np.abs(self.F_xi(np.full(self.k, xi), w))
            order = np.argsort(fx)
            scale = 1.0 + np.max(np.abs(w))
            for j in order[:mult]:
                gap = _gap(w, j) / scale
                node = gap < NODE_GAP
                x, y = (complex(xi), complex(w[j])) if node else self._polish(xi, w[j])
                pts.append(BranchPoint(x, y, 1, node))
        for p in self.poles:
            M, d = self._pole_profile(p)
            if M - d > 0:
                pts.append(BranchPoint(complex(p), complex("inf"), M - d, False))
        return pts

    def _polish(self, xi, w, maxit=30):
        """Newton on the system F = ∂_ξF = 0 in (ξ, w); the second row by central differences."""
        xi, w = complex(xi), complex(w)
        h = 1e-6
        for _ in range(maxit):
            g = np.array([self.F(xi, w), self.F_xi(xi, w)], dtype=complex)
            fxp, fxm = self.F_xi(np.array([xi + h, xi - h]), w)
            fwp, fwm = self.F_xi(xi, np.array([w + h, w - h]))
            J = np.array(
                [[self.F_xi(xi, w), self.F_w(xi, w)], [(fxp - fxm) / (2 * h), (fwp - fwm) / (2 * h)]],
                dtype=complex,
            )
            try:
                step = np.linalg.solve(J, g)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)) or abs(step[0]) > 1e-2:
                break
            xi, w = xi - step[0], w - step[1]
            if abs(step[0]) < 1e-14 * (1 + abs(xi)) and abs(step[1]) < 1e-14 * (1 + abs(w)):
                break
        return complex(self.lattice.reduce(xi)), w

    def _pole_profile(self, p):
        """(M, d): pole order of F(·, w) at p for generic w, and number of diverging sheets."""
        F = lambda x: self.F(x, 0.41 + 0.27j)  # noqa: E731
        from .elliptic_core import measure_pole_order

        M = measure_pole_order(F, p)
        r1, r2 = 1e-3, 1e-4
        d = 0
        th = 0.731
        w1 = np.abs(np.linalg.eigvals(higgs_eval(self.source, p + r1 * np.exp(1j * th))))
        w2 = np.abs(np.linalg.eigvals(higgs_eval(self.source, p + r2 * np.exp(1j * th))))
        d = int(np.sum(np.sort(w2) > 3.0 * np.sort(w1)))
        return M, d

    @property
    def pi1_branch(self):
        return list(self.pi1_zeros[0])

    @property
    def pi2_branch(self):
        return [b.w for b in self.pi2_points]

    @property
    def B1(self):
        return int(sum(self.pi1_zeros[1]))

    @property
    def B2(self):
        return int(sum(b.multiplicity for b in self.pi2_points))

    @property
    def smooth(self) -> bool:
        return all(m == 1 for m in self.pi1_zeros[1]) and not any(b.node for b in self.pi2_points)

    @property
    def genus_pi1(self):
        return self.B1 // 2 + 1 if self.B1 % 2 == 0 else None

    @property
    def genus_pi2(self):
        return (self.B2 - 2) // 2 if self.B2 % 2 == 0 else None

    @property
    def genus(self):
        return self.genus_pi1

    @cached_property
    def homology(self):
        """(degree of π₁, degree of π₂): eigenvalue count and ξ-zeros of F(·, w) at a generic w."""
        w = 0.5123 + 0.3371j
        for attempt in range(4):
            try:
                func, poles = self.fiber_function(w)
                n = locate_zeros(func, self.lattice, poles).count
                return (self.k, n)
            except (NumericalError, PoleError):
                w = w * 1.37 + 0.11j
        raise NumericalError("could not determine π₂ degree", {"w": str(w)})

    # -- export -------------------------------------------------------------------------
    def to_dict(self):
        def c(z):
            return [float(z.real), float(z.imag)] if np.isfinite(z) else "inf"

        return {
            "k": self.k,
            "tau": [self.lattice.tau.real, self.lattice.tau.imag],
            "xi0": [self.source.xi0_raw.real, self.source.xi0_raw.imag],
            "branch_pi1": [c(z) for z in self.pi1_branch],
            "branch_pi2": [c(z) for z in self.pi2_branch],
            "genus": self.genus,
            "homology": list(self.homology),
            "smooth": bool(self.smooth),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _gap(w, j):
    others = np.delete(w, j)
    return float(np.min(np.abs(others - w[j]))) if others.size else np.inf


def build_curve(phi: HiggsField, validate: bool | None = None, eager: bool | None = None) -> SpectralCurve:
    """Spectral curve with branch data.

    Fields built by ``build_higgs`` are processed eagerly and their branch counts validated;
    free-form fields (graphs, counterexamples) compute branch data on first access.
    """
    C = SpectralCurve(phi, phi.strict if validate is None else validate)
    if phi.strict if eager is None else eager:
        C.pi1_zeros, C.pi2_points
        if C.validate and C.smooth:
            k = phi.k
            if C.B1 != 4 * k - 4 or C.B2 != 4 * k:
                raise InvariantViolation(f"branch counts (B1, B2) = ({C.B1}, {C.B2}), expected ({4*k-4}, {4*k})")
            if C.genus_pi1 != C.genus_pi2:
                raise InvariantViolation("Riemann-Hurwitz genera from the two projections disagree")
    return C


def branch_data(C: SpectralCurve):
    """(π₁ branch ξ's, π₂ branch w's, multiplicities of the π₁ points)."""
    return C.pi1_branch, C.pi2_branch, list(C.pi1_zeros[1])


def fiber_over_base(C: SpectralCurve, xi) -> list:
    return _sort_lex([complex(z) for z in np.linalg.eigvals(higgs_eval(C.source, complex(xi)))])


def fiber_over_w(C: SpectralCurve, w, strict: bool = True) -> list:
    """The two ξ with det(Φ(ξ) − w) = 0 (w = ∞ gives the poles of Φ)."""
    if not np.isfinite(w):
        return [TorusPoint.of(p, C.lattice) for p in C.poles]
    func, poles = C.fiber_function(w)
    zs = locate_zeros(func, C.lattice, poles)
    pts = zs.expanded()
    if strict and len(pts) != 2:
        raise InvariantViolation(f"π₂ fiber over w has {len(pts)} points, expected 2")
    return [TorusPoint.of(z, C.lattice) for z in pts]


def involution_check(C: SpectralCurve, samples: int = 100, seed: int = 0) -> bool:
    """F(−ξ, w) = F(ξ, w) and the fixed points of ξ ↦ −ξ are the π₂ ramification points."""
    rng = np.random.default_rng(seed)
    L = C.lattice
    xi = L.from_coords(rng.uniform(0, 1, samples), rng.uniform(0, 1, samples))
    for p in C.poles:
        bad = np.minimum(L.distance(xi, p), L.distance(xi, -p)) < 0.05
        xi = np.where(bad, xi + 0.11 + 0.07j, xi)
    w = 2.0 * (rng.normal(size=samples) + 1j * rng.normal(size=samples))
    a, b = C.F(xi, w), C.F(-xi, w)
    scale = np.abs(a) + np.abs(b) + 1.0
    if np.max(np.abs(a - b) / scale) > 1e-9:
        return False
    fixed = fixed_points(C)
    ram = [(bp.xi, bp.w) for bp in C.pi2_points]
    if len(fixed) != len(ram):
        return False
    used = set()
    for fx, fw in fixed:
        hit = None
        for i, (rx, rw) in enumerate(ram):
            if i in used:
                continue
            if not np.isfinite(fw) or not np.isfinite(rw):
                same_w = not np.isfinite(fw) and not np.isfinite(rw)
            else:
                same_w = abs(fw - rw) < 1e-7 * (1 + abs(fw))
            if same_w and L.distance(fx, rx) < 1e-7:
                hit = i
                break
        if hit is None:
            return False
        used.add(hit)
    return True


def fixed_points(C: SpectralCurve) -> list:
    """Points (ω, w) of C with ω = −ω: all sheets over the four order-two points."""
    L = C.lattice
    out = []
    pole_set = C.poles
    for om in (0j,) + tuple(L.half_periods):
        if any(L.distance(om, p) < TORUS_TOL for p in pole_set):
            # diverging sheets meet at (ω, ∞); bounded sheets are read off close to ω
            w1 = np.linalg.eigvals(higgs_eval(C.source, om + 1e-4))
            w2 = np.linalg.eigvals(higgs_eval(C.source, om + 1e-5))
            bounded = np.sort(np.abs(w2)) <= 3.0 * np.sort(np.abs(w1))
            for z in np.array(sorted(w2, key=abs))[bounded]:
                out.append((om, complex(z)))
            out.append((om, complex("inf")))
            continue
        for z in np.linalg.eigvals(higgs_eval(C.source, om)):
            out.append((om, complex(z)))
    return out


def restriction_type(C: SpectralCurve, w) -> RestrictionType:
    func, poles = C.fiber_function(w)
    zs = locate_zeros(func, C.lattice, poles)
    pts = zs.expanded()
    if len(pts) != 2:
        raise InvariantViolation(f"π₂ fiber over w has {len(pts)} points")
    L = C.lattice
    d = L.distance(pts[0], pts[1])
    if d >= DISTINCT:
        return RestrictionType(RestrictionKind.SPLIT_DISTINCT, tuple(TorusPoint.of(z, L) for z in pts))
    if d > COINCIDE:
        raise ClassificationError(
            f"fiber points {d:.2e} apart: inside the ambiguity band",
            [RestrictionKind.SPLIT_DISTINCT, RestrictionKind.INDECOMPOSABLE_F2],
        )
    xi = complex((pts[0] + pts[1]) / 2)
    eig = np.linalg.eigvals(higgs_eval(C.source, xi))
    j = int(np.argmin(np.abs(eig - w)))
    gap = _gap(eig, j) / (1.0 + np.max(np.abs(eig)))
    pt = (TorusPoint.of(xi, L),)
    if gap < NODE_GAP:
        return RestrictionType(RestrictionKind.DOUBLE_POINT, pt)
    if gap > SIMPLE_GAP:
        return RestrictionType(RestrictionKind.INDECOMPOSABLE_F2, pt)
    raise ClassificationError(
        f"sheet gap {gap:.2e} inside the ambiguity band",
        [RestrictionKind.INDECOMPOSABLE_F2, RestrictionKind.DOUBLE_POINT],
    )


def eigenline(C: SpectralCurve, xi, w) -> np.ndarray:
    """Unit kernel vector of Φ(ξ) − w, largest component real positive."""
    A = higgs_eval(C.source, complex(xi)) - w * np.eye(C.k)
    _, s, vh = np.linalg.svd(A)
    scale = 1.0 + s[0]
    if s[-1] > 1e-8 * scale:
        raise ValidationError(f"(ξ, w) is not on the curve: σ_min/scale = {s[-1] / scale:.2e}")
    if C.k > 1 and s[-2] < 1e-6 * scale:
        raise NodeError("two-dimensional eigenspace: (ξ, w) is a node")
    v = vh[-1].conj()
    i = int(np.argmax(np.abs(v)))
    v = v * (abs(v[i]) / v[i])
    return v / np.linalg.norm(v)


def _section_product(C: SpectralCurve, a, e):
    """ξ ↦ Π_j aᵀ·adj(w_j − Φ(ξ))·e over the k sheets."""

    def H(xi):
        P = higgs_eval(C.source, xi)
        _, M = leverrier(P)
        alpha = np.einsum("i,...mij,j->...m", a, M, e)
        w = np.linalg.eigvals(P)
        powers = w[..., :, None] ** np.arange(C.k - 1, -1, -1)
        return np.prod(np.einsum("...jm,...m->...j", powers, alpha), axis=-1)

    return H


def eigenline_degree(C: SpectralCurve, seed: int = 0, attempts: int = 4) -> int:
    """Degree of the eigenline bundle N ⊂ π₁*(trivial C^k) on a smooth spectral curve.

    A covector a restricts to a holomorphic section of N*, so deg N = −#zeros(a|_N).  On C
    the cofactor column s = adj(w − Φ)e spans N; a·s and b·s share the zeros and poles of s,
    and a|_N accounts for the rest.  Pushing forward to T̂ gives the elliptic functions
    H_a, H_b of ``_section_product``; the zeros of H_a not shared with H_b are the zeros of
    a|_N.
    """
    if C.k == 1:
        return 0
    if not C.smooth:
        raise ValidationError("eigenline degree is only defined here for smooth curves")
    rng = np.random.default_rng(seed)
    L = C.lattice
    for _ in range(attempts):
        a, b, e = (rng.normal(size=(3, C.k)) + 1j * rng.normal(size=(3, C.k)))
        try:
            za = locate_zeros(_section_product(C, a, e), L, C._pole_spec())
            zb = locate_zeros(_section_product(C, b, e), L, C._pole_spec())
        except (NumericalError, PoleError):
            continue
        shared = 0
        used = set()
        for z, m in zip(za.zeros, za.multiplicities):
            for i, (y, n) in enumerate(zip(zb.zeros, zb.multiplicities)):
                if i not in used and L.distance(z, y) < 1e-6:
                    shared += min(m, n)
                    used.add(i)
                    break
        return -(za.count - shared)
    raise NumericalError("cofactor sections degenerate for every tried component", {"attempts": attempts})


def membership_at_poles(C: SpectralCurve, radii=(1e-3, 1e-4)) -> bool:
    """(±ξ₀, ∞) ∈ C: the largest eigenvalue grows like |ε|/|ξ − p| at each simple pole of Φ."""
    eps = abs(C.source.epsilon)
    ok = True
    for p in C.poles:
        vals = []
        for r in radii:
            w = np.linalg.eigvals(higgs_eval(C.source, p + r * np.exp(0.37j)))
            vals.append(np.max(np.abs(w)) * r)
        if eps > 0:
            ok &= all(abs(v - eps) < 0.05 * eps for v in vals)
        else:
            ok &= vals[-1] > 0.5 * vals[0]
    return bool(ok)


def sample_curve(C: SpectralCurve, n: int = 24) -> list:
    """Rows (xi_re, xi_im, w_re, w_im, sheet) on an n×n grid of T̂ avoiding the poles."""
    L = C.lattice
    s = (np.arange(n) + 0.5) / n
    xi = L.from_coords(*np.meshgrid(s, s, indexing="ij")).ravel()
    keep = np.ones(xi.shape, bool)
    for p in C.poles:
        keep &= L.distance(xi, p) > 0.02
    rows = []
    for z in xi[keep]:
        for j, w in enumerate(fiber_over_base(C, z)):
            rows.append((z.real, z.imag, w.real, w.imag, j))
    return rows


__all__ = [
    "SpectralCurve",
    "RestrictionKind",
    "RestrictionType",
    "BranchPoint",
    "build_curve",
    "branch_data",
    "fiber_over_base",
    "fiber_over_w",
    "involution_check",
    "fixed_points",
    "restriction_type",
    "eigenline",
    "eigenline_degree",
    "membership_at_poles",
    "sample_curve",
    "leverrier",
]
