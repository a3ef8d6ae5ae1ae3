"""Meromorphic Higgs fields on the dual torus with simple poles at ±ξ₀.

A field is stored entrywise as elliptic functions, but evaluated through a compact basis
expansion Φ(ξ) = C₀ + Σ_b M_b·β_b(ξ), where the β_b are the distinct ζ/℘-derivative terms
that occur in any entry.  For the standard generator β₁ = ζ(ξ−ξ₀), β₂ = ζ(ξ+ξ₀), so a
k×k field costs two scalar ζ evaluations per point.

With rank-one residues R₊ = u vᵀ and R₋ = −R₊ (forced entrywise by the residue theorem)
and a constant regular part, Φ(ξ) = C + R₊·(ζ(ξ−ξ₀) − ζ(ξ+ξ₀)) is automatically even in ξ,
so every generated field is SU(2)-symmetric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .elliptic_core import (
    EllipticFunction,
    Lattice,
    TorusPoint,
    TORUS_TOL,
    lattice_invariants,
    locate_zeros,
    zeta_wp_sign,
)
from .errors import DomainError, PoleError, ValidationError

SEMISIMPLE_TOL = 1e-6


@dataclass(frozen=True)
class ResidueData:
    """Residue dyads: R₊ = Σ_r u_plus[r] v_plus[r]ᵀ at ξ₀ and R₋ likewise at −ξ₀."""

    u_plus: np.ndarray
    v_plus: np.ndarray
    u_minus: np.ndarray
    v_minus: np.ndarray

    def __post_init__(self):
        for name in ("u_plus", "v_plus", "u_minus", "v_minus"):
            arr = np.atleast_2d(np.asarray(getattr(self, name), dtype=complex))
            object.__setattr__(self, name, arr)
        if not (self.u_plus.shape == self.v_plus.shape and self.u_minus.shape == self.v_minus.shape):
            raise ValidationError("dyad factors must have matching shapes")

    @property
    def k(self):
        return self.u_plus.shape[1]

    @property
    def R_plus(self):
        return np.einsum("ri,rj->ij", self.u_plus, self.v_plus)

    @property
    def R_minus(self):
        return np.einsum("ri,rj->ij", self.u_minus, self.v_minus)

    @classmethod
    def rank_one(cls, u, v):
        """R₊ = u vᵀ, R₋ = −u vᵀ."""
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        return cls(u[None, :], v[None, :], u[None, :], -v[None, :])


@dataclass(frozen=True)
class HiggsField:
    k: int
    lattice: Lattice
    xi0_raw: complex
    entries: tuple
    epsilon: complex
    residues: ResidueData | None = None
    regular: np.ndarray | None = field(default=None, repr=False)
    seed: int | None = None
    su2_symmetric: bool = False
    strict: bool = True
    _basis: tuple = field(default=(), repr=False, compare=False)
    _const: np.ndarray = field(default=None, repr=False, compare=False)
    _mats: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        basis: list = []
        mats: list = []
        const = np.zeros((self.k, self.k), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, f in enumerate(row):
                const[i, j] = f.constant
                for p, o, c in f.terms:
                    for b, (bp, bo) in enumerate(basis):
                        if bo == o and self.lattice.distance(bp, p) < TORUS_TOL:
                            break
                    else:
                        basis.append((p, o))
                        mats.append(np.zeros((self.k, self.k), dtype=complex))
                        b = len(basis) - 1
                    mats[b][i, j] += c
        object.__setattr__(self, "_basis", tuple(basis))
        object.__setattr__(self, "_const", const)
        object.__setattr__(self, "_mats", np.array(mats) if mats else np.zeros((0, self.k, self.k), complex))

    @property
    def xi0(self) -> TorusPoint:
        return TorusPoint.of(self.xi0_raw, self.lattice)

    @property
    def pole_points(self) -> list:
        """Distinct poles (reduced) with their highest order among the entries."""
        out: dict = {}
        for p, o in self._basis:
            for q in out:
                if self.lattice.distance(p, q) < TORUS_TOL:
                    out[q] = max(out[q], o)
                    break
            else:
                out[p] = o
        return sorted(out.items(), key=lambda x: (x[0].real, x[0].imag))

    def __call__(self, xi):
        return higgs_eval(self, xi)

    def derivative(self) -> "HiggsField":
        ents = tuple(tuple(f.derivative() for f in row) for row in self.entries)
        return HiggsField(self.k, self.lattice, self.xi0_raw, ents, self.epsilon, strict=False)

    def residue_matrix(self, pole) -> np.ndarray:
        return np.array([[f.residue(pole) for f in row] for row in self.entries])


def _basis_values(lattice, basis, xi):
    vals = []
    for p, o in basis:
        if o == 1:
            vals.append(lattice.zeta(xi - p))
        else:
            vals.append(lattice.wp_derivative(xi - p, o - 2))
    return vals


def higgs_eval(phi: HiggsField, xi) -> np.ndarray:
    """Φ(ξ) as a (..., k, k) array."""
    xi_arr = np.asarray(xi, dtype=complex)
    out = np.broadcast_to(phi._const, xi_arr.shape + (phi.k, phi.k)).copy()
    for M, v in zip(phi._mats, _basis_values(phi.lattice, phi._basis, xi_arr)):
        out += np.asarray(v)[..., None, None] * M
    return out


# ----------------------------------------------------------------------------------------
# construction


def _as_torus_point(xi0, lattice):
    return xi0 if isinstance(xi0, TorusPoint) else TorusPoint.of(complex(xi0), lattice)


def random_residues(k: int, rng: np.random.Generator, epsilon=None) -> ResidueData:
    """Rank-one dyad with |vᵀu| > SEMISIMPLE_TOL (redrawn otherwise)."""
    while True:
        u = rng.normal(size=k) + 1j * rng.normal(size=k)
        v = rng.normal(size=k) + 1j * rng.normal(size=k)
        eps = v @ u
        if abs(eps) > SEMISIMPLE_TOL:
            break
    if epsilon is not None:
        v = v * (complex(epsilon) / eps)
    return ResidueData.rank_one(u, v)


def validate_residues(res: ResidueData, k: int, order_two: bool) -> complex:
    """Structural checks; returns ε (the nonzero eigenvalue of R₊)."""
    if res.k != k or res.u_minus.shape[1] != k:
        raise ValidationError(f"residue vectors must have length k={k}")
    max_rank = 2 if order_two else 1
    for name, R in (("R+", res.R_plus), ("R-", res.R_minus)):
        sv = np.linalg.svd(R, compute_uv=False)
        rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0])))
        if rank > max_rank:
            raise ValidationError(f"{name} has rank {rank} > {max_rank}")
    for u, v in list(zip(res.u_plus, res.v_plus)) + list(zip(res.u_minus, res.v_minus)):
        if abs(v @ u) <= SEMISIMPLE_TOL:
            raise ValidationError("residue dyad is nilpotent (|v^T u| <= 1e-6); not semi-simple")
    total = res.R_plus + res.R_minus
    if np.max(np.abs(total)) > 1e-12 * max(1.0, np.max(np.abs(res.R_plus))):
        raise ValidationError("entrywise residue sum is nonzero; entries would not be elliptic")
    if abs(np.trace(res.R_plus) + np.trace(res.R_minus)) > 1e-10 * max(1.0, abs(np.trace(res.R_plus))):
        raise ValidationError("tr R+ + tr R- != 0")
    return complex(np.trace(res.R_plus))


def build_higgs(
    k: int,
    lattice: Lattice,
    xi0,
    residues: ResidueData | None = None,
    regular_part=None,
    seed: int | None = None,
    epsilon=None,
    su2_symmetric: bool = True,
) -> HiggsField:
    """Assemble Φ_ij = c_ij + (R₊)_ij ζ(ξ−ξ₀) + (R₋)_ij ζ(ξ+ξ₀).

    Missing residues / regular part are drawn from ``np.random.default_rng(seed)``.
    ``regular_part`` may hold complex constants or even EllipticFunctions with poles at ±ξ₀.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    p = _as_torus_point(xi0, lattice)
    if p.is_identity():
        raise ValidationError("xi0 is the identity of the dual torus; a nontrivial asymptotic state is required")
    if p.has_order_two():
        raise ValidationError(
            "xi0 of order two: with simple poles only at xi0, ellipticity of each entry forces "
            "zero residues; use higgs_from_entries for order-two variants"
        )
    rng = np.random.default_rng(seed)
    if residues is None:
        residues = random_residues(k, rng, epsilon)
    eps = validate_residues(residues, k, order_two=False)
    if regular_part is None:
        regular_part = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    xi0c = complex(xi0.z if isinstance(xi0, TorusPoint) else xi0)
    Rp, Rm = residues.R_plus, residues.R_minus
    regular_const = None
    rows = []
    all_const = True
    for i in range(k):
        row = []
        for j in range(k):
            c = regular_part[i][j]
            terms = ((xi0c, 1, Rp[i, j]), (-xi0c, 1, Rm[i, j]))
            if isinstance(c, EllipticFunction):
                all_const = False
                for q, _o, _c in c.terms:
                    if min(lattice.distance(q, xi0c), lattice.distance(q, -xi0c)) > TORUS_TOL or _o != 1:
                        raise ValidationError("regular part may only have simple poles at ±xi0")
                ef = EllipticFunction(lattice, c.constant, terms + c.terms)
            else:
                ef = EllipticFunction(lattice, complex(c), terms)
            row.append(ef)
        rows.append(tuple(row))
    if all_const:
        regular_const = np.array([[complex(c) for c in r] for r in regular_part])
    phi = HiggsField(
        k, lattice, xi0c, tuple(rows), eps, residues, regular_const, seed, su2_symmetric, True
    )
    if su2_symmetric and not all_const:
        # constants keep the field even; elliptic regular parts must be even themselves
        for row in regular_part:
            for c in row:
                if isinstance(c, EllipticFunction) and not c.is_even():
                    raise ValidationError("SU(2)-symmetric flag requires an even regular part")
    return phi


def higgs_from_entries(lattice: Lattice, xi0, entries, epsilon=0j, su2_symmetric=None) -> HiggsField:
    """Field from arbitrary elliptic entries (no pole-structure enforcement).

    Used for the ℘-graph (Φ = ℘, double pole at an order-two point) and for deliberately
    non-symmetric or non-generic counterexamples.
    """
    entries = tuple(tuple(row) for row in entries)
    k = len(entries)
    if any(len(r) != k for r in entries):
        raise ValidationError("entries must form a square matrix")
    if su2_symmetric is None:
        su2_symmetric = all(f.is_even() for row in entries for f in row)
    xi0c = complex(xi0.z if isinstance(xi0, TorusPoint) else xi0)
    return HiggsField(k, lattice, xi0c, entries, complex(epsilon), None, None, None, su2_symmetric, False)


def graph_field(f: EllipticFunction) -> HiggsField:
    """k = 1 field Φ = f, whose spectral curve is the graph w = f(ξ)."""
    poles = f.poles()
    xi0 = poles[0][0] if poles else 0j
    return higgs_from_entries(f.lattice, xi0, [[f]])


def mobius_field(lattice: Lattice, xi0, c, epsilon) -> HiggsField:
    """k = 1: Φ(ξ) = c + ε(ζ(ξ−ξ₀) − ζ(ξ+ξ₀))."""
    res = ResidueData.rank_one([1.0], [complex(epsilon)])
    return build_higgs(1, lattice, xi0, res, [[complex(c)]])


def mobius_constants(phi: HiggsField):
    """(c′, σ) such that Φ(ξ) = c′ + σ ε ℘′(ξ₀)/(℘(ξ) − ℘(ξ₀)) for a k = 1 standard field."""
    if phi.k != 1 or phi.regular is None:
        raise DomainError("defined for k = 1 fields with constant regular part")
    sigma = zeta_wp_sign(phi.lattice)
    xi0 = phi.xi0_raw
    c = phi.regular[0, 0]
    return complex(c - 2 * phi.epsilon * phi.lattice.zeta(xi0)), sigma


def perturb_odd(phi: HiggsField, delta: float, entry=(0, 0)) -> HiggsField:
    """Add δ·(℘(ξ−ξ₀) − ℘(ξ+ξ₀)), an odd elliptic function, to one entry."""
    xi0 = phi.xi0_raw
    odd = EllipticFunction(phi.lattice, 0j, ((xi0, 2, delta), (-xi0, 2, -delta)))
    rows = [list(r) for r in phi.entries]
    i, j = entry
    rows[i][j] = rows[i][j] + odd
    return higgs_from_entries(phi.lattice, xi0, rows, phi.epsilon, su2_symmetric=False)


def nodal_field(lattice: Lattice, xi0, half_period: int = 0, t: float = 0.3) -> HiggsField:
    """k = 2 even field whose spectral curve has a node over an order-two point.

    In the ℘-chart the curve reads ℘(ξ) = ℘(ξ₀) + σ℘′(ξ₀)·Σ r_j/(w − c_j); choosing
    c = (0, 1) and r with a critical point at w = t whose critical value is e_i makes the
    two sheets through (ω_i, t) cross transversally.
    """
    sigma = zeta_wp_sign(lattice)
    xi0 = complex(xi0)
    p0 = lattice.wp(xi0)
    dp0 = lattice.wp_prime(xi0)
    e = lattice.e_values[half_period]
    r1 = t * t * (e - p0) / (sigma * dp0)
    r2 = -r1 * (t - 1) ** 2 / t ** 2
    u = np.array([1.0, 1.0], dtype=complex)
    v = np.array([r1, r2], dtype=complex)
    res = ResidueData.rank_one(u, v)
    C = np.diag([0.0, 1.0]).astype(complex) + 2 * lattice.zeta(xi0) * np.outer(u, v)
    return build_higgs(2, lattice, xi0, res, C)


# ----------------------------------------------------------------------------------------
# characteristic polynomial


def _elementary_symmetric(eigs):
    """e_0..e_k of the last axis."""
    k = eigs.shape[-1]
    e = np.zeros(eigs.shape[:-1] + (k + 1,), dtype=complex)
    e[..., 0] = 1.0
    for j in range(k):
        lam = eigs[..., j]
        e[..., 1 : j + 2] = e[..., 1 : j + 2] + lam[..., None] * e[..., 0 : j + 1]
    return e


def char_poly_coeffs(phi: HiggsField, xi) -> np.ndarray:
    """[1, a_1, …, a_k] with det(w − Φ(ξ)) = w^k + a_1 w^{k−1} + … + a_k (a_1 = −tr Φ)."""
    eigs = np.linalg.eigvals(higgs_eval(phi, xi))
    e = _elementary_symmetric(eigs)
    signs = (-1.0) ** np.arange(phi.k + 1)
    return e * signs


class CharCoefficient:
    """Pointwise evaluator of a_j(ξ)."""

    def __init__(self, phi: HiggsField, j: int):
        self.phi, self.j = phi, j

    def __call__(self, xi):
        out = char_poly_coeffs(self.phi, xi)[..., self.j]
        return out if np.ndim(xi) else complex(out)

    def __repr__(self):
        return f"a_{self.j}"


def char_coeffs(phi: HiggsField) -> list:
    return [CharCoefficient(phi, j) for j in range(1, phi.k + 1)]


def char_function(phi: HiggsField, w):
    """ξ ↦ det(Φ(ξ) − w·I), vectorized in ξ."""
    eye = np.eye(phi.k)

    def F(xi):
        return np.linalg.det(higgs_eval(phi, xi) - w * eye)

    return F


def xi_degree(phi: HiggsField, w, subdivisions: int = 8) -> int:
    """Number of zeros of ξ ↦ det(Φ(ξ) − w) in the fundamental domain."""
    F = char_function(phi, w)
    return locate_zeros(F, phi.lattice, [(p, None) for p, _ in phi.pole_points], subdivisions=subdivisions).count


# ----------------------------------------------------------------------------------------
# serialization


def _c2l(z):
    return [float(np.real(z)), float(np.imag(z))]


def _l2c(x):
    if isinstance(x, str):
        return complex(x.replace("i", "j").replace(" ", ""))
    return complex(x[0], x[1])


def to_json_dict(phi: HiggsField) -> dict:
    if phi.residues is None or phi.regular is None:
        raise ValidationError("only fields with dyad residues and constant regular part serialize")
    r = phi.residues
    return {
        "k": phi.k,
        "tau": _c2l(phi.lattice.tau),
        "xi0": _c2l(phi.xi0_raw),
        "epsilon": _c2l(phi.epsilon),
        "residues": {
            name: [[_c2l(z) for z in vec] for vec in getattr(r, name)]
            for name in ("u_plus", "v_plus", "u_minus", "v_minus")
        },
        "regular": [[_c2l(z) for z in row] for row in phi.regular],
        "seed": phi.seed,
    }


def from_json_dict(d: dict) -> HiggsField:
    lattice = lattice_invariants(_l2c(d["tau"]))
    res = ResidueData(*[np.array([[_l2c(z) for z in vec] for vec in d["residues"][n]])
                        for n in ("u_plus", "v_plus", "u_minus", "v_minus")])
    regular = np.array([[_l2c(z) for z in row] for row in d["regular"]])
    phi = build_higgs(int(d["k"]), lattice, _l2c(d["xi0"]), res, regular, seed=d.get("seed"))
    return phi


def dumps(phi: HiggsField) -> str:
    return json.dumps(to_json_dict(phi), sort_keys=True)


def loads(text: str) -> HiggsField:
    return from_json_dict(json.loads(text))


__all__ = [
    "ResidueData",
    "HiggsField",
    "build_higgs",
    "higgs_eval",
    "higgs_from_entries",
    "graph_field",
    "mobius_field",
    "mobius_constants",
    "perturb_odd",
    "nodal_field",
    "random_residues",
    "validate_residues",
    "char_coeffs",
    "char_poly_coeffs",
    "char_function",
    "xi_degree",
    "to_json_dict",
    "from_json_dict",
    "dumps",
    "loads",
]
