"""Weierstrass functions on Λ = Z + τZ and elliptic functions in principal-parts form.

Everything is evaluated from the rapidly convergent q-expansions (q = e^{iπτ}):

    ζ(u) = η₁u + π cot(πu) + 4π Σ A_n sin(2πnu),       A_n = q^{2n}/(1 − q^{2n})
    ℘(u) = −η₁ + π² csc²(πu) − 8π² Σ n A_n cos(2πnu)
    ℘′(u) = −2π³ cot(πu) csc²(πu) + 16π³ Σ n² A_n sin(2πnu)

after reducing u to the period parallelogram centred on 0, where the series converge
geometrically. The invariants g₂, g₃ and the quasi-period η₁ come from the Eisenstein
series E₄, E₆, E₂; η₂ is evaluated independently as 2ζ(τ/2) so that the Legendre relation
is a genuine check rather than a definition.

The zero locator at the bottom of the module is the argument-principle engine used by the
spectral-curve code: windings on a grid of cells, Newton refinement, and multiplicity from
the winding on a small circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import zeta as _riemann_zeta

from .errors import ContourError, DomainError, NumericalError, PoleError, ValidationError

TORUS_TOL = 1e-8
POLE_TOL = 1e-13
_PI = math.pi

# π cot(πx) − 1/x = Σ_k c_k x^{2k−1}, c_k = −2ζ(2k); used for |x| < 1/4.
_COT_COEFFS = np.array([-2.0 * _riemann_zeta(2 * k, 1) for k in range(1, 40)])


def _cot_minus_inverse(x):
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 0.25
    if np.any(small):
        xs = x[small]
        x2 = xs * xs
        acc = np.zeros_like(xs)
        for c in _COT_COEFFS[::-1]:
            acc = acc * x2 + c
        out[small] = acc * xs
    big = ~small
    if np.any(big):
        xb = x[big]
        out[big] = _PI / np.tan(_PI * xb) - 1.0 / xb
    return out


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return complex(np.asarray(values).reshape(()))
    return values


@dataclass(frozen=True)
class Lattice:
    """Period lattice Λ = Z + τZ with its Weierstrass invariants and quasi-periods.

    ``eta1 = ζ(u+1) − ζ(u)`` and ``eta2 = ζ(u+τ) − ζ(u)``.
    """

    tau: complex
    g2: complex
    g3: complex
    eta1: complex
    eta2: complex
    legendre_sign: int
    eisenstein_terms: int
    _A: np.ndarray = field(repr=False, compare=False)

    # -- coordinates -------------------------------------------------------------------
    def to_coords(self, z):
        """Lattice coordinates (s, t) with z = s + tτ."""
        z = np.asarray(z, dtype=complex)
        t = z.imag / self.tau.imag
        s = z.real - t * self.tau.real
        return s, t

    def from_coords(self, s, t):
        return np.asarray(s) + np.asarray(t) * self.tau

    def reduce_centered(self, u):
        """Return (u_r, n1, n2) with u = u_r + n1 + n2·τ and u_r in the cell centred on 0."""
        u = np.asarray(u, dtype=complex)
        s, t = self.to_coords(u)
        n2 = np.round(t)
        n1 = np.round(s)
        ur = u - n1 - n2 * self.tau
        return ur, n1, n2

    def reduce(self, z):
        """Representative of z in the fundamental domain [0,1) + [0,1)·τ."""
        z = np.asarray(z, dtype=complex)
        s, t = self.to_coords(z)
        fs, ft = np.floor(s), np.floor(t)
        s, t = s - fs, t - ft
        s = np.where(s > 1.0 - 1e-14, 0.0, s)
        t = np.where(t > 1.0 - 1e-14, 0.0, t)
        return _scalar_or_array(self.from_coords(s, t), z)

    def distance(self, a, b):
        """Distance between a and b on C/Λ (nearest lattice translate)."""
        d = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
        s, t = self.to_coords(d)
        s, t = s - np.round(s), t - np.round(t)
        best = None
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                cand = np.abs(self.from_coords(s + i, t + j))
                best = cand if best is None else np.minimum(best, cand)
        return best if np.ndim(best) else float(best)

    @property
    def half_periods(self):
        return (0.5 + 0j, self.tau / 2, (1 + self.tau) / 2)

    @property
    def e_values(self):
        """(e₁, e₂, e₃) = ℘ at the half periods 1/2, τ/2, (1+τ)/2."""
        return tuple(complex(self.wp(w)) for w in self.half_periods)

    @property
    def discriminant(self):
        return self.g2 ** 3 - 27 * self.g3 ** 2

    # -- series ------------------------------------------------------------------------
    def _check_poles(self, ur):
        if np.any(np.abs(ur) < POLE_TOL):
            raise PoleError("argument within machine distance of a lattice point")

    def _fourier(self, ur):
        """Return (sin(2πnu), cos(2πnu)) stacks, shape (..., N)."""
        n = np.arange(1, self._A.size + 1)
        e = np.exp(2j * _PI * ur)[..., None] ** n
        ei = 1.0 / e
        return (e - ei) / 2j, (e + ei) / 2, n

    def _zeta_reduced(self, ur, regular=False):
        sin_, _, _ = self._fourier(ur)
        series = 4 * _PI * (sin_ @ self._A)
        if regular:
            return self.eta1 * ur + _cot_minus_inverse(ur) + series
        return self.eta1 * ur + _PI / np.tan(_PI * ur) + series

    def zeta(self, u):
        ur, n1, n2 = self.reduce_centered(u)
        self._check_poles(ur)
        out = self._zeta_reduced(ur) + n1 * self.eta1 + n2 * self.eta2
        return _scalar_or_array(out, u)

    def zeta_regular(self, u):
        """ζ(u) − 1/(u − λ) where λ is the lattice point nearest to u."""
        ur, n1, n2 = self.reduce_centered(u)
        out = self._zeta_reduced(ur, regular=True) + n1 * self.eta1 + n2 * self.eta2
        return _scalar_or_array(out, u)

    def wp(self, u):
        ur, _, _ = self.reduce_centered(u)
        self._check_poles(ur)
        _, cos_, n = self._fourier(ur)
        out = -self.eta1 + (_PI / np.sin(_PI * ur)) ** 2 - 8 * _PI ** 2 * (cos_ @ (n * self._A))
        return _scalar_or_array(out, u)

    def wp_prime(self, u):
        ur, _, _ = self.reduce_centered(u)
        self._check_poles(ur)
        sin_, _, n = self._fourier(ur)
        s = np.sin(_PI * ur)
        out = -2 * _PI ** 3 * np.cos(_PI * ur) / s ** 3 + 16 * _PI ** 3 * (sin_ @ (n * n * self._A))
        return _scalar_or_array(out, u)

    def wp_derivative(self, u, order):
        """℘^{(order)}(u) for order ≥ 0, via ℘″ = 6℘² − g₂/2 and the chain rule."""
        if order < 0:
            raise DomainError("derivative order must be non-negative")
        if order == 0:
            return self.wp(u)
        if order == 1:
            return self.wp_prime(u)
        even, poly = _wp_derivative_poly(order, self.g2, self.g3)
        p = np.asarray(self.wp(u))
        val = npoly.polyval(p, poly)
        if not even:
            val = val * np.asarray(self.wp_prime(u))
        return _scalar_or_array(val, u)

    def legendre_defect(self):
        return abs(self.eta1 * self.tau - self.eta2 - self.legendre_sign * 2j * _PI)


def _wp_derivative_poly(order, g2, g3):
    """℘^{(order)} = P(℘) (even order) or ℘′·P(℘) (odd order); returns (is_even, P)."""
    poly = np.array([0.0, 1.0], dtype=complex)
    even = True
    cubic = np.array([-g3, -g2, 0.0, 4.0], dtype=complex)  # ℘′²
    second = np.array([-g2 / 2, 0.0, 6.0], dtype=complex)  # ℘″
    for _ in range(order):
        if even:
            poly = npoly.polyder(poly)
        else:
            poly = npoly.polyadd(npoly.polymul(second, poly), npoly.polymul(cubic, npoly.polyder(poly)))
        even = not even
    return even, poly


def _eisenstein(tau):
    """E₂, E₄, E₆ partial sums doubled until successive truncations agree to 1e-13."""
    q2 = np.exp(2j * _PI * tau)

    def sums(N):
        n = np.arange(1, N + 1, dtype=float)
        x = q2 ** n
        a = x / (1 - x)
        return (1 - 24 * np.sum(n * a), 1 + 240 * np.sum(n ** 3 * a), 1 - 504 * np.sum(n ** 5 * a))

    N, prev = 8, sums(8)
    while True:
        N *= 2
        cur = sums(N)
        if all(abs(c - p) <= 1e-13 * max(1.0, abs(c)) for c, p in zip(cur, prev)):
            return cur, N
        if N > 1 << 16:
            raise DomainError(f"Eisenstein series failed to converge for tau={tau}")
        prev = cur


def lattice_invariants(tau) -> Lattice:
    """Build the lattice Z + τZ with g₂, g₃, η₁, η₂ (Legendre relation verified)."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"Im(tau) must be positive, got {tau}")
    if tau.imag < 0.05:
        raise DomainError("Im(tau) < 0.05: reduce the modulus before use")
    (E2, E4, E6), N = _eisenstein(tau)
    g2 = complex(4 * _PI ** 4 / 3 * E4)
    g3 = complex(8 * _PI ** 6 / 27 * E6)
    eta1 = complex(_PI ** 2 / 3 * E2)
    # Fourier truncation: |A_n| e^{πn Im τ} n³ ≤ 1e-20 on the centred cell
    nf = 4
    while math.exp(-_PI * nf * tau.imag) * nf ** 3 > 1e-20:
        nf += 1
    n = np.arange(1, nf + 1)
    x = np.exp(2j * _PI * tau * n)
    A = x / (1 - x)
    tmp = Lattice(tau, g2, g3, eta1, 0j, 1, N, A)
    eta2 = complex(2 * tmp._zeta_reduced(np.asarray(tau / 2)))
    defect = eta1 * tau - eta2
    sign = 1 if defect.imag > 0 else -1
    lat = Lattice(tau, g2, g3, eta1, eta2, sign, N, A)
    if lat.legendre_defect() > 1e-10 * max(1.0, abs(eta1 * tau)):
        raise ValidationError(f"Legendre relation violated: defect {lat.legendre_defect():.3e}")
    disc = lat.discriminant
    if abs(disc) <= 1e-12 * (abs(g2) ** 3 + 27 * abs(g3) ** 2):
        raise DomainError("degenerate lattice: g2^3 - 27 g3^2 = 0")
    return lat


def weierstrass_eval(u, lattice: Lattice):
    """(℘(u), ℘′(u), ζ(u))."""
    return lattice.wp(u), lattice.wp_prime(u), lattice.zeta(u)


@dataclass(frozen=True)
class TorusPoint:
    """A point of C/Λ, stored by its representative in [0,1) + [0,1)·τ."""

    z: complex
    lattice: Lattice = field(repr=False, compare=False)

    @classmethod
    def of(cls, z, lattice: Lattice) -> "TorusPoint":
        return cls(complex(lattice.reduce(complex(z))), lattice)

    def distance(self, other) -> float:
        oz = other.z if isinstance(other, TorusPoint) else complex(other)
        return float(self.lattice.distance(self.z, oz))

    def is_close(self, other, tol: float = TORUS_TOL) -> bool:
        return self.distance(other) < tol

    def __neg__(self):
        return TorusPoint.of(-self.z, self.lattice)

    def is_identity(self, tol: float = TORUS_TOL) -> bool:
        return self.distance(0) < tol

    def has_order_two(self, tol: float = TORUS_TOL) -> bool:
        return not self.is_identity(tol) and self.is_close(-self, tol)


# ----------------------------------------------------------------------------------------
# Elliptic functions in principal-parts form


def _basis_value(lattice: Lattice, u, order: int):
    if order == 1:
        return lattice.zeta(u)
    return lattice.wp_derivative(u, order - 2)


@dataclass(frozen=True)
class EllipticFunction:
    """constant + Σ coeff·b_m(u − pole), b₁ = ζ, b_m = ℘^{(m−2)} for m ≥ 2.

    ``terms`` is a tuple of (pole, order, coefficient) with poles stored as reduced complex
    representatives. Construction merges coincident terms and enforces the residue theorem.
    """

    lattice: Lattice
    constant: complex = 0j
    terms: tuple = ()

    def __post_init__(self):
        merged: list[list] = []
        const_shift = 0j
        for pole, order, coeff in self.terms:
            pole = pole.z if isinstance(pole, TorusPoint) else complex(pole)
            order = int(order)
            if order < 1:
                raise ValidationError("pole order must be >= 1")
            p = complex(self.lattice.reduce(pole))
            if order == 1:
                # ζ(u − pole) = ζ(u − p) − (n1·η1 + n2·η2) when pole = p + n1 + n2·τ
                n1, n2 = (round(float(x)) for x in self.lattice.to_coords(pole - p))
                const_shift -= complex(coeff) * (n1 * self.lattice.eta1 + n2 * self.lattice.eta2)
            for item in merged:
                if item[1] == order and self.lattice.distance(item[0], p) < TORUS_TOL:
                    item[2] += complex(coeff)
                    break
            else:
                merged.append([p, order, complex(coeff)])
        clean = tuple((p, o, c) for p, o, c in merged if c != 0)
        clean = tuple(sorted(clean, key=lambda x: (x[1], round(x[0].real, 12), round(x[0].imag, 12))))
        object.__setattr__(self, "constant", complex(self.constant) + const_shift)
        object.__setattr__(self, "terms", clean)
        res = [c for _, o, c in clean if o == 1]
        total = sum(res, 0j)
        if abs(total) > 1e-12 * max(1.0, sum(abs(c) for c in res)):
            raise ValidationError(f"residues sum to {total:.3e}; an elliptic function needs 0")

    # constructors
    @classmethod
    def const(cls, lattice, c):
        return cls(lattice, c, ())

    @classmethod
    def zeta_difference(cls, lattice, p, q, coeff=1.0):
        """coeff·(ζ(u − p) − ζ(u − q))."""
        return cls(lattice, 0j, ((p, 1, coeff), (q, 1, -coeff)))

    @classmethod
    def wp_at(cls, lattice, p=0j, coeff=1.0, derivative=0):
        """coeff·℘^{(derivative)}(u − p)."""
        return cls(lattice, 0j, ((p, 2 + derivative, coeff),))

    # arithmetic
    def __add__(self, other):
        if isinstance(other, EllipticFunction):
            return EllipticFunction(self.lattice, self.constant + other.constant, self.terms + other.terms)
        return EllipticFunction(self.lattice, self.constant + complex(other), self.terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        c = complex(c)
        return EllipticFunction(self.lattice, self.constant * c, tuple((p, o, a * c) for p, o, a in self.terms))

    __rmul__ = __mul__

    # structure
    def poles(self) -> list:
        """[(pole, order)] with order the highest order present at that pole."""
        out: dict = {}
        for p, o, _ in self.terms:
            out[p] = max(o, out.get(p, 0))
        return sorted(out.items(), key=lambda x: (x[0].real, x[0].imag))

    @property
    def total_pole_order(self) -> int:
        return sum(o for _, o in self.poles())

    def residue(self, pole) -> complex:
        pole = pole.z if isinstance(pole, TorusPoint) else complex(pole)
        return sum((c for p, o, c in self.terms if o == 1 and self.lattice.distance(p, pole) < TORUS_TOL), 0j)

    def derivative(self) -> "EllipticFunction":
        terms = []
        for p, o, c in self.terms:
            terms.append((p, 2, -c) if o == 1 else (p, o + 1, c))
        return EllipticFunction(self.lattice, 0j, tuple(terms))

    def is_even(self, tol: float = 1e-12) -> bool:
        """f(−u) = f(u), decided symbolically from the principal parts."""
        neg = self.reflect()
        diff = self - neg
        return all(abs(c) < tol for _, _, c in diff.terms) and abs(diff.constant) < tol

    def reflect(self) -> "EllipticFunction":
        """u ↦ f(−u). ζ and odd ℘-derivatives change sign."""
        terms = []
        for p, o, c in self.terms:
            sign = -1 if (o - 2) % 2 == 1 else 1
            terms.append((-p, o, sign * c))
        return EllipticFunction(self.lattice, self.constant, tuple(terms))

    def __call__(self, u):
        return ef_eval(self, u)


def ef_eval(f: EllipticFunction, u):
    u_arr = np.asarray(u, dtype=complex)
    out = np.full(u_arr.shape, f.constant, dtype=complex)
    for p, o, c in f.terms:
        out = out + c * np.asarray(_basis_value(f.lattice, u_arr - p, o))
    return _scalar_or_array(out, u)


def ef_residue(f: EllipticFunction, pole) -> complex:
    return f.residue(pole)


# ----------------------------------------------------------------------------------------
# Argument-principle zero locator


@dataclass(frozen=True)
class Region:
    """Rectangle [s0,s1]×[t0,t1] in lattice coordinates (z = s + tτ)."""

    s0: float = 0.0
    s1: float = 1.0
    t0: float = 0.0
    t1: float = 1.0

    @property
    def is_full(self):
        return abs(self.s1 - self.s0 - 1) < 1e-15 and abs(self.t1 - self.t0 - 1) < 1e-15


FULL_DOMAIN = Region()


@dataclass
class ZeroSet:
    """Distinct zeros with multiplicities; ``count`` is the argument-principle count."""

    count: int
    zeros: list
    multiplicities: list
    scale: float

    def expanded(self) -> list:
        out = []
        for z, m in zip(self.zeros, self.multiplicities):
            out.extend([z] * m)
        return out


class _Grid:
    """Edge phase increments on a cell grid; refines edges whose phase jumps are large."""

    MAXJUMP = 0.6

    def __init__(self, func, lattice, s_lines, t_lines, q):
        self.func = func
        self.lattice = lattice
        self.s = np.asarray(s_lines, dtype=float)
        self.t = np.asarray(t_lines, dtype=float)
        self.q = q
        self.minabs = np.inf
        self.absvals = []
        ns, nt = self.s.size - 1, self.t.size - 1
        # horizontal edges: fixed t_j, s from s_i to s_{i+1}
        S0, T0 = np.meshgrid(self.s[:-1], self.t, indexing="xy")
        S1 = np.meshgrid(self.s[1:], self.t, indexing="xy")[0]
        zh0 = lattice.from_coords(S0, T0).ravel()
        zh1 = lattice.from_coords(S1, T0).ravel()
        self.h_inc = self._increments(zh0, zh1).reshape(nt + 1, ns)
        # vertical edges: fixed s_i, t from t_j to t_{j+1}
        T0v, S0v = np.meshgrid(self.t[:-1], self.s, indexing="xy")
        T1v = np.meshgrid(self.t[1:], self.s, indexing="xy")[0]
        zv0 = lattice.from_coords(S0v, T0v).ravel()
        zv1 = lattice.from_coords(S0v, T1v).ravel()
        self.v_inc = self._increments(zv0, zv1).reshape(ns + 1, nt)

    def _increments(self, z0, z1):
        q = self.q
        inc = np.zeros(z0.size)
        todo = np.arange(z0.size)
        while todo.size:
            tt = np.linspace(0.0, 1.0, q)
            pts = z0[todo, None] + (z1 - z0)[todo, None] * tt
            vals = np.asarray(self.func(pts.ravel()), dtype=complex).reshape(pts.shape)
            if not np.all(np.isfinite(vals)):
                raise _Perturb("non-finite value on contour")
            av = np.abs(vals)
            self.minabs = min(self.minabs, float(av.min()))
            self.absvals.append(av.ravel()[:: max(1, av.size // 2000)])
            dphi = np.angle(vals[:, 1:] / vals[:, :-1])
            bad = np.abs(dphi).max(axis=1) > self.MAXJUMP
            inc[todo[~bad]] = dphi[~bad].sum(axis=1)
            todo = todo[bad]
            q *= 4
            if q > 20000 and todo.size:
                raise _Perturb("phase not resolved on contour")
        return inc

    def cell_windings(self):
        h, v = self.h_inc, self.v_inc
        # cell (i, j): bottom h[j,i], right v[i+1,j], top −h[j+1,i], left −v[i,j]
        w = (h[:-1, :].T + v[1:, :] - h[1:, :].T - v[:-1, :]) / (2 * _PI)
        r = np.round(w)
        if np.max(np.abs(w - r), initial=0.0) > 0.05:
            raise _Perturb("non-integer winding")
        return r.astype(int)


class _Perturb(Exception):
    pass


def _circle_winding(func, center, radius, q=64):
    while q <= 16384:
        th = np.linspace(0.0, 2 * _PI, q + 1)
        vals = np.asarray(func(center + radius * np.exp(1j * th)), dtype=complex)
        if not np.all(np.isfinite(vals)) or np.any(vals == 0):
            return None
        d = np.angle(vals[1:] / vals[:-1])
        if np.abs(d).max() < 0.6:
            return int(round(d.sum() / (2 * _PI)))
        q *= 4
    return None


def measure_pole_order(func, pole, radius=1e-3) -> int:
    """Pole order from the winding of func on a small circle (two radii must agree)."""
    w1 = _circle_winding(func, pole, radius)
    w2 = _circle_winding(func, pole, radius / 3)
    if w1 is None or w1 != w2:
        raise NumericalError("pole order not resolved", {"pole": str(pole), "w": [w1, w2]})
    return -w1


def _fd_derivative(func, z, h):
    return (complex(func(np.array([z + h]))[0]) - complex(func(np.array([z - h]))[0])) / (2 * h)


def _newton(func, z, mult, tol, h, cap, maxit=80):
    f = complex(func(np.array([z]))[0])
    for _ in range(maxit):
        if not np.isfinite(f):
            return z, False
        if abs(f) <= tol:
            return z, True
        df = _fd_derivative(func, z, h)
        if df == 0 or not np.isfinite(df):
            return z, False
        dz = mult * f / df
        if abs(dz) > cap:
            dz *= cap / abs(dz)
        z = z - dz
        fn = complex(func(np.array([z]))[0])
        if abs(dz) < 1e-15 * max(1.0, abs(z)):
            return z, abs(fn) <= tol * 1e3
        f = fn
    return z, abs(f) <= tol


def locate_zeros(
    func: Callable,
    lattice: Lattice,
    poles: Sequence = (),
    region: Region = FULL_DOMAIN,
    subdivisions: int = 16,
    samples: int = 16,
    tol: float = 1e-10,
    max_retries: int = 8,
    scale: float | None = None,
) -> ZeroSet:
    """Zeros of a vectorized meromorphic ``func`` inside ``region`` by the argument principle.

    ``poles`` lists (location, order); order None means "measure it". For the full domain the
    function must be doubly periodic; pole locations are then taken modulo Λ. Each zero is
    Newton-refined until |f| < tol·scale, where scale is the median |f| on the cell edges.
    """
    pole_list = []
    for p, order in poles:
        p = p.z if isinstance(p, TorusPoint) else complex(p)
        if order is None:
            order = measure_pole_order(func, p)
        if order > 0:
            pole_list.append((p, int(order)))
    rng = np.random.default_rng(12345)
    full = region.is_full
    for attempt in range(max_retries + 1):
        if full:
            off_s, off_t = (0.0137, 0.0071) if attempt == 0 else tuple(rng.uniform(0.0, 1.0 / subdivisions, 2))
            s_lines = off_s + np.linspace(0.0, 1.0, subdivisions + 1)
            t_lines = off_t + np.linspace(0.0, 1.0, subdivisions + 1)
        else:
            jit = 0.0 if attempt == 0 else rng.uniform(-0.02, 0.02) / subdivisions
            s_lines = np.linspace(region.s0, region.s1, subdivisions + 1)
            t_lines = np.linspace(region.t0, region.t1, subdivisions + 1)
            s_lines[1:-1] += jit * (region.s1 - region.s0)
            t_lines[1:-1] += jit * (region.t1 - region.t0)
        # keep known poles away from grid lines
        ok = True
        cell_s = (s_lines[-1] - s_lines[0]) / subdivisions
        cell_t = (t_lines[-1] - t_lines[0]) / subdivisions
        pole_cells = []
        for p, order in pole_list:
            ps, pt = (float(x) for x in lattice.to_coords(p))
            if full:
                ps = s_lines[0] + (ps - s_lines[0]) % 1.0
                pt = t_lines[0] + (pt - t_lines[0]) % 1.0
            ds = np.min(np.abs(s_lines - ps)) / cell_s
            dt = np.min(np.abs(t_lines - pt)) / cell_t
            if ds < 0.02 or dt < 0.02:
                ok = False
                break
            i = int(np.searchsorted(s_lines, ps) - 1)
            j = int(np.searchsorted(t_lines, pt) - 1)
            if 0 <= i < subdivisions and 0 <= j < subdivisions:
                pole_cells.append((i, j, order, complex(lattice.from_coords(ps, pt))))
        if not ok:
            continue
        try:
            grid = _Grid(func, lattice, s_lines, t_lines, samples)
            wind = grid.cell_windings()
        except (_Perturb, PoleError):
            continue
        sc = scale if scale is not None else float(np.median(np.concatenate(grid.absvals)))
        if grid.minabs < 1e-9 * sc:
            continue
        counts = wind.copy()
        for i, j, order, _ in pole_cells:
            counts[i, j] += order
        if np.any(counts < 0):
            continue
        zeros, mults = [], []
        try:
            for i in range(subdivisions):
                for j in range(subdivisions):
                    c = int(counts[i, j])
                    if c == 0:
                        continue
                    cell_poles = [(p, o) for (ii, jj, o, p) in pole_cells if ii == i and jj == j]
                    found = _locate_in_cell(
                        func, lattice, s_lines[i], s_lines[i + 1], t_lines[j], t_lines[j + 1],
                        c, cell_poles, tol * sc, samples, depth=0,
                    )
                    for z, m in found:
                        zeros.append(z)
                        mults.append(m)
        except _Perturb:
            continue
        total = int(counts.sum())
        if sum(mults) != total:
            raise NumericalError(
                "located zeros do not match the argument-principle count",
                {"count": total, "located": sum(mults)},
            )
        if full:
            zeros = [complex(lattice.reduce(z)) for z in zeros]
        order_idx = sorted(range(len(zeros)), key=lambda k: (round(zeros[k].real, 9), round(zeros[k].imag, 9)))
        return ZeroSet(total, [zeros[k] for k in order_idx], [mults[k] for k in order_idx], sc)
    raise ContourError(f"contour perturbation failed after {max_retries} retries")


def _locate_in_cell(func, lattice, s0, s1, t0, t1, count, cell_poles, ftol, samples, depth):
    centre = complex(lattice.from_coords((s0 + s1) / 2, (t0 + t1) / 2))
    size = min(abs(complex(lattice.from_coords(s1 - s0, 0))), abs(complex(lattice.from_coords(0, t1 - t0))))
    h = 1e-6 * max(size, 1e-4)

    def inside(z, margin=0.0):
        s, t = (float(x) for x in lattice.to_coords(z))
        ms, mt = margin * (s1 - s0), margin * (t1 - t0)
        return s0 - ms <= s <= s1 + ms and t0 - mt <= t <= t1 + mt

    seeds = [centre]
    for a, b in ((0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)):
        seeds.append(complex(lattice.from_coords(s0 + a * (s1 - s0), t0 + b * (t1 - t0))))
    seeds = [z for z in seeds if all(abs(z - p) > 0.05 * size for p, _ in cell_poles)]
    for seed in seeds:
        z, conv = _newton(func, seed, count, ftol, h, cap=0.5 * size)
        if conv and inside(z, 1e-9):
            if count == 1:
                return [(z, 1)]
            r = 0.25 * size
            w = _circle_winding(func, z, r)
            near_pole = any(abs(z - p) < r for p, _ in cell_poles)
            if w == count and not near_pole:
                return [(z, count)]
            break
    if size < 1e-7 or depth > 30:
        raise NumericalError("zero refinement did not converge", {"cell": [s0, s1, t0, t1], "count": count})
    sm, tm = (s0 + s1) / 2, (t0 + t1) / 2
    sub = _Grid(func, lattice, [s0, sm, s1], [t0, tm, t1], samples)
    wind = sub.cell_windings()
    out = []
    for i in range(2):
        for j in range(2):
            a0, a1 = (s0, sm) if i == 0 else (sm, s1)
            b0, b1 = (t0, tm) if j == 0 else (tm, t1)
            sub_poles = [(p, o) for p, o in cell_poles if inside_box(lattice, p, a0, a1, b0, b1)]
            c = int(wind[i, j]) + sum(o for _, o in sub_poles)
            if c > 0:
                out.extend(_locate_in_cell(func, lattice, a0, a1, b0, b1, c, sub_poles, ftol, samples, depth + 1))
    if sum(m for _, m in out) != count:
        raise _Perturb("sub-cell count mismatch")
    return out


def inside_box(lattice, p, s0, s1, t0, t1):
    s, t = (float(x) for x in lattice.to_coords(p))
    return s0 <= s < s1 and t0 <= t < t1


def ef_zero_count(f: EllipticFunction, region: Region = FULL_DOMAIN, subdivisions: int = 16):
    """(count, locations) of the zeros of f in ``region``; locations repeat by multiplicity."""
    zs = ef_zeros(f, region, subdivisions)
    return zs.count, zs.expanded()


def ef_zeros(f: EllipticFunction, region: Region = FULL_DOMAIN, subdivisions: int = 16) -> ZeroSet:
    if not f.terms:
        if f.constant == 0:
            raise DomainError("the zero function has no isolated zeros")
        return ZeroSet(0, [], [], abs(f.constant))
    func = lambda u: ef_eval(f, u)  # noqa: E731
    return locate_zeros(func, f.lattice, f.poles(), region, subdivisions)


def zeta_wp_sign(lattice: Lattice, a=None, samples: int = 100, seed: int = 0) -> int:
    """Empirical sign σ in ζ(u−a) − ζ(u+a) + 2ζ(a) = σ·℘′(a)/(℘(u) − ℘(a))."""
    rng = np.random.default_rng(seed)
    if a is None:
        a = complex(lattice.from_coords(0.31, 0.17))
    u = lattice.from_coords(rng.uniform(0, 1, samples), rng.uniform(0, 1, samples))
    lhs = lattice.zeta(u - a) - lattice.zeta(u + a) + 2 * lattice.zeta(a)
    rhs = lattice.wp_prime(a) / (lattice.wp(u) - lattice.wp(a))
    plus = np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs)))
    minus = np.max(np.abs(lhs + rhs) / (1 + np.abs(rhs)))
    if min(plus, minus) > 1e-8:
        raise NumericalError("zeta/wp identity holds with neither sign", {"plus": plus, "minus": minus})
    return 1 if plus < minus else -1


__all__ = [
    "Lattice",
    "TorusPoint",
    "EllipticFunction",
    "Region",
    "FULL_DOMAIN",
    "ZeroSet",
    "TORUS_TOL",
    "lattice_invariants",
    "weierstrass_eval",
    "ef_eval",
    "ef_residue",
    "ef_zero_count",
    "ef_zeros",
    "locate_zeros",
    "measure_pole_order",
    "zeta_wp_sign",
]
