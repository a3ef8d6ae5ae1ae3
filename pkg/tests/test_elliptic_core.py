import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma

from hsk.elliptic_core import (
    EllipticFunction,
    Region,
    TorusPoint,
    ef_zero_count,
    ef_zeros,
    lattice_invariants,
    locate_zeros,
    measure_pole_order,
    weierstrass_eval,
    zeta_wp_sign,
)
from hsk.errors import ContourError, DomainError, PoleError, ValidationError


def wp_theta(z, tau):
    """℘ for the lattice Z + τZ from Jacobi theta functions (independent oracle)."""
    mpmath.mp.dps = 30
    q = mpmath.exp(1j * mpmath.pi * tau)
    t2, t3 = mpmath.jtheta(2, 0, q), mpmath.jtheta(3, 0, q)
    pz = mpmath.pi * z
    val = (mpmath.pi * t2 * t3 * mpmath.jtheta(4, pz, q) / mpmath.jtheta(1, pz, q)) ** 2
    return complex(val - mpmath.pi**2 / 3 * (t2**4 + t3**4))


coord = st.floats(0.02, 0.98, allow_nan=False)
taus = st.sampled_from([1j, 2j, 0.3 + 1.1j, -0.45 + 0.9j, 0.5j + 0.1])


def test_square_lattice_invariants(lat_sq):
    # lemniscatic case: g3 = 0 and g2 = Γ(1/4)^8 / (16π²)
    assert abs(lat_sq.g3) < 1e-9
    assert abs(lat_sq.g2 - gamma(0.25) ** 8 / (16 * math.pi**2)) < 1e-9 * abs(lat_sq.g2)


@pytest.mark.parametrize("tau", [1j, 2j, 0.3 + 1.1j, -0.2 + 0.7j])
def test_wp_matches_theta_oracle(tau):
    L = lattice_invariants(tau)
    for s, t in [(0.13, 0.27), (0.61, 0.05), (0.5, 0.5), (0.9, 0.77)]:
        z = complex(L.from_coords(s, t))
        ref = wp_theta(z, tau)
        assert abs(L.wp(z) - ref) < 1e-10 * max(1.0, abs(ref))


@given(s=coord, t=coord, tau=taus)
def test_differential_equation(s, t, tau):
    L = lattice_invariants(tau)
    z = complex(L.from_coords(s, t))
    p, dp, _ = weierstrass_eval(z, L)
    lhs, rhs = dp**2, 4 * p**3 - L.g2 * p - L.g3
    assert abs(lhs - rhs) < 1e-9 * (abs(lhs) + abs(4 * p**3) + 1)


@given(s=coord, t=coord, tau=taus)
def test_periodicity_and_parity(s, t, tau):
    L = lattice_invariants(tau)
    z = complex(L.from_coords(s, t))
    p = L.wp(z)
    scale = 1 + abs(p)
    assert abs(L.wp(z + 1) - p) < 1e-10 * scale
    assert abs(L.wp(z + tau) - p) < 1e-10 * scale
    assert abs(L.wp(-z) - p) < 1e-10 * scale
    assert abs(L.wp_prime(-z) + L.wp_prime(z)) < 1e-9 * (1 + abs(L.wp_prime(z)))
    # ζ is quasi-periodic with the η constants
    zz = L.zeta(z)
    assert abs(L.zeta(z + 1) - zz - L.eta1) < 1e-9 * (1 + abs(zz))
    assert abs(L.zeta(z + tau) - zz - L.eta2) < 1e-9 * (1 + abs(zz))


def test_laurent_expansion_near_zero(lat2):
    L = lat2
    for u in (1e-2, 3e-3j, 2e-3 * cmath.exp(0.7j)):
        series = 1 / u**2 + L.g2 * u**2 / 20 + L.g3 * u**4 / 28
        assert abs(L.wp(u) - series) < 1e-9


def test_legendre_relation(lat2, lat_skew):
    for L in (lat2, lat_skew):
        assert L.legendre_defect() < 1e-10


def test_e_values_are_wp_at_half_periods(lat_skew):
    L = lat_skew
    for h, e in zip(L.half_periods, L.e_values):
        assert abs(L.wp(h) - e) < 1e-10 * max(1, abs(e))
        assert abs(L.wp_prime(h)) < 1e-8 * max(1, abs(e)) ** 1.5
    assert abs(sum(L.e_values)) < 1e-9 * max(abs(e) for e in L.e_values)


def test_zeta_identity_sign(lat2, lat_skew):
    assert zeta_wp_sign(lat2) == 1
    assert zeta_wp_sign(lat_skew) == 1


def test_invalid_tau():
    with pytest.raises(DomainError):
        lattice_invariants(-1j)


def test_pole_evaluation_raises(lat2):
    with pytest.raises(PoleError):
        lat2.wp(1.0 + 2j)


def test_torus_point_orders(lat2):
    assert TorusPoint.of(0.5, lat2).has_order_two()
    assert TorusPoint.of(1 + 2j, lat2).is_identity()
    assert not TorusPoint.of(0.3 + 0.4j, lat2).has_order_two()


def test_residue_theorem_enforced(lat2):
    with pytest.raises(ValidationError):
        EllipticFunction(lat2, 0j, ((0.3, 1, 1.0),))


def test_zeros_of_wp_minus_value(lat2):
    a = 0.3 + 0.4j
    f = EllipticFunction.wp_at(lat2) - complex(lat2.wp(a))
    n, zs = ef_zero_count(f)
    assert n == 2
    found = sorted(zs, key=lambda z: z.real)
    targets = [TorusPoint.of(a, lat2), TorusPoint.of(-a, lat2)]
    for t in targets:
        assert min(lat2.distance(z, t.z) for z in found) < 1e-9


def test_double_zero_at_half_period(lat2):
    f = EllipticFunction.wp_at(lat2) - lat2.e_values[0]
    zs = ef_zeros(f)
    assert zs.count == 2
    assert zs.multiplicities == [2]
    assert lat2.distance(zs.zeros[0], 0.5) < 1e-6


def test_wp_prime_zeros_are_half_periods(lat_skew):
    f = EllipticFunction.wp_at(lat_skew, derivative=1)
    zs = ef_zeros(f)
    assert zs.count == 3
    for h in lat_skew.half_periods:
        assert min(lat_skew.distance(z, h) for z in zs.zeros) < 1e-8


def test_zeros_in_subregion(lat2):
    a = 0.3 + 0.4j
    f = EllipticFunction.wp_at(lat2) - complex(lat2.wp(a))
    # a sits at lattice coordinates (0.3, 0.2); −a at (0.7, 0.8)
    zs = locate_zeros(lambda u: f(u), lat2, f.poles(), Region(0.1, 0.5, 0.1, 0.5))
    assert zs.count == 1
    assert abs(zs.zeros[0] - a) < 1e-9


def test_region_corner_on_pole_is_reported(lat2):
    f = EllipticFunction.wp_at(lat2) - complex(lat2.wp(0.3 + 0.4j))
    with pytest.raises(ContourError):
        locate_zeros(lambda u: f(u), lat2, f.poles(), Region(0.0, 0.5, 0.0, 0.5))


def test_measure_pole_order(lat2):
    assert measure_pole_order(lat2.wp, 0j) == 2
    assert measure_pole_order(lat2.wp_prime, 1 + 0j) == 3


@given(s=coord, t=coord)
def test_derivative_of_elliptic_function(s, t):
    L = lattice_invariants(2j)
    f = EllipticFunction.zeta_difference(L, 0.3 + 0.4j, -0.3 - 0.4j, 0.7)
    z = complex(L.from_coords(s, t))
    if min(L.distance(z, 0.3 + 0.4j), L.distance(z, -0.3 - 0.4j)) < 0.05:
        return
    h = 1e-5
    fd = (f(z + h) - f(z - h)) / (2 * h)
    assert abs(f.derivative()(z) - fd) < 1e-5 * (1 + abs(fd))


def test_evenness_detection(lat2):
    a = 0.3 + 0.4j
    even = EllipticFunction.zeta_difference(lat2, a, -a)  # ζ(u−a) − ζ(u+a) is even
    odd = EllipticFunction.wp_at(lat2, derivative=1)
    assert even.is_even()
    assert not odd.is_even()
    z = 0.17 + 0.61j
    assert abs(even(z) - even(-z)) < 1e-10 * (1 + abs(even(z)))


def test_vectorized_evaluation(lat2):
    zs = np.array([0.1 + 0.2j, 0.4 + 1.3j, 0.77 + 0.5j])
    vec = lat2.wp(zs)
    assert vec.shape == (3,)
    for z, v in zip(zs, vec):
        assert vec.dtype == complex
        assert abs(lat2.wp(complex(z)) - v) == 0
