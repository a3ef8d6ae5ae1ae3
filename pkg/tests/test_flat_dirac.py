import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from hsk.flat_dirac import (
    FlatModelOperator,
    InvertibilityError,
    TruncationWarning,
    bessel_k0,
    bessel_k0_integral,
    bump_source,
    decay_fit,
    green_norm_bound,
    helmholtz_residual,
    k0_asymptotic_ratio,
    k0_l1,
    lambda_min,
    solve_flat,
    torus_spectrum,
    weitzenbock_check,
)
from hsk.errors import DomainError


@given(r=st.floats(1e-4, 60.0))
def test_k0_matches_scipy(r):
    ref = special.k0(r)
    assert abs(bessel_k0(r) - ref) < 1e-12 * ref


@pytest.mark.parametrize("r", [0.01, 0.7, 2.0, 5.0, 24.9, 30.0])
def test_k0_two_independent_paths(r):
    assert abs(bessel_k0(r) - bessel_k0_integral(r)) < 1e-11 * bessel_k0(r)


def test_k0_vectorized_and_domain():
    r = np.array([0.5, 3.0, 40.0])
    assert np.allclose(bessel_k0(r), special.k0(r), rtol=1e-13, atol=0)
    with pytest.raises(DomainError):
        bessel_k0(0.0)


def test_k0_l1_mass():
    assert abs(k0_l1() - 2 * math.pi) < 1e-6


@pytest.mark.parametrize("r", [10.0, 20.0])
def test_k0_asymptotic_remainder(r):
    dev = abs(k0_asymptotic_ratio(r) - (1 - 1 / (8 * r) + 9 / (128 * r * r)))
    assert dev < 2 * 75 / (1024 * r**3)


@given(x=st.floats(-10, 10), y=st.floats(-10, 10))
def test_lambda_min_is_distance_to_lattice(x, y):
    lam, _, lm = torus_spectrum((x, y), N=6)
    assert abs(lm - lam[0]) < 1e-12 or lm < lam[0]
    brute = min(math.hypot(2 * math.pi * a + x, 2 * math.pi * b + y) for a in range(-3, 4) for b in range(-3, 4))
    assert abs(lambda_min((x, y)) - brute) < 1e-12 * (1 + brute)


def test_lambda_min_at_corner():
    assert abs(lambda_min((math.pi, math.pi)) - math.sqrt(2) * math.pi) < 1e-14


def test_zero_twist_is_rejected():
    op = FlatModelOperator((0.0, 0.0), M=32, L=10.0)
    with pytest.raises(InvertibilityError):
        solve_flat(op, bump_source(op))
    with pytest.raises(InvertibilityError):
        green_norm_bound(op)


def test_solution_satisfies_helmholtz():
    res = []
    for M in (128, 256):
        op = FlatModelOperator((1.0, 0.5), M=M, L=8.0)
        rho = bump_source(op, modes=[(0, 0), (1, 0)], radius=2.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            g = solve_flat(op, rho)
        res.append(helmholtz_residual(op, g, rho))
    # the five-point laplacian is second order, so halving h cuts the residual about 4×
    assert res[1] < 1e-2
    assert res[0] / res[1] > 3


def test_narrow_box_warns():
    op = FlatModelOperator((0.3, 0.0), M=32, L=4.0)
    with pytest.warns(TruncationWarning):
        solve_flat(op, bump_source(op))


def test_decay_rate_at_corner_twist():
    op = FlatModelOperator((math.pi, math.pi), M=256)
    g = solve_flat(op, bump_source(op))
    assert abs(decay_fit(g) / op.lambda_min - 1) < 0.05


def test_parseval():
    op = FlatModelOperator((1.0, 0.5), M=32, L=6.0)
    f = bump_source(op, modes=[(0, 0), (1, -1), (0, 2)], radius=3.0)
    assert f.parseval_defect() < 1e-12


@pytest.mark.parametrize("xi", [(math.pi, math.pi), (1.0, 0.5)])
def test_green_norm_bound(xi):
    op = FlatModelOperator(xi)
    norm, bound = green_norm_bound(op, box_points=64)
    assert norm <= bound
    assert abs(bound - (1 + 1 / op.lambda_min**2)) < 1e-12


def test_weitzenbock_sign():
    good = weitzenbock_check((1.0, 2.0))
    assert good["offdiag"] == 0.0 and good["diag"] <= 1e-12
    bad = weitzenbock_check((1.0, 2.0), corner_sign=+1)
    assert bad["offdiag"] > 1.0
