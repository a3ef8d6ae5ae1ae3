import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsk.elliptic_core import lattice_invariants
from hsk.errors import DomainError, InvariantViolation, ValidationError
from hsk.higgs_model import build_higgs, mobius_constants, mobius_field, perturb_odd
from hsk.rational_map import (
    RationalMap,
    deformation_rank,
    eval_map,
    extract_map,
    fit_samples,
    hausdorff_to_curve,
    invert_wp,
    mobius_map,
    param_count,
    reconstruct_curve,
)
from hsk.spectral_curve import build_curve

XI0 = 0.3 + 0.4j


@pytest.fixture(scope="module")
def maps(lat2):
    out = {}
    for k in (1, 2, 3):
        C = build_curve(build_higgs(k, lat2, XI0, seed=7))
        out[k] = (C, extract_map(C, seed=0))
    return out


@pytest.mark.parametrize("k", [1, 2, 3])
def test_degree_and_value_at_infinity(maps, lat2, k):
    _, R = maps[k]
    assert R.degree == k
    wp0 = complex(lat2.wp(XI0))
    assert abs(R.at_infinity() - wp0) < 1e-8 * max(1, abs(wp0))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_roundtrip_hausdorff(maps, lat2, k):
    C, R = maps[k]
    samples = reconstruct_curve(R, lat2, n=60, seed=1)
    assert hausdorff_to_curve(C, samples) < 1e-8


def test_refit_from_reconstructed_samples(maps, lat2):
    C, R = maps[2]
    R2 = fit_samples(reconstruct_curve(R, lat2, n=40, seed=3), lat2, 2)
    for w in (0.3 + 0.1j, -1.2 + 2j, 4.0):
        a, b = eval_map(R, w), eval_map(R2, w)
        assert abs(a - b) < 1e-7 * (1 + abs(a))


def test_branch_values_match_curve(maps):
    C, R = maps[2]
    finite_curve = sorted((w for w in C.pi2_branch if np.isfinite(w)), key=lambda z: (z.real, z.imag))
    bv = R.branch_values()
    assert len(bv) + sum(1 for w in C.pi2_branch if not np.isfinite(w)) == 4 * 2
    for w in finite_curve:
        assert np.min(np.abs(bv - w)) < 1e-6 * (1 + abs(w))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_deformation_rank_is_full(lat2, k):
    for seed in (101, 102):
        R = extract_map(build_curve(build_higgs(k, lat2, XI0, seed=seed)), seed=seed)
        assert deformation_rank(R) == 2 * k + 1
    assert param_count(k) == 2 * k + 1


def test_param_count_rejects_bad_rank():
    with pytest.raises(DomainError):
        param_count(0)


def test_mobius_map_matches_rank_one_field(lat2):
    phi = mobius_field(lat2, XI0, 0.4, 0.8)
    c_prime, sigma = mobius_constants(phi)
    R = extract_map(build_curve(phi), seed=2)
    M = mobius_map(lat2, XI0, c_prime, 0.8, sigma)
    for w in (0.1 + 0.2j, 2.0 - 1j, -3j):
        assert abs(eval_map(R, w) - eval_map(M, w)) < 1e-8 * (1 + abs(eval_map(M, w)))


def test_odd_field_is_rejected(lat2):
    phi = perturb_odd(build_higgs(2, lat2, XI0, seed=7), 0.05)
    # either the fiber count or the ℘-value comparison rejects the broken symmetry
    with pytest.raises(InvariantViolation):
        extract_map(build_curve(phi), seed=0)


@settings(max_examples=20)
@given(s=st.floats(0.05, 0.95), t=st.floats(0.05, 0.95))
def test_invert_wp_property(s, t):
    L = lattice_invariants(2j)
    xi = complex(L.from_coords(s, t))
    if L.distance(xi, 0) < 0.05 or min(L.distance(xi, h) for h in L.half_periods) < 0.05:
        return
    y = complex(L.wp(xi))
    sol = invert_wp(L, y)
    assert min(L.distance(z, xi) for z in sol) < 1e-8
    assert min(L.distance(z, -xi) for z in sol) < 1e-8


def test_common_root_is_reported(lat2):
    R = RationalMap([-1.0, 1.0], [-1.0, 1.0], lat2)  # (w − 1)/(w − 1)
    with pytest.raises(ValidationError):
        eval_map(R, 1.0)
    assert R.resultant() < 1e-12


def test_json_fields(maps):
    _, R = maps[1]
    d = R.to_dict(XI0)
    assert d["k"] == 1 and d["xi0"] == [0.3, 0.4]
    assert len(d["num"]) == 2 and len(d["den"]) == 2
