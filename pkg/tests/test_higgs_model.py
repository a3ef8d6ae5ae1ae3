import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsk.elliptic_core import EllipticFunction, lattice_invariants
from hsk.errors import DomainError, ValidationError
from hsk.higgs_model import (
    ResidueData,
    build_higgs,
    char_poly_coeffs,
    dumps,
    graph_field,
    higgs_eval,
    loads,
    mobius_constants,
    mobius_field,
    perturb_odd,
    xi_degree,
)

XI0 = 0.3 + 0.4j
seeds = st.integers(0, 10_000)
ranks = st.integers(1, 3)
points = st.tuples(st.floats(0.05, 0.95), st.floats(0.05, 0.95))


def _away(L, xi, poles, r=0.05):
    return all(L.distance(xi, p) > r for p in poles)


@given(k=ranks, seed=seeds, pt=points)
def test_field_is_even(k, seed, pt):
    L = lattice_invariants(2j)
    phi = build_higgs(k, L, XI0, seed=seed)
    xi = complex(L.from_coords(*pt))
    if not _away(L, xi, (XI0, -XI0)):
        return
    a, b = higgs_eval(phi, xi), higgs_eval(phi, -xi)
    assert np.max(np.abs(a - b)) < 1e-9 * (1 + np.max(np.abs(a)))


@given(k=ranks, seed=seeds, pt=points)
def test_field_is_doubly_periodic(k, seed, pt):
    L = lattice_invariants(2j)
    phi = build_higgs(k, L, XI0, seed=seed)
    xi = complex(L.from_coords(*pt))
    if not _away(L, xi, (XI0, -XI0)):
        return
    a = higgs_eval(phi, xi)
    for shift in (1.0, L.tau):
        assert np.max(np.abs(higgs_eval(phi, xi + shift) - a)) < 1e-9 * (1 + np.max(np.abs(a)))


@given(k=ranks, seed=seeds)
def test_residues_rank_one_and_cancel(k, seed):
    L = lattice_invariants(2j)
    phi = build_higgs(k, L, XI0, seed=seed)
    Rp, Rm = phi.residue_matrix(XI0), phi.residue_matrix(-XI0)
    assert np.max(np.abs(Rp + Rm)) < 1e-12 * (1 + np.max(np.abs(Rp)))
    sv = np.linalg.svd(Rp, compute_uv=False)
    assert np.sum(sv > 1e-10 * sv[0]) == 1
    assert abs(np.trace(Rp) - phi.epsilon) < 1e-10 * (1 + abs(phi.epsilon))


def test_residue_by_contour_integral(lat2):
    phi = build_higgs(2, lat2, XI0, seed=3)
    th = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    z = XI0 + 0.05 * np.exp(1j * th)
    vals = higgs_eval(phi, z)
    res = np.mean(vals * (z - XI0)[:, None, None], axis=0)
    assert np.max(np.abs(res - phi.residue_matrix(XI0))) < 1e-10


def test_rejects_identity_and_order_two(lat2):
    with pytest.raises(ValidationError):
        build_higgs(2, lat2, 0j, seed=1)
    with pytest.raises(ValidationError, match="order two"):
        build_higgs(2, lat2, 0.5, seed=1)
    with pytest.raises(DomainError):
        build_higgs(0, lat2, XI0, seed=1)


def test_rejects_nilpotent_and_higher_rank(lat2):
    nil = ResidueData.rank_one([1.0, 0.0], [0.0, 1.0])  # vᵀu = 0
    with pytest.raises(ValidationError, match="nilpotent"):
        build_higgs(2, lat2, XI0, nil, np.zeros((2, 2)))
    u = np.array([[1, 0], [0, 1]], dtype=complex)
    v = np.array([[1, 0], [0, 2]], dtype=complex)
    rank2 = ResidueData(u, v, u, -v)
    with pytest.raises(ValidationError, match="rank"):
        build_higgs(2, lat2, XI0, rank2, np.zeros((2, 2)))


def test_residue_sum_must_vanish(lat2):
    u = np.array([[1.0, 1.0]])
    v = np.array([[1.0, 0.5]])
    bad = ResidueData(u, v, u, -2 * v)
    with pytest.raises(ValidationError):
        build_higgs(2, lat2, XI0, bad, np.zeros((2, 2)))


@given(k=ranks, seed=seeds)
def test_json_roundtrip(k, seed):
    L = lattice_invariants(2j)
    phi = build_higgs(k, L, XI0, seed=seed)
    text = dumps(phi)
    again = loads(text)
    assert dumps(again) == text
    xi = 0.21 + 0.77j
    assert np.array_equal(higgs_eval(phi, xi), higgs_eval(again, xi))


def test_seeded_construction_is_deterministic(lat2):
    a, b = build_higgs(3, lat2, XI0, seed=11), build_higgs(3, lat2, XI0, seed=11)
    assert dumps(a) == dumps(b)


def test_epsilon_is_respected(lat2):
    phi = build_higgs(2, lat2, XI0, seed=5, epsilon=0.25 - 0.5j)
    assert abs(phi.epsilon - (0.25 - 0.5j)) < 1e-12


def test_char_poly_coefficients(lat2):
    phi = build_higgs(2, lat2, XI0, seed=2)
    xi = 0.41 + 1.2j
    A = higgs_eval(phi, xi)
    c = char_poly_coeffs(phi, xi)
    assert abs(c[1] + np.trace(A)) < 1e-10 * (1 + abs(np.trace(A)))
    assert abs(c[2] - np.linalg.det(A)) < 1e-9 * (1 + abs(np.linalg.det(A)))


def test_xi_degree_of_fiber(lat2):
    # for generic w the fiber over w has two points (±ξ pairs counted once each)
    for k in (1, 2):
        phi = build_higgs(k, lat2, XI0, seed=4)
        assert xi_degree(phi, 0.7 - 0.2j) == 2


def test_mobius_field_constant_shift(lat2):
    phi = mobius_field(lat2, XI0, 0.4, 0.8)
    c_prime, sigma = mobius_constants(phi)
    xi = 0.12 + 0.9j
    wp, wp0, dwp0 = lat2.wp(xi), lat2.wp(XI0), lat2.wp_prime(XI0)
    closed = c_prime + sigma * 0.8 * dwp0 / (wp - wp0)
    assert abs(higgs_eval(phi, xi)[0, 0] - closed) < 1e-10 * (1 + abs(closed))


def test_graph_field_and_odd_perturbation(lat2):
    g = graph_field(EllipticFunction.wp_at(lat2))
    assert g.k == 1 and not g.strict
    phi = build_higgs(2, lat2, XI0, seed=1)
    odd = perturb_odd(phi, 0.1)
    assert not odd.su2_symmetric
    xi = 0.2 + 0.3j
    assert np.max(np.abs(higgs_eval(odd, xi) - higgs_eval(odd, -xi))) > 1e-3
