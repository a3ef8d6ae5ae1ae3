import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsk.elliptic_core import EllipticFunction, lattice_invariants
from hsk.errors import NodeError, ValidationError
from hsk.higgs_model import build_higgs, graph_field, higgs_from_entries, higgs_eval, nodal_field, perturb_odd
from hsk.spectral_curve import (
    RestrictionKind,
    build_curve,
    eigenline,
    eigenline_degree,
    fiber_over_base,
    fiber_over_w,
    fixed_points,
    involution_check,
    leverrier,
    membership_at_poles,
    restriction_type,
    sample_curve,
)

XI0 = 0.3 + 0.4j


@pytest.fixture(scope="module")
def curves(lat2):
    return {k: build_curve(build_higgs(k, lat2, XI0, seed=7)) for k in (1, 2, 3)}


def test_leverrier_matches_numpy():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    c, _ = leverrier(A)
    assert np.allclose(c, np.poly(A), atol=1e-10)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_genus_and_branch_counts(curves, k):
    C = curves[k]
    assert C.genus == 2 * k - 1
    assert len(C.pi1_branch) == 4 * k - 4
    assert len(C.pi2_branch) == 4 * k
    assert tuple(C.homology) == (k, 2)
    assert C.genus_pi1 == C.genus_pi2


@settings(max_examples=8)
@given(k=st.integers(1, 3), seed=st.integers(0, 500))
def test_riemann_hurwitz_property(k, seed):
    C = build_curve(build_higgs(k, lattice_invariants(2j), XI0, seed=seed))
    assert len(C.pi2_branch) == len(C.pi1_branch) + 4
    assert C.genus == 2 * k - 1


@pytest.mark.parametrize("tau", [1j, 0.3 + 1.1j])
def test_other_lattices(tau):
    L = lattice_invariants(tau)
    C = build_curve(build_higgs(2, L, 0.21 + 0.37 * tau, seed=3))
    assert (C.genus, len(C.pi1_branch), len(C.pi2_branch)) == (3, 4, 8)


def test_branch_points_lie_on_curve(curves):
    C = curves[2]
    for xi in C.pi1_branch:
        w = fiber_over_base(C, xi)
        # a branch point of π₁ is a double eigenvalue
        assert min(abs(w[i] - w[j]) for i in range(2) for j in range(i + 1, 2)) < 1e-4


def test_involution_and_membership(curves):
    for C in curves.values():
        assert involution_check(C)
        assert membership_at_poles(C)


def test_odd_perturbation_breaks_symmetry(lat2):
    phi = perturb_odd(build_higgs(2, lat2, XI0, seed=7), 0.05)
    assert not involution_check(build_curve(phi))


def test_fiber_over_infinity_is_poles(curves):
    C = curves[2]
    pts = fiber_over_w(C, complex("inf"))
    got = sorted((p.z for p in pts), key=lambda z: z.real)
    want = sorted((complex(C.lattice.reduce(z)) for z in (XI0, -XI0)), key=lambda z: z.real)
    assert np.allclose(got, want)


def test_fiber_over_w_roundtrip(curves):
    C = curves[2]
    w = 0.37 - 0.81j
    pts = fiber_over_w(C, w)
    assert len(pts) == 2
    for p in pts:
        assert abs(C.F(p.z, w)) < 1e-8 * (1 + np.max(np.abs(higgs_eval(C.source, p.z)))) ** 2
    # the two points are exchanged by ξ ↦ −ξ
    assert C.lattice.distance(pts[0].z, -pts[1].z) < 1e-8


def test_wp_graph_branch_values(lat2):
    C = build_curve(graph_field(EllipticFunction.wp_at(lat2)))
    finite = sorted(w for w in C.pi2_branch if np.isfinite(w))
    assert len(C.pi2_branch) == 4
    assert sum(1 for w in C.pi2_branch if not np.isfinite(w)) == 1
    for e in lat2.e_values:
        assert min(abs(w - e) for w in finite) < 1e-8 * max(1, abs(e))
    assert involution_check(C)


def test_nodal_field_is_singular(lat2):
    phi = nodal_field(lat2, XI0, half_period=0, t=0.3)
    C = build_curve(phi, validate=False)
    assert not C.smooth
    rt = restriction_type(C, 0.3)
    assert rt.kind is RestrictionKind.DOUBLE_POINT
    # the sheets cross over the half period while Φ(ω) − t stays a Jordan block,
    # so the eigenline there is still well defined
    v = eigenline(C, 0.5, 0.3)
    A = higgs_eval(phi, 0.5)
    assert np.linalg.norm(A @ v - 0.3 * v) < 1e-7


def test_two_dimensional_eigenspace_is_a_node(lat2):
    f = EllipticFunction.wp_at(lat2)
    zero = EllipticFunction.const(lat2, 0)
    phi = higgs_from_entries(lat2, 0j, [[f, zero], [zero, f]])
    C = build_curve(phi, validate=False)
    xi = 0.2 + 0.3j
    with pytest.raises(NodeError):
        eigenline(C, xi, complex(lat2.wp(xi)))


def test_restriction_types(curves, lat2):
    C = curves[2]
    assert restriction_type(C, 0.9 + 0.2j).kind is RestrictionKind.SPLIT_DISTINCT
    w = C.pi2_branch[0]
    assert restriction_type(C, w).kind is RestrictionKind.INDECOMPOSABLE_F2


def test_fixed_points_over_order_two_points(curves):
    C = curves[2]
    pts = fixed_points(C)
    assert len(pts) == 4 * C.k
    for om, w in pts:
        assert abs(C.F(om, w)) < 1e-6 * (1 + abs(w)) ** C.k


def test_eigenline_is_kernel(curves):
    C = curves[2]
    xi = 0.18 + 1.3j
    for w in fiber_over_base(C, xi):
        v = eigenline(C, xi, w)
        A = higgs_eval(C.source, xi)
        assert np.linalg.norm(A @ v - w * v) < 1e-9 * (1 + np.linalg.norm(A))
    with pytest.raises(ValidationError):
        eigenline(C, xi, 123.0)


def test_eigenline_degree_values(curves):
    # trivial frame: deg N = 2 − 2k (see the ledger for the comparison with the twisted frame)
    assert eigenline_degree(curves[1]) == 0
    assert eigenline_degree(curves[2]) == -2


def test_sample_curve_points_on_curve(curves):
    C = curves[3]
    for xr, xi_, wr, wi, _sheet in sample_curve(C, n=10):
        xi, w = complex(xr, xi_), complex(wr, wi)
        assert abs(C.F(xi, w)) < 1e-7 * (1 + abs(w)) ** 3


def test_curve_json(curves):
    d = curves[2].to_dict()
    assert d["genus"] == 3 and d["homology"] == [2, 2]
