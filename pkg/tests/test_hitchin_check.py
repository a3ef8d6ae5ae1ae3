import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsk.elliptic_core import lattice_invariants
from hsk.errors import DomainError, StencilError, ValidationError
from hsk.hitchin_check import (
    abelian_residues,
    abelian_solution,
    biquard_model,
    conformal_flag_check,
    direct_sum,
    gauge_conjugate,
    load,
    perturb,
    pure_gauge,
    residual,
    residual_density,
    residual_report,
    save,
    stencil,
)

XI0 = 0.3 + 0.4j


@pytest.fixture(scope="module")
def ab(lat2):
    return abelian_solution(lat2, XI0, c=0.2, epsilon=1.0)


@pytest.fixture(scope="module")
def k2(lat2, ab):
    return direct_sum(ab, abelian_solution(lat2, XI0, c=-0.2, epsilon=-1.0))


@settings(max_examples=20)
@given(a=st.integers(0, 6), b=st.integers(0, 6))
def test_stencil_reproduces_pure_powers(a, b):
    st_ = stencil(0.01, 0.02j)
    if a and b and a + b > 2:
        return
    f = st_.z**a * np.conj(st_.z) ** b
    want_d = 1.0 if (a, b) == (1, 0) else 0.0
    want_db = 1.0 if (a, b) == (0, 1) else 0.0
    assert abs(st_.d @ f - want_d) < 1e-8
    assert abs(st_.dbar @ f - want_db) < 1e-8


def test_stencil_on_skew_grid():
    st_ = stencil(0.01, 0.003 + 0.011j)
    assert st_.order >= 8
    with pytest.raises(DomainError):
        stencil(0.01, 0.02)


def test_abelian_solution_passes(ab):
    rep = residual_report(ab)
    assert rep.passes(1e-9)
    assert rep.r1 == 0.0
    assert rep.skipped > 0 and rep.sites > 0


def test_abelian_residues_cancel(ab):
    res = abelian_residues(ab)
    assert abs(res[0] - 1) < 1e-9 and abs(res[1] + 1) < 1e-9


def test_biquard_model_passes():
    rep = residual_report(biquard_model([0.3j, -0.3j], [1 + 0.5j, -1 - 0.5j]))
    assert rep.passes(1e-9)


def test_noncommuting_biquard_fails():
    b = np.array([[0.3j, 0.2], [-0.2, -0.3j]])
    phi0 = np.array([[1, 0], [0, -1]], dtype=complex)
    assert not residual_report(biquard_model(b, phi0)).passes(1e-6)


def test_gauge_covariance(k2):
    cfg = perturb(k2, 1e-3, seed=1)
    th = 0.7
    U = np.array([[np.cos(th), -np.sin(th) * 1j], [-np.sin(th) * 1j, np.cos(th)]])
    a, b = residual(cfg), residual(gauge_conjugate(cfg, U))
    assert abs(a[0] - b[0]) <= 1e-12 * max(1.0, a[0])
    assert abs(a[1] - b[1]) <= 1e-12 * max(1.0, a[1])
    with pytest.raises(DomainError):
        gauge_conjugate(cfg, 2 * np.eye(2))


def test_pure_gauge_refinement(lat2):
    r = []
    for M in (256, 512):
        a = abelian_solution(lat2, XI0, c=0.2, epsilon=1.0, M=M)
        b = abelian_solution(lat2, XI0, c=-0.2, epsilon=-1.0, M=M)
        r.append(residual(pure_gauge(direct_sum(a, b)))[0])
    # second-order stencil: doubling M divides the curvature residual by about 4
    assert r[0] / r[1] >= 3


def test_linear_perturbation_response(ab):
    slopes = [residual(perturb(ab, d, seed=3))[0] / d for d in (1e-4, 1e-3, 1e-2)]
    assert max(slopes) / min(slopes) - 1 < 0.2


def test_coarse_grid_raises(lat2):
    with pytest.raises(StencilError):
        residual(abelian_solution(lat2, XI0, M=128))


def test_rejections(lat2, ab):
    with pytest.raises(DomainError):
        abelian_solution(lat2, 0.5)
    with pytest.raises(DomainError):
        abelian_solution(lat2, XI0, M=8)
    from dataclasses import replace
    with pytest.raises(ValidationError):
        replace(ab, B_xibar=ab.B_xibar + 1.0)
    with pytest.raises(ValidationError):
        replace(ab, metric_flag="hyperbolic")


def test_conformal_flag(ab, k2):
    assert conformal_flag_check(ab)
    assert conformal_flag_check(perturb(k2, 1e-3, seed=4))
    cfg = perturb(ab, 1e-3, seed=3)
    flat = residual_density(cfg)
    hyp = residual_density(cfg.with_metric("poincare"))
    ok = np.isfinite(flat)
    assert not np.allclose(flat[ok], hyp[ok])


def test_save_load_roundtrip(tmp_path, k2):
    cfg = perturb(k2, 1e-3, seed=2)
    save(cfg, tmp_path / "cfg")
    again = load(tmp_path / "cfg")
    assert residual(again) == residual(cfg)
    assert again.punctures == cfg.punctures and again.k == 2
