import numpy as np
import pytest
from scipy.linalg import expm

from gtcone import corpus as C
from gtcone import geometry as G
from gtcone import oracles
from gtcone.errors import ArgumentError, DegeneracyError, DomainError


def test_chart_sampling_is_seeded_and_in_domain(sphere2):
    a, b = sphere2.sample(30, 7), sphere2.sample(30, 7)
    assert np.array_equal(a, b)
    assert all(sphere2.chart.contains(p) for p in a)
    assert not np.array_equal(a, sphere2.sample(30, 8))


def test_field_outside_chart_raises(sphere2):
    with pytest.raises(DomainError):
        sphere2.metric.value([20.0, 0.0])


def test_field_requires_exactly_one_definition(sphere2):
    with pytest.raises(ArgumentError):
        G.ScalarField(sphere2.chart)
    with pytest.raises(ArgumentError):
        G.ScalarField(sphere2.chart, expr=lambda x: x[0], jet_fn=lambda p, o: None)


def test_metric_signature_validation(sphere2):
    with pytest.raises(ArgumentError):
        G.MetricField(sphere2.chart, (3, 0), expr=lambda x: [[1.0, 0.0], [0.0, 1.0]])


def test_degenerate_metric_value_rejected(sphere2):
    g = G.MetricField(sphere2.chart, (2, 0), expr=lambda x: [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(DegeneracyError):
        g.jet([0.1, 0.2])


@pytest.mark.parametrize("matrix,sig", [(np.eye(3), (3, 0)), (np.diag([1.0, -1.0, -1.0]), (1, 2)),
                                        (C.m2r_form(), (2, 2))])
def test_signature_of(matrix, sig):
    assert G.signature_of(matrix) == sig


# --------------------------------------------------------------------------
# Christoffel symbols and curvature

def test_christoffel_flat_is_zero(flat2):
    for p in flat2.sample(5, 1):
        assert np.abs(G.christoffel_at(flat2.metric, p).value).max() == 0.0


def test_christoffel_sphere_origin_and_offaxis(sphere2):
    assert np.abs(G.christoffel_at(sphere2.metric, [0.0, 0.0]).value).max() < 1e-15
    gamma = G.christoffel_at(sphere2.metric, [1.0, 0.0]).value
    # the conformal factor gives Gamma^x_xx = d_x log sqrt(f) = -2x / (1 + |x|^2)
    assert gamma[0, 0, 0] == pytest.approx(-1.0, abs=1e-14)
    assert gamma[1, 1, 0] == pytest.approx(-1.0, abs=1e-14)
    assert gamma[0, 1, 1] == pytest.approx(1.0, abs=1e-14)


def test_christoffel_symmetric_and_metric_compatible(sphere3):
    for p in sphere3.sample(10, 3):
        gamma = G.christoffel_at(sphere3.metric, p).value
        assert np.abs(gamma - gamma.transpose(0, 2, 1)).max() < 1e-15
        assert G.metric_compatibility(sphere3.metric, p) < 1e-12


def test_riemann_flat_is_zero(flat2):
    R, Rd = G.riemann_at(flat2.metric, [0.3, -0.4])
    assert np.abs(R).max() == 0.0 and np.abs(Rd).max() == 0.0


def test_sectional_curvature_sphere(sphere2, rng):
    worst = 0.0
    for p in sphere2.sample(50, 11):
        X, Y = rng.standard_normal(2), rng.standard_normal(2)
        worst = max(worst, abs(G.sectional_curvature(sphere2.metric, p, X, Y) - 1.0))
    assert worst < 1e-9


def test_sectional_curvature_sphere3_random_planes(sphere3, rng):
    for p in sphere3.sample(20, 12):
        X, Y = rng.standard_normal(3), rng.standard_normal(3)
        assert G.sectional_curvature(sphere3.metric, p, X, Y) == pytest.approx(1.0, abs=1e-9)


def test_sectional_curvature_pseudo_sphere():
    case = C.make_case("pseudo_sphere", p=1, q=1)
    for p in case.sample(30, 2):
        K = G.sectional_curvature(case.metric, p, [1.0, 0.0], [0.0, 1.0])
        assert K == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (1, 2)])
def test_pseudo_sphere_embedding_oracle(p, q):
    case = C.make_case("pseudo_sphere", p=p, q=q)
    assert case.metric.signature == (p, q)
    for x in case.sample(10, 5):
        if oracles.stencil_inside(case.chart, x):
            assert oracles.embedding_metric_discrepancy(case, x) < 1e-7


def test_degenerate_plane_rejected(sphere2):
    with pytest.raises(DegeneracyError):
        G.sectional_curvature(sphere2.metric, [0.1, 0.1], [1.0, 0.0], [2.0, 0.0])


def test_first_bianchi_identity(sphere3):
    C3 = C.make_case("bumpy_sphere", n=3)
    for case in (sphere3, C3):
        for p in case.sample(5, 4):
            _, Rd = G.riemann_at(case.metric, p)
            cyc = Rd + Rd.transpose(0, 2, 3, 1) + Rd.transpose(0, 3, 1, 2)
            assert np.abs(cyc).max() < 1e-10


def test_scalar_curvature_sphere(sphere3):
    assert G.scalar_curvature(sphere3.metric, [0.2, -0.1, 0.4]) == pytest.approx(6.0, abs=1e-10)


def test_einstein_residual(sphere3, flat2):
    assert max(G.einstein_residual(sphere3.metric, p) for p in sphere3.sample(20, 1)) < 1e-9
    assert G.einstein_residual(flat2.metric, [0.5, 0.5]) == 0.0
    bumpy = C.make_case("bumpy_sphere", n=3)
    assert max(G.einstein_residual(bumpy.metric, p) for p in bumpy.sample(20, 1)) > 1e-3


# --------------------------------------------------------------------------
# covariant and Lie derivatives

def test_covariant_derivative_of_constant_is_zero(sphere2):
    D = G.covariant_derivative(sphere2.scalars["const"], sphere2.metric)
    for p in sphere2.sample(5, 2):
        assert np.abs(D.value(p)).max() == 0.0


def test_iterated_covariant_derivative_is_symmetric_hessian(sphere2):
    alpha = sphere2.scalars["harmonic_deg2"]
    DD = G.covariant_derivative(G.covariant_derivative(alpha, sphere2.metric), sphere2.metric)
    for p in sphere2.sample(5, 3):
        H = DD.value(p)
        d = G.scalar_derivatives(alpha, sphere2.metric, p)
        assert np.abs(H - d.d2).max() < 1e-13
        assert np.abs(H - H.T).max() < 1e-13


def test_covariant_derivative_rejects_high_valence(sphere2):
    D3 = G.covariant_derivative(
        G.covariant_derivative(G.covariant_derivative(sphere2.scalars["const"], sphere2.metric),
                               sphere2.metric), sphere2.metric)
    with pytest.raises(ArgumentError):
        G.covariant_derivative(D3, sphere2.metric)


def test_lie_derivative_rotation_and_dilation(flat2):
    p = [0.7, -0.2]
    assert np.abs(G.lie_derivative_metric(flat2.vectors["rotation"], flat2.metric, p)).max() == 0.0
    L = G.lie_derivative_metric(flat2.vectors["dilation"], flat2.metric, p)
    np.testing.assert_allclose(L, 2 * np.eye(2), atol=1e-15)


def test_lie_derivative_projective_field_matches_flow_pullback():
    case = C.make_case("sl3_projective_field", n=2)
    a = np.array(case.params["element"])
    X, h = case.vectors["projective"], 1e-4
    for p in case.sample(5, 9):
        L = G.lie_derivative_metric(X, case.metric, p)
        plus = C.projective_pullback_metric(case.chart, expm(h * a)).value(p)
        minus = C.projective_pullback_metric(case.chart, expm(-h * a)).value(p)
        assert np.abs(L).max() > 1e-2
        assert np.abs((plus - minus) / (2 * h) - L).max() < 1e-6


def test_killing_residual(sphere2, flat2):
    xs = sphere2.sample(50, 4)
    assert G.killing_residual(sphere2.vectors["rotation"], sphere2.metric, xs) < 1e-10
    assert G.killing_residual(sphere2.vectors["rotation2"], sphere2.metric, xs) < 1e-10
    ys = flat2.sample(10, 4)
    assert G.killing_residual(flat2.vectors["dilation"], flat2.metric, ys) == pytest.approx(
        2 * np.linalg.norm(np.eye(2)))
    proj = C.make_case("sl3_projective_field", n=2)
    assert G.killing_residual(proj.vectors["projective"], proj.metric, proj.sample(20, 4)) > 1e-2


def test_laplacian_eigenvalues(sphere2, sphere3):
    for case, n in ((sphere2, 2), (sphere3, 3)):
        for p in case.sample(10, 6):
            a1 = case.scalars["harmonic_deg1"]
            a2 = case.scalars["harmonic_deg2"]
            assert G.laplacian(a1, case.metric, p) == pytest.approx(-n * a1.value(p), abs=1e-12)
            assert G.laplacian(a2, case.metric, p) == pytest.approx(-2 * (n + 1) * a2.value(p), abs=1e-12)


def test_scaled_metric(sphere2):
    g4 = sphere2.metric.scaled(4.0)
    p = [0.3, 0.2]
    np.testing.assert_allclose(g4.value(p), 4 * sphere2.metric.value(p))
    assert sphere2.metric.scaled(-1.0).signature == (0, 2)
    with pytest.raises(ArgumentError):
        sphere2.metric.scaled(0.0)


def test_derived_field_order_zero_value(sphere2):
    H = G.hessian_plus(sphere2.scalars["harmonic_deg2"], sphere2.metric)
    assert H.value([0.2, 0.1]).shape == (2, 2)
    assert H.jet([0.2, 0.1], 1).order == 1
