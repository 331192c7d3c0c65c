import numpy as np
import pytest

from gtcone import cone
from gtcone import corpus as C
from gtcone import transport as T
from gtcone.errors import ArgumentError, DomainError
from gtcone.geometry import TensorField


def ambient_tensor(c, Q):
    return TensorField(c.chart, 2, expr=C.ambient_form_on_cone(np.asarray(Q, float)), symmetric=True, name="Q")


# --------------------------------------------------------------------------
# curves and geodesics

def test_polygon_and_validation(flat2):
    loop = T.polygon(flat2.chart, [[0, 0], [1, 0], [0, 1]])
    assert len(loop.pieces) == 3
    np.testing.assert_allclose(loop.start, loop.end)
    np.testing.assert_allclose(loop.velocity(0.1), [3.0, 0.0])
    loop.validate()
    with pytest.raises(DomainError):
        T.polygon(flat2.chart, [[0, 0], [5, 0]], closed=False).validate()


def test_discontinuous_curve_rejected(flat2):
    a = T.polygon(flat2.chart, [[0, 0], [1, 0]], closed=False).pieces[0]
    b = T.polygon(flat2.chart, [[0, 1], [1, 1]], closed=False).pieces[0]
    with pytest.raises(ArgumentError):
        T.CurveSegment(flat2.chart, [a, b]).validate()


def test_flat_geodesic_is_straight(flat2):
    curve = T.geodesic_integrate(flat2.metric, [-1.0, 0.5], [0.6, -0.2], 2.0, 64)
    np.testing.assert_allclose(curve.end, [-1.0 + 1.2, 0.5 - 0.4], atol=1e-13)
    assert not curve.truncated
    for s in np.linspace(0, 1, 7):
        np.testing.assert_allclose(curve.position(s), [-1.0 + 1.2 * s, 0.5 - 0.4 * s], atol=1e-13)


def test_equator_closes(sphere2):
    curve = T.geodesic_integrate(sphere2.metric, [1.0, 0.0], [0.0, 1.0], 2 * np.pi, 1024)
    assert np.abs(curve.end - [1.0, 0.0]).max() < 1e-7
    assert T.energy_drift(sphere2.metric, curve) < 1e-9
    # midway the geodesic is the antipodal equator point
    np.testing.assert_allclose(curve.nodes["x"][512], [-1.0, 0.0], atol=1e-7)


def test_null_geodesic_stays_null():
    case = C.make_case("pseudo_sphere", p=1, q=1)
    p0 = case.sample(1, 3)[0]
    g0 = case.metric.value(p0)
    # a null vector of the 2x2 form: solve g(v, v) = 0 with v = (1, t)
    a, b, c = g0[1, 1], 2 * g0[0, 1], g0[0, 0]
    t = (-b + np.sqrt(b * b - 4 * a * c)) / (2 * a)
    v0 = 0.3 * np.array([1.0, t])
    curve = T.geodesic_integrate(case.metric, p0, v0, 1.0, 512)
    energies = [v @ case.metric.value(x) @ v for x, v in zip(curve.nodes["x"], curve.nodes["v"])]
    assert max(abs(e) for e in energies) < 1e-9


def test_geodesic_truncates_on_exit(flat2):
    curve = T.geodesic_integrate(flat2.metric, [0.0, 0.0], [1.0, 0.0], 10.0, 100)
    assert curve.truncated and 0.15 < curve.exit_parameter < 0.25
    assert flat2.chart.contains(curve.end)


def test_integrator_argument_checks(flat2):
    with pytest.raises(ArgumentError):
        T.geodesic_integrate(flat2.metric, [0.0, 0.0], [1.0, 0.0], 1.0, 8)
    with pytest.raises(DomainError):
        T.geodesic_integrate(flat2.metric, [9.0, 0.0], [1.0, 0.0], 1.0)


# --------------------------------------------------------------------------
# parallel transport

def test_flat_transport_is_identity(flat2):
    for loop in T.triangle_loops(flat2.chart, 3, seed=2):
        np.testing.assert_allclose(T.transport_matrix(flat2.metric, loop, 64), np.eye(2), atol=1e-15)


def test_transport_preserves_cone_metric(sphere_cone):
    ys = sphere_cone.sample(2, 5)
    path = T.polygon(sphere_cone.chart, ys, closed=False)
    out = T.parallel_transport(sphere_cone.metric, path, sphere_cone.metric.value(ys[0]), 512, covariant=True)
    np.testing.assert_allclose(out, sphere_cone.metric.value(ys[1]), atol=1e-9)


def test_transport_of_cartesian_tensor_matches_coordinate_change(sphere_cone):
    Q = np.diag([1.0, 0.0, 0.0])
    T_hat = ambient_tensor(sphere_cone, Q)
    ys = sphere_cone.sample(3, 11)
    geo = T.geodesic_integrate(sphere_cone.metric, ys[0], 0.3 * (ys[1] - ys[0]), 1.0, 256)
    path = T.CurveSegment(sphere_cone.chart, geo.pieces + T.polygon(sphere_cone.chart, [geo.end, ys[2]],
                                                                   closed=False).pieces)
    path.validate()
    out = T.parallel_transport(sphere_cone.metric, path, T_hat.value(ys[0]), 1024, covariant=True)
    assert np.abs(out - T_hat.value(ys[2])).max() < 1e-7


def test_transport_step_check(flat2):
    with pytest.raises(ArgumentError):
        T.parallel_transport(flat2.metric, T.polygon(flat2.chart, [[0, 0], [1, 1]]), np.eye(2), 4)


# --------------------------------------------------------------------------
# holonomy

def test_flat_holonomy_identity(flat2):
    for loop in T.triangle_loops(flat2.chart, 4, seed=3):
        assert np.abs(T.holonomy_loop(flat2.metric, loop, 128).matrix - np.eye(2)).max() < 1e-10


def test_octant_holonomy_quarter_turn(sphere2):
    loop = C.octant_loop(2)
    g0 = sphere2.metric.value(loop.start)
    hs = T.holonomy_loop(sphere2.metric, loop, 1024)
    assert abs(T.rotation_angle(hs.matrix, g0)) == pytest.approx(np.pi / 2, abs=1e-4)
    assert hs.isometry_defect(g0) < 1e-9
    assert hs.est_error < 1e-8


def test_octant_step_halving_rate(sphere2):
    loop = C.octant_loop(2)
    g0 = sphere2.metric.value(loop.start)
    errs = [abs(abs(T.rotation_angle(T.transport_matrix(sphere2.metric, loop, k), g0)) - np.pi / 2)
            for k in (24, 48, 96)]
    for a, b in zip(errs, errs[1:]):
        assert 12 < a / b < 20


def test_cone_holonomy_identity(sphere_cone):
    for loop in T.triangle_loops(sphere_cone.chart, 3, seed=4, scale=0.2):
        hs = T.holonomy_loop(sphere_cone.metric, loop, 256)
        assert np.abs(hs.matrix - np.eye(3)).max() < 1e-6


def test_holonomy_requires_closed_loop(flat2):
    with pytest.raises(ArgumentError):
        T.holonomy_loop(flat2.metric, T.polygon(flat2.chart, [[0, 0], [1, 0]], closed=False))


@pytest.mark.parametrize("theta", [0.3, -1.2, 2.5])
def test_rotation_angle_of_plane_rotation(theta):
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    assert T.rotation_angle(R, np.eye(2)) == pytest.approx(theta)
    assert T.rotation_angle(C.block_rotation(theta, 0.0), np.eye(4)) == pytest.approx(abs(theta))


# --------------------------------------------------------------------------
# eigenstructure and decomposability

def test_eigen_structure_of_metric(sphere_cone):
    y = sphere_cone.sample(1, 1)[0]
    G = sphere_cone.metric.value(y)
    es = T.eigen_structure(G, G)
    assert es.values == [pytest.approx(1.0)] and es.ranks == (3,)
    np.testing.assert_allclose(es.clusters[0].projector, np.eye(3), atol=1e-12)


def test_eigen_structure_cartesian_tensor(sphere_cone):
    T_hat = ambient_tensor(sphere_cone, np.diag([1.0, 0.0, 0.0]))
    for y in sphere_cone.sample(5, 2):
        es = T.eigen_structure(sphere_cone.metric.value(y), T_hat.value(y))
        assert es.values == [pytest.approx(0.0, abs=1e-12), pytest.approx(1.0)]
        assert es.ranks == (2, 1) and es.diagonalizable
        assert all(cl.nondegenerate for cl in es.clusters)
        P0, P1 = es.clusters[0].projector, es.clusters[1].projector
        np.testing.assert_allclose(P0 + P1, np.eye(3), atol=1e-10)
        np.testing.assert_allclose(P1 @ P1, P1, atol=1e-10)


def test_eigen_structure_jordan_block():
    eta = np.diag([-1.0, 1.0])
    ell = np.array([1.0, 1.0])  # null for eta
    es = T.eigen_structure(eta, np.outer(ell, ell))
    assert es.ranks == (2,) and not es.diagonalizable
    assert es.clusters[0].jordan_blocks == (2,)


def test_eigen_structure_complex_pair():
    eta = np.diag([1.0, -1.0])
    Tm = np.array([[0.0, 1.0], [1.0, 0.0]])  # g^{-1} T is a rotation generator
    es = T.eigen_structure(eta, Tm)
    assert len(es.clusters) == 1 and es.clusters[0].multiplicity == 2
    assert not es.clusters[0].real


def test_decomposability_cartesian(sphere_cone, sphere2):
    T_hat = ambient_tensor(sphere_cone, np.diag([1.0, 0.0, 0.0]))
    out = T.decomposability_probe(sphere_cone, T_hat, sphere_cone.sample(6, 1), loops=3, seed=1)
    assert out["verdict"] == "decomposable"
    assert out["splitting_ranks"] == [1, 2]


def test_decomposability_metric_is_trivial(sphere_cone):
    out = T.decomposability_probe(sphere_cone, sphere_cone.metric, sphere_cone.sample(4, 1), loops=2)
    assert out["verdict"] == "trivial tensor, no splitting"


def test_decomposability_precondition(sphere_cone):
    bad = TensorField(sphere_cone.chart, 2, expr=lambda y: [[y[0], 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    out = T.decomposability_probe(sphere_cone, bad, sphere_cone.sample(3, 1), loops=1)
    assert out["verdict"] == "precondition failed"


def test_decomposability_half_hessian(sphere_cone, sphere2):
    # eigenvalues of T = 1/2 DDA are the critical values of alpha, i.e. those of Q
    Q = sphere2.extras["quadratic_form"]
    half = cone.half_hessian_field(cone.lift_function(sphere2.scalars["harmonic_deg2"], sphere_cone),
                                   sphere_cone)
    out = T.decomposability_probe(sphere_cone, half, sphere_cone.sample(5, 3), loops=2, seed=2)
    assert out["verdict"] == "decomposable"
    distinct = np.unique(np.round(np.linalg.eigvalsh(Q), 9))
    np.testing.assert_allclose(out["eigen_constancy"].extra["eigenvalues"], distinct, atol=1e-9)
    assert out["splitting_ranks"] == [1, 2]


# --------------------------------------------------------------------------
# matrix sets

def test_block_rotations_split():
    case = C.make_case("finite_group", kind="o2xo2")
    res = T.invariant_splitting_search(case.matrices["generators"], case.matrices["form"])
    assert res.found and res.ranks == (2, 2)
    V, W = res.splitting
    assert np.abs(V.T @ W).max() < 1e-10


def test_binary_icosahedral_irreducible():
    case = C.make_case("finite_group", kind="binary_icosahedral")
    gens = case.matrices["generators"]
    assert len(C.generated_group(gens)) == 120
    res = T.invariant_splitting_search(gens, case.matrices["form"])
    assert not res.found and res.certified_irreducible and res.method == "certified"
    # commutant is the quaternions acting from the other side; invariant forms are multiples of I
    assert res.commutant_dimension == 4 and res.invariant_form_dimension == 1


def test_sl2_left_action():
    case = C.make_case("m2r_determinant_space", count=30, seed=3)
    G, mats = case.matrices["form"], case.matrices["generators"]
    assert T.form_preservation_defect(mats, G) < 1e-12
    res = T.invariant_splitting_search(mats, G)
    assert not res.found
    for v in np.random.default_rng(5).standard_normal((4, 2)):
        V = C.kernel_subspace(v)
        assert V.shape == (4, 2)
        assert T.is_invariant_subspace(mats, V) < 1e-12
        assert np.abs(V.T @ G @ V).max() < 1e-12


def test_search_rejects_non_isometries():
    with pytest.raises(ArgumentError):
        T.invariant_splitting_search([np.diag([2.0, 1.0])], np.eye(2))
    with pytest.raises(ArgumentError):
        T.invariant_splitting_search([np.eye(2)], np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ArgumentError):
        T.invariant_splitting_search([], np.eye(2))


def test_commutant_and_invariant_forms():
    mats = [C.block_rotation(0.7, 1.9)]
    assert T.commutant_dimension(mats) == 4
    assert len(T.invariant_symmetric_forms(mats)) == 2
