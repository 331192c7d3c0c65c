import numpy as np
import pytest

from gtcone import cone
from gtcone import corpus as C
from gtcone.errors import ArgumentError, CapabilityError
from gtcone.geometry import ScalarField, TensorField, signature_of


def ambient_tensor(c, Q, name="Q"):
    return TensorField(c.chart, 2, expr=C.ambient_form_on_cone(np.asarray(Q, float)), symmetric=True, name=name)


def ambient_projector(c, P):
    return TensorField(c.chart, 2, expr=C.ambient_projector_on_cone(np.asarray(P, float)), name="P")


# --------------------------------------------------------------------------
# construction

def test_cone_over_sphere(sphere_cone):
    assert sphere_cone.dim == 3
    y = sphere_cone.point(1.5, [0.2, -0.3])
    G = sphere_cone.metric.value(y)
    assert G[0, 0] == 1.0 and np.all(G[0, 1:] == 0.0)
    assert sphere_cone.metric.signature == (3, 0)


def test_cone_over_pseudo_sphere_signature():
    case = C.make_case("pseudo_sphere", p=1, q=1)
    c = cone.build_cone(case.chart, case.metric)
    assert c.metric.signature == (2, 1)
    y = c.sample(1, 3)[0]
    assert signature_of(c.metric.value(y)) == (2, 1)


def test_cone_over_torus_r_squared_factor():
    case = C.make_case("flat_torus")
    c = cone.build_cone(case.chart, case.metric)
    assert c.metric.value(c.point(2.0, [0.3, 0.6]))[1, 1] == pytest.approx(4.0)


@pytest.mark.parametrize("r_range", [(0.0, 1.0), (2.0, 1.0), (-1.0, 1.0), (1.0, 1.0)])
def test_bad_r_range(sphere2, r_range):
    with pytest.raises(ArgumentError):
        cone.build_cone(sphere2.chart, sphere2.metric, r_range)


def test_cone_samples_stay_in_annulus(sphere_cone):
    ys = sphere_cone.sample(50, 2)
    assert np.all((ys[:, 0] >= 0.5) & (ys[:, 0] <= 2.0))


# --------------------------------------------------------------------------
# connection, Hessian of the lift

@pytest.mark.parametrize("case", C.all_metric_cases(), ids=lambda c: f"{c.id}-{'-'.join(map(str, c.params.values()))}")
def test_cone_connection_two_paths(case):
    c = cone.build_cone(case.chart, case.metric)
    tol = 1e-12 if case.id == "flat" else 1e-10
    assert cone.verify_cone_connection(c, c.sample(100, 1), tol).passed


@pytest.mark.parametrize("k", [1.0, -2.5, 0.3])
def test_hessian_of_constant_lift(sphere_cone, sphere2, k):
    alpha = ScalarField(sphere2.chart, expr=lambda x, k=k: k, name="k")
    L = cone.lift_function(alpha, sphere_cone)
    for y in sphere_cone.sample(5, 4):
        out = cone.hessian_of_lift(L, sphere_cone, y)
        np.testing.assert_allclose(out.hessian, 2 * k * sphere_cone.metric.value(y), atol=1e-13)


@pytest.mark.parametrize("case_id,field", [("round_sphere", "harmonic_deg2"), ("flat", "x0"),
                                           ("bumpy_sphere", "harmonic_deg2")])
def test_lift_hessian_identities(case_id, field):
    case = C.make_case(case_id)
    c = cone.build_cone(case.chart, case.metric)
    L = cone.lift_function(case.scalars[field], c)
    for y in c.sample(100, 5):
        out = cone.hessian_of_lift(L, c, y)
        assert max(out.residual_deriv, out.residual_alpha, out.residual_hess) < 1e-10


def test_parallel_hessian_band(sphere_cone, sphere2):
    ys = sphere_cone.sample(100, 6)
    good = cone.parallel_hessian_residual(cone.lift_function(sphere2.scalars["harmonic_deg2"], sphere_cone),
                                          sphere_cone, ys)
    bad = cone.parallel_hessian_residual(cone.lift_function(sphere2.scalars["harmonic_deg1"], sphere_cone),
                                         sphere_cone, ys)
    const = cone.parallel_hessian_residual(cone.lift_function(sphere2.scalars["const"], sphere_cone),
                                           sphere_cone, ys)
    assert good.passed and good.max_residual < 1e-9
    assert bad.verdict == "fail" and bad.max_residual > 1e-2
    assert const.max_residual < 1e-13  # cancellation of Christoffel terms leaves rounding only


def test_lift_requires_closed_form(sphere_cone, sphere2):
    derived = ScalarField(sphere2.chart, jet_fn=lambda p, o: sphere2.scalars["const"].jet(p, o))
    with pytest.raises(ArgumentError):
        cone.lift_function(derived, sphere_cone)


def test_half_hessian_equals_ambient_form(sphere_cone, sphere2):
    Q = sphere2.extras["quadratic_form"]
    half = cone.half_hessian_field(cone.lift_function(sphere2.scalars["harmonic_deg2"], sphere_cone),
                                   sphere_cone)
    T = ambient_tensor(sphere_cone, Q)
    for y in sphere_cone.sample(10, 7):
        assert np.abs(half.value(y) - T.value(y)).max() < 1e-12


# --------------------------------------------------------------------------
# parallel tensor -> solution

def test_extract_cartesian_tensor(sphere_cone, sphere2):
    T_hat = ambient_tensor(sphere_cone, np.diag([1.0, 0.0, 0.0]))
    xs = sphere2.sample(20, 8)
    alphas, reps = cone.extract_from_parallel(T_hat, sphere_cone, xs)
    assert reps["parallel"].max_residual < 1e-10
    assert reps["r_spread"].max_residual < 1e-10
    for key in ("identity1", "identity2", "identity3", "equation1"):
        assert reps[key].max_residual < 1e-9, key
    expected = [float(C.stereo_to_sphere(list(x))[0]) ** 2 for x in xs]
    np.testing.assert_allclose(alphas, expected, atol=1e-13)
    assert np.ptp(alphas) > 0.1
    assert reps["constancy"].extra["alpha_constant"] is False


@pytest.mark.parametrize("scale", [1.0, 0.3])
def test_extract_multiple_of_metric(sphere_cone, sphere2, scale):
    T_hat = TensorField(sphere_cone.chart, 2, expr=lambda y: sphere_cone.metric.expr(y) * scale,
                        symmetric=True, name="k g")
    alphas, reps = cone.extract_from_parallel(T_hat, sphere_cone, sphere2.sample(10, 9))
    np.testing.assert_allclose(alphas, scale, atol=1e-14)
    assert all(rep.max_residual < 1e-12 for rep in reps.values())
    assert reps["constancy"].extra == {"alpha_constant": True, "proportional_to_metric": True,
                                       "alpha_spread": reps["constancy"].extra["alpha_spread"]}


def test_extract_non_parallel_precondition(sphere_cone, sphere2):
    T_hat = TensorField(sphere_cone.chart, 2, expr=lambda y: [[y[0] * y[0], 0.0, 0.0], [0.0, 1.0, 0.0],
                                                              [0.0, 0.0, 1.0]], symmetric=True)
    alphas, reps = cone.extract_from_parallel(T_hat, sphere_cone, sphere2.sample(5, 1))
    assert alphas is None and reps["parallel"].verdict == "fail"
    assert set(reps) == {"parallel"}


def test_extract_derived_tensor_needs_closed_form(sphere_cone, sphere2):
    half = cone.half_hessian_field(cone.lift_function(sphere2.scalars["harmonic_deg2"], sphere_cone),
                                   sphere_cone)
    with pytest.raises(CapabilityError):
        cone.extract_from_parallel(half, sphere_cone, sphere2.sample(3, 1))


def test_slice_outside_r_range(sphere2):
    c = cone.build_cone(sphere2.chart, sphere2.metric, (1.5, 3.0))
    with pytest.raises(ArgumentError):
        cone.extracted_alpha(c.metric, c)


# --------------------------------------------------------------------------
# curvature

def test_cone_curvature(sphere_cone):
    ys = sphere_cone.sample(50, 3)
    assert cone.cone_flatness(sphere_cone, ys).max_residual < 1e-9
    assert cone.cone_curvature_check(sphere_cone, ys).max_residual < 1e-9


def test_bumpy_cone_not_flat_but_identity_holds():
    case = C.make_case("bumpy_sphere", n=2)
    c = cone.build_cone(case.chart, case.metric)
    ys = c.sample(50, 3)
    rep = cone.cone_curvature_check(c, ys)
    assert rep.max_residual < 1e-9
    assert rep.extra["max_cone_curvature"] > 1e-3
    assert cone.cone_flatness(c, ys).verdict == "fail"


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1)])
def test_pseudo_sphere_cone_flat(p, q):
    case = C.make_case("pseudo_sphere", p=p, q=q)
    c = cone.build_cone(case.chart, case.metric)
    assert cone.cone_flatness(c, c.sample(50, 3)).max_residual < 1e-8


# --------------------------------------------------------------------------
# splitting

@pytest.mark.parametrize("rank", [1, 2])
def test_splitting_tensors(sphere_cone, sphere2, rank):
    P = np.diag([1.0] * rank + [0.0] * (3 - rank))
    res = cone.splitting_tensors(sphere_cone, ambient_projector(sphere_cone, P), sphere_cone.sample(30, 4),
                                 critical_count=800, seed=4)
    assert all(rep.passed for rep in res.reports.values()), {k: r.line() for k, r in res.reports.items()}
    extra = res.reports["critical_values"].extra
    assert extra["min_alpha1"] == pytest.approx(0.0, abs=1e-6)
    assert extra["max_alpha1"] == pytest.approx(1.0, abs=1e-6)
    for x in sphere2.sample(10, 5):
        u = C.stereo_to_sphere(list(x))
        assert res.alpha1.value(x) == pytest.approx(sum(float(u[i]) ** 2 for i in range(rank)), abs=1e-13)
        assert res.alpha1.value(x) + res.alpha2.value(x) == pytest.approx(1.0, abs=1e-14)


def test_splitting_whole_space(sphere_cone, sphere2):
    res = cone.splitting_tensors(sphere_cone, ambient_projector(sphere_cone, np.eye(3)),
                                 sphere_cone.sample(10, 4), critical_count=50, seed=1)
    for y in sphere_cone.sample(5, 2):
        np.testing.assert_allclose(res.T1.value(y), sphere_cone.metric.value(y), atol=1e-14)
    for x in sphere2.sample(5, 1):
        assert res.alpha1.value(x) == pytest.approx(1.0, abs=1e-14)


def test_splitting_rejects_non_projector(sphere_cone):
    bad = ambient_projector(sphere_cone, np.diag([2.0, 0.0, 0.0]))
    with pytest.raises(ArgumentError):
        cone.splitting_tensors(sphere_cone, bad, sphere_cone.sample(3, 1), critical_count=10)


def test_splitting_rejects_oblique_projector(sphere_cone):
    P = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    with pytest.raises(ArgumentError):
        cone.splitting_tensors(sphere_cone, ambient_projector(sphere_cone, P), sphere_cone.sample(3, 1),
                               critical_count=10)


def test_critical_points_of_degree_one_harmonic(sphere2):
    # critical points of u0 on the sphere: the poles, values -1 and +1
    pts, values = cone.critical_points(sphere2.scalars["harmonic_deg1"], sphere2.metric, 400, seed=3)
    assert len(values) > 0
    assert all(min(abs(v - 1), abs(v + 1)) < 1e-6 for v in values)
