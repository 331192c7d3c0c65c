"""Closed-form model geometries: spheres, pseudo-spheres, flat spaces, the
bumpy sphere, Beltrami pairs, projective fields and the matrix examples.

Every case is rebuilt from its parameters, so constructing a case twice gives
identical charts, fields and (seeded) samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as J
from .errors import ArgumentError
from .geometry import Chart, MetricField, ScalarField, VectorFieldOnChart
from .transport import CurveSegment, FunctionPiece

STEREO_RADIUS = 10.0


@dataclass
class CorpusCase:
    id: str
    params: dict
    chart: Chart | None = None
    metric: MetricField | None = None
    scalars: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    tensors: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    note: str = ""

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        return self.chart.sample(count, seed)


# --------------------------------------------------------------------------
# stereographic helpers (projection from the north pole e_{n+1})

def stereo_to_sphere(x):
    """Unit vector ``u`` in R^{n+1} for stereographic coordinates ``x``."""
    s = 1 + sum(xi * xi for xi in x)
    return [2 * xi / s for xi in x] + [(s - 2) / s]


def stereo_jacobian(x):
    """``jac[m][i] = d u_m / d x_i`` in closed form."""
    n = len(x)
    s = 1 + sum(xi * xi for xi in x)
    jac = []
    for m in range(n):
        jac.append([(2.0 / s if m == i else 0.0) - 4 * x[m] * x[i] / s**2 for i in range(n)])
    jac.append([4 * x[i] / s**2 for i in range(n)])
    return jac


def sphere_to_stereo_vector(u, w):
    """Push an ambient tangent vector ``w`` at ``u`` to stereographic components."""
    n = len(u) - 1
    denom = 1 - u[n]
    return [w[i] / denom + u[i] * w[n] / denom**2 for i in range(n)]


def sphere_to_stereo(u):
    """Stereographic coordinates of a unit vector (jet-aware)."""
    n = len(u) - 1
    return [u[i] / (1 - u[n]) for i in range(n)]


def great_circle_arc(a, b) -> FunctionPiece:
    """Arc from unit vector ``a`` towards ``b`` (same plane), in stereographic
    coordinates; the arc ends at ``b``."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    angle = float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
    w = b - (a @ b) * a
    w = w / np.linalg.norm(w)

    def fn(t):
        c, s = J.cos(angle * t), J.sin(angle * t)
        return sphere_to_stereo([a[m] * c + w[m] * s for m in range(len(a))])

    return FunctionPiece(fn)


def octant_loop(n: int = 2) -> CurveSegment:
    """Boundary of the octant ``u_0, u_1 >= 0, u_n <= 0``: three quarter
    great circles enclosing area pi/2 (the octant avoids the chart's missing
    point ``u_n = 1``)."""
    chart = sphere_chart(n)
    e = np.eye(n + 1)
    verts = [e[0], e[1], -e[n]]
    pieces = [great_circle_arc(a, b) for a, b in zip(verts, verts[1:] + verts[:1])]
    return CurveSegment(chart, pieces, "octant")


def sphere_chart(n: int) -> Chart:
    def domain(p):
        return float(np.dot(p, p)) < STEREO_RADIUS**2

    def sampler(rng, count):
        u = rng.standard_normal((count, n + 1))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return u[:, :n] / (1 - u[:, n:])

    return Chart(f"stereo S^{n}", n, domain, sampler,
                 note="stereographic from the north pole; |x| < 10 keeps clear of it")


def round_sphere_metric(chart: Chart) -> MetricField:
    n = chart.dim

    def expr(x):
        f = 4 * (1 + sum(xi * xi for xi in x)) ** -2
        return [[f if i == j else 0.0 for j in range(n)] for i in range(n)]

    return MetricField(chart, (n, 0), expr=expr, name="round")


def _quad(u, Q):
    return sum(Q[a, b] * u[a] * u[b] for a in range(len(u)) for b in range(len(u)) if Q[a, b] != 0)


def traceless_default(n: int) -> np.ndarray:
    """``e_1 e_1^T - I/(n+1)`` with the last diagonal entry fixed so the trace is exactly 0."""
    Q = np.zeros((n + 1, n + 1))
    Q[0, 0] = 1.0
    for i in range(n + 1):
        Q[i, i] -= 1.0 / (n + 1)
    Q[n, n] = -sum(Q[i, i] for i in range(n))
    return Q


def linear_harmonic(chart, direction) -> ScalarField:
    a = np.asarray(direction, float)

    def expr(x):
        u = stereo_to_sphere(x)
        return sum(a[m] * u[m] for m in range(len(u)) if a[m] != 0)

    return ScalarField(chart, expr=expr, name="harmonic_deg1")


def quadratic_harmonic(chart, Q) -> ScalarField:
    Q = np.asarray(Q, float)
    return ScalarField(chart, expr=lambda x: _quad(stereo_to_sphere(x), Q), name="harmonic_deg2")


def constant_scalar(chart, k=1.0) -> ScalarField:
    return ScalarField(chart, expr=lambda x: k + 0 * x[0], name="const")


def ambient_vector_field(chart, a, name) -> VectorFieldOnChart:
    """Field generated on S^n by the linear flow ``u -> exp(t a) u / |exp(t a) u|``."""
    a = np.asarray(a, float)
    n1 = a.shape[0]

    def expr(x):
        u = stereo_to_sphere(x)
        au = [sum(a[m, k] * u[k] for k in range(n1) if a[m, k] != 0) for m in range(n1)]
        uau = sum(u[m] * au[m] for m in range(n1))
        w = [au[m] - uau * u[m] for m in range(n1)]
        return sphere_to_stereo_vector(u, w)

    return VectorFieldOnChart(chart, expr=expr, name=name)


def rotation_generator(n1, i, j) -> np.ndarray:
    a = np.zeros((n1, n1))
    a[i, j], a[j, i] = -1.0, 1.0
    return a


def projective_pullback_metric(chart, A, name="g_bar") -> MetricField:
    """Round metric pulled back by ``u -> A u / |A u|`` (maps great circles to
    great circles, so the result is geodesically equivalent to the round one)."""
    A = np.asarray(A, float)
    n = chart.dim
    if abs(np.linalg.det(A)) < 1e-12:
        raise ArgumentError("projective element must be invertible")

    def expr(x):
        u = stereo_to_sphere(x)
        jac = stereo_jacobian(x)
        v = [sum(A[m, k] * u[k] for k in range(n + 1)) for m in range(n + 1)]
        w = [[sum(A[m, k] * jac[k][i] for k in range(n + 1)) for m in range(n + 1)]
             for i in range(n)]
        vv = sum(c * c for c in v)
        vw = [sum(v[m] * w[i][m] for m in range(n + 1)) for i in range(n)]
        return [[sum(w[i][m] * w[j][m] for m in range(n + 1)) / vv - vw[i] * vw[j] / vv**2
                 for j in range(n)] for i in range(n)]

    return MetricField(chart, (n, 0), expr=expr, name=name)


# --------------------------------------------------------------------------
# cone-side closed forms over S^n (cone chart coordinates (r, x))

def ambient_jacobian_on_cone(y):
    """Columns of ``d(r u(x)) / d(r, x)`` as nested lists ``jac[m][a]``."""
    r, x = y[0], y[1:]
    u = stereo_to_sphere(x)
    jx = stereo_jacobian(x)
    return [[u[m]] + [r * jx[m][i] for i in range(len(x))] for m in range(len(u))]


def ambient_form_on_cone(Q) -> Callable:
    """Expression of the constant ambient form ``Q`` pulled back to (r, x)."""
    Q = np.asarray(Q, float)

    def expr(y):
        jac = ambient_jacobian_on_cone(y)
        n1 = len(jac)
        dim = len(y)
        rows = [[sum(Q[m, k] * jac[k][b] for k in range(n1) if Q[m, k] != 0) for b in range(dim)]
                for m in range(n1)]
        return [[sum(jac[m][a] * rows[m][b] for m in range(n1)) for b in range(dim)]
                for a in range(dim)]

    return expr


def ambient_projector_on_cone(P) -> Callable:
    """Mixed components ``P^a_b`` of a constant ambient endomorphism ``P``."""
    P = np.asarray(P, float)

    def expr(y):
        jac = J.as_jet(ambient_jacobian_on_cone(y), y[0].dim, min(c.order for c in y))
        inv = J.jinv(jac)
        return J.jeinsum("am,mb->ab", inv, J.jeinsum("mk,kb->mb", P, jac))

    return expr


# --------------------------------------------------------------------------
# flat spaces and pseudo-spheres

def box_chart(name, n, lo, hi, sample_lo=None, sample_hi=None, note="") -> Chart:
    slo = lo if sample_lo is None else sample_lo
    shi = hi if sample_hi is None else sample_hi

    def domain(p):
        return bool(np.all(p > lo) and np.all(p < hi))

    def sampler(rng, count):
        return rng.uniform(slo, shi, size=(count, n))

    return Chart(name, n, domain, sampler, note=note)


def constant_metric(chart, eta, signature, name) -> MetricField:
    eta = np.asarray(eta, float)
    return MetricField(chart, signature, expr=lambda x: eta, name=name)


def pseudo_sphere_parts(p: int, q: int):
    """Chart, metric and embedding of ``S^{p,q} = {<x,x> = 1} in R^{p+1,q}``.

    The chart is the graph ``x_0 = sqrt(1 - |x|^2 + |y|^2)`` over the remaining
    coordinates ``(x_1..x_p, y_1..y_q)``."""
    n = p + q
    if p < 0 or q < 0 or n < 2:
        raise ArgumentError(f"invalid pseudo-sphere signature ({p}, {q})")
    eta = np.array([1.0] * p + [-1.0] * q)

    def height2(c):
        return 1 - sum(eta[a] * c[a] * c[a] for a in range(n))

    def domain(c):
        return bool(height2(c) > 0.25 and np.all(np.abs(c) < 1.5))

    def sampler(rng, count):
        return rng.uniform(-1.5, 1.5, size=(count, n))

    chart = Chart(f"graph S^{{{p},{q}}}", n, domain, sampler,
                  note="graph chart x0 > 0, x0^2 > 1/4 keeps the induced metric well conditioned")

    def expr(c):
        h2 = height2(c)
        v = [eta[a] * c[a] for a in range(n)]
        return [[(eta[a] if a == b else 0.0) + v[a] * v[b] / h2 for b in range(n)]
                for a in range(n)]

    def embedding(c):
        return [J.sqrt(height2(c))] + list(c)

    metric = MetricField(chart, (p, q), expr=expr, name=f"S^{{{p},{q}}}")
    ambient = np.diag([1.0] * (p + 1) + [-1.0] * q)
    return chart, metric, embedding, ambient


# --------------------------------------------------------------------------
# matrix examples

def m2r_form() -> np.ndarray:
    """Polarised determinant on M(2,R) = R^4, basis (a, b, c, d) of [[a, b], [c, d]]."""
    G = np.zeros((4, 4))
    G[0, 3] = G[3, 0] = 0.5
    G[1, 2] = G[2, 1] = -0.5
    return G


def left_multiplication(S) -> np.ndarray:
    """Matrix of ``M -> S M`` on row-major vec(M)."""
    return np.kron(np.asarray(S, float), np.eye(2))


def kernel_subspace(v) -> np.ndarray:
    """Basis (columns) of ``V_v = {M : M v = 0}`` in vec coordinates."""
    v = np.asarray(v, float)
    w = np.array([-v[1], v[0]])
    basis = []
    for row in range(2):
        M = np.zeros((2, 2))
        M[row] = w
        basis.append(M.reshape(-1))
    return np.array(basis).T


def random_sl2(rng, count) -> list[np.ndarray]:
    out = []
    while len(out) < count:
        S = rng.normal(size=(2, 2))
        d = np.linalg.det(S)
        if abs(d) < 0.1:
            continue
        if d < 0:
            S[:, 0] *= -1
            d = -d
        out.append(S / np.sqrt(d))
    return out


def _quat_left(q) -> np.ndarray:
    a, b, c, d = q
    return np.array([[a, -b, -c, -d],
                     [b, a, -d, c],
                     [c, d, a, -b],
                     [d, -c, b, a]])


def binary_icosahedral_generators() -> list[np.ndarray]:
    """Left multiplication by two unit quaternions generating the binary
    icosahedral group (order 120) inside SO(4)."""
    phi = (1 + np.sqrt(5)) / 2
    s = np.array([0.5, 0.5, 0.5, 0.5])
    t = np.array([phi, 1 / phi, 1.0, 0.0]) / 2
    return [_quat_left(s), _quat_left(t)]


def generated_group(generators, limit=10000, decimals=9) -> list[np.ndarray]:
    """Close a finite matrix set under multiplication (breadth-first)."""
    n = generators[0].shape[0]
    key = lambda M: tuple(np.round(M, decimals).ravel() + 0.0)
    seen = {key(np.eye(n)): np.eye(n)}
    frontier = [np.eye(n)]
    while frontier:
        nxt = []
        for M in frontier:
            for g in generators:
                P = g @ M
                k = key(P)
                if k not in seen:
                    seen[k] = P
                    nxt.append(P)
                    if len(seen) > limit:
                        raise ArgumentError("group generation exceeded the element limit")
        frontier = nxt
    return list(seen.values())


def block_rotation(theta, phi) -> np.ndarray:
    c1, s1, c2, s2 = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    M = np.zeros((4, 4))
    M[:2, :2] = [[c1, -s1], [s1, c1]]
    M[2:, 2:] = [[c2, -s2], [s2, c2]]
    return M


# --------------------------------------------------------------------------
# case builders

def _check_n(n):
    if int(n) != n or n < 2:
        raise ArgumentError(f"dimension must be an integer >= 2, got {n}")
    return int(n)


def _round_sphere(n=2):
    n = _check_n(n)
    chart = sphere_chart(n)
    g = round_sphere_metric(chart)
    Q = traceless_default(n)
    e0 = np.zeros(n + 1)
    e0[0] = 1.0
    case = CorpusCase("round_sphere", {"n": n}, chart, g)
    case.scalars.update({
        "harmonic_deg1": linear_harmonic(chart, e0),
        "harmonic_deg2": quadratic_harmonic(chart, Q),
        "const": constant_scalar(chart, 1.0),
    })
    case.vectors["rotation"] = ambient_vector_field(chart, rotation_generator(n + 1, 0, 1), "rotation")
    case.vectors["rotation2"] = ambient_vector_field(chart, rotation_generator(n + 1, 1, n), "rotation2")
    case.extras["quadratic_form"] = Q
    case.expected = {
        "laplacian_eigenvalue:harmonic_deg1": -n,
        "laplacian_eigenvalue:harmonic_deg2": -2 * (n + 1),
        "obata_residual:harmonic_deg1": "pass",
        "gt_residual:harmonic_deg2": "pass",
        "obata_residual:harmonic_deg2": "fail",
        "einstein_residual": "pass",
        "sectional_curvature": 1.0,
    }
    return case


def _harmonic_deg1(n=2, direction=None):
    case = _round_sphere(n)
    n = case.chart.dim
    a = np.eye(n + 1)[0] if direction is None else np.asarray(direction, float)
    if a.shape != (n + 1,):
        raise ArgumentError(f"direction must have {n + 1} components")
    case.id, case.params = "harmonic_deg1", {"n": n, "direction": a.tolist()}
    case.scalars["alpha"] = linear_harmonic(case.chart, a)
    return case


def _harmonic_deg2(n=2, quadratic_form=None):
    case = _round_sphere(n)
    n = case.chart.dim
    Q = traceless_default(n) if quadratic_form is None else np.asarray(quadratic_form, float)
    if Q.shape != (n + 1, n + 1) or np.abs(Q - Q.T).max() > 0:
        raise ArgumentError("quadratic form must be a symmetric (n+1)x(n+1) matrix")
    if np.trace(Q) != 0:
        raise ArgumentError("quadratic form must be traceless")
    case.id, case.params = "harmonic_deg2", {"n": n, "quadratic_form": Q.tolist()}
    case.scalars["alpha"] = quadratic_harmonic(case.chart, Q)
    case.extras["quadratic_form"] = Q
    return case


def _pseudo_sphere(p=1, q=1):
    chart, metric, embedding, ambient = pseudo_sphere_parts(int(p), int(q))
    case = CorpusCase("pseudo_sphere", {"p": int(p), "q": int(q)}, chart, metric)
    case.extras.update(embedding=embedding, ambient_form=ambient)
    case.scalars["const"] = constant_scalar(chart)
    case.scalars["ambient_linear"] = ScalarField(chart, expr=lambda c: embedding(c)[0], name="x0")
    case.expected = {"sectional_curvature": 1.0, "cone_signature": (int(p) + 1, int(q))}
    return case


def _flat(p=2, q=0):
    p, q = int(p), int(q)
    n = p + q
    if p < 0 or q < 0 or n < 1:
        raise ArgumentError(f"invalid flat signature ({p}, {q})")
    chart = box_chart(f"R^{{{p},{q}}}", n, -2.0, 2.0)
    eta = np.diag([1.0] * p + [-1.0] * q)
    g = constant_metric(chart, eta, (p, q), "flat")
    case = CorpusCase("flat", {"p": p, "q": q}, chart, g)
    case.scalars.update({
        "const": constant_scalar(chart, 1.0),
        "x0": ScalarField(chart, expr=lambda x: x[0], name="x0"),
        "x0_squared": ScalarField(chart, expr=lambda x: x[0] * x[0], name="x0^2"),
        "affine": ScalarField(chart, expr=lambda x: 0.5 + sum((k + 1) * 0.3 * xi for k, xi in enumerate(x)),
                              name="affine"),
    })
    if n == 2:
        case.vectors["rotation"] = VectorFieldOnChart(chart, expr=lambda x: [-x[1], x[0]], name="rotation")
        case.vectors["dilation"] = VectorFieldOnChart(chart, expr=lambda x: [x[0], x[1]], name="dilation")
    case.expected = {"gt_residual:const": "pass", "gt_residual:affine:c0": "pass"}
    return case


def _flat_torus():
    chart = box_chart("torus cover", 2, -0.5, 1.5, 0.0, 1.0,
                      note="covering chart of R^2/Z^2; periodic fields stand in for torus functions")
    g = constant_metric(chart, np.eye(2), (2, 0), "flat")
    case = CorpusCase("flat_torus", {}, chart, g)
    case.scalars.update({
        "sin2pi": ScalarField(chart, expr=lambda x: J.sin(2 * np.pi * x[0]), name="sin(2 pi x)"),
        "affine": ScalarField(chart, expr=lambda x: 0.3 * x[0] - 1.2 * x[1] + 0.5, name="affine"),
        "const": constant_scalar(chart, 1.0),
    })
    case.expected = {"c0_parallel:affine": "pass", "gt_residual:sin2pi:c0": "fail"}
    case.note = "affine functions are chart-level only; they do not descend to the torus"
    return case


def _bumpy_sphere(n=2, eps=0.1):
    n = _check_n(n)
    chart = sphere_chart(n)

    def expr(x):
        u = stereo_to_sphere(x)
        f = 4 * (1 + sum(xi * xi for xi in x)) ** -2 * J.exp(2 * eps * (u[0] * u[1] + 0.5 * u[0]))
        return [[f if i == j else 0.0 for j in range(n)] for i in range(n)]

    g = MetricField(chart, (n, 0), expr=expr, name=f"bumpy(eps={eps})")
    case = CorpusCase("bumpy_sphere", {"n": n, "eps": eps}, chart, g)
    case.scalars["harmonic_deg2"] = quadratic_harmonic(chart, traceless_default(n))
    case.scalars["const"] = constant_scalar(chart)
    case.expected = {"einstein_residual": "fail" if n >= 3 else "n/a", "cone_flat": "fail"}
    return case


def _beltrami_pair(n=2, element=None, second_element=None):
    case = _round_sphere(n)
    n = case.chart.dim
    A = np.diag([2.0] + [1.0] * n) if element is None else np.asarray(element, float)
    B = np.diag([1.0, 3.0] + [1.0] * (n - 1)) if second_element is None else np.asarray(second_element, float)
    case.id = "beltrami_pair"
    case.params = {"n": n, "element": A.tolist(), "second_element": B.tolist()}
    case.metrics["g_bar"] = projective_pullback_metric(case.chart, A, "g_bar")
    case.metrics["g_bar2"] = projective_pullback_metric(case.chart, B, "g_bar2")
    case.expected = {"basic1:beltrami": "pass", "mobility_rank": 3}
    return case


def _sl3_projective_field(n=2, element=None, second_element=None):
    case = _round_sphere(n)
    n = case.chart.dim
    if element is None:
        a = np.zeros((n + 1, n + 1))
        a[0, 0], a[n, n] = 1.0, -1.0
        a[0, 1] = a[1, 0] = 0.5
    else:
        a = np.asarray(element, float)
    if second_element is None:
        b = np.zeros((n + 1, n + 1))
        b[1, 1], b[0, 0] = 1.0, -1.0
        b[1, n] = b[n, 1] = 0.3
    else:
        b = np.asarray(second_element, float)
    for m in (a, b):
        if m.shape != (n + 1, n + 1):
            raise ArgumentError(f"sl({n + 1}) element must be {(n + 1)}x{(n + 1)}")
    case.id = "sl3_projective_field"
    case.params = {"n": n, "element": a.tolist(), "second_element": b.tolist()}
    case.vectors["projective"] = ambient_vector_field(case.chart, a, "projective")
    case.vectors["projective2"] = ambient_vector_field(case.chart, b, "projective2")
    case.expected = {"basic1:projective": "pass", "affine:projective": False}
    return case


def _m2r_determinant_space(count=100, seed=0):
    rng = np.random.default_rng(seed)
    case = CorpusCase("m2r_determinant_space", {"count": count, "seed": seed})
    G = m2r_form()
    case.matrices = {"form": G, "generators": [left_multiplication(S) for S in random_sl2(rng, count)]}
    case.extras.update(kernel_subspace=kernel_subspace, left_multiplication=left_multiplication)
    case.expected = {"signature": (2, 2), "splitting": None}
    return case


def _finite_group(kind="binary_icosahedral", theta=0.7, phi=1.9, count=8, seed=0):
    case = CorpusCase("finite_group", {"kind": kind})
    if kind == "binary_icosahedral":
        gens, form = binary_icosahedral_generators(), np.eye(4)
        case.expected = {"splitting": None, "order": 120}
    elif kind == "o2xo2":
        gens, form = [block_rotation(theta, phi)], np.eye(4)
        case.params.update(theta=theta, phi=phi)
        case.expected = {"splitting": (2, 2)}
    elif kind == "sl2_left":
        rng = np.random.default_rng(seed)
        gens, form = [left_multiplication(S) for S in random_sl2(rng, count)], m2r_form()
        case.params.update(count=count, seed=seed)
        case.expected = {"splitting": None}
    else:
        raise ArgumentError(f"unknown finite group kind {kind!r}")
    case.matrices = {"generators": gens, "form": form}
    return case


BUILDERS = {
    "round_sphere": _round_sphere,
    "harmonic_deg1": _harmonic_deg1,
    "harmonic_deg2": _harmonic_deg2,
    "pseudo_sphere": _pseudo_sphere,
    "flat": _flat,
    "flat_torus_chart": _flat_torus,
    "flat_torus": _flat_torus,
    "bumpy_sphere": _bumpy_sphere,
    "beltrami_pair": _beltrami_pair,
    "sl3_projective_field": _sl3_projective_field,
    "m2r_determinant_space": _m2r_determinant_space,
    "finite_group": _finite_group,
}

# positional parameter names for the ``id:p1,p2`` address syntax
POSITIONAL = {
    "round_sphere": ("n",),
    "harmonic_deg1": ("n",),
    "harmonic_deg2": ("n",),
    "pseudo_sphere": ("p", "q"),
    "flat": ("p", "q"),
    "flat_torus_chart": (),
    "flat_torus": (),
    "bumpy_sphere": ("n", "eps"),
    "beltrami_pair": ("n",),
    "sl3_projective_field": ("n",),
    "m2r_determinant_space": ("count", "seed"),
    "finite_group": ("kind",),
}


def make_case(id: str, params: dict | None = None, **kwargs) -> CorpusCase:
    """Build a corpus case by id; parameters as a mapping or keywords."""
    params = dict(params or {}, **kwargs)
    try:
        builder = BUILDERS[id]
    except KeyError:
        raise ArgumentError(f"unknown corpus case {id!r}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise ArgumentError(f"bad parameters for {id!r}: {exc}") from None


def case_ids() -> list[str]:
    return sorted(BUILDERS)


def all_metric_cases() -> list[CorpusCase]:
    """Every case that carries a chart and metric, with default parameters."""
    return [
        make_case("round_sphere", n=2), make_case("round_sphere", n=3),
        make_case("pseudo_sphere", p=1, q=1), make_case("pseudo_sphere", p=2, q=1),
        make_case("flat", p=2, q=0), make_case("flat", p=1, q=1),
        make_case("flat_torus"), make_case("bumpy_sphere", n=2), make_case("bumpy_sphere", n=3),
    ]
