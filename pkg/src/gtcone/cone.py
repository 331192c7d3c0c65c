"""Metric cones ``dr^2 + r^2 g`` over a chart and the identities linking
parallel symmetric tensors on the cone to solutions of the third-order
equation on the base.

Cone coordinates are ``(r, x^1, ..., x^n)``; index 0 is always ``r``.  Lifted
base vectors are the raw coordinate fields ``d_i`` unless a check says it uses
the normalised lift ``d_i / r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from . import reports
from .errors import ArgumentError, CapabilityError, DegeneracyError
from .geometry import (Chart, Field, MetricField, ScalarField, TensorField, christoffel_jet,
                       covariant_derivative_jet, riemann_jet, scalar_derivatives_from_jets)
from .equations import gallot_tanno_tensor
from .jets import MAX_ORDER, Jet, jeinsum, n_coeffs

PARALLEL_TOL = 1e-9
REJECT = 1e-3


@dataclass(frozen=True)
class ConeChart:
    base: Chart
    base_metric: MetricField
    r_range: tuple[float, float]
    chart: Chart
    metric: MetricField

    @property
    def dim(self) -> int:
        return self.chart.dim

    def point(self, r, x) -> np.ndarray:
        return np.concatenate([[float(r)], np.asarray(x, float)])

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        return self.chart.sample(count, seed)

    def lift(self, alpha: ScalarField) -> "LiftedFunction":
        return lift_function(alpha, self)


class LiftedFunction(NamedTuple):
    """``A(r, m) = r^2 alpha(m)`` on the cone."""

    alpha: ScalarField
    A: ScalarField


def build_cone(base: Chart, g: MetricField, r_range=(0.5, 2.0)) -> ConeChart:
    r0, r1 = (float(v) for v in r_range)
    if not (0 < r0 < r1 < np.inf):
        raise ArgumentError(f"r_range must be an interval inside (0, inf), got {r_range}")
    if g.expr is None:
        raise ArgumentError("the base metric must be closed-form to build its cone")
    n = base.dim

    def domain(y):
        return r0 <= y[0] <= r1 and base.contains(y[1:])

    def sampler(rng, count):
        xs = base.sample(count, int(rng.integers(2**31)))
        rs = rng.uniform(r0, r1, size=(count, 1))
        return np.hstack([rs, xs])

    chart = Chart(f"cone({base.name})", n + 1, domain, sampler,
                  note=f"r in [{r0}, {r1}]")

    def expr(y):
        r = y[0]
        gb = g.at(y[1:])
        block = r * r * gb
        coeffs = np.zeros((n + 1, n + 1, n_coeffs(block.dim, block.order)))
        coeffs[0, 0, 0] = 1.0
        coeffs[1:, 1:] = block.coeffs
        return Jet(coeffs, block.dim, block.order)

    p, q = g.signature
    metric = MetricField(chart, (p + 1, q), expr=expr, name=f"cone({g.name})")
    return ConeChart(base, g, (r0, r1), chart, metric)


def lift_function(alpha: ScalarField, c: ConeChart) -> LiftedFunction:
    if alpha.expr is None:
        raise ArgumentError("only closed-form scalars can be lifted")
    A = ScalarField(c.chart, expr=lambda y: y[0] * y[0] * alpha.at(y[1:]), name=f"r^2 {alpha.name}")
    return LiftedFunction(alpha, A)


# --------------------------------------------------------------------------
# connection

def closed_form_christoffel(c: ConeChart, y) -> np.ndarray:
    """Cone Christoffel symbols assembled from the base ones:
    ``Gamma^r_ij = -r g_ij``, ``Gamma^i_rj = Gamma^i_jr = delta^i_j / r``,
    ``Gamma^k_ij = base``, everything with two ``r`` slots zero."""
    r, x = y[0], y[1:]
    gj = c.base_metric.jet(x, 1)
    base = christoffel_jet(gj).coeffs[..., 0]
    n = len(x)
    out = np.zeros((n + 1,) * 3)
    out[1:, 1:, 1:] = base
    out[0, 1:, 1:] = -r * gj.coeffs[..., 0]
    out[1:, 0, 1:] = np.eye(n) / r
    out[1:, 1:, 0] = np.eye(n) / r
    return out


def verify_cone_connection(c: ConeChart, sample, tol: float = 1e-10, case_id: str = "",
                           seed=None) -> reports.ResidualReport:
    def residual(y):
        direct = christoffel_jet(c.metric.jet(y, 1)).coeffs[..., 0]
        return np.abs(direct - closed_form_christoffel(c, y)).max()

    return reports.evaluate("cone_connection", sample, residual, tol, case_id=case_id, seed=seed)


# --------------------------------------------------------------------------
# the lift A = r^2 alpha

class LiftHessian(NamedTuple):
    hessian: np.ndarray
    residual_deriv: float
    residual_alpha: float
    residual_hess: float


def hessian_of_lift(L: LiftedFunction, c: ConeChart, y) -> LiftHessian:
    """Cone Hessian of ``A`` and the three slot identities with the
    normalised lifts ``X/r``: ``H(d_r, Z/r) = Dalpha(Z)``, ``H(d_r, d_r) = 2alpha``,
    ``H(Y/r, Z/r) = DDalpha(Y, Z) + 2 g(Y, Z) alpha``."""
    y = np.asarray(y, float)
    r, x = y[0], y[1:]
    gamma = christoffel_jet(c.metric.jet(y))
    H = covariant_derivative_jet(L.A.jet(y).grad(), gamma).coeffs[..., 0]
    d = scalar_derivatives_from_jets(L.alpha.jet(x), c.base_metric.jet(x))
    res_deriv = float(np.abs(H[0, 1:] / r - d.d1).max())
    res_alpha = abs(H[0, 0] - 2 * d.alpha)
    res_hess = float(np.abs(H[1:, 1:] / r**2 - (d.d2 + 2 * d.alpha * d.g)).max())
    return LiftHessian(H, res_deriv, res_alpha, res_hess)


def third_derivative_of_lift(L: LiftedFunction, c: ConeChart, y) -> np.ndarray:
    gamma = christoffel_jet(c.metric.jet(y))
    d1 = L.A.jet(y).grad()
    d2 = covariant_derivative_jet(d1, gamma)
    return covariant_derivative_jet(d2, gamma).coeffs[..., 0]


def parallel_hessian_residual(L: LiftedFunction, c: ConeChart, sample, tol: float = PARALLEL_TOL,
                              reject: float = REJECT, case_id: str = "",
                              seed=None) -> reports.ResidualReport:
    """Max ``|DDD A|`` over the sample; pass/inconclusive/fail band."""
    return reports.evaluate("parallel_hessian", sample,
                            lambda y: np.abs(third_derivative_of_lift(L, c, y)).max(),
                            tol, reject=reject, case_id=case_id, seed=seed)


def half_hessian_field(L: LiftedFunction, c: ConeChart) -> TensorField:
    """``T = 1/2 DD A`` as a derived tensor field on the cone."""

    def jet_fn(y, order):
        k = min(order + 2, MAX_ORDER)
        gamma = christoffel_jet(c.metric.jet(y, k))
        return covariant_derivative_jet(L.A.jet(y, k).grad(), gamma) * 0.5

    return TensorField(c.chart, 2, jet_fn=jet_fn, symmetric=True, name=f"1/2 DD({L.A.name})")


# --------------------------------------------------------------------------
# parallel tensor -> solution

def parallel_defect(T_hat: Field, c: ConeChart, y) -> float:
    gamma = christoffel_jet(c.metric.jet(y))
    return float(np.abs(covariant_derivative_jet(T_hat.jet(y), gamma).coeffs[..., 0]).max())


def extracted_alpha(T_hat: Field, c: ConeChart) -> ScalarField:
    """``alpha(m) = T(d_r, d_r)`` at ``(1, m)``, as a field on the base."""
    if not c.r_range[0] <= 1.0 <= c.r_range[1]:
        raise ArgumentError("the slice r = 1 must lie inside the cone's r_range")

    def jet_fn(m, order):
        return T_hat.jet(c.point(1.0, m), order)[0, 0].restrict([0])

    return ScalarField(c.base, jet_fn=jet_fn, name=f"{T_hat.name}(d_r, d_r)")


def restricted_tensor(T_hat: Field, c: ConeChart) -> TensorField:
    """Restriction of ``T`` to the slice ``{1} x M``."""

    def jet_fn(m, order):
        return T_hat.jet(c.point(1.0, m), order)[1:, 1:].restrict([0])

    return TensorField(c.base, 2, jet_fn=jet_fn, symmetric=True, name=f"{T_hat.name}|M1")


def extract_from_parallel(T_hat: Field, c: ConeChart, sample, *, r_count: int = 5,
                          parallel_tol: float = 1e-10, tol: float = 1e-9,
                          case_id: str = "", seed=None):
    """Recover ``alpha = T(d_r, d_r)`` from a parallel symmetric tensor on the
    cone and verify every identity tying it to ``T``.

    ``sample`` holds base points.  Returns ``(alpha_values, reports)`` where
    ``reports`` maps check names to :class:`ResidualReport`; ``alpha_values`` is
    ``None`` when ``T`` fails the parallelity precondition.
    """
    sample = np.atleast_2d(np.asarray(sample, float))
    rs = np.linspace(c.r_range[0], c.r_range[1], r_count)
    out: dict[str, reports.ResidualReport] = {}
    cone_pts = [c.point(r, m) for m in sample for r in rs]
    out["parallel"] = reports.evaluate("parallel_tensor", cone_pts,
                                       lambda y: parallel_defect(T_hat, c, y), parallel_tol,
                                       case_id=case_id, seed=seed)
    if not out["parallel"].passed:
        return None, out

    alpha_field = extracted_alpha(T_hat, c)
    if alpha_field.jet(sample[0]).order < 3:
        raise CapabilityError("extraction needs third derivatives of T(d_r, d_r); "
                              "supply a closed-form tensor")
    T_slice = restricted_tensor(T_hat, c)
    alphas, spreads, id1, id2, id3, eq1 = [], [], [], [], [], []
    ghat_defect = []
    for m in sample:
        gj = c.base_metric.jet(m)
        d = scalar_derivatives_from_jets(alpha_field.jet(m), gj)
        alphas.append(d.alpha)
        vals = []
        for r in rs:
            y = c.point(r, m)
            T = T_hat.value(y)
            vals.append(T[0, 0])
            id1.append(np.abs(2 * T[0, 1:] - r * d.d1).max())
            id2.append(np.abs(2 * T[1:, 1:] - r**2 * (2 * d.alpha * d.g + d.d2)).max())
            ghat_defect.append(np.abs(T - T[0, 0] * c.metric.value(y)).max())
        spreads.append(np.ptp(vals))
        DT = covariant_derivative_jet(T_slice.jet(m), christoffel_jet(gj)).coeffs[..., 0]
        id3.append(np.abs(2 * DT + np.einsum("i,jk->ijk", d.d1, d.g)
                          + np.einsum("j,ik->ijk", d.d1, d.g)).max())
        eq1.append(np.abs(gallot_tanno_tensor(d, 1.0)).max())

    def summary(name, values, tolerance):
        return reports.single(name, float(np.max(values)), tolerance, case_id=case_id,
                              points=len(values), seed=seed)

    out["r_spread"] = summary("r_independence", spreads, 1e-10)
    out["identity1"] = summary("identity_dr_x", id1, tol)
    out["identity2"] = summary("identity_x_y", id2, tol)
    out["identity3"] = summary("identity_DT", id3, tol)
    out["equation1"] = summary("gt_residual_c1", eq1, tol)
    alpha_const = np.ptp(alphas) <= tol * max(1.0, np.abs(alphas).max())
    proportional = max(ghat_defect) <= tol
    out["constancy"] = reports.single(
        "constant_iff_proportional", 0.0 if alpha_const == proportional else 1.0, 0.0,
        case_id=case_id, points=len(sample), seed=seed,
        extra={"alpha_constant": bool(alpha_const), "proportional_to_metric": bool(proportional),
               "alpha_spread": float(np.ptp(alphas))})
    return np.asarray(alphas), out


# --------------------------------------------------------------------------
# curvature

def cone_curvature_rhs(c: ConeChart, y) -> np.ndarray:
    """``R(X,Y)Z - g(Y,Z)X + g(X,Z)Y`` on lifted base fields, zero whenever an
    ``r`` slot appears."""
    x = y[1:]
    gj = c.base_metric.jet(x, 2)
    R = riemann_jet(christoffel_jet(gj)).coeffs[..., 0]
    g0 = gj.coeffs[..., 0]
    n = len(x)
    eye = np.eye(n)
    base = R - np.einsum("jk,li->lkij", g0, eye) + np.einsum("ik,lj->lkij", g0, eye)
    out = np.zeros((n + 1,) * 4)
    out[1:, 1:, 1:, 1:] = base
    return out


def cone_riemann(c: ConeChart, y) -> np.ndarray:
    return riemann_jet(christoffel_jet(c.metric.jet(y, 2))).coeffs[..., 0]


def cone_curvature_check(c: ConeChart, sample, tol: float = 1e-9, case_id: str = "",
                         seed=None) -> reports.ResidualReport:
    """Deviation between the cone curvature and the base-side formula; the
    largest cone curvature component is reported in ``extra``."""
    norms = []

    def residual(y):
        Rc = cone_riemann(c, y)
        norms.append(float(np.abs(Rc).max()))
        return np.abs(Rc - cone_curvature_rhs(c, y)).max()

    rep = reports.evaluate("cone_curvature", sample, residual, tol, case_id=case_id, seed=seed)
    rep.extra["max_cone_curvature"] = max(norms) if norms else 0.0
    return rep


def cone_flatness(c: ConeChart, sample, tol: float = 1e-9, case_id: str = "",
                  seed=None) -> reports.ResidualReport:
    return reports.evaluate("cone_flatness", sample, lambda y: np.abs(cone_riemann(c, y)).max(),
                            tol, case_id=case_id, seed=seed)


# --------------------------------------------------------------------------
# splittings

class SplittingResult(NamedTuple):
    T1: TensorField
    T2: TensorField
    alpha1: ScalarField
    alpha2: ScalarField
    reports: dict
    critical_points: np.ndarray


def _check_projector(P, G, tol=1e-9):
    n = len(P)
    scale = max(1.0, np.abs(P).max())
    if np.abs(P @ P - P).max() > tol * scale:
        raise ArgumentError("projector field is not idempotent")
    T1 = G @ P
    if np.abs(T1 - T1.T).max() > tol * max(1.0, np.abs(T1).max()):
        raise ArgumentError("projector is not self-adjoint for the cone metric (V1, V2 not orthogonal)")
    rank = np.linalg.matrix_rank(P, tol=1e-9 * scale)
    if rank and np.linalg.matrix_rank(T1, tol=1e-9 * max(1.0, np.abs(T1).max())) != rank:
        raise DegeneracyError("metric restricted to V1 is degenerate",
                              float(np.linalg.cond(T1 + (np.eye(n) - P))))
    return rank


def splitting_tensors(c: ConeChart, projector: Field, sample, *, critical_count: int = 5000,
                      critical_tol: float = 1e-5, seed: int = 0, case_id: str = ""):
    """Tensors ``T_i(v, u) = g(v_i, u)`` of a splitting ``V1 + V2`` given by
    the mixed components ``P^a_b`` of the projector onto ``V1``.

    Verifies ``T1 + T2 = g``, ``alpha1 + alpha2 = 1``, parallelity, the range
    ``[0, 1]`` of ``alpha_i``, the critical values ``{0, 1}`` (critical points
    found by Newton refinement of the lowest-gradient base samples) and
    nonnegativity of both tensors.
    """
    sample = np.atleast_2d(np.asarray(sample, float))

    def t1_jet(y, order):
        G = c.metric.jet(y, order)
        P = projector.jet(y, order)
        return jeinsum("am,mb->ab", G, P)

    def t2_jet(y, order):
        G = c.metric.jet(y, order)
        P = projector.jet(y, order)
        return G - jeinsum("am,mb->ab", G, P)

    T1 = TensorField(c.chart, 2, jet_fn=t1_jet, symmetric=True, name="T1")
    T2 = TensorField(c.chart, 2, jet_fn=t2_jet, symmetric=True, name="T2")
    a1, a2 = extracted_alpha(T1, c), extracted_alpha(T2, c)

    out = {}
    sums, alpha_sums, defects, ranges, min_eigs = [], [], [], [], []
    for y in sample:
        G = c.metric.value(y)
        _check_projector(projector.value(y), G)
        t1, t2 = T1.value(y), T2.value(y)
        sums.append(np.abs(t1 + t2 - G).max())
        alpha_sums.append(abs(t1[0, 0] + t2[0, 0] - 1.0))
        defects.append(max(parallel_defect(T1, c, y), parallel_defect(T2, c, y)))
        ranges.append((min(t1[0, 0], t2[0, 0]), max(t1[0, 0], t2[0, 0])))
        min_eigs.append(min(np.linalg.eigvalsh(t1).min(), np.linalg.eigvalsh(t2).min()))
    eps_scale = 4 * np.finfo(float).eps * max(1.0, max(np.abs(c.metric.value(y)).max() for y in sample))
    out["sum"] = reports.single("T1_plus_T2", max(sums), eps_scale, case_id=case_id,
                                points=len(sample), seed=seed)
    out["alpha_sum"] = reports.single("alpha1_plus_alpha2", max(alpha_sums), 1e-12,
                                      case_id=case_id, points=len(sample), seed=seed)
    out["parallel"] = reports.single("parallel_splitting", max(defects), PARALLEL_TOL,
                                     case_id=case_id, points=len(sample), seed=seed)
    crit = np.zeros((0, c.base.dim))
    if out["parallel"].passed:
        lo = min(r[0] for r in ranges)
        hi = max(r[1] for r in ranges)
        out["range"] = reports.single("alpha_in_unit_interval", max(0.0, -lo, hi - 1.0), 1e-9,
                                      case_id=case_id, points=len(sample), seed=seed,
                                      extra={"min": lo, "max": hi})
        out["nonnegative"] = reports.single("T_i_nonnegative", max(0.0, -min(min_eigs)), 1e-10,
                                            case_id=case_id, points=len(sample), seed=seed)
        crit, values = critical_points(a1, c.base_metric, critical_count, seed=seed, tol=critical_tol)
        dist = [min(abs(v), abs(v - 1.0)) for v in values]
        out["critical_values"] = reports.single(
            "critical_values_0_1", max(dist) if dist else float("inf"), 1e-4, case_id=case_id,
            points=len(values), seed=seed,
            extra={"critical_values": sorted({round(float(v), 8) for v in values}),
                   "min_alpha1": float(min(values)) if len(values) else None,
                   "max_alpha1": float(max(values)) if len(values) else None})
    return SplittingResult(T1, T2, a1, a2, out, crit)


def critical_points(alpha: Field, g: MetricField, count: int, *, seed: int = 0,
                    tol: float = 1e-5, keep: int = 40, iterations: int = 40, neighbours: int = 8):
    """Critical points of ``alpha`` found from ``count`` chart samples.

    Candidates are the samples whose metric gradient norm is a local minimum
    among their nearest sample neighbours (so isolated extrema are not crowded
    out by critical submanifolds); each is refined by truncated-SVD Newton steps
    on ``D alpha = 0`` with backtracking on ``|D alpha|_g``.  Returns the points
    that reach ``|D alpha|_g < tol`` and the values of ``alpha`` there.
    """
    chart = g.chart
    pts = chart.sample(count, seed)

    def grad_norm(p):
        d = alpha.jet(p, 1).grad().coeffs[..., 0]
        return float(np.sqrt(abs(d @ np.linalg.solve(g.value(p), d))))

    norms = np.array([grad_norm(p) for p in pts])
    k = min(neighbours + 1, len(pts))
    _, idx = cKDTree(pts).query(pts, k=k)
    local = np.flatnonzero(norms <= norms[idx].min(axis=1))
    candidates = local[np.argsort(norms[local])][:keep]
    found, values = [], []
    for x, cur in zip(pts[candidates].copy(), norms[candidates]):
        for _ in range(iterations):
            if cur < 1e-13:
                break
            grad = alpha.jet(x, 2).grad()
            step = np.linalg.lstsq(grad.grad().coeffs[..., 0], -grad.coeffs[..., 0], rcond=1e-4)[0]
            for _ in range(40):
                trial = x + step
                if chart.contains(trial):
                    trial_norm = grad_norm(trial)
                    if trial_norm < cur:
                        break
                step = step / 2
            else:
                break
            x, cur = trial, trial_norm
        if cur < tol:
            found.append(x)
            values.append(alpha.jet(x, 0).value)
    return np.array(found).reshape(-1, chart.dim), np.array(values, dtype=float)
