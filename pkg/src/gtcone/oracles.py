"""Independent reference computations used to cross-check the jet engine:
central finite differences, embedding pullbacks and flow pullbacks."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.linalg import expm

from . import reports
from .equations import metric_to_candidate, projective_tensor
from .geometry import Field, MetricField
from .jets import extract_partial, monomials

FD_STEP = 2e-3


def fd_partials(fn, point, order: int = 2, h: float = FD_STEP) -> dict:
    """Partials of ``fn`` (array-valued, float input) up to ``order`` by
    central differences at steps ``h`` and ``h/2`` combined by Richardson
    extrapolation (fourth order accurate); keys are multi-indices."""
    coarse = central_partials(fn, point, order, h)
    fine = central_partials(fn, point, order, h / 2)
    return {mi: fine[mi] + (fine[mi] - coarse[mi]) / 3 for mi in fine}


def central_partials(fn, point, order: int = 2, h: float = FD_STEP) -> dict:
    """Plain second-order central differences up to ``order`` (at most 2)."""
    p = np.asarray(point, float)
    n = len(p)
    f0 = np.asarray(fn(p), float)
    out = {(0,) * n: f0}
    eye = np.eye(n)

    def f(*shifts):
        q = p.copy()
        for i, s in shifts:
            q = q + s * h * eye[i]
        return np.asarray(fn(q), float)

    for i in range(n):
        mi = tuple(int(k == i) for k in range(n))
        out[mi] = (f((i, 1)) - f((i, -1))) / (2 * h)
    if order >= 2:
        for i, j in itertools.combinations_with_replacement(range(n), 2):
            mi = tuple((k == i) + (k == j) for k in range(n))
            if i == j:
                out[mi] = (f((i, 1)) - 2 * f0 + f((i, -1))) / h**2
            else:
                out[mi] = (f((i, 1), (j, 1)) - f((i, 1), (j, -1))
                           - f((i, -1), (j, 1)) + f((i, -1), (j, -1))) / (4 * h * h)
    return out


def fd_christoffel(g: MetricField, point, h: float = FD_STEP) -> np.ndarray:
    """Christoffel symbols from finite differences of metric values."""
    parts = fd_partials(g.value, point, 1, h)
    n = len(point)
    d = np.stack([parts[tuple(int(k == c) for k in range(n))] for c in range(n)], axis=-1)
    first = 0.5 * (d.transpose(1, 2, 0) + d.transpose(1, 0, 2) - d.transpose(2, 0, 1))
    return np.einsum("kl,lij->kij", np.linalg.inv(parts[(0,) * n]), first)


def jet_fd_discrepancy(field: Field, point, order: int = 2, h: float = FD_STEP) -> float:
    """Max over partials of ``|jet - fd| / max(1, |jet|)``."""
    jet = field.jet(point, order)
    fd = fd_partials(field.value, point, order, h)
    worst = 0.0
    for mi in monomials(len(point), order):
        exact = np.asarray(extract_partial(jet, mi), float)
        scale = max(1.0, float(np.abs(exact).max()) if exact.size else 1.0)
        worst = max(worst, float(np.abs(exact - fd[mi]).max()) / scale)
    return worst


def christoffel_discrepancy(g: MetricField, point, h: float = FD_STEP) -> float:
    from .geometry import christoffel_at

    exact = christoffel_at(g, point).coeffs[..., 0]
    return float(np.abs(exact - fd_christoffel(g, point, h)).max()) / max(1.0, float(np.abs(exact).max()))


def stencil_inside(chart, point, h: float = FD_STEP) -> bool:
    """Whether every finite-difference stencil point lies in the chart."""
    p = np.asarray(point, float)
    return all(chart.contains(p + h * np.array(shift))
               for shift in itertools.product((-1, 0, 1), repeat=len(p)))


def fd_crosscheck(case, count: int = 10, seed: int = 0, tol: float = 1e-5) -> reports.ResidualReport:
    """Jets against finite differences for the metric (to second order), its
    Christoffel symbols and every scalar field of a case, at sampled points
    whose stencils stay inside the chart."""
    fields = [case.metric] + list(case.scalars.values())
    pts = [p for p in case.sample(4 * count, seed) if stencil_inside(case.chart, p)][:count]

    def residual(p):
        worst = christoffel_discrepancy(case.metric, p)
        for f in fields:
            worst = max(worst, jet_fd_discrepancy(f, p, 2))
        return worst

    return reports.evaluate("jets_vs_finite_differences", pts, residual, tol,
                            case_id=case.id, seed=seed)


def embedding_metric_discrepancy(case, point, h: float = FD_STEP) -> float:
    """Chart metric against the pullback of the ambient form through the
    embedding, the Jacobian taken by finite differences."""
    emb = case.extras["embedding"]
    eta = case.extras["ambient_form"]
    n = len(point)

    def embed(p):
        return np.array([float(v) for v in emb(list(p))])

    parts = fd_partials(embed, point, 1, h)
    jac = np.stack([parts[tuple(int(k == c) for k in range(n))] for c in range(n)], axis=1)
    return float(np.abs(jac.T @ eta @ jac - case.metric.value(point)).max())


def flow_pullback_discrepancy(case, generator, X, point, h: float = 1e-4) -> float:
    """``d/dt T(phi_t^* g)|_0 = -T_proj(X)`` for the projective flow
    ``phi_t(u) = exp(t a) u / |exp(t a) u|``, by central differences in ``t``
    over explicit pulled-back metrics."""
    from .corpus import projective_pullback_metric

    g = case.metric
    plus = metric_to_candidate(g, projective_pullback_metric(case.chart, expm(h * generator))).T
    minus = metric_to_candidate(g, projective_pullback_metric(case.chart, expm(-h * generator))).T
    derivative = (plus.value(point) - minus.value(point)) / (2 * h)
    return float(np.abs(derivative + projective_tensor(X, g).T.value(point)).max())
