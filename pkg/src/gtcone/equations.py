"""Residual operators for the third-order equation on ``alpha``, the Obata
equation, the geodesic-equivalence equation for symmetric tensors ``T`` and
the tensors built from projective vector fields.

Index convention: covariant derivatives append their index last, so
``DDDalpha[i, j, k] = alpha_{;ijk}`` and ``DT[i, j, k] = T_{ij;k}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import reports
from .errors import ArgumentError, CapabilityError, DegeneracyError
from .geometry import (Field, MetricField, ScalarField, TensorField, VectorFieldOnChart,
                       christoffel_jet, covariant_derivative_jet, hessian_plus,
                       lie_derivative_metric_jet, scalar_derivatives,
                       trace_jet)
from .jets import MAX_ORDER, Jet, jdet, jeinsum, jinv, power

SOLUTION_TOL = 1e-9


def _same_chart(a: Field, b: Field):
    if a.chart is not b.chart and a.chart.name != b.chart.name:
        raise ArgumentError(f"{a.name!r} and {b.name!r} live on different charts")


def gallot_tanno_tensor(d, c: float) -> np.ndarray:
    """``E[i,j,k] = alpha_;ijk + c (2 alpha_k g_ij + alpha_i g_jk + alpha_j g_ik)``
    from precomputed :class:`~gtcone.geometry.ScalarDerivatives`."""
    if d.d3 is None:
        raise CapabilityError("scalar jet of order < 3: third derivatives unavailable")
    return d.d3 + c * (2 * np.einsum("k,ij->ijk", d.d1, d.g)
                       + np.einsum("i,jk->ijk", d.d1, d.g)
                       + np.einsum("j,ik->ijk", d.d1, d.g))


@dataclass(frozen=True)
class GTProblem:
    g: MetricField
    alpha: Field
    c: float

    def __post_init__(self):
        _same_chart(self.alpha, self.g)

    def tensor(self, point) -> np.ndarray:
        return gt_tensor(self, point)

    def residual(self, point) -> float:
        return gt_residual(self, point)


def gt_tensor(p: GTProblem, point) -> np.ndarray:
    """The raw left-hand side as an ``(n, n, n)`` array."""
    return gallot_tanno_tensor(scalar_derivatives(p.alpha, p.g, point), p.c)


def gt_residual(p: GTProblem, point) -> float:
    return float(np.abs(gt_tensor(p, point)).max())


def gt_report(p: GTProblem, sample, tol: float = SOLUTION_TOL, case_id: str = "",
              seed=None) -> reports.ResidualReport:
    return reports.evaluate(f"gt_residual(c={p.c:g})", sample, lambda x: gt_residual(p, x), tol,
                            case_id=case_id, seed=seed)


def rescale_equivalence(p: GTProblem) -> GTProblem:
    """``(g, alpha, c) -> (c g, alpha, 1)``; both have identical residual arrays."""
    if p.c == 0:
        raise ArgumentError("c = 0 cannot be normalised away by rescaling")
    return GTProblem(p.g.scaled(p.c), p.alpha, 1.0)


def obata_tensor(g: MetricField, alpha: Field, point) -> np.ndarray:
    d = scalar_derivatives(alpha, g, point)
    return d.d2 + d.alpha * d.g


def obata_residual(g: MetricField, alpha: Field, point) -> float:
    """Max-norm of ``DDalpha + alpha g``."""
    return float(np.abs(obata_tensor(g, alpha, point)).max())


def laplacian_eigen_residual(g: MetricField, alpha: Field, point, eigenvalue: float) -> float:
    """``|Delta alpha - eigenvalue * alpha|`` with ``Delta = tr_g DD``."""
    d = scalar_derivatives(alpha, g, point)
    return abs(float(np.einsum("ij,ij->", np.linalg.inv(d.g), d.d2)) - eigenvalue * d.alpha)


def c0_parallel_check(g: MetricField, alpha: Field, sample, tol: float = SOLUTION_TOL,
                      case_id: str = "", seed=None) -> reports.ResidualReport:
    """Parallel-Hessian check for the ``c = 0`` equation.

    The ``c = 0`` residual is evaluated first; if it exceeds ``tol`` the
    returned report is the failed precondition.  Otherwise the report carries
    ``max |DDDalpha|`` and, in ``extra``, the eigenvalues of ``g^{-1} DDalpha``
    at the sampled minimum and maximum of ``alpha``.
    """
    sample = np.atleast_2d(np.asarray(sample, float))
    derivs = [scalar_derivatives(alpha, g, x) for x in sample]
    pre = max(float(np.abs(gallot_tanno_tensor(d, 0.0)).max()) for d in derivs)
    if pre > tol:
        return reports.single("c0_precondition", pre, tol, case_id=case_id, points=len(sample),
                              seed=seed)
    values = np.array([d.alpha for d in derivs])

    def eigs(d):
        return sorted(np.linalg.eigvals(np.linalg.solve(d.g, d.d2)).real.tolist())

    lo, hi = int(np.argmin(values)), int(np.argmax(values))
    rep = reports.evaluate("c0_parallel_hessian", range(len(derivs)),
                           lambda i: np.abs(derivs[int(i)].d3).max(), tol,
                           case_id=case_id, seed=seed)
    rep.details = [(sample[int(p[0])], v) for p, v in rep.details]
    rep.extra.update(hessian_eigenvalues_at_min=eigs(derivs[lo]),
                     hessian_eigenvalues_at_max=eigs(derivs[hi]),
                     alpha_min=float(values[lo]), alpha_max=float(values[hi]))
    return rep


# --------------------------------------------------------------------------
# geodesic equivalence

class MobilityCandidate:
    """A symmetric (0,2) tensor ``T`` paired with the metric it is tested
    against.  The trace is a derived field, recomputed on every evaluation."""

    def __init__(self, g: MetricField, T: Field):
        _same_chart(T, g)
        if T.shape != g.shape:
            raise ArgumentError(f"candidate must be a (0,2) tensor of shape {g.shape}")
        self.g = g
        self.T = T

    @property
    def trace(self) -> ScalarField:
        g, T = self.g, self.T

        def jet_fn(p, order):
            return trace_jet(T.jet(p, order), g.jet(p, order))

        return ScalarField(T.chart, jet_fn=jet_fn, name=f"tr({T.name})")

    def __repr__(self):
        return f"MobilityCandidate({self.T.name!r}, g={self.g.name!r})"


def _candidate(m) -> MobilityCandidate:
    if isinstance(m, MobilityCandidate):
        return m
    raise ArgumentError("expected a MobilityCandidate")


def basic1_tensor(m: MobilityCandidate, point) -> np.ndarray:
    """``DT[i,j,k] - 1/2 (dtr_i g_jk + dtr_j g_ik)``."""
    k = MAX_ORDER
    gj = m.g.jet(point, k)
    Tj = m.T.jet(point, k)
    if Tj.order < 1:
        raise CapabilityError(f"tensor {m.T.name!r} carries no derivative orders")
    gamma = christoffel_jet(gj)
    DT = covariant_derivative_jet(Tj, gamma).coeffs[..., 0]
    dtr = trace_jet(Tj, gj.truncate(Tj.order)).grad().coeffs[..., 0]
    g0 = gj.coeffs[..., 0]
    return DT - 0.5 * (np.einsum("i,jk->ijk", dtr, g0) + np.einsum("j,ik->ijk", dtr, g0))


def basic1_residual(m: MobilityCandidate, point) -> float:
    return float(np.abs(basic1_tensor(m, point)).max())


def basic1_report(m: MobilityCandidate, sample, tol: float = SOLUTION_TOL, case_id: str = "",
                  seed=None) -> reports.ResidualReport:
    return reports.evaluate(f"basic1({m.T.name})", sample, lambda x: basic1_residual(m, x), tol,
                            case_id=case_id, seed=seed)


def candidate_from_metrics(gj: Jet, gbj: Jet) -> Jet:
    """``|det gbar / det g|^{1/(n+1)} gbar^{ab} g_ai g_bj`` on jets."""
    n = gj.shape[0]
    gb0 = gbj.coeffs[..., 0]
    cond = float(np.linalg.cond(gb0))
    if not np.isfinite(cond) or cond > 1e12:
        raise DegeneracyError("second metric is degenerate", cond)
    ratio = jdet(gbj) / jdet(gj)
    if ratio.value < 0:
        ratio = -ratio
    factor = power(ratio, 1.0 / (n + 1))
    T = jeinsum("ai,aj->ij", gj, jeinsum("ab,bj->aj", jinv(gbj), gj))
    return T * factor


def metric_to_candidate(g: MetricField, g_bar: MetricField) -> MobilityCandidate:
    """The symmetric tensor attached to a second metric ``g_bar``; it solves
    the geodesic-equivalence equation iff the two metrics share geodesics."""
    _same_chart(g_bar, g)
    if g.expr is not None and g_bar.expr is not None:
        T = TensorField(g.chart, 2, expr=lambda x: candidate_from_metrics(g.at(x), g_bar.at(x)),
                        symmetric=True, name=f"T({g_bar.name})")
    else:
        T = TensorField(g.chart, 2, jet_fn=lambda p, k: candidate_from_metrics(g.jet(p, k), g_bar.jet(p, k)),
                        symmetric=True, name=f"T({g_bar.name})")
    return MobilityCandidate(g, T)


def projective_tensor(X: VectorFieldOnChart, g: MetricField) -> MobilityCandidate:
    """``T = L_X g - tr(L_X g) / (n + 1) g`` (possibly degenerate)."""
    _same_chart(X, g)
    n = g.shape[0]

    def jet_fn(p, order):
        k = min(order + 1, MAX_ORDER)
        gj = g.jet(p, k)
        L = lie_derivative_metric_jet(X.jet(p, k), gj)
        return L - gj.truncate(L.order) * trace_jet(L, gj.truncate(L.order)) * (1.0 / (n + 1))

    return MobilityCandidate(g, TensorField(g.chart, 2, jet_fn=jet_fn, symmetric=True,
                                            name=f"T_proj({X.name})"))


def trace_spread(m: MobilityCandidate, sample) -> tuple[float, float]:
    """``(spread, relative spread)`` of ``tr T`` over the sample."""
    tr = m.trace
    vals = np.array([tr.value(p) for p in sample], dtype=float)
    spread = float(np.ptp(vals))
    return spread, spread / max(1.0, float(np.abs(vals).max()))


def is_affine(m: MobilityCandidate, sample, tol: float = 1e-8) -> bool:
    return trace_spread(m, sample)[1] < tol


class KillingCombination(NamedTuple):
    k: float
    k_prime: float
    l: float
    report: reports.ResidualReport
    killing: bool | None


def killing_combination_search(X: VectorFieldOnChart, Y: VectorFieldOnChart, g: MetricField,
                               sample, fresh_sample=None, *, fit_tol: float = 1e-8,
                               zero_tol: float = 1e-12, case_id: str = "") -> KillingCombination:
    """Fit ``k T + k' T' = l g`` for the projective tensors of ``X`` and ``Y``.

    The homogeneous system is solved by SVD (right singular vector of the
    smallest singular value), normalised so its first significant entry is 1.
    When the fit succeeds, ``L_{kX + k'Y} g = (n + 1) l g`` is checked on
    ``fresh_sample`` and the combination is classified as Killing (``l = 0``) or
    homothetic.  A failed fit yields ``k = k' = l = nan`` and a failed report.
    """
    n = g.shape[0]
    sample = np.atleast_2d(np.asarray(sample, float))
    fresh = sample if fresh_sample is None else np.atleast_2d(np.asarray(fresh_sample, float))
    T1, T2 = projective_tensor(X, g).T, projective_tensor(Y, g).T
    rows = [np.stack([T1.value(p).ravel(), T2.value(p).ravel(), -g.value(p).ravel()], axis=1)
            for p in sample]
    M = np.concatenate(rows)
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M[:, 0]).max() <= zero_tol * scale:
        coeffs, fit = np.array([1.0, 0.0, 0.0]), 0.0
    elif np.abs(M[:, 1]).max() <= zero_tol * scale:
        coeffs, fit = np.array([0.0, 1.0, 0.0]), 0.0
    else:
        _, s, vt = np.linalg.svd(M, full_matrices=False)
        fit = float(s[-1] / s[0])
        coeffs = vt[-1]
        lead = coeffs[np.flatnonzero(np.abs(coeffs) > 1e-12)[0]]
        coeffs = coeffs / lead
    if fit > fit_tol:
        rep = reports.single("killing_combination_fit", fit, fit_tol, case_id=case_id,
                             points=len(sample), extra={"outcome": "no linear relation found"})
        return KillingCombination(np.nan, np.nan, np.nan, rep, None)
    k, kp, l = (float(v) for v in coeffs)

    def combo_residual(p):
        gj = g.jet(p, 1)
        Z = X.jet(p, 1) * k + Y.jet(p, 1) * kp
        L = lie_derivative_metric_jet(Z, gj).coeffs[..., 0]
        return np.abs(L - (n + 1) * l * gj.coeffs[..., 0]).max()

    rep = reports.evaluate("killing_combination", fresh, combo_residual, fit_tol, case_id=case_id)
    killing = abs(l) <= fit_tol
    rep.extra.update(fit_residual=fit, k=k, k_prime=kp, l=l,
                     outcome="killing" if killing else "homothetic")
    return KillingCombination(k, kp, l, rep, killing)


class MobilityRank(NamedTuple):
    rank: int
    singular_values: np.ndarray
    accepted: list
    rejected: list


def mobility_rank(g: MetricField, candidates: Sequence, sample, *, basic1_tol: float = 1e-8,
                  cutoff: float = 1e-8, case_id: str = "") -> MobilityRank:
    """Numerical rank of the stacked candidate components over the sample,
    a lower bound for the degree of mobility.  Candidates failing the
    geodesic-equivalence equation are rejected with their report."""
    sample = np.atleast_2d(np.asarray(sample, float))
    accepted, rejected, rows = [], [], []
    for cand in candidates:
        m = cand if isinstance(cand, MobilityCandidate) else MobilityCandidate(g, cand)
        rep = basic1_report(m, sample, basic1_tol, case_id=case_id)
        if not rep.passed:
            rejected.append(rep)
            continue
        accepted.append(m)
        rows.append(np.concatenate([m.T.value(p).ravel() for p in sample]))
    if not rows:
        return MobilityRank(0, np.zeros(0), accepted, rejected)
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    rank = int(np.sum(s > cutoff * s[0])) if s[0] > 0 else 0
    return MobilityRank(rank, s, accepted, rejected)


# --------------------------------------------------------------------------
# solutions -> symmetric tensors

def solution_tensor(alpha: Field, g: MetricField) -> TensorField:
    """``DDalpha + 2 alpha g``; solves the geodesic-equivalence equation when
    ``alpha`` solves the ``c = 1`` equation."""
    return hessian_plus(alpha, g, 2.0, 1.0)


def first_order_tensor(T: Field, alpha: Field, g: MetricField, point) -> np.ndarray:
    """``2 DT[i,j,k] + alpha_i g_jk + alpha_j g_ik``."""
    gj = g.jet(point)
    Tj = T.jet(point)
    DT = covariant_derivative_jet(Tj, christoffel_jet(gj)).coeffs[..., 0]
    d1 = alpha.jet(point, 1).grad().coeffs[..., 0]
    g0 = gj.coeffs[..., 0]
    return 2 * DT + np.einsum("i,jk->ijk", d1, g0) + np.einsum("j,ik->ijk", d1, g0)


def solution_transfer(alpha: Field, g: MetricField, sample, tol: float = SOLUTION_TOL,
                      case_id: str = "", seed=None) -> dict:
    """Reports for ``T = DDalpha + 2 alpha g`` under the geodesic-equivalence
    equation, and for the slice tensor ``T / 2`` under the first-order identity
    ``2 DT = -(alpha_i g_jk + alpha_j g_ik)``."""
    T = solution_tensor(alpha, g)
    half = hessian_plus(alpha, g, 2.0, 0.5)
    return {
        "basic1": basic1_report(MobilityCandidate(g, T), sample, tol, case_id=case_id, seed=seed),
        "first_order": reports.evaluate("first_order_identity", sample,
                                lambda x: np.abs(first_order_tensor(half, alpha, g, x)).max(), tol,
                                case_id=case_id, seed=seed),
    }
