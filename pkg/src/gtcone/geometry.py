"""Charts, fields and the Levi-Civita calculus on a single coordinate chart.

Conventions (fixed once, used everywhere):

* ``gamma[k, i, j]`` is the Christoffel symbol ``Gamma^k_ij``.
* A covariant derivative appends the direction of differentiation as the
  *last* index: ``(Dt)[a1..ak, c] = d_c t[a1..ak] - sum_s Gamma^m_{c a_s} t[..m..]``.
  So ``DDDalpha[i, j, k]`` is ``alpha_{;ijk}``, ``k`` outermost, and the
  invariant expression ``DDDalpha(X, Y, Z) = (D_X DDalpha)(Y, Z)`` reads
  ``DDDalpha[Y, Z, X]``.
* Curvature: ``R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z`` and
  ``riemann[l, k, i, j]`` is the ``l`` component of ``R(d_i, d_j) d_k``.  The
  unit sphere then satisfies ``R(X, Y)Z = g(Y, Z)X - g(X, Z)Y``.
* Laplacian is ``trace_g DDalpha`` (nonpositive spectrum on the sphere).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ArgumentError, CapabilityError, DegeneracyError, DomainError
from .jets import MAX_ORDER, Jet, as_jet, jeinsum, jinv, seed_point

CONDITION_LIMIT = 1e12
SYMMETRY_TOL = 1e-14


@dataclass(frozen=True)
class Chart:
    """A coordinate patch: dimension, domain predicate and a point sampler.

    ``sampler(rng, count)`` proposes ``count`` candidate points; :meth:`sample`
    keeps only the in-domain ones, so the output always satisfies ``domain``.
    """

    name: str
    dim: int
    domain: Callable[[np.ndarray], bool]
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    note: str = ""

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return p.shape == (self.dim,) and bool(np.all(np.isfinite(p))) and bool(self.domain(p))

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(1000):
            if len(out) >= count:
                break
            proposal = np.atleast_2d(np.asarray(self.sampler(rng, count), dtype=float))
            out.extend(p for p in proposal if self.contains(p))
        if len(out) < count:
            raise DomainError(f"sampler of chart {self.name!r} cannot find {count} in-domain points")
        return np.array(out[:count])


class Field:
    """A tensor-valued field on a chart, evaluated through jets.

    Closed-form fields carry ``expr``, a function from a list of coordinate
    jets (or plain floats) to the nested component array; such fields can be
    evaluated on *any* coordinate jets, which is how they are lifted to cones.
    Derived fields carry only ``jet_fn(point, order)`` because they are built by
    differentiating other fields at a seeded point.
    """

    def __init__(self, chart: Chart, shape: tuple[int, ...], expr=None, jet_fn=None,
                 symmetric: bool = False, name: str = ""):
        if (expr is None) == (jet_fn is None):
            raise ArgumentError("exactly one of expr / jet_fn must be given")
        self.chart = chart
        self.shape = tuple(shape)
        self.expr = expr
        self.jet_fn = jet_fn
        self.symmetric = symmetric
        self.name = name

    @property
    def closed_form(self) -> bool:
        return self.expr is not None

    def at(self, x: Sequence[Jet]) -> Jet:
        """Evaluate the closed-form expression on given coordinate jets."""
        if self.expr is None:
            raise CapabilityError(f"field {self.name!r} is derived; it has no closed form")
        dim = x[0].dim
        order = min(c.order for c in x)
        out = as_jet(self.expr(list(x)), dim, order)
        if out.shape != self.shape:
            out = Jet(np.broadcast_to(out.coeffs, self.shape + out.coeffs.shape[-1:]).copy(),
                      dim, out.order)
        return out

    def jet(self, p, order: int = MAX_ORDER) -> Jet:
        p = np.asarray(p, dtype=float)
        if not self.chart.contains(p):
            raise DomainError(f"point {p} outside chart {self.chart.name!r}")
        if self.expr is not None:
            return self.at(seed_point(p, order))
        # derived fields return at most `order`; fewer when differentiation used them up
        out = self.jet_fn(p, order)
        return out.truncate(order) if out.order > order else out

    def value(self, p) -> np.ndarray:
        return np.asarray(self.jet(p, 0).coeffs[..., 0])

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r} on {self.chart.name!r}, shape={self.shape})"


class ScalarField(Field):
    def __init__(self, chart, expr=None, jet_fn=None, name=""):
        super().__init__(chart, (), expr=expr, jet_fn=jet_fn, name=name)


class VectorFieldOnChart(Field):
    """Contravariant components ``X^i``."""

    def __init__(self, chart, expr=None, jet_fn=None, name=""):
        super().__init__(chart, (chart.dim,), expr=expr, jet_fn=jet_fn, name=name)


class TensorField(Field):
    """Covariant ``(0, k)`` tensor field."""

    def __init__(self, chart, valence: int, expr=None, jet_fn=None, symmetric=False, name=""):
        super().__init__(chart, (chart.dim,) * valence, expr=expr, jet_fn=jet_fn,
                         symmetric=symmetric, name=name)
        self.valence = valence


class MetricField(TensorField):
    """A pseudo-Riemannian metric with declared signature ``(p, q)``."""

    def __init__(self, chart, signature: tuple[int, int], expr=None, jet_fn=None, name=""):
        super().__init__(chart, 2, expr=expr, jet_fn=jet_fn, symmetric=True, name=name)
        p, q = signature
        if p < 0 or q < 0 or p + q != chart.dim:
            raise ArgumentError(f"signature {signature} incompatible with dimension {chart.dim}")
        self.signature = (int(p), int(q))

    def jet(self, p, order: int = MAX_ORDER) -> Jet:
        gj = super().jet(p, order)
        check_metric_value(gj.coeffs[..., 0])
        return gj

    def scaled(self, c: float) -> "MetricField":
        """The metric ``c * g`` (signature swaps for negative ``c``)."""
        if c == 0:
            raise ArgumentError("cannot scale a metric by zero")
        p, q = self.signature
        sig = (p, q) if c > 0 else (q, p)
        if self.expr is not None:
            base = self.expr
            return MetricField(self.chart, sig, expr=lambda x: _scale(base(x), c),
                               name=f"{c:g}*{self.name}")
        return MetricField(self.chart, sig, jet_fn=lambda pt, o: self.jet(pt, o) * c,
                           name=f"{c:g}*{self.name}")


def _scale(components, c):
    if isinstance(components, (list, tuple)):
        return [_scale(x, c) for x in components]
    return components * c


def check_metric_value(g0: np.ndarray) -> float:
    """Symmetry and conditioning checks; returns the condition number."""
    scale = max(1.0, float(np.abs(g0).max()))
    if np.abs(g0 - g0.T).max() > SYMMETRY_TOL * scale:
        raise ArgumentError("metric component matrix is not symmetric")
    cond = float(np.linalg.cond(g0))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise DegeneracyError("metric matrix is numerically singular", cond)
    return cond


def signature_of(matrix: np.ndarray, tol: float = 1e-12) -> tuple[int, int]:
    """Counts of positive and negative eigenvalues of a symmetric matrix."""
    ev = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    scale = max(1.0, float(np.abs(ev).max()))
    return int(np.sum(ev > tol * scale)), int(np.sum(ev < -tol * scale))


# --------------------------------------------------------------------------
# jet-level calculus

def christoffel_jet(gj: Jet) -> Jet:
    """``gamma[k, i, j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)``."""
    check_metric_value(gj.coeffs[..., 0])
    ginv = jinv(gj)
    d = gj.grad().coeffs  # d[a, b, c] = d_c g_ab
    first = 0.5 * (d.transpose(1, 2, 0, 3) + d.transpose(1, 0, 2, 3) - d.transpose(2, 0, 1, 3))
    return jeinsum("kl,lij->kij", ginv, Jet(first, gj.dim, gj.order - 1))


def covariant_derivative_jet(t: Jet, gamma: Jet) -> Jet:
    """Levi-Civita derivative of a covariant tensor jet; new index is last."""
    k = len(t.shape)
    if t.order < 1:
        raise CapabilityError("tensor jet has no derivative orders left")
    letters = "abcdefgh"[:k]
    out = t.grad()
    for s in range(k):
        contracted = letters[:s] + "m" + letters[s + 1:]
        out = out - jeinsum(f"mz{letters[s]},{contracted}->{letters}z", gamma, t)
    return out


def riemann_jet(gamma: Jet) -> Jet:
    """``R[l, k, i, j] = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik``."""
    dg = gamma.grad()  # dg[l, j, k, i] = d_i Gamma^l_jk
    term = dg.transpose(0, 2, 3, 1) - dg.transpose(0, 2, 1, 3)
    quad = jeinsum("lim,mjk->lkij", gamma, gamma)
    return term + quad - quad.transpose(0, 1, 3, 2)


def lie_derivative_metric_jet(X: Jet, gj: Jet) -> Jet:
    """``(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k``."""
    dg = gj.grad()
    dX = X.grad()  # dX[k, i] = d_i X^k
    return (jeinsum("k,ijk->ij", X, dg)
            + jeinsum("kj,ki->ij", gj, dX)
            + jeinsum("ik,kj->ij", gj, dX))


def trace_jet(T: Jet, gj: Jet) -> Jet:
    return jeinsum("ij,ij->", jinv(gj), T)


class ScalarDerivatives(NamedTuple):
    """Values at one point: ``alpha``, ``D alpha``, ``DD alpha``, ``DDD alpha``
    plus the metric and Christoffel symbols used."""

    alpha: float
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray | None
    g: np.ndarray
    gamma: np.ndarray


def scalar_derivatives_from_jets(aj: Jet, gj: Jet) -> ScalarDerivatives:
    if aj.order < 2:
        raise CapabilityError(f"scalar jet of order {aj.order} cannot produce a Hessian")
    gamma = christoffel_jet(gj)
    d1 = aj.grad()
    d2 = covariant_derivative_jet(d1, gamma)
    d3 = covariant_derivative_jet(d2, gamma) if d2.order >= 1 else None
    return ScalarDerivatives(
        aj.coeffs[..., 0].item(), d1.coeffs[..., 0], d2.coeffs[..., 0],
        None if d3 is None else d3.coeffs[..., 0], gj.coeffs[..., 0], gamma.coeffs[..., 0])


def scalar_derivatives(alpha: Field, g: MetricField, p) -> ScalarDerivatives:
    return scalar_derivatives_from_jets(alpha.jet(p), g.jet(p))


# --------------------------------------------------------------------------
# point-level operations

def christoffel_at(g: MetricField, p) -> Jet:
    """Christoffel symbols as a jet array ``(n, n, n)`` (order one less than
    the metric's); ``.value`` gives the numbers."""
    return christoffel_jet(g.jet(p))


def riemann_at(g: MetricField, p) -> tuple[np.ndarray, np.ndarray]:
    """``(R^l_kij, R_lkij)`` at ``p``."""
    gj = g.jet(p)
    R = riemann_jet(christoffel_jet(gj)).coeffs[..., 0]
    return R, np.einsum("lm,mkij->lkij", gj.coeffs[..., 0], R)


def ricci_from_riemann(R: np.ndarray) -> np.ndarray:
    return np.einsum("ikij->kj", R)


def sectional_curvature(g: MetricField, p, X, Y) -> float:
    _, Rd = riemann_at(g, p)
    g0 = g.value(p)
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    area = (X @ g0 @ X) * (Y @ g0 @ Y) - (X @ g0 @ Y) ** 2
    if abs(area) < 1e-12:
        raise DegeneracyError("plane is degenerate", float("inf"))
    return float(np.einsum("lkij,l,k,i,j->", Rd, X, Y, X, Y) / area)


def scalar_curvature(g: MetricField, p) -> float:
    R, _ = riemann_at(g, p)
    return float(np.einsum("kj,kj->", np.linalg.inv(g.value(p)), ricci_from_riemann(R)))


def einstein_residual(g: MetricField, p) -> float:
    """Frobenius norm of ``Ric - (scal / n) g``."""
    R, _ = riemann_at(g, p)
    g0 = g.value(p)
    ric = ricci_from_riemann(R)
    scal = np.einsum("kj,kj->", np.linalg.inv(g0), ric)
    return float(np.linalg.norm(ric - scal / len(g0) * g0))


def laplacian(alpha: Field, g: MetricField, p) -> float:
    d = scalar_derivatives(alpha, g, p)
    return float(np.einsum("ij,ij->", np.linalg.inv(d.g), d.d2))


def metric_compatibility(g: MetricField, p) -> float:
    """Max component of ``Dg`` (zero for the Levi-Civita connection)."""
    gj = g.jet(p)
    return float(np.abs(covariant_derivative_jet(gj, christoffel_jet(gj)).coeffs[..., 0]).max())


def lie_derivative_metric(X: VectorFieldOnChart, g: MetricField, p) -> np.ndarray:
    return lie_derivative_metric_jet(X.jet(p), g.jet(p)).coeffs[..., 0]


def killing_residual(X: VectorFieldOnChart, g: MetricField, sample) -> float:
    """Max over ``sample`` of the Frobenius norm of ``L_X g``."""
    return max(float(np.linalg.norm(lie_derivative_metric(X, g, p))) for p in sample)


# --------------------------------------------------------------------------
# derived fields

def covariant_derivative(t: Field, g: MetricField) -> TensorField:
    """The field ``Dt`` (valence + 1); iterate for ``D alpha, DD alpha, ...``."""
    if t.chart is not g.chart and t.chart.name != g.chart.name:
        raise ArgumentError("field and metric live on different charts")
    if len(t.shape) > 2:
        raise ArgumentError("covariant_derivative supports valence <= 2")

    def jet_fn(p, order):
        k = min(order + 1, MAX_ORDER)
        return covariant_derivative_jet(t.jet(p, k), christoffel_jet(g.jet(p, k)))

    return TensorField(t.chart, len(t.shape) + 1, jet_fn=jet_fn, name=f"D({t.name})")


def hessian_plus(alpha: Field, g: MetricField, coefficient: float = 2.0,
                 scale: float = 1.0) -> TensorField:
    """``scale * (DDalpha + coefficient * alpha * g)``; with the defaults this
    is the symmetric tensor attached to a solution of the cone equation."""

    def jet_fn(p, order):
        k = min(order + 2, MAX_ORDER)
        aj, gj = alpha.jet(p, k), g.jet(p, k)
        gamma = christoffel_jet(gj)
        hess = covariant_derivative_jet(aj.grad(), gamma)
        return (hess + gj.truncate(hess.order) * aj.truncate(hess.order) * coefficient) * scale

    return TensorField(alpha.chart, 2, jet_fn=jet_fn, symmetric=True,
                       name=f"{scale:g}*(DD{alpha.name}+{coefficient:g}{alpha.name}g)")


__all__ = [
    "Chart", "Field", "ScalarField", "VectorFieldOnChart", "TensorField", "MetricField",
    "ScalarDerivatives", "christoffel_at", "riemann_at", "covariant_derivative",
    "lie_derivative_metric", "einstein_residual", "killing_residual", "laplacian",
    "sectional_curvature", "scalar_curvature", "metric_compatibility", "signature_of",
    "christoffel_jet", "covariant_derivative_jet", "riemann_jet", "lie_derivative_metric_jet",
    "scalar_derivatives", "scalar_derivatives_from_jets", "trace_jet", "hessian_plus",
    "check_metric_value", "ricci_from_riemann",
]
