"""Geodesics, parallel transport and Levi-Civita holonomy of loops, plus
eigenstructure of parallel endomorphisms and invariant-splitting search for
finite sets of matrices preserving a bilinear form.

Holonomy here is always Levi-Civita holonomy (transport of tangent vectors
around loops).  It is related to, but not the same as, the holonomy morphism
of a geometric structure on a quotient; the matrix-set tools cover that side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import null_space

from . import reports
from .errors import ArgumentError, DegeneracyError, DomainError
from .geometry import Chart, Field, MetricField
from .jets import seed_variable

MIN_STEPS = 16
CLUSTER_TOL = 1e-6
EPS = np.finfo(float).eps


# --------------------------------------------------------------------------
# curves

class FunctionPiece:
    """A smooth curve piece ``t -> x(t)`` on ``[0, 1]``.  The function must be
    built from jet-aware arithmetic so the velocity comes from a 1-D jet."""

    def __init__(self, fn: Callable):
        self.fn = fn

    def position(self, t: float) -> np.ndarray:
        return np.array([float(v) for v in self.fn(t)])

    def velocity(self, t: float) -> np.ndarray:
        tj = seed_variable(0, t, 1, order=1)
        out = []
        for v in self.fn(tj):
            out.append(v.coeffs[..., 1].item() if hasattr(v, "coeffs") else 0.0)
        return np.array(out)


class HermitePiece:
    """Cubic Hermite interpolation through integrator nodes."""

    def __init__(self, xs: np.ndarray, vs: np.ndarray):
        # vs are derivatives with respect to the local parameter in [0, 1]
        self.xs = np.asarray(xs, float)
        self.vs = np.asarray(vs, float)
        self.h = 1.0 / (len(xs) - 1)

    def _locate(self, t):
        i = min(int(t / self.h), len(self.xs) - 2)
        return i, (t - i * self.h) / self.h

    def position(self, t: float) -> np.ndarray:
        i, s = self._locate(t)
        h00, h10 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s
        h01, h11 = -2 * s**3 + 3 * s**2, s**3 - s**2
        return (h00 * self.xs[i] + h10 * self.h * self.vs[i]
                + h01 * self.xs[i + 1] + h11 * self.h * self.vs[i + 1])

    def velocity(self, t: float) -> np.ndarray:
        i, s = self._locate(t)
        d00, d10 = 6 * s**2 - 6 * s, 3 * s**2 - 4 * s + 1
        d01, d11 = -6 * s**2 + 6 * s, 3 * s**2 - 2 * s
        return (d00 * self.xs[i] / self.h + d10 * self.vs[i]
                + d01 * self.xs[i + 1] / self.h + d11 * self.vs[i + 1])


@dataclass
class CurveSegment:
    """A piecewise-smooth curve on ``[0, 1]``; piece ``k`` covers
    ``[breakpoints[k], breakpoints[k + 1]]`` with its own local parameter."""

    chart: Chart
    pieces: list
    name: str = ""
    exit_parameter: float | None = None
    nodes: dict = field(default_factory=dict)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.pieces) + 1)

    @property
    def truncated(self) -> bool:
        return self.exit_parameter is not None

    def _piece(self, s: float):
        k = min(int(s * len(self.pieces)), len(self.pieces) - 1)
        return self.pieces[k], s * len(self.pieces) - k

    def position(self, s: float) -> np.ndarray:
        piece, t = self._piece(s)
        return piece.position(t)

    def velocity(self, s: float) -> np.ndarray:
        """Derivative with respect to the global parameter ``s``."""
        piece, t = self._piece(s)
        return piece.velocity(t) * len(self.pieces)

    @property
    def start(self) -> np.ndarray:
        return self.pieces[0].position(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.pieces[-1].position(1.0)

    def validate(self, count: int = 16):
        for k, piece in enumerate(self.pieces):
            for t in np.linspace(0, 1, count):
                if not self.chart.contains(piece.position(t)):
                    raise DomainError(f"curve {self.name!r} leaves chart {self.chart.name!r} "
                                      f"in piece {k} at t={t:.3f}")
        for a, b in zip(self.pieces, self.pieces[1:]):
            if np.abs(a.position(1.0) - b.position(0.0)).max() > 1e-12:
                raise ArgumentError(f"curve {self.name!r} is discontinuous at a breakpoint")


def polygon(chart: Chart, vertices, closed: bool = True, name: str = "polygon") -> CurveSegment:
    """Straight coordinate segments through ``vertices``."""
    vs = [np.asarray(v, float) for v in vertices]
    if closed:
        vs = vs + [vs[0]]
    pieces = [FunctionPiece(lambda t, a=a, b=b: [a[i] + (b[i] - a[i]) * t for i in range(len(a))])
              for a, b in zip(vs, vs[1:])]
    return CurveSegment(chart, pieces, name)


def triangle_loops(chart: Chart, count: int, seed: int = 0, scale: float = 0.3) -> list[CurveSegment]:
    """Coordinate triangles around sampled base points, each fully inside the chart."""
    rng = np.random.default_rng(seed)
    loops = []
    centres = chart.sample(4 * count, seed)
    for c in centres:
        if len(loops) == count:
            break
        verts = [c] + [c + scale * rng.standard_normal(chart.dim) for _ in range(2)]
        loop = polygon(chart, verts, name=f"triangle{len(loops)}")
        try:
            loop.validate()
        except DomainError:
            continue
        loops.append(loop)
    return loops


# --------------------------------------------------------------------------
# integrators

def _gamma(g: MetricField, x) -> np.ndarray:
    """Christoffel values from a first-order metric jet (plain linear algebra)."""
    gj = g.jet(x, 1)
    g0 = gj.coeffs[..., 0]
    d = gj.coeffs[..., 1:]  # d[a, b, c] = d_c g_ab
    first = 0.5 * (d.transpose(1, 2, 0) + d.transpose(1, 0, 2) - d.transpose(2, 0, 1))
    return np.linalg.solve(g0, first.reshape(len(g0), -1)).reshape(first.shape)


def _rk4(f, y, t, h):
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class _Exit(Exception):
    pass


def geodesic_integrate(g: MetricField, p0, v0, length: float, steps: int = 1024) -> CurveSegment:
    """Integrate ``x'' + Gamma(x', x') = 0`` for parameter length ``length``
    with the classical fourth-order Runge-Kutta method.

    The result is parametrised by ``s = t / length``.  If the trajectory
    leaves the chart, the returned curve stops at the last full step and
    ``exit_parameter`` records where.  ``nodes`` holds the raw samples.
    """
    if steps < MIN_STEPS:
        raise ArgumentError(f"steps must be >= {MIN_STEPS}")
    p0 = np.asarray(p0, float)
    v0 = np.asarray(v0, float)
    n = len(p0)
    if not g.chart.contains(p0):
        raise DomainError(f"start point {p0} outside chart")

    def rhs(t, y):
        x, v = y[:n], y[n:]
        if not g.chart.contains(x):
            raise _Exit
        return np.concatenate([v, -np.einsum("kij,i,j->k", _gamma(g, x), v, v)])

    h = length / steps
    ys = [np.concatenate([p0, v0])]
    exit_at = None
    for k in range(steps):
        try:
            y = _rk4(rhs, ys[-1], k * h, h)
        except _Exit:
            exit_at = k / steps
            break
        if not g.chart.contains(y[:n]):
            exit_at = (k + 1) / steps
            break
        ys.append(y)
    ys = np.array(ys)
    if len(ys) < 2:
        raise DomainError("geodesic leaves the chart within the first step")
    frac = (len(ys) - 1) / steps
    # local parameter of the piece spans the integrated part only
    piece = HermitePiece(ys[:, :n], ys[:, n:] * length * frac)
    curve = CurveSegment(g.chart, [piece], "geodesic", exit_at,
                         {"t": np.linspace(0, length * frac, len(ys)), "x": ys[:, :n], "v": ys[:, n:]})
    return curve


def energy_drift(g: MetricField, curve: CurveSegment) -> float:
    """Max relative change of ``g(x', x')`` over the geodesic nodes
    (absolute when the initial energy vanishes)."""
    xs, vs = curve.nodes["x"], curve.nodes["v"]
    e = np.array([v @ g.value(x) @ v for x, v in zip(xs, vs)])
    scale = abs(e[0]) if abs(e[0]) > 1e-300 else 1.0
    return float(np.abs(e - e[0]).max() / scale)


def _transport_piece(g, piece, state, steps, covariant):
    h = 1.0 / steps
    cache: dict = {}

    def gamma_v(t):
        if t not in cache:
            if len(cache) > 4:
                cache.clear()
            x = piece.position(t)
            if not g.chart.contains(x):
                raise DomainError(f"transport curve leaves chart {g.chart.name!r}")
            cache[t] = np.einsum("kij,i->kj", _gamma(g, x), piece.velocity(t))
        return cache[t]

    if covariant:
        def f(t, T):
            A = gamma_v(t)  # A[m, a] = Gamma^m_ia x'^i
            return A.T @ T + T @ A
    else:
        def f(t, V):
            return -gamma_v(t) @ V

    for k in range(steps):
        state = _rk4(f, state, k * h, h)
    return state


def _split_steps(steps: int, pieces: int) -> list[int]:
    base = max(1, steps // pieces)
    return [base] * pieces


def parallel_transport(g: MetricField, curve: CurveSegment, tensor_at_start, steps: int = 1024,
                       covariant: bool = False) -> np.ndarray:
    """Transport components along ``curve``.

    ``tensor_at_start`` holds vector components (shape ``(n,)`` or ``(n, m)``
    for ``m`` column vectors) or, with ``covariant=True``, the components of a
    (0,2) tensor.  ``steps`` is the total step budget, split evenly over the
    curve's smooth pieces.
    """
    if steps < MIN_STEPS:
        raise ArgumentError(f"steps must be >= {MIN_STEPS}")
    state = np.array(tensor_at_start, dtype=float)
    for piece, k in zip(curve.pieces, _split_steps(steps, len(curve.pieces))):
        state = _transport_piece(g, piece, state, k, covariant)
    return state


def transport_matrix(g: MetricField, curve: CurveSegment, steps: int = 1024) -> np.ndarray:
    """Transport of the coordinate basis (columns)."""
    return parallel_transport(g, curve, np.eye(curve.chart.dim), steps)


@dataclass
class HolonomySample:
    loop: CurveSegment
    matrix: np.ndarray
    step_count: int
    est_error: float
    coarse_matrix: np.ndarray | None = None

    def isometry_defect(self, g0: np.ndarray) -> float:
        return float(np.abs(self.matrix.T @ g0 @ self.matrix - g0).max())


def holonomy_loop(g: MetricField, loop: CurveSegment, steps: int = 1024) -> HolonomySample:
    """Transport matrix around a closed loop with a step-halving error estimate.

    ``est_error = max(|H_N - H_{N/2}| / 15, N * eps * |H|)``: the Richardson
    estimate for a fourth-order method, floored at accumulated rounding.
    """
    if np.abs(loop.start - loop.end).max() > 1e-12:
        raise ArgumentError("loop endpoints differ by more than 1e-12")
    H = transport_matrix(g, loop, steps)
    H2 = transport_matrix(g, loop, max(MIN_STEPS, steps // 2))
    err = max(float(np.abs(H - H2).max()) / 15, steps * EPS * float(np.abs(H).max()))
    return HolonomySample(loop, H, steps, err, H2)


def rotation_angle(H: np.ndarray, g0: np.ndarray) -> float:
    """Angle of an isometry of a Riemannian inner product with a single
    rotation plane (signed in dimension 2, unsigned otherwise)."""
    L = np.linalg.cholesky(g0)
    R = L.T @ H @ np.linalg.inv(L.T)
    if len(R) == 2:
        return float(np.arctan2(R[1, 0], R[0, 0]))
    c = (np.trace(R) - (len(R) - 2)) / 2
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


# --------------------------------------------------------------------------
# eigenstructure

@dataclass
class Cluster:
    value: complex
    multiplicity: int
    basis: np.ndarray
    projector: np.ndarray | None = None
    jordan_blocks: tuple = ()
    nondegenerate: bool = True
    restricted_condition: float = 1.0

    @property
    def real(self) -> bool:
        return abs(np.imag(self.value)) <= CLUSTER_TOL


class EigenStructure(NamedTuple):
    clusters: list
    gaps: list
    diagonalizable: bool

    @property
    def values(self) -> list:
        return [c.value.real if c.real else c.value for c in self.clusters]

    @property
    def ranks(self) -> tuple:
        return tuple(c.multiplicity for c in self.clusters)


def cluster_values(values, tol: float = CLUSTER_TOL) -> list[list[int]]:
    """Single-linkage clusters of eigenvalues (indices), sorted by real part."""
    values = np.asarray(values)
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    groups: list[list[int]] = []
    for i in order:
        for grp in groups:
            if any(abs(values[i] - values[j]) <= tol * max(1.0, abs(values[j])) for j in grp):
                grp.append(i)
                break
        else:
            groups.append([i])
    return groups


def _rank(M, tol):
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if len(s) else 0.0)))


def eigen_structure(g0: np.ndarray, T0: np.ndarray, tol: float = CLUSTER_TOL) -> EigenStructure:
    """Generalised eigenspaces of ``A = g^{-1} T`` with Jordan block sizes,
    projectors along the other characteristic spaces and the nondegeneracy
    of ``g`` restricted to each of them."""
    g0 = np.asarray(g0, float)
    cond = np.linalg.cond(g0)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegeneracyError("metric is degenerate at the point", float(cond))
    A = np.linalg.solve(g0, np.asarray(T0, float))
    n = len(A)
    ev = np.linalg.eigvals(A)
    groups = cluster_values(ev, tol)
    rank_tol = 1e-7
    clusters, bases = [], []
    used = set()
    for grp in groups:
        lam = complex(np.mean(ev[grp]))
        key = tuple(sorted(grp))
        if key in used:
            continue
        m = len(grp)
        if abs(lam.imag) <= tol:
            lam = complex(lam.real, 0.0)
            B = A - lam.real * np.eye(n)
            conj = None
        else:
            # real Jordan form: pair with the conjugate cluster
            conj = next(g for g in groups if abs(np.mean(ev[g]) - lam.conjugate()) <= tol * max(1, abs(lam)))
            used.add(tuple(sorted(conj)))
            B = A @ A - 2 * lam.real * A + abs(lam) ** 2 * np.eye(n)
        used.add(key)
        power = np.linalg.matrix_power(B, m)
        basis = null_space(power, rcond=rank_tol)
        if basis.shape[1] != (m if conj is None else 2 * m):
            basis = np.linalg.svd(power)[2][-(m if conj is None else 2 * m):].T
        ranks = [n] + [_rank(np.linalg.matrix_power(B, k), rank_tol) for k in range(1, m + 1)]
        at_least = [ranks[k - 1] - ranks[k] for k in range(1, m + 1)]
        if conj is not None:
            at_least = [a // 2 for a in at_least]
        blocks = []
        for k in range(1, m + 1):
            exact = at_least[k - 1] - (at_least[k] if k < m else 0)
            blocks += [k] * exact
        restricted = basis.T @ g0 @ basis
        rc = float(np.linalg.cond(restricted)) if restricted.size else 1.0
        clusters.append(Cluster(lam, basis.shape[1], basis, None, tuple(sorted(blocks, reverse=True)),
                                bool(np.isfinite(rc) and rc < 1.0 / tol), rc))
        bases.append(basis)
    full = np.hstack(bases)
    if full.shape == (n, n) and np.linalg.matrix_rank(full) == n:
        inv = np.linalg.inv(full)
        start = 0
        for cl in clusters:
            k = cl.multiplicity
            cl.projector = full[:, start:start + k] @ inv[start:start + k]
            start += k
    values = [c.value for c in clusters]
    gaps = [float(abs(b - a)) for a, b in zip(values, values[1:])]
    diag = all(set(c.jordan_blocks) <= {1} for c in clusters)
    return EigenStructure(clusters, gaps, diag)


def decomposability_probe(c, T_hat: Field, sample, loops: int = 10, *, steps: int = 256,
                          seed: int = 0, case_id: str = "") -> dict:
    """Evidence that a parallel symmetric tensor on a cone splits it:
    constant eigenvalues, parallel characteristic-space projectors (checked by
    transporting them along random coordinate segments) and nondegenerate
    characteristic spaces."""
    from .cone import PARALLEL_TOL, parallel_defect

    sample = np.atleast_2d(np.asarray(sample, float))
    out = {}
    defect = max(parallel_defect(T_hat, c, y) for y in sample)
    out["parallel"] = reports.single("parallel_tensor", defect, PARALLEL_TOL, case_id=case_id,
                                     points=len(sample), seed=seed)
    if not out["parallel"].passed:
        out["verdict"] = "precondition failed"
        return out
    structures = [eigen_structure(c.metric.value(y), T_hat.value(y)) for y in sample]
    ranks = {s.ranks for s in structures}
    if len(ranks) != 1:
        out["eigen_constancy"] = reports.single("eigenvalue_constancy", np.inf, 1e-6, case_id=case_id,
                                                points=len(sample), extra={"ranks": sorted(ranks)})
        out["verdict"] = "inconsistent eigenstructure"
        return out
    vals = np.array([[complex(v) for v in s.values] for s in structures])
    spread = float(np.abs(vals - vals[0]).max())
    first = structures[0]
    out["eigen_constancy"] = reports.single(
        "eigenvalue_constancy", spread, 1e-6, case_id=case_id, points=len(sample), seed=seed,
        extra={"eigenvalues": [float(np.real(v)) for v in first.values], "ranks": list(first.ranks),
               "jordan_blocks": [list(cl.jordan_blocks) for cl in first.clusters]})
    if len(first.clusters) == 1:
        out["verdict"] = "trivial tensor, no splitting"
        return out
    nondeg = all(cl.nondegenerate for s in structures for cl in s.clusters)
    out["nondegenerate"] = reports.single(
        "characteristic_spaces_nondegenerate", 0.0 if nondeg else 1.0, 0.0, case_id=case_id,
        points=len(sample), seed=seed,
        extra={"restricted_condition": max(cl.restricted_condition for s in structures for cl in s.clusters)})
    rng = np.random.default_rng(seed)
    worst = 0.0
    paths = 0
    ends = c.sample(4 * loops, seed + 1)
    for y0 in sample:
        if paths == loops:
            break
        y1 = ends[rng.integers(len(ends))]
        path = polygon(c.chart, [y0, y1], closed=False, name="segment")
        try:
            path.validate()
        except DomainError:
            continue
        M = transport_matrix(c.metric, path, steps)
        Minv = np.linalg.inv(M)
        s0, s1 = eigen_structure(c.metric.value(y0), T_hat.value(y0)), \
            eigen_structure(c.metric.value(y1), T_hat.value(y1))
        for a, b in zip(s0.clusters, s1.clusters):
            worst = max(worst, float(np.abs(M @ a.projector @ Minv - b.projector).max()))
        paths += 1
    out["projector_transport"] = reports.single("projector_parallel", worst, 1e-5, case_id=case_id,
                                                points=paths, seed=seed)
    ok = all(out[k].passed for k in ("eigen_constancy", "nondegenerate", "projector_transport"))
    out["verdict"] = "decomposable" if ok else "not decomposable"
    out["splitting_ranks"] = sorted(first.ranks)
    return out


# --------------------------------------------------------------------------
# matrix sets

def form_preservation_defect(matrices, form) -> float:
    G = np.asarray(form, float)
    return max((float(np.abs(M.T @ G @ M - G).max()) for M in matrices), default=0.0)


def commutant_basis(matrices) -> np.ndarray:
    """Basis (as flattened ``n x n`` matrices, one per row) of ``{X : XM = MX}``."""
    n = len(matrices[0])
    eye = np.eye(n)
    rows = np.vstack([np.kron(M.T, eye) - np.kron(eye, M) for M in matrices])
    return null_space(rows, rcond=1e-10).T


def commutant_dimension(matrices) -> int:
    return len(commutant_basis(matrices))


def invariant_symmetric_forms(matrices) -> np.ndarray:
    """Basis of symmetric ``B`` with ``M^T B M = B`` for every matrix (rows are
    flattened matrices)."""
    n = len(matrices[0])
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    sym = np.zeros((n * n, len(idx)))
    for k, (i, j) in enumerate(idx):
        sym[i * n + j, k] = sym[j * n + i, k] = 1.0
    rows = np.vstack([(np.kron(M.T, M.T) - np.eye(n * n)) @ sym for M in matrices])
    coeffs = null_space(rows, rcond=1e-10)
    return (sym @ coeffs).T


def is_invariant_subspace(matrices, basis, tol: float = 1e-12) -> float:
    """Largest component of ``M V`` outside ``span V`` over the matrices."""
    V = np.asarray(basis, float)
    Q, _ = np.linalg.qr(V)
    return max(float(np.abs(M @ V - Q @ (Q.T @ (M @ V))).max()) for M in matrices)


def _closure(matrices, V, tol=1e-8):
    """Smallest subspace containing ``span V`` and invariant under the matrices."""
    Q = null_space(np.zeros((0, V.shape[0]))) if V.size == 0 else np.linalg.qr(V)[0]
    while True:
        cand = np.hstack([Q] + [M @ Q for M in matrices])
        u, s, _ = np.linalg.svd(cand, full_matrices=False)
        r = int(np.sum(s > tol * s[0]))
        if r == Q.shape[1]:
            return Q
        Q = u[:, :r]


class SplittingSearch(NamedTuple):
    splitting: tuple | None
    method: str
    certified_irreducible: bool
    commutant_dimension: int
    invariant_form_dimension: int
    samples: int
    depth: int

    @property
    def found(self) -> bool:
        return self.splitting is not None

    @property
    def ranks(self):
        return None if self.splitting is None else tuple(b.shape[1] for b in self.splitting)


def _nondegenerate_split(matrices, G, V, tol):
    n = len(G)
    if not 0 < V.shape[1] < n:
        return None
    R = V.T @ G @ V
    if np.linalg.cond(R) > 1.0 / tol:
        return None
    W = null_space(V.T @ G)
    if max(is_invariant_subspace(matrices, V), is_invariant_subspace(matrices, W)) > 1e-8:
        return None
    return V, W


def invariant_splitting_search(matrices, form, *, samples: int = 64, depth: int = 4,
                               seed: int = 0, tol: float = CLUSTER_TOL) -> SplittingSearch:
    """Search for a form-orthogonal, form-nondegenerate pair of common invariant
    subspaces.

    Bounded search: eigenspaces of ``samples`` random form-self-adjoint
    elements ``W + W*`` of the algebra generated by words of length at most
    ``depth`` are closed under the matrices and tested.  Then the space of
    invariant symmetric forms is computed exactly: if it is one-dimensional
    (only multiples of ``form``) no nondegenerate invariant splitting exists
    and the result is certified; otherwise a generic invariant form yields one.
    """
    mats = [np.asarray(M, float) for M in matrices]
    G = np.asarray(form, float)
    if not mats:
        raise ArgumentError("no matrices supplied")
    n = len(G)
    if np.abs(G - G.T).max() > 1e-12 or np.linalg.cond(G) > 1e12:
        raise ArgumentError("form must be symmetric and nondegenerate")
    defect = form_preservation_defect(mats, G)
    if defect > 1e-10:
        raise ArgumentError(f"a matrix does not preserve the form (defect {defect:.3e})")
    Ginv = np.linalg.inv(G)
    rng = np.random.default_rng(seed)
    words = [np.eye(n)]
    for length in range(1, depth + 1):
        for combo in itertools.product(range(len(mats)), repeat=length):
            if len(words) > 400:
                break
            W = np.eye(n)
            for i in combo:
                W = W @ mats[i]
            words.append(W)
    forms = invariant_symmetric_forms(mats)
    comm = commutant_dimension(mats)
    for _ in range(samples):
        coeffs = rng.standard_normal(len(words))
        W = sum(cf * w for cf, w in zip(coeffs, words))
        S = W + Ginv @ W.T @ G
        ev, vecs = np.linalg.eig(S)
        for grp in cluster_values(ev, tol):
            V = np.real_if_close(vecs[:, grp])
            if np.iscomplexobj(V):
                V = np.hstack([V.real, V.imag])
            split = _nondegenerate_split(mats, G, _closure(mats, V), tol)
            if split is not None:
                return SplittingSearch(split, "algebra_search", False, comm, len(forms), samples, depth)
    if len(forms) <= 1:
        return SplittingSearch(None, "certified", True, comm, len(forms), samples, depth)
    B = sum(cf * f.reshape(n, n) for cf, f in zip(rng.standard_normal(len(forms)), forms))
    es = eigen_structure(G, B, tol)
    for cl in es.clusters:
        split = _nondegenerate_split(mats, G, cl.basis, tol)
        if split is not None:
            return SplittingSearch(split, "invariant_forms", False, comm, len(forms), samples, depth)
    return SplittingSearch(None, "none found up to search depth", False, comm, len(forms), samples, depth)
