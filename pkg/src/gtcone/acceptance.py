"""The acceptance battery: eleven property-based criteria shared by the test
suite and ``gtcone suite``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import corpus as C
from . import cone, equations as E, oracles, transport as T
from .geometry import TensorField, signature_of


@dataclass
class Item:
    label: str
    value: float
    bound: float
    kind: str = "<"  # "<" value below bound, ">" value above bound, "==" equality

    @property
    def ok(self) -> bool:
        if self.kind == "<":
            return bool(self.value < self.bound)
        if self.kind == "<=":
            return bool(self.value <= self.bound)
        if self.kind == ">":
            return bool(self.value > self.bound)
        return bool(self.value == self.bound)

    def to_dict(self) -> dict:
        return {"label": self.label, "value": float(self.value), "bound": float(self.bound),
                "kind": self.kind, "ok": self.ok}


@dataclass
class CriterionResult:
    number: int
    title: str
    items: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(i.ok for i in self.items)

    def line(self) -> str:
        worst = next((i for i in self.items if not i.ok), None)
        tail = "" if worst is None else f"  [{worst.label}: {worst.value:.3e} vs {worst.bound:.1e}]"
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}{tail}"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "items": [i.to_dict() for i in self.items]}


def _max(values) -> float:
    return float(max(values))


def _sphere_cone(n: int = 2):
    case = C.make_case("round_sphere", n=n)
    return case, cone.build_cone(case.chart, case.metric)


# --------------------------------------------------------------------------

def criterion_1(points: int = 200, seed: int = 42) -> CriterionResult:
    res = CriterionResult(1, "sphere eigenfunction laws")
    for n in (2, 3):
        start = time.perf_counter()
        case = C.make_case("round_sphere", n=n)
        g, xs = case.metric, case.sample(points, seed)
        a1, a2 = case.scalars["harmonic_deg1"], case.scalars["harmonic_deg2"]
        d1 = [_derivs(a1, g, x) for x in xs]
        d2 = [_derivs(a2, g, x) for x in xs]
        res.items += [
            Item(f"S^{n} deg1 laplacian + {n} alpha", _max(abs(_lap(d) + n * d.alpha) for d in d1), 1e-9),
            Item(f"S^{n} deg1 obata", _max(np.abs(d.d2 + d.alpha * d.g).max() for d in d1), 1e-9),
            Item(f"S^{n} deg2 laplacian + {2 * (n + 1)} alpha",
                 _max(abs(_lap(d) + 2 * (n + 1) * d.alpha) for d in d2), 1e-9),
            Item(f"S^{n} deg2 gt(c=1)", _max(np.abs(E.gallot_tanno_tensor(d, 1.0)).max() for d in d2), 1e-9),
        ]
        res.items.append(Item(f"S^{n} runtime seconds", time.perf_counter() - start, 5.0))
    return res


def _derivs(alpha, g, x):
    from .geometry import scalar_derivatives
    return scalar_derivatives(alpha, g, x)


def _lap(d) -> float:
    return float(np.einsum("ij,ij->", np.linalg.inv(d.g), d.d2))


def criterion_2(points: int = 100, seed: int = 42) -> CriterionResult:
    res = CriterionResult(2, "parallel Hessian of the lift")
    case, c = _sphere_cone()
    ys = c.sample(points, seed)
    good = cone.parallel_hessian_residual(cone.lift_function(case.scalars["harmonic_deg2"], c), c, ys)
    bad = cone.parallel_hessian_residual(cone.lift_function(case.scalars["harmonic_deg1"], c), c, ys)
    res.items += [Item("deg2 lift |DDDA|", good.max_residual, 1e-9),
                  Item("deg1 lift max |DDDA|", bad.max_residual, 1e-3, ">")]
    return res


def criterion_3(points: int = 20, seed: int = 42) -> CriterionResult:
    res = CriterionResult(3, "parallel tensor to solution")
    case, c = _sphere_cone()
    Q = np.diag([1.0, 0.0, 0.0])
    T_hat = TensorField(c.chart, 2, expr=C.ambient_form_on_cone(Q), symmetric=True, name="dx1 dx1")
    _, reps = cone.extract_from_parallel(T_hat, c, case.sample(points, seed))
    res.items.append(Item("|D T|", reps["parallel"].max_residual, 1e-10))
    if "r_spread" in reps:
        res.items += [
            Item("r-spread of alpha", reps["r_spread"].max_residual, 1e-10),
            Item("gt(c=1) of extracted alpha", reps["equation1"].max_residual, 1e-9),
            Item("identity 2T(dr, X) = r Dalpha", reps["identity1"].max_residual, 1e-9),
            Item("identity 2T(X, Y) = r^2(2 alpha g + DDalpha)", reps["identity2"].max_residual, 1e-9),
            Item("identity 2DT = -(Dalpha g + Dalpha g)", reps["identity3"].max_residual, 1e-9),
        ]
    return res


def criterion_4(points: int = 100, seed: int = 42) -> CriterionResult:
    res = CriterionResult(4, "cone connection formulas")
    for case in C.all_metric_cases():
        c = cone.build_cone(case.chart, case.metric)
        rep = cone.verify_cone_connection(c, c.sample(points, seed))
        res.items.append(Item(f"{case.id}{_params(case)}", rep.max_residual, 1e-10))
    return res


def _params(case) -> str:
    return "(" + ",".join(str(v) for v in case.params.values()) + ")"


def criterion_5(points: int = 50, seed: int = 42) -> CriterionResult:
    res = CriterionResult(5, "cone curvature identity and flatness")
    bumpy = C.make_case("bumpy_sphere", n=2)
    cb = cone.build_cone(bumpy.chart, bumpy.metric)
    rep = cone.cone_curvature_check(cb, cb.sample(points, seed))
    res.items += [Item("bumpy sphere identity deviation", rep.max_residual, 1e-9),
                  Item("bumpy sphere cone curvature", rep.extra["max_cone_curvature"], 1e-3, ">")]
    _, cs = _sphere_cone()
    res.items.append(Item("cone over S^2 |R|", cone.cone_flatness(cs, cs.sample(points, seed)).max_residual, 1e-9))
    ps = C.make_case("pseudo_sphere", p=1, q=1)
    cp = cone.build_cone(ps.chart, ps.metric)
    res.items.append(Item("cone over S^{1,1} |R|", cone.cone_flatness(cp, cp.sample(points, seed)).max_residual, 1e-8))
    return res


def criterion_6(points: int = 50, seed: int = 42, critical_count: int = 5000) -> CriterionResult:
    res = CriterionResult(6, "splitting tensors")
    _, c = _sphere_cone()
    ys = c.sample(points, seed)
    for rank in (1, 2):
        P = np.diag([1.0] * rank + [0.0] * (3 - rank))
        proj = TensorField(c.chart, 2, expr=C.ambient_projector_on_cone(P), name=f"P{rank}")
        out = cone.splitting_tensors(c, proj, ys, critical_count=critical_count, seed=seed).reports
        tag = f"V1 rank {rank}"
        res.items += [
            Item(f"{tag} |T1 + T2 - g|", out["sum"].max_residual, out["sum"].tolerance, "<="),
            Item(f"{tag} |alpha1 + alpha2 - 1|", out["alpha_sum"].max_residual, 1e-12),
            Item(f"{tag} |D T_i|", out["parallel"].max_residual, 1e-9),
        ]
        if "range" in out:
            res.items += [
                Item(f"{tag} alpha outside [0, 1]", out["range"].max_residual, 1e-9, "<="),
                Item(f"{tag} critical values off {{0, 1}}", out["critical_values"].max_residual, 1e-4),
                Item(f"{tag} critical points found", out["critical_values"].points_sampled, 0, ">"),
                Item(f"{tag} negative eigenvalue of T_i", out["nonnegative"].max_residual, 1e-10, "<="),
            ]
    return res


def criterion_7(steps: int = 4096, seed: int = 42) -> CriterionResult:
    res = CriterionResult(7, "holonomy oracles")
    case = C.make_case("round_sphere", n=2)
    loop = C.octant_loop(2)
    g0 = case.metric.value(loop.start)
    hs = T.holonomy_loop(case.metric, loop, steps)
    res.items += [Item("octant angle - pi/2", abs(abs(T.rotation_angle(hs.matrix, g0)) - np.pi / 2), 1e-4),
                  Item("octant isometry defect - 10 est_error",
                       hs.isometry_defect(g0) - 10 * hs.est_error, 0.0, "<=")]
    errs = [abs(abs(T.rotation_angle(T.transport_matrix(case.metric, loop, k), g0)) - np.pi / 2)
            for k in (48, 96)]
    res.items.append(Item("|step-halving ratio - 16|", abs(errs[0] / errs[1] - 16), 4.0, "<="))
    flat = C.make_case("flat", p=2, q=0)
    worst = max(float(np.abs(T.holonomy_loop(flat.metric, lp, 256).matrix - np.eye(2)).max())
                for lp in T.triangle_loops(flat.chart, 3, seed))
    res.items.append(Item("flat loops |H - I|", worst, 1e-10))
    return res


def criterion_8(points: int = 200, seed: int = 42) -> CriterionResult:
    res = CriterionResult(8, "geodesic equivalence")
    bp = C.make_case("beltrami_pair", n=2)
    g, xs = bp.metric, bp.sample(points, seed)
    trivial = E.MobilityCandidate(g, g)
    res.items.append(Item("T = g", _max(E.basic1_residual(trivial, x) for x in xs[:20]), 1e-12))
    belt = E.metric_to_candidate(g, bp.metrics["g_bar"])
    res.items.append(Item("Beltrami candidate", E.basic1_report(belt, xs).max_residual, 1e-9))
    h = C.make_case("round_sphere", n=2)
    tr = E.solution_transfer(h.scalars["harmonic_deg2"], h.metric, h.sample(points // 4, seed))
    res.items += [Item("DDalpha + 2 alpha g in basic1", tr["basic1"].max_residual, 1e-9),
                  Item("slice tensor first-order identity", tr["first_order"].max_residual, 1e-9)]
    return res


def criterion_9(points: int = 50, seed: int = 42) -> CriterionResult:
    res = CriterionResult(9, "projective fields and mobility")
    case = C.make_case("round_sphere", n=2)
    xs = case.sample(points, seed)
    for name in ("rotation", "rotation2"):
        Tk = E.projective_tensor(case.vectors[name], case.metric).T
        res.items.append(Item(f"killing {name} |T|", _max(np.abs(Tk.value(x)).max() for x in xs), 1e-12))
    pf = C.make_case("sl3_projective_field", n=2)
    m = E.projective_tensor(pf.vectors["projective"], pf.metric)
    pts = pf.sample(points, seed)
    res.items += [Item("sl3 field basic1", E.basic1_report(m, pts).max_residual, 1e-9),
                  Item("sl3 field trace spread", E.trace_spread(m, pts)[0], 1e-2, ">")]
    bp = C.make_case("beltrami_pair", n=2)
    cands = [E.MobilityCandidate(bp.metric, bp.metric), E.metric_to_candidate(bp.metric, bp.metrics["g_bar"]),
             E.metric_to_candidate(bp.metric, bp.metrics["g_bar2"])]
    rank = E.mobility_rank(bp.metric, cands, bp.sample(20, seed))
    res.items.append(Item("mobility rank", rank.rank, 3, "=="))
    return res


def criterion_10(seed: int = 42) -> CriterionResult:
    res = CriterionResult(10, "matrix checks")
    m2 = C.make_case("m2r_determinant_space", count=100, seed=seed)
    G = m2.matrices["form"]
    mats = m2.matrices["generators"]
    res.items.append(Item("signature (2,2)", float(signature_of(G) == (2, 2)), 1.0, "=="))
    res.items.append(Item("SL(2) form defect", T.form_preservation_defect(mats, G), 1e-12))
    rng = np.random.default_rng(seed)
    rank_ok = True
    for v in rng.standard_normal((5, 2)):
        V = C.kernel_subspace(v)
        rank_ok &= bool(np.abs(V.T @ G @ V).max() < 1e-12)
        rank_ok &= all(np.linalg.matrix_rank(np.hstack([V, M @ V])) == 2 for M in mats)
    res.items.append(Item("V_v invariant and totally degenerate", float(rank_ok), 1.0, "=="))
    o2 = C.make_case("finite_group", kind="o2xo2")
    split = T.invariant_splitting_search(o2.matrices["generators"], o2.matrices["form"], seed=seed)
    res.items.append(Item("O(2)xO(2) splitting found (2,2)", float(split.ranks == (2, 2)), 1.0, "=="))
    bi = C.make_case("finite_group", kind="binary_icosahedral")
    cert = T.invariant_splitting_search(bi.matrices["generators"], bi.matrices["form"], seed=seed)
    res.items.append(Item("binary icosahedral certified irreducible",
                          float(cert.certified_irreducible and not cert.found), 1.0, "=="))
    sl = T.invariant_splitting_search(mats, G, seed=seed)
    res.items.append(Item("SL(2) no nondegenerate splitting", float(not sl.found), 1.0, "=="))
    return res


def criterion_11(points: int = 50, seed: int = 42, fd_points: int = 10) -> CriterionResult:
    res = CriterionResult(11, "c = 0 exclusion and finite-difference cross-check")
    tor = C.make_case("flat_torus")
    xs = tor.sample(points, seed)
    p_sin = E.GTProblem(tor.metric, tor.scalars["sin2pi"], 0.0)
    p_aff = E.GTProblem(tor.metric, tor.scalars["affine"], 0.0)
    res.items += [Item("sin(2 pi x) max gt(c=0)", _max(E.gt_residual(p_sin, x) for x in xs), 1.0, ">"),
                  Item("affine gt(c=0)", _max(E.gt_residual(p_aff, x) for x in xs), 0.0, "==")]
    for case in C.all_metric_cases():
        rep = oracles.fd_crosscheck(case, fd_points, seed)
        res.items.append(Item(f"jets vs FD {case.id}{_params(case)}", rep.max_residual, 1e-5))
    return res


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def run_all(seed: int = 42) -> list[CriterionResult]:
    out = []
    for k, fn in CRITERIA.items():
        start = time.perf_counter()
        r = fn(seed=seed)
        r.seconds = time.perf_counter() - start
        out.append(r)
    return out
