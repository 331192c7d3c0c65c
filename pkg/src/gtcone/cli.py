"""Command-line front end: ``gtcone <verb> <case> [flags]``.

Cases are addressed as ``id:params+field``: ``params`` is a comma list of
positional values or ``key=value`` pairs and ``field`` names the scalar under
test, e.g. ``round_sphere:2+harmonic_deg2`` or ``flat:p=1,q=1``.  A path
ending in ``.json`` loads a case file instead of a corpus id.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import acceptance, cone, corpus as C, equations as E, oracles, reports, transport as T
from .errors import GTConeError
from .expr import load_case_file
from .geometry import TensorField, einstein_residual, killing_residual, metric_compatibility

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# deterministic serialization

def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        text = format(x, ".17g")
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag])
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits and insertion-ordered keys."""
    return _encode(obj)


# --------------------------------------------------------------------------
# case addressing

def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_address(address: str):
    """Split ``id:params+field`` into ``(id, params, field)``."""
    field = None
    if "+" in address:
        address, field = address.rsplit("+", 1)
    if address.endswith(".json"):
        return address, None, field
    case_id, _, raw = address.partition(":")
    params = {}
    if raw:
        positional = C.POSITIONAL.get(case_id, ())
        for k, item in enumerate(raw.split(",")):
            if "=" in item:
                key, val = item.split("=", 1)
                params[key.strip()] = _parse_value(val.strip())
            elif k < len(positional):
                params[positional[k]] = _parse_value(item.strip())
            else:
                raise UsageError(f"too many positional parameters for {case_id!r}")
    return case_id, params, field


def load_case(address: str):
    case_id, params, field = parse_address(address)
    if params is None:
        return load_case_file(case_id), field
    if case_id not in C.BUILDERS:
        raise UsageError(f"unknown case {case_id!r}; known: {', '.join(C.case_ids())}")
    return C.make_case(case_id, params), field


def _pick(mapping: dict, name, kind: str, fallback=()):
    if name is not None:
        if name not in mapping:
            raise UsageError(f"case has no {kind} {name!r}; available: {sorted(mapping)}")
        return name, mapping[name]
    for key in fallback:
        if key in mapping:
            return key, mapping[key]
    if len(mapping) == 1:
        return next(iter(mapping.items()))
    raise UsageError(f"choose a {kind} with the address or a flag; available: {sorted(mapping)}")


def _require_chart(case):
    if case.chart is None or case.metric is None:
        raise UsageError(f"case {case.id!r} has no chart and metric")


# --------------------------------------------------------------------------
# verbs

def _tol(args, default):
    return default if args.tol is None else args.tol


def _alpha(case, field, args):
    return _pick(case.scalars, field or args.alpha, "scalar field", ("alpha",))


def check_names():
    return sorted(CHECKS)


def _check_gt(case, field, args, xs):
    name, alpha = _alpha(case, field, args)
    c = 1.0 if args.c is None else args.c
    return [E.gt_report(E.GTProblem(case.metric, alpha, c), xs, _tol(args, E.SOLUTION_TOL),
                        case_id=case.id, seed=args.seed)]


def _check_obata(case, field, args, xs):
    _, alpha = _alpha(case, field, args)
    return [reports.evaluate("obata_residual", xs, lambda p: E.obata_residual(case.metric, alpha, p),
                             _tol(args, E.SOLUTION_TOL), case_id=case.id, seed=args.seed)]


def _check_laplacian(case, field, args, xs):
    name, alpha = _alpha(case, field, args)
    lam = args.eigenvalue
    if lam is None:
        lam = case.expected.get(f"laplacian_eigenvalue:{name}")
    if lam is None:
        raise UsageError("laplacian_eigen_residual needs --eigenvalue")
    return [reports.evaluate("laplacian_eigen_residual", xs,
                             lambda p: E.laplacian_eigen_residual(case.metric, alpha, p, lam),
                             _tol(args, E.SOLUTION_TOL), case_id=case.id, seed=args.seed,
                             extra={"eigenvalue": float(lam)})]


def _check_c0(case, field, args, xs):
    _, alpha = _alpha(case, field, args)
    return [E.c0_parallel_check(case.metric, alpha, xs, _tol(args, E.SOLUTION_TOL), case.id, args.seed)]


def _check_einstein(case, field, args, xs):
    return [reports.evaluate("einstein_residual", xs, lambda p: einstein_residual(case.metric, p),
                             _tol(args, 1e-9), case_id=case.id, seed=args.seed)]


def _check_compat(case, field, args, xs):
    return [reports.evaluate("metric_compatibility", xs, lambda p: metric_compatibility(case.metric, p),
                             _tol(args, 1e-10), case_id=case.id, seed=args.seed)]


def _check_killing(case, field, args, xs):
    name, X = _pick(case.vectors, args.vector, "vector field")
    return [reports.single("killing_residual", killing_residual(X, case.metric, xs), _tol(args, 1e-10),
                           case_id=case.id, points=len(xs), seed=args.seed, extra={"vector": name})]


def _candidate(case, args):
    if args.metric2 is not None:
        _, gb = _pick(case.metrics, args.metric2, "metric")
        return f"metric:{args.metric2}", E.metric_to_candidate(case.metric, gb)
    if args.vector is not None:
        _, X = _pick(case.vectors, args.vector, "vector field")
        return f"projective:{args.vector}", E.projective_tensor(X, case.metric)
    if args.tensor is not None:
        _, Tt = _pick(case.tensors, args.tensor, "tensor field")
        return f"tensor:{args.tensor}", E.MobilityCandidate(case.metric, Tt)
    return "metric:g", E.MobilityCandidate(case.metric, case.metric)


def _check_basic1(case, field, args, xs):
    label, m = _candidate(case, args)
    rep = E.basic1_report(m, xs, _tol(args, E.SOLUTION_TOL), case_id=case.id, seed=args.seed)
    rep.extra["candidate"] = label
    return [rep]


def _check_transfer(case, field, args, xs):
    _, alpha = _alpha(case, field, args)
    out = E.solution_transfer(alpha, case.metric, xs, _tol(args, E.SOLUTION_TOL))
    for rep in out.values():
        rep.case_id, rep.seed = case.id, args.seed
    return list(out.values())


def _check_fd(case, field, args, xs):
    return [oracles.fd_crosscheck(case, min(args.points, 40), args.seed, _tol(args, 1e-5))]


def _cone_of(case):
    return cone.build_cone(case.chart, case.metric)


def _check_cone_connection(case, field, args, xs):
    c = _cone_of(case)
    return [cone.verify_cone_connection(c, c.sample(args.points, args.seed), _tol(args, 1e-10),
                                        case_id=case.id, seed=args.seed)]


def _check_cone_curvature(case, field, args, xs):
    c = _cone_of(case)
    return [cone.cone_curvature_check(c, c.sample(args.points, args.seed), _tol(args, 1e-9),
                                      case_id=case.id, seed=args.seed)]


def _check_cone_flatness(case, field, args, xs):
    c = _cone_of(case)
    return [cone.cone_flatness(c, c.sample(args.points, args.seed), _tol(args, 1e-9),
                               case_id=case.id, seed=args.seed)]


def _check_parallel_hessian(case, field, args, xs):
    _, alpha = _alpha(case, field, args)
    c = _cone_of(case)
    return [cone.parallel_hessian_residual(cone.lift_function(alpha, c), c, c.sample(args.points, args.seed),
                                           _tol(args, cone.PARALLEL_TOL), case_id=case.id, seed=args.seed)]


CHECKS = {
    "gt_residual": _check_gt,
    "obata_residual": _check_obata,
    "laplacian_eigen_residual": _check_laplacian,
    "c0_parallel": _check_c0,
    "einstein_residual": _check_einstein,
    "metric_compatibility": _check_compat,
    "killing_residual": _check_killing,
    "basic1_residual": _check_basic1,
    "solution_transfer": _check_transfer,
    "fd_crosscheck": _check_fd,
    "cone_connection": _check_cone_connection,
    "cone_curvature": _check_cone_curvature,
    "cone_flatness": _check_cone_flatness,
    "parallel_hessian": _check_parallel_hessian,
}


def verb_check(args):
    case, field = load_case(args.case)
    if args.check not in CHECKS:
        raise UsageError(f"unknown check {args.check!r}; known: {', '.join(check_names())}")
    _require_chart(case)
    return CHECKS[args.check](case, field, args, case.sample(args.points, args.seed))


def _is_sphere(case):
    return "quadratic_form" in case.extras


def verb_cone(args):
    case, field = load_case(args.case)
    _require_chart(case)
    out = []
    for name in ("cone_connection", "cone_curvature", "cone_flatness"):
        out += CHECKS[name](case, field, args, None)
    if field or args.alpha or "alpha" in case.scalars:
        out += _check_parallel_hessian(case, field, args, None)
    if _is_sphere(case):
        c = _cone_of(case)
        Q = np.asarray(case.extras["quadratic_form"], float)
        T_hat = TensorField(c.chart, 2, expr=C.ambient_form_on_cone(Q), symmetric=True, name="ambient form")
        _, reps = cone.extract_from_parallel(T_hat, c, case.sample(min(args.points, 50), args.seed))
        for rep in reps.values():
            rep.case_id, rep.seed = case.id, args.seed
        out += list(reps.values())
    return out


def verb_split(args):
    case, _ = load_case(args.case)
    _require_chart(case)
    if not _is_sphere(case):
        raise UsageError("split needs a round-sphere case (ambient projectors on the flat cone)")
    n1 = case.chart.dim + 1
    rank = 1 if args.rank is None else args.rank
    if not 0 < rank < n1:
        raise UsageError(f"--rank must lie in 1..{n1 - 1}")
    c = _cone_of(case)
    P = np.diag([1.0] * rank + [0.0] * (n1 - rank))
    proj = TensorField(c.chart, 2, expr=C.ambient_projector_on_cone(P), name=f"projector rank {rank}")
    res = cone.splitting_tensors(c, proj, c.sample(min(args.points, 100), args.seed),
                                 critical_count=args.critical, seed=args.seed, case_id=case.id)
    return list(res.reports.values())


def verb_holonomy(args):
    case, _ = load_case(args.case)
    _require_chart(case)
    g = case.metric
    if args.loop == "octant":
        if not _is_sphere(case) or case.chart.dim != 2:
            raise UsageError("the octant loop is defined on round_sphere:2")
        loop = C.octant_loop(2)
        g0 = g.value(loop.start)
        hs = T.holonomy_loop(g, loop, args.steps)
        angle = T.rotation_angle(hs.matrix, g0)
        return [reports.single("octant_holonomy_angle", abs(abs(angle) - math.pi / 2), _tol(args, 1e-4),
                               case_id=case.id, points=1, seed=args.seed,
                               extra={"angle": angle, "expected": math.pi / 2, "est_error": hs.est_error,
                                      "isometry_defect": hs.isometry_defect(g0), "steps": args.steps})]
    out = []
    for k, loop in enumerate(T.triangle_loops(case.chart, args.loops, args.seed)):
        hs = T.holonomy_loop(g, loop, args.steps)
        g0 = g.value(loop.start)
        extra = {"loop": k, "est_error": hs.est_error, "matrix": hs.matrix.tolist(),
                 "identity_defect": float(np.abs(hs.matrix - np.eye(len(g0))).max())}
        if case.metric.signature[1] == 0:
            extra["angle"] = T.rotation_angle(hs.matrix, g0)
        out.append(reports.single("holonomy_isometry_defect", hs.isometry_defect(g0),
                                  _tol(args, 10 * hs.est_error + 1e-12), case_id=case.id,
                                  points=1, seed=args.seed, extra=extra))
    return out


def verb_mobility(args):
    case, _ = load_case(args.case)
    _require_chart(case)
    xs = case.sample(min(args.points, 50), args.seed)
    labelled = [("metric:g", E.MobilityCandidate(case.metric, case.metric))]
    labelled += [(f"metric:{k}", E.metric_to_candidate(case.metric, gb)) for k, gb in case.metrics.items()]
    labelled += [(f"projective:{k}", E.projective_tensor(X, case.metric)) for k, X in case.vectors.items()]
    labelled += [(f"tensor:{k}", E.MobilityCandidate(case.metric, t)) for k, t in case.tensors.items()]
    out = []
    for label, m in labelled:
        rep = E.basic1_report(m, xs, _tol(args, E.SOLUTION_TOL), case_id=case.id, seed=args.seed)
        rep.extra["candidate"] = label
        spread, rel = E.trace_spread(m, xs)
        rep.extra.update(trace_spread=spread, affine=bool(rel < 1e-8))
        out.append(rep)
    mr = E.mobility_rank(case.metric, [m for _, m in labelled], xs[:20], case_id=case.id)
    expected = args.rank if args.rank is not None else case.expected.get("mobility_rank")
    value = 0.0 if expected is None else float(abs(mr.rank - int(expected)))
    out.append(reports.single("mobility_rank", value, 0.0, case_id=case.id, points=len(xs[:20]),
                              seed=args.seed,
                              extra={"rank": mr.rank, "expected": expected,
                                     "singular_values": mr.singular_values.tolist(),
                                     "rejected": len(mr.rejected)}))
    return out


def verb_matrices(args):
    case, _ = load_case(args.case)
    if "generators" not in case.matrices:
        raise UsageError(f"case {case.id!r} carries no matrix set")
    mats, G = case.matrices["generators"], case.matrices["form"]
    out = [reports.single("form_preservation", T.form_preservation_defect(mats, G), _tol(args, 1e-12),
                          case_id=case.id, points=len(mats), seed=args.seed)]
    search = T.invariant_splitting_search(mats, G, seed=args.seed)
    expected = case.expected.get("splitting", "unset")
    ranks = None if search.ranks is None else sorted(search.ranks)
    if expected == "unset":
        value = 0.0
    else:
        value = 0.0 if ranks == (None if expected is None else sorted(expected)) else 1.0
    out.append(reports.single("invariant_splitting", value, 0.0, case_id=case.id, points=len(mats),
                              seed=args.seed,
                              extra={"found": search.found, "ranks": ranks, "method": search.method,
                                     "certified_irreducible": search.certified_irreducible,
                                     "commutant_dimension": search.commutant_dimension,
                                     "invariant_form_dimension": search.invariant_form_dimension,
                                     "expected": None if expected == "unset" else expected}))
    return out


def verb_suite(args):
    return acceptance.run_all(seed=args.seed)


VERBS = {"check": verb_check, "cone": verb_cone, "split": verb_split, "holonomy": verb_holonomy,
         "mobility": verb_mobility, "matrices": verb_matrices, "suite": verb_suite}


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--points", type=int, default=200)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--steps", type=int, default=1024)
    common.add_argument("--timing", action="store_true", help="include runtimes (breaks byte identity)")
    common.add_argument("--c", type=float, default=None, help="constant of the equation (default 1)")
    common.add_argument("--alpha", default=None, help="scalar field name")
    common.add_argument("--vector", default=None, help="vector field name")
    common.add_argument("--tensor", default=None, help="tensor field name")
    common.add_argument("--metric2", default=None, help="second metric name")
    common.add_argument("--eigenvalue", type=float, default=None)
    common.add_argument("--loops", type=int, default=5)
    common.add_argument("--loop", choices=("octant", "triangles"), default="triangles")
    common.add_argument("--rank", type=int, default=None)
    common.add_argument("--critical", type=int, default=5000, help="critical-point search samples")

    parser = argparse.ArgumentParser(prog="gtcone", description="Residual checks on corpus cases.")
    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("check", parents=[common], help="run one named check")
    p.add_argument("case")
    p.add_argument("check", help=f"one of: {', '.join(check_names())}")
    for verb in ("cone", "split", "holonomy", "mobility", "matrices"):
        sub.add_parser(verb, parents=[common]).add_argument("case")
    sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    return parser


def _emit(args, command, results) -> int:
    if args.verb == "suite":
        passed = all(r.passed for r in results)
        if args.format == "text":
            lines = [r.line() + (f"  ({r.seconds:.1f} s)" if args.timing else "") for r in results]
            print("\n".join(lines))
        else:
            body = []
            for r in results:
                d = r.to_dict()
                if args.timing:
                    d["runtime_ms"] = int(round(1000 * r.seconds))
                body.append(d)
            print(dumps({"command": command, "passed": passed, "criteria": body}))
        return EXIT_PASS if passed else EXIT_FAIL
    passed = all(r.passed for r in results)
    if args.format == "text":
        print("\n".join(r.line() for r in results))
    else:
        print(dumps({"command": command, "passed": passed,
                     "reports": [r.to_dict(timing=args.timing) for r in results]}))
    return EXIT_PASS if passed else EXIT_FAIL


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.points < 1 or args.steps < 16 or args.loops < 1:
        print("gtcone: --points and --loops must be positive and --steps at least 16", file=sys.stderr)
        return EXIT_USAGE
    try:
        results = VERBS[args.verb](args)
    except (UsageError, GTConeError, ValueError) as exc:
        print(f"gtcone: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return _emit(args, " ".join(argv), results)


if __name__ == "__main__":
    sys.exit(main())
