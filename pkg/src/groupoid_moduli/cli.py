"""Command-line entry point.

Every subcommand writes a JSON report (``--out``, default ``report.json``)
and prints a one-line summary. Exit status: 0 on success, 1 when a
verification fails (the report is still written), 2 on bad input.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Callable

from . import algebroid as alg
from . import io
from .errors import GroupoidModuliError, InputError, SizeLimitError, VerificationError
from .expr import ExpressionError
from .fingroupoid import (
    FiniteGroupoid,
    bisections,
    double_coset,
    isotropy_group,
    leaves,
    validate,
)
from .lattice import DEFAULT_LIMIT, enumerate_flat, gauge_orbits
from .moduli import DEFAULT_REP_LIMIT, compare_lattice_vs_holonomy, moduli_closed, moduli_open

SCHEMA = "groupoid-moduli-report/1"
THREADS_ENV = "GROUPOID_MODULI_THREADS"
# Options that must not change the report contents.
_NOT_CONFIG = {"out", "threads", "func"}


class Outcome:
    def __init__(self, ok: bool, result: dict, summary: str, leaves: list | None = None):
        self.ok = ok
        self.result = result
        self.summary = summary
        self.leaves = leaves


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be at least 1")
    return n


def _leaf_table(g: FiniteGroupoid) -> list[dict]:
    return [
        {"leaf": i, "objects": list(objs), "isotropy_order": len(g.isotropy_arrows(objs[0]))}
        for i, objs in enumerate(leaves(g))
    ]


# -- finite side ---------------------------------------------------------------


def cmd_validate(args) -> Outcome:
    g = io.load_groupoid(args.groupoid, check=False)
    rep = validate(g)
    res = rep.to_json()
    res.update({"objects": g.n_objects, "arrows": g.n_arrows})
    failed = sorted({v.axiom for v in rep.violations})
    summary = "groupoid axioms hold" if rep.ok else "violated: " + ", ".join(failed)
    return Outcome(rep.ok, res, summary, _leaf_table(g) if rep.ok else None)


def cmd_leaves(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    table = _leaf_table(g)
    return Outcome(True, {"leaf_count": len(table)}, f"{len(table)} leaves", table)


def cmd_isotropy(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    if not 0 <= args.object < g.n_objects:
        raise InputError(f"object {args.object} out of range")
    iso = isotropy_group(g, args.object)
    labels = list(iso.labels)
    table = [[labels[iso.compose(a, b)] for b in range(iso.n_arrows)] for a in range(iso.n_arrows)]
    res = {"object": args.object, "order": len(labels), "arrows": labels, "table": table}
    return Outcome(True, res, f"isotropy at {args.object} has order {len(labels)}", _leaf_table(g))


def cmd_bisections(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    grp = bisections(g, limit=args.limit)
    res = {
        "order": len(grp),
        "elements": [list(b.sigma) for b in grp.elements],
        "object_permutations": [list(grp.psi(b)) for b in grp.elements],
    }
    return Outcome(True, res, f"Bis has order {len(grp)}", _leaf_table(g))


def cmd_moduli_closed(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    r = moduli_closed(g, args.genus, limit=args.limit, threads=args.threads)
    res = r.to_json()
    leaves_ = res.pop("leaves")
    return Outcome(True, res, f"{r.class_count} classes over {len(r.leaves)} leaves", leaves_)


def cmd_moduli_open(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    sub = io.load_subgroupoid(g, args.sub)
    r = moduli_open(g, args.genus, sub, limit=args.limit, threads=args.threads)
    res = r.to_json()
    res["subgroupoid"] = sub.to_json()
    leaves_ = res.pop("leaves")
    return Outcome(True, res, f"{r.class_count} classes over {len(r.leaves)} boundary leaves", leaves_)


def cmd_moduli_interval(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    s0 = io.load_subgroupoid(g, args.sub0)
    s1 = io.load_subgroupoid(g, args.sub1)
    classes = double_coset(g, s0, s1)
    res = {
        "class_count": len(classes),
        "arrow_count": g.n_arrows,
        "classes": [{"representative": c.representative, "members": list(c.members)} for c in classes],
    }
    return Outcome(True, res, f"{len(classes)} interval classes", _leaf_table(g))


def cmd_lattice_enumerate(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    c = io.load_surface(args.surface)
    sub = io.load_subgroupoid(g, args.sub) if args.sub else None
    fields = enumerate_flat(c, g, sub=sub, gauge_fixed=args.gauge_fixed, limit=args.limit, threads=args.threads)
    res = {"surface": c.to_json(), "field_count": len(fields), "gauge_fixed": args.gauge_fixed}
    leaf_rows = None
    if not args.gauge_fixed:
        orbits = gauge_orbits(c, g, fields, sub=sub)
        res["orbit_count"] = len(orbits)
        res["orbits"] = [{"representative": o.representative.to_json(), "size": o.size, "leaf": o.leaf} for o in orbits]
        leaf_rows = [
            dict(row, orbits=sum(1 for o in orbits if o.leaf == row["leaf"])) for row in _leaf_table(g)
        ]
    if args.list_fields:
        res["fields"] = [m.to_json() for m in fields]
    summary = f"{len(fields)} flat fields" + (f", {res['orbit_count']} gauge orbits" if "orbit_count" in res else "")
    return Outcome(True, res, summary, leaf_rows)


def cmd_compare(args) -> Outcome:
    g = io.load_groupoid(args.groupoid)
    c = io.load_surface(args.surface)
    sub = io.load_subgroupoid(g, args.sub) if args.sub else None
    rep = compare_lattice_vs_holonomy(c, g, sub=sub, limit=args.limit, threads=args.threads, strict=False)
    res = rep.to_json()
    leaves_ = res.pop("leaves")
    summary = f"lattice {rep.lattice_orbit_count} orbits, holonomy {rep.holonomy_class_count} classes"
    return Outcome(rep.ok, res, summary, leaves_)


# -- smooth side ---------------------------------------------------------------


def _samples(args, dim: int):
    return alg.sample_ball(args.points, dim, seed=args.seed, radius=args.radius)


def cmd_algebroid_check(args) -> Outcome:
    a = io.load_algebroid(args.input)
    rep = alg.check_axioms(a, _samples(args, a.dim_M), h=args.h, tol=args.tol)
    res = rep.to_json()
    res["algebroid"] = a.to_json()
    return Outcome(rep.ok, res, f"max axiom residual {rep.max_residual:.3e} (tol {args.tol:g})")


def cmd_poisson_check(args) -> Outcome:
    p = io.load_poisson(args.input)
    pts = _samples(args, p.dim_M)
    jac = alg.jacobi_residual(p, pts, h=args.h, tol=args.tol)
    ax = alg.check_axioms(alg.poisson_to_algebroid(p, h=args.h), pts, h=args.h, tol=args.tol)
    res = {"poisson": p.to_json(), "jacobi": jac.to_json(), "cotangent_algebroid": ax.to_json()}
    ok = jac.ok and ax.ok
    return Outcome(ok, res, f"Jacobi residual {jac.residual:.3e}, algebroid residual {ax.max_residual:.3e}")


def cmd_dual_poisson(args) -> Outcome:
    a = io.load_algebroid(args.input)
    p = alg.dual_poisson(a)
    rep = alg.jacobi_residual(p, _samples(args, p.dim_M), h=args.h, tol=args.tol)
    res = rep.to_json()
    res["algebroid"] = a.to_json()
    res["coordinates"] = p.source["coordinates"]
    return Outcome(rep.ok, res, f"dual Jacobi residual {rep.residual:.3e} (tol {args.tol:g})")


def cmd_morphism_residual(args) -> Outcome:
    a = io.load_algebroid(args.algebroid)
    obj = io.read_json(args.field)
    if not args.hs:
        rep = alg.morphism_residual(a, io.field_from_json(obj), tol=args.tol)
        return Outcome(rep.ok, rep.to_json(), f"max morphism residual {rep.max_residual:.3e} (tol {args.tol:g})")
    study = alg.refinement_study(a, lambda h: io.field_from_json(obj, h), args.hs, (args.order_min, args.order_max))
    return Outcome(study.ok, study.to_json(), f"fitted order {study.order:.3f} in h")


def cmd_gauge_order(args) -> Outcome:
    a = io.load_algebroid(args.algebroid)
    obj = io.read_json(args.field)
    m = io.field_from_json(obj)
    beta = io.beta_from_json(obj)
    study = alg.gauge_order_study(a, m, beta, args.epsilons, (args.order_min, args.order_max))
    return Outcome(study.ok, study.to_json(), f"fitted order {study.order:.3f} in epsilon")


# -- wiring --------------------------------------------------------------------


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _nonneg_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groupoid-moduli", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_: str, limit: int | None = None) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_)
        p.add_argument("--out", default="report.json", help="report path (default: report.json)")
        p.add_argument("--threads", type=_positive_int, default=None,
                       help=f"worker threads (default: ${THREADS_ENV} or 1)")
        if limit is not None:
            p.add_argument("--limit", type=_positive_int, default=limit, help="enumeration size guard")
        p.set_defaults(func=func)
        return p

    def groupoid(p):
        p.add_argument("--groupoid", required=True, help="groupoid JSON")

    for name, func, help_ in [
        ("validate", cmd_validate, "check the groupoid axioms"),
        ("leaves", cmd_leaves, "list leaves (object orbits)"),
    ]:
        groupoid(add(name, func, help_))
    p = add("isotropy", cmd_isotropy, "isotropy group at an object")
    groupoid(p)
    p.add_argument("--object", type=_nonneg_int, default=0)
    groupoid(add("bisections", cmd_bisections, "enumerate the bisection group", limit=10**6))

    p = add("moduli-closed", cmd_moduli_closed, "holonomy moduli of a closed surface", limit=DEFAULT_REP_LIMIT)
    groupoid(p)
    p.add_argument("--genus", type=_nonneg_int, required=True)
    p = add("moduli-open", cmd_moduli_open, "holonomy moduli with one boundary circle", limit=DEFAULT_REP_LIMIT)
    groupoid(p)
    p.add_argument("--genus", type=_nonneg_int, required=True)
    p.add_argument("--sub", required=True, help="boundary subgroupoid JSON")
    p = add("moduli-interval", cmd_moduli_interval, "interval moduli (double cosets)")
    groupoid(p)
    p.add_argument("--sub0", required=True)
    p.add_argument("--sub1", required=True)

    p = add("lattice-enumerate", cmd_lattice_enumerate, "flat lattice fields and gauge orbits", limit=DEFAULT_LIMIT)
    groupoid(p)
    p.add_argument("--surface", required=True)
    p.add_argument("--sub", help="boundary subgroupoid JSON (bordered surfaces)")
    p.add_argument("--gauge-fixed", action="store_true", help="identities on spanning-tree edges; skips orbits")
    p.add_argument("--list-fields", action="store_true", help="include every field in the report")
    p = add("compare", cmd_compare, "lattice gauge orbits versus holonomy classes", limit=DEFAULT_LIMIT)
    groupoid(p)
    p.add_argument("--surface", required=True)
    p.add_argument("--sub", help="boundary subgroupoid JSON (bordered surfaces)")

    def sampling(p, default_points=100):
        p.add_argument("--points", type=_positive_int, default=default_points, help="random samples in the ball")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--radius", type=_positive_float, default=1.0)
        p.add_argument("--h", type=_positive_float, default=alg.DEFAULT_H, help="finite-difference step")
        p.add_argument("--tol", type=_positive_float, default=alg.DEFAULT_TOL)

    for name, func, help_ in [
        ("algebroid-check", cmd_algebroid_check, "Lie algebroid compatibility residuals"),
        ("poisson-check", cmd_poisson_check, "Jacobi identity and cotangent algebroid of a Poisson tensor"),
        ("dual-poisson", cmd_dual_poisson, "Jacobi identity of the dual Poisson tensor"),
    ]:
        p = add(name, func, help_)
        p.add_argument("--in", dest="input", required=True)
        sampling(p)

    def orders(p):
        p.add_argument("--order-min", type=float, default=1.8)
        p.add_argument("--order-max", type=float, default=2.2)

    p = add("morphism-residual", cmd_morphism_residual, "residuals of the morphism equations on a grid")
    p.add_argument("--algebroid", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--tol", type=_positive_float, default=alg.DEFAULT_TOL)
    p.add_argument("--hs", type=_positive_float, nargs="+", help="run a refinement study over these spacings")
    orders(p)
    p = add("gauge-order", cmd_gauge_order, "order of the infinitesimal gauge defect")
    p.add_argument("--algebroid", required=True)
    p.add_argument("--field", required=True, help="field JSON including 'beta'")
    p.add_argument("--epsilons", type=_positive_float, nargs="+", default=[0.1, 0.05, 0.025, 0.0125])
    orders(p)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is None:
            args.threads = _default_threads()
        outcome = args.func(args)
    except VerificationError as exc:
        outcome = Outcome(False, {"error": str(exc), "report": getattr(exc.report, "to_json", lambda: None)()}, str(exc))
    except (InputError, ExpressionError, SizeLimitError, ValueError, KeyError, TypeError, IndexError,
            GroupoidModuliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, "command": args.command, "config": _config(args), "ok": outcome.ok,
              "result": outcome.result}
    if outcome.leaves is not None:
        report["leaves"] = outcome.leaves
    try:
        io.write_json(args.out, report)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return 2
    print(("PASS " if outcome.ok else "FAIL ") + f"{args.command}: {outcome.summary}")
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(main())
