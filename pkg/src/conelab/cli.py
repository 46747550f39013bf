"""Command-line front end.

Subcommands: spectrum, indicial, check-cone, glue, catalog, artin-check,
mesh-gen.  Reports are JSON (canonical, deterministic for fixed inputs, seed
and version); CSV is a lossy projection.  Exit codes: 0 all PASS, 2 any FAIL
verdict, 1 errors.  CONELAB_THREADS caps the worker pool for batch jobs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import artin, catalog, cone, dec, generators, kahler, mesh

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def _write_report(doc: dict, path: str | None) -> None:
    doc = {"conelab_version": __version__, **doc}
    if path and path.endswith(".csv"):
        # lossy spreadsheet projection; JSON is the canonical format
        text = doc.get("csv", "")
    else:
        text = json.dumps(doc, indent=1, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _pool_size() -> int:
    env = os.environ.get("CONELAB_THREADS", "")
    if env.isdigit() and int(env) > 0:
        return int(env)
    return min(4, os.cpu_count() or 1)


def cmd_spectrum(args) -> int:
    cx = mesh.load_mesh(args.mesh)
    h = dec.build_hodge(cx, star=args.star)
    pencil = dec.laplacian(h, args.degree)
    slice_ = dec.eigensolve(pencil, args.modes, tol=args.tol)
    nz = dec.count_near_zero(slice_)
    doc = {"config": _config_dict(args), **dec.spectrum_report(slice_, nz)}
    _write_report(doc, args.out)
    return EXIT_PASS


def cmd_indicial(args) -> int:
    cx = mesh.load_mesh(args.mesh)
    h = dec.build_hodge(cx, star=args.star)
    g = cone.ConeGeometry(args.cone_dim, h)
    degrees = args.degree if args.degree else list(range(args.cone_dim))
    pool = _pool_size()

    def run(p: int) -> cone.ConeReport:
        return cone.indicial_analysis(g, p, args.modes, tol=args.tol)

    if len(degrees) > 1 and pool > 1:
        with ThreadPoolExecutor(max_workers=pool) as ex:
            reports = list(ex.map(run, degrees))
    else:
        reports = [run(p) for p in degrees]

    failed = False
    docs = []
    for rep in reports:
        verdict = cone.nolog_verdict(rep, gap_tol=args.gap_tol)
        doc = rep.to_json()
        doc["no_log_verdict"] = {
            "passed": verdict.passed, "gap": verdict.gap,
            "boundary_flagged": verdict.boundary_flagged,
            "claim": verdict.claim, "detail": verdict.detail,
        }
        failed |= not verdict.passed
        failed |= any(w.passed is False for w in rep.window_verdicts)
        docs.append(doc)
    out_doc = {"config": _config_dict(args), "reports": docs}
    if args.csv or (args.out or "").endswith(".csv"):
        out_doc["csv"] = "".join(r.to_csv() for r in reports)
    _write_report(out_doc, args.out)
    return EXIT_FAIL if failed else EXIT_PASS


def cmd_check_cone(args) -> int:
    reg = catalog.Registry(args.registry)
    rec = reg.get(args.record)
    verdict = catalog.link_betti_hypothesis(rec)
    flag = catalog.local_cohomology_flag_for(rec)
    doc = {
        "config": _config_dict(args),
        "record": rec.to_json(),
        "betti_hypothesis": {
            "holds": verdict.holds, "holds_via": verdict.holds_via,
            "b_nm2": verdict.b_nm2, "b_nm1": verdict.b_nm1,
            "claim": "link-betti-vanishing",
        },
        "local_cohomology_flag": {
            "status": flag.status, "reason": flag.reason, "evidence": flag.evidence,
        },
    }
    _write_report(doc, args.out)
    return EXIT_PASS if verdict.holds else EXIT_FAIL


def cmd_glue(args) -> int:
    lambdas = tuple(float(x) for x in args.weights.split(","))
    with open(args.potential) as fh:
        pot_doc = json.load(fh)
    pot = kahler.PolyPotential(len(lambdas), pot_doc["terms"] if "terms" in pot_doc else pot_doc)
    prob = kahler.GluingProblem(
        weights=kahler.WeightData(lambdas), potential=pot, seed=args.seed
    )
    try:
        result = kahler.glue_potential(prob, n_verify=args.samples)
    except kahler.GluingError as exc:
        _write_report({"config": _config_dict(args), "error": str(exc),
                       "diagnostics": exc.diagnostics}, args.out)
        return EXIT_FAIL
    _write_report({"config": _config_dict(args), **result.to_json()}, args.out)
    return EXIT_PASS if result.all_pass else EXIT_FAIL


def cmd_catalog(args) -> int:
    reg = catalog.Registry(args.registry)
    if args.action == "list":
        doc = {"records": sorted(reg.records)}
        _write_report(doc, args.out)
        return EXIT_PASS
    rec = reg.get(args.name)
    if args.action == "show":
        _write_report({"record": rec.to_json()}, args.out)
        return EXIT_PASS
    # check
    alpha = None
    level = None
    try:
        alpha = rec.minimal_exponent()
        level = catalog.du_bois_level(alpha)
    except catalog.CatalogError:
        pass
    verdict = catalog.link_betti_hypothesis(rec)
    flag = catalog.local_cohomology_flag_for(rec)
    doc = {
        "record": rec.to_json(),
        "minimal_exponent": str(alpha) if alpha is not None else None,
        "du_bois_level": level,
        "betti_hypothesis": {"holds": verdict.holds, "holds_via": verdict.holds_via},
        "local_cohomology_flag": flag.status,
    }
    _write_report(doc, args.out)
    return EXIT_PASS if verdict.holds else EXIT_FAIL


def cmd_artin_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = []
    for trial in range(args.trials):
        k = int(rng.integers(1, args.k + 1))
        r = int(rng.integers(1, args.rank + 1))
        M = artin.FiniteModule(k, artin.random_nilpotent(rng, r, k))
        verdict = artin.reflexivity_check(M)
        if not verdict.reflexive:
            failures.append({"trial": trial, "k": k, "rank": r, "detail": verdict.detail})
    doc = {
        "config": _config_dict(args),
        "trials": args.trials,
        "failures": failures,
        "claim": "module-reflexivity",
    }
    _write_report(doc, args.out)
    return EXIT_FAIL if failures else EXIT_PASS


def cmd_mesh_gen(args) -> int:
    kw = {}
    if args.n is not None:
        kw["n"] = args.n
    if args.subdivisions is not None:
        kw["subdivisions"] = args.subdivisions
    cx = generators.catalog_mesh(args.preset, **kw)
    mesh.save_mesh(cx, args.out)
    b = mesh.betti(cx)
    print(json.dumps({
        "preset": args.preset, "out": args.out, "dim": cx.dim,
        "face_counts": cx.face_counts(), "betti": list(b),
    }, sort_keys=True))
    return EXIT_PASS


def _config_dict(args) -> dict:
    skip = {"func", "out"}  # the output path is not an input
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conelab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="link Hodge-Laplacian spectrum")
    sp.add_argument("--mesh", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--modes", type=int, default=10)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--star", default="whitney", choices=["whitney", "lumped"])
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spectrum)

    ip = sub.add_parser("indicial", help="indicial roots and exceptional orders")
    ip.add_argument("--mesh", required=True)
    ip.add_argument("--cone-dim", type=int, required=True, dest="cone_dim")
    ip.add_argument("--degree", type=int, action="append")
    ip.add_argument("--modes", type=int, default=24)
    ip.add_argument("--tol", type=float, default=1e-8)
    ip.add_argument("--gap-tol", type=float, default=0.1, dest="gap_tol")
    ip.add_argument("--star", default="whitney", choices=["whitney", "lumped"])
    ip.add_argument("--csv", action="store_true")
    ip.add_argument("--out")
    ip.set_defaults(func=cmd_indicial)

    cc = sub.add_parser("check-cone", help="theorem-hypothesis verdicts for a record")
    cc.add_argument("--record", required=True)
    cc.add_argument("--registry")
    cc.add_argument("--out")
    cc.set_defaults(func=cmd_check_cone)

    gl = sub.add_parser("glue", help="Kahler potential gluing")
    gl.add_argument("--weights", required=True, help="comma-separated weights in (0,1)")
    gl.add_argument("--potential", required=True, help="monomial-dictionary JSON file")
    gl.add_argument("--samples", type=int, default=10_000)
    gl.add_argument("--seed", type=int, default=7)
    gl.add_argument("--out")
    gl.set_defaults(func=cmd_glue)

    ct = sub.add_parser("catalog", help="singularity records")
    ct.add_argument("action", choices=["list", "show", "check"])
    ct.add_argument("--name")
    ct.add_argument("--registry")
    ct.add_argument("--out")
    ct.set_defaults(func=cmd_catalog)

    ac = sub.add_parser("artin-check", help="random module reflexivity suite")
    ac.add_argument("--k", type=int, default=4)
    ac.add_argument("--rank", type=int, default=8)
    ac.add_argument("--trials", type=int, default=500)
    ac.add_argument("--seed", type=int, default=7)
    ac.add_argument("--out")
    ac.set_defaults(func=cmd_artin_check)

    mg = sub.add_parser("mesh-gen", help="write a catalog mesh as JSON")
    mg.add_argument("--preset", required=True,
                    choices=["t3", "t2", "s2", "s3", "s5", "s2xs1", "t2-minimal"])
    mg.add_argument("--n", type=int)
    mg.add_argument("--subdivisions", type=int)
    mg.add_argument("--out", required=True)
    mg.set_defaults(func=cmd_mesh_gen)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (mesh.MeshError, dec.HodgeError, cone.ConeError, kahler.KahlerError,
            catalog.CatalogError, artin.ArtinError, OSError, json.JSONDecodeError) as exc:
        print(f"conelab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
