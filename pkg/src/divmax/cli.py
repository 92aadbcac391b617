"""Batch command-line front end and machine-readable reporting."""

import argparse
import csv
import io
import json
import sys

import numpy as np

from .critical import SearchOptions, global_search, verify_quasi_critical
from .divergence import ConvergenceError, ri_project
from .model import (
    InvalidModelError,
    StructuralError,
    dim_family,
    kernel_basis,
    load_model,
)
from .objective import (
    DegenerateKernelPoint,
    decompose,
    lemma_identities,
    optimal_mixture,
)
from .projection import verify_parallel_hyperplanes, verify_projection_property
from .signvectors import (
    CapExceeded,
    circuits,
    enumerate_sign_vectors,
    filter_support_bound,
    filter_var0,
)

EXIT_OK = 0
EXIT_INVALID_MODEL = 2
EXIT_STRUCTURAL = 3
EXIT_CAP = 4
EXIT_NONCONVERGENCE = 5

SCHEMA = 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _candidate_dict(cand):
    out = {
        "sigma": cand.sigma,
        "u": _jsonable(cand.u),
        "dbar": _jsonable(cand.dbar),
        "divergence_pair": _jsonable(cand.divergence_pair),
        "divergence_projected": _jsonable(cand.divergence_projected),
        "mu": _jsonable(cand.mu),
        "p_plus": _jsonable(cand.p_plus),
        "p_minus": _jsonable(cand.p_minus),
        "p_e": _jsonable(cand.p_e),
        "verified": _jsonable(cand.verified),
        "residuals": _jsonable(cand.residuals),
    }
    if cand.alpha is not None:
        out["alpha"] = _jsonable(cand.alpha)
        out["mu"] = _jsonable(cand.mu)
    return out


def _vec_cell(v):
    if v is None:
        return ""
    return ";".join(repr(float(x)) for x in v)


def _report_csv(report):
    buf = io.StringIO()
    for key in sorted(report):
        if key == "candidates":
            continue
        val = report[key]
        if isinstance(val, dict):
            for sub in sorted(val):
                buf.write(f"# {key}.{sub}={val[sub]}\n")
        else:
            buf.write(f"# {key}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    cols = [
        "rank", "sigma", "dbar", "divergence_pair", "divergence_projected",
        "mu", "var0", "var1", "phat_is_projection", "residual_var0",
        "residual_var1", "residual_phat", "residual_projection_moment",
        "u", "p_plus", "p_minus", "p_e", "alpha",
    ]
    writer.writerow(cols)
    for rank, cand in enumerate(report.get("candidates", [])):
        res = cand["residuals"]
        ver = cand["verified"]
        writer.writerow(
            [
                rank,
                cand["sigma"],
                repr(cand["dbar"]),
                repr(cand["divergence_pair"]),
                "" if cand["divergence_projected"] is None else repr(cand["divergence_projected"]),
                repr(cand["mu"]),
                ver["var0"],
                ver["var1"],
                ver["phat_is_projection"],
                repr(res["var0"]),
                repr(res["var1"]),
                "" if res["phat"] is None else repr(res["phat"]),
                "" if res["projection_moment"] is None else repr(res["projection_moment"]),
                _vec_cell(cand["u"]),
                _vec_cell(cand["p_plus"]),
                _vec_cell(cand["p_minus"]),
                _vec_cell(cand["p_e"]),
                _vec_cell(cand.get("alpha")),
            ]
        )
    return buf.getvalue()


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_or_fail(path):
    try:
        return load_model(path), EXIT_OK
    except StructuralError as exc:
        print(f"structural validation failure: {exc}", file=sys.stderr)
        return None, EXIT_STRUCTURAL
    except InvalidModelError as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return None, EXIT_INVALID_MODEL


def cmd_validate(args):
    model, code = _load_or_fail(args.model)
    if model is None:
        return code
    basis = kernel_basis(model)
    print(f"ok: {model.name}")
    print(f"  states: {model.n_states}")
    print(f"  statistic rows: {model.h} (rank {basis.rank_a})")
    print(f"  family dimension: {dim_family(model)}")
    print(f"  kernel dimension: {basis.dim}")
    print(f"  symmetry generators: {len(model.symmetry_generators)}")
    return EXIT_OK


def cmd_maximize(args):
    model, code = _load_or_fail(args.model)
    if model is None:
        return code
    filters = tuple(f for f in args.filters.split(",") if f)
    for f in filters:
        if f not in ("var0", "bound"):
            print(f"unknown filter {f!r}", file=sys.stderr)
            return EXIT_INVALID_MODEL
    options = SearchOptions(
        method=args.method,
        starts=args.starts,
        tol=args.tol,
        seed=args.seed,
        threads=args.threads,
        max_signvectors=args.max_signvectors,
        filters=filters,
        mode=args.mode,
    )
    report = {
        "schema": SCHEMA,
        "model_name": model.name,
        "config": {
            "method": args.method,
            "starts": args.starts,
            "tol": args.tol,
            "threads": args.threads,
            "seed": args.seed,
            "max_signvectors": args.max_signvectors,
            "filters": list(filters),
            "mode": args.mode,
            "format": args.format,
        },
    }
    stats = {}
    code = EXIT_OK
    try:
        candidates = global_search(model, options, stats=stats)
        report["candidates"] = [_candidate_dict(c) for c in candidates]
    except CapExceeded as exc:
        report["candidates"] = []
        report["error"] = str(exc)
        code = EXIT_CAP
    except ConvergenceError as exc:
        report["candidates"] = []
        report["error"] = str(exc)
        code = EXIT_NONCONVERGENCE
    timing = stats.pop("timing", {})
    report["stage_stats"] = _jsonable(stats)
    report["timing"] = _jsonable(timing) if args.timing else None
    if args.format == "csv":
        text = _report_csv(report)
    else:
        text = json.dumps(_jsonable(report), sort_keys=True, indent=1) + "\n"
    _emit(text, args.out)
    return code


def cmd_signvectors(args):
    model, code = _load_or_fail(args.model)
    if model is None:
        return code
    basis = kernel_basis(model)
    report = {
        "schema": SCHEMA,
        "model_name": model.name,
        "config": {
            "mode": args.mode,
            "max_signvectors": args.max_signvectors,
            "allow_long": args.allow_long,
            "list": args.list,
        },
    }
    code = EXIT_OK
    circs = circuits(model, basis)
    stage = {"circuits": len(circs), "dim_kernel": basis.dim}
    try:
        classes = enumerate_sign_vectors(
            model,
            circs,
            mode=args.mode,
            cap=args.max_signvectors,
            allow_long=args.allow_long,
        )
        stage["sign_vector_classes"] = len(classes)
        post_var0 = [s for s in classes if filter_var0(model, basis, s)]
        stage["post_var0"] = len(post_var0)
        stage["post_bound"] = len([s for s in post_var0 if filter_support_bound(model, s)])
        if args.list:
            report["classes"] = [str(s) for s in classes]
    except CapExceeded as exc:
        stage["sign_vector_classes"] = exc.count
        report["error"] = str(exc)
        if args.list:
            report["classes"] = [str(s) for s in exc.partial]
        code = EXIT_CAP
    except ValueError as exc:
        report["error"] = str(exc)
        code = EXIT_CAP
    report["stage_stats"] = stage
    _emit(json.dumps(_jsonable(report), sort_keys=True, indent=1) + "\n", args.out)
    return code


def _point_from_file(model, path):
    """Returns (kind, kernel decomposition, distribution to test)."""
    with open(path) as fh:
        data = json.load(fh)
    if ("u" in data) == ("p" in data):
        raise InvalidModelError(f"point file {path} must hold exactly one of 'u' or 'p'")
    if "u" in data:
        u = np.asarray(data["u"], dtype=float)
        if u.shape != (model.n_states,):
            raise InvalidModelError("kernel point length does not match the model")
        point = decompose(model, u / max(0.5 * np.abs(u).sum(), 1e-300))
        return "kernel point", point, point.p_plus
    p = np.asarray(data["p"], dtype=float)
    if p.shape != (model.n_states,):
        raise InvalidModelError("distribution length does not match the model")
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidModelError("distribution must be nonnegative and sum to 1")
    p = np.clip(p, 0.0, None)
    # the fiber direction p - p_E is a kernel vector; for a maximizing pair
    # it is a positive multiple of p_plus - p_minus
    proj = ri_project(model, p)
    u = p - proj.p_e
    degree = 0.5 * np.abs(u).sum()
    if degree < 1e-12:
        raise DegenerateKernelPoint("distribution already lies in the family closure")
    return "distribution", decompose(model, u / degree), p


def cmd_verify(args):
    model, code = _load_or_fail(args.model)
    if model is None:
        return code
    try:
        kind, point, p_ref = _point_from_file(model, args.point)
    except DegenerateKernelPoint as exc:
        print(f"degenerate point: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except (InvalidModelError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid point file: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except ConvergenceError as exc:
        print(f"projection did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE

    basis = kernel_basis(model)
    rows = []
    try:
        prop = verify_projection_property(model, p_ref)
    except ConvergenceError as exc:
        print(f"projection did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    rows.append(("projection_property", prop["ok"], prop["deviation"]))
    check = verify_quasi_critical(model, basis, point.u)
    rows.append(
        (
            "quasi_critical",
            check["var0"] and check["var1"],
            max(check["var0_residual"], check["var1_residual"]),
        )
    )
    lemma = lemma_identities(model, point)
    rows.append(("lemma_identities", max(lemma) <= 1e-8, max(lemma)))
    mix = optimal_mixture(model, point)
    flat = verify_parallel_hyperplanes(model, mix.p_hat)
    rows.append(("parallel_hyperplanes", flat, None))

    print(f"model: {model.name}")
    print(f"point: {args.point} ({kind})")
    print(f"{'check':24}{'status':8}residual")
    failures = 0
    for name, ok, residual in rows:
        failures += 0 if ok else 1
        shown = "-" if residual is None else f"{residual:.3e}"
        print(f"{name:24}{'pass' if ok else 'FAIL':8}{shown}")
    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all checks passed")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="divmax",
        description="Maximizers of information divergence from an exponential family.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load and validate a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("maximize", help="run the full search pipeline")
    p.add_argument("model")
    p.add_argument("--method", choices=("orthant", "projection", "auto"), default="auto")
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-signvectors", type=int, default=20000)
    p.add_argument("--filters", default="var0,bound")
    p.add_argument("--mode", choices=("closure", "scan"), default="closure")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("verify", help="check a candidate point against the model")
    p.add_argument("model")
    p.add_argument("point", help="JSON file holding {'u': [...]} or {'p': [...]}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("signvectors", help="enumerate sign-vector classes")
    p.add_argument("model")
    p.add_argument("--mode", choices=("closure", "scan"), default="closure")
    p.add_argument("--max-signvectors", type=int, default=1_000_000)
    p.add_argument("--allow-long", action="store_true")
    p.add_argument("--list", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_signvectors)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
