"""Command-line interface: ``wickbench <subcommand> ...``.

Exit codes: 0 success or verification pass, 1 verification failure,
2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import cocycles, flat_domain, holonomy, rescaling
from .laminations import FiniteLamination, OrbitLamination, load_lamination, materialize
from .models import InvalidInput

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _emit(args, payload, text=None):
    out = text if text is not None else json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    return _jsonable(cfg)


# -- input ----------------------------------------------------------------------


def _source(args):
    """Lamination source: FiniteLamination or OrbitLamination."""
    if getattr(args, "three_cusp", None):
        a1, a2, a3 = args.three_cusp
        return holonomy.three_cusp_build(a1, a2, a3, args.window_radius, args.word_length).orbit
    if getattr(args, "cyclic", False):
        return holonomy.cyclic_test_bed().orbit
    if getattr(args, "static", False) or not getattr(args, "lamination", None):
        return FiniteLamination([])
    return load_lamination(args.lamination)


def _finite(args):
    src = _source(args)
    return materialize(src) if isinstance(src, OrbitLamination) else src


def _orbit(args):
    src = _source(args)
    if not isinstance(src, OrbitLamination):
        raise InvalidInput("this subcommand needs a group: use --three-cusp, --cyclic or a file with a 'group' entry")
    return src


def _ct_dict(c):
    return {"p": c.p, "T": c.T, "N": c.N, "r": c.r, "stratum": list(c.stratum)}


# -- subcommands -------------------------------------------------------------------------


def cmd_build(args):
    lam = _finite(args)
    g = flat_domain.singularity_graph(lam)
    edge_residual = float(np.max(np.abs(g.lengths - lam.weights))) if len(lam) else 0.0
    payload = {
        "config": _config(args),
        "leaf_count": len(lam),
        "total_window_mass": lam.total_mass,
        "singularity_graph": {
            "vertices": len(g.vertices),
            "edges": len(g.edges),
            "edge_lengths": g.lengths,
            "max_degree": int(g.degrees().max()) if len(g.vertices) else 0,
            "is_tree": g.is_tree(),
            "edge_length_residual": edge_residual,
        },
        "validation": "pass",
    }
    _emit(args, payload)
    return EXIT_PASS


def cmd_ct(args):
    lam = _finite(args)
    c = flat_domain.ct_decompose(lam, np.array(args.point, dtype=float))
    _emit(args, {"config": _config(args), "ct": _ct_dict(c)})
    return EXIT_PASS


def cmd_develop(args):
    lam = _finite(args)
    c = flat_domain.ct_decompose(lam, np.array(args.point, dtype=float))
    pt = rescaling._DEVELOP[rescaling.law(args.target).target](lam, c)
    _emit(args, {"config": _config(args), "ct": _ct_dict(c), "model": pt.model, "coords": pt.coords})
    return EXIT_PASS


def cmd_verify(args):
    lam = _finite(args)
    rep = rescaling.verification_report(
        lam, args.target, args.samples, args.seed, args.step, args.tol, args.alpha_scale
    )
    payload = rep.to_dict()
    payload["config"] = _config(args)
    _emit(args, payload)
    return EXIT_PASS if rep.verdict == "pass" else EXIT_FAIL


def cmd_spectrum(args):
    table = holonomy.build_holonomy(_orbit(args))
    e = holonomy.spectrum(table, args.word, args.kappa)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "kappa", "ell", "M", "trace_re", "trace_im"])
    w.writerow(e.csv_row())
    _emit(args, None, buf.getvalue())
    return EXIT_PASS


def cmd_ray_deriv(args):
    table = holonomy.build_holonomy(_orbit(args))
    d_ell, d_m = holonomy.ray_derivative(table, args.word, args.kappa, args.step)
    m0 = holonomy.spectrum(table, args.word, 0).M
    ok = abs(d_ell) <= args.tol and abs(d_m - m0) <= args.tol
    payload = {
        "config": _config(args),
        "d_ell": d_ell,
        "d_M": d_m,
        "margulis": m0,
        "verdict": "pass" if ok else "fail",
    }
    _emit(args, payload)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_mesh(args):
    lam = _finite(args)
    verts, faces = flat_domain.level_surface_mesh(lam, args.level, args.extent, args.n)
    if args.obj:
        flat_domain.write_obj(args.obj, verts, faces)
    if args.csv:
        flat_domain.write_csv(args.csv, verts)
    _emit(args, {"config": _config(args), "vertices": len(verts), "faces": len(faces)})
    return EXIT_PASS


def cmd_three_cusp(args):
    a1, a2, a3 = args.weights
    tc = holonomy.three_cusp_build(a1, a2, a3, args.window_radius, args.word_length)
    table = holonomy.build_holonomy(tc.orbit)
    rows = {}
    ok = max(tc.midpoint_residuals) <= 1e-12
    for name, word in tc.cusp_words.items():
        L, R = table.image(word, "ads")
        target = 2 * np.cosh(tc.expected_masses[name] / 2)
        err = max(abs(abs(np.trace(L)) - target), abs(abs(np.trace(R)) - target))
        ok &= err <= args.tol
        rows[name] = {"word": word, "abs_trace_minus": abs(np.trace(L)), "abs_trace_plus": abs(np.trace(R)), "target": target, "error": err}
    _, residual = holonomy.coboundary_solve(table)
    ok &= residual <= 1e-8
    payload = {
        "config": _config(args),
        "leaf_count": len(materialize(tc.orbit)),
        "cusps": rows,
        "coboundary_residual": residual,
        "midpoint_residuals": list(tc.midpoint_residuals),
        "verdict": "pass" if ok else "fail",
    }
    _emit(args, payload)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_earthquake_failure(args):
    rec = cocycles.earthquake_failure_case(args.n)
    rec["config"] = _config(args)
    _emit(args, rec)
    return EXIT_PASS if rec["verdict"] == "pass" else EXIT_FAIL


# -- parser ----------------------------------------------------------------------------


def _add_source(p):
    p.add_argument("lamination", nargs="?", help="lamination JSON file")
    p.add_argument("--three-cusp", nargs=3, type=float, metavar=("A1", "A2", "A3"))
    p.add_argument("--cyclic", action="store_true", help="cyclic group test bed")
    p.add_argument("--static", action="store_true", help="empty lamination")
    p.add_argument("--word-length", type=int, default=6)
    p.add_argument("--window-radius", type=float, default=2.0)
    p.add_argument("--output", "-o")


def build_parser():
    ap = argparse.ArgumentParser(prog="wickbench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="validate a lamination and summarise its flat domain")
    _add_source(p)
    p.set_defaults(func=cmd_build)

    for name, func, text in (
        ("ct", cmd_ct, "cosmological time decomposition of a point"),
        ("develop", cmd_develop, "image of a point under a developing map"),
    ):
        p = sub.add_parser(name, help=text)
        _add_source(p)
        p.add_argument("--point", nargs=3, type=float, required=True)
        if name == "develop":
            p.add_argument("--target", choices=["hyp", "ds", "ads"], required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="check the rescaling law of a target")
    _add_source(p)
    p.add_argument("--target", choices=["hyp", "ds", "ads"], required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-scale", type=float, default=1.0, help="test hook: multiply the horizontal target")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="length and Margulis-type spectrum of a word, as CSV")
    _add_source(p)
    p.add_argument("--kappa", type=int, choices=[0, 1, -1], required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ray-deriv", help="derivative of the spectrum along the ray t * lambda at t = 0")
    _add_source(p)
    p.add_argument("--kappa", type=int, choices=[0, 1, -1], required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_ray_deriv)

    p = sub.add_parser("mesh", help="export a level surface")
    _add_source(p)
    p.add_argument("--level", type=float, default=1.0)
    p.add_argument("--extent", type=float, default=2.0)
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--obj")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("three-cusp", help="trace and coboundary check on the thrice-punctured sphere")
    p.add_argument("weights", nargs=3, type=float)
    p.add_argument("--word-length", type=int, default=6)
    p.add_argument("--window-radius", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_three_cusp)

    p = sub.add_parser("earthquake-failure", help="translation lengths for accumulating leaves")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_earthquake_failure)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except (InvalidInput, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"wickbench: error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
