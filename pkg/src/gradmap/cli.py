"""Command-line front end.

Every analysis command prints a JSON report: the command echo, a digest of
the representation, the tolerances in effect, results, certificates and
the outcome of each verification hook. Exit codes: 0 success, 1 input
error, 2 failed verification, 3 exhausted search budget.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import gallery as _gallery
from .errors import GradmapError, MaxIterations
from .flows import invert_moment, norm_square_flow, orbit_min_norm
from .io import digest, dumps, load_rep, parse_vector, rep_document
from .repmodel import build_representation, gradient_map_abelian, gradient_map_projective
from .stability import (LAMBDA_TOL, SPHERE_SEEDS, SPHERE_STEPS, TOL_SUPP,
                        classify_point_linear, classify_point_projective,
                        face_orbit_table, hm_witness, khull_sample,
                        null_cone_decomposition, support_of)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _face_dict(face):
    return {"J": list(face.J), "witness_u": face.witness_u, "support_value": face.support_value,
            "dim": face.dim}


def _support_dict(S):
    return {"I": list(S.I), "coords": S.coords, "min_kept": S.min_kept, "max_dropped": S.max_dropped}


def _analysis_dict(A):
    cert = {}
    for k, v in A.certificate.items():
        if k == "face":
            cert[k] = _face_dict(v)
        elif k == "newton":
            cert[k] = {"xi": v.xi, "iterations": v.iterations, "residual": v.residual,
                       "converged": v.converged}
        elif k == "reductive_search":
            cert[k] = {"found": v.found, "route": v.route, "best_lambda": v.best_lam,
                       "seeds_used": v.seeds_used}
        else:
            cert[k] = v
    out = {"class": A.cls, "variant": A.variant, "support": _support_dict(A.support),
           "stabilizer_dim": A.stabilizer_dim}
    if A.in_null_cone is not None:
        out["in_null_cone"] = A.in_null_cone
    return out, cert


class Reporter:
    def __init__(self, argv, args):
        self.argv = argv
        self.args = args
        self.report = {"command": self._echo(argv, args)}
        self.hooks = {}

    @staticmethod
    def _echo(argv, args):
        # the rep path is replaced by the digest so reports do not depend on file location
        rep = getattr(args, "rep", None)
        return ["<rep>" if rep is not None and a == rep else a for a in argv]

    def hook(self, name, ok):
        self.hooks[name] = bool(ok)

    def emit(self, out):
        self.report["verification"] = self.hooks
        text = dumps(self.report) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _load(args):
    spec = load_rep(args.rep, getattr(args, "arithmetic", None))
    return spec, build_representation(spec)


def _point(R, text):
    x = parse_vector(text)
    if x.shape != (R.n,):
        raise InputError(f"point has {x.size} coordinates, representation dimension is {R.n}")
    return x


def cmd_diag(args, rep):
    spec, R = _load(args)
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"commutator": 1e-9, "cluster": 1e-9, "jacobi": 1e-12}
    res = {"dimension": R.n, "rank": R.rank, "arithmetic": spec.arithmetic,
           "weights": R.weight_rows(), "basis": R.W.basis.T, "a_gram": R.a_gram}
    if R.has_p:
        res["p_gram"] = R.p_gram
        res["inclusion"] = R.inclusion
    rep.report["results"] = res
    resid = max(float(np.max(np.abs(E @ R.W.basis - R.W.basis * R.weights[:, a])))
                for a, E in enumerate(spec.abelian_gens))
    rep.hook("eigenbasis_residual", resid <= 1e-8)
    return EXIT_OK


def cmd_analyze(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"support": args.tol_supp}
    S = support_of(R, x, args.tol_supp)
    rows = face_orbit_table(R, x, projective=args.projective, tol_supp=args.tol_supp)
    gens = R.weight_rows(S.I)
    rep.report["results"] = {
        "support": _support_dict(S),
        "projective": args.projective,
        "generators": gens,
        "faces": [{"face": _face_dict(r.face), "v_F": r.v_F, "mu": r.mu, "relint_ok": r.relint_ok}
                  for r in rows],
    }
    rep.hook("faces_relint", all(r.relint_ok for r in rows))
    return EXIT_OK


def cmd_classify(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    rep.report["input_digest"] = digest(spec)
    tol = {"support": args.tol_supp, "lambda": LAMBDA_TOL}
    if args.projective:
        if args.reductive:
            tol.update({"seeds": args.seeds, "steps": args.steps, "seed": args.seed})
        A = classify_point_projective(R, x, args.tol_supp, reductive=args.reductive,
                                      seeds=args.seeds, steps=args.steps, seed=args.seed)
    else:
        if args.reductive:
            raise InputError("--reductive requires --projective")
        A = classify_point_linear(R, x, args.tol_supp)
    rep.report["tolerances"] = tol
    res, cert = _analysis_dict(A)
    rep.report["results"] = res
    rep.report["certificates"] = cert
    rep.hook("certificate", A.verified)
    if not A.verified:
        return EXIT_VERIFY
    search = A.certificate.get("reductive_search")
    if search is not None and not search.found:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_nullcone(args, rep):
    spec, R = _load(args)
    rep.report["input_digest"] = digest(spec)
    dec = null_cone_decomposition(R)
    comps = []
    ok = True
    for c in dec.components:
        comps.append({"xi": c.xi, "Z": list(c.Z), "H": c.H.T})
        ok &= bool(np.all(R.weights[list(c.Z)] @ c.xi < 0))
    rep.report["results"] = {"components": comps}
    rep.hook("separating", ok)
    return EXIT_OK


def cmd_witness(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"support": args.tol_supp, "t": 40.0, "limit": 1e-6}
    if args.target == "zero":
        target = "zero"
    elif args.target.startswith("face:"):
        try:
            target = int(args.target[5:])
        except ValueError:
            raise InputError(f"bad face id in {args.target!r}") from None
    else:
        raise InputError("target must be zero or face:<id>")
    w = hm_witness(R, x, target, args.tol_supp)
    rep.report["results"] = {"a": w.a, "xi": w.xi, "limit": w.limit, "numeric_limit": w.numeric_limit,
                             "error": w.error,
                             "face": _face_dict(w.face) if w.face is not None else None}
    rep.hook("limit", w.ok)
    return EXIT_OK if w.ok else EXIT_VERIFY


def cmd_invert(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    c = parse_vector(args.target)
    if c.shape != (R.rank,):
        raise InputError(f"target has {c.size} coordinates, a has dimension {R.rank}")
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"residual": args.tol, "armijo_c1": 1e-4, "backtrack": 0.5,
                                "hessian_reg": 1e-12}
    variant = "projective" if args.projective else "linear"
    try:
        res = invert_moment(R, x, c, tol=args.tol, variant=variant, max_iter=args.max_iter)
        status = EXIT_OK
    except MaxIterations as exc:
        res = exc.best
        status = EXIT_VERIFY
    mu = gradient_map_projective(R, res.point) if args.projective else gradient_map_abelian(R, res.point)
    rep.report["results"] = {"xi": res.xi, "iterations": res.iterations, "residual": res.residual,
                             "converged": res.converged, "point": res.point, "mu": mu}
    rep.hook("residual", res.converged)
    return status


def cmd_flow(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"dt": args.dt, "t_max": args.t_max, "stop_tol": args.stop_tol,
                                "adaptive": not args.fixed_step, "monotone_slack": 1e-12,
                                "lift": 1e-6}
    tr = norm_square_flow(R, x, dt=args.dt, t_max=args.t_max, stop_tol=args.stop_tol,
                          use_p=False if args.abelian else None, adaptive=not args.fixed_step)
    rep.report["results"] = {
        "mode": tr.mode, "steps": len(tr.times) - 1, "t_end": tr.times[-1],
        "converged": tr.converged, "stationary": tr.stationary, "limit": tr.limit.x,
        "limit_mu_norm": tr.limit_mu_norm, "f_final": tr.f_values[-1],
        "grad_norm_final": tr.grad_norms[-1], "decay_estimate": tr.decay_estimate,
        "lift_error": tr.lift_error, "halvings": tr.halvings,
    }
    if args.trace_out:
        with open(args.trace_out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "f", "grad_norm"] + [f"x{i}" for i in range(R.n)])
            for t, f, g, p in zip(tr.times, tr.f_values, tr.grad_norms, tr.points):
                w.writerow([format(t, ".17g"), format(f, ".17g"), format(g, ".17g")]
                           + [format(v, ".17g") for v in p])
        rep.report["results"]["trace_file"] = args.trace_out
    mono = tr.max_f_increase <= 1e-12
    lift = tr.lift_error <= 1e-6
    rep.hook("monotone", mono)
    rep.hook("lift", lift)
    return EXIT_OK if mono and lift else EXIT_VERIFY


def cmd_minnorm(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"discrepancy": args.tol, "stop_tol": 1e-10}
    m = orbit_min_norm(R, x, tol=args.tol)
    rep.report["results"] = {"support": list(m.support), "polytope_value": m.polytope_value,
                             "polytope_point": m.polytope_point, "flow_value": m.flow_value,
                             "flow_limit": m.flow_limit.x, "discrepancy": m.discrepancy}
    rep.hook("dual_method", m.ok)
    return EXIT_OK if m.ok else EXIT_VERIFY


def cmd_khull(args, rep):
    spec, R = _load(args)
    x = _point(R, args.point)
    rep.report["input_digest"] = digest(spec)
    rep.report["tolerances"] = {"containment": 1e-8, "samples": args.samples, "seed": args.seed,
                                "a_scale": args.a_scale}
    k = khull_sample(R, x, args.samples, seed=args.seed, a_scale=args.a_scale)
    rep.report["results"] = {"max_norm": k.max_norm, "min_norm": k.min_norm,
                             "hull_measure": k.hull_measure, "projection_min": k.proj_min,
                             "projection_max": k.proj_max, "violation": k.violation}
    if args.cloud_out:
        with open(args.cloud_out, "w", newline="") as fh:
            w = csv.writer(fh)
            m = k.samples.shape[1]
            w.writerow([f"mu_p{b}" for b in range(m)] + [f"pi_a{a}" for a in range(R.rank)])
            for s, p in zip(k.samples, k.projections):
                w.writerow([format(v, ".17g") for v in s] + [format(v, ".17g") for v in p])
        rep.report["results"]["cloud_file"] = args.cloud_out
    rep.hook("containment", k.ok)
    return EXIT_OK if k.ok else EXIT_VERIFY


def cmd_gallery(args, rep):
    if args.action == "list":
        rep.report["results"] = [{"name": n, "param": p, "description": d} for n, p, d in _gallery.listing()]
        return EXIT_OK
    if not args.name:
        raise InputError("gallery emit needs a name")
    params = args.params[0] if args.params else None
    spec = _gallery.build(args.name, params)
    doc = rep_document(spec)
    text = dumps(doc) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return None


def build_parser():
    p = argparse.ArgumentParser(prog="gradmap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def rep_cmd(name, help_, point=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("rep", help="rep-file path or gallery:name[:param]")
        if point:
            sp.add_argument("--point", required=True, help="comma-separated coordinates")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--arithmetic", choices=("float", "exact"))
        return sp

    rep_cmd("diag", "weights and eigenbasis", point=False)
    sp = rep_cmd("analyze", "support, image cone or polytope, face table")
    sp.add_argument("--projective", action="store_true")
    sp.add_argument("--tol-supp", type=float, default=TOL_SUPP)
    sp = rep_cmd("classify", "stability class with certificate")
    sp.add_argument("--projective", action="store_true")
    sp.add_argument("--reductive", action="store_true", help="search p for destabilizing directions")
    sp.add_argument("--seeds", type=int, default=SPHERE_SEEDS)
    sp.add_argument("--steps", type=int, default=SPHERE_STEPS)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol-supp", type=float, default=TOL_SUPP)
    rep_cmd("nullcone", "null cone as a union of coordinate subspaces", point=False)
    sp = rep_cmd("witness", "one-parameter subgroup reaching a boundary orbit")
    sp.add_argument("--target", required=True, help="zero or face:<id>")
    sp.add_argument("--tol-supp", type=float, default=TOL_SUPP)
    sp = rep_cmd("invert", "torus element with prescribed gradient-map value")
    sp.add_argument("--target", required=True)
    sp.add_argument("--projective", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=100)
    sp = rep_cmd("flow", "norm-square gradient flow")
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--t-max", type=float, default=200.0)
    sp.add_argument("--stop-tol", type=float, default=1e-10)
    sp.add_argument("--fixed-step", action="store_true")
    sp.add_argument("--abelian", action="store_true", help="flow of the torus gradient map only")
    sp.add_argument("--trace-out", help="CSV file for the trace")
    sp = rep_cmd("minnorm", "minimal gradient-map norm over the torus orbit closure")
    sp.add_argument("--projective", action="store_true", help="accepted for symmetry; always projective")
    sp.add_argument("--tol", type=float, default=1e-4)
    sp = rep_cmd("khull", "sample the gradient-map image of K A x")
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--a-scale", type=float, default=1.0)
    sp.add_argument("--cloud-out", help="CSV file for the sample cloud")
    sp = sub.add_parser("gallery", help="built-in representations")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("name", nargs="?")
    sp.add_argument("params", nargs="*")
    sp.add_argument("--out")
    return p


COMMANDS = {
    "diag": cmd_diag, "analyze": cmd_analyze, "classify": cmd_classify, "nullcone": cmd_nullcone,
    "witness": cmd_witness, "invert": cmd_invert, "flow": cmd_flow, "minnorm": cmd_minnorm,
    "khull": cmd_khull, "gallery": cmd_gallery,
}


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    rep = Reporter(argv, args)
    try:
        code = COMMANDS[args.command](args, rep)
    except (GradmapError, InputError, OSError, ValueError) as exc:
        sys.stderr.write(f"gradmap: error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    if code is not None:
        rep.emit(getattr(args, "out", None))
        return code
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
