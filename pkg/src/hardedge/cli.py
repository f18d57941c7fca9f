"""Command line entry point: ``python -m hardedge <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import acceptance, fp, lax, limits, mc
from . import painleve3 as p3
from .errors import HardEdgeError


def _write_csv(path, header, rows):
    out = open(path, "w", newline="\n") if path else sys.stdout
    try:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(f"{float(v):.17g}" for v in row) + "\n")
    finally:
        if path:
            out.close()


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_piii_solve(args):
    params = p3.PIIIParams(args.family, args.a)
    ts = np.linspace(args.t0, args.t1, args.points)
    traj = p3.solve_coupled(params, args.t0, args.q0, args.y0, args.t1, phi0=args.phi0, s_eval=ts)

    def rhs(t, v):
        return np.array(p3.coupled_rhs(params, p3.CoupledState(t, v[0], v[1])))

    rows = []
    for t in ts:
        q, y, phi = traj(t)
        dq, dy = rhs(t, np.array([q, y]))
        ypp = p3.tangent_second_derivative(rhs, t, [q, y])[1]
        res = ypp - p3.piii_rhs(params, t, y, dy)
        rows.append((t, q, y, phi, dq, dy, p3.h_aux(params, t, q, y), res))
    _write_csv(args.out, ["t", "q", "y", "phi", "dq", "dy", "h", "piii_residual"], rows)
    if args.out:
        _print_json({"max_piii_residual": max(abs(r[-1]) for r in rows), "points": len(rows)})
    return 0


def cmd_tw_solve(args):
    ts = np.linspace(args.t0, args.t1, args.points)
    traj = p3.solve_tw(args.a, args.t0, args.q0, args.qp0, args.t1, s_plus0=args.s_plus0, s_eval=ts)
    rows = []
    for t in ts:
        q, qp, sp, sm = traj(t)
        rows.append((t, q, qp, sp, sm, p3.h0_eval(args.a, t, q, qp), sp * sm - (1 - q * q)))
    _write_csv(args.out, ["t", "q", "qp", "S_plus", "S_minus", "h0", "product_defect"], rows)
    if args.out:
        _print_json({"max_product_defect": max(abs(r[-1]) for r in rows), "points": len(rows)})
    return 0


def _pair_assembly(args):
    pair = args.pair
    if pair == "thm3":
        kappa = 1.0 if args.kappa is None else args.kappa
        asm = lax.assemble_thm3(kappa, lambda t: 2 + math.sin(t), math.exp, math.cos, math.exp)
        a = 2 - kappa if args.a is None else args.a
        return asm, kappa, a, (0.5, 2.0)
    if pair in ("thm4", "thm5"):
        thm4, thm5, _ = acceptance.soft_assemblies()
        kappa = (1.0 if pair == "thm4" else 2.0) if args.kappa is None else args.kappa
        return (thm4 if pair == "thm4" else thm5), kappa, None, (-2.0, 2.0)
    a = acceptance.BETA2_A if args.a is None else args.a
    if pair in ("thm1a", "thm1b"):
        fam = "A" if pair == "thm1a" else "B"
        q0, y0 = acceptance.BETA2_SEEDS[fam]
        traj = p3.solve_coupled(p3.PIIIParams(fam, a), 0.5, q0, y0, 2.0)
        make = lax.assemble_thm1a if fam == "A" else lax.assemble_thm1b
        return make(a, traj), (1.0 if args.kappa is None else args.kappa), a, (0.5, 2.0)
    q0, qp0 = acceptance.BETA4_SEED
    traj = p3.solve_tw(a, 0.5, q0, qp0, 2.0)
    return lax.assemble_thm2(a, traj), (2.0 if args.kappa is None else args.kappa), a, (0.5, 2.0)


def cmd_lax_residual(args):
    asm, kappa, a, (lo, hi) = _pair_assembly(args)
    grid = np.linspace(lo, hi, args.points)
    rows = []
    for t in grid:
        for x in grid:
            zc = lax.zero_curvature_residual(asm, t, x).norm()
            top = lax.fp_compat_matrix(asm, kappa, a, t, x).top_row()
            rows.append((t, x, zc, top))
    if args.out:
        _write_csv(args.out, ["t", "x", "zero_curvature", "fp_top_row"], rows)
    print(f"pair {args.pair}: kappa={kappa:g} a={a if a is None else format(a, 'g')}")
    print(f"max zero-curvature residual: {max(r[2] for r in rows):.3e}")
    print(f"max FP-compatibility top row: {max(r[3] for r in rows):.3e}")
    return 0


def cmd_fp_solve(args):
    grid = fp.FPGrid.geometric(args.x_min, args.x_max, args.nx, args.t_start, args.t_end, args.nt)
    sol = fp.solve_fp(args.kappa, args.a, grid, tol=args.tol, t_inf=args.t_inf,
                      x_buffer=args.x_buffer, scheme=args.scheme)
    if args.out:
        fp.write_field_csv(sol, args.out)
    summary = {"kappa": args.kappa, "a": args.a, "meta": sol.meta,
               "F_min": float(sol.F.min()), "F_max": float(sol.F.max())}
    if abs(args.kappa + args.a - 2) < 1e-12:
        summary["distance_to_closed_form"] = fp.compare_fields(sol, lambda t, x: fp.gumbel_eval(args.kappa, t, x))
    _print_json(summary)
    return 0


def cmd_gumbel(args):
    if args.grid:
        vals = np.geomspace(0.1, 10.0, args.grid)
        rows = []
        for t in vals:
            for x in vals:
                res = fp.gumbel_aux_residuals(args.kappa, t, x, args.a)
                rows.append((t, x, fp.gumbel_eval(args.kappa, t, x), res["fp"], res["transport"],
                             res["second"], res["ratio"]))
        _write_csv(args.out, ["t", "x", "F", "r_fp", "r_transport", "r_second", "r_ratio"], rows)
        return 0
    if args.t is None or args.x is None:
        args.error("give --t and --x, or --grid N")
    print(f"{fp.gumbel_eval(args.kappa, args.t, args.x):.17g}")
    if args.residuals:
        _print_json(fp.gumbel_aux_residuals(args.kappa, args.t, args.x, args.a))
    return 0


def cmd_limit_sweep(args):
    alphas = [float(a) for a in args.alphas.split(",")]
    report = limits.sweep_report(alphas)
    if args.out:
        limits.write_report(report, args.out)
    _print_json(report)
    return 0


def cmd_mc_sample(args):
    spec = mc.EnsembleSpec(args.n, args.beta, args.a, args.seed)
    samples = mc.sample_smallest(spec, args.replicas)
    if args.out:
        mc.write_samples_csv(samples, args.out)
    report = {"n": args.n, "beta": args.beta, "a": args.a, "seed": args.seed, "replicas": args.replicas,
              "min": float(samples.min()), "mean": float(samples.mean())}
    if args.dense_oracle:
        if args.beta != 2 or float(args.a) != int(args.a):
            args.error("the dense oracle needs beta=2 and integer a")
        dense = mc.dense_oracle_smallest(args.n, int(args.a), args.replicas, args.seed + 1)
        report["ks_vs_dense"] = mc.ks_distance(mc.empirical_cdf(samples), mc.empirical_cdf(dense))
    if args.report:
        mc.write_json(report, args.report)
    _print_json(report)
    return 0


def cmd_verify_all(args):
    skip = tuple(args.skip or ())
    ok = True
    for i, chk in enumerate(acceptance.CHECKS, 1):
        if i in skip:
            print(f"[SKIP] criterion {i}")
            continue
        res = chk()
        print(res.line(), flush=True)
        ok = ok and res.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardedge", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("piii-solve", help="integrate the coupled (q, y) system")
    p.add_argument("--family", choices=["A", "B"], default="A")
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--t1", type=float, default=2.0)
    p.add_argument("--q0", type=float, default=0.3)
    p.add_argument("--y0", type=float, default=-1.0)
    p.add_argument("--phi0", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_piii_solve)

    p = sub.add_parser("tw-solve", help="integrate the beta=4 equation with S+ and S-")
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--t1", type=float, default=2.0)
    p.add_argument("--q0", type=float, default=0.3)
    p.add_argument("--qp0", type=float, default=0.1)
    p.add_argument("--s-plus0", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tw_solve)

    p = sub.add_parser("lax-residual", help="zero-curvature and FP-compatibility tables")
    p.add_argument("--pair", required=True, choices=["thm1a", "thm1b", "thm2", "thm3", "thm4", "thm5"])
    p.add_argument("--kappa", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lax_residual)

    p = sub.add_parser("fp-solve", help="solve the Fokker-Planck equation")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=200)
    p.add_argument("--nt", type=int, default=200)
    p.add_argument("--x-min", type=float, default=0.05)
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--t-start", type=float, default=50.0)
    p.add_argument("--t-end", type=float, default=0.1)
    p.add_argument("--t-inf", type=float, default=1e7)
    p.add_argument("--x-buffer", type=float, default=4.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--scheme", choices=["fitted", "upwind"], default="fitted")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fp_solve)

    p = sub.add_parser("gumbel", help="closed-form solution and its identities")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--residuals", action="store_true")
    p.add_argument("--grid", type=int, help="tabulate on an N x N grid over [0.1, 10]^2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gumbel)

    p = sub.add_parser("limit-sweep", help="hard-to-soft alpha sweep")
    p.add_argument("--alphas", default="100,1000,10000")
    p.add_argument("--out")
    p.set_defaults(func=cmd_limit_sweep)

    p = sub.add_parser("mc-sample", help="smallest-eigenvalue samples")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicas", type=int, default=10_000)
    p.add_argument("--dense-oracle", action="store_true")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_mc_sample)

    p = sub.add_parser("verify-all", help="run every acceptance check")
    p.add_argument("--skip", type=int, nargs="*", help="criterion numbers to skip")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.error = parser.error
    try:
        return args.func(args)
    except (HardEdgeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
