"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 infeasible calibration.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from specpriv import analysis as an
from specpriv import graph as gr
from specpriv import sim
from specpriv.mechanism import (
    InfeasibleCalibration,
    PrivacyError,
    PrivacySpec,
    PrivateRelease,
    calibrate,
    necessary_lower_bound,
    privatize_lambda2,
    privatize_spectrum,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


class CliError(Exception):
    pass


def _dump_json(obj):
    return json.dumps(sim._jsonable(obj), indent=2, sort_keys=True) + "\n"


def _dump_csv(records):
    return sim.ExperimentReport("", {}, records, {}).csv_text()


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_privacy(p, required=True):
    p.add_argument("--eps", type=float, required=required, help="per-release epsilon")
    p.add_argument("--delta", type=float, default=0.05, help="per-release delta (default 0.05)")
    p.add_argument("--adjacency", choices=["edge", "node"], default="edge")
    p.add_argument("--A", type=int, default=1, help="edge changes covered by edge adjacency (default 1)")


def _privacy(args):
    return PrivacySpec(args.eps, args.delta, args.adjacency, args.A if args.adjacency == "edge" else 1)


def _add_out(p):
    p.add_argument("--out", help="write output to this file instead of stdout")


def _add_format(p, default):
    p.add_argument("--format", choices=["json", "csv"], default=default)


def _scale(args, n):
    """Use --b if given, otherwise calibrate from the privacy flags."""
    if args.b is not None:
        return args.b
    if args.eps is None:
        raise CliError("give either --b or --eps to calibrate a scale")
    return calibrate(_privacy(args), n).b


# ------------------------------------------------------------- commands


def cmd_spectrum(args):
    g = gr.read_edge_list(args.graph)
    sp = gr.spectrum(g)
    out = {"n": g.n, "m": g.m, "values": sp.values, "lambda2": sp.lambda2, "lambda_n": sp.lambda_n,
           "trace": sp.trace(), "max_degree": g.max_degree()}
    if args.distances:
        out["diameter"] = gr.diameter(g)
        out["mean_distance"] = gr.mean_distance(g)
    return _dump_json(out)


def cmd_calibrate(args):
    spec = _privacy(args)
    mech = calibrate(spec, args.n)
    return _dump_json({
        "b": mech.b, "n": args.n, "sensitivity": mech.sensitivity,
        "necessary_lower_bound": necessary_lower_bound(spec, args.n),
        "epsilon": spec.epsilon, "delta": spec.delta, "adjacency": spec.adjacency,
        **({"A": spec.A} if spec.adjacency == "edge" else {}),
    })


def cmd_privatize(args):
    g = gr.read_edge_list(args.graph)
    spec = _privacy(args)
    if args.lambda2_only or spec.adjacency == "node":
        rel = privatize_lambda2(g, spec, args.seed)
    else:
        rel = privatize_spectrum(g, spec, args.seed, sort=args.sort)
    return json.dumps(rel.to_dict(), indent=2, sort_keys=True) + "\n"


def cmd_bias(args):
    if args.graph:
        g = gr.read_edge_list(args.graph)
        lams = gr.spectrum(g).values
        n = g.n
    else:
        if args.lam is None or args.n is None:
            raise CliError("bias needs a graph file or both --lambda and --n")
        lams = [args.lam]
        n = args.n
    b = _scale(args, n)
    rows = []
    for i, lam in enumerate(lams, start=1):
        r = an.bias_report(float(lam), b, n)
        rows.append({"index": i if args.graph else 0, "lambda": r.lam, "b": b, "n": n,
                     "expected_private": r.expected_private, "bias": r.bias})
    if args.format == "csv":
        return _dump_csv(rows)
    return _dump_json(rows[0] if len(rows) == 1 and not args.graph else rows)


def _bounds_inputs(args):
    if args.graph:
        g = gr.read_edge_list(args.graph)
        sp = gr.spectrum(g)
        return sp.lambda2, sp.lambda_n, g.n, g
    if None in (args.lambda2, args.lambda_n, args.n):
        raise CliError("bounds needs a graph file or --lambda2, --lambda-n and --n")
    return args.lambda2, args.lambda_n, args.n, None


def cmd_bounds(args):
    l2, ln, n, g = _bounds_inputs(args)
    exact_fn, expected_fn = {
        "diameter": (an.diameter_bounds, an.expected_diameter_bounds),
        "rho": (an.mean_distance_bounds, an.expected_mean_distance_bounds),
    }[args.kind]
    exact = exact_fn(l2, ln, n)
    out = {"kind": args.kind, "lambda2": l2, "lambda_n": ln, "n": n,
           "exact": {"lower": exact.lower, "upper": exact.upper, "alpha": exact.alpha_used}}
    if args.b is not None or args.eps is not None:
        b = _scale(args, n)
        ex = expected_fn(l2, ln, n, b)
        out["b"] = b
        out["expected"] = {"lower": ex.lower, "upper": ex.upper, "alpha": ex.alpha_used}
    if g is not None:
        out["true_value"] = gr.diameter(g) if args.kind == "diameter" else gr.mean_distance(g)
    return _dump_json(out)


def _t_grid(args):
    if args.t:
        return np.array(sorted(args.t), dtype=np.float64)
    return np.logspace(math.log10(args.t_min), math.log10(args.t_max), args.points)


def cmd_consensus(args):
    b = _scale(args, args.n)
    if args.kind == "time":
        t_star = an.consensus_time_threshold(args.a, args.eta, args.lambda2, b, args.n)
        bound = an.consensus_concentration_bound(args.a, t_star, args.lambda2, b, args.n)
        return _dump_json({"t_star": t_star, "bound_at_t_star": bound, "a": args.a, "eta": args.eta,
                           "lambda2": args.lambda2, "b": b, "n": args.n})
    curve = an.concentration_curve(args.a, _t_grid(args), args.lambda2, b, args.n)
    if args.format == "json":
        return _dump_json({"a": args.a, "lambda2": args.lambda2, "b": b, "n": args.n,
                           "t": curve.t_grid, "bound": curve.bound})
    return _dump_csv(curve.to_records())


def cmd_estimate(args):
    with open(args.release) as fh:
        rel = PrivateRelease.from_dict(json.load(fh))
    if args.kind == "trace":
        out = {"trace": an.trace_estimate(rel), "average_degree": an.average_degree_estimate(rel)}
    elif args.kind == "kemeny":
        gamma = args.gamma if args.gamma is not None else 1.0 / rel.n
        out = {"kemeny": an.kemeny_estimate(rel, gamma), "gamma": gamma}
    else:
        out = {"cheeger": an.cheeger_estimate(rel)}
    out["n"] = rel.n
    out["seed"] = rel.seed
    return _dump_json(out)


def cmd_experiment(args):
    params = json.loads(args.params) if args.params else {}
    trials = args.trials if args.trials is not None else sim.profile_trials()
    cfg = sim.ExperimentConfig(args.id, seed=args.seed, trials=trials, graph=args.graph,
                               epsilon=args.eps, delta=args.delta, A=args.A, params=params)
    report = sim.run(cfg, workers=args.workers)
    outdir = args.out or "."
    csv_path, json_path = report.write(outdir)
    return _dump_json({"csv": os.path.basename(csv_path), "json": os.path.basename(json_path),
                       "summary": report.summary})


# --------------------------------------------------------------- parser


def build_parser():
    ap = argparse.ArgumentParser(prog="specpriv", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("spectrum", help="exact Laplacian spectrum of an edge-list graph")
    p.add_argument("graph")
    p.add_argument("--distances", action="store_true", help="also report diameter and mean distance")
    _add_out(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("calibrate", help="smallest private noise scale b")
    _add_privacy(p)
    p.add_argument("--n", type=int, required=True, help="number of nodes")
    _add_out(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("privatize", help="private release of the spectrum (edge) or lambda_2 (node)")
    p.add_argument("graph")
    _add_privacy(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sort", action="store_true", help="sort the released values")
    p.add_argument("--lambda2-only", action="store_true", help="release lambda_2 only")
    _add_out(p)
    p.set_defaults(func=cmd_privatize)

    p = sub.add_parser("bias", help="closed-form bias of private eigenvalues")
    p.add_argument("graph", nargs="?", help="edge list; reports every eigenvalue")
    p.add_argument("--lambda", dest="lam", type=float, help="single eigenvalue instead of a graph")
    p.add_argument("--n", type=int, help="node count when --lambda is used")
    p.add_argument("--b", type=float, help="noise scale; otherwise calibrated from --eps")
    _add_privacy(p, required=False)
    _add_format(p, "json")
    _add_out(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("bounds", help="exact and expected diameter or mean-distance bounds")
    p.add_argument("kind", choices=["diameter", "rho"])
    p.add_argument("graph", nargs="?")
    p.add_argument("--lambda2", type=float)
    p.add_argument("--lambda-n", dest="lambda_n", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--b", type=float, help="noise scale for the expected bounds")
    _add_privacy(p, required=False)
    _add_out(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("consensus", help="concentration bound curve or time threshold")
    p.add_argument("kind", choices=["bound", "time"])
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True, help="error level on the convergence rate")
    p.add_argument("--eta", type=float, default=0.1, help="target probability for 'time'")
    p.add_argument("--b", type=float, help="noise scale; otherwise calibrated from --eps")
    p.add_argument("--t", type=float, nargs="+", help="explicit time points")
    p.add_argument("--t-min", type=float, default=1e-2)
    p.add_argument("--t-max", type=float, default=1e3)
    p.add_argument("--points", type=int, default=50)
    _add_privacy(p, required=False)
    _add_format(p, "csv")
    _add_out(p)
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("estimate", help="graph quantities from a private release JSON")
    p.add_argument("kind", choices=["trace", "kemeny", "cheeger"])
    p.add_argument("release")
    p.add_argument("--gamma", type=float, help="lazy walk step for Kemeny (default 1/n)")
    _add_out(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment and write CSV + JSON")
    p.add_argument("id", choices=sorted(sim.EXPERIMENTS))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, help="trials M (default from SPECPRIV_PROFILE)")
    p.add_argument("--graph", help="edge list or generator spec like er:50:0.4:2021 (default: fixture)")
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--A", type=int, default=2)
    p.add_argument("--params", help="JSON object of sweep parameters")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory (default: current directory)")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
        # the experiment command writes its own files; --out is a directory there
        if args.command == "experiment":
            sys.stdout.write(text)
        else:
            _emit(args, text)
    except InfeasibleCalibration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CliError, PrivacyError, gr.GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
