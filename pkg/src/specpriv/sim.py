"""Seeded Monte Carlo experiments.

Every trial draws its uniforms from its own counter-based stream keyed by
``(seed, ..., trial)``, so results do not depend on how trials are split
across workers. Reports serialize to ``<experiment>_<seed>.csv`` (records)
and ``<experiment>_<seed>.json`` (config echo plus summary).
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
from importlib import resources
import json
import math
import os
import time

import numpy as np

from specpriv import _kernels
from specpriv import analysis as an
from specpriv import graph as gr
from specpriv.mechanism import CalibratedMechanism, PrivacySpec, calibrate, necessary_lower_bound, stream

FIXTURE = "er50_p040_seed2021.edges"

#: reported values the table1 experiment is compared against (mean signed % error)
TABLE1_REFERENCE = {"lambda2": 8.81, "trace": 5.15, "kemeny": 4.42, "cheeger": 9.01}

PROFILE_TRIALS = {"full": 10_000, "ci": 2_000}


def profile_trials():
    return PROFILE_TRIALS.get(os.environ.get("SPECPRIV_PROFILE", "full"), PROFILE_TRIALS["full"])


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    trials: int = 10_000
    graph: str = None
    epsilon: float = None
    delta: float = 0.05
    A: int = 2
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for k, v in self.params.items():
            if isinstance(v, (list, tuple)):
                if not v:
                    raise ValueError(f"grid {k!r} is empty")
                if list(v) != sorted(v):
                    raise ValueError(f"grid {k!r} must be sorted")


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    records: list
    summary: dict
    wall_clock: float = 0.0

    def csv_text(self):
        if not self.records:
            return ""
        cols = list(self.records[0].keys())
        lines = [",".join(cols)]
        for r in self.records:
            lines.append(",".join(_fmt(r[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def json_text(self, timing=False):
        body = {"experiment": self.experiment, "config": self.config, "summary": self.summary}
        if timing:
            body["wall_clock_s"] = self.wall_clock
        return json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"

    def write(self, outdir, timing=False):
        os.makedirs(outdir, exist_ok=True)
        stem = os.path.join(outdir, f"{self.experiment}_{self.config['seed']}")
        with open(stem + ".csv", "w", newline="") as fh:
            fh.write(self.csv_text())
        with open(stem + ".json", "w") as fh:
            fh.write(self.json_text(timing))
        return stem + ".csv", stem + ".json"


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _stats(x):
    x = np.asarray(x, dtype=np.float64)
    m = x.size
    var = float(np.var(x, ddof=1)) if m > 1 else 0.0
    return {"mean": float(np.mean(x)), "se": math.sqrt(var / m) if m > 1 else 0.0, "var": var, "count": m}


# ------------------------------------------------------------ graphs


def load_graph(source):
    """Resolve a graph source.

    ``None`` or ``"fixture"`` is the pinned G(50, 0.40) edge list shipped in
    the package; ``kind:n[:p:seed]`` calls the generator; anything else is
    an edge-list path.
    """
    if source in (None, "fixture"):
        text = resources.files("specpriv").joinpath("data", FIXTURE).read_text()
        return gr.parse_edge_list(text)
    if ":" in source and not os.path.exists(source):
        parts = source.split(":")
        kind, n = parts[0], int(parts[1])
        if kind in ("er", "erdos_renyi"):
            return gr.generate("erdos_renyi", n, p=float(parts[2]), seed=int(parts[3]))
        return gr.generate(kind, n)
    return gr.read_edge_list(source)


# ------------------------------------------------------------ trials


def _uniform_block(seed, key, start, stop, width):
    return np.stack([stream(seed, *key, t).random(width) for t in range(start, stop)])


def trial_uniforms(seed, trials, width, key=(), workers=1):
    """Matrix of uniforms whose row ``t`` comes from stream ``(seed, *key, t)``."""
    if workers <= 1 or trials < 2 * workers:
        return _uniform_block(seed, key, 0, trials, width)
    edges = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(workers) as pool:
        parts = pool.map(_uniform_block, [seed] * workers, [key] * workers, edges[:-1], edges[1:], [width] * workers)
        return np.concatenate(list(parts))


def private_spectra(lam, mech, seed, trials, key=(), workers=1):
    """``trials x n`` private spectra with lambda_1 fixed at 0."""
    u = trial_uniforms(seed, trials, lam.size - 1, key, workers)
    noisy = _kernels.bounded_laplace_icdf(np.broadcast_to(lam[1:], u.shape), u, mech.b, mech.n)
    return np.concatenate([np.zeros((trials, 1)), noisy], axis=1)


def _spec(cfg, default_eps):
    eps = cfg.epsilon if cfg.epsilon is not None else default_eps
    return PrivacySpec(eps, cfg.delta, "edge", cfg.A)


# -------------------------------------------------------- experiments


def run_accuracy_histogram(cfg, workers=1):
    """Errors of private lambda_2..lambda_5 on one graph."""
    g = load_graph(cfg.graph)
    spec = _spec(cfg, 0.6)
    mech = calibrate(spec, g.n)
    b = cfg.params.get("b", mech.b)
    mech = CalibratedMechanism(g.n, b, spec, mech.sensitivity)
    lam = gr.spectrum(g).values
    idx = [i for i in cfg.params.get("indices", [2, 3, 4, 5]) if i <= g.n]
    R = private_spectra(lam, mech, cfg.seed, cfg.trials, workers=workers)
    records = []
    for t in range(cfg.trials):
        rec = {"trial": t}
        for i in idx:
            rec[f"err_lambda{i}"] = float(R[t, i - 1] - lam[i - 1])
        records.append(rec)
    bins = int(cfg.params.get("bins", 40))
    summary = {"b": b, "calibrated_b": calibrate(spec, g.n).b, "n": g.n, "per_index": {}}
    for i in idx:
        err = R[:, i - 1] - lam[i - 1]
        rel = err / lam[i - 1]
        counts, edges = np.histogram(err, bins=bins)
        summary["per_index"][str(i)] = {
            "lambda": float(lam[i - 1]),
            "error": _stats(err),
            "relative_error": _stats(rel),
            "mean_pct_error": 100.0 * float(np.mean(rel)),
            "mean_abs_pct_error": 100.0 * float(np.mean(np.abs(rel))),
            "closed_form_bias": an.bias_report(float(lam[i - 1]), b, g.n).bias,
            "histogram": {"counts": counts.tolist(), "edges": edges.tolist()},
        }
    return records, summary


def run_epsilon_sweep(cfg, workers=1):
    """Empirical mean and variance of the error against epsilon, checked against the closed form."""
    g = load_graph(cfg.graph)
    lam = gr.spectrum(g).values
    eps_grid = cfg.params.get("epsilons", [float(e) for e in np.round(np.linspace(0.1, 5.0, 25), 4)])
    idx = [i for i in cfg.params.get("indices", [2, 25, 48]) if i <= g.n]
    records = []
    for k, eps in enumerate(eps_grid):
        mech = calibrate(PrivacySpec(eps, cfg.delta, "edge", cfg.A), g.n)
        R = private_spectra(lam, mech, cfg.seed, cfg.trials, key=(k,), workers=workers)
        for i in idx:
            err = R[:, i - 1] - lam[i - 1]
            st = _stats(err)
            theory = an.bias_report(float(lam[i - 1]), mech.b, g.n).bias
            records.append({
                "epsilon": float(eps), "index": i, "lambda": float(lam[i - 1]), "b": mech.b,
                "mean_error": st["mean"], "se": st["se"], "var_error": st["var"],
                "closed_form_bias": theory, "z": (st["mean"] - theory) / st["se"] if st["se"] > 0 else 0.0,
            })
    max_z = max(abs(r["z"]) for r in records)
    return records, {"max_abs_z": max_z, "n": g.n, "epsilons": eps_grid, "indices": idx}


def _table1_row(name, g, eps, cfg, workers, key):
    spec = PrivacySpec(eps, cfg.delta, "edge", cfg.A)
    mech = calibrate(spec, g.n)
    sp = gr.spectrum(g)
    lam = sp.values
    R = private_spectra(lam, mech, cfg.seed, cfg.trials, key=(key,), workers=workers)
    degenerate = 0
    if name == "lambda2":
        truth = lam[1]
        est = R[:, 1]
    elif name == "trace":
        truth = sp.trace()
        est = R.sum(axis=1)
    elif name == "kemeny":
        gamma = cfg.params.get("gamma", 1.0 / g.n)
        truth = an.kemeny_constant(lam, gamma)
        est = np.sum(1.0 / np.maximum(R[:, 1:], an.DEFAULTS.div_floor), axis=1) / gamma
    elif name == "cheeger":
        truth = an.cheeger_upper_bound(sp.lambda2, g.max_degree())
        rad = R[:, 1] * (2.0 * R.mean(axis=1) - R[:, 1])
        degenerate = int(np.sum(rad < 0))
        est = np.sqrt(rad[rad >= 0])
    else:
        raise ValueError(name)
    rel = (est - truth) / truth
    return {
        "quantity": name, "epsilon": eps, "n": g.n, "b": mech.b, "truth": float(truth),
        "mean_pct_error": 100.0 * float(np.mean(rel)),
        "se_pct": 100.0 * _stats(rel)["se"],
        "mean_abs_pct_error": 100.0 * float(np.mean(np.abs(rel))),
        "var_relative_error": _stats(rel)["var"],
        "var_abs_error": _stats(est - truth)["var"],
        "mean_estimate": float(np.mean(est)),
        "reference_pct": TABLE1_REFERENCE[name],
        "degenerate_trials": degenerate,
    }


def run_table1(cfg, workers=1):
    """Trace, Kemeny, Cheeger and lambda_2 accuracy rows."""
    er = load_graph(cfg.graph)
    cycle = load_graph(cfg.params.get("cheeger_graph", "cycle:14"))
    rows = [
        _table1_row("lambda2", er, 0.6, cfg, workers, 0),
        _table1_row("trace", er, 0.35, cfg, workers, 1),
        _table1_row("kemeny", er, 1.0, cfg, workers, 2),
        _table1_row("cheeger", cycle, 2.5, cfg, workers, 3),
    ]
    summary = {r["quantity"]: {k: r[k] for k in ("mean_pct_error", "se_pct", "reference_pct", "var_relative_error")}
               for r in rows}
    return rows, summary


def run_scaling(cfg, workers=1):
    """Necessary and calibrated scales for edge and node privacy against n."""
    eps = cfg.epsilon if cfg.epsilon is not None else 0.4
    n_lo, n_hi = cfg.params.get("n_range", [3, 100])
    edge = PrivacySpec(eps, cfg.delta, "edge", cfg.A)
    node = PrivacySpec(eps, cfg.delta, "node")
    records = []
    for n in range(int(n_lo), int(n_hi) + 1):
        be = necessary_lower_bound(edge, n)
        bn = necessary_lower_bound(node, n)
        # the edge mechanism needs sensitivity 2A <= n
        cal_e = calibrate(edge, n).b if 2 * cfg.A <= n else float("nan")
        cal_n = calibrate(node, n).b
        records.append({
            "n": n, "be_necessary": be, "bn_necessary": bn, "be2": be * be, "bn2": bn * bn,
            "be_calibrated": cal_e, "bn_calibrated": cal_n,
            "bn2_over_n2": bn * bn / (n * n), "edge_noisier": bool(be > bn),
            "crossover_A": (n - 1) / 2.0,
        })
    limit = (1.0 / (eps - math.log1p(-cfg.delta))) ** 2
    return records, {"epsilon": eps, "delta": cfg.delta, "A": cfg.A, "bn2_over_n2_limit": limit}


def run_consensus(cfg, workers=1):
    """Convergence-rate error frequencies against the concentration bound."""
    p = cfg.params
    n = int(p.get("n", 10))
    lam2 = float(p.get("lambda2", 1.0))
    a = float(p.get("a", 0.2))
    eta = float(p.get("eta", 0.1))
    eps = cfg.epsilon if cfg.epsilon is not None else 0.4
    A = int(p.get("A", 1))
    spec = PrivacySpec(eps, cfg.delta, "edge", A)
    calibrated = calibrate(spec, n).b
    b = float(p.get("b", 7.39))
    mech = CalibratedMechanism(n, b, spec, 2.0 * A)
    t_grid = np.asarray(p.get("t_grid", np.logspace(-2, 3, 50)), dtype=np.float64)
    u = trial_uniforms(cfg.seed, cfg.trials, 1, workers=workers)[:, 0]
    draws = _kernels.bounded_laplace_icdf(np.full(cfg.trials, lam2), u, b, n)
    curve = an.concentration_curve(a, t_grid, lam2, b, n)
    records = []
    for t, bound in zip(t_grid, curve.bound):
        miss = np.abs(np.exp(-draws * t) - math.exp(-lam2 * t)) >= a
        freq = float(np.mean(miss))
        se = math.sqrt(max(freq * (1.0 - freq), 1e-12) / cfg.trials)
        records.append({"t": float(t), "bound": float(bound), "empirical_freq": freq, "binomial_se": se,
                        "lower_bound_within_a": max(0.0, 1.0 - float(bound)),
                        "empirical_within_a": 1.0 - freq})
    t_star = an.consensus_time_threshold(a, eta, lam2, b, n)
    n_curves = int(p.get("sample_curves", 500))
    summary = {
        "b": b, "calibrated_b": calibrated, "n": n, "lambda2": lam2, "a": a, "eta": eta,
        "t_star": t_star, "tail_bound": float(curve.bound[-1]),
        "max_excess_over_bound_in_se": max((r["empirical_freq"] - r["bound"]) / r["binomial_se"] for r in records),
        "sample_lambda2": draws[:n_curves].tolist(),
    }
    return records, summary


def run_diameter_rho_sweep(cfg, workers=1):
    """Distances between exact and expected diameter / mean-distance bounds against epsilon."""
    p = cfg.params
    n = int(p.get("n", 30))
    lam_n = float(p.get("lambda_n", n))
    eps_grid = p.get("epsilons", [float(e) for e in np.round(np.linspace(0.1, 2.0, 20), 4)])
    if "lambda2s" in p:
        lam2s = [float(v) for v in p["lambda2s"]]
    else:
        probs = p.get("er_p", [0.1, 0.2, 0.3, 0.5])
        lam2s = [gr.spectrum(gr.generate("erdos_renyi", n, p=q, seed=int(p.get("er_seed", 1)))).lambda2 for q in probs]
    bs = [calibrate(PrivacySpec(e, cfg.delta, "edge", cfg.A), n).b for e in eps_grid]
    records = []
    slopes = {}
    for lam2 in lam2s:
        exd = an.diameter_bounds(lam2, lam_n, n)
        exr = an.mean_distance_bounds(lam2, lam_n, n)
        cols = {"d_upper": [], "d_lower": [], "rho_upper": [], "rho_lower": []}
        for eps, b in zip(eps_grid, bs):
            ed = an.expected_diameter_bounds(lam2, lam_n, n, b)
            er = an.expected_mean_distance_bounds(lam2, lam_n, n, b)
            rec = {
                "lambda2": lam2, "epsilon": float(eps), "b": b,
                "d_upper_exact": exd.upper, "d_upper_expected": ed.upper,
                "d_lower_exact": exd.lower, "d_lower_expected": ed.lower,
                "rho_upper_exact": exr.upper, "rho_upper_expected": er.upper,
                "rho_lower_exact": exr.lower, "rho_lower_expected": er.lower,
                "dist_d_upper": abs(ed.upper - exd.upper), "dist_d_lower": abs(ed.lower - exd.lower),
                "dist_rho_upper": abs(er.upper - exr.upper), "dist_rho_lower": abs(er.lower - exr.lower),
            }
            records.append(rec)
            for c in cols:
                cols[c].append(rec["dist_" + c])
        slopes[repr(lam2)] = {c: float(np.polyfit(eps_grid, v, 1)[0]) for c, v in cols.items()}
    return records, {"n": n, "lambda_n": lam_n, "lambda2s": lam2s, "slopes": slopes,
                     "min_distance": min(min(r[k] for k in r if k.startswith("dist_")) for r in records)}


EXPERIMENTS = {
    "accuracy": run_accuracy_histogram,
    "epsilon_sweep": run_epsilon_sweep,
    "table1": run_table1,
    "scaling": run_scaling,
    "consensus": run_consensus,
    "diameter_rho": run_diameter_rho_sweep,
}


def run(cfg, workers=1):
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}; choose from {sorted(EXPERIMENTS)}")
    t0 = time.perf_counter()
    records, summary = EXPERIMENTS[cfg.experiment](cfg, workers=workers)
    return ExperimentReport(cfg.experiment, _jsonable(asdict(cfg)), records, _jsonable(summary),
                            wall_clock=time.perf_counter() - t0)
