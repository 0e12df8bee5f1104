"""Sweep protocol: run (method, phi) cells over a graph, tune the step size
per cell, evaluate the metric bundle, and assemble a deterministic CSV."""

from __future__ import annotations

import concurrent.futures
import csv
import io
import logging
import time
from dataclasses import dataclass, field, replace

from .baselines import UnsupportedGroupCountError, fairwalk, lfpr_n, lfpr_u
from .graph import (
    FairnessTarget,
    PageRankConfig,
    build_transition,
    load_graph,
    load_labels,
)
from .loss import loss_fair, loss_group_adapted
from .metrics import MetricBundle, UndefinedCoefficientError, delta_p, rho_bar, rho_tilde
from .optimizer import ALPHA_GRID, DivergedError, OptimizerConfig, adapt_gd, fair_gd
from .pagerank import group_scores, pagerank_power

log = logging.getLogger(__name__)

OPTIMIZER_METHODS = ("fairgd", "fairgd_restricted", "adaptgd", "adaptgd_restricted")
BASELINE_METHODS = ("fairwalk", "lfpr_n", "lfpr_u")
KNOWN_METHODS = OPTIMIZER_METHODS + BASELINE_METHODS + ("crosswalk",)

CSV_COLUMNS = (
    "dataset",
    "method",
    "phi",
    "loss",
    "loss_group_adapted",
    "delta_p",
    "rho_bar",
    "rho_tilde",
    "iterations",
    "converged",
    "wall_time_ms",
    "reason",
)

# Evaluation uses a deeper power iteration than the optimizer defaults so
# reported numbers are solver-converged.
EVAL_T1 = 500
EVAL_TOL = 1e-13


@dataclass
class ExperimentSpec:
    graph_path: str
    labels_path: str
    undirected: bool = False
    gamma: float = 0.15
    phi_grid: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    methods: tuple = ("fairgd", "fairwalk")
    output_dir: str = "."
    dataset: str = "dataset"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    jobs: int = 1

    def __post_init__(self):
        if not self.phi_grid:
            raise ValueError("phi grid must be non-empty")
        for phi in self.phi_grid:
            if not 0.0 < phi < 1.0:
                raise ValueError(f"phi values must be in (0,1), got {phi}")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ValueError(f"unknown method {m!r}; known: {', '.join(KNOWN_METHODS)}")


@dataclass
class ResultRow:
    dataset: str
    method: str
    phi: float
    loss: float | None = None
    loss_group_adapted: float | None = None
    delta_p: float | None = None
    rho_bar: float | None = None
    rho_tilde: float | None = None
    iterations: int | None = None
    converged: bool | None = None
    wall_time_ms: float | None = None
    reason: str = ""


def build_target(phi: float, K: int) -> FairnessTarget:
    """(phi, 1-phi) for two groups, (phi, (1-phi)/(K-1), ...) beyond."""
    if K == 2:
        return FairnessTarget(phi=[phi, 1.0 - phi])
    return FairnessTarget.from_lead_share(phi, K)


def tune_step_size(run, alphas=ALPHA_GRID):
    """Run the optimizer per candidate step size; keep the lowest final loss.

    Diverged runs are discarded; raises DivergedError when all candidates
    diverge.
    """
    best_alpha, best = None, None
    last_err = None
    for alpha in alphas:
        try:
            report = run(alpha)
        except DivergedError as exc:
            last_err = exc
            log.debug("alpha=%g diverged: %s", alpha, exc)
            continue
        if best is None or report.final_loss < best.final_loss:
            best_alpha, best = alpha, report
    if best is None:
        raise DivergedError(last_err.iteration, last_err.loss, last_err.safe_alpha)
    log.debug("grid pick alpha=%g final_loss=%.6e", best_alpha, best.final_loss)
    return best_alpha, best


def run_optimizer_method(method, P, gamma, groups, target, opt: OptimizerConfig):
    """Dispatch one optimizer cell, grid-searching alpha when unset."""
    restricted = method.endswith("_restricted")
    if restricted and not opt.restricted:
        opt = replace(opt, delta=0.1, epsilon=0.1)
    if not restricted and opt.restricted:
        opt = replace(opt, delta=None, epsilon=None)
    uniform = PageRankConfig.uniform(P.n, gamma)

    def run(alpha):
        o = replace(opt, alpha=alpha)
        if method.startswith("adaptgd"):
            return adapt_gd(P, gamma, groups, target, o)
        return fair_gd(P, uniform, groups, target, o)

    if opt.alpha is None and not opt.alpha_auto:
        _, report = tune_step_size(run)
        return report
    return run(opt.alpha) if opt.alpha is not None else run(None)


def evaluate_matrices(P_orig, P_new, gamma, groups, target):
    """(MetricBundle, rho_tilde reason, revised group scores) for a revised
    matrix against the original, all under the uniform restart vector."""
    cfg = PageRankConfig.uniform(P_orig.n, gamma)
    loss = loss_fair(P_new, cfg, groups, target, t1=EVAL_T1, tol=EVAL_TOL)
    loss_g = loss_group_adapted(P_new, gamma, groups, target, t1=EVAL_T1, tol=EVAL_TOL)
    dp = delta_p(P_new, P_orig)
    p_old = pagerank_power(P_orig, cfg, t1=EVAL_T1, tol=EVAL_TOL)
    p_new = pagerank_power(P_new, cfg, t1=EVAL_T1, tol=EVAL_TOL)
    rb = rho_bar(p_old, p_new, groups)
    try:
        rt = rho_tilde(P_orig, P_new)
        rt_reason = ""
    except UndefinedCoefficientError as exc:
        rt = None
        rt_reason = f"rho_tilde undefined: {exc}"
    bundle = MetricBundle(loss=loss, loss_group_adapted=loss_g, delta_p=dp, rho_bar=rb, rho_tilde=rt)
    return bundle, rt_reason, group_scores(p_new, groups)


def run_cell(
    graph_path, labels_path, undirected, gamma, dataset, method, phi, opt: OptimizerConfig
) -> ResultRow:
    """One (method, phi) cell, self-contained so cells can run in parallel."""
    started = time.perf_counter()
    row = ResultRow(dataset=dataset, method=method, phi=phi)
    try:
        with open(graph_path) as fh:
            g = load_graph(fh.read(), undirected=undirected)
        with open(labels_path) as fh:
            groups = load_labels(fh.read(), g.n)
        cfg = PageRankConfig.uniform(g.n, gamma)
        P = build_transition(g, cfg)
        target = build_target(phi, groups.K)

        if method == "crosswalk":
            row.reason = "unavailable: crosswalk reweighting is not implemented"
            return row
        if method in BASELINE_METHODS:
            fn = {"fairwalk": fairwalk, "lfpr_n": lfpr_n, "lfpr_u": lfpr_u}[method]
            result = fn(P, groups, target)
            revised = result.matrix
        else:
            report = run_optimizer_method(method, P, gamma, groups, target, opt)
            revised = report.final_matrix
            row.iterations = report.iterations_run
            row.converged = report.converged

        bundle, rt_reason, _ = evaluate_matrices(P, revised, gamma, groups, target)
        row.loss = bundle.loss
        row.loss_group_adapted = bundle.loss_group_adapted
        row.delta_p = bundle.delta_p
        row.rho_bar = bundle.rho_bar
        row.rho_tilde = bundle.rho_tilde
        row.reason = rt_reason
    except UnsupportedGroupCountError as exc:
        row.reason = f"unsupported K: {exc}"
    except DivergedError as exc:
        row.reason = f"diverged: {exc}"
    except Exception as exc:  # per-cell isolation: the sweep must go on
        row.reason = f"error: {exc}"
    finally:
        row.wall_time_ms = (time.perf_counter() - started) * 1000.0
    return row


def _cell_args(spec: ExperimentSpec):
    for method in spec.methods:
        for phi in spec.phi_grid:
            yield (
                spec.graph_path,
                spec.labels_path,
                spec.undirected,
                spec.gamma,
                spec.dataset,
                method,
                phi,
                spec.optimizer,
            )


def run_sweep(spec: ExperimentSpec) -> list[ResultRow]:
    args = list(_cell_args(spec))
    if spec.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_run_cell_star, args))
    else:
        rows = [run_cell(*a) for a in args]
    rows.sort(key=lambda r: (r.method, r.phi))
    return rows


def _run_cell_star(args):
    return run_cell(*args)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()
