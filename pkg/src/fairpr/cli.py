"""Command-line surface: pagerank, optimize, baseline, evaluate, sweep.

Exit codes: 0 ok, 2 input error, 3 numerical failure. Set FPR_LOG to a
logging level name (e.g. DEBUG) for verbose output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .baselines import UnsupportedGroupCountError, fairwalk, lfpr_n, lfpr_u
from .experiment import (
    ExperimentSpec,
    evaluate_matrices,
    rows_to_csv,
    run_optimizer_method,
    run_sweep,
)
from .graph import (
    FairnessTarget,
    GraphParseError,
    PageRankConfig,
    build_transition,
    load_graph,
    load_labels,
    parse_matrix,
    serialize_matrix,
)
from .metrics import UndefinedCoefficientError
from .optimizer import DivergedError, OptimizerConfig
from .pagerank import group_scores, pagerank_power, pagerank_residual

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    """User-facing input problem; maps to exit code 2."""


def _read(path: str) -> str:
    """Read a file, or standard input when path is '-'."""
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_instance(args):
    g = load_graph(_read(args.edges), undirected=args.undirected)
    groups = load_labels(_read(args.labels), g.n)
    cfg = PageRankConfig.uniform(g.n, args.gamma)
    P = build_transition(g, cfg)
    return g, groups, cfg, P


def _parse_phi(phi_text: str, K: int) -> FairnessTarget:
    """Either a full comma-separated length-K vector or a single lead share."""
    parts = [float(tok) for tok in phi_text.split(",")]
    if len(parts) == K:
        return FairnessTarget(phi=parts)
    if len(parts) == 1:
        from .experiment import build_target

        return build_target(parts[0], K)
    raise InputError(f"--phi needs 1 or {K} comma-separated values, got {len(parts)}")


def _common_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True, help="edge-list file ('-' for stdin)")
    p.add_argument("--labels", required=True, help="label file ('-' for stdin)")
    p.add_argument("--undirected", action="store_true", help="mirror each input edge")
    p.add_argument("--gamma", type=float, default=0.15)


def _optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None, help="constant step size")
    p.add_argument("--alpha-auto", action="store_true", help="use the safe step 2/C")
    p.add_argument("--alpha-grid", action="store_true", help="grid-search the step size (default when --alpha absent)")
    p.add_argument("--t1", type=int, default=100)
    p.add_argument("--t2", type=int, default=50)
    p.add_argument("--kappa", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)


def _build_opt(args) -> OptimizerConfig:
    return OptimizerConfig(
        alpha=args.alpha,
        t1=args.t1,
        t2=args.t2,
        kappa=args.kappa,
        max_iters=args.max_iters,
        delta=args.delta,
        epsilon=args.epsilon,
        alpha_auto=args.alpha_auto,
    )


def cmd_pagerank(args) -> int:
    _, groups, cfg, P = _load_instance(args)
    p = pagerank_power(P, cfg, t1=args.t1, tol=1e-13)
    scores = group_scores(p, groups)
    print("group scores: " + " ".join(f"{s:.6f}" for s in scores))
    print(f"l1 residual: {pagerank_residual(P, cfg, p):.3e}")
    if args.dump:
        Path(args.dump).write_text("".join(f"{i}\t{x:.17g}\n" for i, x in enumerate(p)))
    return EXIT_OK


def cmd_optimize(args) -> int:
    if args.alpha_grid and (args.alpha is not None or args.alpha_auto):
        raise InputError("--alpha-grid conflicts with --alpha/--alpha-auto")
    _, groups, cfg, P = _load_instance(args)
    target = _parse_phi(args.phi, groups.K)
    opt = _build_opt(args)
    method = args.method + ("_restricted" if opt.restricted else "")
    report = run_optimizer_method(method, P, args.gamma, groups, target, opt)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "original.tsv").write_text(serialize_matrix(P))
    (out / "revised.tsv").write_text(serialize_matrix(report.final_matrix))
    bundle, rt_reason, final_scores = evaluate_matrices(
        P, report.final_matrix, args.gamma, groups, target
    )
    payload = {
        "method": args.method,
        "phi": list(map(float, target.phi)),
        "gamma": args.gamma,
        "iterations": report.iterations_run,
        "converged": report.converged,
        "loss_trace": [float(x) for x in report.loss_trace],
        "final_group_scores": [float(x) for x in final_scores],
        "metrics": {
            "loss": bundle.loss,
            "loss_group_adapted": bundle.loss_group_adapted,
            "delta_p": bundle.delta_p,
            "rho_bar": bundle.rho_bar,
            "rho_tilde": bundle.rho_tilde,
        },
        "notes": rt_reason,
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    print("final group scores: " + " ".join(f"{s:.6f}" for s in final_scores))
    print(f"final loss: {report.final_loss:.6e} after {report.iterations_run} iterations "
          f"(converged: {str(report.converged).lower()})")
    print(f"wrote {out / 'revised.tsv'} and {out / 'report.json'}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    _, groups, cfg, P = _load_instance(args)
    target = _parse_phi(args.phi, groups.K)
    fn = {"fairwalk": fairwalk, "lfpr_n": lfpr_n, "lfpr_u": lfpr_u}[args.method]
    result = fn(P, groups, target)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "original.tsv").write_text(serialize_matrix(P))
    (out / "revised.tsv").write_text(serialize_matrix(result.matrix))
    print(f"method: {result.method}")
    print(f"pattern_extended: {str(result.pattern_extended).lower()}")
    print(f"wrote {out / 'revised.tsv'}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    labels_text = _read(args.labels)
    # headerless files fall back to the label count for their dimension
    n_hint = sum(
        1 for line in labels_text.splitlines() if line.strip() and not line.lstrip().startswith("#")
    )
    original = parse_matrix(_read(args.original), n=n_hint or None)
    revised = parse_matrix(_read(args.revised), n=n_hint or None)
    if original.n != revised.n:
        raise InputError(f"dimension mismatch: original n={original.n}, revised n={revised.n}")
    groups = load_labels(labels_text, original.n)
    target = _parse_phi(args.phi, groups.K)
    bundle, rt_reason, _ = evaluate_matrices(original, revised, args.gamma, groups, target)
    extended = not revised.pattern_subset_of(original)
    print(f"loss: {bundle.loss:.6e}")
    print(f"loss_group_adapted: {bundle.loss_group_adapted:.6e}")
    print(f"delta_p: {bundle.delta_p:.6e}")
    print(f"rho_bar: {bundle.rho_bar:.6f}")
    if bundle.rho_tilde is not None:
        print(f"rho_tilde: {bundle.rho_tilde:.6f}")
    else:
        print(f"rho_tilde: undefined ({rt_reason})")
    print(f"pattern_extended: {str(extended).lower()}")
    return EXIT_OK


def _load_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


_SWEEP_CONFIG_TYPES = {
    "edges": str,
    "labels": str,
    "undirected": lambda s: s.lower() in ("1", "true", "yes"),
    "gamma": float,
    "phi": str,
    "methods": str,
    "out": str,
    "jobs": int,
    "alpha": float,
    "t1": int,
    "t2": int,
    "kappa": float,
    "max_iters": int,
    "delta": float,
    "epsilon": float,
    "dataset_name": str,
}


def _merged_sweep_settings(args) -> dict:
    """Flags win over the config file, which wins over hard defaults."""
    defaults = {
        "undirected": False,
        "gamma": 0.15,
        "phi": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
        "methods": "fairgd,fairwalk",
        "out": "sweep_out",
        "jobs": 1,
        "alpha": None,
        "t1": 100,
        "t2": 50,
        "kappa": 1e-8,
        "max_iters": 1000,
        "delta": None,
        "epsilon": None,
        "dataset_name": "dataset",
        "edges": None,
        "labels": None,
    }
    merged = dict(defaults)
    if args.config:
        for key, raw in _load_config_file(args.config).items():
            if key not in _SWEEP_CONFIG_TYPES:
                raise InputError(f"unknown config key {key!r}")
            merged[key] = _SWEEP_CONFIG_TYPES[key](raw)
    for key in merged:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            merged[key] = flag
    if not merged["edges"] or not merged["labels"]:
        raise InputError("sweep needs --edges and --labels (flags or config file)")
    return merged


def cmd_sweep(args) -> int:
    settings = _merged_sweep_settings(args)
    phi_grid = tuple(float(tok) for tok in str(settings["phi"]).split(","))
    methods = tuple(tok.strip() for tok in str(settings["methods"]).split(","))
    opt = OptimizerConfig(
        alpha=settings["alpha"],
        t1=settings["t1"],
        t2=settings["t2"],
        kappa=settings["kappa"],
        max_iters=settings["max_iters"],
        delta=settings["delta"],
        epsilon=settings["epsilon"],
    )
    spec = ExperimentSpec(
        graph_path=settings["edges"],
        labels_path=settings["labels"],
        undirected=settings["undirected"],
        gamma=settings["gamma"],
        phi_grid=phi_grid,
        methods=methods,
        output_dir=settings["out"],
        dataset=settings["dataset_name"],
        optimizer=opt,
        jobs=settings["jobs"],
    )
    for path in (spec.graph_path, spec.labels_path):
        if not Path(path).exists():
            raise InputError(f"no such file: {path}")
    rows = run_sweep(spec)
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    csv_path.write_text(rows_to_csv(rows))
    failures = sum(1 for r in rows if r.loss is None)
    print(f"wrote {csv_path} ({len(rows)} rows, {failures} without metrics)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairpr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pagerank", help="print group-wise scores of a graph")
    _common_input_flags(p)
    p.add_argument("--t1", type=int, default=100)
    p.add_argument("--dump", default=None, help="write the full score vector to this path")
    p.set_defaults(fn=cmd_pagerank)

    p = sub.add_parser("optimize", help="run fairgd/adaptgd and write the revised matrix")
    _common_input_flags(p)
    p.add_argument("--method", choices=["fairgd", "adaptgd"], required=True)
    p.add_argument("--phi", required=True, help="single lead share or comma-separated targets")
    _optimizer_flags(p)
    p.add_argument("--out", default="opt_out")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("baseline", help="run a baseline reweighting and write the revised matrix")
    _common_input_flags(p)
    p.add_argument("--method", choices=["fairwalk", "lfpr_n", "lfpr_u"], required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--out", default="baseline_out")
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("evaluate", help="metric bundle of a revised matrix vs the original")
    p.add_argument("--original", required=True, help="original matrix TSV")
    p.add_argument("--revised", required=True, help="revised matrix TSV")
    p.add_argument("--labels", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--gamma", type=float, default=0.15)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("sweep", help="run a (method, phi) grid and write results.csv")
    p.add_argument("--edges", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--phi", default=None, help="comma-separated phi grid")
    p.add_argument("--methods", default=None, help="comma-separated method names")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--t1", type=int, default=None)
    p.add_argument("--t2", type=int, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None, dest="max_iters")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--dataset-name", default=None, dest="dataset_name")
    p.add_argument("--config", default=None, help="key=value settings file; flags win")
    p.set_defaults(fn=cmd_sweep)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("FPR_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(name)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, GraphParseError, UnsupportedGroupCountError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DivergedError, UndefinedCoefficientError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
