"""Command-line interface: ``cgvariants {fetch,run,summarize,predict-scaling,list-variants}``.

Exit codes: 0 success, 2 configuration error, 3 matrix fetch failure,
4 solver breakdown (only with ``--strict``), 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import yaml

from .costmodel import ScalingScenario, default_scenario, predict_scaling
from .experiment import ConfigError, ExperimentConfig, SummaryTable, broke_down, run_experiment
from .fetch import FetchError, fetch_matrix
from .mmio import MatrixMarketError
from .reference import matrix_names
from .report import append_index, emit_plot_data, emit_table, table_from_index
from .variants import ALL_VARIANTS

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_FETCH = 3
EXIT_BREAKDOWN = 4

log = logging.getLogger("cgvariants")

_DESCRIPTIONS = {
    "HS": ("Hestenes-Stiefel", "4 (+1)", "2 c_gr + t_mv + c_mv"),
    "CG_CG": ("Chronopoulos-Gear", "5 (+1)", "c_gr + t_mv + c_mv"),
    "M": ("Meurant", "4 (+2)", "c_gr + t_mv + c_mv"),
    "PR": ("predict-and-recompute", "4 (+2)", "c_gr + t_mv + c_mv"),
    "GV": ("Ghysels-Vanroose pipelined", "7 (+3)", "max(c_gr, t_mv + c_mv)"),
    "PIPE_PR_M": ("pipelined predict-and-recompute Meurant", "6 (+4)", "max(c_gr, t_2mv + c_mv)"),
    "PIPE_PR": ("pipelined predict-and-recompute", "6 (+4)", "max(c_gr, t_2mv + c_mv)"),
}


def _cmd_fetch(args):
    names = matrix_names() if args.all else args.names
    if not names:
        raise ConfigError("give matrix names or --all")
    urls = tuple(args.base_url) if args.base_url else None
    failed = 0
    for name in names:
        try:
            path = fetch_matrix(name, args.cache_dir, urls=urls, refresh=args.refresh)
        except FetchError as exc:
            failed += 1
            print(f"{name}: FAILED ({type(exc).__name__}: {exc})", file=sys.stderr)
        else:
            print(f"{name}: {path}")
    return EXIT_FETCH if failed else EXIT_OK


def _load_config(args):
    base = {}
    if args.config:
        try:
            base = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read configuration {args.config}: {exc}") from exc
        if not isinstance(base, dict):
            raise ConfigError("configuration file must contain a mapping")
    problems = args.problem or base.pop("problems", None) or [base.get("problem")]
    if problems == [None]:
        raise ConfigError("no problem given (use --problem or a config file)")
    precs = args.preconditioner or base.pop("preconditioners", None) or [base.get("preconditioner", "none")]
    overrides = {
        "variants": args.variants,
        "max_iter": args.max_iter,
        "stop": args.stop,
        "seed": args.seed,
        "cache_dir": args.cache_dir,
        "output_dir": args.output_dir,
        "cadence": args.cadence,
        "workers": args.workers,
    }
    configs = []
    for problem in problems:
        for prec in precs:
            data = dict(base, problem=problem, preconditioner=prec)
            data.update({k: v for k, v in overrides.items() if v is not None})
            configs.append(ExperimentConfig.from_dict(data))
    return configs


def _cmd_run(args):
    configs = _load_config(args)
    table = SummaryTable()
    broken = []
    for config in configs:
        result = run_experiment(config)
        table.rows.append(result.row)
        if config.output_dir:
            append_index(result, config.output_dir)
            plot = Path(config.output_dir) / f"plot_{result.problem}_{config.preconditioner}.csv"
            emit_plot_data(result.histories, plot)
        broken += [f"{result.problem}/{config.preconditioner}/{label}: {h.status}"
                   for label, h in result.histories.items() if broke_down(h)]
    print(emit_table(table), end="")
    for line in broken:
        print(f"breakdown: {line}", file=sys.stderr)
    if broken and args.strict:
        return EXIT_BREAKDOWN
    return EXIT_OK


def _cmd_summarize(args):
    table = table_from_index(args.path)
    text = emit_table(table)
    if args.output:
        Path(args.output).write_text(text)
    print(text, end="")
    return EXIT_OK


def _cmd_predict(args):
    if args.scenario:
        try:
            data = yaml.safe_load(Path(args.scenario).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read scenario {args.scenario}: {exc}") from exc
        try:
            scenario = ScalingScenario.from_dict(data)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
    else:
        scenario = default_scenario()
    variants = args.variants or [v.label for v in ALL_VARIANTS]
    try:
        predictions = [predict_scaling(v, scenario, iterations=args.iterations) for v in variants]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    rows = [(p.variant, pt.nodes, pt.seconds) for p in predictions for pt in p.points]
    if args.output:
        with open(args.output, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("variant", "nodes", "seconds"))
            writer.writerows((v, n, repr(s)) for v, n, s in rows)
    width = max(len(p.variant) for p in predictions)
    print("nodes".ljust(width) + "".join(f"{n:>12d}" for n in scenario.nodes))
    for p in predictions:
        print(p.variant.ljust(width) + "".join(f"{pt.seconds:12.4g}" for pt in p.points))
    for p in predictions:
        if p.variant != "HS":
            where = "never" if p.crossover_nodes is None else f"from {p.crossover_nodes} nodes"
            print(f"{p.variant} faster than HS: {where}")
    return EXIT_OK


def _cmd_list(args):
    print(f"{'variant':<10} {'memory':<8} {'time per iteration':<26} description")
    for v in ALL_VARIANTS:
        desc, mem, time = _DESCRIPTIONS[v.label]
        print(f"{v.label:<10} {mem:<8} {time:<26} {desc}")
    print("\noptions: VARIANT:recompute_nu=false, PIPE_*:recompute_w=false, "
          "nu=expanded|simplified|meurant, CG_CG/GV:expanded_mu=true")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cgvariants", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download matrices into the cache")
    p.add_argument("names", nargs="*")
    p.add_argument("--all", action="store_true", help="every matrix in the reference table")
    p.add_argument("--cache-dir", help="cache directory (default $CGVARIANTS_CACHE or ~/.cache/cgvariants)")
    p.add_argument("--base-url", action="append", help="URL template with {group} and {name}; repeatable")
    p.add_argument("--refresh", action="store_true", help="download again and check the recorded hash")
    p.set_defaults(func=_cmd_fetch)

    p = sub.add_parser("run", help="run variants on problems and print a summary table")
    p.add_argument("-c", "--config", help="YAML experiment file; flags override its entries")
    p.add_argument("-p", "--problem", action="append",
                   help="matrix name, .mtx path or model:n=48,rho=0.8,kappa=1e3; repeatable")
    p.add_argument("-P", "--preconditioner", action="append", choices=("none", "jacobi"))
    p.add_argument("--variants", nargs="+", help="e.g. HS PR PIPE_PR:recompute_w=false")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--stop", choices=("stagnation", "error_reduction", "fixed"))
    p.add_argument("--seed", type=int)
    p.add_argument("--cadence", type=int, help="probe every m-th iteration")
    p.add_argument("--workers", type=int, help="solve variants in this many threads")
    p.add_argument("--cache-dir")
    p.add_argument("-o", "--output-dir", help="write per-iteration CSVs, plot data and index here")
    p.add_argument("--strict", action="store_true", help="exit with status 4 if any variant breaks down")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("summarize", help="rebuild the summary table from a run's output directory")
    p.add_argument("path", help="output directory or its index.csv")
    p.add_argument("-o", "--output", help="also write the table to this file")
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("predict-scaling", help="modelled time per run versus node count")
    p.add_argument("-s", "--scenario", help="YAML scenario file (nodes and cost expressions)")
    p.add_argument("--variants", nargs="+")
    p.add_argument("--iterations", type=int, default=1500)
    p.add_argument("-o", "--output", help="write a CSV of variant,nodes,seconds")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("list-variants", help="show the available variants and their costs")
    p.set_defaults(func=_cmd_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FetchError as exc:
        print(f"fetch failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FETCH
    except (MatrixMarketError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
