"""Command-line entry point: ``hubnet <command> ...``.

Exit codes: 0 success, 2 input/validation error, 3 infeasible constraints,
4 exhaustive-search guard refusal.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import platform
import sys
import time
from datetime import datetime, timezone

from . import __version__
from .assignment import decode
from .config import format_config, load_config
from .costs import evaluate
from .dataio import (
    dump_json,
    ensure_dir,
    hubs_chromosome,
    load_inputs,
    plan_payload,
    read_design_hubs,
    write_flows,
    write_reports,
    write_sites,
)
from .errors import HubnetError, InputError
from .ga import run_ga
from .oracle import brute_force_solve
from .scenario import DEFAULT_RADIUS_KM, compare_scenarios, rationalize
from .synth import generate

log = logging.getLogger("hubnet")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_inputs(p):
    p.add_argument("--sites", required=True, help="sites.csv")
    p.add_argument("--flows", required=True, help="flows.csv")
    p.add_argument("--config", help="key = value config file (defaults if omitted)")
    p.add_argument("--out", required=True, help="output directory")


def _settings(args):
    settings = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        settings = settings.replace("ga", rng_seed=args.seed)
    if getattr(args, "workers", None) is not None:
        settings = settings.replace("ga", workers=args.workers)
    if getattr(args, "milkrun_scale", None) is not None:
        settings = settings.replace("costs", milkrun_scale=args.milkrun_scale)
    return settings


def _meta(command, started, **extra):
    return {
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "elapsed_s": round(time.time() - started, 3),
        "hubnet_version": __version__,
        "python": platform.python_version(),
        **extra,
    }


def cmd_solve(args):
    started = time.time()
    settings = _settings(args)
    problem = load_inputs(args.sites, args.flows, settings)
    result = run_ga(problem, settings.ga)
    write_reports(args.out, problem, result.best_design, result.best_cost, solver="ga",
                  feasible=result.best_feasible, history=result.history,
                  generations_run=result.generations_run, rng_seed=settings.ga.rng_seed,
                  meta=_meta("solve", started, evaluations=result.evaluations,
                             ga=dataclasses.asdict(settings.ga)))
    c = result.best_cost
    print(f"hubs={len(result.best_design.hubs)} total={c.total:.2f} feasible={result.best_feasible} "
          f"milkrun_breaches={c.milkrun_breach_count} tat_breach_shipments={c.tat_breach_shipments:g}")
    return 0


def cmd_oracle(args):
    started = time.time()
    problem = load_inputs(args.sites, args.flows, _settings(args))
    design, cost = brute_force_solve(problem)
    write_reports(args.out, problem, design, cost, solver="oracle", meta=_meta("oracle", started))
    print(f"hubs={len(design.hubs)} total={cost.total:.2f}")
    return 0


def cmd_evaluate(args):
    started = time.time()
    problem = load_inputs(args.sites, args.flows, _settings(args))
    hubs = [h.strip() for h in args.hubs.split(",") if h.strip()]
    if not hubs:
        raise InputError("--hubs lists no hub ids")
    design = decode(hubs_chromosome(hubs, problem), problem)
    cost = evaluate(design, problem)
    write_reports(args.out, problem, design, cost, solver="evaluate", meta=_meta("evaluate", started))
    print(f"hubs={len(design.hubs)} total={cost.total:.2f}")
    return 0


def cmd_rationalize(args):
    started = time.time()
    problem = load_inputs(args.sites, args.flows, _settings(args))
    design = decode(hubs_chromosome(read_design_hubs(args.design), problem), problem)
    plan = rationalize(design, problem, args.radius_km)
    out = ensure_dir(args.out)
    dump_json(out / "plan.json", plan_payload(plan, args.radius_km))
    write_reports(out, problem, plan.final_design, plan.final_cost, solver="rationalize",
                  meta=_meta("rationalize", started))
    red = plan.breach_reduction
    print(f"final_hubs={len(plan.final_hubs)} substitutions={len(plan.substitutions)} "
          f"open={len(plan.hubs_to_open)} close={len(plan.hubs_to_close)} "
          f"breach_reduction={'n/a' if red is None else f'{red:.2f}%'}")
    return 0


def cmd_sweep(args):
    settings = _settings(args)
    problem = load_inputs(args.sites, args.flows, settings)
    runs = compare_scenarios(problem, settings.ga, args.scale_factors)
    out = ensure_dir(args.out)
    header = ["milkrun_scale", "hub_count", "total", "milkrun_breach_count", "tat_breach_shipments"]
    rows = [[f"{r.milkrun_scale:g}", r.hub_count, f"{r.total:.9g}", r.milkrun_breach_count,
             f"{r.tat_breach_shipments:.9g}"] for r in runs]
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    for row in [header] + rows:
        print("  ".join(str(x).rjust(w) for x, w in zip(row, widths)))
    return 0


def cmd_generate(args):
    sites, flows = generate(args.n_sites, args.n_clusters, args.seed, args.profile,
                            n_fixed=args.n_fixed)
    out = ensure_dir(args.out)
    write_sites(out / "sites.csv", sites)
    write_flows(out / "flows.csv", flows)
    (out / "config.txt").write_text(format_config(), encoding="utf-8")
    print(f"wrote {len(sites)} sites, {len(flows)} flows to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hubnet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimise hub locations with the genetic algorithm")
    _add_inputs(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--milkrun-scale", type=float)
    p.add_argument("--workers", type=int, help="threads for fitness evaluation")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact optimum by enumeration (at most 20 sites)")
    _add_inputs(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("evaluate", help="cost a given hub set")
    _add_inputs(p)
    p.add_argument("--hubs", required=True, help="comma-separated hub ids")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rationalize", help="substitute nearby existing hubs into a solved design")
    _add_inputs(p)
    p.add_argument("--design", required=True, help="design.json from solve")
    p.add_argument("--radius-km", type=float, default=DEFAULT_RADIUS_KM)
    p.set_defaults(func=cmd_rationalize)

    p = sub.add_parser("sweep", help="one GA run per milk-run scale factor")
    _add_inputs(p)
    p.add_argument("--scale-factors", type=_float_list, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("generate", help="write a synthetic instance")
    p.add_argument("--n-sites", type=int, required=True)
    p.add_argument("--n-clusters", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", choices=["peak", "average"], default="peak")
    p.add_argument("--n-fixed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HubnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
