"""Command line entry point: ``fusslab run | sweep | treesim | hist``."""
from __future__ import annotations

import argparse
import csv
import random
import sys
from contextlib import contextmanager

from . import io as fio
from .bench import (ExperimentSpec, fitness_histogram, make_problem, run_experiment,
                    summarize_stats, sweep)
from .engine import EngineConfig, StoppingRule, default_nbins
from .records import RunRecord
from .treesim import build_tree, heuristic_times, scheme_pair, simulate_hitting_time


def int_list(text: str) -> list[int]:
    """``2..12`` (inclusive range), ``2,4,6`` or a mix of both."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True,
                   help="deceptive:<D>:<width> | tsp:<n or file> | scp:<file> | sat:<file>")
    p.add_argument("--select", default="fuss", help="uniform | tour:<k> | fuss | sis | sisp | elite")
    p.add_argument("--delete", default="random", help="random | fuds | closest | sid | parent")
    p.add_argument("--pop", type=int, default=100, help="population capacity")
    p.add_argument("--init-pop", type=int, help="initial population size (default: capacity)")
    p.add_argument("--pc", type=float, default=0.5, help="crossover probability")
    p.add_argument("--pm", type=float, default=0.5, help="mutation probability after crossover")
    p.add_argument("--bins", type=int, help="fitness bins for binned deletion")
    p.add_argument("--seed", type=int, default=0, help="base seed; repetition r uses seed+r")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--target", action="store_true", help="stop at the first optimal individual")
    p.add_argument("--gens", type=int, help="stop after this many generations")
    p.add_argument("--stall-gens", type=int, help="stop after this many generations without improvement")
    p.add_argument("--max-cycles", type=int, default=10_000_000)
    p.add_argument("--out", help="CSV output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fusslab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one experiment: per-repetition records")
    _engine_flags(run)
    run.add_argument("--summary-out", help="write the summary row as CSV here")
    run.add_argument("--trace", action="store_true", help="record a diversity trace")
    run.add_argument("--trace-out", help="diversity trace CSV (implies --trace)")
    run.add_argument("--trace-every", type=float, default=1.0, help="generations between samples")
    run.add_argument("--window", type=float, default=20.0, help="high-fitness diversity window")

    sw = sub.add_parser("sweep", help="grid of experiments, one summary row each")
    _engine_flags(sw)
    sw.add_argument("--tour-sizes", type=int_list, help="e.g. 2..12 or 2,4,6")
    sw.add_argument("--deltas", type=float_list, help="deceptive feature widths, comma separated")
    sw.add_argument("--pops", type=int_list, help="population capacities")

    tr = sub.add_parser("treesim", help="hitting times on the fitness-tree model")
    tr.add_argument("--levels", type=int, default=5)
    tr.add_argument("--branch", type=int, default=2)
    tr.add_argument("--species", type=int, default=4)
    tr.add_argument("--p", type=float, default=0.05)
    tr.add_argument("--capacity", type=int, default=50)
    tr.add_argument("--scheme", default="fuss", help="rw | fuss | fuds | tour:<k>")
    tr.add_argument("--reps", type=int, default=20)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--max-cycles", type=int, default=10_000_000)
    tr.add_argument("--out", help="RunRecord CSV (default: stdout)")
    tr.add_argument("--heuristics-out", help="CSV with the closed-form estimates and the simulated mean")

    hi = sub.add_parser("hist", help="end-of-run fitness histogram and diversity trace")
    _engine_flags(hi)
    hi.add_argument("--hist-bins", type=int, help="histogram bins (default: one per fitness level when known)")
    hi.add_argument("--trace-out", help="diversity trace CSV")
    hi.add_argument("--trace-every", type=float, default=1.0)
    hi.add_argument("--window", type=float, default=20.0)
    return ap


@contextmanager
def _dest(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _spec(args, trace_every=None) -> ExperimentSpec:
    cfg = EngineConfig(capacity=args.pop, selection=args.select, deletion=args.delete,
                       crossover_probability=args.pc, mutation_probability=args.pm,
                       initial_size=args.init_pop, nbins=args.bins, seed=args.seed)
    stop = StoppingRule(max_cycles=args.max_cycles, generations=args.gens,
                        stall_generations=args.stall_gens, target=args.target)
    if not (args.target or args.gens or args.stall_gens) and args.max_cycles == 10_000_000:
        raise ValueError("give a stopping rule: --target, --gens, --stall-gens or --max-cycles")
    return ExperimentSpec(args.problem, cfg, stop, reps=args.reps, base_seed=args.seed,
                          trace_every=trace_every, window=getattr(args, "window", 20.0))


def _say(summary) -> None:
    s = summary.stats
    print(f"{summary.metric}: mean {s.mean:.6g}  sd {s.sstd:.6g}  se {s.stderr:.6g}  "
          f"ci95 [{s.ci95[0]:.6g}, {s.ci95[1]:.6g}]  censored {summary.censored}",
          file=sys.stderr)


def cmd_run(args) -> None:
    tracing = args.trace or args.trace_out is not None
    summary = run_experiment(_spec(args, args.trace_every if tracing else None))
    with _dest(args.out) as fh:
        fio.write_run_csv(summary.records, fh)
    if args.summary_out:
        fio.write_summary_csv([summary.row()], args.summary_out)
    if tracing:
        if args.trace_out:
            fio.write_trace_csv(summary.traces, args.trace_out)
        elif args.out:
            fio.write_trace_csv(summary.traces, sys.stdout)
        else:
            raise ValueError("--trace with runs on stdout needs --trace-out")
    _say(summary)


def cmd_sweep(args) -> None:
    if args.tour_sizes and not args.select.startswith("tour"):
        raise ValueError("--tour-sizes needs --select tour")
    rows = sweep(_spec(args), args.tour_sizes or (), args.deltas or (), args.pops or ())
    with _dest(args.out) as fh:
        fio.write_summary_csv([s.row() for s in rows], fh)


def cmd_treesim(args) -> None:
    model = build_tree(args.levels, args.branch, args.species, args.p)
    sel, dele = scheme_pair(args.scheme)
    cap = 1 if args.scheme == "rw" else args.capacity
    records = []
    for r in range(args.reps):
        seed = args.seed + r
        h = simulate_hitting_time(model, args.scheme, cap, random.Random(seed), args.max_cycles)
        records.append(RunRecord(
            problem=f"tree:{args.levels}:{args.branch}:{args.species}:{args.p:g}",
            selection=sel, deletion=dele,
            tournament_k=int(sel.split(":")[1]) if sel.startswith("tour:") else None,
            capacity=cap, pc=0.0, pm=1.0, seed=seed, cycles=h.cycles,
            generations=h.cycles / cap,
            best_fitness=float(args.levels - 1 if not h.censored else -1),
            best_raw=float(args.levels - 1 if not h.censored else -1),
            T_target=None if h.censored else h.cycles, censored=h.censored))
    with _dest(args.out) as fh:
        fio.write_run_csv(records, fh)
    ht = heuristic_times(args.levels, args.branch, args.species, args.p, cap)
    mean = summarize_stats([r.cycles for r in records]).mean
    censored = sum(r.censored for r in records)
    if args.heuristics_out:
        with open(args.heuristics_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scheme", *ht, "simulated_mean", "censored"])
            w.writerow([args.scheme, *(f"{v:.6g}" for v in ht.values()), f"{mean:.6g}", censored])
    print(" ".join(f"{k}={v:.6g}" for k, v in ht.items()) +
          f"  simulated({args.scheme})={mean:.6g}  censored={censored}", file=sys.stderr)


def cmd_hist(args) -> None:
    if args.reps != 1:
        raise ValueError("hist works on a single run; use --seed to pick it")
    spec = _spec(args, args.trace_every if args.trace_out else None)
    problem = make_problem(spec.problem, spec.base_seed)
    summary = run_experiment(spec, problem, keep_populations=True)
    pop = summary.final_populations[0]
    nbins = args.hist_bins or problem.n_levels or default_nbins(len(pop))
    with _dest(args.out) as fh:
        fio.write_histogram_csv(fitness_histogram(pop, problem.bounds, nbins), fh)
    if args.trace_out:
        fio.write_trace_csv(summary.traces, args.trace_out)
    _say(summary)


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "treesim": cmd_treesim, "hist": cmd_hist}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ValueError, TypeError, OSError, RuntimeError) as exc:
        print(f"fusslab: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
