"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 infeasible operation (exhaustive
search over the variable cap, or no embedding found).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, penalty
from . import qubo as qb
from . import schedule as sched
from . import solver as slv
from .embedding import (HardwareGraph, chimera_graph, embedding_stats,
                        embedding_to_json, find_embedding, pegasus_graph)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exit code is 2; we use 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_target(text: str) -> HardwareGraph:
    family, _, rest = text.partition(":")
    try:
        if family == "chimera":
            m, n, t = (int(v) for v in rest.split(","))
            return chimera_graph(m, n, t)
        if family == "pegasus":
            return pegasus_graph(int(rest))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    raise argparse.ArgumentTypeError(f"unknown target {text!r}")


def _parse_sizes(text: str) -> list[int]:
    return [int(v) for v in text.split(",")]


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _build_parser() -> _Parser:
    p = _Parser(prog="breakopt",
                description="Round-robin break minimization via QUBO models")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a seeded timetable")
    gen.add_argument("--teams", type=int, required=True)
    gen.add_argument("--kind", choices=["mdrrt", "drrt"], default="mdrrt")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.add_argument("--format", choices=["json", "csv"], default="json")

    build = sub.add_parser("build", help="timetable JSON -> QUBO file")
    build.add_argument("timetable", help="timetable JSON path")
    build.add_argument("--out", default=None)
    build.add_argument("--format", choices=["json", "csv"], default="json",
                       help="csv selects the plain-text coordinate list")

    solve = sub.add_parser("solve", help="QUBO file -> sample set")
    solve.add_argument("qubo", help="QUBO JSON path")
    solve.add_argument("--solver", choices=["exhaustive", "sa", "local"], default="sa")
    solve.add_argument("--reads", type=int, default=1000)
    solve.add_argument("--sweeps", type=int, default=100)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--out", default=None)
    solve.add_argument("--format", choices=["json", "csv"], default="json")

    emb = sub.add_parser("embed", help="QUBO + topology -> embedding JSON + stats")
    emb.add_argument("qubo", help="QUBO JSON path")
    emb.add_argument("--target", type=_parse_target, required=True,
                     help="chimera:m,n,t or pegasus:m")
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--out", default=None, help="embedding JSON path")

    feas = sub.add_parser("feasibility", help="penalty-encoding feasibility study CSV")
    feas.add_argument("--n-max", type=int, default=6)
    feas.add_argument("--reads", type=int, default=1000)
    feas.add_argument("--seed", type=int, default=0)
    feas.add_argument("--out", default=None)

    b = sub.add_parser("bench", help="experiment tables")
    b.add_argument("experiment", choices=["exp1", "exp2", "survey"])
    b.add_argument("--teams", type=_parse_sizes, default=[4, 6, 8],
                   help="comma-separated even team counts")
    b.add_argument("--kind", choices=["mdrrt", "drrt"], default="mdrrt")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--instances", type=int, default=5)
    b.add_argument("--solver", choices=["exhaustive", "sa", "local"], default="sa")
    b.add_argument("--reads", type=int, default=1000)
    b.add_argument("--sweeps", type=int, default=100)
    b.add_argument("--budget-secs", type=float, default=bench.DEFAULT_BUDGET_SECS)
    b.add_argument("--target", type=_parse_target, default=None,
                   help="hardware graph for the survey (default pegasus:16)")
    b.add_argument("--out", default=None)
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    return p


def _cmd_generate(args) -> int:
    kind = sched.Kind.MDRRT if args.kind == "mdrrt" else sched.Kind.DRRT
    tt = (sched.random_mdrrt if kind is sched.Kind.MDRRT else sched.random_drrt)(
        args.teams, args.seed)
    if args.format == "json":
        _write(args.out, sched.timetable_to_json(tt) + "\n")
    else:
        _write(args.out, sched.timetable_to_csv(tt))
    return 0


def _cmd_build(args) -> int:
    tt, _ = sched.timetable_from_json(Path(args.timetable).read_text())
    q, _ = qb.build_qubo(tt)
    if args.format == "json":
        _write(args.out, qb.qubo_to_json(q) + "\n")
    else:
        _write(args.out, qb.qubo_to_coord_text(q))
    return 0


def _cmd_solve(args) -> int:
    q = qb.qubo_from_json(Path(args.qubo).read_text())
    if args.solver == "exhaustive":
        states, best = slv.exhaustive_solve(q)
        records = [slv.SampleRecord(state=s, energy=best, occurrences=1) for s in states]
        ss = slv.SampleSet(records=records,
                           metadata={"solver": "exhaustive", "num_vars": q.num_vars})
    elif args.solver == "sa":
        cfg = slv.AnnealConfig(reads=args.reads, sweeps=args.sweeps, seed=args.seed)
        ss = slv.simulated_annealing(q, cfg)
    else:
        rng = np.random.default_rng(args.seed)
        results = [slv.local_search(q, rng.integers(0, 2, size=q.num_vars))
                   for _ in range(args.reads)]
        counts: dict[tuple[int, ...], tuple[float, int]] = {}
        for x, e in results:
            prev = counts.get(x)
            counts[x] = (e, 1 if prev is None else prev[1] + 1)
        records = sorted((slv.SampleRecord(state=s, energy=e, occurrences=n)
                          for s, (e, n) in counts.items()),
                         key=lambda r: (r.energy, r.state))
        ss = slv.SampleSet(records=records,
                           metadata={"solver": "local", "seed": args.seed,
                                     "reads": args.reads})
    if args.format == "json":
        _write(args.out, slv.sampleset_to_json(ss) + "\n")
    else:
        _write(args.out, slv.sampleset_to_csv(ss))
    return 0


def _cmd_embed(args) -> int:
    q = qb.qubo_from_json(Path(args.qubo).read_text())
    g = qb.source_graph(q)
    emb = find_embedding(g, args.target, seed=args.seed)
    if emb is None:
        print("no embedding found within the retry budget", file=sys.stderr)
        return 2
    _write(args.out, embedding_to_json(emb) + "\n")
    stats = embedding_stats(g, emb)
    print("nodes,edges,qubits,qubits_per_node,max_chain_length")
    print(f"{stats.nodes},{stats.edges},{stats.qubits_used},"
          f"{stats.qubits_per_node},{stats.max_chain_length}")
    return 0


def _cmd_feasibility(args) -> int:
    base = penalty.WEAK_SAMPLER
    stats = []
    for n in range(2, args.n_max + 1):
        cfg = slv.AnnealConfig(reads=1, sweeps=base.sweeps, beta_start=base.beta_start,
                               beta_end=base.beta_end, seed=args.seed)
        stats.append(penalty.feasibility_experiment(n, args.reads, cfg))
    _write(args.out, penalty.stats_to_csv(stats))
    return 0


def _cmd_bench(args) -> int:
    kind = sched.Kind.MDRRT if args.kind == "mdrrt" else sched.Kind.DRRT
    spec = bench.SolverSpec(name=args.solver, reads=args.reads, sweeps=args.sweeps)
    cfg = bench.ExperimentConfig(
        team_sizes=args.teams, solvers=[spec], kind=kind,
        instances_per_size=args.instances, master_seed=args.seed,
        budget_secs=args.budget_secs)
    if args.experiment == "exp1":
        rows = bench.run_experiment1(cfg)
    elif args.experiment == "exp2":
        chaser = bench.SolverSpec(name="local", reads=1)
        rows = bench.run_experiment2(cfg, spec, chaser)
    else:
        target = args.target if args.target is not None else pegasus_graph(16)
        rows = bench.run_embedding_survey(cfg, target)
    if args.format == "csv":
        _write(args.out, bench.rows_to_csv(rows))
    else:
        _write(args.out, json.dumps([row.__dict__ for row in rows], indent=2) + "\n")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "build": _cmd_build,
    "solve": _cmd_solve,
    "embed": _cmd_embed,
    "feasibility": _cmd_feasibility,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except slv.CapacityError as exc:
        print(f"breakopt: infeasible: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"breakopt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
