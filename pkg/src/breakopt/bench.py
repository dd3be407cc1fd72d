"""Experiment harness: seeded instance generation, solver sweeps, table reports.

The master seed fans out to per-(size, instance, role) sub-seeds through
SHA-256 of the string "master/size/instance/role" (first 8 bytes, big
endian), so any sub-experiment can be reproduced in isolation.
"""
from __future__ import annotations

import csv
import hashlib
import io
import time
from dataclasses import dataclass, field

import numpy as np

from . import qubo as qb
from . import schedule as sched
from . import solver as slv
from .embedding import HardwareGraph, embedding_stats, find_embedding

DEFAULT_BUDGET_SECS = 300.0


def subseed(master: int, *parts) -> int:
    text = "/".join([str(master), *map(str, parts)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass(frozen=True)
class SolverSpec:
    name: str  # "exhaustive", "sa", or "local"
    reads: int = 1000
    sweeps: int = 100

    def __post_init__(self):
        if self.name not in ("exhaustive", "sa", "local"):
            raise ValueError(f"unknown solver {self.name!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    team_sizes: list[int]
    solvers: list[SolverSpec]
    kind: sched.Kind = sched.Kind.MDRRT
    instances_per_size: int = 5
    master_seed: int = 0
    budget_secs: float = DEFAULT_BUDGET_SECS

    def __post_init__(self):
        if not self.team_sizes:
            raise ValueError("team_sizes must be non-empty")
        for n2 in self.team_sizes:
            if n2 < 4 or n2 % 2 != 0:
                raise ValueError(f"team sizes must be even and >= 4, got {n2}")
        if not self.solvers:
            raise ValueError("at least one solver is required")
        if self.instances_per_size < 1:
            raise ValueError("instances_per_size must be >= 1")
        if self.budget_secs <= 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class ResultRow:
    teams: int
    solver: str
    mean_breaks: float
    mean_time_secs: float
    optimal_fraction: float | None
    lower_bound: int
    failures: int


def _make_instance(kind: sched.Kind, teams: int, seed: int) -> sched.Timetable:
    if kind is sched.Kind.MDRRT:
        return sched.random_mdrrt(teams, seed)
    if kind is sched.Kind.DRRT:
        return sched.random_drrt(teams, seed)
    raise ValueError("experiments run on DRRT or MDRRT instances")


def _recount(vm: qb.VariableMap, state) -> int:
    """Independent recount of the breaks behind a reported state."""
    return sched.count_breaks(qb.decode(np.asarray(state), vm))


def _run_one(spec: SolverSpec, q: qb.Qubo, vm: qb.VariableMap, seed: int
             ) -> tuple[float, float]:
    """Returns (breaks of the best state found, wall seconds)."""
    t0 = time.monotonic()
    if spec.name == "exhaustive":
        states, best = slv.exhaustive_solve(q)
        state = states[0]
    elif spec.name == "sa":
        cfg = slv.AnnealConfig(reads=spec.reads, sweeps=spec.sweeps, seed=seed)
        rec = slv.simulated_annealing(q, cfg).best
        state, best = rec.state, rec.energy
    else:
        rng = np.random.default_rng(seed)
        best, state = None, None
        for _ in range(spec.reads):
            x, e = slv.local_search(q, rng.integers(0, 2, size=q.num_vars))
            if best is None or e < best:
                best, state = e, x
    wall = time.monotonic() - t0
    breaks = _recount(vm, state)
    if breaks != int(round(best)):
        raise AssertionError(f"energy {best} disagrees with recounted breaks {breaks}")
    return float(breaks), wall


def run_experiment1(cfg: ExperimentConfig) -> list[ResultRow]:
    """Per size and solver: mean breaks over seeded instances, with an exact
    oracle attached automatically whenever the model is small enough."""
    rows: list[ResultRow] = []
    for teams in cfg.team_sizes:
        instances = []
        for idx in range(cfg.instances_per_size):
            tt = _make_instance(cfg.kind, teams, subseed(cfg.master_seed, teams, idx, "inst"))
            instances.append(qb.build_qubo(tt))
        oracles: list[float | None] = []
        for q, _ in instances:
            if q.num_vars <= slv.EXHAUSTIVE_VAR_CAP:
                oracles.append(slv.exhaustive_solve(q)[1])
            else:
                oracles.append(None)
        for spec in cfg.solvers:
            breaks, times, optimal, failures = [], [], [], 0
            for idx, (q, vm) in enumerate(instances):
                seed = subseed(cfg.master_seed, teams, idx, spec.name)
                try:
                    b, wall = _run_one(spec, q, vm, seed)
                except slv.CapacityError:
                    failures += 1
                    continue
                breaks.append(b)
                times.append(wall)
                if oracles[idx] is not None:
                    if b < oracles[idx] - 1e-9:
                        raise AssertionError("solver beat the exhaustive oracle")
                    optimal.append(1.0 if b <= oracles[idx] + 1e-9 else 0.0)
            rows.append(ResultRow(
                teams=teams,
                solver=spec.name,
                mean_breaks=float(np.mean(breaks)) if breaks else float("nan"),
                mean_time_secs=float(np.mean(times)) if times else float("nan"),
                optimal_fraction=float(np.mean(optimal)) if optimal else None,
                lower_bound=sched.lower_bound(cfg.kind, teams),
                failures=failures,
            ))
    return rows


@dataclass(frozen=True)
class ChaseRow:
    teams: int
    reference_breaks: float
    mean_time_to_target: float
    reached_fraction: float


def _effort_solver(spec: SolverSpec, seed: int):
    if spec.name == "sa":
        return slv.sa_effort_solver(slv.AnnealConfig(
            reads=spec.reads, sweeps=spec.sweeps, seed=seed))
    if spec.name == "local":
        return slv.local_search_effort_solver(seed)
    def run_exact(q, effort, attempt):
        return slv.exhaustive_solve(q)[1]
    return run_exact


def run_experiment2(cfg: ExperimentConfig, reference: SolverSpec,
                    chaser: SolverSpec) -> list[ChaseRow]:
    """Time for the chaser to reach the energy the reference solver attains."""
    rows: list[ChaseRow] = []
    for teams in cfg.team_sizes:
        ref_breaks, times, reached_flags = [], [], []
        for idx in range(cfg.instances_per_size):
            tt = _make_instance(cfg.kind, teams, subseed(cfg.master_seed, teams, idx, "inst"))
            q, vm = qb.build_qubo(tt)
            ref_seed = subseed(cfg.master_seed, teams, idx, "reference")
            target, _ = _run_one(reference, q, vm, ref_seed)
            ref_breaks.append(target)
            chase_seed = subseed(cfg.master_seed, teams, idx, "chaser")
            reached, elapsed, _ = slv.time_to_target(
                q, target, _effort_solver(chaser, chase_seed), cfg.budget_secs)
            times.append(elapsed)
            reached_flags.append(1.0 if reached else 0.0)
        rows.append(ChaseRow(
            teams=teams,
            reference_breaks=float(np.mean(ref_breaks)),
            mean_time_to_target=float(np.mean(times)),
            reached_fraction=float(np.mean(reached_flags)),
        ))
    return rows


@dataclass(frozen=True)
class SurveyRow:
    teams: int
    kind: str
    nodes: float
    edges: float
    mean_qubits: float | None
    qubits_per_node: float | None
    embed_failures: int


def run_embedding_survey(cfg: ExperimentConfig, target: HardwareGraph) -> list[SurveyRow]:
    """Source-graph sizes and qubit usage per team count, averaged over instances."""
    rows: list[SurveyRow] = []
    for teams in cfg.team_sizes:
        nodes, edges, qubits, failures = [], [], [], 0
        for idx in range(cfg.instances_per_size):
            tt = _make_instance(cfg.kind, teams, subseed(cfg.master_seed, teams, idx, "inst"))
            q, _ = qb.build_qubo(tt)
            g = qb.source_graph(q)
            nodes.append(g.num_nodes)
            edges.append(len(g.edges))
            emb = find_embedding(g, target, seed=subseed(cfg.master_seed, teams, idx, "embed"))
            if emb is None:
                failures += 1
            else:
                qubits.append(embedding_stats(g, emb).qubits_used)
        mean_nodes = float(np.mean(nodes))
        rows.append(SurveyRow(
            teams=teams,
            kind=cfg.kind.value,
            nodes=mean_nodes,
            edges=float(np.mean(edges)),
            mean_qubits=float(np.mean(qubits)) if qubits else None,
            qubits_per_node=float(np.mean(qubits)) / mean_nodes if qubits else None,
            embed_failures=failures,
        ))
    return rows


# ---------------------------------------------------------------------------
# Table emission

_TIME_COLUMNS = {"mean_time_secs", "mean_time_to_target"}


def rows_to_csv(rows, include_time: bool = True) -> str:
    """CSV for any list of result-row dataclasses; wall-time columns are
    hardware-dependent and can be excluded for determinism comparisons."""
    if not rows:
        return ""
    fields = [f for f in rows[0].__dataclass_fields__
              if include_time or f not in _TIME_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([getattr(row, f) for f in fields])
    return buf.getvalue()
