"""Penalty encoding of permutation constraints and feasibility sampling.

The model has n*n bits x[i][j] (row-major, index i*n + j) and energy
sum_i (1 - sum_j x_ij)^2 + sum_j (1 - sum_i x_ij)^2: zero exactly on
permutation matrices. Sampling it shows how quickly the feasible fraction
collapses as n grows, even with a trivial objective.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .qubo import Qubo
from .solver import AnnealConfig, simulated_annealing

# Deliberately weak sampler: with a strong schedule a classical annealer finds
# permutation matrices at every small n and the decay curve disappears.
WEAK_SAMPLER = AnnealConfig(reads=1, sweeps=4, beta_start=0.2, beta_end=1.0, seed=0)


@dataclass(frozen=True)
class FeasibilityStats:
    n: int
    per_feasible: float
    ev_break: float
    ev_energy: float


def permutation_qubo(n: int) -> Qubo:
    """Squared-violation expansion of the row/column one-hot constraints."""
    if n < 2:
        raise ValueError("n must be >= 2")
    q = Qubo(num_vars=n * n)
    groups = [[i * n + j for j in range(n)] for i in range(n)]  # rows
    groups += [[i * n + j for i in range(n)] for j in range(n)]  # columns
    for group in groups:
        q.offset += 1.0
        for v in group:
            q.add_linear(v, -1.0)
        for a in range(n):
            for b in range(a + 1, n):
                q.add_quadratic(group[a], group[b], 2.0)
    return q


def violated_constraints(x, n: int) -> int:
    """Count of row and column sums different from 1 (0 .. 2n)."""
    grid = np.asarray(x).reshape(n, n)
    if grid.size != n * n:
        raise ValueError(f"expected {n * n} bits")
    rows = grid.sum(axis=1)
    cols = grid.sum(axis=0)
    return int(np.sum(rows != 1) + np.sum(cols != 1))


def feasibility_experiment(n: int, reads: int, cfg: AnnealConfig | None = None
                           ) -> FeasibilityStats:
    """Sample the penalty model and summarize feasibility of the reads.

    cfg defaults to WEAK_SAMPLER (its read count is overridden by `reads`).
    """
    base = cfg if cfg is not None else WEAK_SAMPLER
    run_cfg = AnnealConfig(reads=reads, sweeps=base.sweeps,
                           beta_start=base.beta_start, beta_end=base.beta_end,
                           seed=base.seed)
    q = permutation_qubo(n)
    ss = simulated_annealing(q, run_cfg)
    feasible = 0
    sum_break = 0
    sum_energy = 0.0
    for rec in ss.records:
        v = violated_constraints(rec.state, n)
        if v == 0:
            feasible += rec.occurrences
        sum_break += v * rec.occurrences
        sum_energy += rec.energy * rec.occurrences
    total = ss.num_reads
    return FeasibilityStats(
        n=n,
        per_feasible=feasible / total,
        ev_break=sum_break / total,
        ev_energy=sum_energy / total,
    )


def stats_to_csv(stats: list[FeasibilityStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "per_feasible", "ev_break", "ev_energy"])
    for s in stats:
        w.writerow([s.n, s.per_feasible, s.ev_break, s.ev_energy])
    return buf.getvalue()
