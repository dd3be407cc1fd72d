"""Classical samplers over QUBO models.

Exact Gray-code enumeration, restart-based simulated annealing, and
steepest-descent local search. All samplers are deterministic given
(model, parameters, seed); the hot loops are JIT-compiled.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .qubo import Qubo

EXHAUSTIVE_VAR_CAP = 30
# Below this size the pure-Python scan wins against the JIT warm-up.
_GRAY_PY_CUTOFF = 18


class CapacityError(ValueError):
    """Raised when an exact method is asked for more variables than its cap."""


@dataclass(frozen=True)
class AnnealConfig:
    reads: int = 1000
    sweeps: int = 100
    beta_start: float = 0.1
    beta_end: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.reads < 1:
            raise ValueError("reads must be >= 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if not (0.0 < self.beta_start < self.beta_end):
            raise ValueError("need 0 < beta_start < beta_end")

    def betas(self) -> np.ndarray:
        """Geometric interpolation from beta_start to beta_end over the sweeps."""
        if self.sweeps == 1:
            return np.array([self.beta_end])
        return np.geomspace(self.beta_start, self.beta_end, self.sweeps)


@dataclass(frozen=True)
class SampleRecord:
    state: tuple[int, ...]
    energy: float
    occurrences: int


@dataclass(frozen=True)
class SampleSet:
    records: list[SampleRecord]
    metadata: dict

    @property
    def best(self) -> SampleRecord:
        return self.records[0]

    @property
    def num_reads(self) -> int:
        return sum(r.occurrences for r in self.records)


def _csr_adjacency(q: Qubo):
    """Symmetric CSR view of the quadratic terms plus the dense linear vector."""
    n = q.num_vars
    c = np.zeros(n)
    for i, v in q.linear.items():
        c[i] = v
    counts = np.zeros(n, dtype=np.int64)
    for (i, j), v in q.quadratic.items():
        counts[i] += 1
        counts[j] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.zeros(indptr[-1], dtype=np.int64)
    values = np.zeros(indptr[-1])
    cursor = indptr[:-1].copy()
    for (i, j), v in q.quadratic.items():
        indices[cursor[i]] = j
        values[cursor[i]] = v
        cursor[i] += 1
        indices[cursor[j]] = i
        values[cursor[j]] = v
        cursor[j] += 1
    return c, indptr, indices, values


def energy(q: Qubo, x) -> float:
    """Full evaluation of offset + linear + quadratic at a bit vector."""
    x = np.asarray(x)
    if x.shape != (q.num_vars,):
        raise ValueError(f"expected {q.num_vars} bits, got shape {x.shape}")
    e = q.offset
    for i, v in q.linear.items():
        if x[i]:
            e += v
    for (i, j), v in q.quadratic.items():
        if x[i] and x[j]:
            e += v
    return float(e)


@njit(cache=True)
def _gray_scan(c, indptr, indices, values, num_vars, cap):  # pragma: no cover
    x = np.zeros(num_vars, np.int8)
    e = 0.0
    best = 0.0
    best_codes = np.zeros(cap, np.int64)
    nbest = 1
    total = np.int64(1) << num_vars
    for m in range(1, total):
        mm = m
        i = 0
        while mm & 1 == 0:
            mm >>= 1
            i += 1
        d = c[i]
        for p in range(indptr[i], indptr[i + 1]):
            if x[indices[p]]:
                d += values[p]
        if x[i]:
            e -= d
            x[i] = 0
        else:
            e += d
            x[i] = 1
        if e < best:
            best = e
            best_codes[0] = m ^ (m >> 1)
            nbest = 1
        elif e == best:
            if nbest < cap:
                best_codes[nbest] = m ^ (m >> 1)
            nbest += 1
    return best, best_codes, nbest


def _gray_scan_py(c, indptr, indices, values, num_vars, cap):
    x = [0] * num_vars
    e = 0.0
    best = 0.0
    best_codes = [0]
    nbest = 1
    for m in range(1, 1 << num_vars):
        i = ((m & -m).bit_length()) - 1
        d = c[i]
        for p in range(indptr[i], indptr[i + 1]):
            if x[indices[p]]:
                d += values[p]
        if x[i]:
            e -= d
            x[i] = 0
        else:
            e += d
            x[i] = 1
        if e < best:
            best = e
            best_codes = [m ^ (m >> 1)]
            nbest = 1
        elif e == best:
            if nbest < cap:
                best_codes.append(m ^ (m >> 1))
            nbest += 1
    return best, best_codes, nbest


def _code_to_bits(code: int, num_vars: int) -> tuple[int, ...]:
    return tuple((code >> i) & 1 for i in range(num_vars))


def exhaustive_solve(q: Qubo, max_states: int = 1000) -> tuple[list[tuple[int, ...]], float]:
    """Global minimum by Gray-code enumeration with O(degree) incremental updates.

    Returns (optimal states up to max_states, optimal energy). Refuses models
    with more than EXHAUSTIVE_VAR_CAP variables.
    """
    if q.num_vars > EXHAUSTIVE_VAR_CAP:
        raise CapacityError(
            f"exhaustive_solve capped at {EXHAUSTIVE_VAR_CAP} variables, got {q.num_vars}")
    if q.num_vars == 0:
        return [()], q.offset
    c, indptr, indices, values = _csr_adjacency(q)
    if q.num_vars <= _GRAY_PY_CUTOFF:
        best, codes, nbest = _gray_scan_py(
            list(c), list(indptr), list(indices), list(values), q.num_vars, max_states)
        kept = codes[:min(nbest, max_states)]
    else:
        best, codes, nbest = _gray_scan(c, indptr, indices, values, q.num_vars, max_states)
        kept = [int(v) for v in codes[:min(nbest, max_states)]]
    states = [_code_to_bits(code, q.num_vars) for code in kept]
    return states, float(best) + q.offset


@njit(cache=True)
def _sa_kernel(c, indptr, indices, values, betas, read_seeds, num_vars):  # pragma: no cover
    reads = read_seeds.shape[0]
    sweeps = betas.shape[0]
    states = np.zeros((reads, num_vars), np.int8)
    energies = np.zeros(reads)
    for r in range(reads):
        np.random.seed(read_seeds[r])
        x = np.zeros(num_vars, np.int8)
        for i in range(num_vars):
            if np.random.random() < 0.5:
                x[i] = 1
        e = 0.0
        for i in range(num_vars):
            if x[i]:
                e += c[i]
                for p in range(indptr[i], indptr[i + 1]):
                    j = indices[p]
                    if j > i and x[j]:
                        e += values[p]
        best_e = e
        best_x = x.copy()
        for sw in range(sweeps):
            beta = betas[sw]
            for i in range(num_vars):
                d = c[i]
                for p in range(indptr[i], indptr[i + 1]):
                    if x[indices[p]]:
                        d += values[p]
                if x[i]:
                    d = -d
                if d < 0.0:
                    accept = True
                elif d == 0.0:
                    # coin-flip on plateaus: always accepting would cycle
                    # deterministically under the fixed sweep order
                    accept = np.random.random() < 0.5
                else:
                    accept = np.random.random() < np.exp(-beta * d)
                if accept:
                    x[i] = 1 - x[i]
                    e += d
                    if e < best_e:
                        best_e = e
                        best_x[:] = x
        states[r] = best_x
        energies[r] = best_e
    return states, energies


def simulated_annealing(q: Qubo, cfg: AnnealConfig) -> SampleSet:
    """Restart-based single-bit-flip Metropolis sampler.

    Each read is an independent restart seeded from (cfg.seed, read index),
    sweeping all variables under the geometric beta schedule and keeping the
    best state it visits. Zero-cost moves are accepted half the time: the
    break landscape has large plateaus from the global home/away flip
    symmetry, and the coin flip diffuses across them without the
    deterministic cycling that always accepting would cause.
    """
    c, indptr, indices, values = _csr_adjacency(q)
    read_seeds = np.random.SeedSequence(cfg.seed).generate_state(cfg.reads).astype(np.int64)
    t0 = time.monotonic()
    states, energies = _sa_kernel(c, indptr, indices, values,
                                  cfg.betas(), read_seeds, q.num_vars)
    wall = time.monotonic() - t0

    counts: dict[tuple[int, ...], tuple[float, int]] = {}
    for r in range(cfg.reads):
        key = tuple(int(b) for b in states[r])
        e = float(energies[r]) + q.offset
        prev = counts.get(key)
        counts[key] = (e, 1 if prev is None else prev[1] + 1)
    records = [SampleRecord(state=s, energy=e, occurrences=n)
               for s, (e, n) in counts.items()]
    records.sort(key=lambda rec: (rec.energy, rec.state))
    meta = {
        "solver": "simulated_annealing",
        "seed": cfg.seed,
        "reads": cfg.reads,
        "sweeps": cfg.sweeps,
        "beta_start": cfg.beta_start,
        "beta_end": cfg.beta_end,
        "wall_time_secs": wall,
    }
    return SampleSet(records=records, metadata=meta)


def local_search(q: Qubo, start) -> tuple[tuple[int, ...], float]:
    """Steepest-descent single-bit flips until no flip strictly improves.

    Ties between improving flips go to the lowest variable index.
    """
    x = np.asarray(start, dtype=np.int8).copy()
    if x.shape != (q.num_vars,):
        raise ValueError(f"expected {q.num_vars} bits, got shape {x.shape}")
    c, indptr, indices, values = _csr_adjacency(q)
    e = energy(q, x)
    while True:
        best_d, best_i = 0.0, -1
        for i in range(q.num_vars):
            d = c[i]
            for p in range(indptr[i], indptr[i + 1]):
                if x[indices[p]]:
                    d += values[p]
            if x[i]:
                d = -d
            if d < best_d:
                best_d, best_i = d, i
        if best_i < 0:
            break
        x[best_i] = 1 - x[best_i]
        e += best_d
    return tuple(int(b) for b in x), float(e)


def sa_effort_solver(base: AnnealConfig):
    """time_to_target adapter: effort multiplies the read count."""
    def run(q: Qubo, effort: int, attempt: int) -> float:
        cfg = AnnealConfig(reads=base.reads * effort, sweeps=base.sweeps,
                           beta_start=base.beta_start, beta_end=base.beta_end,
                           seed=base.seed + attempt)
        return simulated_annealing(q, cfg).best.energy
    return run


def local_search_effort_solver(seed: int = 0):
    """time_to_target adapter: effort counts random restarts."""
    def run(q: Qubo, effort: int, attempt: int) -> float:
        rng = np.random.default_rng([seed, attempt])
        best = math.inf
        for _ in range(effort):
            start = rng.integers(0, 2, size=q.num_vars)
            _, e = local_search(q, start)
            best = min(best, e)
        return best
    return run


def time_to_target(q: Qubo, target_energy: float, solver, budget_secs: float
                   ) -> tuple[bool, float, list[tuple[float, float]]]:
    """Run `solver` with doubling effort until its best energy reaches the target.

    `solver` is a callable (qubo, effort, attempt) -> best energy. Returns
    (reached, elapsed seconds, trace of (elapsed, best-so-far)).
    """
    if budget_secs <= 0:
        raise ValueError("budget must be positive")
    start = time.monotonic()
    best = math.inf
    trace: list[tuple[float, float]] = []
    effort, attempt = 1, 0
    while True:
        e = solver(q, effort, attempt)
        best = min(best, e)
        elapsed = time.monotonic() - start
        trace.append((elapsed, best))
        if best <= target_energy:
            return True, elapsed, trace
        if elapsed >= budget_secs:
            return False, elapsed, trace
        effort *= 2
        attempt += 1


# ---------------------------------------------------------------------------
# Serialization

def sampleset_to_dict(ss: SampleSet) -> dict:
    return {
        "metadata": ss.metadata,
        "records": [
            {"state": list(r.state), "energy": r.energy, "occurrences": r.occurrences}
            for r in ss.records
        ],
    }


def sampleset_to_json(ss: SampleSet) -> str:
    return json.dumps(sampleset_to_dict(ss), indent=2)


def sampleset_to_csv(ss: SampleSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "energy", "occurrences"])
    for r in ss.records:
        w.writerow(["".join(str(b) for b in r.state), r.energy, r.occurrences])
    return buf.getvalue()


def trace_to_csv(trace: list[tuple[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["elapsed_seconds", "best_energy"])
    for t, e in trace:
        w.writerow([t, e])
    return buf.getvalue()
