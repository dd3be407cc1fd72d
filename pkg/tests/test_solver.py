import itertools
import math

import numpy as np
import pytest

from breakopt import solver as slv
from breakopt.penalty import permutation_qubo
from breakopt.qubo import Qubo, build_qubo
from breakopt.schedule import Kind, lower_bound, random_mdrrt
from breakopt.solver import (AnnealConfig, CapacityError, energy,
                             exhaustive_solve, local_search,
                             simulated_annealing, time_to_target)

from test_qubo import brute_force_energy, random_qubo
from test_schedule import table1_timetable, table2_assignment


def brute_force_minimum(q: Qubo):
    # independent oracle: evaluate every state with the term-by-term evaluator
    best, states = math.inf, []
    for x in itertools.product([0, 1], repeat=q.num_vars):
        e = brute_force_energy(q, x)
        if e < best - 1e-12:
            best, states = e, [x]
        elif abs(e - best) <= 1e-12:
            states.append(x)
    return states, best


class TestEnergy:
    def test_all_zeros_gives_offset(self):
        q = random_qubo(6, np.random.default_rng(0))
        assert energy(q, np.zeros(6, dtype=int)) == q.offset

    def test_identity_permutation_is_free(self):
        q = permutation_qubo(2)
        assert energy(q, np.array([1, 0, 0, 1])) == 0

    def test_table2_encoding(self):
        from breakopt.qubo import encode
        q, vm = build_qubo(table1_timetable())
        assert energy(q, encode(table2_assignment(), vm)) == 6

    def test_length_mismatch(self):
        q = Qubo(num_vars=4)
        with pytest.raises(ValueError):
            energy(q, np.zeros(3, dtype=int))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        q = random_qubo(10, rng)
        for _ in range(30):
            x = rng.integers(0, 2, size=10)
            assert abs(energy(q, x) - brute_force_energy(q, x)) < 1e-12


class TestExhaustive:
    def test_four_team_optimum_is_six(self):
        q, _ = build_qubo(random_mdrrt(4, 0))
        _, best = exhaustive_solve(q)
        assert best == 6

    def test_positive_diagonal_only(self):
        q = Qubo(num_vars=5, offset=1.5)
        for i in range(5):
            q.add_linear(i, 1.0 + i)
        states, best = exhaustive_solve(q)
        assert best == 1.5
        assert states == [(0, 0, 0, 0, 0)]

    def test_six_team_respects_lower_bound(self):
        q, _ = build_qubo(random_mdrrt(6, 4))
        _, best = exhaustive_solve(q)
        assert best >= lower_bound(Kind.MDRRT, 6)

    @pytest.mark.parametrize("seed", range(5))
    def test_agrees_with_brute_force(self, seed):
        q = random_qubo(9, np.random.default_rng(seed))
        states, best = exhaustive_solve(q)
        oracle_states, oracle_best = brute_force_minimum(q)
        assert abs(best - oracle_best) < 1e-9
        assert set(states) == set(oracle_states)

    def test_jit_path_agrees_with_python_path(self):
        # same instance through both scan implementations
        q = random_qubo(8, np.random.default_rng(11))
        c, indptr, indices, values = slv._csr_adjacency(q)
        b1, codes1, n1 = slv._gray_scan_py(list(c), list(indptr), list(indices),
                                           list(values), 8, 64)
        b2, codes2, n2 = slv._gray_scan(c, indptr, indices, values, 8, 64)
        assert b1 == b2 and n1 == n2
        assert list(codes1[:n1]) == [int(v) for v in codes2[:n2]]

    def test_refuses_over_cap(self):
        with pytest.raises(CapacityError):
            exhaustive_solve(Qubo(num_vars=31))

    def test_energy_reverifies(self):
        q = random_qubo(7, np.random.default_rng(2))
        states, best = exhaustive_solve(q)
        for s in states:
            assert abs(energy(q, np.array(s)) - best) < 1e-9


class TestSimulatedAnnealing:
    def test_four_team_matches_exhaustive(self):
        q, _ = build_qubo(random_mdrrt(4, 2))
        ss = simulated_annealing(q, AnnealConfig(reads=200, sweeps=50, seed=0))
        assert ss.best.energy == exhaustive_solve(q)[1]

    def test_zero_coupling_returns_offset(self):
        q = Qubo(num_vars=6, offset=3.0)
        ss = simulated_annealing(q, AnnealConfig(reads=20, sweeps=5, seed=1))
        assert all(r.energy == 3.0 for r in ss.records)

    def test_never_beats_exhaustive(self):
        q = random_qubo(10, np.random.default_rng(5))
        _, best = exhaustive_solve(q)
        ss = simulated_annealing(q, AnnealConfig(reads=50, sweeps=20, seed=3))
        assert ss.best.energy >= best - 1e-9

    def test_deterministic_per_seed(self):
        q, _ = build_qubo(random_mdrrt(6, 0))
        cfg = AnnealConfig(reads=100, sweeps=30, seed=9)
        assert simulated_annealing(q, cfg).records == simulated_annealing(q, cfg).records

    def test_occurrences_sum_to_reads(self):
        q, _ = build_qubo(random_mdrrt(6, 1))
        ss = simulated_annealing(q, AnnealConfig(reads=137, sweeps=20, seed=0))
        assert ss.num_reads == 137

    def test_records_sorted_and_reverified(self):
        q = random_qubo(8, np.random.default_rng(8))
        ss = simulated_annealing(q, AnnealConfig(reads=60, sweeps=25, seed=2))
        energies = [r.energy for r in ss.records]
        assert energies == sorted(energies)
        for r in ss.records:
            assert abs(r.energy - energy(q, np.array(r.state))) < 1e-9

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AnnealConfig(reads=0)
        with pytest.raises(ValueError):
            AnnealConfig(sweeps=0)
        with pytest.raises(ValueError):
            AnnealConfig(beta_start=2.0, beta_end=1.0)


class TestLocalSearch:
    def test_optimum_is_fixed_point(self):
        q, _ = build_qubo(random_mdrrt(4, 0))
        states, best = exhaustive_solve(q)
        x, e = local_search(q, np.array(states[0]))
        assert x == states[0] and e == best

    def test_result_is_one_flip_optimal(self):
        q = random_qubo(10, np.random.default_rng(4))
        x, e = local_search(q, np.zeros(10, dtype=int))
        x = np.array(x)
        for i in range(10):
            y = x.copy()
            y[i] = 1 - y[i]
            assert energy(q, y) >= e - 1e-9

    def test_some_random_starts_reach_optimum(self):
        q, _ = build_qubo(random_mdrrt(4, 5))
        rng = np.random.default_rng(0)
        hits = sum(local_search(q, rng.integers(0, 2, size=6))[1] == 6
                   for _ in range(20))
        assert hits >= 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            local_search(Qubo(num_vars=4), np.zeros(3, dtype=int))


class TestTimeToTarget:
    def test_reaches_exhaustive_optimum_quickly(self):
        q, _ = build_qubo(random_mdrrt(4, 0))
        _, best = exhaustive_solve(q)
        reached, elapsed, trace = time_to_target(
            q, best, slv.local_search_effort_solver(seed=0), budget_secs=30.0)
        assert reached
        assert trace[-1][1] <= best

    def test_unattainable_target_exhausts_budget(self):
        q, _ = build_qubo(random_mdrrt(4, 0))
        reached, elapsed, trace = time_to_target(
            q, -1e18, slv.local_search_effort_solver(seed=0), budget_secs=0.2)
        assert not reached
        assert elapsed >= 0.2

    def test_trace_is_monotone(self):
        q, _ = build_qubo(random_mdrrt(6, 0))
        _, _, trace = time_to_target(
            q, -1e18, slv.sa_effort_solver(AnnealConfig(reads=5, sweeps=10, seed=0)),
            budget_secs=0.3)
        energies = [e for _, e in trace]
        assert energies == sorted(energies, reverse=True)

    def test_rejects_non_positive_budget(self):
        with pytest.raises(ValueError):
            time_to_target(Qubo(num_vars=1), 0.0, slv.local_search_effort_solver(), 0.0)


class TestSerialization:
    def test_sampleset_json_and_csv(self):
        q, _ = build_qubo(random_mdrrt(4, 0))
        ss = simulated_annealing(q, AnnealConfig(reads=10, sweeps=10, seed=0))
        d = slv.sampleset_to_dict(ss)
        assert sum(r["occurrences"] for r in d["records"]) == 10
        csv_text = slv.sampleset_to_csv(ss)
        lines = csv_text.splitlines()
        assert lines[0] == "state,energy,occurrences"
        assert len(lines[1].split(",")[0]) == q.num_vars

    def test_trace_csv(self):
        text = slv.trace_to_csv([(0.1, 5.0), (0.2, 3.0)])
        assert text.splitlines() == ["elapsed_seconds,best_energy",
                                     "0.1,5.0", "0.2,3.0"]
