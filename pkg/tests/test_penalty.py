import itertools
import math

import numpy as np
import pytest

from breakopt import penalty
from breakopt.penalty import (feasibility_experiment, permutation_qubo,
                              violated_constraints)
from breakopt.solver import AnnealConfig, energy


def is_permutation_matrix(x, n):
    grid = np.asarray(x).reshape(n, n)
    return bool((grid.sum(axis=0) == 1).all() and (grid.sum(axis=1) == 1).all())


class TestPermutationQubo:
    def test_identity_permutation_has_zero_energy(self):
        q = permutation_qubo(2)
        assert energy(q, np.array([1, 0, 0, 1])) == 0

    def test_all_zeros_energy(self):
        q = permutation_qubo(2)
        assert energy(q, np.zeros(4, dtype=int)) == 4

    def test_ground_states_are_permutations_n3(self):
        q = permutation_qubo(3)
        zeros = [x for x in itertools.product([0, 1], repeat=9)
                 if energy(q, np.array(x)) == 0]
        assert len(zeros) == 6
        assert all(is_permutation_matrix(x, 3) for x in zeros)

    @pytest.mark.parametrize("n", [2, 3])
    def test_zero_energy_iff_feasible(self, n):
        q = permutation_qubo(n)
        for x in itertools.product([0, 1], repeat=n * n):
            e = energy(q, np.array(x))
            assert (e == 0) == (violated_constraints(x, n) == 0)
            assert e >= 0

    def test_rejects_n_below_two(self):
        with pytest.raises(ValueError):
            permutation_qubo(1)


class TestViolatedConstraints:
    def test_permutation_matrix_has_none(self):
        assert violated_constraints([0, 1, 1, 0], 2) == 0

    def test_all_ones_violates_everything(self):
        assert violated_constraints([1, 1, 1, 1], 2) == 4

    def test_single_one(self):
        # the occupied row and column sum to 1; the other two sum to 0
        assert violated_constraints([1, 0, 0, 0], 2) == 2

    def test_range(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.integers(0, 2, size=16)
            assert 0 <= violated_constraints(x, 4) <= 8


class TestFeasibleSetSize:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_equals_factorial(self, n):
        count = sum(is_permutation_matrix(x, n)
                    for x in itertools.product([0, 1], repeat=n * n))
        assert count == math.factorial(n)

    def test_uniform_feasible_fraction(self):
        assert math.factorial(2) / 2 ** 4 == 0.125
        assert abs(math.factorial(3) / 2 ** 9 - 0.0117) < 1e-3


class TestFeasibilityExperiment:
    def test_strong_schedule_saturates_small_n(self):
        strong = AnnealConfig(reads=1, sweeps=100, beta_start=0.1, beta_end=10.0, seed=0)
        st = feasibility_experiment(2, reads=200, cfg=strong)
        assert st.per_feasible > 0.99

    def test_deterministic_per_seed(self):
        a = feasibility_experiment(3, reads=100)
        b = feasibility_experiment(3, reads=100)
        assert a == b

    def test_stats_consistency(self):
        st = feasibility_experiment(4, reads=200)
        assert 0.0 <= st.per_feasible <= 1.0
        assert st.ev_energy >= 0.0
        if st.per_feasible == 1.0:
            assert st.ev_break == 0.0

    def test_decay_trend_over_seeds(self):
        base = penalty.WEAK_SAMPLER
        monotone = 0
        for seed in range(5):
            cfg = AnnealConfig(reads=1, sweeps=base.sweeps, beta_start=base.beta_start,
                               beta_end=base.beta_end, seed=seed)
            curve = [feasibility_experiment(n, reads=300, cfg=cfg).per_feasible
                     for n in range(2, 7)]
            if all(a >= b for a, b in zip(curve, curve[1:])):
                monotone += 1
        assert monotone >= 3

    def test_csv_output(self):
        stats = [feasibility_experiment(n, reads=50) for n in (2, 3)]
        lines = penalty.stats_to_csv(stats).splitlines()
        assert lines[0] == "n,per_feasible,ev_break,ev_energy"
        assert len(lines) == 3
