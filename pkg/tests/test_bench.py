import json

import pytest

from breakopt import bench, cli
from breakopt.bench import (ChaseRow, ExperimentConfig, SolverSpec, rows_to_csv,
                            run_embedding_survey, run_experiment1,
                            run_experiment2, subseed)
from breakopt.embedding import chimera_graph, pegasus_graph
from breakopt.schedule import Kind


def small_cfg(**overrides):
    defaults = dict(
        team_sizes=[4],
        solvers=[SolverSpec("sa", reads=100, sweeps=50)],
        kind=Kind.MDRRT,
        instances_per_size=3,
        master_seed=7,
        budget_secs=10.0,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


class TestConfig:
    def test_empty_solver_list_rejected(self):
        with pytest.raises(ValueError):
            small_cfg(solvers=[])

    def test_odd_team_size_rejected(self):
        with pytest.raises(ValueError):
            small_cfg(team_sizes=[5])

    def test_unknown_solver_rejected(self):
        with pytest.raises(ValueError):
            SolverSpec("gurobi")


class TestSubseed:
    def test_stable(self):
        assert subseed(1, 4, 0, "inst") == subseed(1, 4, 0, "inst")

    def test_distinct_roles(self):
        assert subseed(1, 4, 0, "inst") != subseed(1, 4, 0, "sa")


class TestExperiment1:
    def test_four_team_means(self):
        rows = run_experiment1(small_cfg(instances_per_size=5))
        (row,) = rows
        assert row.mean_breaks == 6.0
        assert row.optimal_fraction == 1.0
        assert row.lower_bound == 6

    def test_multiple_solvers_and_sizes(self):
        cfg = small_cfg(team_sizes=[4, 6],
                        solvers=[SolverSpec("exhaustive"),
                                 SolverSpec("local", reads=20)],
                        instances_per_size=2)
        rows = run_experiment1(cfg)
        assert len(rows) == 4
        by_key = {(r.teams, r.solver): r for r in rows}
        for teams in (4, 6):
            exact = by_key[(teams, "exhaustive")]
            assert exact.optimal_fraction == 1.0
            assert by_key[(teams, "local")].mean_breaks >= exact.mean_breaks

    def test_deterministic_tables(self):
        rows1 = run_experiment1(small_cfg())
        rows2 = run_experiment1(small_cfg())
        assert rows_to_csv(rows1, include_time=False) == \
            rows_to_csv(rows2, include_time=False)


class TestExperiment2:
    def test_chaser_reaches_exhaustive_reference(self):
        cfg = small_cfg(instances_per_size=5)
        rows = run_experiment2(cfg, SolverSpec("exhaustive"),
                               SolverSpec("local", reads=1))
        (row,) = rows
        assert isinstance(row, ChaseRow)
        assert row.reference_breaks == 6.0
        assert row.reached_fraction == 1.0

    def test_row_per_size(self):
        cfg = small_cfg(team_sizes=[4, 6], instances_per_size=1)
        rows = run_experiment2(cfg, SolverSpec("sa", reads=50, sweeps=30),
                               SolverSpec("sa", reads=10, sweeps=30))
        assert [r.teams for r in rows] == [4, 6]


class TestSurvey:
    def test_mdrrt_counts_exact(self):
        cfg = small_cfg(team_sizes=[4, 8], instances_per_size=2)
        rows = run_embedding_survey(cfg, pegasus_graph(6))
        by_teams = {r.teams: r for r in rows}
        assert by_teams[4].nodes == 6 and by_teams[4].edges == 12
        assert by_teams[8].nodes == 28 and by_teams[8].edges == 56
        for r in rows:
            assert r.edges == 2 * r.nodes  # 4-regular identity
            assert r.embed_failures == 0
            assert r.qubits_per_node >= 1.0

    def test_drrt_node_count(self):
        cfg = small_cfg(team_sizes=[4], kind=Kind.DRRT, instances_per_size=2)
        rows = run_embedding_survey(cfg, chimera_graph(4, 4, 4))
        assert rows[0].nodes == 6

    def test_unembeddable_recorded_as_failure(self):
        cfg = small_cfg(team_sizes=[8], instances_per_size=1)
        rows = run_embedding_survey(cfg, chimera_graph(1, 1, 2))
        assert rows[0].embed_failures == 1
        assert rows[0].mean_qubits is None


class TestCsv:
    def test_time_columns_excluded_on_request(self):
        rows = run_experiment1(small_cfg(instances_per_size=1))
        with_time = rows_to_csv(rows)
        without = rows_to_csv(rows, include_time=False)
        assert "mean_time_secs" in with_time
        assert "mean_time_secs" not in without

    def test_empty(self):
        assert rows_to_csv([]) == ""


class TestCli:
    def test_generate_build_solve_pipeline(self, tmp_path):
        tt = tmp_path / "tt.json"
        qf = tmp_path / "q.json"
        out = tmp_path / "samples.csv"
        assert cli.main(["generate", "--teams", "4", "--seed", "1",
                         "--out", str(tt)]) == 0
        assert cli.main(["build", str(tt), "--out", str(qf)]) == 0
        assert cli.main(["solve", str(qf), "--solver", "exhaustive",
                         "--format", "csv", "--out", str(out)]) == 0
        first = out.read_text().splitlines()[1]
        assert first.split(",")[1] == "6.0"

    def test_generate_csv_format(self, tmp_path, capsys):
        assert cli.main(["generate", "--teams", "4", "--kind", "drrt",
                         "--seed", "0", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("team,slot1")
        assert len(lines) == 5

    def test_embed_command(self, tmp_path, capsys):
        tt = tmp_path / "tt.json"
        qf = tmp_path / "q.json"
        emb = tmp_path / "emb.json"
        cli.main(["generate", "--teams", "4", "--seed", "0", "--out", str(tt)])
        cli.main(["build", str(tt), "--out", str(qf)])
        assert cli.main(["embed", str(qf), "--target", "chimera:2,2,4",
                         "--out", str(emb)]) == 0
        chains = json.loads(emb.read_text())
        assert len(chains) == 6
        assert "qubits_per_node" in capsys.readouterr().out

    def test_feasibility_command(self, tmp_path):
        out = tmp_path / "feas.csv"
        assert cli.main(["feasibility", "--n-max", "3", "--reads", "50",
                         "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,per_feasible,ev_break,ev_energy"
        assert len(lines) == 3

    def test_bench_exp1_reproducible(self, tmp_path):
        args = ["bench", "exp1", "--teams", "4", "--instances", "2",
                "--reads", "100", "--sweeps", "50", "--seed", "3"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0

        def strip_time(path):
            rows = [ln.split(",") for ln in path.read_text().splitlines()]
            drop = rows[0].index("mean_time_secs")
            return [r[:drop] + r[drop + 1:] for r in rows]

        assert strip_time(a) == strip_time(b)

    def test_solve_over_cap_exits_two(self, tmp_path):
        from breakopt.qubo import Qubo, qubo_to_json
        qf = tmp_path / "big.json"
        qf.write_text(qubo_to_json(Qubo(num_vars=32)))
        assert cli.main(["solve", str(qf), "--solver", "exhaustive"]) == 2

    def test_usage_error_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["solve"])  # missing required qubo path
        assert exc.value.code == 1

    def test_missing_file_exits_one(self, tmp_path):
        assert cli.main(["build", str(tmp_path / "nope.json")]) == 1
