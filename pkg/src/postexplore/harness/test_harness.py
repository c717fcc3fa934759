import json

import pandas as pd
import pytest

from postexplore.errors import ConfigError
from postexplore.harness import cli, runner
from postexplore.harness.config import (
    build_config,
    default_outdir,
    dump_config,
    load_config,
    parse_overrides,
    read_key_values,
)
from postexplore.harness.plots import emit_plots, plot_learning_curves
from postexplore.harness.runner import RUN_CSV, read_run_log, run
from postexplore.harness.schemas import Checkpoint, RunConfig, RunLog
from postexplore.harness.sweep import (
    AGGREGATE_CSV,
    COUNTERS_CSV,
    PRESETS,
    SweepSpec,
    expand_jobs,
    read_grid_file,
    sweep,
)

SMALL = {"budget": 1000, "eval_interval": 250}


class TestConfig:
    def test_defaults(self):
        config = RunConfig()
        assert (config.alpha, config.gamma, config.epsilon) == (0.1, 0.99, 0.1)
        assert (config.beta, config.p_pe, config.pe_epsilon) == (0.0, 0.5, 1.0)

    def test_dump_echoes_hyperparameters(self):
        lines = dump_config(RunConfig()).splitlines()
        assert "alpha=0.1" in lines
        assert "gamma=0.99" in lines
        assert "episodic=true" in lines
        assert "init_cap=none" in lines

    def test_dump_reloads_to_same_config(self, tmp_path):
        config = RunConfig(env_family="lava_crossing", env_seed=4, beta=0.05, pe_mode="novelty")
        path = tmp_path / "config.txt"
        path.write_text(dump_config(config), encoding="utf-8")
        assert load_config(path) == config

    def test_key_value_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("# comment\nenv-family = lava_gap\n\nbudget=5000  # trailing\n")
        assert read_key_values(path) == {"env_family": "lava_gap", "budget": "5000"}

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("budget 5000\n")
        with pytest.raises(ConfigError):
            read_key_values(path)

    @pytest.mark.parametrize("text", ["budget\n", "epsilon=0.1\nbeta 1 2\n"])
    def test_line_without_value(self, tmp_path, text):
        path = tmp_path / "run.conf"
        path.write_text(text)
        with pytest.raises(ConfigError, match="run.conf:"):
            read_key_values(path)

    def test_quoted_values(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("env_family=\"lava_gap\"\ninit-cap='none'\n")
        assert read_key_values(path) == {"env_family": "lava_gap", "init_cap": "none"}

    def test_overrides(self):
        assert parse_overrides(["--epsilon", "0.3", "--pe-mode=off"]) == {
            "epsilon": "0.3",
            "pe_mode": "off",
        }

    @pytest.mark.parametrize("args", [["epsilon", "0.3"], ["--epsilon"]])
    def test_bad_overrides(self, args):
        with pytest.raises(ConfigError):
            parse_overrides(args)

    def test_overrides_win_over_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("epsilon=0.3\nbudget=5000\n")
        config = load_config(path, {"epsilon": "0.0"})
        assert (config.epsilon, config.budget) == (0.0, 5000)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="learning_rate"):
            build_config({"learning_rate": "0.5"})

    @pytest.mark.parametrize(
        "values",
        [
            {"epsilon": "1.5"},
            {"budget": "2000", "eval_interval": "2000"},
            {"pe_epsilon": "0.5"},
            {"env_family": "maze"},
            {"p_pe": "0"},
        ],
    )
    def test_invalid_values(self, values):
        with pytest.raises(ConfigError):
            build_config(values)

    def test_none_values(self):
        assert build_config({"init_cap": "none"}).init_cap is None
        assert build_config({"init_cap": "50"}).init_episode_cap == 50

    def test_default_outdir(self, monkeypatch, tmp_path):
        monkeypatch.setenv("POSTEXPLORE_OUTDIR", str(tmp_path))
        assert default_outdir() == tmp_path


class TestRun:
    def test_artifacts(self, tmp_path):
        config = RunConfig(env_family="lava_gap", env_seed=3, **SMALL)
        log = run(config, tmp_path, dump_q=True)
        for name in (
            "run.csv", "run.json", "config.txt", "map.txt", "heatmap.csv", "heatmap.svg",
            "goals.csv", "trace.svg", "qtable.csv",
        ):
            assert (tmp_path / name).exists(), name
        frame = pd.read_csv(tmp_path / RUN_CSV)
        assert list(frame.columns) == ["step", "coverage"]
        assert frame["step"].tolist() == [250, 500, 750, 1000]
        reloaded = read_run_log(tmp_path)
        assert reloaded.checkpoints == log.checkpoints
        assert reloaded.counters == log.counters
        assert reloaded.heatmap == log.heatmap
        assert sum(map(sum, reloaded.heatmap)) == pd.read_csv(
            tmp_path / "heatmap.csv", header=None
        ).to_numpy().sum()

    def test_same_seed_gives_identical_files(self, tmp_path):
        config = RunConfig(env_family="lava_crossing", env_seed=1, master_seed=5, **SMALL)
        run(config, tmp_path / "a")
        run(config, tmp_path / "b")
        for name in ("run.csv", "run.json", "heatmap.csv", "goals.csv", "heatmap.svg"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_lava_gap_schedule(self, tmp_path):
        log = run(RunConfig(env_family="lava_gap", budget=10_000), tmp_path)
        assert [c.step for c in log.checkpoints] == [2000, 4000, 6000, 8000, 10_000]
        assert log.counters.total_steps == 10_000

    def test_config_echo(self, tmp_path):
        run(RunConfig(**SMALL), tmp_path)
        echo = json.loads((tmp_path / "run.json").read_text())["config"]
        assert (echo["alpha"], echo["gamma"]) == (0.1, 0.99)

    def test_unwritable_outdir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            run(RunConfig(**SMALL), blocker / "run")

    def test_bad_outdir_fails_before_training(self, tmp_path, monkeypatch):
        def no_training(*_):
            raise AssertionError("trained before checking the output directory")

        monkeypatch.setattr(runner, "Explorer", no_training)
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            run(RunConfig(**SMALL), blocker / "run")

    def test_checkpoints_must_increase(self):
        with pytest.raises(ValueError):
            RunLog(
                config=RunConfig(),
                checkpoints=[Checkpoint(step=2000, coverage=0.1), Checkpoint(step=2000, coverage=0.2)],
            )


class TestExpandJobs:
    def test_beta_preset(self):
        jobs = expand_jobs(RunConfig(), PRESETS["rq3"], repetitions=1)
        assert sorted(job.config.beta for job in jobs) == [0.0, 0.01, 0.05, 1.0]
        assert all(job.config.pe_mode.value == "novelty" for job in jobs)
        assert len({job.series for job in jobs}) == 4

    def test_empty_grid(self):
        jobs = expand_jobs(RunConfig(), [SweepSpec()], repetitions=3)
        assert len(jobs) == 3
        assert [job.config.repetition for job in jobs] == [0, 1, 2]
        assert {job.series for job in jobs} == {"base"}

    def test_procedural_families_use_ten_env_seeds(self):
        jobs = expand_jobs(RunConfig(env_family="lava_gap"), [SweepSpec()], repetitions=2)
        assert len(jobs) == 20
        assert sorted({job.config.env_seed for job in jobs}) == list(range(10))

    def test_averaged_keys_share_a_series(self):
        jobs = expand_jobs(RunConfig(), PRESETS["rq1"][:1], repetitions=1)
        assert len(jobs) == 6
        assert {job.series for job in jobs} == {
            "env_family=four_rooms,pe_mode=always",
            "env_family=four_rooms,pe_mode=off",
        }

    def test_seeds_are_stable_and_distinct(self):
        first = expand_jobs(RunConfig(), PRESETS["rq2"], repetitions=2, sweep_seed=3)
        again = expand_jobs(RunConfig(), PRESETS["rq2"], repetitions=2, sweep_seed=3)
        other = expand_jobs(RunConfig(), PRESETS["rq2"], repetitions=2, sweep_seed=4)
        seeds = [job.config.master_seed for job in first]
        assert seeds == [job.config.master_seed for job in again]
        assert len(set(seeds)) == len(seeds)
        assert seeds != [job.config.master_seed for job in other]

    def test_every_preset_expands(self):
        for name, specs in PRESETS.items():
            assert expand_jobs(RunConfig(), specs, repetitions=1), name

    def test_needs_a_repetition(self):
        with pytest.raises(ConfigError):
            expand_jobs(RunConfig(), [SweepSpec()], repetitions=0)

    def test_grid_file(self, tmp_path):
        path = tmp_path / "grid.conf"
        path.write_text("pe_mode=always,off\nepsilon=0.0,0.3\naverage=epsilon\n")
        spec = read_grid_file(path)
        assert spec.grid == {"pe_mode": ["always", "off"], "epsilon": ["0.0", "0.3"]}
        assert spec.average == ["epsilon"]

    def test_grid_file_unknown_average(self, tmp_path):
        path = tmp_path / "grid.conf"
        path.write_text("pe_mode=always,off\naverage=beta\n")
        with pytest.raises(ConfigError):
            read_grid_file(path)


class TestSweep:
    SPECS = [SweepSpec(grid={"pe_mode": ["always", "off"]})]

    def test_aggregate_tables(self, tmp_path):
        curves, counters = sweep(RunConfig(**SMALL), self.SPECS, 2, tmp_path)
        assert list(curves.columns) == ["series", "step", "mean", "stderr"]
        assert set(curves["series"]) == {"pe_mode=always", "pe_mode=off"}
        assert len(curves) == 2 * 4
        off = counters[(counters["series"] == "pe_mode=off") & (counters["counter"] == "pe_steps")]
        assert off["mean"].tolist() == [0.0]
        assert (tmp_path / AGGREGATE_CSV).exists()
        assert (tmp_path / COUNTERS_CSV).exists()

    @pytest.mark.slow
    def test_parallel_matches_serial(self, tmp_path):
        sweep(RunConfig(**SMALL), self.SPECS, 2, tmp_path / "serial", parallelism=1)
        sweep(RunConfig(**SMALL), self.SPECS, 2, tmp_path / "parallel", parallelism=3)
        serial = sorted((tmp_path / "serial" / "runs").glob("*/run.csv"))
        assert len(serial) == 4
        for path in serial:
            twin = tmp_path / "parallel" / path.relative_to(tmp_path / "serial")
            assert path.read_bytes() == twin.read_bytes()
        assert (tmp_path / "serial" / AGGREGATE_CSV).read_bytes() == (
            tmp_path / "parallel" / AGGREGATE_CSV
        ).read_bytes()


class TestPlots:
    def test_single_point_curve_has_a_marker(self):
        curves = pd.DataFrame(
            {"series": ["pe_mode=always"], "step": [2000], "mean": [0.4], "stderr": [0.0]}
        )
        ax = plot_learning_curves(curves).axes[0]
        assert len(ax.lines) == 1
        assert ax.lines[0].get_marker() == "o"
        assert len(ax.lines[0].get_xdata()) == 1

    def test_two_series_two_legend_entries(self):
        curves = pd.DataFrame(
            {
                "series": ["a", "a", "b", "b"],
                "step": [1000, 2000, 1000, 2000],
                "mean": [0.1, 0.3, 0.2, 0.4],
                "stderr": [0.01, 0.02, 0.01, 0.02],
            }
        )
        ax = plot_learning_curves(curves).axes[0]
        assert [t.get_text() for t in ax.get_legend().get_texts()] == ["a", "b"]

    def test_emit_is_a_pure_function_of_the_csvs(self, tmp_path):
        sweep(RunConfig(**SMALL), TestSweep.SPECS, 2, tmp_path)
        first = {path.name: path.read_bytes() for path in emit_plots(tmp_path)}
        second = {path.name: path.read_bytes() for path in emit_plots(tmp_path)}
        assert set(first) == {"learning_curves.svg", "pe_steps.svg", "relabel_updates.svg"}
        assert first == second


class TestCli:
    @pytest.fixture(autouse=True)
    def no_log_export(self, monkeypatch):
        monkeypatch.delenv("AZ_CONNECTION_LOG", raising=False)

    def test_run(self, tmp_path):
        code = cli.main(["run", "--out", str(tmp_path), "--budget", "1000", "--eval-interval", "500"])
        assert code == 0
        assert pd.read_csv(tmp_path / RUN_CSV)["step"].tolist() == [500, 1000]

    def test_config_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("env_family=lava_gap\nbudget=1000\neval_interval=500\n")
        assert cli.main(["run", "--config", str(path), "--out", str(tmp_path / "out")]) == 0
        assert read_run_log(tmp_path / "out").config.env_family.value == "lava_gap"

    def test_unknown_key_exits_2(self, tmp_path):
        assert cli.main(["run", "--out", str(tmp_path), "--learning-rate", "0.5"]) == 2
        assert not (tmp_path / RUN_CSV).exists()

    def test_invalid_value_exits_2(self, tmp_path):
        assert cli.main(["run", "--out", str(tmp_path), "--epsilon", "2"]) == 2

    def test_missing_config_exits_1(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "absent.conf")]) == 1

    def test_plot_missing_directory_exits_1(self, tmp_path):
        assert cli.main(["plot", "--in", str(tmp_path / "absent")]) == 1

    def test_sweep_from_grid_file(self, tmp_path):
        grid = tmp_path / "grid.conf"
        grid.write_text("pe_mode=always,off\n")
        out = tmp_path / "sweep"
        code = cli.main(
            ["sweep", "--grid", str(grid), "--reps", "1", "--out", str(out),
             "--budget", "1000", "--eval-interval", "500"]
        )
        assert code == 0
        assert (out / "learning_curves.svg").exists()
        assert len(pd.read_csv(out / AGGREGATE_CSV)) == 4
