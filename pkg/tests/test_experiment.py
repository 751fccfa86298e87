import csv
import os

import numpy as np
import pytest

from asynctpe.cli import main
from asynctpe.experiment import (
    TIME_GRID_POINTS,
    AggregateCurve,
    ConfigError,
    ExperimentConfig,
    aggregate,
    parse_config,
    run_experiment,
)
from asynctpe.simulator import Trace, TrialRecord

MINIMAL = """
[experiment]
objective = hartmann6
sampler = random
"""


def test_minimal_defaults():
    cfg = parse_config(text=MINIMAL)
    assert cfg.gamma == 0.1 and cfg.workers == 4 and cfg.budget_seconds == 500.0 and cfg.n_trials == 10


def test_cli_flag_overrides_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text(MINIMAL + "workers = 4\n")
    assert parse_config(str(p), {"workers": 8}).workers == 8
    assert parse_config(str(p), {"workers": None}).workers == 4


def test_inline_comments():
    cfg = parse_config(text="""
[experiment]
objective = hartmann18      ; required
sampler = async-tpe         # required
workers = 4                 ; default 4
charge_proposal_time = no
""")
    assert cfg.workers == 4 and cfg.sampler == "async-tpe" and not cfg.charge_proposal_time


def test_misspelled_key_named():
    with pytest.raises(ConfigError, match="workrs"):
        parse_config(text=MINIMAL + "workrs = 4\n")


def test_missing_required_keys_named():
    with pytest.raises(ConfigError, match="sampler"):
        parse_config(text="[experiment]\nobjective = hartmann6\n")


def test_unknown_names_list_valid_options():
    with pytest.raises(ConfigError, match="async-tpe"):
        parse_config(text=MINIMAL.replace("random", "bohb"))
    with pytest.raises(ConfigError, match="hartmann18"):
        parse_config(text=MINIMAL.replace("hartmann6", "branin"))


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/cfg.ini")


def test_bad_value():
    with pytest.raises(ConfigError, match="workers"):
        parse_config(text=MINIMAL + "workers = four\n")


def test_space_sections():
    text = """
[experiment]
objective = mlp-surrogate
sampler = random

[dim.learning_rate]
low = 0.001
high = 0.2
[dim.momentum]
low = 0.8
high = 0.99
[dim.n_hidden_1]
low = 50
high = 500
kind = integer_rounded
[dim.n_hidden_2]
low = 50
high = 500
kind = integer_rounded
[dim.dropout_1]
low = 0
high = 0.8
[dim.dropout_2]
low = 0
high = 0.8
"""
    cfg = parse_config(text=text)
    assert cfg.space.names[2] == "n_hidden_1"
    assert cfg.space.dims[3].kind == "integer_rounded"
    with pytest.raises(ConfigError, match="kind"):
        parse_config(text=text.replace("integer_rounded", "log"))
    with pytest.raises(ConfigError):
        parse_config(text=text.replace("[dim.dropout_2]\nlow = 0\nhigh = 0.8", "[dim.dropout_2]\nlow = 0\nhig = 0.8"))


def _trace(ys, ends, budget=10.0):
    recs = [TrialRecord(i, np.zeros(1), np.zeros(1), y, 0.0, t, 0, i) for i, (y, t) in enumerate(zip(ys, ends))]
    return Trace(recs, budget, 1, 0, ["x"])


def test_aggregate_against_hand_computation():
    traces = [
        _trace([5.0, 4.0, 6.0, 1.0], [1.0, 2.5, 4.0, 8.0]),
        _trace([3.0, 3.5, 2.0], [0.5, 3.0, 9.0]),
        _trace([4.0, 1.5, 2.5, 0.5, 0.2], [2.0, 2.2, 5.0, 6.0, 9.5]),
    ]
    evals, times = aggregate(traces, 10.0)
    # evaluation axis truncated to 3; running minima: [5,4,4], [3,3,2], [4,1.5,1.5]
    M = np.array([[5, 4, 4], [3, 3, 2], [4, 1.5, 1.5]], dtype=float)
    np.testing.assert_array_equal(evals.grid, [1, 2, 3])
    np.testing.assert_allclose(evals.mean, M.mean(axis=0))
    np.testing.assert_allclose(evals.stderr, M.std(axis=0, ddof=1) / np.sqrt(3))

    assert len(times.grid) == TIME_GRID_POINTS and times.grid[-1] == 10.0 and times.grid[0] > 0
    # at t = 5.0: trace 0 best 4, trace 1 best 3, trace 2 best 1.5
    i = int(np.argmin(np.abs(times.grid - 5.0)))
    assert times.grid[i] == pytest.approx(5.0)
    assert times.mean[i] == pytest.approx((4 + 3 + 1.5) / 3)
    # at t = 0.5 only trace 1 has completed something
    assert np.isnan(times.mean[9])
    # at t = 10 all done
    assert times.mean[-1] == pytest.approx((1.0 + 2.0 + 0.2) / 3)
    finite = times.mean[np.isfinite(times.mean)]
    assert np.all(np.diff(finite) <= 0)
    assert np.all(times.stderr[np.isfinite(times.stderr)] >= 0)


def test_single_trial_zero_stderr(tmp_path):
    cfg = ExperimentConfig("hartmann6", "random", workers=2, budget_seconds=20.0, n_trials=1, out=str(tmp_path))
    evals, times = run_experiment(cfg)
    assert np.all(evals.stderr == 0) and np.all(times.stderr == 0)


def test_identical_seeds_zero_stderr():
    cfg = ExperimentConfig("hartmann6", "async-tpe", workers=2, budget_seconds=15.0, n_trials=3)
    evals, times = run_experiment(cfg, seeds=[5, 5, 5])
    assert np.all(evals.stderr == 0)
    assert np.all(times.stderr[np.isfinite(times.stderr)] == 0)


def test_outputs_and_byte_identical_rerun(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        cfg = ExperimentConfig("hartmann6", "async-tpe", workers=3, budget_seconds=25.0, n_trials=2, base_seed=4,
                               out=str(out))
        run_experiment(cfg)
    names = sorted(os.listdir(a))
    assert names == ["aggregate_evals.csv", "aggregate_time.csv", "trace_0.csv", "trace_1.csv"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    with open(a / "aggregate_evals.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["evaluations", "mean_best", "stderr"]
    means = [float(r[1]) for r in rows[1:]]
    assert all(x >= y for x, y in zip(means, means[1:]))
    with open(a / "aggregate_time.csv") as fh:
        assert next(csv.reader(fh)) == ["time", "mean_best", "stderr"]


def test_cli_run(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(MINIMAL)
    out = tmp_path / "res"
    rc = main(["run", "--config", str(cfg), "--budget", "10", "--trials", "2", "--workers", "2", "--out", str(out)])
    assert rc == 0
    assert (out / "trace_1.csv").exists()
    with open(out / "trace_0.csv") as fh:
        header = next(csv.reader(fh))
    assert header[:6] == ["trial_index", "worker", "t_start", "t_end", "y", "best_y"]
    assert len(header) == 6 + 6


def test_cli_config_error(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(MINIMAL + "workrs = 3\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "workrs" in capsys.readouterr().err


def test_cli_flags_only(tmp_path):
    rc = main(["run", "--objective", "mlp-surrogate", "--sampler", "classic-tpe", "--budget", "15",
               "--trials", "1", "--out", str(tmp_path / "r")])
    assert rc == 0


def test_cli_bench_proposal_cost(tmp_path):
    out = tmp_path / "cost.csv"
    rc = main(["bench-proposal-cost", "--sampler", "async-tpe", "--min-n", "50", "--max-n", "200",
               "--repeats", "2", "--out", str(out)])
    assert rc == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n_observations", "seconds"]
    assert [int(r[0]) for r in rows[1:]] == [50, 100, 200]
    assert all(float(r[1]) > 0 for r in rows[1:])


def test_aggregate_curve_csv(tmp_path):
    c = AggregateCurve("time", np.array([0.5, 1.0]), np.array([2.0, 1.0]), np.array([0.1, 0.0]))
    c.write_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text() == "time,mean_best,stderr\n0.5,2.0,0.1\n1.0,1.0,0.0\n"
