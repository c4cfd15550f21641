import json

import pytest

from rankga.cli import RunSpec, UsageError, campaign_configs, main, parse_args


def test_run_arguments():
    spec = parse_args(["run", "--problem", "f1", "--policy", "rank", "--pmax", "0.2", "--pop", "20", "--trials", "5", "-o", "out"])
    assert isinstance(spec, RunSpec)
    assert (spec.problem, spec.policy, spec.pmax, spec.populations, spec.trials, spec.output) == ("f1", "rank", 0.2, [20], 5, "out")
    (cfg,) = campaign_configs(spec)
    assert cfg.policy.p_max == 0.2 and cfg.ga.population_size == 20


def test_suite_grid():
    spec = parse_args(["suite", "--problem", "f7"])
    configs = campaign_configs(spec)
    assert len(configs) == 6
    assert sorted({c.ga.population_size for c in configs}) == [10, 20]
    assert [c.campaign_id for c in configs[:3]] == ["f7_constant_pop10", "f7_fitnessadaptive_pop10", "f7_rankadaptive_pop10"]


def test_tsp_suite_populations():
    configs = campaign_configs(parse_args(["suite", "--problem", "tsp:wi29"]))
    assert sorted({c.ga.population_size for c in configs}) == [250, 500]


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 2


@pytest.mark.parametrize("argv", [["run", "--p", "1.5"], ["run", "--pmax", "-0.1"], ["run", "--pop", "0"], ["run", "--policy", "bogus"]])
def test_invalid_values(argv):
    assert main(argv) == 2


def test_missing_tsp_file_names_path(tmp_path, capsys):
    missing = tmp_path / "nope.tsp"
    rc = main(["run", "--problem", f"tsp:{missing}", "--trials", "1", "-o", str(tmp_path)])
    assert rc == 1
    assert str(missing) in capsys.readouterr().err


def test_env_output_dir(monkeypatch):
    monkeypatch.setenv("RANKGA_OUTPUT_DIR", "/tmp/elsewhere")
    assert parse_args(["run"]).output == "/tmp/elsewhere"


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": "f7", "trials": 9, "pmax": 0.3}))
    spec = parse_args(["run", "--config", str(cfg), "--trials", "4"])
    assert (spec.problem, spec.trials, spec.pmax) == ("f7", 4, 0.3)


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(UsageError, match="colour"):
        parse_args(["run", "--config", str(cfg)])


def test_run_outputs_are_deterministic_and_replayable(tmp_path, capsys):
    args = ["run", "--problem", "f1", "--policy", "fitness", "--trials", "4", "--seed", "11"]
    assert main(args + ["-o", str(tmp_path / "a")]) == 0
    assert main(args + ["-o", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "f1_fitnessadaptive_pop10_summary.csv" in names
    assert any(n.endswith("_skew.svg") for n in names)
    for name in names:
        if name.endswith("_runspec.json"):
            continue
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

    runspec = tmp_path / "a" / "f1_fitnessadaptive_pop10_runspec.json"
    assert main(["run", "--config", str(runspec), "-o", str(tmp_path / "c")]) == 0
    summary = "f1_fitnessadaptive_pop10_summary.csv"
    assert (tmp_path / "c" / summary).read_bytes() == (tmp_path / "a" / summary).read_bytes()
    assert "optimum %" in capsys.readouterr().out


def test_plot_subcommand(tmp_path, capsys):
    assert main(["run", "--trials", "2", "--plot-trial", "1", "-o", str(tmp_path)]) == 0
    trace = next(tmp_path.glob("*_trial1_cost.csv"))
    svg = trace.with_suffix(".svg")
    svg.unlink()
    assert main(["plot", str(trace)]) == 0
    assert svg.exists()


def test_plot_trial_out_of_range(tmp_path):
    assert main(["run", "--trials", "2", "--plot-trial", "5", "-o", str(tmp_path)]) == 2
