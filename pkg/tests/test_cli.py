import csv

import numpy as np
import pytest

from cgvariants.cli import EXIT_BREAKDOWN, EXIT_CONFIG, EXIT_FETCH, main
from cgvariants.diagnostics import CSV_COLUMNS, ConvergenceHistory, IterationRecord, Summary
from cgvariants.experiment import (
    ConfigError,
    ExperimentConfig,
    SummaryRow,
    SummaryTable,
    default_max_iter,
    load_problem,
    run_experiment,
)
from cgvariants.report import csv_text, emit_csv, emit_plot_data, emit_table, read_csv, table_from_index

MODEL = "model:n=48,rho=0.8,kappa=1e3"


def test_single_record_csv_is_two_lines(tmp_path):
    h = ConvergenceHistory("HS", "p", "none", [IterationRecord(k=0, rel_err_a_norm=1.0, upd_res_norm=0.5)])
    path = emit_csv(h, tmp_path / "one.csv")
    lines = path.read_text().splitlines()
    assert lines == [",".join(CSV_COLUMNS), "0,1.0,,0.5,,,,,,,,,,"]


def test_csv_round_trip_is_exact(tmp_path):
    result = run_experiment(ExperimentConfig(problem=MODEL, variants=["PIPE_PR", "HS"], max_iter=40))
    for h in result.histories.values():
        path = emit_csv(h, tmp_path / f"{h.variant}.csv")
        assert read_csv(path) == h.records


def test_max_iter_zero_gives_header_and_initial_record(tmp_path):
    result = run_experiment(ExperimentConfig(problem=MODEL, variants=["HS"], max_iter=0, output_dir=str(tmp_path)))
    lines = result.csv_paths["HS"].read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("0,1.0,")


def test_same_config_gives_identical_bytes(tmp_path):
    paths = []
    for run_dir in ("a", "b"):
        cfg = ExperimentConfig(problem=MODEL, seed=3, output_dir=str(tmp_path / run_dir))
        paths.append(run_experiment(cfg).csv_paths)
    for label in paths[0]:
        assert paths[0][label].read_bytes() == paths[1][label].read_bytes()


def test_threads_do_not_change_results(tmp_path):
    serial = run_experiment(ExperimentConfig(problem=MODEL, output_dir=str(tmp_path / "s")))
    threaded = run_experiment(ExperimentConfig(problem=MODEL, output_dir=str(tmp_path / "t"), workers=4))
    for label, path in serial.csv_paths.items():
        assert path.read_bytes() == threaded.csv_paths[label].read_bytes()


def test_breakdown_does_not_affect_other_variants(tmp_path):
    # GV breaks down on the model problem; HS must be byte-identical to a solo run.
    batch = run_experiment(ExperimentConfig(problem=MODEL, variants=["HS", "GV"], output_dir=str(tmp_path / "b")))
    solo = run_experiment(ExperimentConfig(problem=MODEL, variants=["HS"], output_dir=str(tmp_path / "s")))
    assert "breakdown" in batch.row.cells["GV"].status
    assert batch.csv_paths["HS"].read_bytes() == solo.csv_paths["HS"].read_bytes()


def synthetic_row(problem, prec, iters, errs):
    labels = ["HS", "CG_CG", "M", "PR", "GV", "PIPE_PR_M", "PIPE_PR"]
    summaries = {lab: Summary(i, e) for lab, i, e in zip(labels, iters, errs)}
    return SummaryRow.from_summaries(problem, prec, 494, 1666, summaries)


def test_table_structure_and_flags():
    rows = [
        synthetic_row("494_bus", "none", [898, 917, 941, 899, 1040, 957, 909],
                      [-13.14, -12.48, -13.11, -13.11, -6.89, -12.24, -12.16]),
        synthetic_row("494_bus", "jacobi", [300, 301, 302, 300, None, 302, 300],
                      [-13.0, -13.0, -13.0, -13.0, -4.0, -12.9, -12.9]),
    ]
    none, jac = rows
    assert none.cells["GV"].bold_iterations and none.cells["GV"].bold_error
    assert not none.cells["PIPE_PR"].bold_iterations and not none.cells["PIPE_PR_M"].bold_error
    assert jac.cells["GV"].dash
    text = emit_table(SummaryTable(rows))
    lines = text.splitlines()
    assert len(lines) == 4  # header, rule, two rows
    cells = lines[2].split()
    assert len(cells) == 4 + 14
    assert "*1040*" in lines[2] and "*-6.89*" in lines[2]
    assert " - " in lines[3]


def test_boundary_of_ten_percent():
    row = synthetic_row("p", "none", [100, 110, 111, 90, 89, 100, 100], [-10.0, -11.0, -11.01, -9, -8.99, -10, -10])
    flags = {k: (c.bold_iterations, c.bold_error) for k, c in row.cells.items()}
    assert flags["CG_CG"] == (False, False)
    assert flags["M"] == (True, True)
    assert flags["PR"] == (False, False)
    assert flags["GV"] == (True, True)


def test_flags_recomputed_from_csvs_match(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "-p", MODEL, "-o", str(out)]) == 0
    rebuilt = table_from_index(out)
    direct = run_experiment(ExperimentConfig(problem=MODEL))
    assert rebuilt.rows[0].cells == direct.row.cells


def test_plot_data_is_long_format(tmp_path):
    result = run_experiment(ExperimentConfig(problem=MODEL, variants=["HS", "PR"], max_iter=5))
    path = emit_plot_data(result.histories, tmp_path / "plot.csv", metrics=["rel_err_a_norm", "nu_gap"])
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["variant", "k", "metric", "value"]
    assert {r[2] for r in rows[1:]} == {"rel_err_a_norm", "nu_gap"}
    assert sum(1 for r in rows[1:] if r[0] == "HS") == 6  # HS has no nu_gap


def test_csv_text_matches_file(tmp_path):
    result = run_experiment(ExperimentConfig(problem=MODEL, variants=["HS"], max_iter=3))
    h = result.histories["HS"]
    assert csv_text(h) == emit_csv(h, tmp_path / "x.csv").read_text()


# --- configuration --------------------------------------------------------------------


def test_config_from_yaml(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "# comment\nproblem:\n  model: {n: 20, rho: 0.9, kappa: 100}\npreconditioner: jacobi\n"
        "variants: [HS, 'PR:recompute_nu=false']\nmax_iter: 30\nseed: 2\n"
    )
    cfg = ExperimentConfig.from_yaml(path)
    assert cfg.problem == "model:n=20,rho=0.9,kappa=100"
    assert [v.label for v in cfg.variants] == ["HS", "PR:recompute_nu=false"]
    problem = load_problem(cfg)
    assert problem.A.n == 20 and problem.name.endswith("s2")


@pytest.mark.parametrize(
    "data",
    [{}, {"problem": MODEL, "bogus": 1}, {"problem": MODEL, "preconditioner": "ilu"}, {"problem": MODEL, "stop": "x"},
     {"problem": MODEL, "variants": ["NOPE"]}, {"problem": MODEL, "max_iter": -1}, {"problem": "model:n=1"},
     {"problem": "model:q=3"}, {"problem": MODEL, "variants": []}],
)
def test_config_errors(data):
    with pytest.raises(ConfigError):
        cfg = ExperimentConfig.from_dict(data)
        load_problem(cfg)


def test_default_max_iter():
    cfg = ExperimentConfig(problem=MODEL)
    problem = load_problem(cfg)
    assert problem.reference_key == "model_48_8_3"
    assert default_max_iter(problem, "none") == 4 * 43
    cfg = ExperimentConfig(problem="model:n=30")
    assert default_max_iter(load_problem(cfg), "none") == 300


def test_matrix_market_file_problem(tmp_path):
    from cgvariants.linalg import SparseMatrix
    from cgvariants.mmio import serialize_matrix_market

    path = tmp_path / "diag.mtx"
    path.write_text(serialize_matrix_market(SparseMatrix.from_dense(np.diag(np.arange(1.0, 11.0)))))
    result = run_experiment(ExperimentConfig(problem=str(path)))
    assert result.row.n == 10 and result.row.cells["HS"].iterations <= 10


# --- command line ---------------------------------------------------------------------


def test_cli_list_variants(capsys):
    assert main(["list-variants"]) == 0
    out = capsys.readouterr().out
    for name in ("HS", "CG_CG", "PIPE_PR_M", "max(c_gr, t_2mv + c_mv)"):
        assert name in out


def test_cli_predict_scaling(tmp_path, capsys):
    scenario = tmp_path / "s.yaml"
    scenario.write_text("nodes: [1, 2, 4, 8, 16]\nc_gr: 0.01 * nodes\nt_mv: 1.0 / nodes\nc_mv: 0\nt_2mv: 2.0 / nodes\n")
    out_csv = tmp_path / "pred.csv"
    assert main(["predict-scaling", "-s", str(scenario), "--variants", "HS", "PIPE_PR", "-o", str(out_csv)]) == 0
    assert "PIPE_PR faster than HS: from 8 nodes" in capsys.readouterr().out
    assert len(out_csv.read_text().splitlines()) == 1 + 2 * 5
    assert main(["predict-scaling"]) == 0


def test_cli_run_and_summarize(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "-p", MODEL, "-P", "none", "-P", "jacobi", "--variants", "HS", "PR", "-o", str(out)]) == 0
    table = capsys.readouterr().out
    assert "model_48_0.8_1000_s0" in table and "jacobi" in table
    assert (out / "index.csv").exists() and (out / "plot_model_48_0.8_1000_s0_none.csv").exists()
    assert main(["summarize", str(out)]) == 0
    assert capsys.readouterr().out == table


def test_cli_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(f"problem: '{MODEL}'\nvariants: [HS]\nmax_iter: 10\n")
    assert main(["run", "-c", str(cfg), "--max-iter", "60", "--stop", "fixed"]) == 0
    assert "HS it" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    assert main(["run", "-p", MODEL, "--variants", "BOGUS"]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG
    assert main(["run", "-c", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG
    assert main(["run", "-p", MODEL, "--variants", "GV"]) == 0
    assert main(["run", "-p", MODEL, "--variants", "GV", "--strict"]) == EXIT_BREAKDOWN
    monkeypatch.setenv("CGVARIANTS_CACHE", str(tmp_path / "cache"))
    bad = "file:///nonexistent/{name}.mtx"
    assert main(["fetch", "nos4", "--base-url", bad]) == EXIT_FETCH
    monkeypatch.setenv("CGVARIANTS_BASE_URL", bad)
    assert main(["run", "-p", "nos4"]) == EXIT_FETCH
    assert main(["fetch"]) == EXIT_CONFIG
