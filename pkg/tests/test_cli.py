"""End-to-end tests for the command-line driver."""

import json

import pytest

from elpar.cli import main
from elpar.data import Line
from elpar.model_io import load_model
from elpar.points import elpar_formation_average


class TestSimulate:
    def test_writes_both_files(self, league):
        assert (league / "matches.csv").exists()
        assert (league / "players.csv").exists()

    def test_deterministic_output(self, league, tmp_path):
        assert main(["simulate", "--out-dir", str(tmp_path), "--n-matches", "240",
                     "--n-players", "420", "--seed", "11"]) == 0
        assert (tmp_path / "matches.csv").read_bytes() == (
            league / "matches.csv"
        ).read_bytes()
        assert (tmp_path / "players.csv").read_bytes() == (
            league / "players.csv"
        ).read_bytes()


class TestFit:
    def test_model_written_and_converged(self, model_file, capsys):
        model, levels, metadata = load_model(model_file)
        assert model.converged is True
        assert metadata["seed"] == 3
        assert metadata["n_train"] + metadata["n_test"] == 240
        assert set(levels.as_dict()) == {"GK", "DEF", "MID", "ATT"}

    def test_prints_coefficient_table(self, league, tmp_path, capsys):
        out = tmp_path / "model.json"
        main(["fit", "--matches", str(league / "matches.csv"),
              "--players", str(league / "players.csv"), "--out", str(out)])
        printed = capsys.readouterr().out
        assert "intercept" in printed
        assert "x_gk" in printed
        assert "converged = true" in printed

    def test_refit_is_byte_identical(self, league, model_file, tmp_path):
        outputs = []
        for name in ("a.json", "b.json", "c.json"):
            out = tmp_path / name
            code = main([
                "fit",
                "--matches", str(league / "matches.csv"),
                "--players", str(league / "players.csv"),
                "--out", str(out),
                "--seed", "3",
            ])
            assert code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
        assert outputs[0] == model_file.read_bytes()

    def test_missing_players_file_exit_2(self, league, tmp_path, capsys):
        code = main(["fit", "--matches", str(league / "matches.csv"),
                     "--players", str(league / "nowhere.csv"),
                     "--out", str(tmp_path / "model.json")])
        assert code == 2
        assert "nowhere.csv" in capsys.readouterr().err

    def test_non_convergence_exit_3_still_writes(self, league, tmp_path, capsys):
        out = tmp_path / "model.json"
        code = main(["fit", "--matches", str(league / "matches.csv"),
                     "--players", str(league / "players.csv"),
                     "--out", str(out), "--max-iterations", "1"])
        assert code == 3
        assert json.loads(out.read_text())["converged"] is False

    def test_bad_split_fraction_exit_2(self, league, tmp_path):
        code = main(["fit", "--matches", str(league / "matches.csv"),
                     "--players", str(league / "players.csv"),
                     "--out", str(tmp_path / "m.json"), "--split-fraction", "1.5"])
        assert code == 2


class TestEvaluate:
    def test_writes_reports(self, league, model_file, tmp_path):
        out_dir = tmp_path / "report"
        code = main(["evaluate", "--model", str(model_file),
                     "--matches", str(league / "matches.csv"),
                     "--players", str(league / "players.csv"),
                     "--out-dir", str(out_dir)])
        assert code == 0
        assert (out_dir / "report.txt").exists()
        assert (out_dir / "residual_histogram.csv").exists()
        assert (out_dir / "calibration.csv").exists()
        report = (out_dir / "report.txt").read_text()
        assert "residual_mean" in report
        assert "normal_shape" in report

    def test_rerun_is_idempotent(self, league, model_file, tmp_path):
        args = ["evaluate", "--model", str(model_file),
                "--matches", str(league / "matches.csv"),
                "--players", str(league / "players.csv"),
                "--out-dir", str(tmp_path)]
        assert main(args) == 0
        first = (tmp_path / "report.txt").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "report.txt").read_bytes() == first

    def test_missing_model_exit_2(self, league, tmp_path):
        code = main(["evaluate", "--model", str(tmp_path / "no.json"),
                     "--matches", str(league / "matches.csv"),
                     "--players", str(league / "players.csv"),
                     "--out-dir", str(tmp_path)])
        assert code == 2


class TestElpar:
    def test_default_grid_has_800_rows(self, model_file, tmp_path):
        out = tmp_path / "grid.csv"
        assert main(["elpar", "--model", str(model_file), "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1 + 800

    def test_single_formation_restricts_grid(self, model_file, tmp_path):
        out = tmp_path / "grid.csv"
        assert main(["elpar", "--model", str(model_file), "--out", str(out),
                     "--formation", "3-5-2"]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1 + 200
        assert all(line.startswith("3-5-2,") for line in lines[1:])

    def test_malformed_formation_exit_2(self, model_file, tmp_path, capsys):
        code = main(["elpar", "--model", str(model_file),
                     "--out", str(tmp_path / "g.csv"), "--formation", "4-4-3"])
        assert code == 2
        assert "4-4-3" in capsys.readouterr().err

    def test_inverted_rating_range_exit_2(self, model_file, tmp_path):
        code = main(["elpar", "--model", str(model_file),
                     "--out", str(tmp_path / "g.csv"),
                     "--min-rating", "80", "--max-rating", "70"])
        assert code == 2


class TestMarket:
    def test_valuation_table(self, league, model_file, tmp_path):
        out = tmp_path / "valuations.csv"
        code = main(["market", "--model", str(model_file),
                     "--players", str(league / "players.csv"), "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "player_id,line,rating,elpar,market_value_eur,cost_per_point_eur"
        assert len(lines) > 300

    def test_fee_matches_library(self, model_file, capsys):
        code = main(["market", "--model", str(model_file), "--fee",
                     "--rating", "70", "--games", "38", "--slope", "0.44",
                     "--line", "MID"])
        assert code == 0
        printed = dict(
            line.split(" = ") for line in capsys.readouterr().out.strip().splitlines()
        )
        model, levels, _ = load_model(model_file)
        elpar = elpar_formation_average(model, Line.MID, 70.0, levels)
        assert float(printed["elpar_per_game"]) == elpar
        assert float(printed["fair_transfer_fee_millions"]) == 38 * elpar / 0.44

    def test_fee_requires_rating_and_slope(self, model_file):
        assert main(["market", "--model", str(model_file), "--fee"]) == 2

    def test_optimize_allocation(self, dense_players, model_file, capsys):
        code = main(["market", "--model", str(model_file),
                     "--players", str(dense_players),
                     "--optimize", "--budget", "6000000", "--needs", "DEF,MID"])
        assert code == 0
        printed = capsys.readouterr().out
        assert "allocation.DEF" in printed
        assert "allocation.MID" in printed
        total = int(
            [l for l in printed.splitlines() if l.startswith("total_spend")][0]
            .split(" = ")[1]
        )
        assert total <= 6_000_000

    def test_optimize_infeasible_exit_4(self, dense_players, model_file):
        code = main(["market", "--model", str(model_file),
                     "--players", str(dense_players),
                     "--optimize", "--budget", "1", "--needs", "DEF"])
        assert code == 4

    def test_bad_needs_token_exit_2(self, dense_players, model_file, capsys):
        code = main(["market", "--model", str(model_file),
                     "--players", str(dense_players),
                     "--optimize", "--budget", "6000000", "--needs", "DEF,XX"])
        assert code == 2
        assert "XX" in capsys.readouterr().err

    def test_wage_redistribution_conserves_total(self, model_file, tmp_path, capsys):
        squad = tmp_path / "squad.csv"
        rows = ["player_id,line,rating,wage_eur_month"]
        lines = ["GK"] + ["DEF"] * 4 + ["MID"] * 4 + ["ATT"] * 2
        for i, line in enumerate(lines):
            rows.append(f"p{i},{line},{70 + i},{10000 + 1000 * i}")
        squad.write_text("\n".join(rows) + "\n")
        code = main(["market", "--model", str(model_file), "--wages", str(squad)])
        assert code == 0
        printed = capsys.readouterr().out
        total_line = [l for l in printed.splitlines() if l.startswith("total")][0]
        before, after = total_line.split(" = ")[1].split(" -> ")
        assert int(before) == int(after) == sum(10000 + 1000 * i for i in range(11))

    def test_valuation_needs_players(self, model_file, tmp_path):
        assert main(["market", "--model", str(model_file),
                     "--out", str(tmp_path / "v.csv")]) == 2


class TestServe:
    def test_rejects_privileged_port(self, model_file):
        assert main(["serve", "--model", str(model_file), "--port", "80"]) == 2
