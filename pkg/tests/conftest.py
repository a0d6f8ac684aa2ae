"""Shared fixtures: a synthetic league, a fitted model, a dense market."""

import pytest

from elpar.cli import main


@pytest.fixture(scope="session")
def league(tmp_path_factory):
    root = tmp_path_factory.mktemp("league")
    assert main(["simulate", "--out-dir", str(root), "--n-matches", "240",
                 "--n-players", "420", "--seed", "11"]) == 0
    return root


@pytest.fixture(scope="session")
def model_file(league, tmp_path_factory):
    out = tmp_path_factory.mktemp("fit") / "model.json"
    code = main([
        "fit",
        "--matches", str(league / "matches.csv"),
        "--players", str(league / "players.csv"),
        "--out", str(out),
        "--seed", "3",
    ])
    assert code == 0
    return out


@pytest.fixture(scope="session")
def dense_players(tmp_path_factory):
    """Five snapshots per (line, rating) cell so the value curve has no gaps."""
    path = tmp_path_factory.mktemp("dense") / "players.csv"
    rows = ["player_id,date,overall_rating,position,market_value_eur,wage_eur_month"]
    positions = {"GK": "GK", "DEF": "CB", "MID": "CM", "ATT": "ST"}
    i = 0
    for _, position in positions.items():
        for rating in range(60, 71):
            for _ in range(5):
                value = (rating - 55) * 200_000
                rows.append(f"d{i},2024-01-01,{rating},{position},{value},9000")
                i += 1
    path.write_text("\n".join(rows) + "\n")
    return path
