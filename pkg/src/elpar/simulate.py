"""Synthetic data generation for harness tests and demos.

Two levels: draw_regression_data produces bare (features, goal diff) pairs
from known coefficients, which is what coefficient-recovery checks need;
write_synthetic_league fabricates a whole matches.csv / players.csv pair so
the file-level pipeline can run end to end without real data.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .data import POSITION_TO_LINE, Line
from .errors import DomainError
from .glm import FeatureVector

__all__ = [
    "DEFAULT_B1",
    "DEFAULT_B2",
    "draw_regression_data",
    "draw_outcomes",
    "write_synthetic_league",
]

# league-scale defaults: home rate just under 1.5 goals, away just over 1.0,
# with defense/midfield/attack/goalkeeper rating edges feeding both rates
DEFAULT_B1 = (0.37, 0.02, 0.02, 0.01, 0.001)
DEFAULT_B2 = (0.07, -0.03, -0.015, -0.01, -0.004)


def _rates(b: np.ndarray, features: np.ndarray) -> np.ndarray:
    return np.exp(b[0] + features @ b[1:])


def draw_regression_data(
    b1,
    b2,
    n: int,
    seed: int,
    feature_range: float = 10.0,
) -> list[tuple[FeatureVector, int]]:
    """Matches with features uniform on [-range, range] and Poisson goals."""
    if n < 1:
        raise DomainError("n must be positive")
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    rng = np.random.default_rng(seed)
    features = rng.uniform(-feature_range, feature_range, size=(n, 4))
    home_goals = rng.poisson(_rates(b1, features))
    away_goals = rng.poisson(_rates(b2, features))
    diffs = home_goals - away_goals
    return [
        (FeatureVector(*row), int(d)) for row, d in zip(features, diffs)
    ]


def draw_outcomes(
    b1, b2, n: int, seed: int, feature_range: float = 10.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(feature matrix, home goals, away goals) for calibration studies."""
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    rng = np.random.default_rng(seed)
    features = rng.uniform(-feature_range, feature_range, size=(n, 4))
    home_goals = rng.poisson(_rates(b1, features))
    away_goals = rng.poisson(_rates(b2, features))
    return features, home_goals, away_goals


# ---------------------------------------------------------------------------
# file-level synthetic league
# ---------------------------------------------------------------------------

_TOKENS_BY_LINE: dict[Line, list[str]] = {}
for _token, _line in POSITION_TO_LINE.items():
    _TOKENS_BY_LINE.setdefault(_line, []).append(_token)

_POOL_SHARES = {Line.GK: 0.12, Line.DEF: 0.34, Line.MID: 0.34, Line.ATT: 0.20}
_LINEUP_SHAPES = ((4, 4, 2), (4, 3, 3), (3, 5, 2), (4, 5, 1))


def _player_pool(n_players: int, rng: np.random.Generator):
    pool: dict[Line, list[tuple[str, float]]] = {line: [] for line in Line}
    rows = []
    counts = {
        line: max(32, int(round(share * n_players)))
        for line, share in _POOL_SHARES.items()
    }
    serial = 0
    for line in Line:
        for _ in range(counts[line]):
            serial += 1
            player_id = f"p{serial:05d}"
            rating = float(np.clip(rng.normal(64.0, 10.0), 40.0, 97.0))
            token = _TOKENS_BY_LINE[line][rng.integers(len(_TOKENS_BY_LINE[line]))]
            # market value grows roughly exponentially in rating; a few
            # players have unknown value/wage to exercise missing-money rows
            value = int(25_000.0 * 1.13 ** (rating - 40.0) * rng.lognormal(0.0, 0.2))
            wage = max(500, value // 120)
            missing = rng.random() < 0.04
            rows.append(
                (
                    player_id,
                    "2017-07-01",
                    f"{rating:.1f}",
                    token,
                    "" if missing else str(value),
                    "" if missing else str(wage),
                )
            )
            pool[line].append((player_id, rating))
    return pool, rows


def _lineup(pool, shape, rng) -> tuple[list[str], dict[Line, float]]:
    needs = {Line.GK: 1, Line.DEF: shape[0], Line.MID: shape[1], Line.ATT: shape[2]}
    ids: list[str] = []
    averages: dict[Line, float] = {}
    for line in Line:
        members = pool[line]
        picks = rng.choice(len(members), size=needs[line], replace=False)
        chosen = [members[int(i)] for i in picks]
        ids.extend(pid for pid, _ in chosen)
        averages[line] = float(np.mean([rating for _, rating in chosen]))
    return ids, averages


def write_synthetic_league(
    out_dir: str | Path,
    n_matches: int = 200,
    n_players: int = 400,
    seed: int = 7,
    b1=DEFAULT_B1,
    b2=DEFAULT_B2,
) -> tuple[Path, Path]:
    """Write matches.csv and players.csv for a fabricated league season.

    Goals are drawn from the model itself, so a fit on the output recovers
    coefficients of the same sign and scale.  Fully determined by the seed.
    """
    if n_matches < 1:
        raise DomainError("n_matches must be positive")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)

    pool, player_rows = _player_pool(n_players, rng)
    match_rows = []
    season_start = np.datetime64("2017-08-05")
    for i in range(n_matches):
        shape_home = _LINEUP_SHAPES[rng.integers(len(_LINEUP_SHAPES))]
        shape_away = _LINEUP_SHAPES[rng.integers(len(_LINEUP_SHAPES))]
        while True:
            home_ids, home_avg = _lineup(pool, shape_home, rng)
            away_ids, away_avg = _lineup(pool, shape_away, rng)
            if not set(home_ids) & set(away_ids):
                break
        features = np.array(
            [
                home_avg[Line.DEF] - away_avg[Line.DEF],
                home_avg[Line.MID] - away_avg[Line.MID],
                home_avg[Line.ATT] - away_avg[Line.ATT],
                home_avg[Line.GK] - away_avg[Line.GK],
            ]
        )
        l1 = float(np.exp(b1[0] + features @ b1[1:]))
        l2 = float(np.exp(b2[0] + features @ b2[1:]))
        date = season_start + np.timedelta64(int(i // 10) * 7, "D")
        match_rows.append(
            [f"m{i + 1:05d}", "L1", str(date), str(int(rng.poisson(l1))), str(int(rng.poisson(l2)))]
            + home_ids
            + away_ids
        )

    matches_path = out_dir / "matches.csv"
    players_path = out_dir / "players.csv"
    with matches_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["match_id", "league_id", "date", "home_goals", "away_goals"]
            + [f"h{i}" for i in range(1, 12)]
            + [f"a{i}" for i in range(1, 12)]
        )
        writer.writerows(match_rows)
    with players_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["player_id", "date", "overall_rating", "position", "market_value_eur", "wage_eur_month"]
        )
        writer.writerows(player_rows)
    return matches_path, players_path
