"""Tests for CSV ingestion, position mapping, rating lookups, and splits."""

from __future__ import annotations

import csv
import datetime

import pytest

from elpar.data import (
    Line,
    MatchRecord,
    PlayerSnapshot,
    POSITION_TO_LINE,
    SnapshotIndex,
    build_features,
    load_matches,
    load_players,
    position_to_line,
    replacement_levels,
    train_test_split,
)
from elpar.errors import (
    DataError,
    DomainError,
    InsufficientDataError,
    MappingError,
    MissingPlayerError,
)
from elpar.simulate import write_synthetic_league

MATCH_HEADER = (
    ["match_id", "league_id", "date", "home_goals", "away_goals"]
    + [f"h{i}" for i in range(1, 12)]
    + [f"a{i}" for i in range(1, 12)]
)
PLAYER_HEADER = [
    "player_id",
    "date",
    "overall_rating",
    "position",
    "market_value_eur",
    "wage_eur_month",
]


def write_csv(path, header, rows):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def match_row(match_id="m1", date="2017-09-02", hg=2, ag=1):
    home = [f"h{i:02d}" for i in range(11)]
    away = [f"a{i:02d}" for i in range(11)]
    return [match_id, "L1", date, str(hg), str(ag)] + home + away


def snapshot(pid, date="2017-07-01", rating=70.0, position="CM", value="1000000", wage="20000"):
    return [pid, date, str(rating), position, value, wage]


class TestLoadMatches:
    def test_round_trip_on_synthetic_league(self, tmp_path):
        matches_path, _ = write_synthetic_league(tmp_path, n_matches=30, seed=3)
        records = load_matches(matches_path)
        assert len(records) == 30
        first = records[0]
        assert len(first.home_players) == 11
        assert first.date.year == 2017
        assert isinstance(first.goal_diff, int)

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER[:-1] + ["a12"], [])
        with pytest.raises(DataError, match="header"):
            load_matches(path)

    def test_bad_date_names_line_and_column(self, tmp_path):
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER, [match_row(date="02/09/2017")])
        with pytest.raises(DataError, match=r"matches\.csv:2.*date"):
            load_matches(path)

    def test_bad_goal_count_names_column(self, tmp_path):
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER, [match_row(hg="two")])
        with pytest.raises(DataError, match="home_goals"):
            load_matches(path)

    def test_negative_goals_rejected(self, tmp_path):
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER, [match_row(hg=-1)])
        with pytest.raises(DataError, match="nonnegative"):
            load_matches(path)

    def test_duplicate_match_id_rejected(self, tmp_path):
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER, [match_row("m1"), match_row("m1")])
        with pytest.raises(DataError, match="duplicate match_id"):
            load_matches(path)

    def test_repeated_player_slot_rejected(self, tmp_path):
        row = match_row()
        row[6] = row[5]  # same player twice in the home lineup
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER, [row])
        with pytest.raises(DataError, match="repeat"):
            load_matches(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "matches.csv"
        write_csv(path, MATCH_HEADER, [])
        with pytest.raises(DataError, match="no match rows"):
            load_matches(path)


class TestLoadPlayers:
    def test_missing_money_becomes_none(self, tmp_path):
        path = tmp_path / "players.csv"
        write_csv(path, PLAYER_HEADER, [snapshot("p1", value="", wage="")])
        snap = load_players(path)[0]
        assert snap.market_value_eur is None
        assert snap.wage_eur_month is None

    def test_money_parses_to_int(self, tmp_path):
        path = tmp_path / "players.csv"
        write_csv(path, PLAYER_HEADER, [snapshot("p1", value="2500000", wage="40000")])
        snap = load_players(path)[0]
        assert snap.market_value_eur == 2500000
        assert snap.wage_eur_month == 40000

    def test_duplicate_snapshot_rejected(self, tmp_path):
        path = tmp_path / "players.csv"
        write_csv(path, PLAYER_HEADER, [snapshot("p1"), snapshot("p1")])
        with pytest.raises(DataError, match="duplicate snapshot"):
            load_players(path)

    def test_rating_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "players.csv"
        write_csv(path, PLAYER_HEADER, [snapshot("p1", rating=135.0)])
        with pytest.raises(DataError, match="rating"):
            load_players(path)

    def test_bad_rating_number_names_column(self, tmp_path):
        path = tmp_path / "players.csv"
        write_csv(path, PLAYER_HEADER, [snapshot("p1", rating="high")])
        with pytest.raises(DataError, match="overall_rating"):
            load_players(path)


class TestPositionMapping:
    def test_all_vocabulary_tokens_resolve(self):
        assert position_to_line("GK") is Line.GK
        assert position_to_line("CB") is Line.DEF
        assert position_to_line("LWB") is Line.DEF
        assert position_to_line("CAM") is Line.MID
        assert position_to_line("ST") is Line.ATT
        assert position_to_line("SS") is Line.ATT

    def test_unknown_token_is_hard_error(self):
        with pytest.raises(MappingError, match="XYZ"):
            position_to_line("XYZ")

    def test_override_mapping_wins(self):
        custom = dict(POSITION_TO_LINE)
        custom["LIBERO"] = Line.DEF
        assert position_to_line("LIBERO", custom) is Line.DEF
        with pytest.raises(MappingError):
            position_to_line("LIBERO")


def _snap(pid, date, rating, position="CM"):
    return PlayerSnapshot(
        player_id=pid,
        date=datetime.date.fromisoformat(date),
        overall_rating=rating,
        position=position,
        market_value_eur=None,
        wage_eur_month=None,
    )


class TestSnapshotIndex:
    def test_uses_latest_snapshot_on_or_before_date(self):
        index = SnapshotIndex(
            [_snap("p1", "2017-07-01", 70.0), _snap("p1", "2018-01-15", 74.0)]
        )
        assert index.rating_at("p1", datetime.date(2017, 9, 1)) == 70.0
        assert index.rating_at("p1", datetime.date(2018, 1, 15)) == 74.0
        assert index.rating_at("p1", datetime.date(2018, 6, 1)) == 74.0

    def test_falls_back_to_earliest_before_first_release(self):
        index = SnapshotIndex(
            [_snap("p1", "2017-07-01", 70.0), _snap("p1", "2018-01-15", 74.0)]
        )
        assert index.rating_at("p1", datetime.date(2017, 1, 1)) == 70.0

    def test_unknown_player_raises(self):
        index = SnapshotIndex([_snap("p1", "2017-07-01", 70.0)])
        with pytest.raises(MissingPlayerError, match="ghost"):
            index.rating_at("ghost", datetime.date(2017, 9, 1))


def _lineup_snapshots(prefix, gk, defenders, midfielders, attackers, date="2017-07-01"):
    snaps = [_snap(f"{prefix}gk", date, gk, "GK")]
    for i, rating in enumerate(defenders):
        snaps.append(_snap(f"{prefix}d{i}", date, rating, "CB"))
    for i, rating in enumerate(midfielders):
        snaps.append(_snap(f"{prefix}m{i}", date, rating, "CM"))
    for i, rating in enumerate(attackers):
        snaps.append(_snap(f"{prefix}a{i}", date, rating, "ST"))
    return snaps


class TestBuildFeatures:
    def test_line_average_differences(self):
        home = _lineup_snapshots("h", 70.0, [68.0, 70.0, 72.0, 74.0], [65.0] * 4, [80.0, 82.0])
        away = _lineup_snapshots("a", 65.0, [60.0] * 4, [65.0] * 4, [70.0, 70.0])
        index = SnapshotIndex(home + away)
        match = MatchRecord(
            match_id="m1",
            league_id="L1",
            date=datetime.date(2017, 9, 2),
            home_goals=2,
            away_goals=0,
            home_players=tuple(s.player_id for s in home),
            away_players=tuple(s.player_id for s in away),
        )
        features = build_features(match, index)
        assert features.x_def == pytest.approx(11.0)  # 71 - 60
        assert features.x_mid == pytest.approx(0.0)
        assert features.x_att == pytest.approx(11.0)  # 81 - 70
        assert features.x_gk == pytest.approx(5.0)

    def test_missing_line_is_an_error(self):
        # home side fields no attackers at all
        home = _lineup_snapshots("h", 70.0, [68.0] * 5, [65.0] * 5, [])
        away = _lineup_snapshots("a", 65.0, [60.0] * 4, [65.0] * 4, [70.0, 70.0])
        index = SnapshotIndex(home + away)
        match = MatchRecord(
            match_id="m9",
            league_id="L1",
            date=datetime.date(2017, 9, 2),
            home_goals=0,
            away_goals=0,
            home_players=tuple(s.player_id for s in home),
            away_players=tuple(s.player_id for s in away),
        )
        with pytest.raises(DataError, match="ATT"):
            build_features(match, index)


class TestReplacementLevels:
    def test_eighty_percent_of_mean_per_line(self):
        snaps = []
        for line_prefix, position in (("g", "GK"), ("d", "CB"), ("m", "CM"), ("a", "ST")):
            for i in range(30):
                snaps.append(_snap(f"{line_prefix}{i}", "2017-07-01", 50.0 + i, position))
        levels = replacement_levels(snaps)
        expected = 0.8 * (50.0 + 79.0) / 2.0
        for line in Line:
            assert levels[line] == pytest.approx(expected)

    def test_uses_latest_rating_per_player(self):
        snaps = []
        for i in range(30):
            snaps.append(_snap(f"d{i}", "2017-07-01", 60.0, "CB"))
            snaps.append(_snap(f"d{i}", "2018-01-15", 70.0, "CB"))
        for line_prefix, position in (("g", "GK"), ("m", "CM"), ("a", "ST")):
            for i in range(30):
                snaps.append(_snap(f"{line_prefix}{i}", "2017-07-01", 60.0, position))
        levels = replacement_levels(snaps)
        assert levels[Line.DEF] == pytest.approx(0.8 * 70.0)
        assert levels[Line.MID] == pytest.approx(0.8 * 60.0)

    def test_thin_line_rejected(self):
        snaps = []
        for line_prefix, position in (("g", "GK"), ("d", "CB"), ("m", "CM")):
            for i in range(30):
                snaps.append(_snap(f"{line_prefix}{i}", "2017-07-01", 60.0, position))
        snaps.append(_snap("lone-striker", "2017-07-01", 85.0, "ST"))
        with pytest.raises(InsufficientDataError, match="ATT"):
            replacement_levels(snaps)


def _matches(n):
    out = []
    for i in range(n):
        out.append(
            MatchRecord(
                match_id=f"m{i}",
                league_id="L1",
                date=datetime.date(2017, 9, 2),
                home_goals=1,
                away_goals=0,
                home_players=tuple(f"h{i}-{j}" for j in range(11)),
                away_players=tuple(f"a{i}-{j}" for j in range(11)),
            )
        )
    return out


class TestTrainTestSplit:
    def test_ceiling_partition_sizes(self):
        train, test = train_test_split(_matches(10), 0.8, seed=1)
        assert len(train) == 8 and len(test) == 2
        train, test = train_test_split(_matches(11), 0.8, seed=1)
        assert len(train) == 9 and len(test) == 2

    def test_same_seed_same_split(self):
        matches = _matches(40)
        a_train, a_test = train_test_split(matches, 0.75, seed=9)
        b_train, b_test = train_test_split(matches, 0.75, seed=9)
        assert [m.match_id for m in a_train] == [m.match_id for m in b_train]
        assert [m.match_id for m in a_test] == [m.match_id for m in b_test]

    def test_different_seed_different_split(self):
        matches = _matches(40)
        a_train, _ = train_test_split(matches, 0.75, seed=9)
        b_train, _ = train_test_split(matches, 0.75, seed=10)
        assert [m.match_id for m in a_train] != [m.match_id for m in b_train]

    def test_split_is_a_partition(self):
        matches = _matches(25)
        train, test = train_test_split(matches, 0.6, seed=2)
        assert sorted(m.match_id for m in train + test) == sorted(
            m.match_id for m in matches
        )

    def test_empty_side_rejected(self):
        with pytest.raises(InsufficientDataError):
            train_test_split(_matches(10), 0.999, seed=1)

    def test_fraction_bounds_enforced(self):
        with pytest.raises(DomainError):
            train_test_split(_matches(10), 0.0, seed=1)
        with pytest.raises(DomainError):
            train_test_split(_matches(10), 1.0, seed=1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
