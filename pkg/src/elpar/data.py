"""CSV ingestion: matches, player rating snapshots, and derived features.

Two input files drive everything.  matches.csv carries one row per match
with the 22 starting player ids; players.csv carries dated rating snapshots
(a player appears once per ratings release, so lookups must respect the
match date to avoid peeking at future ratings).

Loaders fail fast with the file, line number, and column named in the
message; silently skipping bad rows would poison every statistic downstream.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime
import enum
import math
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    DomainError,
    InsufficientDataError,
    MappingError,
    MissingPlayerError,
)
from .glm import FeatureVector

__all__ = [
    "Line",
    "MatchRecord",
    "PlayerSnapshot",
    "ReplacementLevels",
    "POSITION_TO_LINE",
    "load_matches",
    "load_players",
    "position_to_line",
    "SnapshotIndex",
    "build_features",
    "replacement_levels",
    "train_test_split",
]


class Line(str, enum.Enum):
    """The four positional lines a lineup decomposes into."""

    GK = "GK"
    DEF = "DEF"
    MID = "MID"
    ATT = "ATT"

    def __str__(self) -> str:  # so f-strings print GK, not Line.GK
        return self.value


LINE_ORDER = (Line.GK, Line.DEF, Line.MID, Line.ATT)

# position token vocabulary; every token a data file may use must appear here
# (or in an override mapping) because an unmapped token is a hard error
POSITION_TO_LINE: dict[str, Line] = {
    "GK": Line.GK,
    "CB": Line.DEF,
    "LB": Line.DEF,
    "RB": Line.DEF,
    "LWB": Line.DEF,
    "RWB": Line.DEF,
    "SW": Line.DEF,
    "CDM": Line.MID,
    "CM": Line.MID,
    "CAM": Line.MID,
    "LM": Line.MID,
    "RM": Line.MID,
    "LW": Line.ATT,
    "RW": Line.ATT,
    "CF": Line.ATT,
    "ST": Line.ATT,
    "SS": Line.ATT,
}

_RATING_MIN, _RATING_MAX = 1.0, 99.0
_REPLACEMENT_FRACTION = 0.8
_MIN_PLAYERS_PER_LINE = 30


@dataclasses.dataclass(frozen=True)
class MatchRecord:
    match_id: str
    league_id: str
    date: datetime.date
    home_goals: int
    away_goals: int
    home_players: tuple[str, ...]
    away_players: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.home_goals < 0 or self.away_goals < 0:
            raise DomainError(f"match {self.match_id}: goals must be nonnegative")
        if len(self.home_players) != 11 or len(self.away_players) != 11:
            raise DomainError(f"match {self.match_id}: lineups must list 11 players")

    @property
    def goal_diff(self) -> int:
        return self.home_goals - self.away_goals


@dataclasses.dataclass(frozen=True)
class PlayerSnapshot:
    player_id: str
    date: datetime.date
    overall_rating: float
    position: str
    market_value_eur: int | None
    wage_eur_month: int | None

    def __post_init__(self) -> None:
        if not (_RATING_MIN <= self.overall_rating <= _RATING_MAX):
            raise DomainError(
                f"player {self.player_id}: rating {self.overall_rating} outside "
                f"[{_RATING_MIN:g}, {_RATING_MAX:g}]"
            )
        for name in ("market_value_eur", "wage_eur_month"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise DomainError(f"player {self.player_id}: {name} must be nonnegative")


@dataclasses.dataclass(frozen=True)
class ReplacementLevels:
    """Freely-available skill level per line: 80% of the mean current rating."""

    levels: dict[Line, float]

    def __post_init__(self) -> None:
        missing = [line for line in Line if line not in self.levels]
        if missing:
            raise DomainError(f"replacement levels missing lines: {missing}")
        for line, level in self.levels.items():
            if not (0.0 < level < _RATING_MAX):
                raise DomainError(f"replacement level for {line} out of range: {level}")

    def __getitem__(self, line: Line) -> float:
        return self.levels[line]

    def as_dict(self) -> dict[str, float]:
        return {line.value: self.levels[line] for line in LINE_ORDER}


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

_MATCH_COLUMNS = (
    ["match_id", "league_id", "date", "home_goals", "away_goals"]
    + [f"h{i}" for i in range(1, 12)]
    + [f"a{i}" for i in range(1, 12)]
)
_PLAYER_COLUMNS = [
    "player_id",
    "date",
    "overall_rating",
    "position",
    "market_value_eur",
    "wage_eur_month",
]


def _parse_date(raw: str, where: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(raw)
    except ValueError as exc:
        raise DataError(f"{where}: bad date {raw!r} (expected YYYY-MM-DD)") from exc


def _parse_int(raw: str, where: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise DataError(f"{where}: bad integer {raw!r}") from exc


def _check_header(header: list[str] | None, expected: list[str], path: Path) -> None:
    if header != expected:
        raise DataError(
            f"{path}: header mismatch\n  expected: {','.join(expected)}\n"
            f"  found:    {','.join(header or [])}"
        )


def load_matches(path: str | Path) -> list[MatchRecord]:
    """Parse matches.csv; raises DataError naming file/line/column on issues."""
    path = Path(path)
    records: list[MatchRecord] = []
    seen_ids: set[str] = set()
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        _check_header(header, _MATCH_COLUMNS, path)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}:{lineno}"
            if len(row) != len(_MATCH_COLUMNS):
                raise DataError(
                    f"{where}: expected {len(_MATCH_COLUMNS)} fields, found {len(row)}"
                )
            fields = dict(zip(_MATCH_COLUMNS, row))
            match_id = fields["match_id"]
            if not match_id:
                raise DataError(f"{where}: empty match_id")
            if match_id in seen_ids:
                raise DataError(f"{where}: duplicate match_id {match_id!r}")
            seen_ids.add(match_id)
            home = tuple(fields[f"h{i}"] for i in range(1, 12))
            away = tuple(fields[f"a{i}"] for i in range(1, 12))
            for col, pid in zip(_MATCH_COLUMNS[5:], home + away):
                if not pid:
                    raise DataError(f"{where}: column {col}: empty player id")
            players = home + away
            if len(set(players)) != 22:
                raise DataError(f"{where}: the 22 player slots repeat an id")
            try:
                record = MatchRecord(
                    match_id=match_id,
                    league_id=fields["league_id"],
                    date=_parse_date(fields["date"], f"{where}: column date"),
                    home_goals=_parse_int(fields["home_goals"], f"{where}: column home_goals"),
                    away_goals=_parse_int(fields["away_goals"], f"{where}: column away_goals"),
                    home_players=home,
                    away_players=away,
                )
            except DomainError as exc:
                raise DataError(f"{where}: {exc}") from exc
            records.append(record)
    if not records:
        raise DataError(f"{path}: no match rows")
    return records


def _parse_money(raw: str, where: str) -> int | None:
    if raw == "":
        return None  # unknown, deliberately distinct from zero
    return _parse_int(raw, where)


def load_players(path: str | Path) -> list[PlayerSnapshot]:
    """Parse players.csv rating snapshots."""
    path = Path(path)
    snapshots: list[PlayerSnapshot] = []
    seen: set[tuple[str, datetime.date]] = set()
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        _check_header(header, _PLAYER_COLUMNS, path)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}:{lineno}"
            if len(row) != len(_PLAYER_COLUMNS):
                raise DataError(
                    f"{where}: expected {len(_PLAYER_COLUMNS)} fields, found {len(row)}"
                )
            fields = dict(zip(_PLAYER_COLUMNS, row))
            if not fields["player_id"]:
                raise DataError(f"{where}: empty player_id")
            date = _parse_date(fields["date"], f"{where}: column date")
            key = (fields["player_id"], date)
            if key in seen:
                raise DataError(
                    f"{where}: duplicate snapshot for player {fields['player_id']!r} on {date}"
                )
            seen.add(key)
            try:
                rating = float(fields["overall_rating"])
            except ValueError as exc:
                raise DataError(
                    f"{where}: column overall_rating: bad number "
                    f"{fields['overall_rating']!r}"
                ) from exc
            try:
                snapshot = PlayerSnapshot(
                    player_id=fields["player_id"],
                    date=date,
                    overall_rating=rating,
                    position=fields["position"],
                    market_value_eur=_parse_money(
                        fields["market_value_eur"], f"{where}: column market_value_eur"
                    ),
                    wage_eur_month=_parse_money(
                        fields["wage_eur_month"], f"{where}: column wage_eur_month"
                    ),
                )
            except DomainError as exc:
                raise DataError(f"{where}: {exc}") from exc
            snapshots.append(snapshot)
    if not snapshots:
        raise DataError(f"{path}: no snapshot rows")
    return snapshots


# ---------------------------------------------------------------------------
# position mapping and rating lookup
# ---------------------------------------------------------------------------

def position_to_line(position: str, mapping: dict[str, Line] | None = None) -> Line:
    """Map a position token to its line; unknown tokens are hard errors."""
    table = POSITION_TO_LINE if mapping is None else mapping
    try:
        return table[position]
    except KeyError:
        raise MappingError(
            f"unknown position token {position!r}; add it to the mapping to proceed"
        ) from None


class SnapshotIndex:
    """Per-player snapshot timeline with date-aware lookups.

    rating_at returns the latest snapshot dated on or before the match; a
    player whose first snapshot postdates the match falls back to that
    earliest one (their rating existed, it just was not released yet).
    """

    def __init__(
        self,
        snapshots: list[PlayerSnapshot],
        mapping: dict[str, Line] | None = None,
    ) -> None:
        self._timeline: dict[str, list[PlayerSnapshot]] = {}
        self._mapping = mapping
        for snap in snapshots:
            self._timeline.setdefault(snap.player_id, []).append(snap)
        for history in self._timeline.values():
            history.sort(key=lambda s: s.date)

    def __contains__(self, player_id: str) -> bool:
        return player_id in self._timeline

    def player_ids(self) -> list[str]:
        return sorted(self._timeline)

    def snapshot_at(self, player_id: str, date: datetime.date) -> PlayerSnapshot:
        history = self._timeline.get(player_id)
        if not history:
            raise MissingPlayerError(f"no rating snapshots for player {player_id!r}")
        chosen = history[0]
        for snap in history:
            if snap.date > date:
                break
            chosen = snap
        return chosen

    def rating_at(self, player_id: str, date: datetime.date) -> float:
        return self.snapshot_at(player_id, date).overall_rating

    def latest(self, player_id: str) -> PlayerSnapshot:
        history = self._timeline.get(player_id)
        if not history:
            raise MissingPlayerError(f"no rating snapshots for player {player_id!r}")
        return history[-1]

    def line_of(self, snapshot: PlayerSnapshot) -> Line:
        return position_to_line(snapshot.position, self._mapping)


def _line_averages(
    players: tuple[str, ...],
    date: datetime.date,
    index: SnapshotIndex,
    match_id: str,
    side: str,
) -> dict[Line, float]:
    ratings: dict[Line, list[float]] = {line: [] for line in Line}
    for pid in players:
        snap = index.snapshot_at(pid, date)
        ratings[index.line_of(snap)].append(snap.overall_rating)
    for line in Line:
        if not ratings[line]:
            raise DataError(
                f"match {match_id}: {side} lineup has nobody on line {line}"
            )
    return {line: float(np.mean(ratings[line])) for line in Line}


def build_features(match: MatchRecord, index: SnapshotIndex) -> FeatureVector:
    """Home-minus-away difference of per-line average ratings."""
    home = _line_averages(match.home_players, match.date, index, match.match_id, "home")
    away = _line_averages(match.away_players, match.date, index, match.match_id, "away")
    return FeatureVector(
        x_def=home[Line.DEF] - away[Line.DEF],
        x_mid=home[Line.MID] - away[Line.MID],
        x_att=home[Line.ATT] - away[Line.ATT],
        x_gk=home[Line.GK] - away[Line.GK],
    )


def replacement_levels(
    snapshots: list[PlayerSnapshot],
    mapping: dict[str, Line] | None = None,
) -> ReplacementLevels:
    """80% of the mean current rating per line, one rating per player.

    Requires at least 30 distinct players per line so the level reflects a
    market, not a handful of individuals.
    """
    index = SnapshotIndex(snapshots, mapping)
    per_line: dict[Line, list[float]] = {line: [] for line in Line}
    for player_id in index.player_ids():
        snap = index.latest(player_id)
        per_line[index.line_of(snap)].append(snap.overall_rating)
    levels: dict[Line, float] = {}
    for line in Line:
        count = len(per_line[line])
        if count < _MIN_PLAYERS_PER_LINE:
            raise InsufficientDataError(
                f"line {line}: {count} players, need {_MIN_PLAYERS_PER_LINE} "
                "to estimate a replacement level"
            )
        levels[line] = _REPLACEMENT_FRACTION * float(np.mean(per_line[line]))
    return ReplacementLevels(levels)


def train_test_split(
    matches: list[MatchRecord], fraction: float, seed: int
) -> tuple[list[MatchRecord], list[MatchRecord]]:
    """Seeded shuffle split; train gets ceil(fraction * n) matches."""
    if not (0.0 < fraction < 1.0):
        raise DomainError(f"fraction must lie strictly between 0 and 1, got {fraction}")
    shuffled = list(matches)
    rng = np.random.default_rng(seed)
    rng.shuffle(shuffled)
    cut = math.ceil(fraction * len(shuffled))
    train, test = shuffled[:cut], shuffled[cut:]
    if not train or not test:
        raise InsufficientDataError(
            f"split of {len(matches)} matches at fraction {fraction} leaves an empty side"
        )
    return train, test
