"""Expected league points added above replacement (eLPAR).

The thought experiment: field eleven replacement-level players (every line
feature difference is zero against an equally dismal opponent), then swap
one slot for a player of a given rating.  That shifts the line's average
rating by (rating - replacement level) / line size, which moves the fitted
win and draw probabilities; points follow from 3 * delta_win + 1 * delta_draw.

A slot is worth the same whichever side fields it, so the default averages
the home-side and away-side insertions; the home-only variant stays
available because the raw fit is asymmetric (home advantage sits in the
intercepts).
"""

from __future__ import annotations

import dataclasses
import re

from .data import Line, ReplacementLevels
from .errors import DomainError
from .glm import FeatureVector, SkellamGlmModel, predict_lambdas
from .skellam import outcome_probs

__all__ = [
    "Formation",
    "CANONICAL_FORMATIONS",
    "ElparResult",
    "line_size",
    "elpar_per_game",
    "elpar_weighted",
    "elpar_table",
    "elpar_formation_average",
]

_RATING_MIN, _RATING_MAX = 1.0, 99.0
WIN_POINTS = 3.0
DRAW_POINTS = 1.0


@dataclasses.dataclass(frozen=True)
class Formation:
    """Outfield shape named defenders-midfielders-attackers; GK implicit."""

    defenders: int
    midfielders: int
    attackers: int

    def __post_init__(self) -> None:
        counts = (self.defenders, self.midfielders, self.attackers)
        if any(c < 1 for c in counts):
            raise DomainError(f"every line needs at least one player: {self}")
        if sum(counts) != 10:
            raise DomainError(f"outfield players must total 10: {self}")

    @classmethod
    def parse(cls, text: str) -> "Formation":
        if not re.fullmatch(r"\d+-\d+-\d+", text):
            raise DomainError(f"formation must look like 4-4-2, got {text!r}")
        d, m, a = (int(part) for part in text.split("-"))
        return cls(d, m, a)

    def __str__(self) -> str:
        return f"{self.defenders}-{self.midfielders}-{self.attackers}"


CANONICAL_FORMATIONS = (
    Formation(4, 4, 2),
    Formation(4, 3, 3),
    Formation(3, 5, 2),
    Formation(4, 5, 1),
)


def line_size(formation: Formation, line: Line) -> int:
    if line is Line.GK:
        return 1
    if line is Line.DEF:
        return formation.defenders
    if line is Line.MID:
        return formation.midfielders
    return formation.attackers


@dataclasses.dataclass(frozen=True)
class ElparResult:
    """One player-slot valuation: probability shifts and points per game."""

    formation: Formation
    line: Line
    player_rating: float
    points: float
    delta_win: float
    delta_draw: float
    delta_loss: float


_LINE_TO_FEATURE = {
    Line.DEF: "x_def",
    Line.MID: "x_mid",
    Line.ATT: "x_att",
    Line.GK: "x_gk",
}


def _features_with(line: Line, value: float) -> FeatureVector:
    kwargs = {"x_def": 0.0, "x_mid": 0.0, "x_att": 0.0, "x_gk": 0.0}
    kwargs[_LINE_TO_FEATURE[line]] = value
    return FeatureVector(**kwargs)


def _check_rating(rating: float) -> None:
    if not (_RATING_MIN <= rating <= _RATING_MAX):
        raise DomainError(f"rating {rating} outside [{_RATING_MIN:g}, {_RATING_MAX:g}]")


def elpar_per_game(
    model: SkellamGlmModel,
    formation: Formation,
    line: Line,
    rating: float,
    levels: ReplacementLevels,
    perspective: str = "symmetric",
) -> ElparResult:
    """Points per game a player of this rating adds over a replacement body.

    perspective picks whose shirt the player wears in the thought
    experiment: "home", "away", or the venue-free "symmetric" average.
    """
    _check_rating(rating)
    if perspective not in ("symmetric", "home", "away"):
        raise DomainError(f"unknown perspective {perspective!r}")
    shift = (rating - levels[line]) / line_size(formation, line)

    baseline = outcome_probs(predict_lambdas(model, _features_with(line, 0.0)))
    deltas = []
    if perspective in ("symmetric", "home"):
        probs = outcome_probs(predict_lambdas(model, _features_with(line, shift)))
        deltas.append(
            (
                probs.p_win - baseline.p_win,
                probs.p_draw - baseline.p_draw,
                probs.p_loss - baseline.p_loss,
            )
        )
    if perspective in ("symmetric", "away"):
        probs = outcome_probs(predict_lambdas(model, _features_with(line, -shift)))
        # the away side wins when the home-perspective outcome is a loss
        deltas.append(
            (
                probs.p_loss - baseline.p_loss,
                probs.p_draw - baseline.p_draw,
                probs.p_win - baseline.p_win,
            )
        )
    d_win = sum(d[0] for d in deltas) / len(deltas)
    d_draw = sum(d[1] for d in deltas) / len(deltas)
    d_loss = sum(d[2] for d in deltas) / len(deltas)
    return ElparResult(
        formation=formation,
        line=line,
        player_rating=rating,
        points=WIN_POINTS * d_win + DRAW_POINTS * d_draw,
        delta_win=d_win,
        delta_draw=d_draw,
        delta_loss=d_loss,
    )


def elpar_weighted(
    per_formation: list[ElparResult], minutes: list[float]
) -> float:
    """Season value: per-formation points weighted by minutes played in each."""
    if len(per_formation) != len(minutes):
        raise DomainError("results and minutes must align")
    if not per_formation:
        raise DomainError("need at least one formation")
    if any(m < 0 for m in minutes):
        raise DomainError("minutes must be nonnegative")
    total = sum(minutes)
    if total <= 0.0:
        raise DomainError("total minutes must be positive")
    return sum(r.points * m for r, m in zip(per_formation, minutes)) / total


def elpar_table(
    model: SkellamGlmModel,
    levels: ReplacementLevels,
    formations: tuple[Formation, ...] = CANONICAL_FORMATIONS,
    ratings: range = range(50, 100),
) -> list[ElparResult]:
    """Grid of slot values over formations, lines, and whole-number ratings."""
    table = []
    for formation in formations:
        for line in Line:
            for rating in ratings:
                table.append(
                    elpar_per_game(model, formation, line, float(rating), levels)
                )
    return table


def elpar_formation_average(
    model: SkellamGlmModel,
    line: Line,
    rating: float,
    levels: ReplacementLevels,
    formations: tuple[Formation, ...] = CANONICAL_FORMATIONS,
) -> float:
    """Formation-free slot value: equal playing time across the given shapes."""
    results = [
        elpar_per_game(model, formation, line, rating, levels)
        for formation in formations
    ]
    return elpar_weighted(results, [1.0] * len(results))
