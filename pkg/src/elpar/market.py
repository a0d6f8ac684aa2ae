"""Money layer: pricing expected points and spending a budget well.

Once a player's on-pitch worth is a number of league points, the market
side is arithmetic: euros of market value per point bought, a wage bill
re-split in proportion to points added, a price curve per line and rating
for shopping, and a points-per-million slope that turns a season of eLPAR
into a fair transfer fee.

Money is handled as integer euro amounts throughout, except transfer fees,
which are quoted in (fractional) millions because that is how the slope is
expressed.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from pathlib import Path

import numpy as np

from .data import LINE_ORDER, Line, PlayerSnapshot, SnapshotIndex, position_to_line
from .data import ReplacementLevels
from .errors import (
    DataError,
    DegenerateRedistributionError,
    DegenerateRegressionError,
    DomainError,
    InfeasibleBudgetError,
    InsufficientDataError,
    ReplacementLevelPlayerError,
)
from .glm import SkellamGlmModel
from .points import CANONICAL_FORMATIONS, Formation, elpar_formation_average

__all__ = [
    "ValuationRecord",
    "ValueCurve",
    "AllocationSlot",
    "BudgetPointsFit",
    "cost_per_point",
    "wage_redistribution",
    "build_value_curve",
    "optimize_budget",
    "fit_budget_points",
    "fair_transfer_fee",
    "valuation_records",
    "write_valuation_table",
]

SQUAD_SIZE = 11
DEFAULT_BUDGET_INCREMENT = 100_000
_MIN_CELL_SUPPORT = 5


def _check_money(value: int, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{label} must be an integer euro amount, got {value!r}")
    if value < 0:
        raise DomainError(f"{label} must be nonnegative, got {value}")
    return value


# ---------------------------------------------------------------------------
# per-player valuation
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ValuationRecord:
    """One player's market value set against the points they add."""

    player_id: str
    line: Line
    rating: float
    elpar_per_game: float
    market_value: int
    wage: int | None = None
    cost_per_point: int | None = None

    def __post_init__(self) -> None:
        _check_money(self.market_value, "market value")
        if self.wage is not None:
            _check_money(self.wage, "wage")
        if (self.elpar_per_game > 0.0) != (self.cost_per_point is not None):
            raise DomainError(
                "cost per point must be present exactly when eLPAR is positive"
            )


def cost_per_point(market_value: int, elpar: float) -> int:
    """Euros of market value paid per expected league point added."""
    _check_money(market_value, "market value")
    if not math.isfinite(elpar):
        raise DomainError(f"eLPAR must be finite, got {elpar}")
    if elpar <= 0.0:
        raise ReplacementLevelPlayerError(
            "player adds no points over a free replacement; cost per point undefined"
        )
    return round(market_value / elpar)


def wage_redistribution(squad: list[ValuationRecord]) -> list[int]:
    """Re-split the starting XI's wage bill in proportion to points added.

    Players at or below replacement contribute no share and receive 0.
    The rounding remainder lands on the last paying player, so the total
    paid out equals the original bill to the euro.
    """
    if len(squad) != SQUAD_SIZE:
        raise DomainError(f"redistribution expects a full XI, got {len(squad)} players")
    if any(record.wage is None for record in squad):
        missing = [r.player_id for r in squad if r.wage is None]
        raise DomainError(f"players without wages: {missing}")
    budget = sum(record.wage for record in squad)
    shares = [max(record.elpar_per_game, 0.0) for record in squad]
    total_share = math.fsum(shares)
    if total_share <= 0.0:
        raise DegenerateRedistributionError(
            "nobody in the squad adds points above replacement"
        )
    paying = [i for i, share in enumerate(shares) if share > 0.0]
    redistributed = [0] * len(squad)
    for i in paying[:-1]:
        redistributed[i] = round(budget * (shares[i] / total_share))
    redistributed[paying[-1]] = budget - sum(redistributed)
    return redistributed


# ---------------------------------------------------------------------------
# market price curve
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ValueCurve:
    """Average market price per (line, whole-number rating).

    cells carries the monotone-smoothed prices the optimizer shops from;
    raw_cells keeps the unsmoothed means for inspection.  A missing cell
    means the market offers no such player, not that one is free.
    """

    cells: dict[Line, dict[int, int]]
    raw_cells: dict[Line, dict[int, int]]

    def __post_init__(self) -> None:
        for line, prices in self.cells.items():
            order = sorted(prices)
            for lo, hi in zip(order, order[1:]):
                if prices[lo] > prices[hi]:
                    raise DomainError(f"smoothed {line} prices invert at rating {hi}")

    def price(self, line: Line, rating: int) -> int | None:
        return self.cells.get(line, {}).get(rating)

    def ratings(self, line: Line) -> list[int]:
        return sorted(self.cells.get(line, {}))

    def best_affordable(self, line: Line, spend: int) -> int | None:
        """Highest rating the spend buys on this line, None if priced out."""
        best = None
        for rating in self.ratings(line):
            if self.cells[line][rating] <= spend:
                best = rating
        return best


def _pava_nondecreasing(values: list[float], weights: list[float]) -> list[float]:
    # pool-adjacent-violators: the closest nondecreasing sequence in
    # weighted least squares; violating neighbours merge into their mean
    blocks: list[list[float]] = []  # [mean, weight, span]
    for value, weight in zip(values, weights):
        blocks.append([value, weight, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, s2 = blocks.pop()
            m1, w1, s1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, s1 + s2])
    out: list[float] = []
    for mean, _, span in blocks:
        out.extend([mean] * span)
    return out


def build_value_curve(
    snapshots: list[PlayerSnapshot],
    min_support: int = _MIN_CELL_SUPPORT,
    mapping: dict[str, Line] | None = None,
) -> ValueCurve:
    """Average each player's latest market value per line and rating.

    Cells backed by fewer than min_support players are dropped: a couple
    of outlier price tags would otherwise steer the optimizer.  Prices are
    then smoothed per line to be nondecreasing in rating.
    """
    if min_support < 1:
        raise DomainError("cell support threshold must be at least 1")
    index = SnapshotIndex(snapshots)
    values: dict[Line, dict[int, list[int]]] = {}
    for player_id in index.player_ids():
        latest = index.latest(player_id)
        if latest.market_value_eur is None:
            continue
        line = position_to_line(latest.position, mapping)
        bucket = round(latest.overall_rating)
        values.setdefault(line, {}).setdefault(bucket, []).append(
            latest.market_value_eur
        )
    raw: dict[Line, dict[int, int]] = {}
    counts: dict[Line, dict[int, int]] = {}
    for line, buckets in values.items():
        for rating, cell in buckets.items():
            if len(cell) >= min_support:
                raw.setdefault(line, {})[rating] = round(sum(cell) / len(cell))
                counts.setdefault(line, {})[rating] = len(cell)
    cells: dict[Line, dict[int, int]] = {}
    for line, prices in raw.items():
        order = sorted(prices)
        smoothed = _pava_nondecreasing(
            [float(prices[r]) for r in order],
            [float(counts[line][r]) for r in order],
        )
        cells[line] = {r: round(v) for r, v in zip(order, smoothed)}
    return ValueCurve(cells=cells, raw_cells=raw)


# ---------------------------------------------------------------------------
# budget optimization
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class AllocationSlot:
    """One filled need: the line, what it costs, and what it buys."""

    line: Line
    spend: int
    rating: int
    elpar: float

    def as_dict(self) -> dict[str, object]:
        return {
            "line": self.line.value,
            "spend": self.spend,
            "rating": self.rating,
            "elpar": self.elpar,
        }


def optimize_budget(
    budget: int,
    needs: list[Line],
    curve: ValueCurve,
    model: SkellamGlmModel,
    levels: ReplacementLevels,
    increment: int = DEFAULT_BUDGET_INCREMENT,
    formations: tuple[Formation, ...] = CANONICAL_FORMATIONS,
) -> list[AllocationSlot]:
    """Split a transfer budget across line needs to maximize points bought.

    Per-slot spend candidates walk a fixed grid (0, increment, ...) plus
    the full budget; each candidate buys the best rating the curve affords
    at that spend.  The reported spend is the price of the rating actually
    bought, so money the grid step would waste is returned.  Ties break
    toward the cheaper total spend, then lexicographically in line order.
    """
    _check_money(budget, "budget")
    _check_money(increment, "increment")
    if increment == 0:
        raise DomainError("increment must be positive")
    if not needs:
        raise DomainError("needs must list at least one line")
    slots = sorted(needs, key=LINE_ORDER.index)
    for line in set(slots):
        ratings = curve.ratings(line)
        if not ratings:
            raise DataError(f"value curve has no {line} cells")
        if ratings != list(range(ratings[0], ratings[-1] + 1)):
            raise DataError(f"value curve for {line} has rating gaps")

    spend_grid = list(range(0, budget + 1, increment))
    if spend_grid[-1] != budget:
        spend_grid.append(budget)
    options: dict[Line, list[tuple[int, int, float]]] = {}
    for line in set(slots):
        reachable: dict[int, int] = {}
        for spend in spend_grid:
            rating = curve.best_affordable(line, spend)
            if rating is not None and rating not in reachable:
                reachable[rating] = curve.price(line, rating)
        options[line] = [
            (price, rating, elpar_formation_average(model, line, float(rating), levels, formations))
            for rating, price in sorted(reachable.items())
        ]
    infeasible = [str(line) for line in set(slots) if not options[line]]
    if infeasible:
        raise InfeasibleBudgetError(
            f"budget {budget} buys nobody on lines: {sorted(infeasible)}"
        )

    cheapest_after = [0] * (len(slots) + 1)
    for i in range(len(slots) - 1, -1, -1):
        cheapest_after[i] = cheapest_after[i + 1] + options[slots[i]][0][0]
    if cheapest_after[0] > budget:
        raise InfeasibleBudgetError(
            f"cheapest way to fill {[str(s) for s in slots]} costs "
            f"{cheapest_after[0]}, budget is {budget}"
        )

    best_key: tuple | None = None
    best_choice: list[tuple[int, int, float]] | None = None
    chosen: list[tuple[int, int, float]] = []

    def walk(i: int, cost: int, elpar_sum: float) -> None:
        nonlocal best_key, best_choice
        if i == len(slots):
            key = (-elpar_sum, cost, tuple(c[0] for c in chosen))
            if best_key is None or key < best_key:
                best_key = key
                best_choice = list(chosen)
            return
        for option in options[slots[i]]:
            # options are sorted by price; once one busts the budget the rest do
            if cost + option[0] + cheapest_after[i + 1] > budget:
                break
            chosen.append(option)
            walk(i + 1, cost + option[0], elpar_sum + option[2])
            chosen.pop()

    walk(0, 0, 0.0)
    assert best_choice is not None  # feasibility established above
    return [
        AllocationSlot(line=line, spend=price, rating=rating, elpar=elpar)
        for line, (price, rating, elpar) in zip(slots, best_choice)
    ]


# ---------------------------------------------------------------------------
# budget-to-points regression and fees
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class BudgetPointsFit:
    """League points bought per million euros of budget, with fit quality."""

    slope: float
    intercept: float
    r_squared: float
    n_teams: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.r_squared <= 1.0):
            raise DomainError(f"r_squared must lie in [0, 1], got {self.r_squared}")


def fit_budget_points(
    team_budgets: list[int], team_points: list[float]
) -> BudgetPointsFit:
    """Least-squares line through (budget in millions, season points)."""
    if len(team_budgets) != len(team_points):
        raise DomainError("budgets and points must align")
    if len(team_budgets) < 3:
        raise InsufficientDataError(
            f"need at least 3 teams, got {len(team_budgets)}"
        )
    for value in team_budgets:
        _check_money(value, "team budget")
    x = np.asarray(team_budgets, dtype=float) / 1e6
    y = np.asarray(team_points, dtype=float)
    if not np.isfinite(y).all():
        raise DomainError("team points must be finite")
    x_mean, y_mean = float(x.mean()), float(y.mean())
    s_xx = float(((x - x_mean) ** 2).sum())
    if s_xx == 0.0:
        raise DegenerateRegressionError("every team has the same budget")
    slope = float(((x - x_mean) * (y - y_mean)).sum()) / s_xx
    intercept = y_mean - slope * x_mean
    ss_res = float(((y - (intercept + slope * x)) ** 2).sum())
    ss_tot = float(((y - y_mean) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return BudgetPointsFit(
        slope=slope,
        intercept=intercept,
        r_squared=min(max(r_squared, 0.0), 1.0),
        n_teams=len(team_budgets),
    )


def fair_transfer_fee(elpar: float, games: int, slope: float) -> float:
    """Fee in millions for a season of expected points, at market rates.

    Buying points through the budget-points line costs 1/slope million
    per point; a player offers games * elpar of them.
    """
    if isinstance(games, bool) or not isinstance(games, int) or games <= 0:
        raise DomainError(f"games must be a positive integer, got {games!r}")
    if not math.isfinite(elpar):
        raise DomainError(f"eLPAR must be finite, got {elpar}")
    if not math.isfinite(slope) or slope <= 0.0:
        raise DomainError(f"points-per-million slope must be positive, got {slope}")
    return games * elpar / slope


# ---------------------------------------------------------------------------
# bulk valuation
# ---------------------------------------------------------------------------

def valuation_records(
    snapshots: list[PlayerSnapshot],
    model: SkellamGlmModel,
    levels: ReplacementLevels,
    mapping: dict[str, Line] | None = None,
    formations: tuple[Formation, ...] = CANONICAL_FORMATIONS,
) -> list[ValuationRecord]:
    """Latest-snapshot valuation for every player with a market value."""
    index = SnapshotIndex(snapshots)
    records = []
    for player_id in index.player_ids():
        latest = index.latest(player_id)
        if latest.market_value_eur is None:
            continue
        line = position_to_line(latest.position, mapping)
        elpar = elpar_formation_average(
            model, line, latest.overall_rating, levels, formations
        )
        cost = (
            cost_per_point(latest.market_value_eur, elpar) if elpar > 0.0 else None
        )
        records.append(
            ValuationRecord(
                player_id=player_id,
                line=line,
                rating=latest.overall_rating,
                elpar_per_game=elpar,
                market_value=latest.market_value_eur,
                wage=latest.wage_eur_month,
                cost_per_point=cost,
            )
        )
    return records


def write_valuation_table(path: str | Path, records: list[ValuationRecord]) -> None:
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["player_id", "line", "rating", "elpar", "market_value_eur", "cost_per_point_eur"]
        )
        for record in records:
            writer.writerow(
                [
                    record.player_id,
                    record.line.value,
                    f"{record.rating:g}",
                    repr(record.elpar_per_game),
                    record.market_value,
                    "" if record.cost_per_point is None else record.cost_per_point,
                ]
            )
