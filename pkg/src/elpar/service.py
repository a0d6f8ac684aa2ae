"""Read-only HTTP facade over a fitted model.

Every endpoint is a thin wrapper around the corresponding library call,
so responses match library results bit for bit.  The model document and
optional market curve are loaded once at construction; request handling
touches no mutable state, so concurrent identical requests always return
identical bodies.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .data import Line, load_players
from .errors import DomainError, EngineError
from .glm import FeatureVector, predict_lambdas, predict_outcome
from .market import (
    DEFAULT_BUDGET_INCREMENT,
    ValuationRecord,
    build_value_curve,
    cost_per_point,
    optimize_budget,
    wage_redistribution,
)
from .model_io import load_model, model_to_document
from .points import Formation, elpar_per_game, line_size

__all__ = ["create_app"]


class FeaturesBody(BaseModel):
    x_def: float
    x_mid: float
    x_att: float
    x_gk: float


class PredictRequest(BaseModel):
    features: FeaturesBody


class ElparRequest(BaseModel):
    formation: str
    line: str
    rating: float
    perspective: str = "symmetric"


class SquadPlayer(BaseModel):
    player_id: str | None = None
    line: str
    rating: float
    wage: int | None = Field(default=None, ge=0)


class SquadRequest(BaseModel):
    formation: str
    players: list[SquadPlayer]
    opponent: dict[str, float] | None = None


class OptimizeRequest(BaseModel):
    budget: int
    needs: list[str]
    increment: int = DEFAULT_BUDGET_INCREMENT


def _parse_line(token: str) -> Line:
    try:
        return Line(token)
    except ValueError:
        raise DomainError(
            f"unknown line {token!r}; expected one of GK, DEF, MID, ATT"
        ) from None


def create_app(
    model_path: str | Path | None = None,
    players_path: str | Path | None = None,
) -> FastAPI:
    """Build the service over a model file; curve endpoints need players."""
    app = FastAPI(title="positional value service", version="1")

    if model_path is not None:
        model, levels, metadata = load_model(model_path)
    else:
        model = levels = metadata = None
    curve = (
        build_value_curve(load_players(players_path))
        if players_path is not None
        else None
    )

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"detail": jsonable_encoder(exc.errors())}
        )

    @app.exception_handler(EngineError)
    async def _engine_error(request: Request, exc: EngineError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _require_model():
        if model is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        return model

    @app.get("/api/model")
    def get_model() -> dict:
        _require_model()
        return model_to_document(model, levels, metadata)

    @app.post("/api/predict")
    def post_predict(body: PredictRequest) -> dict:
        _require_model()
        features = FeatureVector(**body.features.model_dump())
        params = predict_lambdas(model, features)
        probs = predict_outcome(model, features)
        return {
            "lambda_home": params.lambda1,
            "lambda_away": params.lambda2,
            **probs.as_dict(),
        }

    @app.post("/api/elpar")
    def post_elpar(body: ElparRequest) -> dict:
        _require_model()
        result = elpar_per_game(
            model,
            Formation.parse(body.formation),
            _parse_line(body.line),
            body.rating,
            levels,
            perspective=body.perspective,
        )
        return {
            "formation": str(result.formation),
            "line": result.line.value,
            "rating": result.player_rating,
            "points": result.points,
            "delta_win": result.delta_win,
            "delta_draw": result.delta_draw,
            "delta_loss": result.delta_loss,
        }

    @app.post("/api/squad/evaluate")
    def post_squad_evaluate(body: SquadRequest) -> dict:
        _require_model()
        formation = Formation.parse(body.formation)
        players = [(p, _parse_line(p.line)) for p in body.players]
        counts = {line: 0 for line in Line}
        for _, line in players:
            counts[line] += 1
        expected = {
            Line.GK: 1,
            Line.DEF: formation.defenders,
            Line.MID: formation.midfielders,
            Line.ATT: formation.attackers,
        }
        if counts != expected:
            raise DomainError(
                f"squad does not match formation {formation}: expected "
                f"{ {l.value: n for l, n in expected.items()} }, got "
                f"{ {l.value: n for l, n in counts.items()} }"
            )
        opponent = {line: levels[line] for line in Line}
        for token, rating in (body.opponent or {}).items():
            opponent[_parse_line(token)] = rating

        own_mean = {
            line: sum(p.rating for p, l in players if l is line)
            / line_size(formation, line)
            for line in Line
        }
        features = FeatureVector(
            x_def=own_mean[Line.DEF] - opponent[Line.DEF],
            x_mid=own_mean[Line.MID] - opponent[Line.MID],
            x_att=own_mean[Line.ATT] - opponent[Line.ATT],
            x_gk=own_mean[Line.GK] - opponent[Line.GK],
        )
        probs = predict_outcome(model, features)
        evaluated = []
        for player, line in players:
            result = elpar_per_game(model, formation, line, player.rating, levels)
            evaluated.append(
                {
                    "player_id": player.player_id,
                    "line": line.value,
                    "rating": player.rating,
                    "elpar": result.points,
                }
            )
        redistribution = None
        if all(p.wage is not None for p, _ in players):
            records = [
                ValuationRecord(
                    player_id=player.player_id or f"slot{i}",
                    line=line,
                    rating=player.rating,
                    elpar_per_game=entry["elpar"],
                    market_value=0,
                    wage=player.wage,
                    cost_per_point=(
                        cost_per_point(0, entry["elpar"])
                        if entry["elpar"] > 0
                        else None
                    ),
                )
                for i, ((player, line), entry) in enumerate(zip(players, evaluated))
            ]
            redistribution = wage_redistribution(records)
        return {
            **probs.as_dict(),
            "players": evaluated,
            "wage_redistribution": redistribution,
        }

    @app.post("/api/budget/optimize")
    def post_budget_optimize(body: OptimizeRequest) -> dict:
        _require_model()
        if curve is None:
            raise HTTPException(
                status_code=503,
                detail="service started without a players file; no value curve",
            )
        allocation = optimize_budget(
            body.budget,
            [_parse_line(token) for token in body.needs],
            curve,
            model,
            levels,
            increment=body.increment,
        )
        return {
            "budget": body.budget,
            "allocation": [slot.as_dict() for slot in allocation],
            "total_spend": sum(slot.spend for slot in allocation),
            "total_elpar": sum(slot.elpar for slot in allocation),
        }

    return app
