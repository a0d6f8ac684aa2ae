"""Versioned persistence for fitted models.

One self-describing JSON document carries everything downstream commands
need: coefficients, standard errors, replacement levels, and training
provenance.  Serialization is deterministic (sorted keys, shortest float
repr), so refitting the same inputs reproduces the file byte for byte.

Infinite standard errors (inert coordinates) are stored as null; JSON has
no Infinity literal that strict parsers accept.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .data import Line, ReplacementLevels
from .errors import DataError
from .glm import FEATURE_ORDER, SkellamGlmModel

SCHEMA_VERSION = 1
_KIND = "skellam-line-model"

__all__ = [
    "SCHEMA_VERSION",
    "model_to_document",
    "document_to_model",
    "save_model",
    "load_model",
]


def _encode_errors(values: np.ndarray) -> list[float | None]:
    return [float(v) if math.isfinite(v) else None for v in values]


def _number_list(doc: dict, key: str, allow_null: bool) -> np.ndarray:
    values = doc.get(key)
    if not isinstance(values, list) or len(values) != 5:
        raise DataError(f"model field {key!r} must be a list of 5 entries")
    out = []
    for value in values:
        if value is None and allow_null:
            out.append(math.inf)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            if not math.isfinite(float(value)):
                raise DataError(f"model field {key!r} holds a non-finite number")
            out.append(float(value))
        else:
            raise DataError(f"model field {key!r} holds {value!r}")
    return np.array(out, dtype=float)


def model_to_document(
    model: SkellamGlmModel,
    levels: ReplacementLevels,
    metadata: dict | None = None,
) -> dict:
    """Plain-dict form of a fitted model, ready for JSON or an API body."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": _KIND,
        "feature_order": list(FEATURE_ORDER),
        "b1": [float(v) for v in model.b1],
        "b2": [float(v) for v in model.b2],
        "se1": _encode_errors(model.se1),
        "se2": _encode_errors(model.se2),
        "n_obs": int(model.n_obs),
        "final_nll": float(model.final_nll),
        "converged": bool(model.converged),
        "replacement_levels": levels.as_dict(),
        "metadata": dict(metadata or {}),
    }


def document_to_model(doc: object) -> tuple[SkellamGlmModel, ReplacementLevels, dict]:
    if not isinstance(doc, dict):
        raise DataError("model document must be an object")
    if doc.get("kind") != _KIND:
        raise DataError(f"not a model document (kind={doc.get('kind')!r})")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(
            f"model schema version {version!r} unsupported (expected {SCHEMA_VERSION})"
        )
    if doc.get("feature_order") != list(FEATURE_ORDER):
        raise DataError(
            f"model feature order {doc.get('feature_order')!r} does not match "
            f"{list(FEATURE_ORDER)}"
        )
    n_obs = doc.get("n_obs")
    if isinstance(n_obs, bool) or not isinstance(n_obs, int) or n_obs < 0:
        raise DataError(f"model field 'n_obs' must be a nonnegative integer")
    final_nll = doc.get("final_nll")
    if isinstance(final_nll, bool) or not isinstance(final_nll, (int, float)):
        raise DataError("model field 'final_nll' must be a number")
    converged = doc.get("converged")
    if not isinstance(converged, bool):
        raise DataError("model field 'converged' must be a boolean")
    raw_levels = doc.get("replacement_levels")
    if not isinstance(raw_levels, dict):
        raise DataError("model field 'replacement_levels' must be an object")
    levels = {}
    for key, value in raw_levels.items():
        try:
            line = Line(key)
        except ValueError:
            raise DataError(f"unknown line {key!r} in replacement levels") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DataError(f"replacement level for {key} must be a number")
        levels[line] = float(value)
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise DataError("model field 'metadata' must be an object")
    model = SkellamGlmModel(
        b1=_number_list(doc, "b1", allow_null=False),
        b2=_number_list(doc, "b2", allow_null=False),
        se1=_number_list(doc, "se1", allow_null=True),
        se2=_number_list(doc, "se2", allow_null=True),
        n_obs=n_obs,
        final_nll=float(final_nll),
        converged=converged,
    )
    return model, ReplacementLevels(levels), dict(metadata)


def save_model(
    path: str | Path,
    model: SkellamGlmModel,
    levels: ReplacementLevels,
    metadata: dict | None = None,
) -> None:
    document = model_to_document(model, levels, metadata)
    text = json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n"
    Path(path).write_text(text)


def load_model(path: str | Path) -> tuple[SkellamGlmModel, ReplacementLevels, dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"model file {path} is not valid JSON: {exc}") from exc
    return document_to_model(document)
