# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import logging
import math
import types
import typing
from typing import Literal, Type, TypedDict, Union

from pydantic import BaseModel

LOGGER = logging.getLogger(__name__)

FieldType = Literal["number", "string", "integer", "boolean", "array"]

ModelField = TypedDict(
    "ModelField",
    {
        "type": FieldType,
        "description": str,
    },
)

ModelFieldsMapping = dict[str, ModelField]

RangeSpec = TypedDict(
    "RangeSpec",
    {
        "start": float,
        "stop": float,
        "count": int | None,
    },
)


def parse_range(value: str) -> RangeSpec:
    """
    Parse a range in the form `start/stop` or `Rcount/start/stop`,
    e.g. `R2000/0.1/2` for 2000 points between 0.1 and 2
    """
    if not value:
        raise ValueError("Empty range")
    parts = value.split("/")
    count = None
    if value.startswith("R") and len(parts) == 3:
        try:
            count = int(parts[0][1:])
        except ValueError:
            raise ValueError(f"Invalid range count: {value}")
        parts = parts[1:]
    if len(parts) != 2:
        raise ValueError(f"Invalid range: {value}")
    try:
        start, stop = float(parts[0]), float(parts[1])
    except ValueError:
        raise ValueError(f"Invalid range bounds: {value}")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError(f"Range bounds must be finite: {value}")
    if start >= stop:
        raise ValueError(
            "Range start must be below range stop but got {} and {}".format(
                start, stop
            )
        )
    if count is not None and count < 2:
        raise ValueError(f"Range count must be at least 2 but got {count}")
    return {"start": start, "stop": stop, "count": count}


def format_float(value: float) -> str:
    """Shortest round-trip representation, independent of locale"""
    return repr(float(value))


def _json_type(annotation) -> FieldType | None:
    origin = typing.get_origin(annotation)
    if origin in (Union, types.UnionType):
        candidates = [
            arg for arg in typing.get_args(annotation) if arg is not type(None)
        ]
        if len(candidates) != 1:
            return None
        return _json_type(candidates[0])
    if origin is Literal:
        return "string"
    if origin in (list, tuple):
        return "array"
    if annotation is bool:
        return "boolean"
    if annotation is int:
        return "integer"
    if annotation is float:
        return "number"
    if annotation is str:
        return "string"
    if isinstance(annotation, type) and issubclass(annotation, str):
        # str enums
        return "string"
    return None


def get_fields_from_pydantic_model(model: Type[BaseModel]) -> ModelFieldsMapping:
    """Given a pydantic model, return a mapping of the fields to their data types"""
    fields: ModelFieldsMapping = {}
    for fieldName, info in model.model_fields.items():
        name = info.alias or fieldName
        dataType = _json_type(info.annotation)
        if dataType is None:
            LOGGER.debug(f"Skipping field {name} with unsupported type")
            continue
        fields[name] = {"type": dataType, "description": info.description or ""}
    return fields
