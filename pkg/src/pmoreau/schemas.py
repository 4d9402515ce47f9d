"""JSON schemas for the problem specs read by the command line."""
from __future__ import annotations

import jsonschema

__all__ = ["SCHEMAS", "validate", "SchemaError"]

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_vector = {"type": "array", "items": _number, "minItems": 1}
_matrix = {"type": "array", "items": _vector, "minItems": 1}
_p = {"type": "number", "exclusiveMinimum": 1}

SPACE = {
    "type": "object",
    "required": ["dim"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "norm": {
            "oneOf": [
                {"const": "euclidean"},
                {"type": "object", "required": ["q"], "additionalProperties": False,
                 "properties": {"q": {"type": "number", "exclusiveMinimum": 1}}},
                {"type": "object", "required": ["weights"], "additionalProperties": False,
                 "properties": {"weights": {"type": "array", "items": _positive, "minItems": 1}}},
            ]
        },
    },
    "additionalProperties": False,
}

FN = {
    "oneOf": [
        {"enum": ["zero", "one_norm"]},
        {"$ref": "#/$defs/fn_object"},
    ]
}

FN_OBJECT = {
    "type": "object",
    "required": ["fn"],
    "properties": {"fn": {"enum": ["zero", "one_norm", "quadratic", "indicator_box", "indicator_point",
                                   "max_affine", "power_of_norm", "translate"]}},
    "allOf": [
        {"if": {"properties": {"fn": {"const": "quadratic"}}},
         "then": {"required": ["A"], "properties": {"A": _matrix, "b": _vector, "c": _number}}},
        {"if": {"properties": {"fn": {"const": "indicator_box"}}},
         "then": {"required": ["lo", "hi"], "properties": {"lo": _vector, "hi": _vector}}},
        {"if": {"properties": {"fn": {"const": "indicator_point"}}},
         "then": {"required": ["z"], "properties": {"z": _vector}}},
        {"if": {"properties": {"fn": {"const": "max_affine"}}},
         "then": {"required": ["pieces"], "properties": {"pieces": {
             "type": "array", "minItems": 1,
             "items": {"type": "array", "minItems": 2, "maxItems": 2,
                       "prefixItems": [{"oneOf": [_number, _vector]}, _number]}}}}},
        {"if": {"properties": {"fn": {"const": "power_of_norm"}}},
         "then": {"required": ["r"], "properties": {"r": {"type": "number", "minimum": 1}}}},
        {"if": {"properties": {"fn": {"const": "translate"}}},
         "then": {"required": ["base", "shift"],
                  "properties": {"base": {"$ref": "#/$defs/fn"}, "shift": _vector}}},
    ],
}

GRID = {
    "type": "object",
    "required": ["lo", "hi", "points_per_axis"],
    "properties": {"lo": _vector, "hi": _vector, "points_per_axis": {"type": "integer", "minimum": 2}},
    "additionalProperties": False,
}

_DEFS = {"space": SPACE, "fn": FN, "fn_object": FN_OBJECT, "grid": GRID}


def _schema(required, props):
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$defs": _DEFS,
        "type": "object",
        "required": required,
        "properties": props,
    }


_SPACE_REF = {"$ref": "#/$defs/space"}
_FN_REF = {"$ref": "#/$defs/fn"}
_GRID_REF = {"$ref": "#/$defs/grid"}

SCHEMAS = {
    "prox": _schema(["space", "fn", "p", "eps", "u"],
                    {"space": _SPACE_REF, "fn": _FN_REF, "p": _p, "eps": _positive, "u": _vector}),
    "sweep-eps": _schema(["space", "fn", "p", "u", "eps"],
                         {"space": _SPACE_REF, "fn": _FN_REF, "p": _p, "u": _vector,
                          "eps": {"type": "array", "items": _positive, "minItems": 1}}),
    "conjugate": _schema(["space", "fn", "p", "eps", "xi", "grid"],
                         {"space": _SPACE_REF, "fn": _FN_REF, "p": _p, "eps": _positive,
                          "xi": {"type": "array", "items": _vector, "minItems": 1}, "grid": _GRID_REF}),
    "mosco": _schema(["fixture"],
                     {"fixture": {"type": "string"}, "n_max": {"type": "integer", "minimum": 2},
                      "p": _p, "eps": _positive}),
    "hj": _schema(["fn", "p", "grid", "t"],
                  {"space": _SPACE_REF, "fn": _FN_REF, "p": _p, "grid": _GRID_REF,
                   "t": {"type": "array", "items": _positive, "minItems": 1}}),
    "flow": _schema(["space", "fn", "p", "tau", "steps", "u0"],
                    {"space": _SPACE_REF, "fn": _FN_REF, "p": _p, "tau": _positive,
                     "steps": {"type": "integer", "minimum": 1}, "u0": _vector,
                     "exponential": {"type": "object", "required": ["t", "n"],
                                     "properties": {"t": _positive,
                                                    "n": {"type": "array", "minItems": 1,
                                                          "items": {"type": "integer", "minimum": 1}}}}}),
    "verify": _schema([], {"checks": {"type": "array", "items": {"type": "string"}}}),
}


class SchemaError(ValueError):
    """A spec failed validation; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _path(err) -> str:
    out = "$"
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def validate(command: str, doc) -> None:
    """Raise :class:`SchemaError` for the first (deepest) problem in ``doc``."""
    validator = jsonschema.Draft202012Validator(SCHEMAS[command])
    errors = list(validator.iter_errors(doc))
    if not errors:
        return
    err = jsonschema.exceptions.best_match(errors)
    raise SchemaError(_path(err), err.message)
