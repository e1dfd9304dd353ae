"""JSON schemas for command-line inputs, validated with ``jsonschema``.

Numbers may be given as JSON numbers or as strings ``"p/q"``; the latter
keep their exact value in rational mode.
"""

from __future__ import annotations

import jsonschema

NUMBER = {"anyOf": [{"type": "number"},
                    {"type": "string", "pattern": r"^\s*[-+]?\d+(\s*/\s*\d+)?\s*$"}]}
VECTOR = {"type": "array", "items": NUMBER, "minItems": 2}
POS_INT = {"type": "integer", "minimum": 1}

TENSOR_SPEC = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["fisher", "d", "s", "lm"]},
        "lambda": NUMBER,
        "mu": NUMBER,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

CONE_SPEC = {
    "type": "object",
    "properties": {"lambda_fn": {"type": "string"}, "mu_fn": {"type": "string"}},
    "required": ["lambda_fn", "mu_fn"],
}

PATCH = {
    "type": "object",
    "properties": {
        "n": POS_INT,
        "sigma": {"type": "array", "items": POS_INT, "minItems": 3},
        "a": VECTOR,
    },
    "required": ["n", "sigma", "a"],
    "additionalProperties": False,
}

PARTITION = {
    "type": "object",
    "properties": {
        "n": POS_INT,
        "N": POS_INT,
        "kappa": {"type": "array", "items": POS_INT, "minItems": 2},
        "q": VECTOR,
    },
    "required": ["n", "N", "kappa", "q"],
    "additionalProperties": False,
}

SCALAR_PATCH = {
    "type": "object",
    "properties": {
        "n": POS_INT,
        "alpha": NUMBER,
        "sigma": {"type": "array", "items": POS_INT, "minItems": 3},
    },
    "required": ["n", "alpha"],
    "additionalProperties": False,
}

EMBEDDING = {
    "type": "object",
    "properties": {"partition": PARTITION, "patch": PATCH, "scalar": SCALAR_PATCH},
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}

RUN_FIELDS = {
    "seed": {"type": "integer"},
    "tol": {"type": "number", "exclusiveMinimum": 0},
    "n_max": {"type": "integer", "minimum": 2},
    "trials": POS_INT,
    "mode": {"enum": ["float", "rational"]},
}


def _command(props: dict, required=()) -> dict:
    return {"type": "object", "properties": dict(RUN_FIELDS, **props),
            "required": list(required)}


COMMANDS = {
    "eval": _command({"tensor": TENSOR_SPEC, "point": VECTOR, "X": VECTOR, "Y": VECTOR},
                     ["tensor", "point", "X", "Y"]),
    "pullback": _command({"tensor": TENSOR_SPEC, "embedding": EMBEDDING, "point": VECTOR,
                          "X": VECTOR, "Y": VECTOR},
                         ["tensor", "embedding", "point", "X", "Y"]),
    "invariance": _command({"tensor": TENSOR_SPEC}),
    "conditions": _command({"tensor": TENSOR_SPEC}),
    "reconstruct": _command({"tensor": TENSOR_SPEC, "target": {"enum": ["lambda", "mu"]}},
                            ["tensor", "target"]),
    "factorize": _command({"partition": PARTITION, "patch": PATCH,
                           "j": POS_INT, "b": NUMBER, "c": NUMBER,
                           "samples": POS_INT}),
    "campbell": _command({"cone": CONE_SPEC, "lambda": NUMBER, "mu": NUMBER,
                          "samples": POS_INT}, ["cone"]),
    "sweep": _command({"tensor": TENSOR_SPEC,
                       "grid": {"type": "array", "items": NUMBER, "minItems": 1}},
                      ["tensor"]),
    "suite": _command({}),
}


class InputError(ValueError):
    """Input document failed schema validation; the message names the field."""


def validate(doc, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/" + "/".join(str(p) for p in e.absolute_path)
        raise InputError(f"{where}: {e.message}")
