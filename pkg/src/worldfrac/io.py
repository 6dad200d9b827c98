"""File formats: state and scenario input, JSON/CSV report output."""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Mapping

import jsonschema

from .fields import ScalarField
from .hilbert import OrthogonalPartition, StateVector
from .inference import Hypothesis, hypotheses_from_json, parse_observed
from .regions import Region, region_from_json
from .worlds import FrequencyDistribution

STATE_SCHEMA = {
    "type": "object",
    "required": ["field", "basis", "coeffs"],
    "properties": {
        "field": {"enum": [f.value for f in ScalarField]},
        "basis": {"type": "array", "minItems": 1, "items": {"type": "string"}},
        "coeffs": {
            "type": "array", "minItems": 1,
            "items": {"oneOf": [
                {"type": "number"},
                {"type": "array", "minItems": 1, "maxItems": 4, "items": {"type": "number"}},
            ]},
        },
        "partition": {
            "type": "object",
            "additionalProperties": {"type": "array", "minItems": 1, "items": {"type": "string"}},
        },
        "region": {
            "type": "object",
            "required": ["shape"],
            "properties": {"shape": {"enum": ["ball", "annulus", "box"]}},
        },
    },
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["hypotheses", "observed"],
    "properties": {
        "hypotheses": {
            "type": "array", "minItems": 2,
            "items": {
                "type": "object",
                "required": ["name", "prior", "fractions"],
                "properties": {
                    "name": {"type": "string"},
                    "prior": {"type": "number", "minimum": 0, "maximum": 1},
                    "fractions": {"type": "object", "minProperties": 1,
                                  "additionalProperties": {"type": "number",
                                                           "minimum": 0, "maximum": 1}},
                },
            },
        },
        "observed": {"oneOf": [{"type": "string"},
                               {"type": "array", "items": {"type": "string"}}]},
    },
}

DISTRIBUTION_SCHEMA = {
    "type": "object",
    "required": ["N", "p", "rows"],
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "p": {"type": "number", "minimum": 0, "maximum": 1},
        "label": {"type": "string"},
        "mean": {"type": "number"},
        "variance": {"type": "number"},
        "rows": {
            "type": "array", "minItems": 2,
            "items": {
                "type": "object",
                "required": ["n", "frequency", "fraction"],
                "properties": {"n": {"type": "integer", "minimum": 0},
                               "frequency": {"type": "number"},
                               "fraction": {"type": "number", "minimum": 0}},
            },
        },
    },
}


class InputError(ValueError):
    """Bad user input; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


def _path(err: jsonschema.ValidationError) -> str:
    parts = []
    for p in err.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else (f".{p}" if parts else str(p)))
    return "".join(parts) or "<root>"


def validate(obj: Any, schema: Mapping, what: str) -> None:
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as err:
        raise InputError(_path(err), f"{err.message} (in {what})") from None


def state_from_json(obj: Mapping) -> StateVector:
    validate(obj, STATE_SCHEMA, "state")
    field = ScalarField.parse(obj["field"])
    d = field.ray_dim
    if len(obj["coeffs"]) != len(obj["basis"]):
        raise InputError("coeffs", f"{len(obj['coeffs'])} coefficients for "
                                   f"{len(obj['basis'])} basis labels")
    if len(set(obj["basis"])) != len(obj["basis"]):
        raise InputError("basis", "labels must be unique")
    for i, c in enumerate(obj["coeffs"]):
        comps = c if isinstance(c, list) else [c]
        if len(comps) > d:
            raise InputError(f"coeffs[{i}]", f"{len(comps)} components, a {field.value} "
                                             f"scalar has {d}")
    # shorter component lists are zero-padded, e.g. real amplitudes in a complex state
    coeffs = [list(c if isinstance(c, list) else [c]) for c in obj["coeffs"]]
    coeffs = [c + [0.0] * (d - len(c)) for c in coeffs]
    v = StateVector(field, tuple(obj["basis"]), coeffs)
    if v.is_zero():
        raise InputError("coeffs", "state is the zero vector")
    return v


def partition_from_json(obj: Mapping | None, v: StateVector) -> OrthogonalPartition:
    if obj is None:
        return OrthogonalPartition.by_label(v.basis)
    try:
        part = OrthogonalPartition.from_json(obj)
        part.check(v.basis)
    except ValueError as err:
        raise InputError("partition", str(err)) from None
    return part


def region_from_input(obj: Mapping | None, default: Region) -> Region:
    if obj is None:
        return default
    try:
        return region_from_json(obj)
    except (KeyError, TypeError, ValueError) as err:
        raise InputError("region", str(err)) from None


def scenario_from_json(obj: Mapping) -> tuple[list[Hypothesis], list[str]]:
    validate(obj, SCENARIO_SCHEMA, "scenario")
    hyps = []
    for i, h in enumerate(obj["hypotheses"]):
        try:
            hyps.extend(hypotheses_from_json([h]))
        except ValueError as err:
            raise InputError(f"hypotheses[{i}].fractions", str(err)) from None
    labels = sorted({o for h in hyps for o in h.per_trial_fractions})
    observed = parse_observed(obj["observed"], labels)
    for k, o in enumerate(observed):
        if any(o not in h.per_trial_fractions for h in hyps):
            raise InputError(f"observed[{k}]", f"outcome {o!r} is not in every hypothesis")
    return hyps, observed


def distribution_from_json(obj: Mapping) -> FrequencyDistribution:
    validate(obj, DISTRIBUTION_SCHEMA, "distribution")
    try:
        return FrequencyDistribution.from_json(obj)
    except ValueError as err:
        raise InputError("rows", str(err)) from None


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError("--input", f"file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise InputError("--input", f"not valid JSON ({err})") from None


# -- output -------------------------------------------------------------------

def fmt_float(x: float) -> str:
    return format(x, ".17g")


def to_json_text(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def to_csv_text(rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt_float(c) if isinstance(c, float) else c for c in row])
    return buf.getvalue()


def distribution_rows(dist: FrequencyDistribution) -> list[list]:
    return [["n", "frequency", "fraction"]] + [list(r) for r in dist.rows()]


def emit_distribution_table(dist: FrequencyDistribution, fmt: str = "csv") -> str:
    """One row per count ``n`` (ordered by ``n``) with its frequency and fraction."""
    if fmt == "csv":
        return to_csv_text(distribution_rows(dist))
    if fmt == "json":
        return to_json_text(dist.to_json())
    raise ValueError(f"unknown format {fmt!r}")
