"""JSON job files and reports."""
from __future__ import annotations

import json
import math

import jsonschema

from .cfrac import Surd
from .errors import ConfigurationError
from .lattice import ConvergentFrame, resonance_frame, theorem2_frame
from .normalform import NormalFormOutcome, StructuralFormT1, StructuralFormT2
from .scalar import Ring, ring_from_tag
from .series import PlanarMap

_RING = {
    "oneOf": [
        {"enum": ["rational", "gaussian", "complex"]},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["tag", "base", "order"],
            "properties": {
                "tag": {"const": "jet"},
                "base": {"enum": ["rational", "gaussian", "complex"]},
                "order": {"type": "integer", "minimum": 0},
            },
        },
    ]
}

_TERM = {
    "type": "object",
    "additionalProperties": False,
    "required": ["component", "exponent", "coeff"],
    "properties": {
        "component": {"enum": [1, 2]},
        "exponent": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
        "coeff": {},
    },
}

_R_SPEC = {
    "type": "object",
    "additionalProperties": False,
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {
        "surd": {"type": "array", "items": {"type": "integer"}, "minItems": 4, "maxItems": 4},
        "quotients": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "rational": {"type": "string"},
        "float": {"type": "number"},
    },
}

JOB_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["mode", "ring", "mu1", "mu2", "terms", "degree"],
    "properties": {
        "mode": {"enum": ["theorem1", "theorem2"]},
        "ring": _RING,
        "mu1": {},
        "mu2": {},
        "terms": {"type": "array", "items": _TERM},
        "degree": {"type": "integer", "minimum": 1},
        "theorem1": {
            "type": "object",
            "additionalProperties": False,
            "required": ["p", "q", "N"],
            "properties": {
                "p": {"type": "integer", "minimum": 1},
                "q": {"type": "integer", "minimum": 1},
                "N": {"type": "integer", "minimum": 0},
            },
        },
        "theorem2": {
            "type": "object",
            "additionalProperties": False,
            "required": ["R", "k"],
            "properties": {"R": _R_SPEC, "k": {"type": "integer", "minimum": 0}},
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"emit_lattice": {"type": "boolean"}, "verify": {"type": "boolean"}},
        },
    },
    "allOf": [
        {"if": {"properties": {"mode": {"const": "theorem1"}}}, "then": {"required": ["theorem1"]}},
        {"if": {"properties": {"mode": {"const": "theorem2"}}}, "then": {"required": ["theorem2"]}},
    ],
}


class Job:
    """A validated job: ring, input map, frame and options."""

    def __init__(self, data: dict):
        self.data = data
        self.ring = parse_ring(data["ring"])
        self.degree = data["degree"]
        self.map = map_from_json(
            {"mu1": data["mu1"], "mu2": data["mu2"], "terms": data["terms"]}, self.ring, self.degree
        )
        self.mode = data["mode"]
        self.R = None
        if self.mode == "theorem1":
            t = data["theorem1"]
            self.frame = resonance_frame(t["p"], t["q"], t["N"])
        else:
            t = data["theorem2"]
            spec = parse_r_spec(t["R"])
            self.frame = theorem2_frame(spec, t["k"])
            if isinstance(spec, (Surd, float)):
                self.R = float(spec)
        options = data.get("options", {})
        self.emit_lattice = options.get("emit_lattice", False)
        self.verify = options.get("verify", False)


def load_job(text: str) -> Job:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"job is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(JOB_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"/{'/'.join(str(p) for p in e.absolute_path)}: {e.message}" for e in errors]
        raise ConfigurationError("job file failed validation:\n  " + "\n  ".join(lines))
    return Job(data)


def parse_ring(spec) -> Ring:
    if isinstance(spec, str):
        return ring_from_tag(spec)
    return ring_from_tag(spec["tag"], spec["base"], spec["order"])


def dump_ring(ring: Ring):
    from .scalar import JetRing

    if isinstance(ring, JetRing):
        return {"tag": "jet", "base": ring.base.name, "order": ring.order}
    return ring.name


def parse_r_spec(spec: dict):
    if "surd" in spec:
        a, b, c, d = spec["surd"]
        return Surd(a, b, d, c)
    if "quotients" in spec:
        return list(spec["quotients"])
    if "rational" in spec:
        return spec["rational"]
    value = float(spec["float"])
    if not math.isfinite(value):
        raise ConfigurationError("R must be finite")
    return value


def map_to_json(F: PlanarMap) -> dict:
    ring = F.ring
    return {
        "mu1": ring.dump(F.mu1),
        "mu2": ring.dump(F.mu2),
        "terms": [
            {"component": i, "exponent": [k[0], k[1]], "coeff": ring.dump(v)} for i, k, v in F.term_records()
        ],
    }


def map_from_json(data: dict, ring: Ring, degree: int) -> PlanarMap:
    terms = []
    for t in data["terms"]:
        k = tuple(t["exponent"])
        if k[0] + k[1] < 2:
            raise ConfigurationError(f"term {k} has degree < 2; give the linear part as mu1, mu2")
        if k[0] + k[1] > degree:
            raise ConfigurationError(f"term {k} exceeds the truncation degree {degree}")
        terms.append((t["component"], k, ring.parse(t["coeff"])))
    return PlanarMap.from_terms(ring, degree, ring.parse(data["mu1"]), ring.parse(data["mu2"]), terms)


def structure_to_json(structure, ring: Ring) -> list:
    rows = []
    if isinstance(structure, StructuralFormT1):
        for i in (1, 2):
            for j, c in sorted(structure.b0[i].items()):
                rows.append({"component": i, "family": "b0", "k": None, "u_power": j, "coeff": ring.dump(c)})
            for name, table in (("b0k", structure.b0k[i]), ("b1k", structure.b1k[i])):
                for k in sorted(table):
                    for j, c in sorted(table[k].items()):
                        rows.append({"component": i, "family": name, "k": k, "u_power": j, "coeff": ring.dump(c)})
    elif isinstance(structure, StructuralFormT2):
        for i in (1, 2):
            for name, table in (("b1", structure.b1[i]), ("b2", structure.b2[i])):
                for (a, b), c in sorted(table.items()):
                    rows.append({"component": i, "family": name, "u_power": a, "ut_power": b, "coeff": ring.dump(c)})
    return rows


def frame_to_json(frame) -> dict:
    if isinstance(frame, ConvergentFrame):
        return {
            "kind": "convergent",
            "k": frame.k,
            "quotients": list(frame.quotients),
            "u": list(frame.u),
            "ut": list(frame.ut),
        }
    return {
        "kind": "resonance",
        "p": frame.p,
        "q": frame.q,
        "N": frame.N,
        "alpha0": list(frame.alpha0),
        "alpha1": list(frame.alpha1),
    }


def outcome_to_json(outcome: NormalFormOutcome) -> dict:
    ring = outcome.g.ring
    return {
        "g": map_to_json(outcome.g),
        "h": map_to_json(outcome.h),
        "h_inv": map_to_json(outcome.h_inv),
        "structure": structure_to_json(outcome.structure, ring),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
