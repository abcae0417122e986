"""JSON encoding of states, unitaries, and descriptor sets.

Complex numbers are two-element ``[re, im]`` arrays; matrices are row-major
nested lists.  Python's float repr is shortest-round-trip, so dumping and
re-parsing is lossless for every finite double.  The documented basis
ordering (mode 0 = most significant bit, per-mode order vacuum/occupied)
is part of the schema document printed by the CLI.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .descriptors import DescriptorSet
from .errors import ValidationError
from .fock import FockOperator, FockVector, ModeSet
from .states import PhenomenalState
from .transformations import PSUnitary

SCHEMA_VERSION = "1"


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_json(m: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m, dtype=complex)]


def vector_to_json(v: np.ndarray) -> list:
    return [complex_to_json(z) for z in np.asarray(v, dtype=complex)]


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise ValidationError("bad_schema", message, field=field)


def json_to_complex(data, field: str) -> complex:
    _require(
        isinstance(data, (list, tuple)) and len(data) == 2,
        field,
        "complex numbers are [re, im] pairs",
    )
    re, im = data
    _require(
        isinstance(re, (int, float)) and isinstance(im, (int, float)),
        field,
        "complex parts must be numbers",
    )
    return complex(re, im)


def json_to_matrix(data, field: str) -> np.ndarray:
    _require(isinstance(data, list) and data, field, "matrix must be a non-empty list of rows")
    rows = []
    for i, row in enumerate(data):
        _require(isinstance(row, list) and len(row) == len(data), f"{field}[{i}]", "matrix must be square")
        rows.append([json_to_complex(z, f"{field}[{i}][{j}]") for j, z in enumerate(row)])
    return np.array(rows, dtype=complex)


def json_to_vector(data, field: str) -> np.ndarray:
    _require(isinstance(data, list) and data, field, "vector must be a non-empty list")
    return np.array([json_to_complex(z, f"{field}[{i}]") for i, z in enumerate(data)], dtype=complex)


def state_to_json(state: PhenomenalState) -> dict:
    return {
        "modes": list(state.subsystem.indices),
        "ambient_n": state.subsystem.ambient_n,
        "matrix": matrix_to_json(state.matrix),
    }


def json_to_state(data: dict, field: str = "state") -> PhenomenalState:
    _require(isinstance(data, dict), field, "state must be an object")
    for key in ("modes", "ambient_n", "matrix"):
        _require(key in data, f"{field}.{key}", f"missing {key}")
    subsystem = ModeSet(tuple(data["modes"]), int(data["ambient_n"]))
    return PhenomenalState(subsystem, json_to_matrix(data["matrix"], f"{field}.matrix"))


def unitary_to_json(u: PSUnitary) -> dict:
    return {"n_modes": u.n_modes, "matrix": matrix_to_json(u.matrix)}


def json_to_unitary(data: dict, field: str = "unitary") -> PSUnitary:
    _require(isinstance(data, dict), field, "unitary must be an object")
    _require("matrix" in data, f"{field}.matrix", "missing matrix")
    matrix = json_to_matrix(data["matrix"], f"{field}.matrix")
    return PSUnitary(int(data.get("n_modes", round(np.log2(matrix.shape[0])))), matrix)


def descriptor_set_to_json(d: DescriptorSet) -> dict:
    return {
        "modes": list(d.subsystem.indices),
        "ambient_n": d.subsystem.ambient_n,
        "descriptors": [matrix_to_json(x.matrix) for x in d.descriptors],
        "heisenberg_state": vector_to_json(d.heisenberg_state.amplitudes),
    }


def json_to_descriptor_set(data: dict, field: str = "descriptor_set") -> DescriptorSet:
    _require(isinstance(data, dict), field, "descriptor set must be an object")
    for key in ("modes", "ambient_n", "descriptors", "heisenberg_state"):
        _require(key in data, f"{field}.{key}", f"missing {key}")
    subsystem = ModeSet(tuple(data["modes"]), int(data["ambient_n"]))
    n = subsystem.ambient_n
    descriptors = tuple(
        FockOperator(n, json_to_matrix(m, f"{field}.descriptors[{i}]"))
        for i, m in enumerate(data["descriptors"])
    )
    psi0 = FockVector(n, json_to_vector(data["heisenberg_state"], f"{field}.heisenberg_state"))
    return DescriptorSet(subsystem, descriptors, psi0)


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def content_hash(data) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(data).encode()).hexdigest()


SCENARIO_SCHEMA = {
    "title": "scenario",
    "type": "object",
    "required": ["n_modes", "initial_state"],
    "properties": {
        "n_modes": {"type": "integer", "minimum": 1, "description": "system size N"},
        "initial_state": {
            "description": (
                "either an occupation list of length n_modes, or a list of "
                "{occupation, amplitude} terms; superposition terms must all "
                "share the same occupation parity and are normalized"
            ),
            "oneOf": [
                {"type": "array", "items": {"enum": [0, 1]}},
                {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["occupation", "amplitude"],
                        "properties": {
                            "occupation": {"type": "array", "items": {"enum": [0, 1]}},
                            "amplitude": {"$ref": "#/definitions/complex"},
                        },
                    },
                },
            ],
        },
        "gates": {
            "type": "array",
            "description": "applied in list order (first entry acts first)",
            "items": {
                "oneOf": [
                    {
                        "type": "object",
                        "required": ["kind", "modes", "theta"],
                        "properties": {
                            "kind": {"enum": ["tunneling", "phase", "interaction"]},
                            "modes": {"type": "array", "items": {"type": "integer"}},
                            "theta": {"type": "number"},
                        },
                    },
                    {
                        "type": "object",
                        "required": ["kind", "matrix"],
                        "properties": {
                            "kind": {"enum": ["hamiltonian"]},
                            "matrix": {"$ref": "#/definitions/matrix"},
                        },
                    },
                ]
            },
        },
        "partitions": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"}},
            "description": "mode subsets to analyze (descriptors + reduced states)",
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {
                        "enum": [
                            "diagram",
                            "no_signalling",
                            "locality_invariance",
                            "ontic_properties",
                        ]
                    },
                    "seed": {"type": "integer", "default": 0},
                    "count": {"type": "integer", "default": 10},
                },
            },
        },
        "tolerances": {
            "type": "object",
            "description": "optional per-check tolerance overrides keyed by check name",
            "additionalProperties": {"type": "number"},
        },
    },
    "definitions": {
        "complex": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
            "description": "[re, im]",
        },
        "matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"$ref": "#/definitions/complex"}},
            "description": "row-major, dimension 2^n_modes",
        },
    },
}

REPORT_SCHEMA = {
    "title": "report",
    "type": "object",
    "required": [
        "schema_version",
        "scenario",
        "scenario_hash",
        "final_state",
        "global_descriptors",
        "reconstruction",
        "partitions",
        "checks",
        "timings",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "scenario": {"description": "verbatim echo of the input scenario"},
        "scenario_hash": {"type": "string", "description": "sha256 of the canonical scenario JSON"},
        "final_state": {"description": "global density matrix after all gates"},
        "global_descriptors": {"description": "full-system descriptor set"},
        "partitions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "modes": {"type": "array"},
                    "phenomenal": {"description": "reduced state on the partition"},
                    "descriptors": {"description": "descriptor set on the partition"},
                },
            },
        },
        "reconstruction": {
            "type": "object",
            "properties": {
                "round_trip_residual": {"type": "number"},
                "phase_blind_distance": {"type": "number"},
            },
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "residual": {"type": "number"},
                    "tolerance": {"type": "number"},
                    "details": {"type": "array"},
                },
            },
        },
        "timings": {"type": "object", "description": "wall-clock seconds; excluded from determinism"},
    },
}

BASIS_CONVENTIONS = {
    "mode_labels": "0-based",
    "basis_index": "sum_i occ[i] * 2^(N-1-i); mode 0 is the most significant bit",
    "per_mode_order": ["vacuum", "occupied"],
    "complex_numbers": "[re, im] arrays, 17-significant-digit decimal round trip",
    "matrices": "row-major nested arrays",
    "gate_order": "gates apply in list order; the composite unitary is G_k ... G_1",
}


def schema_document() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "conventions": BASIS_CONVENTIONS,
        "scenario": SCENARIO_SCHEMA,
        "report": REPORT_SCHEMA,
    }
