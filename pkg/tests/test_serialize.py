"""Lossless JSON round trips for every serialized object."""

import json

import numpy as np

from fermidesc import descriptors as dsc, fock, serialize, transformations as tf
from fermidesc.fock import ModeSet
from fermidesc.verification import random_phenomenal


def round_trip(data):
    return json.loads(json.dumps(data))


def test_complex_round_trip_is_exact():
    rng = np.random.default_rng(0)
    for _ in range(200):
        z = complex(rng.standard_normal(), rng.standard_normal()) * 10.0 ** float(rng.integers(-12, 12))
        back = serialize.json_to_complex(round_trip(serialize.complex_to_json(z)), "z")
        assert back == z  # repr round-trip of doubles is lossless


def test_state_round_trip():
    state = random_phenomenal(3, 4)
    data = round_trip(serialize.state_to_json(state))
    back = serialize.json_to_state(data)
    assert back.subsystem.indices == state.subsystem.indices
    assert np.array_equal(back.matrix, state.matrix)


def test_unitary_round_trip():
    u = tf.random_ps_unitary(3, 8)
    back = serialize.json_to_unitary(round_trip(serialize.unitary_to_json(u)))
    assert np.array_equal(back.matrix, u.matrix)


def test_descriptor_set_round_trip():
    u = tf.random_ps_unitary(3, 9)
    d = dsc.evolve_descriptors(u, ModeSet((0, 2), 3), fock.vacuum_state(3))
    back = serialize.json_to_descriptor_set(round_trip(serialize.descriptor_set_to_json(d)))
    assert back.subsystem.indices == d.subsystem.indices
    for a, b in zip(back.descriptors, d.descriptors):
        assert np.array_equal(a.matrix, b.matrix)
    assert np.array_equal(
        back.heisenberg_state.amplitudes, d.heisenberg_state.amplitudes
    )


def test_content_hash_is_stable_and_order_insensitive():
    a = {"x": 1, "y": [1, 2, 3]}
    b = {"y": [1, 2, 3], "x": 1}
    assert serialize.content_hash(a) == serialize.content_hash(b)
    assert serialize.content_hash({"x": 2}) != serialize.content_hash(a)


def test_schema_document_is_deterministic():
    first = json.dumps(serialize.schema_document(), sort_keys=True)
    second = json.dumps(serialize.schema_document(), sort_keys=True)
    assert first == second
    doc = serialize.schema_document()
    assert doc["schema_version"] == serialize.SCHEMA_VERSION
    assert "scenario" in doc and "report" in doc and "conventions" in doc


def test_bad_payloads_carry_field_paths():
    import pytest

    from fermidesc.errors import ValidationError

    with pytest.raises(ValidationError) as err:
        serialize.json_to_matrix([[1, 2], [3]], "gate.matrix")
    assert err.value.field.startswith("gate.matrix")
    with pytest.raises(ValidationError) as err:
        serialize.json_to_descriptor_set({"modes": [0]}, "ds")
    assert err.value.field == "ds.ambient_n"
