import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_paths, random_circuit, random_state_vector
from quditsim import circuit_json as cj
from quditsim.engine import SimulationResult, run
from quditsim.errors import MalformedJson, QuditError, SchemaViolation, SizeOverflow, UnknownGate


def doc(**kw):
    base = {"dimensions": 3, "qudits": [0], "gates": []}
    base.update(kw)
    return json.dumps(base)


def test_parse_empty_circuit():
    parsed = cj.parse_circuit(doc(qudits=[0, 0]))
    assert parsed.circuit.dimension == 3 and parsed.circuit.qudit_count == 2 and len(parsed.circuit) == 0
    assert parsed.state.amplitudes[0] == 1
    assert parsed.options == cj.RunOptions()


def test_parse_gqft_circuit_runs_to_uniform():
    parsed = cj.parse_circuit(doc(gates=[{"name": "GQFT", "targets": [0]}]))
    r = run(parsed.circuit, parsed.state)
    np.testing.assert_allclose(r.marginals, [[1 / 3] * 3], atol=1e-12)


def test_unknown_gate_names_gate():
    with pytest.raises(UnknownGate) as info:
        cj.parse_circuit(doc(gates=[{"name": "NOPE", "targets": [0]}]))
    assert "NOPE" in info.value.message and info.value.path == "$.gates[0].name"


def test_unknown_fields_rejected_with_path():
    with pytest.raises(SchemaViolation) as info:
        cj.parse_circuit(doc(gates=[{"name": "X", "targets": [0], "exponnet": 2}]))
    assert info.value.path == "$.gates[0]"
    with pytest.raises(SchemaViolation):
        cj.parse_circuit(doc(extra=1))


def test_schema_version():
    cj.parse_circuit(doc(schemaVersion=1))
    with pytest.raises(SchemaViolation):
        cj.parse_circuit(doc(schemaVersion=2))


def test_complex_initial_qudits():
    parsed = cj.parse_circuit(doc(dimensions=2, qudits=[[[1, 0], [0, 1]], 1]))
    np.testing.assert_allclose(parsed.state.amplitudes, np.array([0, 1, 0, 1j]) / np.sqrt(2), atol=1e-15)


def test_size_limit_checked_before_allocation():
    with pytest.raises(SizeOverflow):
        cj.parse_circuit(doc(dimensions=2, qudits=[0] * 21))
    with pytest.raises(SizeOverflow):
        cj.parse_circuit(doc(dimensions=1000, qudits=[0] * 1000))
    cj.parse_circuit(doc(dimensions=2, qudits=[0] * 3), max_amplitudes=8)
    with pytest.raises(SizeOverflow):
        cj.parse_circuit(doc(dimensions=2, qudits=[0] * 4), max_amplitudes=8)


def test_u_gate_parsing():
    m = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
    parsed = cj.parse_circuit(doc(dimensions=2, gates=[{"name": "U", "targets": [0], "matrix": m}]))
    np.testing.assert_array_equal(parsed.circuit.instructions[0].matrix, [[0, 1], [1, 0]])
    bad = [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]
    with pytest.raises(QuditError) as info:
        cj.parse_circuit(doc(dimensions=2, gates=[{"name": "U", "targets": [0], "matrix": bad}]))
    assert info.value.code == "NotUnitary" and info.value.path == "$.gates[0].matrix"


def test_serialize_result_example():
    parsed = cj.parse_circuit(doc())
    out = json.loads(cj.serialize_result(run(parsed.circuit, parsed.state)))
    assert out["amplitudes"] == [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
    assert out["probabilities"] == [[1.0, 0.0, 0.0]]
    assert out["schemaVersion"] == 1 and "counts" not in out
    assert list(out["metadata"]) == ["dimensions", "quditCount", "elapsedMs"]


def test_serialize_bell_probabilities():
    text = doc(dimensions=2, qudits=[0, 0], gates=[{"name": "GQFT", "targets": [0]}, {"name": "SUM", "targets": [0, 1]}])
    out = json.loads(cj.simulate(text))
    np.testing.assert_allclose(out["probabilities"], [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4), n=st.integers(1, 3), shots=st.none() | st.integers(1, 50))
def test_result_round_trip_is_exact(seed, d, n, shots):
    rng = np.random.default_rng(seed)
    psi = random_state_vector(rng, d**n)
    from quditsim.state import RegisterState

    r = run(random_circuit(rng, d, n, 3), RegisterState.from_amplitudes(d, n, psi), shots=shots, seed=seed)
    text = cj.serialize_result(r, 1.5)
    back, meta = cj.parse_result(text)
    np.testing.assert_array_equal(back.amplitudes, r.amplitudes)
    np.testing.assert_array_equal(back.marginals, r.marginals)
    assert back.samples == r.samples
    assert meta == {"dimensions": d, "quditCount": n, "elapsedMs": 1.5}
    assert cj.serialize_result(back, 1.5) == text


@pytest.mark.parametrize("path", fixture_paths(), ids=lambda p: p.stem)
def test_circuit_serialization_is_canonical(path):
    parsed = cj.parse_circuit(path.read_bytes())
    once = cj.serialize_circuit(parsed.circuit, parsed.qudits, parsed.options.shots, parsed.options.seed)
    again = cj.parse_circuit(once)
    twice = cj.serialize_circuit(again.circuit, again.qudits, again.options.shots, again.options.seed)
    assert once == twice
    np.testing.assert_array_equal(again.state.amplitudes, parsed.state.amplitudes)
    assert json.loads(once)["schemaVersion"] == 1


def test_result_documents_validate_against_schema():
    import jsonschema

    schema = cj.load_schema("result")
    for path in fixture_paths():
        jsonschema.validate(json.loads(cj.simulate(path.read_bytes())), schema)


def test_malformed_json():
    for bad in (b"not json", b"{", b"\xff\xfe", b'{"dimensions": NaN}', b"[" * 100000):
        with pytest.raises(MalformedJson):
            cj.parse_circuit(bad)


def test_error_body_shape():
    try:
        cj.parse_circuit(b"nope")
    except QuditError as exc:
        body = json.loads(cj.error_body(exc))
    assert set(body) == {"code", "message", "path"} and body["code"] == "MalformedJson"


def test_parse_result_rejects_garbage():
    with pytest.raises(SchemaViolation):
        cj.parse_result(b'{"amplitudes": []}')


def test_empty_result_amplitudes_shape():
    r = SimulationResult(np.array([1.0 + 0j, 0j]), np.array([[1.0, 0.0]]))
    back, _ = cj.parse_result(cj.serialize_result(r))
    assert back.amplitudes.shape == (2,)
