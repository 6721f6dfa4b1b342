import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quditsim.errors import BadDimension, DimensionMismatch, IndexOutOfRange, WrongLength, ZeroVector
from quditsim.state import (
    RegisterState,
    basis_qudit,
    digits_to_index,
    index_to_digits,
    make_qudit,
    make_register,
    normalize,
    tensor_product,
)

S2 = 1 / np.sqrt(2)


def test_make_qudit_examples():
    np.testing.assert_array_equal(make_qudit(3, [1, 0, 0]).amplitudes, [1, 0, 0])
    np.testing.assert_allclose(make_qudit(2, [1, 1]).amplitudes, [S2, S2], atol=1e-15)
    np.testing.assert_allclose(make_qudit(3, [2, 0, 2j]).amplitudes, [S2, 0, 1j * S2], atol=1e-15)


@pytest.mark.parametrize("d, amps, exc", [
    (3, [1, 0], WrongLength),
    (2, [0, 0], ZeroVector),
    (2, [1e-16, 0], ZeroVector),
    (1, [1], BadDimension),
])
def test_make_qudit_errors(d, amps, exc):
    with pytest.raises(exc):
        make_qudit(d, amps)


def test_qudit_amplitudes_are_read_only():
    q = make_qudit(2, [1, 1])
    with pytest.raises(ValueError):
        q.amplitudes[0] = 0


def test_basis_qudit():
    np.testing.assert_array_equal(basis_qudit(2, 0).amplitudes, [1, 0])
    np.testing.assert_array_equal(basis_qudit(3, 2).amplitudes, [0, 0, 1])
    with pytest.raises(IndexOutOfRange):
        basis_qudit(3, 3)


def test_tensor_product_examples():
    np.testing.assert_array_equal(tensor_product(2, [basis_qudit(2, 0), basis_qudit(2, 1)]), [0, 1, 0, 0])
    out = tensor_product(3, [basis_qudit(3, 2), basis_qudit(3, 2)])
    assert out[8] == 1 and np.count_nonzero(out) == 1
    plus = make_qudit(2, [1, 1])
    np.testing.assert_allclose(tensor_product(2, [plus, basis_qudit(2, 0)]), [S2, 0, S2, 0], atol=1e-15)


def test_tensor_product_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        tensor_product(3, [basis_qudit(3, 0), basis_qudit(2, 0)])


def test_tensor_product_matches_digitwise_definition(rng):
    d, n = 3, 3
    qs = [make_qudit(d, rng.normal(size=d) + 1j * rng.normal(size=d)) for _ in range(n)]
    out = tensor_product(d, qs)
    for j in range(d**n):
        expected = np.prod([qs[i].amplitudes[s] for i, s in enumerate(index_to_digits(j, d, n))])
        assert abs(out[j] - expected) < 1e-15
    assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_tensor_product_associative(rng):
    for d in (2, 3):
        a, b, c = (make_qudit(d, rng.normal(size=d) + 1j * rng.normal(size=d)) for _ in range(3))
        ab = tensor_product(d, [a, b])
        np.testing.assert_allclose(tensor_product(d, [a, b, c]), np.kron(ab, c.amplitudes), atol=1e-12)


def test_normalize_examples():
    np.testing.assert_array_equal(normalize([1, 0]), [1, 0])
    np.testing.assert_allclose(normalize([3, 4j]), [0.6, 0.8j], atol=1e-15)
    with pytest.raises(ZeroVector):
        normalize([0, 0])


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=12))
def test_normalize_idempotent_and_positive_scaling(values):
    v = np.array(values)
    if np.max(np.abs(v)) < 1e-15:
        return
    once = normalize(v)
    assert abs(np.linalg.norm(once) - 1) < 1e-12
    np.testing.assert_allclose(normalize(once), once, atol=1e-12)
    k = np.argmax(np.abs(v))
    ratio = once[k] / v[k]
    assert ratio.real > 0 and abs(ratio.imag) < 1e-12 * abs(ratio)


def test_codec_examples():
    assert index_to_digits(8, 3, 2) == [2, 2]
    assert index_to_digits(0, 5, 3) == [0, 0, 0]
    assert digits_to_index([1, 1], 3) == 4
    with pytest.raises(IndexOutOfRange):
        index_to_digits(9, 3, 2)
    with pytest.raises(IndexOutOfRange):
        digits_to_index([3], 3)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_codec_round_trip(d, n):
    for j in range(d**n):
        digits = index_to_digits(j, d, n)
        assert len(digits) == n and all(0 <= s < d for s in digits)
        assert digits_to_index(digits, d) == j


def test_make_register_normalizes_and_single_qudit_branch():
    reg = make_register(3, [[1, 1, 0]])
    assert reg.qudit_count == 1
    np.testing.assert_allclose(reg.amplitudes, [S2, S2, 0], atol=1e-15)
    reg = make_register(2, [[2, 0], [0, 5]])
    np.testing.assert_allclose(reg.amplitudes, [0, 1, 0, 0], atol=1e-15)
    assert abs(reg.norm() - 1) < 1e-12


def test_register_basis_and_from_amplitudes():
    reg = RegisterState.basis(3, [1, 2])
    assert reg.amplitudes[5] == 1 and reg.size == 9
    with pytest.raises(WrongLength):
        RegisterState.from_amplitudes(2, 2, [1, 0, 0])
