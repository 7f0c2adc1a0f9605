import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ghz_nonlocality.linalg import eigvalsh, is_hermitian, is_psd, kron, pauli, trace_product
from ghz_nonlocality.states import GHZ_PLUS

X, Y, Z = pauli("x"), pauli("y"), pauli("z")
I2 = np.eye(2)


def test_pauli_matrices():
    assert np.array_equal(X, [[0, 1], [1, 0]])
    assert np.array_equal(Y, [[0, -1j], [1j, 0]])
    assert np.array_equal(Z, [[1, 0], [0, -1]])


def test_pauli_rejects_unknown_axis():
    with pytest.raises(ValueError):
        pauli("w")


def test_kron_examples():
    assert np.array_equal(kron(I2, I2), np.eye(4))
    assert np.array_equal(kron(Z, Z), np.diag([1, -1, -1, 1]))
    assert np.array_equal(kron(X, X), np.fliplr(np.eye(4)))


def test_trace_product_examples():
    assert trace_product(np.eye(8) / 8, np.eye(8)) == pytest.approx(1)
    assert trace_product(Z, X) == 0
    ghz = np.outer(GHZ_PLUS, GHZ_PLUS.conj())
    assert trace_product(ghz, kron(X, X, X)) == pytest.approx(1, abs=1e-15)


def test_trace_product_dimension_mismatch():
    with pytest.raises(ValueError):
        trace_product(np.eye(2), np.eye(4))


def test_is_psd_examples():
    assert is_psd(np.eye(8) / 8)
    m = np.zeros((8, 8))
    m[0, 0], m[1, 1] = 1.0, -0.1
    assert not is_psd(m, tol=1e-9)


def test_non_hermitian_input_is_an_error():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    assert not is_hermitian(m)
    with pytest.raises(ValueError):
        is_psd(m)
    with pytest.raises(ValueError):
        eigvalsh(m)


small = st.floats(-2, 2, allow_nan=False)
mat2 = arrays(np.float64, (2, 2), elements=small)


@given(mat2, mat2, mat2)
@settings(max_examples=50, deadline=None)
def test_kron_is_associative(a, b, c):
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    np.testing.assert_allclose(kron(a, b, c), kron(a, kron(b, c)), atol=1e-12)


@given(mat2, mat2, mat2, mat2)
@settings(max_examples=50, deadline=None)
def test_trace_product_of_hermitian_matrices_is_real(a, b, c, d):
    h1 = (a + 1j * b) + (a + 1j * b).conj().T
    h2 = (c + 1j * d) + (c + 1j * d).conj().T
    t = trace_product(h1, h2)
    assert abs(t.imag) < 1e-12
    assert t == pytest.approx(trace_product(h2, h1), abs=1e-12)
