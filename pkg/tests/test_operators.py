import numpy as np
import pytest

from cqbounds import (
    DensityMatrix,
    DimensionMismatchError,
    DomainError,
    HermitianOperator,
    ResourceCapError,
    ValidationError,
    eig_hermitian,
    matrix_function,
    partial_trace,
    random_density,
    random_hermitian,
    tensor,
    tensor_density,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def test_tensor_identities():
    eye2 = HermitianOperator(np.eye(2))
    out = tensor(eye2, eye2)
    np.testing.assert_allclose(out.entries, np.eye(4))
    assert out.subsystem_dims == (2, 2)

    a = HermitianOperator(np.diag([1.0, 0.0]))
    b = HermitianOperator(np.diag([0.5, 0.5]))
    np.testing.assert_allclose(tensor(a, b).entries, np.diag([0.5, 0.5, 0.0, 0.0]))


def test_tensor_matches_kronecker_index_formula():
    # oracle: out[i*db+k, j*db+l] = a[i,j] * b[k,l]
    a, b = PAULI_X, PAULI_Z
    out = tensor(HermitianOperator(a), HermitianOperator(b)).entries
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    assert out[2 * i + k, 2 * j + l] == a[i, j] * b[k, l]
    assert out[0, 2] == 1.0 and out[1, 3] == -1.0


def test_partial_trace_product_state():
    rho_a = random_density(2, 11, min_eig_floor=0.1)
    rho_b = random_density(3, 12, min_eig_floor=0.05)
    joint = tensor(rho_a, rho_b)
    np.testing.assert_allclose(partial_trace(joint, [0]).entries, rho_a.entries, atol=1e-12)
    np.testing.assert_allclose(partial_trace(joint, [1]).entries, rho_b.entries, atol=1e-12)


def test_partial_trace_bell_state():
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
    bell = HermitianOperator(np.outer(vec, vec.conj()), (2, 2))
    # oracle: explicit 4x4 summation over the traced index
    expected = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            expected[i, j] = sum(bell.entries[2 * i + k, 2 * j + k] for k in range(2))
    reduced = partial_trace(bell, [0])
    np.testing.assert_allclose(reduced.entries, expected, atol=1e-14)
    np.testing.assert_allclose(reduced.entries, np.eye(2) / 2, atol=1e-14)


def test_partial_trace_total_and_errors():
    rho = random_density(4, 5)
    total = partial_trace(HermitianOperator(rho.entries, (2, 2)), [0, 1])
    assert total.dim == 4
    scalar = np.trace(rho.entries)
    one_site = partial_trace(HermitianOperator(rho.entries, (4,)), [0])
    np.testing.assert_allclose(np.trace(one_site.entries), scalar)
    with pytest.raises(DimensionMismatchError):
        partial_trace(HermitianOperator(rho.entries, (2, 2)), [2])
    with pytest.raises(DimensionMismatchError):
        partial_trace(HermitianOperator(rho.entries, (2, 2)), [])


def test_eig_hermitian_examples():
    w, _ = eig_hermitian(HermitianOperator(np.diag([3.0, 1.0])))
    np.testing.assert_allclose(w, [1.0, 3.0])
    # oracle: characteristic polynomial of Pauli X is l^2 - 1
    w, v = eig_hermitian(HermitianOperator(PAULI_X))
    np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, PAULI_X, atol=1e-14)
    w, _ = eig_hermitian(HermitianOperator(np.eye(5)))
    np.testing.assert_allclose(w, np.ones(5))


def test_eig_hermitian_reconstruction_sweep():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        dim = int(rng.integers(2, 17))
        a = random_hermitian(dim, int(rng.integers(0, 2**31)))
        w, v = eig_hermitian(a)
        resid = np.max(np.abs((v * w) @ v.conj().T - a.entries))
        assert resid <= 1e-9 * dim
        assert np.all(np.diff(w) >= -1e-12)


def test_eig_hermitian_deterministic_on_degenerate():
    a = HermitianOperator(np.eye(4))
    w1, v1 = eig_hermitian(a)
    w2, v2 = eig_hermitian(a)
    assert np.array_equal(v1, v2)
    np.testing.assert_allclose(v1 @ v1.conj().T, np.eye(4), atol=1e-14)


def test_matrix_function_examples():
    zero = HermitianOperator(np.zeros((3, 3)))
    np.testing.assert_allclose(matrix_function(zero, "exp").entries, np.eye(3))
    diag = HermitianOperator(np.diag([np.e, np.e**2]))
    np.testing.assert_allclose(
        matrix_function(diag, "log").entries, np.diag([1.0, 2.0]), atol=1e-14
    )
    np.testing.assert_allclose(
        matrix_function(HermitianOperator(np.diag([4.0, 9.0])), "power", exponent=0.5).entries,
        np.diag([2.0, 3.0]),
        atol=1e-14,
    )


def test_matrix_function_roundtrip_and_errors():
    rho = random_density(4, 9, min_eig_floor=0.05)
    back = matrix_function(matrix_function(rho, "log"), "exp")
    assert np.max(np.abs(back.entries - rho.entries)) <= 1e-8
    with pytest.raises(DomainError):
        matrix_function(HermitianOperator(np.zeros((2, 2))), "log")
    with pytest.raises(DomainError):
        matrix_function(HermitianOperator(np.diag([1.0, -0.5])), "power", exponent=0.5)
    singular = HermitianOperator(np.diag([1.0, 0.0]))
    with pytest.raises(DomainError):
        matrix_function(singular, "power", exponent=-1.0)
    restricted = matrix_function(singular, "power", exponent=-1.0, support_restricted=True)
    np.testing.assert_allclose(restricted.entries, np.diag([1.0, 0.0]))


def test_random_density_contract():
    one = random_density(1, 3)
    np.testing.assert_allclose(one.entries, [[1.0]])
    np.testing.assert_array_equal(
        random_density(4, 77).entries, random_density(4, 77).entries
    )
    rho = random_density(4, 21, min_eig_floor=0.05)
    assert np.linalg.eigvalsh(rho.entries)[0] >= 0.05 - 1e-12
    with pytest.raises(DomainError):
        random_density(4, 1, min_eig_floor=0.25)


def test_density_matrix_invariants():
    for seed in range(25):
        rho = random_density(3, seed)
        assert abs(np.trace(rho.entries).real - 1.0) <= 1e-10
        assert rho.min_eig >= 0.0
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.6, 0.6]))
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_hermiticity_enforcement():
    # deviations within tolerance are symmetrized, larger ones rejected
    base = np.array([[1.0, 0.5 + 5e-11j], [0.5 - 0j, 1.0]])
    op = HermitianOperator(base)
    np.testing.assert_allclose(op.entries, op.entries.conj().T)
    with pytest.raises(ValidationError):
        HermitianOperator(np.array([[1.0, 1e-6j], [0.0, 1.0]]))


def test_tensor_roundtrip_factors():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = random_density(2, int(rng.integers(0, 2**31)), min_eig_floor=0.1)
        b = random_density(2, int(rng.integers(0, 2**31)), min_eig_floor=0.1)
        joint = tensor_density(a, b)
        np.testing.assert_allclose(partial_trace(joint, [0]).entries, a.entries, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, [1]).entries, b.entries, atol=1e-12)


def test_dimension_cap():
    with pytest.raises(ResourceCapError):
        HermitianOperator(np.eye(1030))


def test_subsystem_dims_validation():
    with pytest.raises(ValidationError):
        HermitianOperator(np.eye(4), (3, 2))
