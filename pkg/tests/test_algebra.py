import numpy as np
import pytest

from tripodholo import algebra


def random_unitary(rng, dim=4):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_frobenius_distance_identity_cases():
    eye = np.eye(4)
    assert algebra.frobenius_distance(eye, eye) == 0.0
    assert algebra.frobenius_distance(eye, -eye) == pytest.approx(4.0)
    single = np.diag([1.0, 0.0, 0.0, 0.0])
    assert algebra.frobenius_distance(single, np.zeros((4, 4))) == pytest.approx(1.0)


def test_frobenius_distance_shape_mismatch():
    with pytest.raises(ValueError):
        algebra.frobenius_distance(np.eye(4), np.eye(2))


def test_frobenius_triangle_inequality():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        a, b, c = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
                   for _ in range(3))
        dab = algebra.frobenius_distance(a, b)
        dbc = algebra.frobenius_distance(b, c)
        dac = algebra.frobenius_distance(a, c)
        assert dac <= dab + dbc + 1e-12


def test_is_unitary_examples():
    assert algebra.is_unitary(np.eye(4), 1e-12)
    assert not algebra.is_unitary(2.0 * np.eye(4), 1e-12)
    theta = 0.7
    rot = np.eye(4)
    rot[1, 1] = rot[2, 2] = np.cos(theta)
    rot[1, 2], rot[2, 1] = -np.sin(theta), np.sin(theta)
    assert algebra.is_unitary(rot, 1e-12)


def test_is_unitary_random_unitaries():
    rng = np.random.default_rng(5)
    for _ in range(50):
        assert algebra.is_unitary(random_unitary(rng), 1e-12)


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        algebra.is_unitary(np.eye(4), 0.0)
    with pytest.raises(ValueError):
        algebra.is_hermitian(np.eye(4), -1.0)


def test_projector_examples():
    i0 = np.array([1, 0, 0, 0], dtype=complex)
    i1 = np.array([0, 1, 0, 0], dtype=complex)
    i2 = np.array([0, 0, 1, 0], dtype=complex)
    assert np.allclose(algebra.projector_from_vectors([i0]), np.diag([1, 0, 0, 0]))
    assert np.allclose(algebra.projector_from_vectors([i1, i2]), np.diag([0, 1, 1, 0]))
    v = (np.array([1, 0, 0, 1]) / np.sqrt(2)).astype(complex)
    p = algebra.projector_from_vectors([v])
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[0, 3] = expected[3, 0] = expected[3, 3] = 0.5
    assert np.allclose(p, expected)


def test_projector_rejects_non_orthonormal():
    v = np.array([1, 1, 0, 0], dtype=complex)
    with pytest.raises(ValueError):
        algebra.projector_from_vectors([v])
    e1 = np.array([1, 0, 0, 0], dtype=complex)
    almost = np.array([1e-3, 1, 0, 0], dtype=complex)
    almost /= np.linalg.norm(almost)
    with pytest.raises(ValueError):
        algebra.projector_from_vectors([e1, almost])


def test_projector_properties_random_orthonormal_sets():
    rng = np.random.default_rng(99)
    for k in (1, 2, 3, 4):
        for _ in range(25):
            u = random_unitary(rng)
            vecs = [u[:, j] for j in range(k)]
            p = algebra.projector_from_vectors(vecs)
            assert np.linalg.norm(p @ p - p) < 1e-12
            assert np.linalg.norm(p - p.conj().T) < 1e-12
            assert abs(np.trace(p).real - k) < 1e-12


def test_is_normalized():
    assert algebra.is_normalized(np.array([1, 0, 0, 0]))
    assert not algebra.is_normalized(np.array([1, 1, 0, 0]))
