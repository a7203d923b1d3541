"""Small dense complex linear algebra for the four-level system.

Vectors are plain numpy arrays of shape (4,) and operators of shape (4, 4).
Nothing here mutates its arguments, so values can be shared freely across
threads. Tolerances default to 1e-10 everywhere; 4x4 problems accumulate
negligible rounding compared to that.
"""

from __future__ import annotations

import numpy as np

#: Default tolerance for floating-point predicates.
DEFAULT_TOL = 1e-10


def frobenius_distance(a, b) -> float:
    """Frobenius-norm distance ||a - b||_F between two equal-shape matrices.

    Also accepts vectors or 2x2 blocks; the only requirement is that the
    shapes match.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ||m - m^dag||_F <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m - m.conj().T)) <= tol


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ||m^dag m - 1||_F <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, dtype=complex)
    eye = np.eye(m.shape[0])
    return float(np.linalg.norm(m.conj().T @ m - eye)) <= tol


def is_normalized(v, tol: float = DEFAULT_TOL) -> bool:
    """True iff the vector has unit 2-norm within tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=complex)
    return abs(float(np.linalg.norm(v)) - 1.0) <= tol


def projector_from_vectors(vs) -> np.ndarray:
    """Orthogonal projector sum_k v_k v_k^dag onto the span of the vectors.

    The input vectors must be orthonormal within 1e-10 (checked through the
    Gram matrix); the result is then Hermitian and idempotent with trace
    equal to the number of vectors.
    """
    vecs = [np.asarray(v, dtype=complex) for v in vs]
    if not vecs:
        raise ValueError("need at least one vector")
    stack = np.array(vecs)
    gram = stack.conj() @ stack.T
    if float(np.linalg.norm(gram - np.eye(len(vecs)))) > 1e-10:
        raise ValueError("input vectors are not orthonormal within 1e-10")
    return stack.T @ stack.conj()
