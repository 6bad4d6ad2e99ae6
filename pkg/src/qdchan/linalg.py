"""Dense complex linear algebra utilities for qudit channels.

Conventions used throughout the package:

* Vectorisation ``res(A)`` is row-major: ``res(A) = (a_00, ..., a_0m, a_10, ...)``.
* Bipartite operators on ``C^d (x) C^d`` index the *channel output* factor
  first, so the trace-preservation condition on a Choi matrix reads
  ``partial_trace(C, d, "first") == eye(d)``.
* Structural checks take an explicit tolerance and never assume properties.
"""

import numpy as np

DEFAULT_ATOL = 1e-10
SPECTRAL_ATOL = 1e-8


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def res(a: np.ndarray) -> np.ndarray:
    """Row-major vectorisation of a square matrix as a flat vector."""
    return np.ascontiguousarray(a).reshape(-1)


def unres(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`res` for a ``d x d`` matrix."""
    return v.reshape(d, d)


def is_hermitian(a: np.ndarray, atol: float = DEFAULT_ATOL) -> bool:
    return a.shape[0] == a.shape[1] and np.abs(a - dagger(a)).max() <= atol


def is_unitary(a: np.ndarray, atol: float = DEFAULT_ATOL) -> bool:
    if a.shape[0] != a.shape[1]:
        return False
    return np.abs(dagger(a) @ a - np.eye(a.shape[0])).max() <= atol


def is_psd(a: np.ndarray, atol: float = DEFAULT_ATOL) -> bool:
    """Positive semidefiniteness up to ``-atol`` on the spectrum."""
    if not is_hermitian(a, atol):
        return False
    return float(np.linalg.eigvalsh(hermitize(a)).min()) >= -atol


def hermitize(a: np.ndarray) -> np.ndarray:
    """Symmetrised ``(A + A^dag)/2``; suppresses round-off asymmetry."""
    return 0.5 * (a + dagger(a))


def weyl_x(d: int, i: int) -> np.ndarray:
    """Cyclic shift operator with ones at positions ``(l, l+i mod d)``."""
    if not 0 <= i < d:
        raise ValueError(f"shift index {i} out of range for dimension {d}")
    x = np.zeros((d, d), dtype=complex)
    for ell in range(d):
        x[ell, (ell + i) % d] = 1.0
    return x


def weyl_z(d: int, j: int) -> np.ndarray:
    """Clock operator ``diag(exp(i 2 pi l j / d))``."""
    if not 0 <= j < d:
        raise ValueError(f"phase index {j} out of range for dimension {d}")
    return np.diag(np.exp(2j * np.pi * np.arange(d) * j / d))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw an ``n x n`` unitary from the Haar measure.

    QR decomposition of a complex standard-Gaussian matrix with the
    phase of the R diagonal folded back into Q.  Degenerate draws (a
    vanishing R diagonal entry) are re-drawn.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    while True:
        z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r)
        if np.abs(diag).min() > 1e-12:
            return q * (diag / np.abs(diag))


def trace_distance(a: np.ndarray, b: np.ndarray, atol: float = SPECTRAL_ATOL) -> float:
    """Half the sum of absolute eigenvalues of ``A - B``.

    Both inputs must be Hermitian within ``atol``.  On Choi matrices of
    d-dimensional channels the value lies in ``[0, d]``.  The difference
    is sign-canonicalised before the eigensolve, which makes the result
    bitwise symmetric in its arguments.
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    if not is_hermitian(diff, atol):
        raise ValueError("trace distance requires Hermitian inputs")
    h = hermitize(diff)
    for v in h.flat:
        if v.real != 0.0:
            if v.real < 0.0:
                h = -h
            break
        if v.imag != 0.0:
            if v.imag < 0.0:
                h = -h
            break
    return 0.5 * float(np.abs(np.linalg.eigvalsh(h)).sum())


def partial_trace(m: np.ndarray, d: int, subsystem: str) -> np.ndarray:
    """Partial trace of a ``d^2 x d^2`` operator over one tensor factor.

    ``subsystem`` is ``"first"`` (the channel-output factor under package
    conventions) or ``"second"``.
    """
    if m.shape != (d * d, d * d):
        raise ValueError(f"expected a {d * d} x {d * d} matrix, got {m.shape}")
    t = m.reshape(d, d, d, d)
    if subsystem == "first":
        return np.einsum("abad->bd", t)
    if subsystem == "second":
        return np.einsum("abcb->ac", t)
    raise ValueError("subsystem must be 'first' or 'second'")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; first factor is the slow (outer) index."""
    return np.kron(a, b)


def spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def maximally_entangled_choi(d: int) -> np.ndarray:
    """Unnormalised ``|eta><eta|`` with ``eta = sum_i |ii>`` (trace d)."""
    eta = res(np.eye(d, dtype=complex))
    return np.outer(eta, eta.conj())
