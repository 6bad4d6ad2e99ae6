"""Channel representations: Kraus form, Choi form, density matrices.

The Choi matrix convention is unnormalised (trace ``d``) with the channel
output as the first tensor factor, so ``C = sum_i res(K_i) res(K_i)^dag``
and trace preservation reads ``tr_first C = eye(d)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_ATOL,
    dagger,
    hermitize,
    haar_unitary,
    is_hermitian,
    partial_trace,
    res,
    unres,
)


class ValidationError(ValueError):
    """An object failed its structural invariants."""


@dataclass(frozen=True)
class KrausChannel:
    """A channel as a list of ``d x d`` Kraus operators.

    Invariant: ``sum_i K_i^dag K_i = eye(d)`` within ``atol``.
    """

    dim: int
    kraus_ops: tuple = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kraus_ops", tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops))

    def validate(self, atol: float = DEFAULT_ATOL) -> "KrausChannel":
        d = self.dim
        if d < 2:
            raise ValidationError(f"dimension must be >= 2, got {d}")
        if not self.kraus_ops:
            raise ValidationError("channel needs at least one Kraus operator")
        if len(self.kraus_ops) > d * d:
            raise ValidationError(f"Kraus rank {len(self.kraus_ops)} exceeds d^2 = {d * d}")
        acc = np.zeros((d, d), dtype=complex)
        for k in self.kraus_ops:
            if k.shape != (d, d):
                raise ValidationError(f"Kraus operator has shape {k.shape}, expected {(d, d)}")
            acc += dagger(k) @ k
        err = np.abs(acc - np.eye(d)).max()
        if err > atol:
            raise ValidationError(f"trace preservation violated: |sum K^dag K - 1| = {err:.3e}")
        return self

    @property
    def rank(self) -> int:
        return len(self.kraus_ops)


@dataclass(frozen=True)
class ChoiState:
    """Choi matrix of a channel: ``d^2 x d^2``, PSD, trace ``d``.

    Trace preservation: the partial trace over the first (output) factor
    equals the identity.
    """

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    def validate(self, atol: float = DEFAULT_ATOL) -> "ChoiState":
        d = self.dim
        m = self.matrix
        if m.shape != (d * d, d * d):
            raise ValidationError(f"Choi matrix has shape {m.shape}, expected {(d * d, d * d)}")
        if not is_hermitian(m, atol):
            raise ValidationError("Choi matrix is not Hermitian")
        evs = np.linalg.eigvalsh(hermitize(m))
        if evs.min() < -atol:
            raise ValidationError(f"Choi matrix is not PSD: min eigenvalue {evs.min():.3e}")
        tr = float(np.trace(m).real)
        if abs(tr - d) > max(atol, 1e-8 * d):
            raise ValidationError(f"Choi trace {tr} != {d}")
        pt = partial_trace(m, d, "first")
        err = np.abs(pt - np.eye(d)).max()
        if err > max(atol, 1e-8):
            raise ValidationError(f"trace preservation violated on partial trace: {err:.3e}")
        return self


@dataclass(frozen=True)
class DensityMatrix:
    """A ``d x d`` state: Hermitian, PSD, unit trace within tolerance."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    def validate(self, atol: float = DEFAULT_ATOL) -> "DensityMatrix":
        d = self.dim
        m = self.matrix
        if m.shape != (d, d):
            raise ValidationError(f"state has shape {m.shape}, expected {(d, d)}")
        if not is_hermitian(m, atol):
            raise ValidationError("state is not Hermitian")
        if np.linalg.eigvalsh(hermitize(m)).min() < -atol:
            raise ValidationError("state is not PSD")
        if abs(float(np.trace(m).real) - 1.0) > max(atol, 1e-9):
            raise ValidationError("state trace != 1")
        return self


def random_channel(d: int, env_dim: int, rng: np.random.Generator) -> KrausChannel:
    """Draw a random channel from a Haar unitary on ``d * env_dim`` dimensions.

    ``K_i = <i|_env U |0>_env`` for ``i < env_dim``; the Kraus rank equals
    ``env_dim``, which must be ``d`` or ``d^2``.
    """
    if env_dim not in (d, d * d):
        raise ValueError(f"env_dim must be d or d^2, got {env_dim}")
    u = haar_unitary(d * env_dim, rng)
    # environment is the slow tensor factor: block (i, 0) of the d x d grid
    ops = [u[i * d:(i + 1) * d, 0:d] for i in range(env_dim)]
    return KrausChannel(d, tuple(ops)).validate()


def kraus_to_choi(ch: KrausChannel) -> ChoiState:
    """Choi matrix ``sum_i res(K_i) res(K_i)^dag``.

    The result is symmetrised, so the returned matrix is exactly
    Hermitian rather than Hermitian up to the last ulp.
    """
    d = ch.dim
    c = np.zeros((d * d, d * d), dtype=complex)
    for k in ch.kraus_ops:
        v = res(k)
        c += np.outer(v, v.conj())
    return ChoiState(d, hermitize(c))


def choi_to_kraus(choi: ChoiState, rank_atol: float = 1e-9) -> KrausChannel:
    """Recover Kraus operators from the eigendecomposition of a Choi matrix.

    Eigenvalues at or below ``rank_atol`` (relative to the largest) are
    treated as zero, so rank-deficient inputs yield exactly their rank in
    operators.
    """
    choi.validate()
    d = choi.dim
    evals, evecs = np.linalg.eigh(hermitize(choi.matrix))
    cut = rank_atol * max(float(evals.max()), 1.0)
    ops = []
    for lam, vec in sorted(zip(evals, evecs.T), key=lambda t: -t[0]):
        if lam > cut:
            ops.append(unres(np.sqrt(lam) * vec, d))
    return KrausChannel(d, tuple(ops)).validate()


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """``sum_i K_i rho K_i^dag``."""
    if ch.dim != rho.dim:
        raise ValueError(f"dimension mismatch: channel {ch.dim}, state {rho.dim}")
    out = np.zeros((ch.dim, ch.dim), dtype=complex)
    for k in ch.kraus_ops:
        out += k @ rho.matrix @ dagger(k)
    return DensityMatrix(ch.dim, out)
