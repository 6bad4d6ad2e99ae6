"""Parameterisation of generalized extreme channels.

A generalized extreme channel on a qudit has Kraus rank at most ``d`` and
Kraus operators ``K_i = W F_i V`` where ``F_i = X_i E_i`` combines a cyclic
shift with a diagonal ``E_i``.  The diagonals are induced by a cascade of
two-level multiplexed rotations: for each level pair ``j > k`` a rotation
angle pair ``(alpha_jk, beta_jk)`` rotates an ancilla register conditioned
on the system level, and the resulting real amplitudes ``u[i, l]`` satisfy
``E_i |l> = u[i, l] |l>`` with ``sum_i u[i, l]^2 = 1`` exactly.

Extremality is certified through the tensor
``b[i, mu, nu] = conj(u[i, nu]) u[i+mu, nu+mu]``: the channel is extreme
iff every matrix ``B_mu = b[:, mu, :]`` is nonsingular, and quasi-extreme
otherwise.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = [
    "ExtremeParams",
    "kappa",
    "parameter_count",
    "mux_pair_order",
    "unitary_from_params",
    "branch_amplitudes",
    "extreme_kraus",
    "extreme_f_ops",
    "b_tensor",
    "check_extremality",
    "extreme_choi",
    "extreme_choi_bare",
    "random_extreme_params",
]


def kappa(d: int) -> int:
    """Number of SU(d) factors needed so the ansatz has enough parameters."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return math.ceil((d - 1) * (d * d + d + 1) / (d * (d + 1)))


def parameter_count(d: int) -> int:
    """Total free parameters of a d-term mixture of generalized extreme channels.

    ``kappa*d*(d^2-1)`` unitary parameters plus ``d*(d^2-d)`` rotation
    angles plus ``d-1`` mixture probabilities; always at least ``d^4-d^2``.
    """
    k = kappa(d)
    return k * d * (d * d - 1) + d * (d * d - d) + (d - 1)


def mux_pair_order(d: int) -> list:
    """Canonical listing order of multiplexed-rotation level pairs.

    Pairs ``(j, k)`` with ``d-1 >= j > k >= 0``, ``j`` descending then ``k``
    descending.  Gates are *applied* in the reversed order of this list.
    """
    return [(j, k) for j in range(d - 1, 0, -1) for k in range(j - 1, -1, -1)]


@dataclass(frozen=True)
class ExtremeParams:
    """Full parameter vector of one generalized extreme channel.

    ``mux_angles`` holds ``(alpha, beta)`` pairs in :func:`mux_pair_order`;
    ``prior_blocks`` are ``ceil(kappa/2)`` SU(d) parameter blocks merged
    into the pre-rotation ``V`` and ``posterior_blocks`` the ``floor(kappa/2)``
    blocks merged into the post-rotation ``W``.  Each block has ``d^2 - 1``
    entries.
    """

    dim: int
    mux_angles: np.ndarray = field(repr=False)
    prior_blocks: np.ndarray = field(repr=False)
    posterior_blocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.dim
        object.__setattr__(self, "mux_angles", np.asarray(self.mux_angles, dtype=float).reshape(-1, 2))
        npairs = d * (d - 1) // 2
        if self.mux_angles.shape != (npairs, 2):
            raise ValueError(f"expected {npairs} angle pairs, got {self.mux_angles.shape}")
        k = kappa(d)
        n_prior, n_post = (k + 1) // 2, k // 2
        prior = np.asarray(self.prior_blocks, dtype=float).reshape(n_prior, -1)
        post = np.asarray(self.posterior_blocks, dtype=float).reshape(n_post, -1) if n_post else np.zeros((0, d * d - 1))
        if prior.shape[1] != d * d - 1 or (n_post and post.shape[1] != d * d - 1):
            raise ValueError("unitary blocks must have d^2 - 1 entries each")
        object.__setattr__(self, "prior_blocks", prior)
        object.__setattr__(self, "posterior_blocks", post)

    def prior_unitary(self) -> np.ndarray:
        """Merged pre-rotation ``V``: the first listed block acts first."""
        return _merged_unitary(self.dim, self.prior_blocks)

    def posterior_unitary(self) -> np.ndarray:
        """Merged post-rotation ``W``."""
        return _merged_unitary(self.dim, self.posterior_blocks)


def _merged_unitary(d: int, blocks: np.ndarray) -> np.ndarray:
    return _kernels.merged_unitary_flat(d, np.ascontiguousarray(blocks, dtype=float))


def unitary_from_params(d: int, block: np.ndarray) -> np.ndarray:
    """Special unitary from ``d^2 - 1`` reals.

    Layout: for each level pair ``(j, k)`` with ``j > k`` (ascending ``j``,
    then ``k``) a rotation angle and an embedded phase, followed by
    ``d - 1`` diagonal phases.  The map covers SU(d) up to a set of
    measure zero; the zero vector maps to the identity.
    """
    block = np.ascontiguousarray(block, dtype=float).reshape(-1)
    if block.size != d * d - 1:
        raise ValueError(f"expected {d * d - 1} parameters, got {block.size}")
    return _kernels.su_from_params(d, block)


def branch_amplitudes(d: int, mux_angles: np.ndarray) -> np.ndarray:
    """Real amplitude table ``u[i, l]`` generated by the rotation cascade.

    For system level ``l`` the ancilla undergoes, in application order, a
    two-level rotation by ``alpha_jk`` when ``l == j`` and by ``beta_jk``
    when ``l == k``; ``u[:, l]`` is the image of the ``|0>`` column.
    Columns are unit vectors, so ``sum_i u[i, l]^2 = 1`` holds exactly.
    """
    mux = np.ascontiguousarray(mux_angles, dtype=float).reshape(-1, 2)
    if mux.shape[0] != d * (d - 1) // 2:
        raise ValueError(f"expected {d * (d - 1) // 2} angle pairs, got {mux.shape[0]}")
    return _kernels.branch_amps(d, mux)


def extreme_f_ops(p: ExtremeParams) -> list:
    """Shift-times-diagonal Kraus operators ``F_i`` (before ``V``/``W``)."""
    d = p.dim
    u = branch_amplitudes(d, p.mux_angles)
    ops = []
    for i in range(d):
        f = np.zeros((d, d), dtype=complex)
        for c in range(d):
            f[(c - i) % d, c] = u[i, c]
        ops.append(f)
    return ops


def extreme_kraus(p: ExtremeParams):
    """Kraus operators ``K_i = W F_i V`` of the parameterised channel."""
    from .channels import KrausChannel

    v = p.prior_unitary()
    w = p.posterior_unitary()
    ops = tuple(w @ f @ v for f in extreme_f_ops(p))
    return KrausChannel(p.dim, ops)


def b_tensor(p: ExtremeParams) -> np.ndarray:
    """Coefficients ``b[i, mu, nu]`` of the products ``F_i^dag F_{i+mu}``.

    ``F_i^dag F_{i+mu} = sum_nu b[i, mu, nu] |nu><nu+mu|``, with
    ``b[i, mu, nu] = conj(u[i, nu]) * u[i+mu, nu+mu]`` for the amplitude
    table of :func:`branch_amplitudes`.
    """
    d = p.dim
    u = branch_amplitudes(d, p.mux_angles).astype(complex)
    b = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        for mu in range(d):
            for nu in range(d):
                b[i, mu, nu] = np.conj(u[i, nu]) * u[(i + mu) % d, (nu + mu) % d]
    return b


def check_extremality(p: ExtremeParams, tol: float = 1e-8) -> str:
    """Classify the channel as ``"extreme"`` or ``"quasi_extreme"``.

    Extreme iff every slice ``B_mu = b[:, mu, :]``, normalised to unit
    Frobenius norm, has ``|det| > tol`` (linear independence of the
    pairwise Kraus products).  Quasi-extreme channels are still valid.
    """
    b = b_tensor(p)
    for mu in range(p.dim):
        bmu = b[:, mu, :]
        norm = np.linalg.norm(bmu)
        if norm <= tol:
            return "quasi_extreme"
        if abs(np.linalg.det(bmu / norm)) <= tol:
            return "quasi_extreme"
    return "extreme"


def extreme_choi_bare(d: int, u: np.ndarray) -> np.ndarray:
    """Choi matrix of the ``{F_i}`` channel, assembled sparsely.

    Nonzero entries sit at ``((l, l+i), (k, k+i))`` with value
    ``u[i, l+i] * conj(u[i, k+i])``; each row has at most ``d`` nonzeros
    and the rank is at most ``d``.
    """
    return _kernels.bare_choi(d, np.ascontiguousarray(u, dtype=float))


def extreme_choi(p: ExtremeParams):
    """Choi matrix of the full channel ``K_i = W F_i V``.

    Assembles the sparse Choi of the ``{F_i}`` channel and conjugates by
    ``W (x) V^T``; agrees with routing :func:`extreme_kraus` through the
    generic Kraus-to-Choi conversion.
    """
    from .channels import ChoiState
    from .linalg import hermitize

    d = p.dim
    u = branch_amplitudes(d, p.mux_angles)
    core = extreme_choi_bare(d, u)
    full = _kernels.conjugate_choi(d, core, p.posterior_unitary(), p.prior_unitary())
    return ChoiState(d, hermitize(full))


def random_extreme_params(d: int, rng: np.random.Generator) -> ExtremeParams:
    """Uniform angle draw: rotation angles and phases in ``[0, 2 pi)``."""
    npairs = d * (d - 1) // 2
    k = kappa(d)
    n_prior, n_post = (k + 1) // 2, k // 2
    return ExtremeParams(
        dim=d,
        mux_angles=rng.uniform(0, 2 * np.pi, size=(npairs, 2)),
        prior_blocks=rng.uniform(0, 2 * np.pi, size=(n_prior, d * d - 1)),
        posterior_blocks=rng.uniform(0, 2 * np.pi, size=(n_post, d * d - 1)),
    )
