"""Block structure of Choi matrices.

A ``d^2 x d^2`` Choi matrix partitions into a ``d x d`` grid of ``d x d``
blocks over the output-factor index.  For any PSD input the off-diagonal
blocks factor as ``C_kl = sqrt(C_k) B_kl sqrt(C_l)`` with a contraction
``B_kl`` (largest singular value at most 1).  For a generalized extreme
channel the ``B_kl`` are unitary on the supports and telescope along a
chain, ``B_kl = B_{k,k+1} ... B_{l-1,l}``; those two facts plus the rank
bound ``rank <= d`` are the certificate checked here.
"""

from dataclasses import dataclass, field

import numpy as np

from .channels import ChoiState, ValidationError
from .linalg import dagger, hermitize

__all__ = [
    "ChoiBlocks",
    "choi_blocks",
    "extract_contraction",
    "certify_generalized_extreme",
    "blockwise_mixture_residual",
]

RANK_REL_TOL = 1e-8


@dataclass(frozen=True)
class ChoiBlocks:
    """Block grid of a Choi matrix: ``diag[k] = C_k``, ``offdiag[(k, l)] = C_kl``."""

    dim: int
    diag: tuple = field(repr=False)
    offdiag: dict = field(repr=False)

    def reassemble(self) -> np.ndarray:
        d = self.dim
        out = np.zeros((d * d, d * d), dtype=complex)
        for k in range(d):
            out[k * d:(k + 1) * d, k * d:(k + 1) * d] = self.diag[k]
        for (k, l), blk in self.offdiag.items():
            out[k * d:(k + 1) * d, l * d:(l + 1) * d] = blk
            out[l * d:(l + 1) * d, k * d:(k + 1) * d] = dagger(blk)
    # lossless by construction: blocks are views copied straight out of the grid
        return out


def choi_blocks(c: ChoiState, atol: float = 1e-10) -> ChoiBlocks:
    """Partition a Choi matrix into its block grid.

    Diagonal blocks of a PSD matrix are PSD; that is checked within
    ``atol`` as a guard against malformed input.
    """
    d = c.dim
    m = c.matrix
    if m.shape != (d * d, d * d):
        raise ValidationError(f"expected {(d * d, d * d)}, got {m.shape}")
    diag = []
    for k in range(d):
        blk = m[k * d:(k + 1) * d, k * d:(k + 1) * d].copy()
        if np.linalg.eigvalsh(hermitize(blk)).min() < -atol:
            raise ValidationError(f"diagonal block {k} is not PSD")
        diag.append(blk)
    offdiag = {
        (k, l): m[k * d:(k + 1) * d, l * d:(l + 1) * d].copy()
        for k in range(d) for l in range(k + 1, d)
    }
    return ChoiBlocks(d, tuple(diag), offdiag)


def _support_sqrt_pinv(blk: np.ndarray, rel_tol: float = RANK_REL_TOL):
    """Eigen data of a PSD block: (pinv of sqrt, support basis columns)."""
    evals, evecs = np.linalg.eigh(hermitize(blk))
    cut = rel_tol * max(float(evals.max()), rel_tol)
    keep = evals > cut
    vs = evecs[:, keep]
    inv_sqrt = vs @ np.diag(1.0 / np.sqrt(evals[keep])) @ dagger(vs)
    return inv_sqrt, vs


def extract_contraction(blocks: ChoiBlocks, k: int, l: int,
                        support_atol: float = 1e-8):
    """Contraction factor of block ``(k, l)`` and its largest singular value.

    ``B_kl = pinv(sqrt(C_k)) C_kl pinv(sqrt(C_l))`` on the supports of the
    diagonal blocks.  Raises when ``C_kl`` has weight outside those
    supports, which no PSD block matrix can produce.
    """
    if not k < l:
        raise ValueError("require k < l")
    ck, cl = blocks.diag[k], blocks.diag[l]
    ckl = blocks.offdiag[(k, l)]
    inv_k, vk = _support_sqrt_pinv(ck)
    inv_l, vl = _support_sqrt_pinv(cl)
    pk = vk @ dagger(vk)
    pl = vl @ dagger(vl)
    leak = np.abs(ckl - pk @ ckl @ pl).max()
    scale = max(np.abs(ckl).max(), 1.0)
    if leak > support_atol * scale:
        raise ValidationError(
            f"block ({k},{l}) has weight {leak:.3e} outside the diagonal supports")
    factor = inv_k @ ckl @ inv_l
    svals = np.linalg.svd(dagger(vk) @ factor @ vl, compute_uv=False)
    max_singular = float(svals.max()) if svals.size else 0.0
    return factor, max_singular


def _numerical_rank(m: np.ndarray, rel_tol: float = RANK_REL_TOL) -> int:
    evals = np.linalg.eigvalsh(hermitize(m))
    top = max(float(np.abs(evals).max()), rel_tol)
    return int((evals > rel_tol * top).sum())


def certify_generalized_extreme(c: ChoiState, tol: float = 1e-7) -> dict:
    """One-directional generalized-extreme certificate.

    Passing requires (a) numerical rank at most ``d``, (b) every
    support-restricted contraction has all singular values within ``tol``
    of 1, and (c) every chain residual
    ``|B_kl - B_{k,k+1} ... B_{l-1,l}|`` on the common support is within
    ``tol``.  A pass is consistency with generalized-extreme structure,
    not a proof; diagnostics are always returned.
    """
    d = c.dim
    blocks = choi_blocks(c)
    rank = _numerical_rank(c.matrix)
    rank_ok = rank <= d

    factors = {}
    singulars = {}
    unitary_dev = 0.0
    for k in range(d):
        for l in range(k + 1, d):
            factor, _ = extract_contraction(blocks, k, l)
            factors[(k, l)] = factor
            _, vk = _support_sqrt_pinv(blocks.diag[k])
            _, vl = _support_sqrt_pinv(blocks.diag[l])
            sv = np.linalg.svd(dagger(vk) @ factor @ vl, compute_uv=False)
            singulars[(k, l)] = sv.tolist()
            if sv.size:
                unitary_dev = max(unitary_dev, float(np.abs(sv - 1.0).max()))

    chain_residual = 0.0
    chain_residuals = {}
    for k in range(d):
        for l in range(k + 2, d):
            prod = factors[(k, k + 1)]
            for s in range(k + 1, l):
                prod = prod @ factors[(s, s + 1)]
            _, vk = _support_sqrt_pinv(blocks.diag[k])
            _, vl = _support_sqrt_pinv(blocks.diag[l])
            resid = dagger(vk) @ (factors[(k, l)] - prod) @ vl
            r = float(np.abs(resid).max()) if resid.size else 0.0
            chain_residuals[(k, l)] = r
            chain_residual = max(chain_residual, r)

    is_genext = rank_ok and unitary_dev <= tol and chain_residual <= tol
    return {
        "is_genext": bool(is_genext),
        "rank": rank,
        "rank_ok": bool(rank_ok),
        "unitary_deviation": unitary_dev,
        "chain_residual": chain_residual,
        "singular_values": {f"{k},{l}": v for (k, l), v in singulars.items()},
        "chain_residuals": {f"{k},{l}": v for (k, l), v in chain_residuals.items()},
    }


def blockwise_mixture_residual(c: ChoiState, decomp) -> float:
    """Blockwise max-norm residual of a convex decomposition.

    ``decomp`` is a list of ``(p, ChoiState)`` pairs with probabilities on
    the simplex.  The result is the maximum over blocks of the entrywise
    max norm of ``C_block - sum p C_block``, which equals the global max
    norm of the difference matrix.
    """
    probs = np.array([p for p, _ in decomp], dtype=float)
    if probs.size == 0 or probs.min() < -1e-12 or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("probabilities must lie on the simplex")
    d = c.dim
    target = choi_blocks(c)
    parts = [choi_blocks(ci) for _, ci in decomp]
    worst = 0.0
    for k in range(d):
        mix = sum(p * part.diag[k] for p, part in zip(probs, parts))
        worst = max(worst, float(np.abs(target.diag[k] - mix).max()))
    for key in target.offdiag:
        mix = sum(p * part.offdiag[key] for p, part in zip(probs, parts))
        worst = max(worst, float(np.abs(target.offdiag[key] - mix).max()))
    return worst
