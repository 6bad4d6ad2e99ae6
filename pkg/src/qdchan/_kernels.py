"""Hot numerical kernels with a numba path and a pure-NumPy fallback.

Everything here works on plain arrays; the dataclass layer in
:mod:`qdchan.ansatz` and :mod:`qdchan.decompose` delegates to these
functions so both backends produce identical numbers (no fastmath, same
operation order).  Backend selection happens once at import time via
:mod:`qdchan._backend`.

Flat parameter layout for a ``n_terms``-component mixture on dimension
``d`` with ``kappa`` unitary factors per component::

    x = [logits (n_terms)] ++ n_terms * [mux (d^2-d) | prior | posterior]

where prior holds ``ceil(kappa/2)`` and posterior ``floor(kappa/2)``
blocks of ``d^2 - 1`` reals each.
"""

import numpy as np

from ._backend import USE_NUMBA


def _su_from_params(d, block):
    """SU(d) from d^2-1 reals: two-level rotations with phases, then diagonal."""
    u = np.eye(d, dtype=np.complex128)
    idx = 0
    for j in range(1, d):
        for k in range(j):
            theta = block[idx]
            phi = block[idx + 1]
            idx += 2
            c = np.cos(theta)
            s = np.sin(theta)
            ep = np.cos(phi) + 1j * np.sin(phi)
            for col in range(d):
                rk = u[k, col]
                rj = u[j, col]
                u[k, col] = c * rk - s * ep * rj
                u[j, col] = s * np.conj(ep) * rk + c * rj
    total = 0.0
    for m in range(d - 1):
        ph = block[idx + m]
        total += ph
        f = np.cos(ph) + 1j * np.sin(ph)
        for col in range(d):
            u[m, col] = f * u[m, col]
    f = np.cos(-total) + 1j * np.sin(-total)
    for col in range(d):
        u[d - 1, col] = f * u[d - 1, col]
    return u


def _branch_amps(d, mux):
    """Amplitude table u[i, l]; mux rows are (alpha, beta) in canonical order."""
    u = np.zeros((d, d))
    base = (d - 1) * d // 2
    for ell in range(d):
        col = np.zeros(d)
        col[0] = 1.0
        for j in range(1, d):
            group = base - j * (j + 1) // 2
            for k in range(j):
                if ell == j:
                    th = mux[group + (j - 1 - k), 0]
                elif ell == k:
                    th = mux[group + (j - 1 - k), 1]
                else:
                    continue
                c = np.cos(th)
                s = np.sin(th)
                cj = col[j]
                ck = col[k]
                col[j] = c * cj - s * ck
                col[k] = s * cj + c * ck
        for i in range(d):
            u[i, ell] = col[i]
    return u


def _bare_choi(d, u):
    """Sparse Choi of the shift-diagonal channel given its amplitude table."""
    c = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for ell in range(d):
            r = ell * d + (ell + i) % d
            ul = u[i, (ell + i) % d]
            for k in range(d):
                cc = k * d + (k + i) % d
                c[r, cc] += ul * u[i, (k + i) % d]
    return c


def _conjugate_choi(d, core, w, v):
    """(W (x) V^T) core (W (x) V^T)^dag without forming np.kron."""
    g = np.zeros((d * d, d * d), dtype=np.complex128)
    vt = v.T.copy()
    for a in range(d):
        for b in range(d):
            g[a * d:(a + 1) * d, b * d:(b + 1) * d] = w[a, b] * vt
    return g @ core @ g.conj().T


def _merged_unitary_flat(d, blocks):
    """Product of SU(d) factors; blocks[0] acts first."""
    u = np.eye(d, dtype=np.complex128)
    for r in range(blocks.shape[0]):
        u = _su_from_params(d, blocks[r]) @ u
    return u


def _component_choi(d, mux, prior, posterior):
    u = _branch_amps(d, mux)
    core = _bare_choi(d, u)
    v = _merged_unitary_flat(d, prior)
    w = _merged_unitary_flat(d, posterior)
    return _conjugate_choi(d, core, w, v)


def _softmax(logits):
    m = logits[0]
    for i in range(1, logits.shape[0]):
        if logits[i] > m:
            m = logits[i]
    e = np.exp(logits - m)
    return e / e.sum()


def _mixture_choi_flat(x, d, kap, n_terms):
    n_prior = (kap + 1) // 2
    n_post = kap // 2
    n_mux = d * d - d
    n_block = d * d - 1
    per_comp = n_mux + (n_prior + n_post) * n_block
    p = _softmax(x[:n_terms])
    acc = np.zeros((d * d, d * d), dtype=np.complex128)
    off = n_terms
    for t in range(n_terms):
        mux = x[off:off + n_mux].copy().reshape(n_mux // 2, 2)
        prior = x[off + n_mux:off + n_mux + n_prior * n_block].copy().reshape(n_prior, n_block)
        posterior = x[off + n_mux + n_prior * n_block:off + per_comp].copy().reshape(n_post, n_block)
        acc += p[t] * _component_choi(d, mux, prior, posterior)
        off += per_comp
    return acc


def _trace_distance_h(a, b):
    diff = a - b
    h = 0.5 * (diff + diff.conj().T)
    ev = np.linalg.eigvalsh(h)
    return 0.5 * np.abs(ev).sum()


def _objective_flat(target, x, d, kap, n_terms):
    return _trace_distance_h(_mixture_choi_flat(x, d, kap, n_terms), target)


if USE_NUMBA:
    from numba import njit

    _jit = njit(cache=True)
    # rebind in dependency order so jitted callers resolve jitted callees
    _su_from_params = _jit(_su_from_params)
    _branch_amps = _jit(_branch_amps)
    _bare_choi = _jit(_bare_choi)
    _conjugate_choi = _jit(_conjugate_choi)
    _merged_unitary_flat = _jit(_merged_unitary_flat)
    _component_choi = _jit(_component_choi)
    _softmax = _jit(_softmax)
    _mixture_choi_flat = _jit(_mixture_choi_flat)
    _trace_distance_h = _jit(_trace_distance_h)
    _objective_flat = _jit(_objective_flat)

su_from_params = _su_from_params
branch_amps = _branch_amps
bare_choi = _bare_choi
conjugate_choi = _conjugate_choi
merged_unitary_flat = _merged_unitary_flat
component_choi = _component_choi
softmax = _softmax
mixture_choi_flat = _mixture_choi_flat
trace_distance_h = _trace_distance_h
objective_flat = _objective_flat
