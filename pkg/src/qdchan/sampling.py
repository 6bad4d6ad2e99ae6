"""Randomized execution of a decomposed channel.

Each shot draws one classical dit to select a component, runs that
component's two-qudit circuit on the input state (measuring the ancilla
where the classically controlled swaps require it) and the shot outputs
are averaged.  The average converges to the exact mixture channel at the
usual ``1/sqrt(shots)`` Monte-Carlo rate.
"""

from dataclasses import dataclass, field

import numpy as np

from .ansatz import extreme_kraus
from .channels import DensityMatrix, apply_channel
from .circuits import CLASSICAL_X, CircuitDescription, gate_matrix, synthesize
from .decompose import DecompositionParams
from .linalg import trace_distance

__all__ = [
    "SampleReport",
    "exact_mixture_apply",
    "run_circuit_on_state",
    "sample_channel",
]


@dataclass(frozen=True)
class SampleReport:
    shots: int
    empirical_counts: tuple
    estimated_state: DensityMatrix = field(repr=False)
    exact_state: DensityMatrix = field(repr=False)
    deviation: float

    def __post_init__(self):
        if sum(self.empirical_counts) != self.shots:
            raise ValueError("counts must sum to shots")


def exact_mixture_apply(decomp: DecompositionParams, rho: DensityMatrix) -> DensityMatrix:
    """``sum_i p_i E_i(rho)`` evaluated through the Kraus route."""
    if decomp.dim != rho.dim:
        raise ValueError("dimension mismatch")
    out = np.zeros((rho.dim, rho.dim), dtype=complex)
    for p, comp in zip(decomp.probabilities(), decomp.components):
        out += p * apply_channel(extreme_kraus(comp), rho).matrix
    return DensityMatrix(rho.dim, out)


def _partial_trace_ancilla(state: np.ndarray, d: int) -> np.ndarray:
    return np.einsum("abcb->ac", state.reshape(d, d, d, d))


def run_circuit_on_state(c: CircuitDescription, rho: DensityMatrix,
                         rng: np.random.Generator) -> DensityMatrix:
    """Single randomized execution of a circuit on a state.

    Embeds ``rho (x) |0><0|`` on system+ancilla, applies coherent gates
    in order, and at the first classically controlled gate measures the
    ancilla (Born draw) -- subsequent classically controlled gates fire
    when their dit matches the recorded outcome.  Returns the system
    state of the realized branch.
    """
    d = c.dim
    if rho.dim != d:
        raise ValueError("dimension mismatch")
    state = np.kron(rho.matrix, _ket0_proj(d))
    dit = None
    for g in c.gates:
        if g.kind == CLASSICAL_X:
            if dit is None:
                state, dit = _measure_ancilla(state, d, rng)
            if dit == g.dit:
                swap = gate_matrix(
                    _uncontrolled_swap(g), d)
                state = swap @ state @ swap.conj().T
        else:
            m = gate_matrix(g, d)
            state = m @ state @ m.conj().T
    out = _partial_trace_ancilla(state, d)
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(d, out / np.trace(out).real)


def _ket0_proj(d: int) -> np.ndarray:
    p = np.zeros((d, d), dtype=complex)
    p[0, 0] = 1.0
    return p


def _uncontrolled_swap(g):
    from .circuits import SYSTEM, TWO_LEVEL_SWAP, GateOp

    return GateOp(TWO_LEVEL_SWAP, wire=SYSTEM, levels=g.levels)


def _measure_ancilla(state: np.ndarray, d: int, rng: np.random.Generator):
    t = state.reshape(d, d, d, d)
    probs = np.array([float(np.einsum("aa->", t[:, i, :, i]).real) for i in range(d)])
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    outcome = int(rng.choice(d, p=probs))
    proj = np.zeros((d, d), dtype=complex)
    proj[outcome, outcome] = 1.0
    pi = np.kron(np.eye(d, dtype=complex), proj)
    post = pi @ state @ pi
    return post / np.trace(post).real, outcome


def _branch_table(c: CircuitDescription, rho: DensityMatrix):
    """Outcome probabilities and per-outcome output states of one circuit.

    The coherent prefix is applied once; each ancilla outcome is then
    projected and the remaining gates replayed with that dit.  A shot
    that draws outcome ``i`` produces exactly ``states[i]``, so sampling
    from this table is equivalent to per-shot simulation.
    """
    d = c.dim
    first_cx = next((n for n, g in enumerate(c.gates) if g.kind == CLASSICAL_X), None)
    state = np.kron(rho.matrix, _ket0_proj(d))
    prefix = c.gates if first_cx is None else c.gates[:first_cx]
    for g in prefix:
        m = gate_matrix(g, d)
        state = m @ state @ m.conj().T
    if first_cx is None:
        out = _partial_trace_ancilla(state, d)
        return np.array([1.0]), [DensityMatrix(d, out)]
    t = state.reshape(d, d, d, d)
    probs = np.array([max(float(np.einsum("aa->", t[:, i, :, i]).real), 0.0) for i in range(d)])
    probs = probs / probs.sum()
    states = []
    for i in range(d):
        if probs[i] <= 1e-300:
            states.append(DensityMatrix(d, np.eye(d, dtype=complex) / d))
            continue
        proj = np.zeros((d, d), dtype=complex)
        proj[i, i] = 1.0
        pi = np.kron(np.eye(d, dtype=complex), proj)
        branch = pi @ state @ pi / probs[i]
        for g in c.gates[first_cx:]:
            if g.kind == CLASSICAL_X:
                if g.dit != i:
                    continue
                m = gate_matrix(_uncontrolled_swap(g), d)
            else:
                m = gate_matrix(g, d)
            branch = m @ branch @ m.conj().T
        out = _partial_trace_ancilla(branch, d)
        out = 0.5 * (out + out.conj().T)
        states.append(DensityMatrix(d, out / np.trace(out).real))
    return probs, states


def sample_channel(decomp: DecompositionParams, rho: DensityMatrix, shots: int,
                   rng: np.random.Generator) -> SampleReport:
    """Monte-Carlo estimate of the mixture channel output.

    One classical dit per shot selects the component; the shot then runs
    that component's circuit (ancilla outcome Born-sampled) and the
    outputs are averaged.  Per-component branch tables are precomputed,
    which leaves the per-shot draws distributionally identical to
    gate-by-gate execution.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    d = decomp.dim
    probs = decomp.probabilities()
    tables = [_branch_table(synthesize(comp), rho) for comp in decomp.components]
    picks = rng.choice(len(probs), size=shots, p=probs)
    counts = np.bincount(picks, minlength=len(probs))
    acc = np.zeros((d, d), dtype=complex)
    for t, n in enumerate(counts):
        if n == 0:
            continue
        qs, states = tables[t]
        branch_counts = rng.multinomial(n, qs)
        for q_count, st in zip(branch_counts, states):
            if q_count:
                acc += q_count * st.matrix
    est = DensityMatrix(d, acc / shots)
    exact = exact_mixture_apply(decomp, rho)
    return SampleReport(
        shots=shots,
        empirical_counts=tuple(int(n) for n in counts),
        estimated_state=est,
        exact_state=exact,
        deviation=trace_distance(est.matrix, exact.matrix),
    )
