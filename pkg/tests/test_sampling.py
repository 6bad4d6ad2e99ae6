import numpy as np
import pytest

from conftest import random_density, random_pure
from qdchan.ansatz import random_extreme_params
from qdchan.channels import apply_channel, choi_to_kraus
from qdchan.circuits import synthesize
from qdchan.decompose import DecompositionParams, mixture_choi
from qdchan.linalg import trace_distance
from qdchan.sampling import (
    _branch_table,
    exact_mixture_apply,
    run_circuit_on_state,
    sample_channel,
)


def random_decomposition(d, rng, spread=1.0):
    comps = tuple(random_extreme_params(d, rng) for _ in range(d))
    return DecompositionParams(d, spread * rng.standard_normal(d), comps)


def test_exact_mixture_identity_components(rng):
    from test_decompose import identity_components

    p = DecompositionParams(2, np.zeros(2), identity_components(2, 2))
    rho = random_density(2, rng)
    out = exact_mixture_apply(p, rho)
    np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-13)


def test_exact_mixture_unit_trace(rng):
    p = random_decomposition(3, rng)
    out = exact_mixture_apply(p, random_density(3, rng))
    assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_exact_mixture_matches_choi_route(rng):
    # route equivalence: mixture Kraus application == Kraus of mixture Choi
    p = random_decomposition(2, rng)
    rho = random_density(2, rng)
    direct = exact_mixture_apply(p, rho)
    via_choi = apply_channel(choi_to_kraus(mixture_choi(p)), rho)
    assert trace_distance(direct.matrix, via_choi.matrix) <= 1e-9


def test_run_identity_circuit(rng):
    from test_circuits import identity_extreme_params

    circ = synthesize(identity_extreme_params(2))
    rho = random_density(2, rng)
    out = run_circuit_on_state(circ, rho, rng)
    np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)


def test_single_run_is_valid_state(rng):
    for d in (2, 3):
        circ = synthesize(random_extreme_params(d, rng))
        out = run_circuit_on_state(circ, random_density(d, rng), rng)
        out.validate(atol=1e-10)


def test_run_average_converges_to_channel(rng):
    from qdchan.ansatz import extreme_kraus

    p = random_extreme_params(2, rng)
    circ = synthesize(p)
    rho = random_pure(2, rng)
    exact = apply_channel(extreme_kraus(p), rho)
    acc = np.zeros((2, 2), dtype=complex)
    runs = 10_000
    for _ in range(runs):
        acc += run_circuit_on_state(circ, rho, rng).matrix
    assert trace_distance(acc / runs, exact.matrix) <= 0.05


def test_branch_table_matches_gate_by_gate(rng):
    # the fast path must produce exactly the same branch states the
    # per-shot simulation reaches
    p = random_extreme_params(3, rng)
    circ = synthesize(p)
    rho = random_density(3, rng)
    probs, states = _branch_table(circ, rho)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    seen = {}
    for _ in range(200):
        out = run_circuit_on_state(circ, rho, rng)
        key = min(range(len(states)),
                  key=lambda i: np.abs(states[i].matrix - out.matrix).max())
        err = np.abs(states[key].matrix - out.matrix).max()
        assert err <= 1e-10
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) >= 2  # several branches actually realized


def test_sample_counts_and_shapes(rng):
    p = random_decomposition(2, rng)
    report = sample_channel(p, random_density(2, rng), 500, rng)
    assert sum(report.empirical_counts) == 500
    report.estimated_state.validate(atol=1e-8)
    assert report.deviation >= 0.0


def test_sample_deviation_bound(rng):
    p = random_decomposition(2, rng)
    report = sample_channel(p, random_density(2, rng), 10_000, rng)
    assert report.deviation <= 5.0 / np.sqrt(10_000)


def test_sample_degenerate_distribution(rng):
    comps = tuple(random_extreme_params(2, rng) for _ in range(2))
    p = DecompositionParams(2, np.array([40.0, -40.0]), comps)
    report = sample_channel(p, random_density(2, rng), 1000, rng)
    assert report.empirical_counts == (1000, 0)


def test_sample_single_shot(rng):
    p = random_decomposition(2, rng)
    report = sample_channel(p, random_density(2, rng), 1, rng)
    report.estimated_state.validate(atol=1e-10)


def test_deviation_shrinks_with_shots():
    wins = 0
    for seed in range(20):
        rng1 = np.random.default_rng(1000 + seed)
        p = random_decomposition(2, rng1)
        rho = random_density(2, rng1)
        lo = sample_channel(p, rho, 1000, np.random.default_rng(seed)).deviation
        hi = sample_channel(p, rho, 100_000, np.random.default_rng(seed)).deviation
        wins += hi < lo
    assert wins >= 19


def test_sample_reproducible(rng):
    p = random_decomposition(2, rng)
    rho = random_density(2, rng)
    r1 = sample_channel(p, rho, 2000, np.random.default_rng(5))
    r2 = sample_channel(p, rho, 2000, np.random.default_rng(5))
    assert r1.empirical_counts == r2.empirical_counts
    assert r1.deviation == r2.deviation


def test_sample_shot_guard(rng):
    p = random_decomposition(2, rng)
    with pytest.raises(ValueError):
        sample_channel(p, random_density(2, rng), 0, rng)
