import itertools

import numpy as np
import pytest

from qdchan.linalg import (
    haar_unitary,
    hermitize,
    is_hermitian,
    is_psd,
    is_unitary,
    maximally_entangled_choi,
    partial_trace,
    res,
    trace_distance,
    unres,
    weyl_x,
    weyl_z,
)
from qdchan.qutrit_ref import reference_approx_choi, reference_target_choi


def test_weyl_x_zero_shift_is_identity():
    np.testing.assert_array_equal(weyl_x(3, 0), np.eye(3))


def test_weyl_x_qubit_flip():
    np.testing.assert_array_equal(weyl_x(2, 1), np.array([[0, 1], [1, 0]]))


def test_weyl_x_qutrit_shift_positions():
    x = weyl_x(3, 1)
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 2] = expected[2, 0] = 1
    np.testing.assert_array_equal(x.real, expected)


def test_weyl_z_zero_is_identity():
    np.testing.assert_array_equal(weyl_z(3, 0), np.eye(3))


def test_weyl_z_qubit():
    np.testing.assert_allclose(weyl_z(2, 1), np.diag([1.0, -1.0]), atol=1e-15)


def test_weyl_z_qutrit_clock():
    w = np.exp(2j * np.pi / 3)
    np.testing.assert_allclose(weyl_z(3, 1), np.diag([1, w, w * w]), atol=1e-15)


def test_weyl_index_range():
    with pytest.raises(ValueError):
        weyl_x(3, 3)
    with pytest.raises(ValueError):
        weyl_z(3, -1)


def test_haar_unitarity(rng):
    for n in (1, 2, 3, 7):
        u = haar_unitary(n, rng)
        assert np.abs(u.conj().T @ u - np.eye(n)).max() <= 1e-12


def test_haar_scalar_case(rng):
    u = haar_unitary(1, rng)
    assert abs(abs(u[0, 0]) - 1.0) <= 1e-12


def test_haar_first_entry_moment(rng):
    # Monte-Carlo check of the first-moment isotropy: E|U_00|^2 = 1/n
    n, draws = 3, 10_000
    acc = 0.0
    for _ in range(draws):
        acc += abs(haar_unitary(n, rng)[0, 0]) ** 2
    assert acc / draws == pytest.approx(1.0 / n, rel=0.05)


def test_trace_distance_identity_case(rng):
    c = maximally_entangled_choi(2)
    assert trace_distance(c, c) == 0.0


def test_trace_distance_orthogonal_supports():
    a = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
    b = np.diag([0.0, 1.0, 1.0, 0.0]).astype(complex)
    assert trace_distance(a, b) == pytest.approx(2.0, abs=1e-12)


def test_trace_distance_on_bundled_benchmark_matrices():
    c = reference_target_choi().matrix
    cp = reference_approx_choi().matrix
    assert trace_distance(c, cp) == pytest.approx(0.046, abs=0.005)


def test_trace_distance_rejects_non_hermitian():
    a = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValueError):
        trace_distance(a, np.zeros((2, 2), dtype=complex))


def test_trace_distance_metric_properties(rng):
    def rand_herm(d):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = g @ g.conj().T
        return h / np.trace(h).real

    for _ in range(20):
        a, b, c = (rand_herm(4) for _ in range(3))
        assert trace_distance(a, b) == trace_distance(b, a)
        assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12
        assert trace_distance(a, a) == 0.0


def test_partial_trace_entangled_state():
    np.testing.assert_allclose(
        partial_trace(maximally_entangled_choi(2), 2, "second"), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(
        partial_trace(maximally_entangled_choi(2), 2, "first"), np.eye(2), atol=1e-14)


def test_partial_trace_tensor_product_oracle(rng):
    # partial_trace(A (x) B) must equal A tr(B) / B tr(A)
    for d in (2, 3):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = np.kron(a, b)
        np.testing.assert_allclose(partial_trace(m, d, "first"), b * np.trace(a), atol=1e-12)
        np.testing.assert_allclose(partial_trace(m, d, "second"), a * np.trace(b), atol=1e-12)


def test_partial_trace_shape_guard():
    with pytest.raises(ValueError):
        partial_trace(np.eye(6, dtype=complex), 2, "first")


def test_res_unres_roundtrip(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    np.testing.assert_array_equal(unres(res(a), 3), a)
    # row-major order: first d entries are the first row
    np.testing.assert_array_equal(res(a)[:3], a[0, :])


def test_predicates(rng):
    u = haar_unitary(3, rng)
    assert is_unitary(u)
    assert not is_unitary(u * 1.01)
    h = hermitize(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    assert is_hermitian(h)
    assert is_psd(h @ h)
    assert not is_psd(-(h @ h) - 0.1 * np.eye(3))
