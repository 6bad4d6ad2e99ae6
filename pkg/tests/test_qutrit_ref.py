import numpy as np
import pytest

from qdchan.channels import kraus_to_choi
from qdchan.linalg import trace_distance
from qdchan.qutrit_ref import (
    QutritRefParams,
    REFERENCE_COMPONENT_SPECTRA,
    REFERENCE_MIXTURE_SPECTRUM,
    REFERENCE_TRACE_DISTANCE,
    qutrit_reference_f_ops,
    qutrit_reference_kraus,
    reference_approx_choi,
    reference_components,
    reference_mixture_choi,
    reference_probabilities,
    reference_target_choi,
    su3_unitary,
)


def test_su3_is_special_unitary(rng):
    for _ in range(20):
        block = np.concatenate([rng.uniform(0, np.pi / 2, 3), rng.uniform(0, 2 * np.pi, 5)])
        u = su3_unitary(block)
        assert np.abs(u.conj().T @ u - np.eye(3)).max() <= 1e-12
        assert abs(np.linalg.det(u) - 1.0) <= 1e-12


def test_zero_angles_give_identity_channel():
    q = QutritRefParams(0, 0, 0, 0, 0, 0,
                        r1=(0,) * 8, r2=(0,) * 8, r3=(0,) * 8)
    f = qutrit_reference_f_ops(q)
    np.testing.assert_allclose(f[0], np.eye(3), atol=1e-15)
    assert np.abs(f[1]).max() == 0.0
    assert np.abs(f[2]).max() == 0.0


def test_f_ops_normalization_identity(rng):
    # the closed trig form satisfies sum F^dag F = 1 for any angles
    for _ in range(25):
        a, b, c, d, e, f = rng.uniform(0, 2 * np.pi, 6)
        q = QutritRefParams(a, b, c, d, e, f, r1=(0,) * 8, r2=(0,) * 8, r3=(0,) * 8)
        ops = qutrit_reference_f_ops(q)
        acc = sum(op.conj().T @ op for op in ops)
        assert np.abs(acc - np.eye(3)).max() <= 1e-12


def test_angle_range_guards():
    with pytest.raises(ValueError):
        QutritRefParams(-0.1, 0, 0, 0, 0, 0, r1=(0,) * 8, r2=(0,) * 8, r3=(0,) * 8)
    with pytest.raises(ValueError):
        QutritRefParams(0, 0, 0, 0, 0, 0, r1=(2.0,) + (0,) * 7, r2=(0,) * 8, r3=(0,) * 8)


def test_component_spectra_match_bundled_values():
    for q, expected in zip(reference_components(), REFERENCE_COMPONENT_SPECTRA):
        core = np.zeros((9, 9), dtype=complex)
        for op in qutrit_reference_f_ops(q):
            v = op.reshape(-1)
            core += np.outer(v, v.conj())
        ev = np.sort(np.linalg.eigvalsh(core))[-3:]
        np.testing.assert_allclose(ev, np.sort(expected), atol=1e-3)


def test_reference_kraus_channels_are_cptp():
    for q in reference_components():
        qutrit_reference_kraus(q).validate()


def test_mixture_spectrum_matches_bundled_values():
    ev = np.linalg.eigvalsh(reference_mixture_choi().matrix)
    np.testing.assert_allclose(np.sort(ev), np.sort(REFERENCE_MIXTURE_SPECTRUM), atol=5e-3)


def test_mixture_trace():
    assert np.trace(reference_mixture_choi().matrix).real == pytest.approx(3.0, abs=1e-6)


def test_mixture_against_bundled_target():
    dt = trace_distance(reference_target_choi().matrix, reference_mixture_choi().matrix)
    assert dt == pytest.approx(REFERENCE_TRACE_DISTANCE, abs=5e-3)


def test_mixture_reproduces_printed_approximant_entrywise():
    # conventions line up exactly: agreement to table rounding
    diff = np.abs(reference_mixture_choi().matrix - reference_approx_choi().matrix)
    assert diff.max() <= 1.5e-4


def test_probabilities_on_simplex():
    p = reference_probabilities()
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert (p > 0).all()


def test_component_choi_spectrum_survives_rotations():
    # rotations conjugate the Choi matrix, so the mixture eigenvalue check
    # inherits the bared spectra: verify on component 0
    q = reference_components()[0]
    full = kraus_to_choi(qutrit_reference_kraus(q)).matrix
    core = np.zeros((9, 9), dtype=complex)
    for op in qutrit_reference_f_ops(q):
        v = op.reshape(-1)
        core += np.outer(v, v.conj())
    np.testing.assert_allclose(
        np.linalg.eigvalsh(full), np.linalg.eigvalsh(core), atol=1e-12)
