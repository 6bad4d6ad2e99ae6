"""Explicit qutrit reference parameterisation and bundled benchmark data.

This module carries an alternative, fully explicit parameterisation of
rank-3 generalized extreme qutrit channels: three shift-diagonal Kraus
factors ``F_0, F_1, F_2`` written in closed trigonometric form, composed
with explicit SU(3) rotations (two initial, ``R3`` then ``R2``, and one
final, ``R1``).  It exists alongside the general ansatz solely to
reproduce a published qutrit decomposition benchmark digit for digit;
the bundled constants below (component parameters, mixture weights,
target and approximant Choi matrices, spectra) are that benchmark.
"""

from dataclasses import dataclass

import numpy as np

from .channels import ChoiState, KrausChannel, kraus_to_choi

__all__ = [
    "QutritRefParams",
    "su3_unitary",
    "qutrit_reference_kraus",
    "qutrit_reference_f_ops",
    "reference_components",
    "reference_probabilities",
    "reference_mixture_choi",
    "reference_target_choi",
    "reference_approx_choi",
    "REFERENCE_COMPONENT_SPECTRA",
    "REFERENCE_MIXTURE_SPECTRUM",
    "REFERENCE_TRACE_DISTANCE",
]


@dataclass(frozen=True)
class QutritRefParams:
    """Angles of the explicit qutrit parameterisation.

    ``a..f`` lie in ``[0, 2 pi]``; each SU(3) rotation has three Euler
    angles in ``[0, pi/2]`` and five phases in ``[0, 2 pi]``.
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    r1: tuple  # (theta1..theta3, phi1..phi5)
    r2: tuple
    r3: tuple

    def __post_init__(self):
        for name in "abcdef":
            val = getattr(self, name)
            if not 0.0 <= val <= 2 * np.pi + 1e-12:
                raise ValueError(f"angle {name}={val} outside [0, 2 pi]")
        for rname in ("r1", "r2", "r3"):
            block = getattr(self, rname)
            if len(block) != 8:
                raise ValueError(f"{rname} needs 3 Euler angles + 5 phases")
            for theta in block[:3]:
                if not 0.0 <= theta <= np.pi / 2 + 1e-12:
                    raise ValueError(f"{rname} Euler angle {theta} outside [0, pi/2]")
            for phi in block[3:]:
                if not 0.0 <= phi <= 2 * np.pi + 1e-12:
                    raise ValueError(f"{rname} phase {phi} outside [0, 2 pi]")


def su3_unitary(block) -> np.ndarray:
    """Explicit SU(3) matrix from three Euler angles and five phases."""
    t1, t2, t3, p1, p2, p3, p4, p5 = block
    c1, c2, c3 = np.cos((t1, t2, t3))
    s1, s2, s3 = np.sin((t1, t2, t3))

    def e(x):
        return np.exp(1j * x)

    return np.array([
        [e(p1) * c1 * c2, e(p3) * s1, e(p4) * c1 * s2],
        [e(-p4 - p5) * s2 * s3 - e(p1 + p2 - p3) * s1 * c2 * c3,
         e(p2) * c1 * c3,
         -e(-p1 - p5) * c2 * s3 - e(p2 - p3 + p4) * s1 * s2 * c3],
        [-e(-p2 - p4) * s2 * c3 - e(p1 - p3 + p5) * s1 * c2 * s3,
         e(p5) * c1 * s3,
         e(-p1 - p2) * c2 * c3 - e(-p3 + p4 + p5) * s1 * s2 * s3],
    ])


def qutrit_reference_f_ops(q: QutritRefParams) -> list:
    """The three closed-form shift-diagonal Kraus factors."""
    a, b, c, d, e, f = q.a, q.b, q.c, q.d, q.e, q.f
    f0 = np.diag([np.cos(a) * np.cos(c), np.cos(b), np.cos(d)]).astype(complex)
    f1 = np.array([
        [0.0, np.sin(b) * np.cos(e), 0.0],
        [0.0, 0.0, -np.sin(d) * np.sin(f)],
        [np.sin(a), 0.0, 0.0],
    ], dtype=complex)
    f2 = np.array([
        [0.0, 0.0, np.sin(d) * np.cos(f)],
        [np.cos(a) * np.sin(c), 0.0, 0.0],
        [0.0, np.sin(b) * np.sin(e), 0.0],
    ], dtype=complex)
    return [f0, f1, f2]


def qutrit_reference_kraus(q: QutritRefParams) -> KrausChannel:
    """Kraus operators ``K_i = R1 F_i (R2 R3)``."""
    r1 = su3_unitary(q.r1)
    v = su3_unitary(q.r2) @ su3_unitary(q.r3)
    ops = tuple(r1 @ f @ v for f in qutrit_reference_f_ops(q))
    return KrausChannel(3, ops).validate()


# Benchmark component parameters: three channels plus mixture weights.
_COMPONENTS = (
    dict(
        a=2.1417, b=4.8284, c=2.3434, d=4.0164, e=2.7418, f=3.1900,
        r1=(1.2344, 1.2781, 0.6618, 1.1865, 4.1535, 1.6894, 0.8490, 4.7523),
        r2=(0.2292, 0.6352, 0.4768, 4.0185, 3.3050, 5.0089, 2.1711, 3.6288),
        r3=(0.9562, 0.1978, 0.5194, 2.6995, 5.1831, 2.1618, 3.9187, 1.2381),
    ),
    dict(
        a=2.3442, b=1.8620, c=4.7272, d=2.2822, e=4.0726, f=4.8792,
        r1=(0.6197, 1.1258, 0.9545, 4.0777, 1.8561, 3.6516, 4.9058, 2.2728),
        r2=(0.3668, 0.4069, 0.0651, 1.8266, 4.9335, 2.8210, 2.1526, 3.1790),
        r3=(1.1377, 1.1456, 1.4608, 3.9186, 2.3296, 4.3385, 5.4539, 3.1468),
    ),
    dict(
        a=2.0610, b=3.9621, c=1.6220, d=1.0321, e=2.5719, f=5.2118,
        r1=(0.3082, 0.6092, 1.4406, 4.9068, 5.4269, 2.6902, 2.8977, 0.6585),
        r2=(1.1345, 0.5117, 0.6749, 4.7498, 3.1036, 5.3635, 4.5586, 3.6124),
        r3=(0.3574, 1.1794, 0.3582, 2.1275, 2.5366, 5.1105, 3.3091, 2.2142),
    ),
)

_PROBS = (0.2974, 0.3676, 0.3350)

# Nonzero Choi spectrum of each component with the rotations stripped.
REFERENCE_COMPONENT_SPECTRA = (
    (0.5667, 0.8868, 1.5465),
    (0.5088, 1.0942, 1.3970),
    (0.5457, 0.7287, 1.7256),
)

REFERENCE_MIXTURE_SPECTRUM = (
    0.0039, 0.0280, 0.0797, 0.1264, 0.2473, 0.4395, 0.5825, 0.6515, 0.8413,
)

# Trace distance between the benchmark target and its printed approximant.
REFERENCE_TRACE_DISTANCE = 0.046


def reference_components() -> tuple:
    """The three benchmark parameter sets."""
    return tuple(QutritRefParams(**kw) for kw in _COMPONENTS)


def reference_probabilities() -> np.ndarray:
    return np.array(_PROBS)


def reference_mixture_choi() -> ChoiState:
    """Convex mixture of the three benchmark component Choi matrices."""
    acc = np.zeros((9, 9), dtype=complex)
    for p, q in zip(_PROBS, reference_components()):
        acc += p * kraus_to_choi(qutrit_reference_kraus(q)).matrix
    return ChoiState(3, acc)


def _hermitian_from_rows(rows) -> np.ndarray:
    m = np.array(rows, dtype=complex)
    return m


def reference_target_choi() -> ChoiState:
    """The 9x9 benchmark target Choi matrix (printed to 4 decimals)."""
    return ChoiState(3, _hermitian_from_rows(_TARGET_ROWS))


def reference_approx_choi() -> ChoiState:
    """The printed 9x9 approximant reached by the benchmark decomposition."""
    return ChoiState(3, _hermitian_from_rows(_APPROX_ROWS))


_TARGET_ROWS = [
    [0.3105, 0.1052 + 0.0154j, 0.0394 - 0.0099j, 0.0554 + 0.0013j, -0.0892 - 0.0667j,
     0.0185 + 0.0149j, -0.0070 + 0.0066j, -0.1068 + 0.1226j, 0.1131 + 0.0192j],
    [0.1052 - 0.0154j, 0.2526, -0.0174 + 0.0148j, 0.0715 - 0.0388j, -0.0307 - 0.0814j,
     -0.1021 + 0.0296j, -0.0250 + 0.0841j, 0.0778 - 0.0614j, -0.0717 + 0.0218j],
    [0.0394 + 0.0099j, -0.0174 - 0.0148j, 0.2473, 0.0302 + 0.0637j, 0.0600 + 0.0425j,
     0.0800 + 0.1476j, -0.0986 + 0.0101j, 0.0475 - 0.0007j, -0.0440 + 0.0073j],
    [0.0554 - 0.0013j, 0.0715 + 0.0388j, 0.0302 - 0.0637j, 0.2891, -0.0066 - 0.0301j,
     -0.0147 + 0.0141j, -0.0501 - 0.0559j, 0.1728 - 0.0571j, 0.1132 + 0.0481j],
    [-0.0892 + 0.0667j, -0.0307 + 0.0814j, 0.0600 - 0.0425j, -0.0066 + 0.0301j, 0.2667,
     0.0816 + 0.0849j, -0.0968 + 0.1558j, 0.0234 - 0.0100j, -0.0568 - 0.0703j],
    [0.0185 - 0.0149j, -0.1021 - 0.0296j, 0.0800 - 0.1476j, -0.0147 - 0.0141j, 0.0816 - 0.0849j,
     0.3716, 0.0306 + 0.1539j, -0.1073 - 0.0026j, 0.0882 + 0.0653j],
    [-0.0070 - 0.0066j, -0.0250 - 0.0841j, -0.0986 - 0.0101j, -0.0501 + 0.0559j, -0.0968 - 0.1558j,
     0.0306 - 0.1539j, 0.4004, -0.0986 + 0.0147j, -0.0247 - 0.0042j],
    [-0.1068 - 0.1226j, 0.0778 + 0.0614j, 0.0475 + 0.0007j, 0.1728 + 0.0571j, 0.0234 + 0.0100j,
     -0.1073 + 0.0026j, -0.0986 - 0.0147j, 0.4807, -0.0641 - 0.0998j],
    [0.1131 - 0.0192j, -0.0717 - 0.0218j, -0.0440 - 0.0073j, 0.1132 - 0.0481j, -0.0568 + 0.0703j,
     0.0882 - 0.0653j, -0.0247 + 0.0042j, -0.0641 + 0.0998j, 0.3811],
]

_APPROX_ROWS = [
    [0.3103, 0.1082 + 0.0119j, 0.0386 - 0.0089j, 0.0559 + 0.0007j, -0.0859 - 0.0676j,
     0.0207 + 0.0164j, -0.0090 + 0.0044j, -0.1058 + 0.1225j, 0.1126 + 0.0218j],
    [0.1082 - 0.0119j, 0.2522, -0.0243 + 0.0256j, 0.0726 - 0.0333j, -0.0393 - 0.0777j,
     -0.0922 + 0.0272j, -0.0260 + 0.0903j, 0.0797 - 0.0632j, -0.0676 + 0.0221j],
    [0.0386 + 0.0089j, -0.0243 - 0.0256j, 0.2520, 0.0309 + 0.0603j, 0.0645 + 0.0313j,
     0.0765 + 0.1407j, -0.1034 + 0.0120j, 0.0461 + 0.0006j, -0.0414 + 0.0107j],
    [0.0559 - 0.0007j, 0.0726 + 0.0333j, 0.0309 - 0.0603j, 0.2951, -0.0095 - 0.0290j,
     -0.0133 + 0.0100j, -0.0521 - 0.0552j, 0.1708 - 0.0550j, 0.1136 + 0.0481j],
    [-0.0859 + 0.0676j, -0.0393 + 0.0777j, 0.0645 - 0.0313j, -0.0095 + 0.0290j, 0.2677,
     0.0871 + 0.0753j, -0.0975 + 0.1628j, 0.0246 - 0.0135j, -0.0505 - 0.0714j],
    [0.0207 - 0.0164j, -0.0922 - 0.0272j, 0.0765 - 0.1407j, -0.0133 - 0.0100j, 0.0871 - 0.0753j,
     0.3731, 0.0329 + 0.1523j, -0.1037 - 0.0034j, 0.0828 + 0.0638j],
    [-0.0090 - 0.0044j, -0.0260 - 0.0903j, -0.1034 - 0.0120j, -0.0521 + 0.0552j, -0.0975 - 0.1628j,
     0.0329 - 0.1523j, 0.3946, -0.0987 + 0.0171j, -0.0253 - 0.0012j],
    [-0.1058 - 0.1225j, 0.0797 + 0.0632j, 0.0461 - 0.0006j, 0.1708 + 0.0550j, 0.0246 + 0.0135j,
     -0.1037 + 0.0034j, -0.0987 - 0.0171j, 0.4802, -0.0628 - 0.1009j],
    [0.1126 - 0.0218j, -0.0676 - 0.0221j, -0.0414 - 0.0107j, 0.1136 - 0.0481j, -0.0505 + 0.0714j,
     0.0828 - 0.0638j, -0.0253 + 0.0012j, -0.0628 + 0.1009j, 0.3749],
]
