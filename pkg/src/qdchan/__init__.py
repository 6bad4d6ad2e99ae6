"""qdchan: decompose qudit channels into mixtures of generalized extreme channels.

The pipeline: represent a channel (Kraus or Choi form), approximate its
Choi matrix by a convex mixture of ``d`` generalized extreme channels via
multistart simplex descent, synthesize a two-qudit circuit per component,
and verify or Monte-Carlo-sample the result.
"""

from ._backend import USE_NUMBA, backend_name
from .ansatz import (
    ExtremeParams,
    b_tensor,
    check_extremality,
    extreme_choi,
    extreme_kraus,
    kappa,
    parameter_count,
    random_extreme_params,
    unitary_from_params,
)
from .blocks import (
    ChoiBlocks,
    blockwise_mixture_residual,
    certify_generalized_extreme,
    choi_blocks,
    extract_contraction,
)
from .channels import (
    ChoiState,
    DensityMatrix,
    KrausChannel,
    ValidationError,
    apply_channel,
    choi_to_kraus,
    kraus_to_choi,
    random_channel,
)
from .circuits import (
    CircuitDescription,
    GateOp,
    circuit_unitary,
    cost_estimate,
    gate_counts,
    synthesize,
    unitary_diamond_bound,
)
from .decompose import (
    DecompositionParams,
    DecompositionResult,
    OptimizerConfig,
    decompose_report,
    mixture_choi,
    objective,
    optimize,
)
from .linalg import haar_unitary, partial_trace, trace_distance, weyl_x, weyl_z
from .sampling import SampleReport, exact_mixture_apply, run_circuit_on_state, sample_channel

__version__ = "0.1.0"
