"""Digital beamforming robust to unknown time-varying carrier frequency offset.

Synthesizes array snapshot data under drifting carriers, solves the lifted
atomic-norm problems by a structured ADMM route and a fast accelerated
dual-ascent route (plus a joint frequency-angle variant), extracts carriers
from dual polynomials, and builds interference-nulling weight vectors
compared against classical sample-matrix-inversion beamforming.
"""

from .anm1d import AdmmParams, Sdp1dSolution, dual_feasibility_check, solve_sdp_1d
from .anm2d import Sdp2dSolution, atomic_decomposition_cost, dual_polynomial_2d, solve_sdp_2d
from .array_model import (ArrayConfig, OffsetTrajectory, SourceSpec,
                          build_data_matrix, make_offset, steering_vector,
                          synthesize_source)
from .beamform import (BeamformResult, DuplicateFrequencyError, ThresholdError,
                       cluster_frequencies, dual_polynomial_1d, estimate_sign_alpha1,
                       radiation_pattern, reconstruct_s1, smi_baseline_weights,
                       smi_weights)
from .dpss import DpssBasis, dpss_basis, residual_projection
from .ivdst import IvdstParams, IvdstResult, IvdstState, ivdst_init, ivdst_iterate, ivdst_solve
from .kernels import BACKEND as KERNEL_BACKEND
from .pipeline import run_anm1d, run_anm2d, run_ivdst
from .scenarios import Scenario, list_presets, parse_config, preset_config
from .tensor_ops import (ModelMismatchError, apply_L, apply_L_adjoint,
                         block_toeplitz, khatri_rao_reshaped, lift_exact,
                         toeplitz_hermitian)

__version__ = "0.1.0"

__all__ = [
    "AdmmParams", "ArrayConfig", "BeamformResult", "DpssBasis",
    "DuplicateFrequencyError", "IvdstParams", "IvdstResult", "IvdstState",
    "KERNEL_BACKEND", "ModelMismatchError", "OffsetTrajectory", "Scenario",
    "Sdp1dSolution", "Sdp2dSolution", "SourceSpec", "ThresholdError",
    "apply_L", "apply_L_adjoint", "atomic_decomposition_cost", "block_toeplitz",
    "build_data_matrix", "cluster_frequencies", "dpss_basis",
    "dual_feasibility_check", "dual_polynomial_1d", "dual_polynomial_2d",
    "estimate_sign_alpha1", "ivdst_init", "ivdst_iterate", "ivdst_solve",
    "khatri_rao_reshaped", "lift_exact", "list_presets", "make_offset",
    "parse_config", "preset_config", "radiation_pattern", "reconstruct_s1",
    "residual_projection", "run_anm1d", "run_anm2d", "run_ivdst",
    "smi_baseline_weights", "smi_weights", "solve_sdp_1d", "solve_sdp_2d",
    "steering_vector", "synthesize_source", "toeplitz_hermitian",
]
