"""Two-mode Gaussian entanglement through fluctuating-loss channels.

The package propagates bipartite Gaussian states through channels whose
intensity transmittances (T_a, T_b) fluctuate shot to shot, and certifies
entanglement of the output via the partial-transposition determinant
witness.  The witness of the faded state is evaluated two ways — a direct
4×4 determinant after explicitly applying the channel, and a closed-form
expansion in the transmittance moments — and the two must agree to within
floating-point accumulation error.

Layout:

- :mod:`gaussfade.states` — moment matrices, standard state families,
  partial transposition, the direct witness.
- :mod:`gaussfade.blockdet` — 2×2-block determinant calculus used by the
  closed-form expansion.
- :mod:`gaussfade.channels` — transmittance-distribution models, their
  moments, the adaptive correlation protocol, and channel application.
- :mod:`gaussfade.witness` — the moment-expansion witness and its
  correlated-channel specializations.
- :mod:`gaussfade.experiments` — deterministic sweep/contour/region-map
  drivers with certified boundary refinement.
- :mod:`gaussfade.cli` — the ``gaussfade`` command.

The witness kernel runs on a compiled extension when available; set
``GAUSSFADE_FORCE_FALLBACK=1`` to force the pure-Python path.  The active
choice is exported as :data:`gaussfade.KERNEL_BACKEND`.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from ._kernels import available_backends
from .blockdet import BlockMatrix2x2, adjugate, det2, det2_sum, det4_block, expand_full, perp
from .channels import (
    BetaMarginal,
    ChannelMoments,
    CorrelatedMinPdt,
    DeterministicPdt,
    EmpiricalPdt,
    FixedMarginal,
    IndependentProductPdt,
    LogNormalMarginal,
    MomentsPdt,
    PdtModel,
    UniformMarginal,
    adaptive_correlate,
    apply_channel,
    beta_pdt,
    correlation_coefficients,
    empirical_from_csv,
    empirical_standard_errors,
    lognormal_pdt,
    moments_from_dict,
    moments_from_pdt,
    moments_to_dict,
    pdt_from_dict,
    pdt_to_dict,
    sample_pdt,
)
from .errors import ChannelError, ConfigError, DomainError, GaussfadeError, MisuseError
from .experiments import (
    SweepResult,
    displacement_contour,
    identity_suite,
    phase_region_map,
    squeezing_sweep,
)
from .states import (
    GaussianState,
    PtMatrix,
    WitnessValue,
    asymmetric_tmsv,
    displace,
    duan_matrix,
    partial_transpose,
    simon_witness_direct,
    state_from_dict,
    state_to_dict,
    thermal_state,
    tmsv_state,
)
from .witness import (
    WitnessReport,
    cross_check_direct,
    duan_witness_correlated,
    verdict,
    witness_correlated,
    witness_expansion,
    witness_uncorrelated_zero_mean,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    "available_backends",
    # errors
    "GaussfadeError",
    "DomainError",
    "ChannelError",
    "MisuseError",
    "ConfigError",
    # block-determinant calculus
    "det2",
    "adjugate",
    "det2_sum",
    "det4_block",
    "perp",
    "expand_full",
    "BlockMatrix2x2",
    # states
    "GaussianState",
    "PtMatrix",
    "WitnessValue",
    "tmsv_state",
    "asymmetric_tmsv",
    "thermal_state",
    "displace",
    "partial_transpose",
    "simon_witness_direct",
    "duan_matrix",
    "state_to_dict",
    "state_from_dict",
    # channels
    "ChannelMoments",
    "correlation_coefficients",
    "PdtModel",
    "DeterministicPdt",
    "MomentsPdt",
    "IndependentProductPdt",
    "EmpiricalPdt",
    "CorrelatedMinPdt",
    "UniformMarginal",
    "BetaMarginal",
    "LogNormalMarginal",
    "FixedMarginal",
    "lognormal_pdt",
    "beta_pdt",
    "moments_from_pdt",
    "empirical_standard_errors",
    "adaptive_correlate",
    "sample_pdt",
    "empirical_from_csv",
    "apply_channel",
    "moments_to_dict",
    "moments_from_dict",
    "pdt_from_dict",
    "pdt_to_dict",
    # witness
    "WitnessReport",
    "verdict",
    "witness_expansion",
    "witness_uncorrelated_zero_mean",
    "witness_correlated",
    "duan_witness_correlated",
    "cross_check_direct",
    # experiments
    "SweepResult",
    "squeezing_sweep",
    "displacement_contour",
    "phase_region_map",
    "identity_suite",
]
