"""One-shot classical coding over quantum channels with pretty-good-measurement decoders.

Noncommutative minimum and maximum, state discrimination, quantum
divergences, closed-form random-coding error bounds for six coding tasks and
exact or Monte-Carlo simulators that check each bound.  All logarithms are
natural.
"""

from .bounds import (
    BoundReport,
    ExponentReport,
    RateReport,
    broadcast_bounds,
    cq_bound,
    cq_exponent,
    cq_exponent_cqsw,
    cq_rate,
    cq_renyi_relaxation,
    cqsw_bound,
    ea_bound,
    ea_network_bounds,
    mac_bound,
    packing_bound,
    second_order_rate,
    state_info_bound,
)
from .checks import CheckReport, fact_battery, hn_battery, trace_chain_battery
from .discrimination import (
    POVM,
    HoeffdingResult,
    NPResult,
    SteinResult,
    TwoOutcomeTest,
    check_hn_inequality,
    check_trace_chain,
    helstrom,
    hoeffding_pgm,
    ht_divergence,
    is_divergence,
    neyman_pearson,
    pgm,
    pgm_error,
    stein_pgm,
)
from .divergences import (
    DivergenceValue,
    collision_divergence,
    cq_conditional_renyi,
    cq_information_variance,
    cq_mutual_information,
    cq_mutual_renyi,
    inverse_normal_cdf,
    max_relative_entropy,
    petz_renyi,
    relative_entropy,
    relative_entropy_variance,
)
from .errors import NumericalFailure, ParseError, PGMCodingError, ValidationError
from .models import (
    CQChannel,
    CQState,
    DensityOperator,
    KrausChannel,
    Precoder,
    apply_kraus,
    build_cq_joint,
    cq_source,
    parse_model,
    serialize_model,
)
from .operators import (
    HermitianOperator,
    Spectrum,
    SubsystemShape,
    apply_spectral_function,
    direct_sum,
    nc_max,
    nc_min,
    nc_quotient,
    partial_trace,
    permute_subsystems,
    spectral_decompose,
    tensor_product,
    trace_nc_max,
    trace_nc_min,
)
from .simulate import (
    SimulationResult,
    broadcast_exact,
    broadcast_mc,
    cq_random_coding_exact,
    cq_random_coding_mc,
    cqsw_exact,
    cqsw_mc,
    mac_exact,
    mac_mc,
    packing_exact,
    state_info_exact,
    state_info_mc,
)

__version__ = "0.1.0"

__all__ = [
    "apply_kraus",
    "apply_spectral_function",
    "BoundReport",
    "broadcast_bounds",
    "broadcast_exact",
    "broadcast_mc",
    "build_cq_joint",
    "check_hn_inequality",
    "check_trace_chain",
    "CheckReport",
    "collision_divergence",
    "cq_bound",
    "cq_conditional_renyi",
    "cq_exponent",
    "cq_exponent_cqsw",
    "cq_information_variance",
    "cq_mutual_information",
    "cq_mutual_renyi",
    "cq_random_coding_exact",
    "cq_random_coding_mc",
    "cq_rate",
    "cq_renyi_relaxation",
    "cq_source",
    "CQChannel",
    "CQState",
    "cqsw_bound",
    "cqsw_exact",
    "cqsw_mc",
    "DensityOperator",
    "direct_sum",
    "DivergenceValue",
    "ea_bound",
    "ea_network_bounds",
    "ExponentReport",
    "fact_battery",
    "helstrom",
    "HermitianOperator",
    "hn_battery",
    "hoeffding_pgm",
    "HoeffdingResult",
    "ht_divergence",
    "inverse_normal_cdf",
    "is_divergence",
    "KrausChannel",
    "mac_bound",
    "mac_exact",
    "mac_mc",
    "max_relative_entropy",
    "nc_max",
    "nc_min",
    "nc_quotient",
    "neyman_pearson",
    "NPResult",
    "NumericalFailure",
    "packing_bound",
    "packing_exact",
    "parse_model",
    "ParseError",
    "partial_trace",
    "permute_subsystems",
    "petz_renyi",
    "pgm",
    "pgm_error",
    "PGMCodingError",
    "POVM",
    "Precoder",
    "RateReport",
    "relative_entropy",
    "relative_entropy_variance",
    "second_order_rate",
    "serialize_model",
    "SimulationResult",
    "spectral_decompose",
    "Spectrum",
    "state_info_bound",
    "state_info_exact",
    "state_info_mc",
    "stein_pgm",
    "SteinResult",
    "SubsystemShape",
    "tensor_product",
    "trace_chain_battery",
    "trace_nc_max",
    "trace_nc_min",
    "TwoOutcomeTest",
    "ValidationError",
]
