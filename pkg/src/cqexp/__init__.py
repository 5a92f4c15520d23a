"""Auxiliary function E0 and error exponents of classical-quantum channels,
with randomized checks of the operator inequalities behind its concavity."""

from .channel import (
    ClassicalChannel,
    CQChannel,
    ProbabilityDistribution,
    e0_classical,
    e0_derivatives,
    e0_quantum,
    embed_classical,
    f_map,
    noiseless_binary,
    pure_state_channel,
    useless_channel,
)
from .errors import (
    CQExpError,
    DomainError,
    GeneratorError,
    InputError,
    NonConvergenceError,
    SingularityError,
)
from .exponents import (
    ExponentPoint,
    OptimizerConfig,
    max_e0_over_inputs,
    random_coding_exponent,
    sphere_packing_exponent,
)
from .fileio import FormatError, read_channel, read_matrix, write_channel
from .geomean import GeomeanConfig, weighted_geomean, weighted_geomean_limit
from .majorization import (
    MajorizationVerdict,
    decreasing_rearrangement,
    eigenvalue_vector,
    log_majorizes,
    weak_majorizes,
)
from .matops import EigenSystem, eigh, kyfan_norm, loewner_leq, matrix_power, random_pd, trace_fn
from .verifier import (
    InequalityReport,
    check_concavity_theorem,
    check_core_lemma,
    check_geomean_properties,
    check_lemma_holder,
    check_lemma_logmajor,
    check_lemma_norm_power,
    check_lemma_trace_convex,
    check_lemma_vector_power,
    check_proof_chain,
)

__version__ = "0.1.0"
