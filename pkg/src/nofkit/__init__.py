"""Number-on-the-forehead multiparty protocols at desk scale.

The package has three layers: exact protocol executions with bit-level cost
accounting (protocols, core), hard input distributions (distributions), and
brute-force correlation / discrepancy checks against closed-form bounds
(discrepancy). The harness module and the ``nofkit`` CLI wrap them in seeded,
reproducible experiments.
"""

from .combinatorics import (
    binom_leq,
    binom_sandwich_ok,
    fact21_check,
    majority_tail,
    smallest_odd_majority,
)
from .core import (
    CylinderIntersection,
    ProtocolOutcome,
    ProtocolSpec,
    Transcript,
    all_ones_cylinder,
    amplify,
    decompose_to_cylinders,
    run,
)
from .discrepancy import (
    CapExceeded,
    CharacterSpec,
    CorrelationQuery,
    bns_rhs,
    bound_suite,
    correlation,
    enumerate_cylinders,
    exact_disc,
    heuristic_disc,
    mod3_char_array,
    mod3_char_bns_closed_form,
)
from .distributions import DistributionSpec, make_dist, nu_counts, parse_dist_string
from .functions import (
    UNDEFINED,
    PartialFunctionSpec,
    disj_spec,
    eval_composed,
    eval_disj,
    eval_gip,
    eval_mod3xor,
    eval_udisj,
    gip_spec,
    mod3xor_spec,
    udisj_spec,
    xor_of_disj_spec,
)
from .harness import ExperimentConfig, clopper_pearson, simulate, sweep, verify
from .matrices import InputMatrix, View, format_matrix, parse_matrix, player_view, stack_blocks
from .protocols import (
    InfeasibleParameters,
    MaskVector,
    active_budget,
    disj_params,
    disj_protocol,
    enumerate_masks,
    exact_gip_error,
    exact_mod3_error,
    fold_rows,
    gip_base_outcome,
    gip_params,
    gip_protocol,
    mod3_base_value,
    mod3_params,
    mod3_protocol,
    monomial_partition,
    parity_poly_eval,
)
from .tape import RandomTape

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "CharacterSpec",
    "CorrelationQuery",
    "CylinderIntersection",
    "DistributionSpec",
    "ExperimentConfig",
    "InfeasibleParameters",
    "InputMatrix",
    "MaskVector",
    "PartialFunctionSpec",
    "ProtocolOutcome",
    "ProtocolSpec",
    "RandomTape",
    "Transcript",
    "UNDEFINED",
    "View",
    "active_budget",
    "all_ones_cylinder",
    "amplify",
    "binom_leq",
    "binom_sandwich_ok",
    "bns_rhs",
    "bound_suite",
    "clopper_pearson",
    "correlation",
    "decompose_to_cylinders",
    "disj_params",
    "disj_protocol",
    "disj_spec",
    "enumerate_cylinders",
    "enumerate_masks",
    "eval_composed",
    "eval_disj",
    "eval_gip",
    "eval_mod3xor",
    "eval_udisj",
    "exact_disc",
    "exact_gip_error",
    "exact_mod3_error",
    "fact21_check",
    "fold_rows",
    "format_matrix",
    "gip_base_outcome",
    "gip_params",
    "gip_protocol",
    "gip_spec",
    "heuristic_disc",
    "majority_tail",
    "make_dist",
    "mod3_base_value",
    "mod3_char_array",
    "mod3_char_bns_closed_form",
    "mod3_params",
    "mod3_protocol",
    "mod3xor_spec",
    "monomial_partition",
    "nu_counts",
    "parity_poly_eval",
    "parse_dist_string",
    "parse_matrix",
    "player_view",
    "run",
    "simulate",
    "smallest_odd_majority",
    "stack_blocks",
    "sweep",
    "udisj_spec",
    "verify",
    "xor_of_disj_spec",
]
