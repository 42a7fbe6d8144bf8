"""Exact Cartier-module computations over polynomial rings in prime
characteristic: test module filtrations, V-filtrations, F-jumping
numbers, and associated graded pieces."""

from cartierv.cartier_mod import (
    CartierModule,
    CartierMorphism,
    CartierStructure,
    FiniteExtension,
    cokernel_presentation,
    evaluation_at_one,
    graph_embed,
    is_F_pure,
    is_nilpotent,
    kappa_apply,
    kappa_span,
    kernel_presentation,
    localize_presentation,
    make_extension,
    morphism_check,
    nilpotence_order,
    pullback_etale,
    pushforward_finite,
    pushforward_submodule,
    reduce_from_graph,
    shriek_finite,
    trace_kappa_commutes,
    trace_map,
)
from cartierv.errors import (
    CartierError,
    FptDivergenceError,
    LevelCapExceededError,
    NonDegenerateError,
    NotFRegularError,
    NotPrimeError,
    ParseError,
    RankMismatchError,
    RingMismatchError,
    StabilizationCapExceededError,
)
from cartierv.field_poly import Poly, PrimeField, Ring, cartier_trace
from cartierv.frobenius import bracket_power, frobenius_root, level_cap
from cartierv.groebner import (
    FreeSubmodule,
    QuotientPresentation,
    eliminate,
    full_module,
    ideal,
    saturate,
    zero_module,
)
from cartierv.suites import run_repro, run_suites
from cartierv.testmod import (
    FptResult,
    JumpScan,
    TauResult,
    fpt,
    is_F_regular,
    jumping_numbers,
    module_test_submodule,
    suggest_test_element,
    tau,
    tau_left_limit,
)
from cartierv.vfilt import (
    AxiomReport,
    FiltrationTable,
    GrPiece,
    compare_with_ishriek,
    compute_vfiltration,
    gr_piece,
    gr_range,
    mu_f_check,
    verify_axioms,
)

__all__ = [
    "AxiomReport",
    "CartierError",
    "CartierModule",
    "CartierMorphism",
    "CartierStructure",
    "FiltrationTable",
    "FiniteExtension",
    "FptDivergenceError",
    "FptResult",
    "FreeSubmodule",
    "GrPiece",
    "JumpScan",
    "LevelCapExceededError",
    "NonDegenerateError",
    "NotFRegularError",
    "NotPrimeError",
    "ParseError",
    "Poly",
    "PrimeField",
    "QuotientPresentation",
    "RankMismatchError",
    "Ring",
    "RingMismatchError",
    "StabilizationCapExceededError",
    "TauResult",
    "bracket_power",
    "cartier_trace",
    "cokernel_presentation",
    "compare_with_ishriek",
    "compute_vfiltration",
    "eliminate",
    "evaluation_at_one",
    "fpt",
    "frobenius_root",
    "full_module",
    "gr_piece",
    "gr_range",
    "graph_embed",
    "ideal",
    "is_F_pure",
    "is_F_regular",
    "is_nilpotent",
    "jumping_numbers",
    "kappa_apply",
    "kappa_span",
    "kernel_presentation",
    "level_cap",
    "localize_presentation",
    "make_extension",
    "module_test_submodule",
    "morphism_check",
    "mu_f_check",
    "nilpotence_order",
    "pullback_etale",
    "pushforward_finite",
    "pushforward_submodule",
    "reduce_from_graph",
    "run_repro",
    "run_suites",
    "saturate",
    "shriek_finite",
    "suggest_test_element",
    "tau",
    "tau_left_limit",
    "trace_kappa_commutes",
    "trace_map",
    "verify_axioms",
    "zero_module",
]
