//! Ancilla-assisted post-selected state engineering on two modes.
//!
//! A two-mode input `|psi>` is joined by ancilla modes holding fixed photon numbers before a
//! mode unitary acts on all modes. Measuring the ancillas and conditioning on one detection
//! pattern realizes one Kraus branch of the resulting channel.

mod ancilla;
mod extension;
mod postselect;
mod synthesis;

pub use ancilla::{multi_ancilla_bound_check, AncillaSearchOptions, AncillaSearchReport};
pub use extension::{
    build_extension_matrix, encoded_target, success_probability, ExtensionParams, ParamsJson,
};
pub use postselect::{
    ancilla_branches, completeness_deviation, evolve_with_ancilla, kraus_branches, postselect,
    postselect_pattern, project_ancillas, KrausBranch, PostSelected,
};
pub use synthesis::{
    factor_target, normalize_triple, optimal_params_for, optimal_probability, solve_target,
    solve_target_search, solve_target_with_tolerance, EngineeringSolution, FactorPair,
    SearchOutcome, SolutionJson, TargetJson, DEFAULT_SEED, TARGET_OVERLAP_FLOOR,
};
