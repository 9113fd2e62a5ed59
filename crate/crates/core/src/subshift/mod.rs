//! Subshifts of finite type over finitely generated groups, seen through finite windows.

mod generator;
mod io;
mod paradox_search;
mod patch;
mod search;
mod spec;

pub use generator::{clopen_generator_check, label_map, GeneratorCheckResult, PatchSource};
pub use io::{PatchFile, PATCH_FORMAT_VERSION};
pub use paradox_search::{
    clopen_paradox_search, verify_clopen_decomposition, ClopenDecomposition, ClopenPiece, DecompositionReport,
    ParadoxSearchOptions, ParadoxSearchOutcome, SearchMode,
};
pub use patch::{cell_order, patch_check, translate_patch, Patch, PatchCheck};
pub use search::{count_patterns, empty_on_ball, enumerate_admissible, extend_search, DEFAULT_NODE_CAP};
pub use spec::{golden_mean, hard_core, product_spec, Rule, RuleOracle, SubshiftSpec, Symbol, SymbolPair};
