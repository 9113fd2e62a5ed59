//! Finite witnesses for the compressible subshift of (T ⊔ {*})^Γ attached to a
//! non-amenable group: parameters, support scaffold, 2-to-1 support map and the binary code f.

mod params;
mod witness;

pub use params::{
    first_non_involution, free_shortlex_rank, independent_subset, parameter_window, pattern_injection,
    select_parameters, shortlex_rank, BuilderMode, BuilderParams, Phi, PhiDomain,
};
pub use witness::{
    code_patch, compressible_spec, f_value, support_scaffold, verify_compression, witness_patch, CSymbol, CodeReport,
    CompressionEvidence, Scaffold, WitnessOutcome, WitnessPatch,
};

use crate::error::{Error, Result};
use crate::subshift::{patch_check, PatchCheck};
use std::collections::BTreeSet;

/// Outcome of the three independent checks on an emitted witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineChecks {
    /// Local admissibility of every rule window inside the patch.
    pub oracle: Result<PatchCheck>,
    pub compression: Result<CompressionEvidence>,
    pub code: Result<CodeReport>,
    /// φ on the symbols of the patch, or why it could not be built.
    pub phi: std::result::Result<Phi, Error>,
}

impl PipelineChecks {
    pub fn all_pass(&self) -> bool {
        self.oracle == Ok(PatchCheck::Ok) && self.compression.is_ok() && self.code.is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub outcome: WitnessOutcome,
    pub checks: Option<PipelineChecks>,
}

/// Builds the witness on ball(R) and runs the rule oracle, the preimage recount and the code check.
pub fn run_pipeline(params: &BuilderParams, radius: usize, cap: usize) -> Result<PipelineReport> {
    let outcome = witness_patch(params, radius, cap)?;
    let checks = match &outcome {
        WitnessOutcome::HallFailure { .. } => None,
        WitnessOutcome::Witness(w) => {
            let spec = compressible_spec(params, cap)?;
            let used: BTreeSet<_> = w.patch.cells().values().filter_map(|s| s.step().cloned()).collect();
            let phi = pattern_injection(params, &used);
            Some(PipelineChecks {
                oracle: patch_check(&spec, &w.patch),
                compression: verify_compression(w),
                code: code_patch(w, phi.as_ref().ok()),
                phi,
            })
        }
    };
    Ok(PipelineReport { outcome, checks })
}
