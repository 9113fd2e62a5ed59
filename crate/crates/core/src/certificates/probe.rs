use super::expansion::{expansion_certificate, ExpansionCertificate, ExpansionOutcome};
use super::folner::{default_family, folner_at, FolnerCertificate};
use crate::error::Result;
use crate::group::GroupSpec;
use num_rational::Ratio;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOptions {
    pub budget: usize,
    pub epsilon: Ratio<u64>,
    /// Expansion rounds start at this radius; small balls of some amenable groups
    /// (the lamplighter up to radius 3) still admit 2-to-1 maps.
    pub min_expansion_radius: usize,
    pub cap: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            budget: 12,
            epsilon: Ratio::new(1, 5),
            min_expansion_radius: 4,
            cap: crate::group::DEFAULT_BALL_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    Folner(FolnerCertificate),
    Expansion(ExpansionCertificate),
    /// Neither certificate within the budget; says nothing either way.
    Exhausted {
        rounds: usize,
    },
}

/// Round i tries the Følner family at radius i, then expansion at radius i.
/// The first certificate in round order wins.
pub fn amenability_probe(spec: &GroupSpec, options: &ProbeOptions) -> Result<ProbeOutcome> {
    let s = spec.unit_ball_set();
    let family = default_family(spec);
    for r in 0..=options.budget {
        if let Some(cert) = folner_at(spec, &s, options.epsilon, family, r, options.cap)? {
            return Ok(ProbeOutcome::Folner(cert));
        }
        if r >= options.min_expansion_radius {
            if let ExpansionOutcome::Certificate(cert) = expansion_certificate(spec, &s, r, options.cap)? {
                return Ok(ProbeOutcome::Expansion(cert));
            }
        }
    }
    Ok(ProbeOutcome::Exhausted { rounds: options.budget + 1 })
}
