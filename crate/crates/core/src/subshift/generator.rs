use super::patch::{patch_check, translate_patch, Patch, PatchCheck};
use super::search::enumerate_admissible;
use super::spec::{SubshiftSpec, Symbol};
use crate::error::{Error, Result};
use crate::group::{ball, Element, DEFAULT_BALL_CAP};
use std::collections::{BTreeSet, HashMap};

/// Where the admissible patches on ball(w + d) come from.
#[derive(Clone, Debug)]
pub enum PatchSource<A> {
    /// Enumerate all admissible patches, failing past the given count.
    Enumerate { max_patches: usize, node_cap: u64 },
    /// Caller-supplied admissible patches on ball(w + d), e.g. when the alphabet is too large to enumerate.
    Given(Vec<Patch<A>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorCheckResult<A> {
    SeparatesAtRadius(usize),
    /// Two admissible patches that differ at the identity yet have identical label maps on ball(w).
    Counterexample(Patch<A>, Patch<A>),
}

/// Label map of a patch p on ball(w + d): γ ↦ label of (γ⁻¹·p) on ball(d), for γ ∈ ball(w).
/// The labeling receives the ball(d) pattern in breadth-first order.
pub fn label_map<A: Symbol>(
    spec: &SubshiftSpec<A>,
    patch: &Patch<A>,
    inner: &[Element],
    centres: &[Element],
    labeling: &dyn Fn(&[A]) -> usize,
) -> Result<Vec<usize>> {
    let g = &spec.group;
    centres
        .iter()
        .map(|gamma| {
            let moved = translate_patch(g, &g.inverse(gamma), patch);
            let pattern = inner
                .iter()
                .map(|l| {
                    moved
                        .get(l)
                        .cloned()
                        .ok_or_else(|| Error::Precondition(format!("patch has no value at {gamma}·{l}")))
                })
                .collect::<Result<Vec<A>>>()?;
            Ok(labeling(&pattern))
        })
        .collect()
}

/// Finite-resolution generator test: do admissible patches on ball(w + d) that differ
/// at the identity always induce distinct label maps on ball(w)?
pub fn clopen_generator_check<A: Symbol>(
    spec: &SubshiftSpec<A>,
    d: usize,
    labels: usize,
    labeling: &dyn Fn(&[A]) -> usize,
    w: usize,
    source: &PatchSource<A>,
) -> Result<GeneratorCheckResult<A>> {
    let g = &spec.group;
    let outer = ball(g, &g.standard_generating_set(), w + d, DEFAULT_BALL_CAP)?;
    let domain: BTreeSet<Element> = outer.iter().cloned().collect();
    let inner = outer.within(d).to_vec();
    let centres = outer.within(w).to_vec();
    let patches = match source {
        PatchSource::Enumerate { max_patches, node_cap } => {
            enumerate_admissible(spec, &Patch::empty(), &domain, *max_patches, *node_cap)?
        }
        PatchSource::Given(ps) => {
            for p in ps {
                if p.domain() != &domain || !p.is_total() {
                    return Err(Error::Precondition(format!("supplied patch is not total on ball({})", w + d)));
                }
                if let PatchCheck::ViolatedWindow(at) = patch_check(spec, p)? {
                    return Err(Error::Precondition(format!("supplied patch violates the rule at {at}")));
                }
            }
            ps.clone()
        }
    };
    let centre = g.identity();
    let mut seen: HashMap<Vec<usize>, &Patch<A>> = HashMap::new();
    for p in &patches {
        let code = label_map(spec, p, &inner, &centres, labeling)?;
        if let Some(bad) = code.iter().find(|&&c| c >= labels) {
            return Err(Error::Precondition(format!("label {bad} is outside 0..{labels}")));
        }
        let q = *seen.entry(code).or_insert(p);
        if q.get(&centre) != p.get(&centre) {
            return Ok(GeneratorCheckResult::Counterexample(q.clone(), p.clone()));
        }
    }
    Ok(GeneratorCheckResult::SeparatesAtRadius(w))
}
