use super::folner::check_generating_set;
use crate::error::{Error, Result};
use crate::group::{ball, Ball, Element, GroupSpec};
use crate::matching::{k_to_one_surjection_covering, BipartiteGraph, SurjectionFailure};
use std::collections::{BTreeSet, HashMap};

/// A 2-to-1 map p from a domain D ⊆ ball(R)·S onto ball(R) with g⁻¹p(g) ∈ S.
/// D contains ball(R − ρ), where ρ is the largest word length in S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCertificate {
    pub group: GroupSpec,
    pub generating_set: Vec<Element>,
    pub radius: usize,
    /// (g, p(g)) for g ∈ D, in ball order of g.
    pub assignment: Vec<(Element, Element)>,
}

impl ExpansionCertificate {
    pub fn reach(&self) -> usize {
        reach(&self.group, &self.generating_set)
    }

    /// Radius up to which every cell is in the domain.
    pub fn interior_radius(&self) -> Option<usize> {
        self.radius.checked_sub(self.reach())
    }
}

/// A set F ⊆ ball(R) with |F·S| < 2|F|. Inconclusive about amenability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionViolator {
    pub radius: usize,
    pub set: Vec<Element>,
    pub neighborhood: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionOutcome {
    Certificate(ExpansionCertificate),
    Violator(ExpansionViolator),
}

/// Largest word length of an element of `s`.
pub fn reach(spec: &GroupSpec, s: &[Element]) -> usize {
    let mut r = 0;
    let gens = spec.standard_generating_set();
    let mut b = ball(spec, &gens, 0, usize::MAX).expect("radius 0");
    while !s.iter().all(|x| b.contains(x)) {
        r += 1;
        b = ball(spec, &gens, r, usize::MAX).expect("uncapped");
    }
    r
}

pub(crate) fn standard_ball(spec: &GroupSpec, r: usize, cap: usize) -> Result<Ball> {
    ball(spec, &spec.standard_generating_set(), r, cap)
}

pub fn expansion_certificate(spec: &GroupSpec, s: &[Element], r: usize, cap: usize) -> Result<ExpansionOutcome> {
    check_generating_set(spec, s)?;
    let rho = reach(spec, s);
    let outer = standard_ball(spec, r + rho, cap)?;
    let right: Vec<Element> = outer.within(r).to_vec();

    // left = ball(R)·S in ball order; g is adjacent to h iff h ∈ g·S iff g ∈ h·S⁻¹
    let s_inv: Vec<Element> = s.iter().map(|x| spec.inverse(x)).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (hi, h) in right.iter().enumerate() {
        for si in &s_inv {
            let g = spec.multiply(h, si);
            edges.push((outer.position(&g).expect("ball(R)·S lies in ball(R+ρ)"), hi));
        }
    }
    let left_positions: BTreeSet<usize> = edges.iter().map(|e| e.0).collect();
    let left_index: HashMap<usize, usize> = left_positions.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let left: Vec<Element> = left_positions.iter().map(|&p| outer.elements()[p].clone()).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); left.len()];
    for (p, hi) in edges {
        adj[left_index[&p]].push(hi);
    }
    let required: Vec<usize> = match r.checked_sub(rho) {
        Some(r0) => (0..left.len()).filter(|&i| outer.length(&left[i]).unwrap() <= r0).collect(),
        None => Vec::new(),
    };
    let graph = BipartiteGraph::from_adjacency(left, right, adj)?;
    match k_to_one_surjection_covering(&graph, 2, &required) {
        Ok(a) => {
            let assignment = a
                .assignment
                .iter()
                .enumerate()
                .filter_map(|(l, img)| img.map(|h| (graph.left()[l].clone(), graph.right()[h].clone())))
                .collect();
            Ok(ExpansionOutcome::Certificate(ExpansionCertificate {
                group: spec.clone(),
                generating_set: s.to_vec(),
                radius: r,
                assignment,
            }))
        }
        Err(SurjectionFailure::HallViolator(f)) => {
            let set: Vec<Element> = f.iter().map(|&i| graph.right()[i].clone()).collect();
            let neighborhood = crate::group::set_product(spec, &set, s).len();
            Ok(ExpansionOutcome::Violator(ExpansionViolator { radius: r, set, neighborhood }))
        }
        Err(SurjectionFailure::RequiredUnsaturated(f)) => {
            // needs 2|F·S| < |F|, impossible while e ∈ S; reported for completeness
            let set: Vec<Element> = f.iter().map(|&i| graph.left()[i].clone()).collect();
            let neighborhood = crate::group::set_product(spec, &set, s).len();
            Ok(ExpansionOutcome::Violator(ExpansionViolator { radius: r, set, neighborhood }))
        }
    }
}

/// Independent recount: fresh ball, hash-map preimage counts, step membership in S.
pub fn verify_expansion(cert: &ExpansionCertificate, cap: usize) -> Result<()> {
    let spec = &cert.group;
    check_generating_set(spec, &cert.generating_set).map_err(|e| Error::Verification(e.to_string()))?;
    let s: BTreeSet<&Element> = cert.generating_set.iter().collect();
    let region = standard_ball(spec, cert.radius, cap)?;
    let mut counts: HashMap<&Element, usize> = HashMap::new();
    let mut domain: BTreeSet<&Element> = BTreeSet::new();
    for (g, h) in &cert.assignment {
        if !domain.insert(g) {
            return Err(Error::Verification(format!("{g} assigned twice")));
        }
        if !s.contains(&spec.quotient(g, h)) {
            return Err(Error::Verification(format!("step {g} -> {h} is not in S")));
        }
        if !region.contains(h) {
            return Err(Error::Verification(format!("image {h} of {g} lies outside ball({})", cert.radius)));
        }
        *counts.entry(h).or_default() += 1;
    }
    for h in region.iter() {
        let c = counts.get(h).copied().unwrap_or(0);
        if c != 2 {
            return Err(Error::Verification(format!("{h} has {c} preimages")));
        }
    }
    if let Some(r0) = cert.interior_radius() {
        if let Some(g) = region.within(r0).iter().find(|g| !domain.contains(g)) {
            return Err(Error::Verification(format!("interior element {g} is outside the domain")));
        }
    }
    Ok(())
}
