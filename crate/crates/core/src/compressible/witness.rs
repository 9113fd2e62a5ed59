use super::params::{BuilderParams, Phi};
use crate::error::{Error, Result};
use crate::group::{ball, Element};
use crate::matching::{k_to_one_surjection_covering, BipartiteGraph, SurjectionFailure};
use crate::subshift::{Patch, SubshiftSpec};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

/// Symbols of the compressible subshift: a step in T, or `*` off the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CSymbol {
    Star,
    Step(Element),
}

impl CSymbol {
    pub fn step(&self) -> Option<&Element> {
        match self {
            CSymbol::Star => None,
            CSymbol::Step(t) => Some(t),
        }
    }
}

impl fmt::Display for CSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CSymbol::Star => f.write_str("*"),
            CSymbol::Step(t) => write!(f, "{t}"),
        }
    }
}

/// Local rule on ball(max(3ρ, nρ)) around a cell γ:
/// a support cell carries t ∈ T with γt in the support and sees no other support in γS³;
/// every cell sees some support in γS³; a support cell has exactly two preimages h ∈ γT⁻¹.
pub fn compressible_spec(params: &BuilderParams, cap: usize) -> Result<SubshiftSpec<CSymbol>> {
    let g = &params.group;
    let gens = g.standard_generating_set();
    let window_ball = ball(g, &gens, params.rule_radius(), cap)?;
    let window = window_ball.elements().to_vec();
    let pos: HashMap<Element, usize> = window.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
    let s3: Vec<usize> = (1..window.len()).filter(|&i| window_ball.length_at(i) <= 3 * params.rho).collect();
    let t_radius = params.t_radius();
    // (position of h = l, required symbol l⁻¹) for l ∈ T⁻¹ = T
    let preimage_slots: Vec<(usize, Element)> = (0..window.len())
        .filter(|&i| window_ball.length_at(i) <= t_radius)
        .map(|i| (i, g.inverse(&window[i])))
        .collect();
    let t_ball = ball(g, &gens, t_radius, cap)?;
    let mut alphabet = vec![CSymbol::Star];
    alphabet.extend(t_ball.iter().cloned().map(CSymbol::Step));
    let name = format!("compressible(rho={},n={},r={})", params.rho, params.n, params.r);
    SubshiftSpec::with_oracle(g.clone(), alphabet, window, name, move |p: &[CSymbol]| {
        let covered = matches!(p[0], CSymbol::Step(_)) || s3.iter().any(|&i| p[i] != CSymbol::Star);
        if !covered {
            return false;
        }
        let CSymbol::Step(t) = &p[0] else { return true };
        let Some(&ti) = pos.get(t) else { return false };
        if window_ball.length_at(ti) > t_radius || p[ti] == CSymbol::Star {
            return false;
        }
        if s3.iter().any(|&i| p[i] != CSymbol::Star) {
            return false;
        }
        preimage_slots.iter().filter(|(i, need)| p[*i].step() == Some(need)).count() == 2
    })
}

/// A greedy maximal right S³-disjoint subset of ball(R).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaffold {
    pub radius: usize,
    pub points: Vec<Element>,
    /// Every element of ball(certified_radius) lies in A·S³.
    pub certified_radius: usize,
}

pub fn support_scaffold(params: &BuilderParams, radius: usize, cap: usize) -> Result<Scaffold> {
    let reach3 = 3 * params.rho;
    if radius < reach3 {
        return Err(Error::Precondition(format!("radius {radius} is below 3ρ = {reach3}")));
    }
    let g = &params.group;
    let gens = g.standard_generating_set();
    let region = ball(g, &gens, radius, cap)?;
    let s3 = ball(g, &gens, reach3, cap)?.elements().to_vec();
    let mut chosen: HashSet<Element> = HashSet::new();
    let mut points = Vec::new();
    for x in region.iter() {
        // x ∈ a·S³ ⟺ a ∈ x·S³ for symmetric S
        if s3.iter().all(|u| !chosen.contains(&g.multiply(x, u))) {
            chosen.insert(x.clone());
            points.push(x.clone());
        }
    }
    let certified_radius = radius - reach3;
    if let Some(x) =
        region.within(certified_radius).iter().find(|x| s3.iter().all(|u| !chosen.contains(&g.multiply(x, u))))
    {
        return Err(Error::violation(x, "not covered by A·S³"));
    }
    Ok(Scaffold { radius, points, certified_radius })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPatch {
    pub params: BuilderParams,
    pub radius: usize,
    pub patch: Patch<CSymbol>,
    /// Support points with their images p(a) = a·x_a.
    pub map: Vec<(Element, Element)>,
}

impl WitnessPatch {
    /// Support points here have all their possible preimages inside the patch.
    pub fn count_interior(&self) -> Option<usize> {
        self.radius.checked_sub(self.params.t_radius())
    }

    /// Cells whose whole rule window lies inside the patch.
    pub fn rule_interior(&self) -> Option<usize> {
        self.radius.checked_sub(self.params.rule_radius())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    Witness(WitnessPatch),
    /// Support points for which the finite region cannot supply a 2-to-1 assignment.
    HallFailure {
        radius: usize,
        points: Vec<Element>,
    },
}

/// Matches every support point a ∈ A ∩ ball(R) to p(a) ∈ a·T ∩ A so that points of
/// ball(R − nρ) get exactly two preimages and the others at most two, then writes
/// x_a = a⁻¹p(a) on the support and `*` elsewhere.
pub fn witness_patch(params: &BuilderParams, radius: usize, cap: usize) -> Result<WitnessOutcome> {
    let g = &params.group;
    let scaffold = support_scaffold(params, radius, cap)?;
    let pts = &scaffold.points;
    if pts.len() < 2 {
        return Err(Error::Precondition(format!("ball({radius}) holds fewer than two support points")));
    }
    let gens = g.standard_generating_set();
    let region = ball(g, &gens, radius, cap)?;
    let t = ball(g, &gens, params.t_radius(), cap)?;
    let index: HashMap<&Element, usize> = pts.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let interior = scaffold.radius.checked_sub(params.t_radius());
    let is_outer = |a: &Element| interior.is_none_or(|q| region.length(a).unwrap() > q);
    let mut left: Vec<usize> = (0..pts.len()).collect();
    let mut adj: Vec<Vec<usize>> =
        pts.iter().map(|a| t.iter().filter_map(|s| index.get(&g.multiply(a, s)).copied()).collect()).collect();
    // two absorbing dummies per outer point let it take fewer than two real preimages
    for (j, a) in pts.iter().enumerate() {
        if is_outer(a) {
            for _ in 0..2 {
                left.push(left.len());
                adj.push(vec![j]);
            }
        }
    }
    let graph = BipartiteGraph::from_adjacency(left, (0..pts.len()).collect(), adj)?;
    let required: Vec<usize> = (0..pts.len()).collect();
    let assignment = match k_to_one_surjection_covering(&graph, 2, &required) {
        Ok(a) => a,
        Err(SurjectionFailure::HallViolator(f)) | Err(SurjectionFailure::RequiredUnsaturated(f)) => {
            let points = f.iter().filter(|&&i| i < pts.len()).map(|&i| pts[i].clone()).collect();
            return Ok(WitnessOutcome::HallFailure { radius, points });
        }
    };
    let mut cells: BTreeMap<Element, CSymbol> = region.iter().map(|x| (x.clone(), CSymbol::Star)).collect();
    let mut map = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        let j = assignment.assignment[i].expect("support points are required");
        let target = &pts[j];
        cells.insert(a.clone(), CSymbol::Step(g.quotient(a, target)));
        map.push((a.clone(), target.clone()));
    }
    let patch = Patch::total(cells)?;
    Ok(WitnessOutcome::Witness(WitnessPatch { params: params.clone(), radius, patch, map }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionEvidence {
    /// (interior support point, number of preimages)
    pub table: Vec<(Element, usize)>,
    /// No support point in the interior; the check is vacuous.
    pub degenerate: bool,
}

/// Recounts {h ∈ Supp : h·x_h = g} for every support point g of ball(R − nρ).
pub fn verify_compression(w: &WitnessPatch) -> Result<CompressionEvidence> {
    let g = &w.params.group;
    let mut counts: HashMap<Element, usize> = HashMap::new();
    for (h, sym) in w.patch.cells() {
        if let CSymbol::Step(t) = sym {
            *counts.entry(g.multiply(h, t)).or_default() += 1;
        }
    }
    let mut table = Vec::new();
    if let Some(q) = w.count_interior() {
        let inner = ball(g, &g.standard_generating_set(), q, crate::group::DEFAULT_BALL_CAP)?;
        for x in inner.iter() {
            match w.patch.get(x) {
                None => return Err(Error::violation(x, "interior cell missing from the patch")),
                Some(CSymbol::Star) => {}
                Some(CSymbol::Step(_)) => {
                    let c = counts.get(x).copied().unwrap_or(0);
                    if c != 2 {
                        return Err(Error::violation(x, format!("{c} preimages instead of 2")));
                    }
                    table.push((x.clone(), c));
                }
            }
        }
    }
    let degenerate = table.is_empty();
    Ok(CompressionEvidence { table, degenerate })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeReport {
    /// f(γ⁻¹·x) for γ ∈ ball(R − ρ), in breadth-first order.
    pub f: Vec<(Element, bool)>,
    /// Points of ball(R − 2ρ) where support detection was compared.
    pub detection_checked: usize,
    pub support_detected: usize,
    /// Whether φ was injective on the patch symbols (false: only the forced bits were used).
    pub phi_injective: bool,
}

/// f on a ball(ρ) pattern listed in breadth-first order: φ(x_{s⁻¹})_s for the unique
/// s ∈ S′ with s⁻¹ in the support, 0 if there is none. `None` for φ uses only the forced bits.
pub fn f_value(
    params: &BuilderParams,
    phi: Option<&Phi>,
    lookup: impl Fn(&Element) -> Option<CSymbol>,
) -> Result<bool> {
    let g = &params.group;
    let mut hit: Option<(&Element, Element)> = None;
    for s in &params.s_prime {
        let at = g.inverse(s);
        if let Some(CSymbol::Step(t)) = lookup(&at) {
            if let Some((s0, _)) = hit {
                return Err(Error::violation(
                    format!("{s0}⁻¹ and {s}⁻¹"),
                    "two support points seen by f; S³-disjointness fails upstream",
                ));
            }
            hit = Some((s, t));
        }
    }
    match hit {
        None => Ok(false),
        Some((s, t)) => match phi {
            Some(phi) => phi.bit(&t, s),
            None => Ok(g.is_identity(s) || *s == params.r),
        },
    }
}

/// Evaluates the code f over ball(R − ρ) and checks γ ∈ Supp ⟺ f(γ⁻¹x) = f((γr)⁻¹x) = 1 on ball(R − 2ρ).
pub fn code_patch(w: &WitnessPatch, phi: Option<&Phi>) -> Result<CodeReport> {
    let params = &w.params;
    let g = &params.group;
    let rho = params.rho;
    let eval_radius = w.radius.checked_sub(rho).ok_or_else(|| Error::Precondition("patch radius is below ρ".into()))?;
    let region = ball(g, &g.standard_generating_set(), eval_radius, crate::group::DEFAULT_BALL_CAP)?;
    let mut f: HashMap<Element, bool> = HashMap::new();
    let mut listed = Vec::new();
    for gamma in region.iter() {
        let v = f_value(params, phi, |l| w.patch.get(&g.multiply(gamma, l)).cloned()).map_err(|e| match e {
            Error::Violation { detail, .. } => Error::violation(gamma, detail),
            other => other,
        })?;
        f.insert(gamma.clone(), v);
        listed.push((gamma.clone(), v));
    }
    let mut checked = 0;
    let mut detected = 0;
    if let Some(q) = w.radius.checked_sub(2 * rho) {
        for gamma in region.within(q) {
            let in_support = matches!(w.patch.get(gamma), Some(CSymbol::Step(_)));
            let gr = g.multiply(gamma, &params.r);
            let says = f[gamma] && f[&gr];
            if says != in_support {
                return Err(Error::violation(gamma, format!("support is {in_support} but f-detection says {says}")));
            }
            checked += 1;
            detected += says as usize;
        }
    }
    Ok(CodeReport { f: listed, detection_checked: checked, support_detected: detected, phi_injective: phi.is_some() })
}
