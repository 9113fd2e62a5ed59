use crate::error::{Error, Result};
use crate::group::{ball, set_product, Element, GroupSpec, Lamp};
use num_rational::Ratio;
use std::collections::{BTreeSet, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FolnerFamily {
    /// Word-metric balls.
    Ball,
    /// Lamplighter rectangles {lamps ⊆ [−N,N], position ∈ [−N,N]}.
    Rectangle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolnerCertificate {
    pub group: GroupSpec,
    pub generating_set: Vec<Element>,
    pub family: FolnerFamily,
    pub radius: usize,
    pub set: Vec<Element>,
    /// |FS △ F|
    pub boundary: u64,
    pub ratio: Ratio<u64>,
    pub epsilon: Ratio<u64>,
}

/// |FS △ F| computed through the product set.
pub fn folner_boundary(spec: &GroupSpec, f: &[Element], s: &[Element]) -> u64 {
    let fset: BTreeSet<&Element> = f.iter().collect();
    let fs = set_product(spec, f, s);
    let outside = fs.iter().filter(|x| !fset.contains(x)).count();
    let missed = f.iter().filter(|x| !fs.contains(x)).count();
    (outside + missed) as u64
}

pub fn folner_ratio(spec: &GroupSpec, f: &[Element], s: &[Element]) -> Ratio<u64> {
    Ratio::new(folner_boundary(spec, f, s), f.len() as u64)
}

/// Lamplighter rectangle of half-width `n`, enumerated position-major then by lamp bitmask.
pub fn lamplighter_rectangle(n: usize) -> Result<Vec<Element>> {
    let width = 2 * n + 1;
    if width > 20 {
        return Err(Error::limit(format!("lamplighter rectangle of half-width {n}"), 20));
    }
    let lo = -(n as i64);
    let mut out = Vec::with_capacity((1usize << width) * width);
    for p in 0..width as i64 {
        for mask in 0u32..(1u32 << width) {
            let lamps = (0..width as i64).filter(|i| mask >> i & 1 == 1).map(|i| lo + i).collect();
            out.push(Element::Lamp(Lamp::new(lamps, lo + p)));
        }
    }
    Ok(out)
}

pub fn default_family(spec: &GroupSpec) -> FolnerFamily {
    match spec {
        GroupSpec::Lamplighter => FolnerFamily::Rectangle,
        _ => FolnerFamily::Ball,
    }
}

/// Member of the search family at radius `r`.
pub fn family_set(spec: &GroupSpec, family: FolnerFamily, r: usize, cap: usize) -> Result<Vec<Element>> {
    match family {
        FolnerFamily::Ball => Ok(ball(spec, &spec.standard_generating_set(), r, cap)?.elements().to_vec()),
        FolnerFamily::Rectangle => {
            if *spec != GroupSpec::Lamplighter {
                return Err(Error::InvalidInput("rectangles are defined for the lamplighter group only".into()));
            }
            let rect = lamplighter_rectangle(r)?;
            if rect.len() > cap {
                return Err(Error::limit("lamplighter rectangle", cap as u64));
            }
            Ok(rect)
        }
    }
}

/// Searches the family in increasing radius and returns the first set with ratio < ε.
/// `Ok(None)` is inconclusive: it says nothing about non-amenability.
pub fn folner_search(
    spec: &GroupSpec,
    s: &[Element],
    epsilon: Ratio<u64>,
    r_max: usize,
    cap: usize,
) -> Result<Option<FolnerCertificate>> {
    check_generating_set(spec, s)?;
    if epsilon == Ratio::from_integer(0) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let family = default_family(spec);
    for r in 0..=r_max {
        if let Some(cert) = folner_at(spec, s, epsilon, family, r, cap)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

pub(crate) fn folner_at(
    spec: &GroupSpec,
    s: &[Element],
    epsilon: Ratio<u64>,
    family: FolnerFamily,
    r: usize,
    cap: usize,
) -> Result<Option<FolnerCertificate>> {
    let f = family_set(spec, family, r, cap)?;
    let boundary = folner_boundary(spec, &f, s);
    let ratio = Ratio::new(boundary, f.len() as u64);
    if ratio < epsilon {
        return Ok(Some(FolnerCertificate {
            group: spec.clone(),
            generating_set: s.to_vec(),
            family,
            radius: r,
            set: f,
            boundary,
            ratio,
            epsilon,
        }));
    }
    Ok(None)
}

pub(crate) fn check_generating_set(spec: &GroupSpec, s: &[Element]) -> Result<()> {
    if let Some(bad) = s.iter().find(|x| !spec.contains(x)) {
        return Err(Error::InvalidInput(format!("{bad} is not an element of {spec}")));
    }
    if !spec.is_symmetric(s) {
        return Err(Error::Precondition("S must be symmetric".into()));
    }
    if !s.contains(&spec.identity()) {
        return Err(Error::Precondition("S must contain the identity".into()));
    }
    Ok(())
}

/// Recounts the certificate without forming FS: an element x·s lies outside F, or
/// an element of F has no preimage f·s⁻¹ in F.
pub fn verify_folner(cert: &FolnerCertificate) -> Result<()> {
    let spec = &cert.group;
    let members: HashSet<&Element> = cert.set.iter().collect();
    if members.len() != cert.set.len() || cert.set.is_empty() {
        return Err(Error::Verification("set is empty or has repeated elements".into()));
    }
    let mut outside: HashSet<Element> = HashSet::new();
    for x in &cert.set {
        for s in &cert.generating_set {
            let y = spec.multiply(x, s);
            if !members.contains(&y) {
                outside.insert(y);
            }
        }
    }
    let inverses: Vec<Element> = cert.generating_set.iter().map(|s| spec.inverse(s)).collect();
    let missed = cert.set.iter().filter(|x| !inverses.iter().any(|si| members.contains(&spec.multiply(x, si)))).count();
    let boundary = (outside.len() + missed) as u64;
    if boundary != cert.boundary {
        return Err(Error::Verification(format!("boundary recount {boundary} differs from stored {}", cert.boundary)));
    }
    let ratio = Ratio::new(boundary, cert.set.len() as u64);
    if ratio != cert.ratio {
        return Err(Error::Verification(format!("ratio recount {ratio} differs from stored {}", cert.ratio)));
    }
    if ratio >= cert.epsilon {
        return Err(Error::Verification(format!("ratio {ratio} is not below epsilon {}", cert.epsilon)));
    }
    Ok(())
}
