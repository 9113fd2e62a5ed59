use anyhow::{anyhow, bail, Context, Result};
use flowcert::certificates::{
    parse_ratio, verify_expansion, verify_folner, verify_paradox, ExpansionCertificate, FolnerCertificate,
    FolnerFamily, ParadoxCertificate, ParadoxKind, PieceLabel,
};
use flowcert::compressible::{
    code_patch, compressible_spec, pattern_injection, select_parameters, verify_compression, BuilderMode, CSymbol,
    WitnessPatch,
};
use flowcert::group::{Element, GroupSpec};
use flowcert::subshift::{patch_check, Patch, PatchCheck};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const FORMAT_VERSION: u32 = 1;

/// Every certificate file: a version, a kind tag and the kind's fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub format_version: u32,
    #[serde(flatten)]
    pub body: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Folner(FolnerBody),
    Expansion(ExpansionBody),
    Paradox(ParadoxBody),
    CompressibleWitness(WitnessBody),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerBody {
    pub group: GroupSpec,
    pub generating_set: Vec<String>,
    pub family: FolnerFamily,
    pub radius: usize,
    pub boundary: u64,
    pub ratio: String,
    pub epsilon: String,
    pub set: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionBody {
    pub group: GroupSpec,
    pub generating_set: Vec<String>,
    pub radius: usize,
    pub assignment: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParadoxBody {
    pub paradox_kind: ParadoxKind,
    pub group: GroupSpec,
    pub s: Vec<String>,
    pub t: Vec<String>,
    pub radius: usize,
    pub interior_radius: usize,
    pub cells: Vec<(String, String)>,
}

/// Toy witness with its parameter record; the checks' conclusions are stored for comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBody {
    pub group: GroupSpec,
    pub rho: usize,
    pub n: u64,
    pub radius: usize,
    pub support_points: usize,
    pub interior_counts: usize,
    pub detection_checked: usize,
    pub support_detected: usize,
    pub phi_injective: bool,
    pub cells: Vec<(String, String)>,
}

fn strings(xs: &[Element]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn elements(g: &GroupSpec, xs: &[String]) -> Result<Vec<Element>> {
    xs.iter().map(|s| g.parse_element(s).with_context(|| format!("element `{s}`"))).collect()
}

impl Envelope {
    pub fn new(body: Certificate) -> Self {
        Envelope { format_version: FORMAT_VERSION, body }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(text).context("not a certificate file")?;
        if env.format_version != FORMAT_VERSION {
            bail!("unsupported format version {}", env.format_version);
        }
        Ok(env)
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            Certificate::Folner(_) => "folner",
            Certificate::Expansion(_) => "expansion",
            Certificate::Paradox(_) => "paradox",
            Certificate::CompressibleWitness(_) => "compressible-witness",
        }
    }
}

pub fn folner_body(c: &FolnerCertificate) -> Certificate {
    Certificate::Folner(FolnerBody {
        group: c.group.clone(),
        generating_set: strings(&c.generating_set),
        family: c.family,
        radius: c.radius,
        boundary: c.boundary,
        ratio: c.ratio.to_string(),
        epsilon: c.epsilon.to_string(),
        set: strings(&c.set),
    })
}

pub fn expansion_body(c: &ExpansionCertificate) -> Certificate {
    Certificate::Expansion(ExpansionBody {
        group: c.group.clone(),
        generating_set: strings(&c.generating_set),
        radius: c.radius,
        assignment: c.assignment.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    })
}

pub fn paradox_body(c: &ParadoxCertificate) -> Certificate {
    Certificate::Paradox(ParadoxBody {
        paradox_kind: c.kind,
        group: c.group.clone(),
        s: strings(&c.s),
        t: strings(&c.t),
        radius: c.radius,
        interior_radius: c.interior_radius,
        cells: c.cells.iter().map(|(g, l)| (g.to_string(), l.to_string())).collect(),
    })
}

pub fn witness_body(
    w: &WitnessPatch,
    interior_counts: usize,
    detection: (usize, usize),
    phi_injective: bool,
) -> Certificate {
    Certificate::CompressibleWitness(WitnessBody {
        group: w.params.group.clone(),
        rho: w.params.rho,
        n: w.params.n,
        radius: w.radius,
        support_points: w.map.len(),
        interior_counts,
        detection_checked: detection.0,
        support_detected: detection.1,
        phi_injective,
        cells: w.patch.cells().iter().map(|(g, s)| (g.to_string(), s.to_string())).collect(),
    })
}

pub fn parse_csymbol(g: &GroupSpec, s: &str) -> Result<CSymbol> {
    if s == "*" {
        Ok(CSymbol::Star)
    } else {
        Ok(CSymbol::Step(g.parse_element(s).with_context(|| format!("symbol `{s}`"))?))
    }
}

/// What a successful re-verification established, one line per fact.
pub fn verify(env: &Envelope, cap: usize) -> Result<Vec<String>> {
    match &env.body {
        Certificate::Folner(b) => {
            let g = &b.group;
            let cert = FolnerCertificate {
                group: g.clone(),
                generating_set: elements(g, &b.generating_set)?,
                family: b.family,
                radius: b.radius,
                set: elements(g, &b.set)?,
                boundary: b.boundary,
                ratio: parse_ratio(&b.ratio)?,
                epsilon: parse_ratio(&b.epsilon)?,
            };
            verify_folner(&cert)?;
            Ok(vec![
                format!("folner set of {} elements in {}", cert.set.len(), g),
                format!("|FS △ F| = {}, ratio {} < {}", cert.boundary, cert.ratio, cert.epsilon),
            ])
        }
        Certificate::Expansion(b) => {
            let g = &b.group;
            let assignment = b
                .assignment
                .iter()
                .map(|(x, y)| Ok((g.parse_element(x)?, g.parse_element(y)?)))
                .collect::<Result<Vec<_>>>()?;
            let cert = ExpansionCertificate {
                group: g.clone(),
                generating_set: elements(g, &b.generating_set)?,
                radius: b.radius,
                assignment,
            };
            verify_expansion(&cert, cap)?;
            Ok(vec![format!(
                "2-to-1 map onto ball({}) of {} with {} assigned cells",
                cert.radius,
                g,
                cert.assignment.len()
            )])
        }
        Certificate::Paradox(b) => {
            let g = &b.group;
            let cells = b
                .cells
                .iter()
                .map(|(x, l)| Ok((g.parse_element(x)?, PieceLabel::parse(g, l)?)))
                .collect::<Result<Vec<_>>>()?;
            let cert = ParadoxCertificate {
                kind: b.paradox_kind,
                group: g.clone(),
                s: elements(g, &b.s)?,
                t: elements(g, &b.t)?,
                radius: b.radius,
                interior_radius: b.interior_radius,
                cells,
            };
            verify_paradox(&cert, cap)?;
            Ok(vec![format!("{:?} partition conditions hold on ball({}) of {}", cert.kind, cert.interior_radius, g)])
        }
        Certificate::CompressibleWitness(b) => verify_witness(b, cap),
    }
}

fn verify_witness(b: &WitnessBody, cap: usize) -> Result<Vec<String>> {
    let g = &b.group;
    let params = select_parameters(g, b.rho, BuilderMode::Toy, b.n, cap)?;
    let cells =
        b.cells.iter().map(|(x, s)| Ok((g.parse_element(x)?, parse_csymbol(g, s)?))).collect::<Result<Vec<_>>>()?;
    let patch = Patch::total(cells)?;
    let map: Vec<(Element, Element)> =
        patch.cells().iter().filter_map(|(a, s)| s.step().map(|t| (a.clone(), g.multiply(a, t)))).collect();
    let w = WitnessPatch { params: params.clone(), radius: b.radius, patch, map };
    let spec = compressible_spec(&params, cap)?;
    if let PatchCheck::ViolatedWindow(at) = patch_check(&spec, &w.patch)? {
        bail!("local rule fails at {at}");
    }
    let ev = verify_compression(&w)?;
    let used: BTreeSet<Element> = w.map.iter().map(|(a, pa)| g.quotient(a, pa)).collect();
    let phi = pattern_injection(&params, &used).ok();
    let code = code_patch(&w, phi.as_ref())?;
    let found = (w.map.len(), ev.table.len(), code.detection_checked, code.support_detected, code.phi_injective);
    let claimed = (b.support_points, b.interior_counts, b.detection_checked, b.support_detected, b.phi_injective);
    if found != claimed {
        return Err(anyhow!("recomputed summary {found:?} differs from the file's {claimed:?}"));
    }
    Ok(vec![
        format!("local rule holds on every window inside ball({})", b.radius),
        format!("{} interior support points with exactly 2 preimages", ev.table.len()),
        format!(
            "support detection agrees at {} points ({} in the support)",
            code.detection_checked, code.support_detected
        ),
    ])
}
