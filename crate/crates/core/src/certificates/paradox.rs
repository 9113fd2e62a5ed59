use super::expansion::{reach, standard_ball, verify_expansion, ExpansionCertificate};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Letter};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParadoxKind {
    /// Two families of pieces translated by S and by T.
    Xst,
    /// A 2-to-1 T-surjection.
    Xt,
}

/// Cell symbol: which family the cell's translation belongs to, and the translation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceLabel {
    S(Element),
    T(Element),
}

impl PieceLabel {
    pub fn element(&self) -> &Element {
        match self {
            PieceLabel::S(x) | PieceLabel::T(x) => x,
        }
    }

    pub fn parse(spec: &GroupSpec, s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("S", x)) => Ok(PieceLabel::S(spec.parse_element(x)?)),
            Some(("T", x)) => Ok(PieceLabel::T(spec.parse_element(x)?)),
            _ => Err(Error::parse(s, "expected `S:<element>` or `T:<element>`")),
        }
    }
}

impl fmt::Display for PieceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceLabel::S(x) => write!(f, "S:{x}"),
            PieceLabel::T(x) => write!(f, "T:{x}"),
        }
    }
}

/// A patch on ball(R) whose pieces re-tile every interior point.
///
/// For `Xst`, every g in ball(interior_radius) is hit exactly once by h ↦ h·x_h among
/// S-labelled cells and exactly once among T-labelled cells. For `Xt`, exactly twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParadoxCertificate {
    pub kind: ParadoxKind,
    pub group: GroupSpec,
    pub s: Vec<Element>,
    pub t: Vec<Element>,
    pub radius: usize,
    pub interior_radius: usize,
    pub cells: Vec<(Element, PieceLabel)>,
}

/// Independent recount of the partition conditions from the raw cells.
pub fn verify_paradox(cert: &ParadoxCertificate, cap: usize) -> Result<()> {
    let spec = &cert.group;
    let region = standard_ball(spec, cert.radius, cap)?;
    let mut translations = cert.t.clone();
    translations.extend(cert.s.iter().cloned());
    if cert.interior_radius + reach(spec, &translations) > cert.radius {
        return Err(Error::Verification("interior radius leaves no room for the translations".into()));
    }
    let s: BTreeSet<&Element> = cert.s.iter().collect();
    let t: BTreeSet<&Element> = cert.t.iter().collect();
    let mut seen: BTreeSet<&Element> = BTreeSet::new();
    let mut hits_s: HashMap<Element, usize> = HashMap::new();
    let mut hits_t: HashMap<Element, usize> = HashMap::new();
    for (h, label) in &cert.cells {
        if !region.contains(h) {
            return Err(Error::Verification(format!("cell {h} lies outside ball({})", cert.radius)));
        }
        if !seen.insert(h) {
            return Err(Error::Verification(format!("cell {h} labelled twice")));
        }
        let (ok, hits) = match (cert.kind, label) {
            (ParadoxKind::Xst, PieceLabel::S(x)) => (s.contains(x), &mut hits_s),
            (_, PieceLabel::T(x)) => (t.contains(x), &mut hits_t),
            (ParadoxKind::Xt, PieceLabel::S(_)) => (false, &mut hits_s),
        };
        if !ok {
            return Err(Error::Verification(format!("cell {h} carries foreign symbol {label}")));
        }
        *hits.entry(spec.multiply(h, label.element())).or_default() += 1;
    }
    for g in region.within(cert.interior_radius) {
        let cs = hits_s.get(g).copied().unwrap_or(0);
        let ct = hits_t.get(g).copied().unwrap_or(0);
        match cert.kind {
            ParadoxKind::Xst if cs != 1 || ct != 1 => {
                return Err(Error::violation(
                    g,
                    format!("covered {cs} times by the S-family and {ct} times by the T-family"),
                ));
            }
            ParadoxKind::Xt if ct != 2 => {
                return Err(Error::violation(g, format!("{ct} preimages, expected 2")));
            }
            _ => {}
        }
    }
    Ok(())
}

/// X_T patch x_g = g⁻¹p(g) on ball(R). Cells outside the certificate's domain lie on
/// the outer shell and get the identity, so they only point at themselves.
pub fn xt_patch_from_expansion(cert: &ExpansionCertificate, cap: usize) -> Result<ParadoxCertificate> {
    verify_expansion(cert, cap)?;
    let spec = &cert.group;
    let interior = cert
        .interior_radius()
        .ok_or_else(|| Error::Precondition("radius smaller than the reach of S leaves no interior".into()))?;
    let p: HashMap<&Element, &Element> = cert.assignment.iter().map(|(g, h)| (g, h)).collect();
    let region = standard_ball(spec, cert.radius, cap)?;
    let cells = region
        .iter()
        .map(|g| {
            let x = match p.get(g) {
                Some(h) => spec.quotient(g, h),
                None => spec.identity(),
            };
            (g.clone(), PieceLabel::T(x))
        })
        .collect();
    let out = ParadoxCertificate {
        kind: ParadoxKind::Xt,
        group: spec.clone(),
        s: Vec::new(),
        t: cert.generating_set.clone(),
        radius: cert.radius,
        interior_radius: interior,
        cells,
    };
    verify_paradox(&out, cap)?;
    Ok(out)
}

/// Membership predicates on canonical forms, used to describe pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Identity,
    /// Reduced word whose last letter is the given one.
    EndsWith(Letter),
    /// Reduced word whose first letter is the given one.
    StartsWith(Letter),
    /// {ℓⁿ : n ≥ 0}
    Powers(Letter),
    Union(Vec<Predicate>),
    Minus(Box<Predicate>, Box<Predicate>),
    Elements(BTreeSet<Element>),
}

impl Predicate {
    pub fn holds(&self, x: &Element) -> bool {
        match self {
            Predicate::Identity => match x {
                Element::Word(w) => w.is_empty(),
                Element::Vector(v) => v.iter().all(|&c| c == 0),
                Element::Lamp(l) => l.lamps.is_empty() && l.position == 0,
                Element::Alternating(s) => s.is_empty(),
                Element::Pair(a, b) => Predicate::Identity.holds(a) && Predicate::Identity.holds(b),
            },
            Predicate::EndsWith(l) => x.as_word().and_then(|w| w.last()) == Some(*l),
            Predicate::StartsWith(l) => x.as_word().and_then(|w| w.first()) == Some(*l),
            Predicate::Powers(l) => x.as_word().is_some_and(|w| w.letters().iter().all(|c| c == l)),
            Predicate::Union(ps) => ps.iter().any(|p| p.holds(x)),
            Predicate::Minus(a, b) => a.holds(x) && !b.holds(x),
            Predicate::Elements(set) => set.contains(x),
        }
    }

    /// Parses `id`, `ends(a)`, `starts(b⁻¹)`, `powers(a^-1)`, `union(p, q, ..)`,
    /// `minus(p, q)` and `set(x, y, ..)`.
    pub fn parse(spec: &GroupSpec, s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "id" {
            return Ok(Predicate::Identity);
        }
        let (head, body) = s
            .split_once('(')
            .and_then(|(h, r)| r.strip_suffix(')').map(|b| (h.trim(), b)))
            .ok_or_else(|| Error::parse(s, "expected `name(arguments)`"))?;
        let args = split_args(body);
        let letter = |a: &str| -> Result<Letter> {
            match spec.parse_element(a)? {
                Element::Word(w) if w.len() == 1 => Ok(w.letters()[0]),
                _ => Err(Error::parse(a, "expected a single free-group letter")),
            }
        };
        match (head, args.as_slice()) {
            ("ends", [a]) => Ok(Predicate::EndsWith(letter(a)?)),
            ("starts", [a]) => Ok(Predicate::StartsWith(letter(a)?)),
            ("powers", [a]) => Ok(Predicate::Powers(letter(a)?)),
            ("union", ps) => Ok(Predicate::Union(ps.iter().map(|p| Predicate::parse(spec, p)).collect::<Result<_>>()?)),
            ("minus", [a, b]) => {
                Ok(Predicate::Minus(Box::new(Predicate::parse(spec, a)?), Box::new(Predicate::parse(spec, b)?)))
            }
            ("set", xs) => Ok(Predicate::Elements(xs.iter().map(|x| spec.parse_element(x)).collect::<Result<_>>()?)),
            _ => Err(Error::parse(s, format!("unknown predicate `{head}` or wrong arity"))),
        }
    }
}

fn split_args(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if !body[start..].trim().is_empty() {
        out.push(body[start..].trim());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub label: PieceLabel,
    pub predicate: Predicate,
}

/// Labels ball(R) from the pieces and verifies both partition conditions on
/// ball(R − reach(S ∪ T)). Every cell must lie in exactly one piece.
pub fn xst_certificate(
    spec: &GroupSpec,
    s: &[Element],
    t: &[Element],
    pieces: &[Piece],
    r: usize,
    cap: usize,
) -> Result<ParadoxCertificate> {
    let expected: BTreeSet<PieceLabel> =
        s.iter().map(|x| PieceLabel::S(x.clone())).chain(t.iter().map(|x| PieceLabel::T(x.clone()))).collect();
    let given: BTreeSet<PieceLabel> = pieces.iter().map(|p| p.label.clone()).collect();
    if given != expected || given.len() != pieces.len() {
        return Err(Error::InvalidInput("exactly one piece is needed per element of S and of T".into()));
    }
    let mut translations = s.to_vec();
    translations.extend_from_slice(t);
    let rho = reach(spec, &translations);
    let interior = r
        .checked_sub(rho)
        .ok_or_else(|| Error::Precondition(format!("radius {r} is below the translation reach {rho}")))?;
    let region = standard_ball(spec, r, cap)?;
    let mut cells = Vec::with_capacity(region.len());
    for g in region.iter() {
        let mut owners = pieces.iter().filter(|p| p.predicate.holds(g));
        match (owners.next(), owners.next()) {
            (Some(p), None) => cells.push((g.clone(), p.label.clone())),
            (None, _) => return Err(Error::violation(g, "not covered by any piece")),
            (Some(p), Some(q)) => {
                return Err(Error::violation(g, format!("lies in both {} and {}", p.label, q.label)));
            }
        }
    }
    let cert = ParadoxCertificate {
        kind: ParadoxKind::Xst,
        group: spec.clone(),
        s: s.to_vec(),
        t: t.to_vec(),
        radius: r,
        interior_radius: interior,
        cells,
    };
    verify_paradox(&cert, cap)?;
    Ok(cert)
}

/// Reference four-piece decomposition of F₂ with S = {e, a}, T = {e, b}.
///
/// With E(x) the reduced words ending in x and C = {a⁻ⁿ : n ≥ 0}:
/// A_e = E(a) ∪ C, A_a = E(a⁻¹) ∖ C, B_e = E(b), B_b = E(b⁻¹).
pub fn reference_f2_pieces() -> (GroupSpec, Vec<Element>, Vec<Element>, Vec<Piece>) {
    let f2 = GroupSpec::free(2);
    let a = Letter::new(0, false);
    let b = Letter::new(1, false);
    let e = f2.identity();
    let ea = f2.evaluate("a").unwrap();
    let eb = f2.evaluate("b").unwrap();
    let c = Predicate::Powers(a.inverse());
    let pieces = vec![
        Piece { label: PieceLabel::S(e.clone()), predicate: Predicate::Union(vec![Predicate::EndsWith(a), c.clone()]) },
        Piece {
            label: PieceLabel::S(ea.clone()),
            predicate: Predicate::Minus(Box::new(Predicate::EndsWith(a.inverse())), Box::new(c)),
        },
        Piece { label: PieceLabel::T(e.clone()), predicate: Predicate::EndsWith(b) },
        Piece { label: PieceLabel::T(eb.clone()), predicate: Predicate::EndsWith(b.inverse()) },
    ];
    (f2, vec![e.clone(), ea], vec![e, eb], pieces)
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TarskiReport {
    /// Upper bound on k: min |S| + |T| over X_{S,T} certificates.
    pub k_upper: Option<usize>,
    /// Upper bound on l: min of |T| over X_T certificates and |S ∪ T| over X_{S,T} certificates.
    pub l_upper: Option<usize>,
    /// Whether l ≤ k − 1 holds for the reported bounds, when both exist.
    pub l_below_k: Option<bool>,
}

pub fn tarski_report(certs: &[ParadoxCertificate], cap: usize) -> Result<TarskiReport> {
    let mut report = TarskiReport::default();
    for c in certs {
        verify_paradox(c, cap)?;
        let (k, l) = match c.kind {
            ParadoxKind::Xst => {
                let union: BTreeSet<&Element> = c.s.iter().chain(&c.t).collect();
                (Some(c.s.len() + c.t.len()), union.len())
            }
            ParadoxKind::Xt => (None, c.t.len()),
        };
        if let Some(k) = k {
            report.k_upper = Some(report.k_upper.map_or(k, |old| old.min(k)));
        }
        report.l_upper = Some(report.l_upper.map_or(l, |old| old.min(l)));
    }
    if let (Some(k), Some(l)) = (report.k_upper, report.l_upper) {
        report.l_below_k = Some(l < k);
    }
    Ok(report)
}
