use crate::certificates::{expansion_certificate, ExpansionOutcome};
use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec, DEFAULT_BALL_CAP};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeSet;
use std::ops::RangeInclusive;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuilderMode {
    /// The inequality chain is enforced; only arithmetic and derivation steps run.
    Faithful,
    /// Any n ≥ 1; small enough that witness patches fit in memory.
    Toy,
}

/// 2^e as a big integer.
fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// n ≥ 4 + 3·log₂ s, decided exactly as 2^(n−4) ≥ s³.
fn above_lower(s: u64, n: u64) -> bool {
    n >= 4 && pow2(n - 4) >= BigUint::from(s).pow(3)
}

/// n ≤ (s − 6) / (3·log₂ s), decided exactly as s^(3n) ≤ 2^(s−6).
fn below_upper(s: u64, n: u64) -> bool {
    s >= 6 && BigUint::from(s).pow((3 * n) as u32) <= pow2(s - 6)
}

/// The integers n with 4 + 3·log₂ s ≤ n ≤ (s − 6)/(3·log₂ s), or `None` when the bounds cross.
pub fn parameter_window(s: u64) -> Option<RangeInclusive<u64>> {
    if s < 6 {
        return None;
    }
    let log = (s as f64).log2();
    // float estimates, then exact correction
    let mut lo = (4.0 + 3.0 * log).ceil().max(4.0) as u64;
    while lo > 4 && above_lower(s, lo - 1) {
        lo -= 1;
    }
    while !above_lower(s, lo) {
        lo += 1;
    }
    let mut hi = ((s - 6) as f64 / (3.0 * log)).floor() as u64;
    while below_upper(s, hi + 1) {
        hi += 1;
    }
    while hi > 0 && !below_upper(s, hi) {
        hi -= 1;
    }
    if !below_upper(s, hi) || lo > hi {
        return None;
    }
    Some(lo..=hi)
}

/// Greedy independent set in the graph on S where s ~ s′ iff s′ = s·r^{±1} and {s, s′} ≠ {1, r},
/// seeded with {1, r} and extended in the given order.
pub fn independent_subset(spec: &GroupSpec, s: &[Element], r: &Element) -> Result<Vec<Element>> {
    let e = spec.identity();
    if !s.contains(&e) || !s.contains(r) {
        return Err(Error::Precondition("S must contain the identity and r".into()));
    }
    if spec.is_identity(&spec.multiply(r, r)) {
        return Err(Error::Precondition(format!("{r} has order at most 2")));
    }
    let r_inv = spec.inverse(r);
    let adjacent = |x: &Element, y: &Element| -> bool {
        let pair_is_seed = (spec.is_identity(x) && y == r) || (spec.is_identity(y) && x == r);
        !pair_is_seed && (spec.multiply(x, r) == *y || spec.multiply(x, &r_inv) == *y)
    };
    let mut chosen = vec![e.clone(), r.clone()];
    for x in s {
        if !chosen.contains(x) && chosen.iter().all(|c| !adjacent(c, x)) {
            chosen.push(x.clone());
        }
    }
    if 3 * chosen.len() < s.len() {
        return Err(Error::Verification(format!("independent set of size {} is below |S|/3", chosen.len())));
    }
    Ok(chosen)
}

/// The shortlex rank of g in a free group: the number of reduced words before it,
/// counting all shorter words first.
pub fn free_shortlex_rank(rank: usize, g: &Element) -> Result<BigUint> {
    let w = g.as_word().ok_or_else(|| Error::InvalidInput(format!("{g} is not a free-group word")))?;
    let k = 2 * rank as u64;
    let words_of_len = |l: u32| -> BigUint {
        if l == 0 {
            BigUint::one()
        } else {
            BigUint::from(k) * BigUint::from(k - 1).pow(l - 1)
        }
    };
    let len = w.len() as u32;
    let mut out: BigUint = (0..len).map(words_of_len).sum();
    let letters = w.letters();
    for (i, l) in letters.iter().enumerate() {
        let rest = BigUint::from(k - 1).pow(len - 1 - i as u32);
        // letters are ordered a < a⁻¹ < b < b⁻¹ < …; index = 2·generator + inverse bit
        let idx = |x: crate::group::Letter| 2 * x.generator() as u64 + x.is_inverse() as u64;
        for c in 0..idx(*l) {
            let forbidden = i > 0 && {
                let prev = letters[i - 1].inverse();
                idx(prev) == c
            };
            if !forbidden {
                out += &rest;
            }
        }
    }
    Ok(out)
}

/// Shortlex rank of g: closed form for free groups, ball position otherwise.
pub fn shortlex_rank(spec: &GroupSpec, g: &Element, cap: usize) -> Result<BigUint> {
    if let GroupSpec::Free { rank } = spec {
        return free_shortlex_rank(*rank, g);
    }
    let gens = spec.standard_generating_set();
    let mut r = 0;
    loop {
        let b = ball(spec, &gens, r, cap)?;
        if let Some(p) = b.position(g) {
            return Ok(BigUint::from(p));
        }
        r += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiDomain {
    /// Rank among all words of length ≤ n·ρ.
    AllOfT,
    /// Rank among an explicit symbol list (toy mode).
    Used(Vec<Element>),
}

/// Injection T → 2^{S′} with the bits at 1 and r forced to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phi {
    pub group: GroupSpec,
    pub s_prime: Vec<Element>,
    pub r: Element,
    pub domain: PhiDomain,
}

impl Phi {
    pub fn free_bits(&self) -> usize {
        self.s_prime.len() - 2
    }

    /// Bits indexed like `s_prime`.
    pub fn code(&self, t: &Element) -> Result<Vec<bool>> {
        let rank = match &self.domain {
            PhiDomain::AllOfT => shortlex_rank(&self.group, t, DEFAULT_BALL_CAP)?,
            PhiDomain::Used(list) => BigUint::from(
                list.iter()
                    .position(|x| x == t)
                    .ok_or_else(|| Error::Precondition(format!("φ is not defined at {t}")))?,
            ),
        };
        if rank.bits() > self.free_bits() as u64 {
            return Err(Error::Precondition(format!("φ capacity exceeded: rank of {t} needs {} bits", rank.bits())));
        }
        let mut bit = 0u64;
        Ok(self
            .s_prime
            .iter()
            .map(|s| {
                if self.group.is_identity(s) || *s == self.r {
                    true
                } else {
                    let v = rank.bit(bit);
                    bit += 1;
                    v
                }
            })
            .collect())
    }

    /// φ(t)_s for s ∈ S′; false off S′.
    pub fn bit(&self, t: &Element, s: &Element) -> Result<bool> {
        match self.s_prime.iter().position(|x| x == s) {
            Some(i) => Ok(self.code(t)?[i]),
            None => Ok(false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuilderParams {
    pub group: GroupSpec,
    pub mode: BuilderMode,
    /// S = ball(rho)
    pub rho: usize,
    pub s_size: usize,
    pub n: u64,
    pub r: Element,
    pub s_prime: Vec<Element>,
}

impl BuilderParams {
    /// T = Sⁿ = ball(n·ρ); membership is a word-length test.
    pub fn t_radius(&self) -> usize {
        self.n as usize * self.rho
    }

    /// Radius of the local rule: S³ for disjointness and maximality, T for the 2-to-1 count.
    pub fn rule_radius(&self) -> usize {
        (3 * self.rho).max(self.t_radius())
    }
}

/// First element of the standard generating set with r² ≠ e.
pub fn first_non_involution(spec: &GroupSpec) -> Result<Element> {
    spec.standard_generating_set()
        .into_iter()
        .find(|g| !spec.is_identity(&spec.multiply(g, g)))
        .ok_or_else(|| Error::Precondition(format!("every generator of {spec} is an involution")))
}

/// Parameters for S = ball(ρ). Faithful mode requires an expansion certificate for S
/// and a nonempty parameter window; toy mode takes `toy_n`.
pub fn select_parameters(
    spec: &GroupSpec,
    rho: usize,
    mode: BuilderMode,
    toy_n: u64,
    cap: usize,
) -> Result<BuilderParams> {
    if rho == 0 {
        return Err(Error::Precondition("ρ must be at least 1".into()));
    }
    let r = first_non_involution(spec)?;
    let s = ball(spec, &spec.standard_generating_set(), rho, cap)?.elements().to_vec();
    let n = match mode {
        BuilderMode::Toy => {
            if toy_n == 0 {
                return Err(Error::Precondition("n must be at least 1".into()));
            }
            toy_n
        }
        BuilderMode::Faithful => {
            // largest radius R ≤ ρ whose expansion graph fits the cap
            let mut radius = rho;
            while radius > 1 && ball_size(spec, radius + rho, cap).is_none() {
                radius -= 1;
            }
            match expansion_certificate(spec, &s, radius, cap)? {
                ExpansionOutcome::Certificate(_) => {}
                ExpansionOutcome::Violator(v) => {
                    return Err(Error::Precondition(format!(
                        "expansion violator at radius {}: |F·S| = {} < 2·{}",
                        v.radius,
                        v.neighborhood,
                        v.set.len()
                    )))
                }
            }
            let window = parameter_window(s.len() as u64)
                .ok_or_else(|| Error::Precondition(format!("parameter window is empty for |S| = {}", s.len())))?;
            *window.start()
        }
    };
    let s_prime = independent_subset(spec, &s, &r)?;
    if mode == BuilderMode::Faithful {
        // log₂|T| ≤ n·log₂|S| ≤ |S′| − 2
        if BigUint::from(s.len()).pow(n as u32) > pow2(s_prime.len() as u64 - 2) {
            return Err(Error::Precondition("φ capacity exceeded: |S|ⁿ > 2^(|S′|−2)".into()));
        }
    }
    Ok(BuilderParams { group: spec.clone(), mode, rho, s_size: s.len(), n, r, s_prime })
}

fn ball_size(spec: &GroupSpec, r: usize, cap: usize) -> Option<usize> {
    ball(spec, &spec.standard_generating_set(), r, cap).ok().map(|b| b.len())
}

/// φ for the given parameters. Faithful: rank among all of T, with the capacity
/// already checked. Toy: rank among `used`, which must fit in |S′| − 2 bits.
pub fn pattern_injection(params: &BuilderParams, used: &BTreeSet<Element>) -> Result<Phi> {
    let domain = match params.mode {
        BuilderMode::Faithful => PhiDomain::AllOfT,
        BuilderMode::Toy => {
            let free = params.s_prime.len() - 2;
            if (used.len() as u128) > (1u128 << free.min(127)) {
                return Err(Error::Precondition(format!(
                    "φ capacity exceeded: {} symbols need more than {free} free bits",
                    used.len()
                )));
            }
            let t = ball(&params.group, &params.group.standard_generating_set(), params.t_radius(), DEFAULT_BALL_CAP)?;
            if let Some(bad) = used.iter().find(|u| !t.contains(u)) {
                return Err(Error::InvalidInput(format!("{bad} is not in T")));
            }
            let mut list: Vec<Element> = used.iter().cloned().collect();
            list.sort_by_key(|u| t.position(u));
            PhiDomain::Used(list)
        }
    };
    Ok(Phi { group: params.group.clone(), s_prime: params.s_prime.clone(), r: params.r.clone(), domain })
}
