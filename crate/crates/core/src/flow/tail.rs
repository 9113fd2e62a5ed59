use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec, Letter, DEFAULT_BALL_CAP};
use std::collections::{HashMap, VecDeque};
use std::fmt;

pub type Bits = Vec<u8>;

pub fn parse_bits(s: &str) -> Result<Bits> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse { input: s.into(), reason: format!("`{c}` is not a bit") }),
        })
        .collect()
}

pub fn format_bits(x: &[u8]) -> String {
    x.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Sum of 2^−|w| over the code, as a fraction with denominator 2^max_len; complete iff it is 1.
fn is_complete_prefix_code(words: &[&[u8]]) -> bool {
    let prefix_free = words
        .iter()
        .enumerate()
        .all(|(i, u)| !u.is_empty() && words.iter().enumerate().all(|(j, v)| i == j || !v.starts_with(u)));
    let max = words.iter().map(|w| w.len()).max().unwrap_or(0);
    prefix_free && max < 64 && words.iter().map(|w| 1u64 << (max - w.len())).sum::<u64>() == 1u64 << max
}

/// A bijection between two complete prefix codes, acting by u⌢x ↦ v⌢x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixMap {
    rules: Vec<(Bits, Bits)>,
}

impl PrefixMap {
    pub fn new(rules: Vec<(Bits, Bits)>) -> Result<Self> {
        let sources: Vec<&[u8]> = rules.iter().map(|r| r.0.as_slice()).collect();
        let targets: Vec<&[u8]> = rules.iter().map(|r| r.1.as_slice()).collect();
        if rules.iter().any(|(u, v)| u.iter().chain(v).any(|&b| b > 1)) {
            return Err(Error::InvalidInput("rule words must be binary".into()));
        }
        if !is_complete_prefix_code(&sources) || !is_complete_prefix_code(&targets) {
            return Err(Error::InvalidInput("sources and targets must both be complete prefix codes".into()));
        }
        Ok(PrefixMap { rules })
    }

    pub fn rules(&self) -> &[(Bits, Bits)] {
        &self.rules
    }

    pub fn inverse(&self) -> PrefixMap {
        PrefixMap { rules: self.rules.iter().map(|(u, v)| (v.clone(), u.clone())).collect() }
    }

    /// The rewritten string and the length of the prefix read, or `None` when x is a
    /// proper prefix of a source word.
    pub fn rewrite(&self, x: &[u8]) -> Option<(Bits, usize)> {
        let (u, v) = self.rules.iter().find(|(u, _)| x.starts_with(u))?;
        let mut out = v.clone();
        out.extend_from_slice(&x[u.len()..]);
        Some((out, u.len()))
    }
}

/// Generators of the F₂ action on binary strings and their inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TailGen {
    G1,
    G1Inv,
    G2,
    G2Inv,
}

impl TailGen {
    pub const ALL: [TailGen; 4] = [TailGen::G1, TailGen::G1Inv, TailGen::G2, TailGen::G2Inv];

    pub fn inverse(self) -> TailGen {
        match self {
            TailGen::G1 => TailGen::G1Inv,
            TailGen::G1Inv => TailGen::G1,
            TailGen::G2 => TailGen::G2Inv,
            TailGen::G2Inv => TailGen::G2,
        }
    }

    /// g₁: i⌢x ↦ (1−i)⌢x; g₂: 0 ↦ 00, 11 ↦ 1, 10 ↦ 01.
    pub fn prefix_map(self) -> PrefixMap {
        let flip = PrefixMap { rules: vec![(vec![0], vec![1]), (vec![1], vec![0])] };
        let g2 = PrefixMap { rules: vec![(vec![0], vec![0, 0]), (vec![1, 1], vec![1]), (vec![1, 0], vec![0, 1])] };
        match self {
            TailGen::G1 | TailGen::G1Inv => flip,
            TailGen::G2 => g2,
            TailGen::G2Inv => g2.inverse(),
        }
    }

    /// a ↦ g₁, b ↦ g₂.
    fn from_letter(l: Letter) -> TailGen {
        match (l.generator(), l.is_inverse()) {
            (0, false) => TailGen::G1,
            (0, true) => TailGen::G1Inv,
            (_, false) => TailGen::G2,
            (_, true) => TailGen::G2Inv,
        }
    }
}

impl fmt::Display for TailGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailGen::G1 => "g1",
            TailGen::G1Inv => "g1^-1",
            TailGen::G2 => "g2",
            TailGen::G2Inv => "g2^-1",
        })
    }
}

/// Whitespace- or comma-separated tokens g1, g2, g1^-1, g2^-1 (also g1⁻¹).
pub fn parse_tail_word(s: &str) -> Result<Vec<TailGen>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "g1" => Ok(TailGen::G1),
            "g2" => Ok(TailGen::G2),
            "g1^-1" | "g1⁻¹" => Ok(TailGen::G1Inv),
            "g2^-1" | "g2⁻¹" => Ok(TailGen::G2Inv),
            _ => Err(Error::UnknownGenerator(t.into())),
        })
        .collect()
}

pub fn format_tail_word(w: &[TailGen]) -> String {
    w.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailOutcome {
    Value(Bits),
    /// The string ran out before a rule could be matched; `step` counts letters applied.
    Boundary {
        step: usize,
        generator: TailGen,
    },
}

/// w·x with the rightmost letter applied first.
pub fn f2_tail_action(x: &[u8], word: &[TailGen]) -> TailOutcome {
    let mut cur = x.to_vec();
    for (step, g) in word.iter().rev().enumerate() {
        match g.prefix_map().rewrite(&cur) {
            Some((next, _)) => cur = next,
            None => return TailOutcome::Boundary { step, generator: *g },
        }
    }
    TailOutcome::Value(cur)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitOutcome {
    /// `word`·x = y, of minimal length.
    Connected {
        word: Vec<TailGen>,
    },
    NotWithinDepth {
        visited: usize,
        boundary_hits: usize,
    },
}

/// The tail condition x_{m+k} = y_{n+k} read off finite data. The strings are taken to share
/// their continuation, so the condition can only fail on the listed suffixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailCheck {
    pub m: usize,
    pub n: usize,
    /// Length of the compared suffixes.
    pub length: usize,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub outcome: OrbitOutcome,
    pub tail: TailCheck,
}

fn tail_check(x: &[u8], y: &[u8], length: usize) -> TailCheck {
    let (m, n) = (x.len() - length, y.len() - length);
    TailCheck { m, n, length, consistent: x[m..] == y[n..] }
}

type Tree = HashMap<Bits, Option<(Bits, TailGen, usize)>>;

/// Breadth-first tree from x: string ↦ (parent, generator applied, length of x's suffix never read).
fn search(x: &[u8], depth: usize, target: Option<&[u8]>) -> (Tree, usize) {
    let mut seen: Tree = HashMap::from([(x.to_vec(), None)]);
    let mut queue = VecDeque::from([(x.to_vec(), 0usize, x.len())]);
    let mut boundary_hits = 0;
    if target == Some(x) {
        return (seen, 0);
    }
    while let Some((s, d, keep)) = queue.pop_front() {
        if d == depth {
            break;
        }
        for g in TailGen::ALL {
            let Some((next, read)) = g.prefix_map().rewrite(&s) else {
                boundary_hits += 1;
                continue;
            };
            if seen.contains_key(&next) {
                continue;
            }
            let keep = keep.min(s.len() - read);
            seen.insert(next.clone(), Some((s.clone(), g, keep)));
            if target == Some(next.as_slice()) {
                return (seen, boundary_hits);
            }
            queue.push_back((next, d + 1, keep));
        }
    }
    (seen, boundary_hits)
}

/// The connecting word (leftmost letter applied last) and the untouched suffix length.
fn path_to(tree: &Tree, x: &[u8], y: &[u8]) -> (Vec<TailGen>, usize) {
    let keep = match tree.get(y) {
        Some(Some((_, _, k))) => *k,
        _ => x.len(),
    };
    let mut word = Vec::new();
    let mut cur = y.to_vec();
    while let Some(Some((parent, g, _))) = tree.get(&cur) {
        word.push(*g);
        cur = parent.clone();
    }
    (word, keep)
}

/// Breadth-first search over generator applications up to `depth`. A connecting path leaves
/// the last `keep` symbols of x untouched, and the tail condition is checked on those;
/// otherwise it is checked on the longest common suffix.
pub fn f2_orbit_check(x: &[u8], y: &[u8], depth: usize) -> Result<OrbitReport> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidInput("strings must be nonempty".into()));
    }
    let (tree, boundary_hits) = search(x, depth, Some(y));
    if !tree.contains_key(y) {
        let common = x.iter().rev().zip(y.iter().rev()).take_while(|(a, b)| a == b).count();
        return Ok(OrbitReport {
            outcome: OrbitOutcome::NotWithinDepth { visited: tree.len(), boundary_hits },
            tail: tail_check(x, y, common),
        });
    }
    let (word, keep) = path_to(&tree, x, y);
    Ok(OrbitReport { outcome: OrbitOutcome::Connected { word }, tail: tail_check(x, y, keep) })
}

/// Every string within `depth` steps of x, with a connecting word and the tail check.
pub fn orbit_ball(x: &[u8], depth: usize) -> Result<Vec<(Bits, Vec<TailGen>, TailCheck)>> {
    if x.is_empty() {
        return Err(Error::InvalidInput("strings must be nonempty".into()));
    }
    let (tree, _) = search(x, depth, None);
    let mut out: Vec<(Bits, Vec<TailGen>, TailCheck)> = tree
        .keys()
        .map(|y| {
            let (word, keep) = path_to(&tree, x, y);
            (y.clone(), word, tail_check(x, y, keep))
        })
        .collect();
    out.sort_by(|a, b| (a.1.len(), &a.0).cmp(&(b.1.len(), &b.0)));
    Ok(out)
}

/// First-bit labels of g·x for g in the F₂ ball of the given radius (breadth-first order),
/// `None` where g·x hits a boundary.
pub struct LabelTable {
    pub radius: usize,
    /// For each ball element after the identity: (index of its suffix, leading letter).
    steps: Vec<(usize, TailGen)>,
}

impl LabelTable {
    pub fn new(radius: usize) -> Result<Self> {
        let f2 = GroupSpec::free(2);
        let b = ball(&f2, &f2.standard_generating_set(), radius, DEFAULT_BALL_CAP)?;
        let index: HashMap<&Element, usize> = b.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let steps = b
            .iter()
            .skip(1)
            .map(|g| {
                let w = g.as_word().expect("free-group element");
                let rest = Element::Word(crate::group::Word::from_letters(w.letters()[1..].iter().copied()));
                (index[&rest], TailGen::from_letter(w.letters()[0]))
            })
            .collect();
        Ok(LabelTable { radius, steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Orbit points g·x indexed like the ball.
    pub fn orbit(&self, x: &[u8]) -> Vec<Option<Bits>> {
        let mut out: Vec<Option<Bits>> = Vec::with_capacity(self.len());
        out.push(Some(x.to_vec()));
        for &(parent, g) in &self.steps {
            let v = out[parent].as_ref().and_then(|s| g.prefix_map().rewrite(s).map(|r| r.0));
            out.push(v);
        }
        out
    }

    /// First bits of the orbit points.
    pub fn labels(&self, x: &[u8]) -> Vec<Option<u8>> {
        self.orbit(x).into_iter().map(|s| s.and_then(|s| s.first().copied())).collect()
    }
}

/// Radius-r separation by the first-bit partition: some g with |g| ≤ r has g·x and g·y
/// both defined with different first bits.
pub fn separated(lx: &[Option<u8>], ly: &[Option<u8>]) -> bool {
    lx.iter().zip(ly).any(|(a, b)| matches!((a, b), (Some(p), Some(q)) if p != q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationScan {
    pub radius: usize,
    pub pairs_checked: usize,
    /// Equal-length pairs with identical defined labels throughout the ball.
    pub unseparated: Vec<(Bits, Bits)>,
}

/// All pairs of distinct strings of equal length ≤ `max_len`.
pub fn first_bit_separation_scan(max_len: usize, radius: usize) -> Result<SeparationScan> {
    let table = LabelTable::new(radius)?;
    let mut pairs_checked = 0;
    let mut unseparated = Vec::new();
    for len in 1..=max_len {
        let strings: Vec<Bits> =
            (0u32..1 << len).map(|v| (0..len).map(|i| ((v >> (len - 1 - i)) & 1) as u8).collect()).collect();
        let labels: Vec<Vec<Option<u8>>> = strings.iter().map(|s| table.labels(s)).collect();
        for i in 0..strings.len() {
            for j in i + 1..strings.len() {
                pairs_checked += 1;
                if !separated(&labels[i], &labels[j]) {
                    unseparated.push((strings[i].clone(), strings[j].clone()));
                }
            }
        }
    }
    Ok(SeparationScan { radius, pairs_checked, unseparated })
}
