use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use sha2::{Digest, Sha256};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::sync::Arc;

/// Alphabet symbols: anything printable, hashable and totally ordered.
pub trait Symbol: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync + 'static {}
impl<T: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync + 'static> Symbol for T {}

pub type RuleOracle<A> = Arc<dyn Fn(&[A]) -> bool + Send + Sync>;

/// Local admissibility of a window pattern (listed in window order).
#[derive(Clone)]
pub enum Rule<A> {
    Allowed(HashSet<Vec<A>>),
    Oracle { name: String, check: RuleOracle<A> },
}

impl<A: Symbol> Rule<A> {
    pub fn accepts(&self, pattern: &[A]) -> bool {
        match self {
            Rule::Allowed(set) => set.contains(pattern),
            Rule::Oracle { check, .. } => check(pattern),
        }
    }
}

impl<A> Debug for Rule<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Allowed(set) => write!(f, "Allowed({} patterns)", set.len()),
            Rule::Oracle { name, .. } => write!(f, "Oracle({name})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubshiftSpec<A> {
    pub group: GroupSpec,
    pub alphabet: Vec<A>,
    pub window: Vec<Element>,
    pub rule: Rule<A>,
}

impl<A: Symbol> SubshiftSpec<A> {
    fn checked(group: GroupSpec, alphabet: Vec<A>, window: Vec<Element>, rule: Rule<A>) -> Result<Self> {
        group.validate()?;
        if alphabet.is_empty() {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        if alphabet.iter().collect::<BTreeSet<_>>().len() != alphabet.len() {
            return Err(Error::InvalidInput("repeated alphabet symbol".into()));
        }
        if window.is_empty() || window.iter().collect::<BTreeSet<_>>().len() != window.len() {
            return Err(Error::InvalidInput("window must be a nonempty set".into()));
        }
        if let Some(w) = window.iter().find(|w| !group.contains(w)) {
            return Err(Error::InvalidInput(format!("window element {w} is not in {group}")));
        }
        Ok(SubshiftSpec { group, alphabet, window, rule })
    }

    /// Spec given by its list of allowed window patterns.
    pub fn with_allowed(
        group: GroupSpec,
        alphabet: Vec<A>,
        window: Vec<Element>,
        allowed: impl IntoIterator<Item = Vec<A>>,
    ) -> Result<Self> {
        let letters: HashSet<&A> = alphabet.iter().collect();
        let mut set = HashSet::new();
        for p in allowed {
            if p.len() != window.len() || !p.iter().all(|s| letters.contains(s)) {
                return Err(Error::InvalidInput(format!("allowed pattern {p:?} does not fit alphabet and window")));
            }
            set.insert(p);
        }
        Self::checked(group, alphabet, window, Rule::Allowed(set))
    }

    /// Spec given by a total predicate on window patterns.
    pub fn with_oracle(
        group: GroupSpec,
        alphabet: Vec<A>,
        window: Vec<Element>,
        name: impl Into<String>,
        check: impl Fn(&[A]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::checked(group, alphabet, window, Rule::Oracle { name: name.into(), check: Arc::new(check) })
    }

    pub fn full(group: GroupSpec, alphabet: Vec<A>) -> Result<Self> {
        let e = group.identity();
        Self::with_oracle(group, alphabet, vec![e], "full", |_| true)
    }

    /// Stable digest of the spec's declared data; oracle rules contribute their name.
    pub fn descriptor_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.group.to_string());
        for a in &self.alphabet {
            h.update(b"\x00a");
            h.update(a.to_string());
        }
        for w in &self.window {
            h.update(b"\x00w");
            h.update(w.to_string());
        }
        match &self.rule {
            Rule::Allowed(set) => {
                let mut pats: Vec<String> =
                    set.iter().map(|p| p.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("\x01")).collect();
                pats.sort();
                for p in pats {
                    h.update(b"\x00p");
                    h.update(p);
                }
            }
            Rule::Oracle { name, .. } => {
                h.update(b"\x00o");
                h.update(name);
            }
        }
        hex::encode(h.finalize())
    }
}

/// Golden-mean shift on ℤ: window {0, 1}, the word 11 is forbidden.
pub fn golden_mean() -> SubshiftSpec<u8> {
    let z = GroupSpec::free_abelian(1);
    let window = vec![z.identity(), z.parse_element("1").unwrap()];
    SubshiftSpec::with_allowed(z, vec![0, 1], window, [vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap()
}

/// Hard-core rule: no two adjacent cells (in the Cayley graph) both carry 1.
pub fn hard_core(group: GroupSpec) -> SubshiftSpec<u8> {
    let mut window = vec![group.identity()];
    window.extend(group.standard_generating_set());
    SubshiftSpec::with_oracle(group, vec![0, 1], window, "hard-core", |p: &[u8]| {
        p[0] == 0 || p[1..].iter().all(|&v| v == 0)
    })
    .unwrap()
}

/// A pair of symbols, printed `(a,b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolPair<A, B>(pub A, pub B);

impl<A: Display, B: Display> Display for SymbolPair<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Product subshift on the union window; both rules must hold.
pub fn product_spec<A: Symbol, B: Symbol>(
    s1: &SubshiftSpec<A>,
    s2: &SubshiftSpec<B>,
) -> Result<SubshiftSpec<SymbolPair<A, B>>> {
    if s1.group != s2.group {
        return Err(Error::InvalidInput("product of subshifts over different groups".into()));
    }
    let mut window = s1.window.clone();
    for w in &s2.window {
        if !window.contains(w) {
            window.push(w.clone());
        }
    }
    let pos: HashMap<&Element, usize> = window.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let idx1: Vec<usize> = s1.window.iter().map(|w| pos[w]).collect();
    let idx2: Vec<usize> = s2.window.iter().map(|w| pos[w]).collect();
    let alphabet =
        s1.alphabet.iter().flat_map(|a| s2.alphabet.iter().map(move |b| SymbolPair(a.clone(), b.clone()))).collect();
    let (r1, r2) = (s1.rule.clone(), s2.rule.clone());
    let name = format!("product({:?},{:?})", s1.rule, s2.rule);
    SubshiftSpec::with_oracle(s1.group.clone(), alphabet, window, name, move |p: &[SymbolPair<A, B>]| {
        let p1: Vec<A> = idx1.iter().map(|&i| p[i].0.clone()).collect();
        let p2: Vec<B> = idx2.iter().map(|&i| p[i].1.clone()).collect();
        r1.accepts(&p1) && r2.accepts(&p2)
    })
}
