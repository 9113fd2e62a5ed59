use super::patch::{cell_order, index_of, patch_check, window_translates, Patch, PatchCheck};
use super::spec::{SubshiftSpec, Symbol};
use crate::error::{Error, Result};
use crate::group::{ball, Element};
use std::collections::{BTreeMap, BTreeSet};

/// Default bound on search nodes (symbol trials).
pub const DEFAULT_NODE_CAP: u64 = 50_000_000;

#[derive(Clone, Copy)]
enum Slot {
    Fixed(usize),
    Free(usize),
}

struct Engine<'a, A> {
    spec: &'a SubshiftSpec<A>,
    free: Vec<Element>,
    fixed: Vec<usize>,
    fixed_cells: BTreeMap<Element, usize>,
    /// Windows whose last free cell is `free[i]` are checked at depth i + 1.
    checks: Vec<Vec<Vec<Slot>>>,
}

impl<'a, A: Symbol> Engine<'a, A> {
    fn new(spec: &'a SubshiftSpec<A>, patch: &Patch<A>, target: &BTreeSet<Element>) -> Result<Self> {
        if !patch.is_total() {
            return Err(Error::Precondition("the starting patch must be total on its domain".into()));
        }
        if !patch.domain().is_subset(target) {
            return Err(Error::Precondition("the starting patch domain must lie in the target".into()));
        }
        let mut fixed_cells = BTreeMap::new();
        let mut fixed = Vec::new();
        for (g, a) in patch.cells() {
            let i = spec
                .alphabet
                .iter()
                .position(|s| s == a)
                .ok_or_else(|| Error::InvalidInput(format!("symbol {a} at {g} is not in the alphabet")))?;
            fixed_cells.insert(g.clone(), fixed.len());
            fixed.push(i);
        }
        let free_set: BTreeSet<Element> = target.difference(patch.domain()).cloned().collect();
        let free = cell_order(&spec.group, &free_set, usize::MAX)?;
        let free_index = index_of(&free);
        let mut checks = vec![Vec::new(); free.len() + 1];
        for gamma in window_translates(spec, target) {
            let slots: Vec<Slot> = spec
                .window
                .iter()
                .map(|w| {
                    let c = spec.group.multiply(&gamma, w);
                    match fixed_cells.get(&c) {
                        Some(&k) => Slot::Fixed(k),
                        None => Slot::Free(free_index[&c]),
                    }
                })
                .collect();
            let level = slots
                .iter()
                .map(|s| match s {
                    Slot::Fixed(_) => 0,
                    Slot::Free(i) => i + 1,
                })
                .max()
                .unwrap_or(0);
            checks[level].push(slots);
        }
        Ok(Engine { spec, free, fixed, fixed_cells, checks })
    }

    fn window_ok(&self, level: usize, values: &[usize]) -> bool {
        self.checks[level].iter().all(|slots| {
            let pattern: Vec<A> = slots
                .iter()
                .map(|s| match *s {
                    Slot::Fixed(k) => self.spec.alphabet[self.fixed[k]].clone(),
                    Slot::Free(i) => self.spec.alphabet[values[i]].clone(),
                })
                .collect();
            self.spec.rule.accepts(&pattern)
        })
    }

    /// Visits admissible completions in lexicographic order of (cell order, alphabet order)
    /// until `visit` returns false.
    fn run(&self, cap: u64, mut visit: impl FnMut(&[usize]) -> bool) -> Result<()> {
        if !self.window_ok(0, &[]) {
            return Ok(());
        }
        let n = self.free.len();
        let k = self.spec.alphabet.len();
        if n == 0 {
            visit(&[]);
            return Ok(());
        }
        let mut values = vec![0usize; n];
        let mut next = vec![0usize; n];
        let mut depth = 0usize;
        let mut nodes = 0u64;
        loop {
            if next[depth] == k {
                next[depth] = 0;
                if depth == 0 {
                    return Ok(());
                }
                depth -= 1;
                continue;
            }
            nodes += 1;
            if nodes > cap {
                return Err(Error::limit("extension search nodes", cap));
            }
            values[depth] = next[depth];
            next[depth] += 1;
            if !self.window_ok(depth + 1, &values) {
                continue;
            }
            if depth + 1 == n {
                if !visit(&values) {
                    return Ok(());
                }
            } else {
                depth += 1;
            }
        }
    }

    fn to_patch(&self, target: &BTreeSet<Element>, values: &[usize]) -> Patch<A> {
        let mut cells = BTreeMap::new();
        for (g, &k) in &self.fixed_cells {
            cells.insert(g.clone(), self.spec.alphabet[self.fixed[k]].clone());
        }
        for (g, &v) in self.free.iter().zip(values) {
            cells.insert(g.clone(), self.spec.alphabet[v].clone());
        }
        Patch::from_parts(target.clone(), cells)
    }
}

/// First admissible total extension of `patch` to `target`, or `None` when none exists.
pub fn extend_search<A: Symbol>(
    spec: &SubshiftSpec<A>,
    patch: &Patch<A>,
    target: &BTreeSet<Element>,
    cap: u64,
) -> Result<Option<Patch<A>>> {
    let engine = Engine::new(spec, patch, target)?;
    let mut found = None;
    engine.run(cap, |v| {
        found = Some(engine.to_patch(target, v));
        false
    })?;
    Ok(found)
}

/// Every admissible total extension of `patch` to `target`, in search order.
pub fn enumerate_admissible<A: Symbol>(
    spec: &SubshiftSpec<A>,
    patch: &Patch<A>,
    target: &BTreeSet<Element>,
    max_patches: usize,
    cap: u64,
) -> Result<Vec<Patch<A>>> {
    let engine = Engine::new(spec, patch, target)?;
    let mut out = Vec::new();
    let mut overflow = false;
    engine.run(cap, |v| {
        if out.len() == max_patches {
            overflow = true;
            return false;
        }
        out.push(engine.to_patch(target, v));
        true
    })?;
    if overflow {
        return Err(Error::limit("admissible patches", max_patches as u64));
    }
    Ok(out)
}

/// Brute-force count of admissible total assignments on `domain`.
pub fn count_patterns<A: Symbol>(spec: &SubshiftSpec<A>, domain: &BTreeSet<Element>, cap: u64) -> Result<u64> {
    let k = spec.alphabet.len() as u64;
    let n = domain.len() as u32;
    let total = k.checked_pow(n).filter(|&t| t <= cap).ok_or_else(|| Error::limit("assignments to count", cap))?;
    let cells: Vec<Element> = domain.iter().cloned().collect();
    let mut count = 0;
    let mut digits = vec![0usize; cells.len()];
    for _ in 0..total {
        let word: Vec<A> = digits.iter().map(|&d| spec.alphabet[d].clone()).collect();
        if patch_check(spec, &Patch::from_word(&cells, &word)?)? == PatchCheck::Ok {
            count += 1;
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < spec.alphabet.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(count)
}

/// True iff no admissible pattern lives on ball(r). Emptiness here is conclusive;
/// `false` only says the subshift is consistent up to radius r.
pub fn empty_on_ball<A: Symbol>(spec: &SubshiftSpec<A>, r: usize, cap: u64) -> Result<bool> {
    let b = ball(&spec.group, &spec.group.standard_generating_set(), r, crate::group::DEFAULT_BALL_CAP)?;
    let target: BTreeSet<Element> = b.iter().cloned().collect();
    Ok(extend_search(spec, &Patch::empty(), &target, cap)?.is_none())
}

/// Admissible assignments on `target` as alphabet indices, listed against the
/// breadth-first cell order that is returned alongside.
pub(crate) fn admissible_words<A: Symbol>(
    spec: &SubshiftSpec<A>,
    target: &BTreeSet<Element>,
    max_patches: usize,
    cap: u64,
) -> Result<(Vec<Element>, Vec<Vec<u16>>)> {
    let engine = Engine::new(spec, &Patch::empty(), target)?;
    let mut out = Vec::new();
    let mut overflow = false;
    engine.run(cap, |v| {
        if out.len() == max_patches {
            overflow = true;
            return false;
        }
        out.push(v.iter().map(|&i| i as u16).collect());
        true
    })?;
    if overflow {
        return Err(Error::limit("admissible patches", max_patches as u64));
    }
    Ok((engine.free, out))
}
