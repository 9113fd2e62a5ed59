use super::spec::{SubshiftSpec, Symbol};
use crate::error::{Error, Result};
use crate::group::{ball, Element, GroupSpec};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A finite fragment of a configuration: a domain and a partial assignment on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Patch<A> {
    domain: BTreeSet<Element>,
    cells: BTreeMap<Element, A>,
}

impl<A: Symbol> Patch<A> {
    pub fn new(
        domain: impl IntoIterator<Item = Element>,
        cells: impl IntoIterator<Item = (Element, A)>,
    ) -> Result<Self> {
        let domain: BTreeSet<Element> = domain.into_iter().collect();
        let mut map = BTreeMap::new();
        for (g, a) in cells {
            if !domain.contains(&g) {
                return Err(Error::InvalidInput(format!("cell {g} is outside the patch domain")));
            }
            if map.insert(g.clone(), a).is_some() {
                return Err(Error::InvalidInput(format!("cell {g} assigned twice")));
            }
        }
        Ok(Patch { domain, cells: map })
    }

    /// Patch whose domain is exactly the assigned cells.
    pub fn total(cells: impl IntoIterator<Item = (Element, A)>) -> Result<Self> {
        let cells: Vec<(Element, A)> = cells.into_iter().collect();
        let domain: Vec<Element> = cells.iter().map(|c| c.0.clone()).collect();
        Self::new(domain, cells)
    }

    pub fn empty() -> Self {
        Patch { domain: BTreeSet::new(), cells: BTreeMap::new() }
    }

    /// `word[i]` at the i-th listed element.
    pub fn from_word(elements: &[Element], word: &[A]) -> Result<Self> {
        if elements.len() != word.len() {
            return Err(Error::InvalidInput("element and symbol counts differ".into()));
        }
        Self::total(elements.iter().cloned().zip(word.iter().cloned()))
    }

    pub fn domain(&self) -> &BTreeSet<Element> {
        &self.domain
    }

    pub fn cells(&self) -> &BTreeMap<Element, A> {
        &self.cells
    }

    pub fn get(&self, g: &Element) -> Option<&A> {
        self.cells.get(g)
    }

    pub fn is_total(&self) -> bool {
        self.cells.len() == self.domain.len()
    }

    pub fn extends(&self, other: &Patch<A>) -> bool {
        other.domain.is_subset(&self.domain) && other.cells.iter().all(|(g, a)| self.cells.get(g) == Some(a))
    }

    pub(crate) fn from_parts(domain: BTreeSet<Element>, cells: BTreeMap<Element, A>) -> Self {
        debug_assert!(cells.keys().all(|g| domain.contains(g)));
        Patch { domain, cells }
    }
}

/// (γ·x)_l = x_{γ⁻¹l}: the value at g moves to γg.
pub fn translate_patch<A: Symbol>(spec: &GroupSpec, gamma: &Element, patch: &Patch<A>) -> Patch<A> {
    Patch {
        domain: patch.domain.iter().map(|g| spec.multiply(gamma, g)).collect(),
        cells: patch.cells.iter().map(|(g, a)| (spec.multiply(gamma, g), a.clone())).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatchCheck {
    Ok,
    /// The translate γ·W lies in the domain and its pattern is rejected.
    ViolatedWindow(Element),
}

/// Sorts `cells` in the breadth-first order of the standard Cayley graph.
pub fn cell_order(spec: &GroupSpec, cells: &BTreeSet<Element>, cap: usize) -> Result<Vec<Element>> {
    let gens = spec.standard_generating_set();
    let mut r = 0;
    loop {
        let b = ball(spec, &gens, r, cap)?;
        if cells.iter().all(|c| b.contains(c)) {
            let mut out: Vec<Element> = cells.iter().cloned().collect();
            out.sort_by_key(|c| b.position(c).unwrap());
            return Ok(out);
        }
        r += 1;
    }
}

/// All γ with γ·W ⊆ `domain`, in the element order of `domain`.
pub(crate) fn window_translates<A: Symbol>(spec: &SubshiftSpec<A>, domain: &BTreeSet<Element>) -> Vec<Element> {
    let g = &spec.group;
    let w0_inv = g.inverse(&spec.window[0]);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for d in domain {
        let gamma = g.multiply(d, &w0_inv);
        if seen.insert(gamma.clone()) && spec.window.iter().all(|w| domain.contains(&g.multiply(&gamma, w))) {
            out.push(gamma);
        }
    }
    out
}

/// Checks every fully contained window translate; the violating γ reported is the
/// first in breadth-first order.
pub fn patch_check<A: Symbol>(spec: &SubshiftSpec<A>, patch: &Patch<A>) -> Result<PatchCheck> {
    if !patch.is_total() {
        return Err(Error::Precondition("patch_check needs a total patch".into()));
    }
    let g = &spec.group;
    let violators: BTreeSet<Element> = window_translates(spec, &patch.domain)
        .into_iter()
        .filter(|gamma| {
            let pattern: Vec<A> = spec.window.iter().map(|w| patch.cells[&g.multiply(gamma, w)].clone()).collect();
            !spec.rule.accepts(&pattern)
        })
        .collect();
    if violators.is_empty() {
        return Ok(PatchCheck::Ok);
    }
    let first = cell_order(g, &violators, usize::MAX)?.swap_remove(0);
    Ok(PatchCheck::ViolatedWindow(first))
}

/// Position lookup used by the search routines.
pub(crate) fn index_of(order: &[Element]) -> HashMap<Element, usize> {
    order.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect()
}
