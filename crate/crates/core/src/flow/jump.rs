use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Lamp};
use crate::subshift::{translate_patch, Patch, SubshiftSpec};
use std::collections::BTreeMap;

/// ℤ/m acting on {0, …, |X|−1}, the generator by `perm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicAction {
    pub order: usize,
    pub perm: Vec<usize>,
}

impl CyclicAction {
    pub fn new(order: usize, perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
            }
        }
        if order == 0 || n == 0 {
            return Err(Error::InvalidInput(
                "unsupported Γ: need a finite cyclic group acting on a nonempty set".into(),
            ));
        }
        if (0..n).any(|x| (0..order).fold(x, |y, _| perm[y]) != x) {
            return Err(Error::InvalidInput(format!("unsupported Γ: the generator's order does not divide {order}")));
        }
        Ok(CyclicAction { order, perm })
    }

    /// ℤ/2 swapping 0 and 1.
    pub fn swap() -> Self {
        CyclicAction { order: 2, perm: vec![1, 0] }
    }

    pub fn alphabet_size(&self) -> usize {
        self.perm.len()
    }

    /// γ^k · x.
    pub fn power(&self, k: i64, x: usize) -> usize {
        let k = k.rem_euclid(self.order as i64);
        (0..k).fold(x, |y, _| self.perm[y])
    }
}

/// Generators of Γ ≀ Λ acting on X^Λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JumpLetter {
    /// (λ·x)_l = x_{λ⁻¹l}
    Shift(Element),
    /// γ^power applied to the coordinate at `at`.
    Lamp { at: Element, power: i64 },
}

/// The restricted jump of a cyclic action along Λ acting on itself by left translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathJump {
    pub gamma: CyclicAction,
    pub lambda: GroupSpec,
}

pub fn wreath_jump(gamma: CyclicAction, lambda: GroupSpec) -> Result<WreathJump> {
    lambda.validate()?;
    match lambda {
        GroupSpec::FreeAbelian { rank: 1 } | GroupSpec::Free { .. } => Ok(WreathJump { gamma, lambda }),
        other => Err(Error::InvalidInput(format!("unsupported Λ {other}: expected ℤ or a free group"))),
    }
}

impl WreathJump {
    /// X^Λ as a full shift; the jump acts on its patches.
    pub fn base_spec(&self) -> Result<SubshiftSpec<usize>> {
        SubshiftSpec::full(self.lambda.clone(), (0..self.gamma.alphabet_size()).collect())
    }

    pub fn apply(&self, letter: &JumpLetter, patch: &Patch<usize>) -> Result<Patch<usize>> {
        match letter {
            JumpLetter::Shift(l) => {
                if !self.lambda.contains(l) {
                    return Err(Error::InvalidInput(format!("{l} is not in {}", self.lambda)));
                }
                Ok(translate_patch(&self.lambda, l, patch))
            }
            JumpLetter::Lamp { at, power } => {
                let mut cells: BTreeMap<Element, usize> = patch.cells().clone();
                if let Some(x) = cells.get_mut(at) {
                    if *x >= self.gamma.alphabet_size() {
                        return Err(Error::InvalidInput(format!("symbol {x} is outside the alphabet")));
                    }
                    *x = self.gamma.power(*power, *x);
                }
                Patch::new(patch.domain().iter().cloned(), cells)
            }
        }
    }

    /// A word acts as the composite of its letters, the rightmost applied first.
    pub fn apply_word(&self, word: &[JumpLetter], patch: &Patch<usize>) -> Result<Patch<usize>> {
        word.iter().rev().try_fold(patch.clone(), |p, l| self.apply(l, &p))
    }
}

/// The lamplighter element (F, p) = (Π_{f∈F} flip_f)·tᵖ as a jump word over ℤ.
pub fn lamplighter_word(g: &Lamp) -> Vec<JumpLetter> {
    let mut word: Vec<JumpLetter> =
        g.lamps.iter().map(|&f| JumpLetter::Lamp { at: Element::Vector(vec![f]), power: 1 }).collect();
    word.push(JumpLetter::Shift(Element::Vector(vec![g.position])));
    word
}
