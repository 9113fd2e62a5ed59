//! Built-in finitely generated groups with canonical-form arithmetic.

mod ball;
mod element;
mod parse;

pub use ball::{ball, set_product, Ball, DEFAULT_BALL_CAP};
pub use element::{Element, Lamp, Letter, Side, Word};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GroupSpec {
    FreeAbelian { rank: usize },
    Free { rank: usize },
    Lamplighter,
    DirectProduct { left: Box<GroupSpec>, right: Box<GroupSpec> },
    FreeProduct { left: Box<GroupSpec>, right: Box<GroupSpec> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub element: Element,
}

impl GroupSpec {
    pub fn free_abelian(rank: usize) -> Self {
        GroupSpec::FreeAbelian { rank }
    }

    pub fn free(rank: usize) -> Self {
        GroupSpec::Free { rank }
    }

    pub fn lamplighter() -> Self {
        GroupSpec::Lamplighter
    }

    pub fn direct_product(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::DirectProduct { left: Box::new(left), right: Box::new(right) }
    }

    pub fn free_product(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::FreeProduct { left: Box::new(left), right: Box::new(right) }
    }

    /// Rejects degenerate parameters (rank 0, more free generators than letters).
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::FreeAbelian { rank } if *rank == 0 => {
                Err(Error::InvalidInput("free-abelian rank must be at least 1".into()))
            }
            GroupSpec::Free { rank } if *rank == 0 || *rank > 25 => {
                Err(Error::InvalidInput("free rank must be in 1..=25".into()))
            }
            GroupSpec::DirectProduct { left, right } | GroupSpec::FreeProduct { left, right } => {
                left.validate()?;
                right.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::FreeAbelian { rank } => Element::Vector(vec![0; *rank]),
            GroupSpec::Free { .. } => Element::Word(Word::identity()),
            GroupSpec::Lamplighter => Element::Lamp(Lamp::default()),
            GroupSpec::DirectProduct { left, right } => {
                Element::Pair(Box::new(left.identity()), Box::new(right.identity()))
            }
            GroupSpec::FreeProduct { .. } => Element::Alternating(Vec::new()),
        }
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        *x == self.identity()
    }

    /// Group multiplication on canonical forms.
    ///
    /// Panics if an operand does not belong to this group's family.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (GroupSpec::FreeAbelian { .. }, Element::Vector(x), Element::Vector(y)) => {
                Element::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupSpec::Free { .. }, Element::Word(x), Element::Word(y)) => Element::Word(x.mul(y)),
            (GroupSpec::Lamplighter, Element::Lamp(x), Element::Lamp(y)) => Element::Lamp(x.mul(y)),
            (GroupSpec::DirectProduct { left, right }, Element::Pair(x1, x2), Element::Pair(y1, y2)) => {
                Element::Pair(Box::new(left.multiply(x1, y1)), Box::new(right.multiply(x2, y2)))
            }
            (GroupSpec::FreeProduct { left, right }, Element::Alternating(x), Element::Alternating(y)) => {
                let mut out = x.clone();
                for (side, s) in y {
                    match out.last() {
                        Some((last_side, last)) if last_side == side => {
                            let factor = if *side == Side::Left { left } else { right };
                            let merged = factor.multiply(last, s);
                            out.pop();
                            if !factor.is_identity(&merged) {
                                out.push((*side, merged));
                            }
                        }
                        _ => out.push((*side, s.clone())),
                    }
                }
                Element::Alternating(out)
            }
            _ => panic!("element does not belong to {self}: {a} * {b}"),
        }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        match (self, a) {
            (GroupSpec::FreeAbelian { .. }, Element::Vector(x)) => Element::Vector(x.iter().map(|v| -v).collect()),
            (GroupSpec::Free { .. }, Element::Word(w)) => Element::Word(w.inverse()),
            (GroupSpec::Lamplighter, Element::Lamp(l)) => Element::Lamp(l.inverse()),
            (GroupSpec::DirectProduct { left, right }, Element::Pair(x, y)) => {
                Element::Pair(Box::new(left.inverse(x)), Box::new(right.inverse(y)))
            }
            (GroupSpec::FreeProduct { left, right }, Element::Alternating(s)) => Element::Alternating(
                s.iter()
                    .rev()
                    .map(|(side, x)| {
                        let factor = if *side == Side::Left { left } else { right };
                        (*side, factor.inverse(x))
                    })
                    .collect(),
            ),
            _ => panic!("element does not belong to {self}: {a}"),
        }
    }

    /// Whether `x` is a canonical form of this group.
    pub fn contains(&self, x: &Element) -> bool {
        match (self, x) {
            (GroupSpec::FreeAbelian { rank }, Element::Vector(v)) => v.len() == *rank,
            (GroupSpec::Free { rank }, Element::Word(w)) => {
                w.letters().iter().all(|l| l.generator() < *rank)
                    && w.letters().windows(2).all(|p| p[0] != p[1].inverse())
            }
            (GroupSpec::Lamplighter, Element::Lamp(l)) => l.lamps.windows(2).all(|p| p[0] < p[1]),
            (GroupSpec::DirectProduct { left, right }, Element::Pair(a, b)) => left.contains(a) && right.contains(b),
            (GroupSpec::FreeProduct { left, right }, Element::Alternating(s)) => {
                s.windows(2).all(|p| p[0].0 != p[1].0)
                    && s.iter().all(|(side, x)| {
                        let factor = if *side == Side::Left { left } else { right };
                        factor.contains(x) && !factor.is_identity(x)
                    })
            }
            _ => false,
        }
    }

    /// The positive generators, in their fixed order.
    pub fn generators(&self) -> Vec<Generator> {
        match self {
            GroupSpec::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    Generator { name: format!("e{}", i + 1), element: Element::Vector(v) }
                })
                .collect(),
            GroupSpec::Free { rank } => (0..*rank)
                .map(|i| Generator {
                    name: element::letter_name(i).to_string(),
                    element: Element::Word(Word::from_letters([Letter::new(i, false)])),
                })
                .collect(),
            GroupSpec::Lamplighter => vec![
                Generator { name: "t".into(), element: Element::Lamp(Lamp::new(vec![], 1)) },
                Generator { name: "f".into(), element: Element::Lamp(Lamp::new(vec![0], 0)) },
            ],
            GroupSpec::DirectProduct { left, right } => {
                let mut out = Vec::new();
                for g in left.generators() {
                    out.push(Generator {
                        name: format!("1.{}", g.name),
                        element: Element::Pair(Box::new(g.element), Box::new(right.identity())),
                    });
                }
                for g in right.generators() {
                    out.push(Generator {
                        name: format!("2.{}", g.name),
                        element: Element::Pair(Box::new(left.identity()), Box::new(g.element)),
                    });
                }
                out
            }
            GroupSpec::FreeProduct { left, right } => {
                let mut out = Vec::new();
                for g in left.generators() {
                    out.push(Generator {
                        name: format!("1.{}", g.name),
                        element: Element::Alternating(vec![(Side::Left, g.element)]),
                    });
                }
                for g in right.generators() {
                    out.push(Generator {
                        name: format!("2.{}", g.name),
                        element: Element::Alternating(vec![(Side::Right, g.element)]),
                    });
                }
                out
            }
        }
    }

    /// Symmetric generating set without the identity: g₁, g₁⁻¹, g₂, g₂⁻¹, ... (involutions once).
    pub fn standard_generating_set(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for g in self.generators() {
            let inv = self.inverse(&g.element);
            let is_involution = inv == g.element;
            out.push(g.element);
            if !is_involution {
                out.push(inv);
            }
        }
        out
    }

    /// Generating set with the identity prepended; the usual `S = ball(1)`.
    pub fn unit_ball_set(&self) -> Vec<Element> {
        let mut out = vec![self.identity()];
        out.extend(self.standard_generating_set());
        out
    }

    pub fn parse_element(&self, s: &str) -> Result<Element> {
        parse::parse_element(self, s.trim())
    }

    /// Evaluates a word over the generator names, e.g. `(ab)·(b⁻¹a)` or `t f t^-1`.
    pub fn evaluate(&self, expr: &str) -> Result<Element> {
        parse::evaluate(self, expr)
    }

    pub fn parse_descriptor(s: &str) -> Result<GroupSpec> {
        let g = parse::parse_descriptor(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn is_symmetric(&self, set: &[Element]) -> bool {
        let members: BTreeSet<&Element> = set.iter().collect();
        set.iter().all(|x| members.contains(&self.inverse(x)))
    }

    /// `a⁻¹ b`
    pub fn quotient(&self, a: &Element, b: &Element) -> Element {
        self.multiply(&self.inverse(a), b)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian { rank: 1 } => write!(f, "Z"),
            GroupSpec::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            GroupSpec::Free { rank } => write!(f, "F{rank}"),
            GroupSpec::Lamplighter => write!(f, "lamplighter"),
            GroupSpec::DirectProduct { left, right } => write!(f, "({left} x {right})"),
            GroupSpec::FreeProduct { left, right } => write!(f, "({left} * {right})"),
        }
    }
}
