use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::subshift::{translate_patch, Patch, Rule, SubshiftSpec, Symbol};
use std::collections::BTreeMap;

/// Which subgroup Γ ≤ Δ the inner flow lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// Γ = 1; the inner spec must have window {e}.
    Trivial,
    /// Γ = mℤ ≤ ℤ, with the inner spec written over ℤ via k ↦ m·k.
    Multiples(u64),
    /// Γ = Δ.
    Whole,
}

/// Δ with a subgroup Γ and the decomposition δ = rep·γ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetStructure {
    pub ambient: GroupSpec,
    /// The group the inner spec is written over (Γ itself, or any group when Γ is trivial).
    pub inner_group: GroupSpec,
    pub subgroup: Subgroup,
}

impl CosetStructure {
    pub fn new(ambient: GroupSpec, inner_group: GroupSpec, subgroup: Subgroup) -> Result<Self> {
        ambient.validate()?;
        inner_group.validate()?;
        let z = GroupSpec::free_abelian(1);
        match &subgroup {
            Subgroup::Trivial => {}
            Subgroup::Multiples(m) => {
                if *m == 0 || ambient != z || inner_group != z {
                    return Err(Error::InvalidInput(format!("unsupported subgroup pair {m}ℤ ≤ {ambient}")));
                }
            }
            Subgroup::Whole => {
                if ambient != inner_group {
                    return Err(Error::InvalidInput(format!("{inner_group} is not {ambient}")));
                }
            }
        }
        Ok(CosetStructure { ambient, inner_group, subgroup })
    }

    /// The inclusion Γ → Δ.
    pub fn embed(&self, gamma: &Element) -> Result<Element> {
        match &self.subgroup {
            Subgroup::Trivial if self.inner_group.is_identity(gamma) => Ok(self.ambient.identity()),
            Subgroup::Trivial => Err(Error::InvalidInput(format!("{gamma} is not in the trivial subgroup"))),
            Subgroup::Multiples(m) => Ok(Element::Vector(vec![int(gamma)? * *m as i64])),
            Subgroup::Whole => Ok(gamma.clone()),
        }
    }

    /// δ = rep·ι(γ), with rep from the fixed transversal.
    pub fn decompose(&self, delta: &Element) -> Result<(Element, Element)> {
        match &self.subgroup {
            Subgroup::Trivial => Ok((delta.clone(), self.inner_group.identity())),
            Subgroup::Multiples(m) => {
                let (k, m) = (int(delta)?, *m as i64);
                Ok((Element::Vector(vec![k.rem_euclid(m)]), Element::Vector(vec![k.div_euclid(m)])))
            }
            Subgroup::Whole => Ok((self.ambient.identity(), delta.clone())),
        }
    }

    /// Coset representatives when the index is finite.
    pub fn transversal(&self) -> Option<Vec<Element>> {
        match &self.subgroup {
            Subgroup::Trivial => None,
            Subgroup::Multiples(m) => Some((0..*m as i64).map(|r| Element::Vector(vec![r])).collect()),
            Subgroup::Whole => Some(vec![self.ambient.identity()]),
        }
    }
}

fn int(x: &Element) -> Result<i64> {
    match x.as_vector() {
        Some([k]) => Ok(*k),
        _ => Err(Error::InvalidInput(format!("{x} is not an integer"))),
    }
}

/// The coinduced Δ-subshift, in the coordinates z_δ = (x_δ)_e.
///
/// A compatible family satisfies (x_δ)_γ = z_{δγ}, so the family is determined by z and
/// the inner rule must hold along every left coset δΓ; the window is ι(W).
pub fn coinduce<A: Symbol>(inner: &SubshiftSpec<A>, cosets: &CosetStructure) -> Result<SubshiftSpec<A>> {
    if inner.group != cosets.inner_group {
        return Err(Error::InvalidInput(format!(
            "inner spec is over {}, expected {}",
            inner.group, cosets.inner_group
        )));
    }
    let window = inner.window.iter().map(|w| cosets.embed(w)).collect::<Result<Vec<_>>>()?;
    let alphabet = inner.alphabet.clone();
    let group = cosets.ambient.clone();
    match &inner.rule {
        Rule::Allowed(set) => SubshiftSpec::with_allowed(group, alphabet, window, set.iter().cloned()),
        Rule::Oracle { name, check } => {
            let check = check.clone();
            SubshiftSpec::with_oracle(group, alphabet, window, format!("cind({name})"), move |p: &[A]| check(p))
        }
    }
}

/// x_δ on Γ for every δ in the domain of z: γ ↦ z_{δ·ι(γ)} wherever defined.
pub fn lift_family<A: Symbol>(
    cosets: &CosetStructure,
    z: &Patch<A>,
    gamma_domain: &[Element],
) -> Result<BTreeMap<Element, Patch<A>>> {
    let d = &cosets.ambient;
    let embedded = gamma_domain.iter().map(|g| Ok((g.clone(), cosets.embed(g)?))).collect::<Result<Vec<_>>>()?;
    let mut out = BTreeMap::new();
    for delta in z.domain() {
        let cells: Vec<(Element, A)> = embedded
            .iter()
            .filter_map(|(g, ig)| z.get(&d.multiply(delta, ig)).map(|a| (g.clone(), a.clone())))
            .collect();
        out.insert(delta.clone(), Patch::total(cells)?);
    }
    Ok(out)
}

/// Checks x_{δγ} = γ⁻¹·x_δ wherever both sides are defined, over the given γ.
pub fn check_compatibility<A: Symbol>(
    cosets: &CosetStructure,
    family: &BTreeMap<Element, Patch<A>>,
    gammas: &[Element],
) -> Result<()> {
    let (d, g) = (&cosets.ambient, &cosets.inner_group);
    for (delta, x) in family {
        for gamma in gammas {
            let Some(y) = family.get(&d.multiply(delta, &cosets.embed(gamma)?)) else { continue };
            let moved = translate_patch(g, &g.inverse(gamma), x);
            for (l, a) in moved.cells() {
                if let Some(b) = y.get(l) {
                    if a != b {
                        return Err(Error::violation(
                            format!("({delta}, {gamma})"),
                            format!("x_δγ has {b} at {l} but γ⁻¹·x_δ has {a}"),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}
