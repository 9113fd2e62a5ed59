use super::{Element, GroupSpec};
use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap};

pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// Elements of word length at most `radius`, in breadth-first shortlex order.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    lengths: Vec<u32>,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.index.contains_key(x)
    }

    pub fn position(&self, x: &Element) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Word length of `x`, if it lies in the ball.
    pub fn length(&self, x: &Element) -> Option<usize> {
        self.position(x).map(|i| self.lengths[i] as usize)
    }

    pub fn length_at(&self, i: usize) -> usize {
        self.lengths[i] as usize
    }

    /// Elements of length at most `r` (a prefix of the ball).
    pub fn within(&self, r: usize) -> &[Element] {
        let end = self.lengths.partition_point(|&l| l as usize <= r);
        &self.elements[..end]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter()
    }
}

/// Breadth-first ball enumeration. Each layer is expanded in order, trying the
/// generators in the order given, so the first path found to each element is its
/// shortlex-least geodesic. The identity, if listed among `gens`, is ignored.
pub fn ball(spec: &GroupSpec, gens: &[Element], r: usize, cap: usize) -> Result<Ball> {
    if !spec.is_symmetric(gens) {
        return Err(Error::Precondition("generating set is not symmetric".into()));
    }
    if let Some(bad) = gens.iter().find(|g| !spec.contains(g)) {
        return Err(Error::InvalidInput(format!("{bad} is not an element of {spec}")));
    }
    let gens: Vec<&Element> = gens.iter().filter(|g| !spec.is_identity(g)).collect();
    let e = spec.identity();
    let mut elements = vec![e.clone()];
    let mut index = HashMap::new();
    index.insert(e, 0);
    let mut lengths = vec![0u32];
    let mut layer_start = 0;
    for k in 1..=r {
        let layer_end = elements.len();
        for i in layer_start..layer_end {
            for g in &gens {
                let y = spec.multiply(&elements[i], g);
                if !index.contains_key(&y) {
                    if elements.len() >= cap {
                        return Err(Error::limit(format!("ball of radius {r} in {spec}"), cap as u64));
                    }
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                    lengths.push(k as u32);
                }
            }
        }
        if elements.len() == layer_end {
            break; // finite group exhausted
        }
        layer_start = layer_end;
    }
    Ok(Ball { radius: r, elements, index, lengths })
}

/// `F·S` as a canonical-form set.
pub fn set_product<'a, I, J>(spec: &GroupSpec, f: I, s: J) -> BTreeSet<Element>
where
    I: IntoIterator<Item = &'a Element>,
    J: IntoIterator<Item = &'a Element> + Clone,
{
    let mut out = BTreeSet::new();
    for x in f {
        for y in s.clone() {
            out.insert(spec.multiply(x, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_ball(g: &GroupSpec, r: usize) -> Ball {
        ball(g, &g.standard_generating_set(), r, DEFAULT_BALL_CAP).unwrap()
    }

    #[test]
    fn integer_ball() {
        let z = GroupSpec::free_abelian(1);
        let b = std_ball(&z, 3);
        assert_eq!(b.len(), 7);
        let order: Vec<String> = b.iter().map(|x| x.to_string()).collect();
        assert_eq!(order, ["0", "1", "-1", "2", "-2", "3", "-3"]);
    }

    #[test]
    fn small_sizes() {
        assert_eq!(std_ball(&GroupSpec::free(2), 2).len(), 17);
        assert_eq!(std_ball(&GroupSpec::free_abelian(2), 2).len(), 13);
    }

    #[test]
    fn free_ball_is_shortlex_sorted() {
        let b = std_ball(&GroupSpec::free(2), 4);
        let mut sorted = b.elements().to_vec();
        sorted.sort();
        assert_eq!(sorted, b.elements());
    }

    #[test]
    fn lamplighter_ball_sizes() {
        let b = std_ball(&GroupSpec::lamplighter(), 6);
        let sizes: Vec<usize> = (0..=6).map(|r| b.within(r).len()).collect();
        assert_eq!(sizes, [1, 4, 10, 22, 44, 84, 155]);
    }

    #[test]
    fn cap_enforced() {
        let f2 = GroupSpec::free(2);
        let err = ball(&f2, &f2.standard_generating_set(), 8, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn asymmetric_set_rejected() {
        let z = GroupSpec::free_abelian(1);
        let one = z.parse_element("1").unwrap();
        assert!(ball(&z, &[one], 2, 100).is_err());
    }

    #[test]
    fn set_product_examples() {
        let z = GroupSpec::free_abelian(1);
        let f: Vec<Element> = ["0", "1"].iter().map(|s| z.parse_element(s).unwrap()).collect();
        let p: Vec<String> = set_product(&z, &f, &f).iter().map(|x| x.to_string()).collect();
        assert_eq!(p, ["0", "1", "2"]);

        let f2 = GroupSpec::free(2);
        let b1 = std_ball(&f2, 1);
        let e = [f2.identity()];
        let prod = set_product(&f2, &e, b1.elements());
        assert_eq!(prod, b1.elements().iter().cloned().collect());

        let z2 = GroupSpec::free_abelian(2);
        let b1 = std_ball(&z2, 1);
        let prod = set_product(&z2, b1.elements(), b1.elements());
        assert_eq!(prod.len(), 13);
        assert_eq!(prod, std_ball(&z2, 2).elements().iter().cloned().collect());
    }
}
