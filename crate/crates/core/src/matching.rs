//! Bipartite matching and k-to-1 surjections onto the right side.
//!
//! A k-to-1 surjection is computed as one matching into k clones of every right
//! vertex. Clone `c` of right vertex `r` has index `r * k + c`.

use crate::error::{Error, Result};
use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

#[derive(Clone, Debug)]
pub struct BipartiteGraph<L, R> {
    left: Vec<L>,
    right: Vec<R>,
    adj: Vec<Vec<usize>>,
}

fn check_distinct<T: Eq + Hash>(items: &[T], side: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(items.len());
    if items.iter().all(|x| seen.insert(x)) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("duplicate {side} vertex")))
    }
}

impl<L: Eq + Hash, R: Eq + Hash> BipartiteGraph<L, R> {
    pub fn new(left: Vec<L>, right: Vec<R>) -> Result<Self> {
        check_distinct(&left, "left")?;
        check_distinct(&right, "right")?;
        let adj = vec![Vec::new(); left.len()];
        Ok(BipartiteGraph { left, right, adj })
    }

    /// Builds from index adjacency; parallel edges collapse.
    pub fn from_adjacency(left: Vec<L>, right: Vec<R>, adj: Vec<Vec<usize>>) -> Result<Self> {
        let mut g = Self::new(left, right)?;
        if adj.len() != g.left.len() {
            return Err(Error::InvalidInput("adjacency length differs from left side".into()));
        }
        for (l, ns) in adj.into_iter().enumerate() {
            for r in ns {
                g.add_edge(l, r)?;
            }
        }
        g.normalize();
        Ok(g)
    }
}

impl<L, R> BipartiteGraph<L, R> {
    pub fn add_edge(&mut self, l: usize, r: usize) -> Result<()> {
        if l >= self.left.len() || r >= self.right.len() {
            return Err(Error::InvalidInput(format!("edge ({l},{r}) references an undeclared vertex")));
        }
        self.adj[l].push(r);
        Ok(())
    }

    /// Sorts every adjacency list and removes parallel edges.
    pub fn normalize(&mut self) {
        for ns in &mut self.adj {
            ns.sort_unstable();
            ns.dedup();
        }
    }

    pub fn left(&self) -> &[L] {
        &self.left
    }

    pub fn right(&self) -> &[R] {
        &self.right
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l].binary_search(&r).is_ok()
    }

    /// Left neighbors of each right vertex.
    pub fn reverse_adjacency(&self) -> Vec<Vec<usize>> {
        let mut rev = vec![Vec::new(); self.right.len()];
        for (l, ns) in self.adj.iter().enumerate() {
            for &r in ns {
                rev[r].push(l);
            }
        }
        rev
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.left_to_right.iter().flatten().count()
    }
}

const UNSEEN: usize = usize::MAX;

/// Hopcroft–Karp from side A into side B, continuing from the current mates.
/// Only free A-vertices with `eligible[a]` start augmenting paths, so every
/// A-vertex that is matched on entry stays matched.
fn hopcroft_karp(adj: &[Vec<usize>], mate_a: &mut [Option<usize>], mate_b: &mut [Option<usize>], eligible: &[bool]) {
    let n_a = adj.len();
    let mut dist = vec![UNSEEN; n_a];
    let mut it = vec![0usize; n_a];
    let mut queue = VecDeque::new();
    loop {
        dist.iter_mut().for_each(|d| *d = UNSEEN);
        queue.clear();
        for a in 0..n_a {
            if eligible[a] && mate_a[a].is_none() {
                dist[a] = 0;
                queue.push_back(a);
            }
        }
        let mut found = false;
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                match mate_b[b] {
                    None => found = true,
                    Some(a2) if dist[a2] == UNSEEN => {
                        dist[a2] = dist[a] + 1;
                        queue.push_back(a2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return;
        }
        it.iter_mut().for_each(|i| *i = 0);
        let mut stack: Vec<usize> = Vec::new();
        for a0 in 0..n_a {
            if !(eligible[a0] && mate_a[a0].is_none() && dist[a0] == 0) {
                continue;
            }
            stack.clear();
            stack.push(a0);
            while let Some(&a) = stack.last() {
                if it[a] == adj[a].len() {
                    dist[a] = UNSEEN;
                    stack.pop();
                    if let Some(&p) = stack.last() {
                        it[p] += 1;
                    }
                    continue;
                }
                let b = adj[a][it[a]];
                match mate_b[b] {
                    None => {
                        for &x in &stack {
                            let bx = adj[x][it[x]];
                            mate_a[x] = Some(bx);
                            mate_b[bx] = Some(x);
                        }
                        for &x in &stack {
                            dist[x] = UNSEEN;
                        }
                        break;
                    }
                    Some(a2) if dist[a2] != UNSEEN && dist[a2] == dist[a] + 1 => stack.push(a2),
                    _ => it[a] += 1,
                }
            }
        }
    }
}

/// Maximum-cardinality matching; deterministic given the vertex and adjacency order.
pub fn maximum_matching<L, R>(g: &BipartiteGraph<L, R>) -> Matching {
    let mut l2r = vec![None; g.left.len()];
    let mut r2l = vec![None; g.right.len()];
    hopcroft_karp(&g.adj, &mut l2r, &mut r2l, &vec![true; g.left.len()]);
    Matching { left_to_right: l2r, right_to_left: r2l }
}

/// A map from a domain D ⊆ left onto right with exactly `k` preimages per right vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KToOneAssignment {
    pub k: usize,
    /// `assignment[l]` is the image of left vertex `l`, if `l` is in the domain.
    pub assignment: Vec<Option<usize>>,
    /// Which of the k matchings `l` belongs to.
    pub layer: Vec<Option<usize>>,
}

impl KToOneAssignment {
    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().enumerate().filter_map(|(l, r)| r.map(|_| l))
    }

    pub fn preimages(&self, n_right: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); n_right];
        for (l, r) in self.assignment.iter().enumerate() {
            if let Some(r) = r {
                out[*r].push(l);
            }
        }
        out
    }

    /// The k disjoint matchings, each saturating the right side.
    pub fn matchings(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.k];
        for (l, (r, layer)) in self.assignment.iter().zip(&self.layer).enumerate() {
            if let (Some(r), Some(layer)) = (r, layer) {
                out[*layer].push((l, *r));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurjectionFailure {
    /// Right vertices F with |N(F)| < k|F|.
    HallViolator(Vec<usize>),
    /// Required left vertices F that cannot all be placed: k|N(F)| < |F|.
    RequiredUnsaturated(Vec<usize>),
}

fn cloned_adjacency<L, R>(g: &BipartiteGraph<L, R>, k: usize) -> Vec<Vec<usize>> {
    g.adj.iter().map(|ns| ns.iter().flat_map(|&r| (0..k).map(move |c| r * k + c)).collect()).collect()
}

fn reverse(adj: &[Vec<usize>], n_b: usize) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); n_b];
    for (a, ns) in adj.iter().enumerate() {
        for &b in ns {
            rev[b].push(a);
        }
    }
    rev
}

/// Alternating reachability from the free A-vertices. Returns (reached A, reached B).
fn alternating_closure(
    adj: &[Vec<usize>],
    mate_a: &[Option<usize>],
    mate_b: &[Option<usize>],
) -> (Vec<bool>, Vec<bool>) {
    let mut seen_a = vec![false; adj.len()];
    let mut seen_b = vec![false; mate_b.len()];
    let mut queue: VecDeque<usize> = (0..adj.len()).filter(|&a| mate_a[a].is_none()).collect();
    for &a in &queue {
        seen_a[a] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !seen_b[b] {
                seen_b[b] = true;
                if let Some(a2) = mate_b[b] {
                    if !seen_a[a2] {
                        seen_a[a2] = true;
                        queue.push_back(a2);
                    }
                }
            }
        }
    }
    (seen_a, seen_b)
}

pub fn k_to_one_surjection<L, R>(
    g: &BipartiteGraph<L, R>,
    k: usize,
) -> std::result::Result<KToOneAssignment, SurjectionFailure> {
    k_to_one_surjection_covering(g, k, &[])
}

/// k-to-1 surjection whose domain contains every left vertex in `required`.
///
/// The required vertices are saturated first; the right clones are then filled by
/// augmenting paths that start on the right, which never unmatch a left vertex.
pub fn k_to_one_surjection_covering<L, R>(
    g: &BipartiteGraph<L, R>,
    k: usize,
    required: &[usize],
) -> std::result::Result<KToOneAssignment, SurjectionFailure> {
    assert!(k >= 1, "k must be positive");
    let n_left = g.left.len();
    let n_clones = g.right.len() * k;
    let adj = cloned_adjacency(g, k);
    let mut l2c = vec![None; n_left];
    let mut c2l = vec![None; n_clones];

    if !required.is_empty() {
        let mut eligible = vec![false; n_left];
        for &l in required {
            eligible[l] = true;
        }
        hopcroft_karp(&adj, &mut l2c, &mut c2l, &eligible);
        let unplaced: Vec<usize> = required.iter().copied().filter(|&l| l2c[l].is_none()).collect();
        if !unplaced.is_empty() {
            // alternating closure from the unplaced required vertices
            let masked: Vec<Option<usize>> =
                (0..n_left).map(|l| if eligible[l] && l2c[l].is_none() { None } else { Some(0) }).collect();
            let (seen_l, _) = alternating_closure(&adj, &masked, &c2l);
            let violator = (0..n_left).filter(|&l| seen_l[l]).collect();
            return Err(SurjectionFailure::RequiredUnsaturated(violator));
        }
    }

    let rev = reverse(&adj, n_clones);
    hopcroft_karp(&rev, &mut c2l, &mut l2c, &vec![true; n_clones]);

    if c2l.iter().any(Option::is_none) {
        let (seen_c, _) = alternating_closure(&rev, &c2l, &l2c);
        let mut violator: Vec<usize> = (0..n_clones).filter(|&c| seen_c[c]).map(|c| c / k).collect();
        violator.dedup();
        return Err(SurjectionFailure::HallViolator(violator));
    }

    Ok(KToOneAssignment {
        k,
        assignment: l2c.iter().map(|c| c.map(|c| c / k)).collect(),
        layer: l2c.iter().map(|c| c.map(|c| c % k)).collect(),
    })
}

/// A right-vertex set F with |N(F)| < k|F|, or `None` if the k-fold Hall condition holds.
pub fn hall_violator<L, R>(g: &BipartiteGraph<L, R>, k: usize) -> Option<Vec<usize>> {
    match k_to_one_surjection(g, k) {
        Ok(_) => None,
        Err(SurjectionFailure::HallViolator(f)) => Some(f),
        Err(SurjectionFailure::RequiredUnsaturated(_)) => unreachable!("no required vertices"),
    }
}

/// Left neighborhood of a right-vertex set.
pub fn right_set_neighborhood<L, R>(g: &BipartiteGraph<L, R>, f: &[usize]) -> Vec<usize> {
    let members: HashSet<usize> = f.iter().copied().collect();
    (0..g.left.len()).filter(|&l| g.adj[l].iter().any(|r| members.contains(r))).collect()
}

/// Re-checks an assignment against the graph: adjacency and exact preimage counts.
pub fn verify_assignment<L, R>(g: &BipartiteGraph<L, R>, a: &KToOneAssignment) -> Result<()> {
    if a.assignment.len() != g.left.len() {
        return Err(Error::Verification("assignment length differs from left side".into()));
    }
    let mut counts = vec![0usize; g.right.len()];
    for (l, r) in a.assignment.iter().enumerate() {
        if let Some(r) = *r {
            if r >= g.right.len() || !g.has_edge(l, r) {
                return Err(Error::Verification(format!("left {l} assigned to non-neighbor {r}")));
            }
            counts[r] += 1;
        }
    }
    if let Some(r) = counts.iter().position(|&c| c != a.k) {
        return Err(Error::Verification(format!("right {r} has {} preimages, expected {}", counts[r], a.k)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(nl: usize, nr: usize, edges: &[(usize, usize)]) -> BipartiteGraph<usize, usize> {
        let mut g = BipartiteGraph::new((0..nl).collect(), (0..nr).collect()).unwrap();
        for &(l, r) in edges {
            g.add_edge(l, r).unwrap();
        }
        g.normalize();
        g
    }

    #[test]
    fn complete_two_by_two() {
        let g = graph(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(maximum_matching(&g).size(), 2);
        assert_eq!(hall_violator(&g, 1), None);
    }

    #[test]
    fn path_graph() {
        let g = graph(2, 1, &[(0, 0), (1, 0)]);
        assert_eq!(maximum_matching(&g).size(), 1);
    }

    #[test]
    fn two_to_one_on_complete() {
        let g = graph(4, 2, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1)]);
        let a = k_to_one_surjection(&g, 2).unwrap();
        verify_assignment(&g, &a).unwrap();
        assert_eq!(a.preimages(2).iter().map(Vec::len).collect::<Vec<_>>(), [2, 2]);
        assert!(a.is_total());
        for m in a.matchings() {
            assert_eq!(m.len(), 2);
        }
    }

    #[test]
    fn single_neighbor_fails_with_right_violator() {
        let g = graph(2, 1, &[(0, 0)]);
        assert_eq!(k_to_one_surjection(&g, 2), Err(SurjectionFailure::HallViolator(vec![0])));
    }

    #[test]
    fn one_left_two_right() {
        let g = graph(1, 2, &[(0, 0), (0, 1)]);
        assert_eq!(hall_violator(&g, 1), Some(vec![0, 1]));
    }

    #[test]
    fn required_vertices_stay_in_domain() {
        // left 0 and 1 both fit right 0; without the requirement left 2 might be left out.
        let g = graph(3, 1, &[(0, 0), (1, 0), (2, 0)]);
        let a = k_to_one_surjection_covering(&g, 2, &[2]).unwrap();
        assert!(a.assignment[2].is_some());
        verify_assignment(&g, &a).unwrap();
        let err = k_to_one_surjection_covering(&g, 1, &[0, 1]).unwrap_err();
        assert_eq!(err, SurjectionFailure::RequiredUnsaturated(vec![0, 1]));
    }

    #[test]
    fn duplicates_and_bad_edges_rejected() {
        assert!(BipartiteGraph::<i32, i32>::new(vec![1, 1], vec![2]).is_err());
        let mut g = BipartiteGraph::new(vec![1], vec![2]).unwrap();
        assert!(g.add_edge(0, 1).is_err());
    }

    #[test]
    fn parallel_edges_collapse() {
        let g = graph(1, 1, &[(0, 0), (0, 0)]);
        assert_eq!(g.edge_count(), 1);
    }
}
