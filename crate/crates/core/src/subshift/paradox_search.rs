use super::patch::{patch_check, translate_patch, Patch, PatchCheck};
use super::search::{admissible_words, enumerate_admissible};
use super::spec::{SubshiftSpec, Symbol};
use crate::certificates::reach;
use crate::error::{Error, Result};
use crate::group::{ball, Element, DEFAULT_BALL_CAP};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Pieces partition X; translates are disjoint and miss a nonempty cylinder.
    Compression,
    /// Two families, each of whose translates partitions X.
    Paradox,
}

/// The depth-d cylinder of `pattern` (listed over ball(d) in breadth-first order), moved by `translation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenPiece<A> {
    pub pattern: Vec<A>,
    pub family: u8,
    pub translation: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenDecomposition<A> {
    pub mode: SearchMode,
    pub depth: usize,
    pub translations: Vec<Element>,
    pub pieces: Vec<ClopenPiece<A>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParadoxSearchOutcome<A> {
    Found(ClopenDecomposition<A>),
    /// `exhaustive` means the whole piece space at this depth and translation set was refuted.
    NotFound {
        exhaustive: bool,
        nodes: u64,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct ParadoxSearchOptions {
    pub max_patches: usize,
    pub node_cap: u64,
}

impl Default for ParadoxSearchOptions {
    fn default() -> Self {
        ParadoxSearchOptions { max_patches: 1 << 20, node_cap: 10_000_000 }
    }
}

struct Frame {
    class: usize,
    next: usize,
}

/// Searches for a piecewise-translation witness whose pieces are depth-d cylinders.
/// Validity is decided on admissible patches over ball(d + ρ), ρ the longest translation.
pub fn clopen_paradox_search<A: Symbol>(
    spec: &SubshiftSpec<A>,
    depth: usize,
    translations: &[Element],
    mode: SearchMode,
    opts: ParadoxSearchOptions,
) -> Result<ParadoxSearchOutcome<A>> {
    let g = &spec.group;
    let mut tr: Vec<Element> = Vec::new();
    for t in translations {
        if !g.contains(t) {
            return Err(Error::InvalidInput(format!("translation {t} is not in {g}")));
        }
        if !tr.contains(t) {
            tr.push(t.clone());
        }
    }
    if tr.is_empty() {
        return Err(Error::InvalidInput("no translations".into()));
    }
    let rho = reach(g, &tr);
    let region = ball(g, &g.standard_generating_set(), depth + rho, DEFAULT_BALL_CAP)?;
    let target: BTreeSet<Element> = region.iter().cloned().collect();
    let (order, words) = admissible_words(spec, &target, opts.max_patches, opts.node_cap)?;
    let n = words.len();
    if n == 0 {
        return Err(Error::Precondition(format!("no admissible patch on ball({})", depth + rho)));
    }
    let slot: HashMap<&Element, usize> = order.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let inner = region.within(depth);

    // positions of γ·l for l ∈ ball(d), per translation; the identity is added so that
    // every class seen at the centre gets a piece
    let mut centres = tr.clone();
    if !centres.contains(&g.identity()) {
        centres.push(g.identity());
    }
    let lookup: Vec<Vec<usize>> =
        centres.iter().map(|c| inner.iter().map(|l| slot[&g.multiply(c, l)]).collect()).collect();
    let mut class_of: HashMap<Vec<u16>, usize> = HashMap::new();
    let mut classes: Vec<Vec<u16>> = Vec::new();
    // occ[class][t] = patches y whose class at translation t is `class`
    let mut occ: Vec<Vec<Vec<u32>>> = Vec::new();
    for (yi, y) in words.iter().enumerate() {
        for (ci, pos) in lookup.iter().enumerate() {
            let key: Vec<u16> = pos.iter().map(|&p| y[p]).collect();
            let c = *class_of.entry(key.clone()).or_insert_with(|| {
                classes.push(key);
                occ.push(vec![Vec::new(); tr.len()]);
                classes.len() - 1
            });
            if ci < tr.len() {
                occ[c][ci].push(yi as u32);
            }
        }
    }

    let families = if mode == SearchMode::Compression { 1 } else { 2 };
    let options: Vec<(usize, usize)> = (0..families).flat_map(|f| (0..tr.len()).map(move |t| (f, t))).collect();
    let weight = |c: usize, o: usize| occ[c][options[o].1].len() as u64;
    let mut class_order: Vec<usize> = (0..classes.len()).collect();
    class_order.sort_by_key(|&c| std::cmp::Reverse(occ[c].iter().map(Vec::len).max().unwrap_or(0)));
    // suffix bounds over unassigned classes
    let m = class_order.len();
    let mut rest_min = vec![0u64; m + 1];
    let mut rest_max = vec![0u64; m + 1];
    for i in (0..m).rev() {
        let c = class_order[i];
        let ws = (0..options.len()).map(|o| weight(c, o));
        rest_min[i] = rest_min[i + 1] + ws.clone().min().unwrap_or(0);
        rest_max[i] = rest_max[i + 1] + ws.max().unwrap_or(0);
    }
    let total = n as u64;
    let feasible = |sums: &[u64; 2], i: usize| -> bool {
        match mode {
            SearchMode::Compression => sums[0] + rest_min[i] < total,
            SearchMode::Paradox => sums[0] <= total && sums[1] <= total && sums[0] + sums[1] + rest_max[i] >= 2 * total,
        }
    };

    let mut counts = vec![vec![0u8; n]; families];
    let mut sums = [0u64; 2];
    let mut choice = vec![usize::MAX; m];
    let mut stack: Vec<Frame> = Vec::new();
    let mut nodes = 0u64;
    if !feasible(&sums, 0) {
        return Ok(ParadoxSearchOutcome::NotFound { exhaustive: true, nodes });
    }
    if m > 0 {
        stack.push(Frame { class: 0, next: 0 });
    }
    let mut done = m == 0;
    while !done {
        let Some(top) = stack.last_mut() else {
            return Ok(ParadoxSearchOutcome::NotFound { exhaustive: true, nodes });
        };
        let i = top.class;
        let c = class_order[i];
        // undo the previous choice at this level
        if choice[i] != usize::MAX {
            let (f, t) = options[choice[i]];
            for &y in &occ[c][t] {
                counts[f][y as usize] -= 1;
            }
            sums[f] -= occ[c][t].len() as u64;
            choice[i] = usize::MAX;
        }
        if top.next == options.len() {
            stack.pop();
            continue;
        }
        let o = top.next;
        top.next += 1;
        nodes += 1;
        if nodes > opts.node_cap {
            return Ok(ParadoxSearchOutcome::NotFound { exhaustive: false, nodes });
        }
        let (f, t) = options[o];
        let ok = occ[c][t].iter().all(|&y| counts[f][y as usize] == 0);
        if !ok {
            continue;
        }
        for &y in &occ[c][t] {
            counts[f][y as usize] += 1;
        }
        sums[f] += occ[c][t].len() as u64;
        choice[i] = o;
        if !feasible(&sums, i + 1) {
            continue;
        }
        if i + 1 == m {
            done = match mode {
                SearchMode::Compression => true,
                SearchMode::Paradox => sums[0] == total && sums[1] == total,
            };
        } else {
            stack.push(Frame { class: i + 1, next: 0 });
        }
    }
    let pieces = (0..m)
        .map(|i| {
            let c = class_order[i];
            let (f, t) = options[choice[i]];
            ClopenPiece {
                pattern: classes[c].iter().map(|&s| spec.alphabet[s as usize].clone()).collect(),
                family: f as u8 + 1,
                translation: tr[t].clone(),
            }
        })
        .collect();
    Ok(ParadoxSearchOutcome::Found(ClopenDecomposition { mode, depth, translations: tr, pieces }))
}

/// Result of an independent recount of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport<A> {
    pub patches_checked: usize,
    /// For compression: an admissible patch whose cylinder no translate reaches.
    pub missed: Option<Patch<A>>,
}

/// Recounts a decomposition on every admissible patch over ball(d + ρ) by translating
/// patches directly and matching cylinder patterns.
pub fn verify_clopen_decomposition<A: Symbol>(
    spec: &SubshiftSpec<A>,
    dec: &ClopenDecomposition<A>,
    max_patches: usize,
    node_cap: u64,
) -> Result<DecompositionReport<A>> {
    let g = &spec.group;
    let fail = |m: String| Err(Error::Verification(m));
    let rho = reach(g, &dec.translations);
    let gens = g.standard_generating_set();
    let region = ball(g, &gens, dec.depth + rho, DEFAULT_BALL_CAP)?;
    let inner = ball(g, &gens, dec.depth, DEFAULT_BALL_CAP)?;
    let target: BTreeSet<Element> = region.iter().cloned().collect();
    let mut by_pattern: HashMap<&[A], &ClopenPiece<A>> = HashMap::new();
    for p in &dec.pieces {
        if !dec.translations.contains(&p.translation) {
            return fail(format!("piece translation {} is not in the translation set", p.translation));
        }
        let families_ok = match dec.mode {
            SearchMode::Compression => p.family == 1,
            SearchMode::Paradox => p.family == 1 || p.family == 2,
        };
        if !families_ok || p.pattern.len() != inner.len() {
            return fail("malformed piece".into());
        }
        if by_pattern.insert(&p.pattern, p).is_some() {
            return fail("two pieces share a cylinder".into());
        }
    }
    let patches = enumerate_admissible(spec, &Patch::empty(), &target, max_patches, node_cap)?;
    if patches.is_empty() {
        return fail("no admissible patch to test on".into());
    }
    let mut centres: Vec<Element> = dec.translations.clone();
    if !centres.contains(&g.identity()) {
        centres.push(g.identity());
    }
    let mut missed = None;
    for y in &patches {
        if patch_check(spec, y)? != PatchCheck::Ok {
            return fail("enumerated patch is not admissible".into());
        }
        let mut hits = [0usize; 2];
        for c in &centres {
            let moved = translate_patch(g, &g.inverse(c), y);
            let pattern: Vec<A> = inner.iter().map(|l| moved.get(l).cloned().expect("inside region")).collect();
            let Some(piece) = by_pattern.get(pattern.as_slice()) else {
                return fail(format!("cylinder seen at {c} has no piece"));
            };
            if &piece.translation == c {
                hits[piece.family as usize - 1] += 1;
            }
        }
        match dec.mode {
            SearchMode::Compression => {
                if hits[0] > 1 {
                    return fail("two translated pieces overlap".into());
                }
                if hits[0] == 0 && missed.is_none() {
                    missed = Some(y.clone());
                }
            }
            SearchMode::Paradox => {
                if hits != [1, 1] {
                    return fail(format!("a patch is covered {} and {} times by the two families", hits[0], hits[1]));
                }
            }
        }
    }
    if dec.mode == SearchMode::Compression && missed.is_none() {
        return fail("the translated pieces miss nothing".into());
    }
    Ok(DecompositionReport { patches_checked: patches.len(), missed })
}
