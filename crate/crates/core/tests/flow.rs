use flowcert::error::Error;
use flowcert::flow::*;
use flowcert::group::{Element, GroupSpec, Lamp};
use flowcert::subshift::{count_patterns, golden_mean, patch_check, Patch, PatchCheck, SubshiftSpec, DEFAULT_NODE_CAP};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashSet};

fn z() -> GroupSpec {
    GroupSpec::free_abelian(1)
}

fn int(k: i64) -> Element {
    Element::Vector(vec![k])
}

fn bits(s: &str) -> Bits {
    parse_bits(s).unwrap()
}

fn domain(xs: impl IntoIterator<Item = i64>) -> BTreeSet<Element> {
    xs.into_iter().map(int).collect()
}

#[test]
fn coinduce_from_trivial_subgroup_is_a_full_shift() {
    let one_point = SubshiftSpec::full(z(), vec![0u8, 1, 2]).unwrap();
    let cosets = CosetStructure::new(z(), z(), Subgroup::Trivial).unwrap();
    let cind = coinduce(&one_point, &cosets).unwrap();
    assert_eq!(count_patterns(&cind, &domain(0..4), DEFAULT_NODE_CAP).unwrap(), 81);

    // a one-point spec allowing only {0, 1}
    let restricted = SubshiftSpec::with_allowed(z(), vec![0u8, 1, 2], vec![int(0)], [vec![0], vec![1]]).unwrap();
    let cind = coinduce(&restricted, &cosets).unwrap();
    assert_eq!(count_patterns(&cind, &domain(0..4), DEFAULT_NODE_CAP).unwrap(), 16);

    let f2 = GroupSpec::free(2);
    let c = CosetStructure::new(f2.clone(), z(), Subgroup::Trivial).unwrap();
    assert_eq!(c.decompose(&f2.parse_element("ab").unwrap()).unwrap().1, int(0));
    assert!(c.transversal().is_none());
}

/// Counts compatible families (x_δ)_{δ ∈ D} directly: each x_δ is a patch of ℤ on
/// {k : δ + m·k ∈ D}, every x_δ is inner-admissible, and x_{δ+mk}(l) = x_δ(k + l).
fn brute_family_count(inner: &SubshiftSpec<u8>, m: i64, d: &[i64]) -> u64 {
    let dom: Vec<Vec<i64>> =
        d.iter().map(|&delta| (-10..=10).filter(|k| d.contains(&(delta + m * k))).collect()).collect();
    let sizes: Vec<usize> = dom.iter().map(|v| v.len()).collect();
    let total_cells: usize = sizes.iter().sum();
    let a = inner.alphabet.len() as u64;
    let mut count = 0;
    for code in 0..a.pow(total_cells as u32) {
        let mut c = code;
        let mut fam: Vec<BTreeMap<i64, u8>> = Vec::new();
        for ks in &dom {
            let mut x = BTreeMap::new();
            for &k in ks {
                x.insert(k, inner.alphabet[(c % a) as usize]);
                c /= a;
            }
            fam.push(x);
        }
        let compatible = d.iter().enumerate().all(|(i, &delta)| {
            d.iter().enumerate().all(|(j, &eps)| {
                let diff = eps - delta;
                if diff % m != 0 {
                    return true;
                }
                let k = diff / m;
                fam[j].iter().all(|(l, v)| fam[i].get(&(k + l)).is_none_or(|w| w == v))
            })
        });
        let admissible = fam.iter().all(|x| {
            let p = Patch::total(x.iter().map(|(k, v)| (int(*k), *v))).unwrap();
            patch_check(inner, &p).unwrap() == PatchCheck::Ok
        });
        count += (compatible && admissible) as u64;
    }
    count
}

#[test]
fn coinduce_from_even_integers() {
    let inner = golden_mean();
    let cosets = CosetStructure::new(z(), z(), Subgroup::Multiples(2)).unwrap();
    let cind = coinduce(&inner, &cosets).unwrap();
    assert_eq!(cind.window, vec![int(0), int(2)]);
    let n = count_patterns(&cind, &domain(0..4), DEFAULT_NODE_CAP).unwrap();
    assert_eq!(n, 9);
    assert_eq!(n, brute_family_count(&inner, 2, &[0, 1, 2, 3]));

    let cosets3 = CosetStructure::new(z(), z(), Subgroup::Multiples(3)).unwrap();
    let cind3 = coinduce(&inner, &cosets3).unwrap();
    let d: Vec<i64> = (0..6).collect();
    assert_eq!(
        count_patterns(&cind3, &domain(d.clone()), DEFAULT_NODE_CAP).unwrap(),
        brute_family_count(&inner, 3, &d)
    );
    assert_eq!(cosets3.transversal().unwrap(), vec![int(0), int(1), int(2)]);
}

#[test]
fn lifted_families_are_compatible() {
    let inner = golden_mean();
    let cosets = CosetStructure::new(z(), z(), Subgroup::Multiples(2)).unwrap();
    let z_patch = Patch::total((0..6).map(|k| (int(k), [1u8, 0, 0, 1, 0, 0][k as usize]))).unwrap();
    let gammas: Vec<Element> = (-3..=3).map(int).collect();
    let fam = lift_family(&cosets, &z_patch, &gammas).unwrap();
    assert_eq!(fam[&int(1)].get(&int(1)), Some(&1));
    check_compatibility(&cosets, &fam, &gammas).unwrap();
    for x in fam.values() {
        assert_eq!(patch_check(&inner, x).unwrap(), PatchCheck::Ok);
    }
    let mut bad = fam.clone();
    let cells = bad[&int(0)].cells().iter().map(|(k, v)| (k.clone(), if *k == int(1) { 1 - v } else { *v }));
    bad.insert(int(0), Patch::total(cells).unwrap());
    assert!(matches!(check_compatibility(&cosets, &bad, &gammas), Err(Error::Violation { .. })));
}

fn random_spec(rng: &mut ChaCha8Rng, group: &GroupSpec, window: Vec<Element>) -> SubshiftSpec<u8> {
    let w = window.len() as u32;
    let allowed: Vec<Vec<u8>> = (0..2u32.pow(w))
        .filter(|_| rng.gen_bool(0.6))
        .map(|v| (0..w).map(|i| ((v >> i) & 1) as u8).collect())
        .collect();
    SubshiftSpec::with_allowed(group.clone(), vec![0, 1], window, allowed).unwrap()
}

#[test]
fn coinduce_whole_group_preserves_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z2 = GroupSpec::free_abelian(2);
    let e = |x, y| Element::Vector(vec![x, y]);
    for i in 0..10 {
        let (g, window, dom): (GroupSpec, Vec<Element>, BTreeSet<Element>) = if i % 2 == 0 {
            (z(), vec![int(0), int(1), int(2)], domain(0..6))
        } else {
            (z2.clone(), vec![e(0, 0), e(1, 0), e(0, 1)], (0..3).flat_map(|x| (0..3).map(move |y| e(x, y))).collect())
        };
        let inner = random_spec(&mut rng, &g, window);
        let cosets = CosetStructure::new(g.clone(), g.clone(), Subgroup::Whole).unwrap();
        let cind = coinduce(&inner, &cosets).unwrap();
        assert_eq!(
            count_patterns(&cind, &dom, DEFAULT_NODE_CAP).unwrap(),
            count_patterns(&inner, &dom, DEFAULT_NODE_CAP).unwrap(),
            "spec {i}"
        );
    }
}

#[test]
fn coinduce_rejects_unsupported_pairs() {
    let f2 = GroupSpec::free(2);
    assert!(CosetStructure::new(f2.clone(), z(), Subgroup::Multiples(2)).is_err());
    assert!(CosetStructure::new(z(), z(), Subgroup::Multiples(0)).is_err());
    assert!(CosetStructure::new(f2.clone(), z(), Subgroup::Whole).is_err());
    let c = CosetStructure::new(z(), z(), Subgroup::Whole).unwrap();
    let over_f2 = SubshiftSpec::full(f2, vec![0u8]).unwrap();
    assert!(coinduce(&over_f2, &c).is_err());
    let wide = SubshiftSpec::with_oracle(z(), vec![0u8], vec![int(0), int(1)], "any", |_| true).unwrap();
    let t = CosetStructure::new(z(), z(), Subgroup::Trivial).unwrap();
    assert!(coinduce(&wide, &t).is_err());
}

proptest! {
    #[test]
    fn decomposition_is_exact(k in -1000i64..1000, m in 1u64..9) {
        let c = CosetStructure::new(z(), z(), Subgroup::Multiples(m)).unwrap();
        let (rep, gamma) = c.decompose(&int(k)).unwrap();
        prop_assert_eq!(z().multiply(&rep, &c.embed(&gamma).unwrap()), int(k));
        prop_assert!(c.transversal().unwrap().contains(&rep));
    }
}

fn bit_patch(cells: &[(i64, usize)]) -> Patch<usize> {
    Patch::total(cells.iter().map(|&(k, v)| (int(k), v))).unwrap()
}

#[test]
fn jump_examples() {
    let j = wreath_jump(CyclicAction::swap(), z()).unwrap();
    let p = bit_patch(&[(-1, 0), (0, 0), (1, 0)]);
    let flipped = j.apply(&JumpLetter::Lamp { at: int(0), power: 1 }, &p).unwrap();
    assert_eq!(flipped, bit_patch(&[(-1, 0), (0, 1), (1, 0)]));
    assert_eq!(j.apply_word(&[], &p).unwrap(), p);
    let shifted = j.apply(&JumpLetter::Shift(int(1)), &flipped).unwrap();
    assert_eq!(shifted, bit_patch(&[(0, 0), (1, 1), (2, 0)]));
    // a lamp outside the patch changes nothing visible
    assert_eq!(j.apply(&JumpLetter::Lamp { at: int(9), power: 1 }, &p).unwrap(), p);
    assert_eq!(j.base_spec().unwrap().alphabet, vec![0, 1]);
}

#[test]
fn jump_rejects_unsupported_input() {
    assert!(CyclicAction::new(2, vec![0, 0]).is_err());
    assert!(CyclicAction::new(2, vec![1, 2, 0]).is_err());
    assert!(CyclicAction::new(0, vec![0]).is_err());
    assert!(CyclicAction::new(3, vec![1, 2, 0]).is_ok());
    assert!(CyclicAction::new(6, vec![1, 0]).is_ok());
    assert!(wreath_jump(CyclicAction::swap(), GroupSpec::lamplighter()).is_err());
    let j = wreath_jump(CyclicAction::swap(), z()).unwrap();
    assert!(j.apply(&JumpLetter::Shift(Element::Vector(vec![1, 1])), &bit_patch(&[(0, 0)])).is_err());
}

fn random_patch(rng: &mut ChaCha8Rng, cells: &[Element], q: usize) -> Patch<usize> {
    Patch::total(cells.iter().map(|c| (c.clone(), rng.gen_range(0..q)))).unwrap()
}

#[test]
fn wreath_relation_on_random_patches() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f2 = GroupSpec::free(2);
    let f2_cells: Vec<Element> =
        flowcert::group::ball(&f2, &f2.standard_generating_set(), 2, 1000).unwrap().elements().to_vec();
    let f2_words = ["a", "b", "aB", "ba", "AAb", ""];
    for (lambda, act) in [(z(), CyclicAction::swap()), (f2.clone(), CyclicAction::new(3, vec![1, 2, 0]).unwrap())] {
        let j = wreath_jump(act.clone(), lambda.clone()).unwrap();
        for _ in 0..200 {
            let (cells, l, p): (Vec<Element>, Element, Element) = if lambda == z() {
                ((-5..=5).map(int).collect(), int(rng.gen_range(-3..=3)), int(rng.gen_range(-6..=6)))
            } else {
                let pick = |rng: &mut ChaCha8Rng| {
                    lambda.evaluate(f2_words[rng.gen_range(0..f2_words.len())]).unwrap_or(lambda.identity())
                };
                (f2_cells.clone(), pick(&mut rng), pick(&mut rng))
            };
            let x = random_patch(&mut rng, &cells, act.alphabet_size());
            let power = rng.gen_range(-2..=2);
            let lhs = j
                .apply_word(
                    &[
                        JumpLetter::Shift(l.clone()),
                        JumpLetter::Lamp { at: p.clone(), power },
                        JumpLetter::Shift(lambda.inverse(&l)),
                    ],
                    &x,
                )
                .unwrap();
            let rhs = j.apply(&JumpLetter::Lamp { at: lambda.multiply(&l, &p), power }, &x).unwrap();
            assert_eq!(lhs, rhs, "λ={l} p={p}");
        }
    }
}

#[test]
fn jump_matches_lamplighter_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let j = wreath_jump(CyclicAction::swap(), z()).unwrap();
    let l = GroupSpec::lamplighter();
    let cells: Vec<Element> = (-12..=12).map(int).collect();
    let random_lamp = |rng: &mut ChaCha8Rng| {
        let lamps: Vec<i64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(-3..=3)).collect();
        Lamp::new(lamps, rng.gen_range(-3..=3))
    };
    for _ in 0..300 {
        let (g, h) = (random_lamp(&mut rng), random_lamp(&mut rng));
        let x = random_patch(&mut rng, &cells, 2);
        let gh = match l.multiply(&Element::Lamp(g.clone()), &Element::Lamp(h.clone())) {
            Element::Lamp(p) => p,
            _ => unreachable!(),
        };
        let both = j.apply_word(&lamplighter_word(&g), &j.apply_word(&lamplighter_word(&h), &x).unwrap()).unwrap();
        assert_eq!(j.apply_word(&lamplighter_word(&gh), &x).unwrap(), both);
    }
}

fn value(o: TailOutcome) -> String {
    match o {
        TailOutcome::Value(b) => format_bits(&b),
        TailOutcome::Boundary { .. } => "boundary".into(),
    }
}

#[test]
fn tail_action_examples() {
    use TailGen::*;
    assert_eq!(value(f2_tail_action(&bits("10"), &[G2])), "01");
    assert_eq!(value(f2_tail_action(&bits("0110"), &[G1, G1])), "0110");
    assert_eq!(value(f2_tail_action(&bits("0"), &[G2Inv, G2])), "0");
    assert_eq!(value(f2_tail_action(&bits("0"), &[G2])), "00");
    assert_eq!(value(f2_tail_action(&bits("110"), &[G2])), "10");
    assert_eq!(f2_tail_action(&bits("1"), &[G2]), TailOutcome::Boundary { step: 0, generator: G2 });
    assert_eq!(f2_tail_action(&bits("0"), &[G2Inv]), TailOutcome::Boundary { step: 0, generator: G2Inv });
    // rightmost first: g₂ then g₁
    assert_eq!(value(f2_tail_action(&bits("10"), &[G1, G2])), "11");
    assert_eq!(value(f2_tail_action(&bits("0"), &[])), "0");
    assert_eq!(parse_tail_word("g2 g1^-1,g2⁻¹").unwrap(), vec![G2, G1Inv, G2Inv]);
    assert!(parse_tail_word("g3").is_err());
    assert_eq!(format_tail_word(&[G1, G2Inv]), "g1 g2^-1");
    assert!(parse_bits("012").is_err());
}

#[test]
fn prefix_maps_need_complete_codes() {
    assert!(PrefixMap::new(vec![(bits("0"), bits("1"))]).is_err());
    assert!(PrefixMap::new(vec![(bits("0"), bits("0")), (bits("01"), bits("1"))]).is_err());
    assert!(PrefixMap::new(vec![(bits("0"), bits("00")), (bits("1"), bits("01"))]).is_err());
    for g in TailGen::ALL {
        let m = g.prefix_map();
        assert_eq!(PrefixMap::new(m.rules().to_vec()).unwrap(), m);
    }
}

fn all_strings(max_len: usize) -> Vec<Bits> {
    (1..=max_len).flat_map(|l| (0u32..1 << l).map(move |v| (0..l).map(|i| ((v >> i) & 1) as u8).collect())).collect()
}

#[test]
fn generators_are_mutually_inverse() {
    for x in all_strings(10) {
        for g in TailGen::ALL {
            if let TailOutcome::Value(y) = f2_tail_action(&x, &[g]) {
                assert_eq!(
                    f2_tail_action(&y, &[g.inverse()]),
                    TailOutcome::Value(x.clone()),
                    "{g} on {}",
                    format_bits(&x)
                );
            }
        }
    }
}

#[test]
fn orbit_examples() {
    let w = "1011";
    let r = f2_orbit_check(&bits(&format!("0{w}")), &bits(&format!("00{w}")), 1).unwrap();
    assert_eq!(r.outcome, OrbitOutcome::Connected { word: vec![TailGen::G2] });
    assert!(r.tail.consistent);
    assert_eq!((r.tail.m, r.tail.n, r.tail.length), (1, 2, 4));

    let r = f2_orbit_check(&bits("01"), &bits("10"), 3).unwrap();
    let OrbitOutcome::Connected { word } = &r.outcome else { panic!("{r:?}") };
    assert_eq!(f2_tail_action(&bits("01"), word), TailOutcome::Value(bits("10")));
    assert!(r.tail.consistent);

    let r = f2_orbit_check(&bits("00000000"), &bits("11111111"), 3).unwrap();
    assert!(matches!(r.outcome, OrbitOutcome::NotWithinDepth { visited, .. } if visited > 1));
    assert_eq!(r.tail.length, 0);

    let r = f2_orbit_check(&bits("0"), &bits("0"), 0).unwrap();
    assert_eq!(r.outcome, OrbitOutcome::Connected { word: vec![] });
    assert!(f2_orbit_check(&[], &bits("0"), 2).is_err());
}

#[test]
fn connected_pairs_are_tail_consistent() {
    for x in all_strings(6) {
        for (y, word, tail) in orbit_ball(&x, 5).unwrap() {
            assert!(tail.consistent, "{} ~ {}", format_bits(&x), format_bits(&y));
            assert_eq!(f2_tail_action(&x, &word), TailOutcome::Value(y.clone()));
        }
    }
}

#[test]
fn first_bit_partition_needs_radius_growing_with_length() {
    // pairs differing only in the last bit are the hardest; they need radius 2L − 3
    for len in 3..=6usize {
        let r = 2 * len - 3;
        let table = LabelTable::new(r).unwrap();
        let smaller = 2 * 3usize.pow(r as u32 - 1) - 1;
        let strings: Vec<Bits> = all_strings(len).into_iter().filter(|s| s.len() == len).collect();
        let labels: Vec<Vec<Option<u8>>> = strings.iter().map(|s| table.labels(s)).collect();
        let mut hardest = false;
        for i in 0..strings.len() {
            for j in i + 1..strings.len() {
                assert!(separated(&labels[i], &labels[j]), "{len}: {:?} {:?}", strings[i], strings[j]);
                hardest |= !separated(&labels[i][..smaller], &labels[j][..smaller]);
            }
        }
        assert!(hardest, "length {len} is separated below radius {r}");
    }
}

#[test]
fn separation_scan_counts() {
    let scan = first_bit_separation_scan(5, 8).unwrap();
    assert!(scan.unseparated.is_empty());
    assert_eq!(scan.pairs_checked, [2usize, 4, 8, 16, 32].iter().map(|n| n * (n - 1) / 2).sum::<usize>());
    let scan = first_bit_separation_scan(6, 8).unwrap();
    assert_eq!(scan.unseparated.len(), 2);
    for (x, y) in &scan.unseparated {
        assert_eq!(x[..5], y[..5]);
    }
}

#[test]
fn odometer_examples() {
    let d = |s: &str| parse_digits(s).unwrap();
    assert_eq!(odometer_step(&d("30"), Direction::Up).unwrap(), OdometerStep::Value(d("01")));
    assert_eq!(odometer_step(&d("0"), Direction::Up).unwrap(), OdometerStep::Value(d("1")));
    assert_eq!(odometer_step(&d("333"), Direction::Up).unwrap(), OdometerStep::CarryOverflow);
    assert_eq!(odometer_step(&d("000"), Direction::Down).unwrap(), OdometerStep::CarryOverflow);
    assert_eq!(odometer_step(&d("01"), Direction::Down).unwrap(), OdometerStep::Value(d("30")));
    assert!(odometer_step(&[], Direction::Up).is_err());
    assert!(parse_digits("14").is_err());

    assert_eq!(odometer_compression(&d("121"), Some(0)).unwrap(), d("321"));
    assert_eq!(odometer_compression(&d("011"), Some(1)).unwrap(), d("031"));
    assert_eq!(odometer_compression(&d("011"), Some(2)).unwrap(), d("031"));
    assert!(matches!(odometer_compression(&d("330"), None), Err(Error::Precondition(_))));
    assert!(odometer_compression(&d("330"), Some(2)).is_err());
    assert!(odometer_compression(&d("011"), Some(0)).is_err());
    assert!(odometer_compression(&d("011"), Some(3)).is_err());
    assert_eq!(stable_tail_start(&d("0112")), 1);
    assert_eq!(stable_tail_start(&d("1123")), 4);
    assert_eq!(format_digits(&d("0312")), "0312");
}

fn value_of(x: &[u8]) -> u64 {
    x.iter().rev().fold(0, |acc, &d| acc * 4 + d as u64)
}

#[test]
fn odometer_compression_scan() {
    for len in 1..=6u32 {
        let mut images = HashSet::new();
        for v in 0..4u32.pow(len) {
            let x: Vec<u8> = (0..len).map(|i| ((v >> (2 * i)) & 3) as u8).collect();
            if !matches!(x[len as usize - 1], 1 | 2) {
                continue;
            }
            let y = odometer_compression(&x, Some(len as usize - 1)).unwrap();
            assert_eq!(x.iter().zip(&y).filter(|(a, b)| a != b).count(), 1);
            assert_ne!(stable_tail_start(&y), 0);
            assert_eq!(odometer_decompression(&y).unwrap(), x);
            assert!(images.insert(y));
        }
    }
}

proptest! {
    #[test]
    fn odometer_steps_are_inverse(x in prop::collection::vec(0u8..4, 1..10)) {
        match odometer_step(&x, Direction::Up).unwrap() {
            OdometerStep::Value(y) => {
                prop_assert_eq!(value_of(&y), value_of(&x) + 1);
                prop_assert_eq!(odometer_step(&y, Direction::Down).unwrap(), OdometerStep::Value(x.clone()));
            }
            OdometerStep::CarryOverflow => prop_assert!(x.iter().all(|&d| d == 3)),
        }
    }

    #[test]
    fn tail_words_invert(x in prop::collection::vec(0u8..2, 1..14), w in prop::collection::vec(0usize..4, 0..8)) {
        let word: Vec<TailGen> = w.iter().map(|&i| TailGen::ALL[i]).collect();
        let inverse: Vec<TailGen> = word.iter().rev().map(|g| g.inverse()).collect();
        if let TailOutcome::Value(y) = f2_tail_action(&x, &word) {
            prop_assert_eq!(f2_tail_action(&y, &inverse), TailOutcome::Value(x.clone()));
        }
    }
}
