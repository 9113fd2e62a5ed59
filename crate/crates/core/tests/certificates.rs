use flowcert::certificates::*;
use flowcert::group::{ball, Element, GroupSpec, DEFAULT_BALL_CAP};
use flowcert::Error;
use num_rational::Ratio;
use std::collections::BTreeSet;

const CAP: usize = DEFAULT_BALL_CAP;

fn std_ball(g: &GroupSpec, r: usize) -> Vec<Element> {
    ball(g, &g.standard_generating_set(), r, CAP).unwrap().elements().to_vec()
}

#[test]
fn integer_folner_closed_form() {
    let z = GroupSpec::free_abelian(1);
    let s = z.unit_ball_set();
    for r in 0..30 {
        assert_eq!(folner_ratio(&z, &std_ball(&z, r), &s), Ratio::new(2, 2 * r as u64 + 1));
    }
    let cert = folner_search(&z, &s, parse_ratio("0.05").unwrap(), 40, CAP).unwrap().unwrap();
    assert_eq!(cert.radius, 20);
    assert_eq!(cert.ratio, Ratio::new(2, 41));
    assert_eq!(cert.set.len(), 41);
    verify_folner(&cert).unwrap();
}

#[test]
fn plane_folner_closed_form() {
    let z2 = GroupSpec::free_abelian(2);
    let s = z2.unit_ball_set();
    for r in 0..15u64 {
        let f = std_ball(&z2, r as usize);
        assert_eq!(folner_ratio(&z2, &f, &s), Ratio::new(4 * (r + 1), 2 * r * r + 2 * r + 1));
    }
    assert_eq!(folner_ratio(&z2, &std_ball(&z2, 2), &s), Ratio::new(12, 13));
    let half = folner_search(&z2, &s, Ratio::new(1, 2), 10, CAP).unwrap().unwrap();
    assert_eq!((half.radius, half.ratio), (4, Ratio::new(20, 41)));
    let fifth = folner_search(&z2, &s, Ratio::new(1, 5), 12, CAP).unwrap().unwrap();
    assert_eq!((fifth.radius, fifth.ratio), (10, Ratio::new(44, 221)));
    verify_folner(&fifth).unwrap();
}

#[test]
fn free_group_balls_are_not_folner() {
    let f2 = GroupSpec::free(2);
    let s = f2.unit_ball_set();
    for r in 0..=6 {
        assert!(folner_ratio(&f2, &std_ball(&f2, r), &s) > Ratio::from_integer(1));
    }
    assert_eq!(folner_search(&f2, &s, Ratio::new(1, 2), 6, CAP).unwrap(), None);
}

#[test]
fn lamplighter_rectangles() {
    let l = GroupSpec::lamplighter();
    let s = l.unit_ball_set();
    for n in 0..5u64 {
        let rect = lamplighter_rectangle(n as usize).unwrap();
        assert_eq!(rect.len() as u64, (1 << (2 * n + 1)) * (2 * n + 1));
        assert_eq!(folner_ratio(&l, &rect, &s), Ratio::new(2, 2 * n + 1));
    }
    let cert = folner_search(&l, &s, Ratio::new(1, 5), 12, CAP).unwrap().unwrap();
    assert_eq!(cert.family, FolnerFamily::Rectangle);
    assert_eq!((cert.radius, cert.ratio, cert.set.len()), (5, Ratio::new(2, 11), 22528));
    verify_folner(&cert).unwrap();
}

#[test]
fn tampered_folner_rejected() {
    let z = GroupSpec::free_abelian(1);
    let mut cert = folner_search(&z, &z.unit_ball_set(), Ratio::new(1, 2), 10, CAP).unwrap().unwrap();
    cert.set.pop();
    assert!(verify_folner(&cert).is_err());
}

#[test]
fn folner_preconditions() {
    let z = GroupSpec::free_abelian(1);
    let one = z.parse_element("1").unwrap();
    assert!(folner_search(&z, &[z.identity(), one.clone()], Ratio::new(1, 2), 3, CAP).is_err());
    assert!(folner_search(&z, &z.standard_generating_set(), Ratio::new(1, 2), 3, CAP).is_err());
    assert!(folner_search(&z, &z.unit_ball_set(), Ratio::from_integer(0), 3, CAP).is_err());
}

fn expect_cert(o: ExpansionOutcome) -> ExpansionCertificate {
    match o {
        ExpansionOutcome::Certificate(c) => c,
        ExpansionOutcome::Violator(v) => panic!("unexpected violator of size {}", v.set.len()),
    }
}

#[test]
fn free_group_expansion_radius_three() {
    let f2 = GroupSpec::free(2);
    let s = f2.unit_ball_set();
    let cert = expect_cert(expansion_certificate(&f2, &s, 3, CAP).unwrap());
    verify_expansion(&cert, CAP).unwrap();
    // every g in ball(2) is in the domain and steps stay in S
    let dom: BTreeSet<&Element> = cert.assignment.iter().map(|(g, _)| g).collect();
    assert!(std_ball(&f2, 2).iter().all(|g| dom.contains(g)));
    assert_eq!(cert.assignment.len(), 2 * 53);
}

/// Every F ⊆ ball(R−1) with |F| ≤ 4 satisfies |F·S| ≥ 2|F|.
#[test]
fn expansion_implies_doubling_on_small_subsets() {
    let f2 = GroupSpec::free(2);
    let s = f2.unit_ball_set();
    expect_cert(expansion_certificate(&f2, &s, 3, CAP).unwrap());
    let inner = std_ball(&f2, 2);
    let n = inner.len();
    let mut checked = 0;
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for d in c..n {
                    let f: BTreeSet<Element> = [a, b, c, d].iter().map(|&i| inner[i].clone()).collect();
                    let f: Vec<Element> = f.into_iter().collect();
                    let fs = flowcert::group::set_product(&f2, &f, &s);
                    assert!(fs.len() >= 2 * f.len());
                    checked += 1;
                }
            }
        }
    }
    // multisets of size 4 from 17 elements
    assert_eq!(checked, 4845);
}

#[test]
fn integer_expansion_violator() {
    let z = GroupSpec::free_abelian(1);
    let s = z.unit_ball_set();
    match expansion_certificate(&z, &s, 5, CAP).unwrap() {
        ExpansionOutcome::Violator(v) => {
            assert!(v.neighborhood < 2 * v.set.len());
            let fs = flowcert::group::set_product(&z, &v.set, &s);
            assert_eq!(fs.len(), v.neighborhood);
        }
        ExpansionOutcome::Certificate(_) => panic!("the integers cannot double"),
    }
}

#[test]
fn trivial_generating_set_has_violator() {
    let f2 = GroupSpec::free(2);
    let out = expansion_certificate(&f2, &[f2.identity()], 2, CAP).unwrap();
    assert!(matches!(out, ExpansionOutcome::Violator(_)));
}

#[test]
fn xt_patch_interior_counts() {
    let f2 = GroupSpec::free(2);
    let s = f2.unit_ball_set();
    let cert = expect_cert(expansion_certificate(&f2, &s, 3, CAP).unwrap());
    let xt = xt_patch_from_expansion(&cert, CAP).unwrap();
    assert_eq!(xt.interior_radius, 2);
    assert_eq!(xt.kind, ParadoxKind::Xt);
    // recount through the inverse route: preimages of g are g·x⁻¹ with x_{g·x⁻¹} = x
    let cells: std::collections::HashMap<&Element, &Element> = xt.cells.iter().map(|(h, l)| (h, l.element())).collect();
    for g in std_ball(&f2, 2) {
        let count = s
            .iter()
            .filter(|x| {
                let h = f2.multiply(&g, &f2.inverse(x));
                cells.get(&h) == Some(x)
            })
            .count();
        assert_eq!(count, 2, "at {g}");
    }
}

#[test]
fn xt_patch_degenerate_radius_one() {
    let f2 = GroupSpec::free(2);
    let cert = expect_cert(expansion_certificate(&f2, &f2.unit_ball_set(), 1, CAP).unwrap());
    let xt = xt_patch_from_expansion(&cert, CAP).unwrap();
    assert_eq!(xt.interior_radius, 0);
    let hits = xt.cells.iter().filter(|(h, l)| f2.multiply(h, l.element()) == f2.identity()).count();
    assert_eq!(hits, 2);
}

#[test]
fn tampered_expansion_rejected() {
    let f2 = GroupSpec::free(2);
    let mut cert = expect_cert(expansion_certificate(&f2, &f2.unit_ball_set(), 2, CAP).unwrap());
    cert.assignment.pop();
    assert!(xt_patch_from_expansion(&cert, CAP).is_err());
}

#[test]
fn reference_decomposition_verifies() {
    let (f2, s, t, pieces) = reference_f2_pieces();
    let cert = xst_certificate(&f2, &s, &t, &pieces, 6, CAP).unwrap();
    assert_eq!(cert.interior_radius, 5);
    // oracle: S-count(g) = #{s : g·s⁻¹ ∈ A_s}, evaluated directly from the predicates
    for g in std_ball(&f2, 5) {
        for family in [PieceLabel::S as fn(Element) -> PieceLabel, PieceLabel::T] {
            let count = pieces
                .iter()
                .filter(|p| std::mem::discriminant(&p.label) == std::mem::discriminant(&family(f2.identity())))
                .filter(|p| p.predicate.holds(&f2.multiply(&g, &f2.inverse(p.label.element()))))
                .count();
            assert_eq!(count, 1, "at {g}");
        }
    }
    let report = tarski_report(&[cert], CAP).unwrap();
    assert_eq!(report.k_upper, Some(4));
    assert_eq!(report.l_upper, Some(3));
    assert_eq!(report.l_below_k, Some(true));
}

#[test]
fn decomposition_without_absorption_fails_at_identity() {
    let f2 = GroupSpec::free(2);
    let (_, s, t, _) = reference_f2_pieces();
    let pieces: Vec<Piece> = ["S:e=ends(a)", "S:a=ends(a⁻¹)", "T:e=ends(b)", "T:b=ends(b^-1)"]
        .iter()
        .map(|d| {
            let (label, pred) = d.split_once('=').unwrap();
            Piece { label: PieceLabel::parse(&f2, label).unwrap(), predicate: Predicate::parse(&f2, pred).unwrap() }
        })
        .collect();
    let err = xst_certificate(&f2, &s, &t, &pieces, 6, CAP).unwrap_err();
    assert!(matches!(err, Error::Violation { ref at, .. } if at == "e"), "{err}");
}

/// No labeling of ball(4) ⊂ ℤ by S={0,1}, T={0,−1} passes on the interior ball(3).
#[test]
fn integers_admit_no_paradoxical_patch() {
    let z = GroupSpec::free_abelian(1);
    let el = |s: &str| z.parse_element(s).unwrap();
    let s = vec![el("0"), el("1")];
    let t = vec![el("0"), el("-1")];
    let labels = [PieceLabel::S(el("0")), PieceLabel::S(el("1")), PieceLabel::T(el("0")), PieceLabel::T(el("-1"))];
    let region = std_ball(&z, 4);
    let mut passing = 0;
    for code in 0..4usize.pow(region.len() as u32) {
        let mut c = code;
        let cells = region
            .iter()
            .map(|g| {
                let l = labels[c % 4].clone();
                c /= 4;
                (g.clone(), l)
            })
            .collect();
        let cert = ParadoxCertificate {
            kind: ParadoxKind::Xst,
            group: z.clone(),
            s: s.clone(),
            t: t.clone(),
            radius: 4,
            interior_radius: 3,
            cells,
        };
        if verify_paradox(&cert, CAP).is_ok() {
            passing += 1;
        }
    }
    assert_eq!(passing, 0);
}

#[test]
fn tarski_report_edge_cases() {
    assert_eq!(tarski_report(&[], CAP).unwrap(), TarskiReport::default());
    let f2 = GroupSpec::free(2);
    // a 5-element T from the radius-1 ball
    let cert = expect_cert(expansion_certificate(&f2, &f2.unit_ball_set(), 2, CAP).unwrap());
    let xt = xt_patch_from_expansion(&cert, CAP).unwrap();
    let r = tarski_report(&[xt], CAP).unwrap();
    assert_eq!((r.k_upper, r.l_upper, r.l_below_k), (None, Some(5), None));
}

#[test]
fn probe_outcomes() {
    let opts = ProbeOptions::default();
    match amenability_probe(&GroupSpec::free_abelian(2), &opts).unwrap() {
        ProbeOutcome::Folner(c) => verify_folner(&c).unwrap(),
        other => panic!("{other:?}"),
    }
    match amenability_probe(&GroupSpec::free_abelian(1), &opts).unwrap() {
        ProbeOutcome::Folner(c) => assert_eq!((c.radius, c.ratio), (5, Ratio::new(2, 11))),
        other => panic!("{other:?}"),
    }
    match amenability_probe(&GroupSpec::free(2), &opts).unwrap() {
        ProbeOutcome::Expansion(c) => {
            assert_eq!(c.radius, 4);
            verify_expansion(&c, CAP).unwrap();
        }
        other => panic!("{other:?}"),
    }
    match amenability_probe(&GroupSpec::lamplighter(), &opts).unwrap() {
        ProbeOutcome::Folner(c) => {
            assert_eq!(c.family, FolnerFamily::Rectangle);
            verify_folner(&c).unwrap();
        }
        other => panic!("{other:?}"),
    }
    let tiny = ProbeOptions { budget: 2, ..ProbeOptions::default() };
    assert_eq!(amenability_probe(&GroupSpec::free(2), &tiny).unwrap(), ProbeOutcome::Exhausted { rounds: 3 });
}

#[test]
fn free_product_of_integers_expands() {
    let g = GroupSpec::free_product(GroupSpec::free_abelian(1), GroupSpec::free_abelian(1));
    let cert = expect_cert(expansion_certificate(&g, &g.unit_ball_set(), 4, CAP).unwrap());
    verify_expansion(&cert, CAP).unwrap();
}

#[test]
fn lamplighter_small_balls() {
    let l = GroupSpec::lamplighter();
    for r in 4..=6 {
        assert!(matches!(
            expansion_certificate(&l, &l.unit_ball_set(), r, CAP).unwrap(),
            ExpansionOutcome::Violator(_)
        ));
    }
}
