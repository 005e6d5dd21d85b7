mod common;

use common::*;
use hyplab::catalog::{as_conj, conj_hypergroup, named_group};
use hyplab::hypergroups::Hypergroup;
use hyplab::measures::{ElementId, Scalar};
use hyplab::registry::build_hypergroup;
use proptest::prelude::*;

fn ix(i: u64) -> ElementId {
    ElementId::Index(i)
}

fn triple_products_agree(h: &Hypergroup, x: &ElementId, y: &ElementId, z: &ElementId) {
    let left = h
        .convolve_measures(&h.convolve(x, y).unwrap(), &h.point(z).unwrap())
        .unwrap();
    let right = h
        .convolve_measures(&h.point(x).unwrap(), &h.convolve(y, z).unwrap())
        .unwrap();
    assert_eq!(left.terms(), right.terms());
}

#[test]
fn sl2_conjugacy_classes_match_orbits() {
    for name in ["sl2_2", "sl2_4"] {
        let g = named_group(name).unwrap();
        let h = conj_hypergroup(&g).unwrap();
        let mut lib: Vec<Vec<u32>> = as_conj(&h).unwrap().class_data().classes().to_vec();
        lib.iter_mut().for_each(|c| c.sort_unstable());
        lib.sort();
        let mut oracle = classes_by_orbits(&g);
        oracle.sort();
        assert_eq!(lib, oracle, "{name}");
    }
}

#[test]
fn sl2_4_class_sizes() {
    let h = conj_hypergroup(&named_group("sl2_4").unwrap()).unwrap();
    let sizes: Vec<usize> = as_conj(&h)
        .unwrap()
        .class_data()
        .classes()
        .iter()
        .map(Vec::len)
        .collect();
    let t = tally(&sizes);
    assert_eq!(t.get(&1), Some(&1));
    assert_eq!(t.get(&15), Some(&1));
    assert_eq!(t.get(&20), Some(&1), "q(q+1) split class");
    assert_eq!(t.get(&12), Some(&2), "q(q-1) classes");
    assert_eq!(sizes.iter().sum::<usize>(), 60);
}

#[test]
fn sl2_4_products_match_pair_counting() {
    let g = named_group("sl2_4").unwrap();
    let h = conj_hypergroup(&g).unwrap();
    let classes = as_conj(&h).unwrap().class_data().classes().to_vec();
    for (i, c) in classes.iter().enumerate() {
        for (j, d) in classes.iter().enumerate() {
            let expect = class_product(&g, c, d, &classes);
            let got = h.convolve(&ix(i as u64), &ix(j as u64)).unwrap();
            for (k, e) in expect.into_iter().enumerate() {
                let c = got.coefficient(&ix(k as u64)).cloned().unwrap_or_else(Scalar::zero);
                assert_eq!(c, Scalar::from(e), "({i},{j}) at {k}");
            }
        }
    }
}

#[test]
fn restricted_product_identity_and_single_slot() {
    let h = build_hypergroup("rdp:conj:s3").unwrap();
    let els = h.elements(20);
    assert_eq!(els[0], h.identity());
    let comp = build_hypergroup("conj:s3").unwrap();
    let t = comp.parse_element("T").unwrap();
    let rp = h.rule_as::<hyplab::hypergroups::RestrictedProduct>().unwrap();
    let x = rp.single(3, t.clone()).unwrap();
    let got = h.convolve(&x, &x).unwrap();
    let base = comp.convolve(&t, &t).unwrap();
    assert_eq!(got.len(), base.len());
    for (y, c) in base.terms() {
        let lifted = if *y == comp.identity() {
            h.identity()
        } else {
            rp.single(3, y.clone()).unwrap()
        };
        assert_eq!(got.coefficient(&lifted), Some(c));
    }
}

#[test]
fn chebyshev_haar_and_involution() {
    let h = build_hypergroup("chebyshev").unwrap();
    assert_eq!(h.haar(&ix(0)).unwrap(), Scalar::one());
    for n in 1..20 {
        assert_eq!(h.haar(&ix(n)).unwrap(), Scalar::int(2));
        assert_eq!(h.involution(&ix(n)).unwrap(), ix(n));
    }
}

#[test]
fn unknown_spec_is_rejected() {
    assert!(build_hypergroup("nonsense").is_err());
    assert!(build_hypergroup("sunhat:n=3").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chebyshev_associative_and_probability(a in 0u64..40, b in 0u64..40, c in 0u64..40) {
        let h = build_hypergroup("chebyshev").unwrap();
        triple_products_agree(&h, &ix(a), &ix(b), &ix(c));
        prop_assert_eq!(h.convolve(&ix(a), &ix(b)).unwrap().total_mass(), Scalar::one());
        let (ab, ba) = (h.convolve(&ix(a), &ix(b)).unwrap(), h.convolve(&ix(b), &ix(a)).unwrap());
        prop_assert_eq!(ab.terms(), ba.terms());
    }

    #[test]
    fn su2_associative_and_probability(a in 0u64..30, b in 0u64..30, c in 0u64..30) {
        let h = build_hypergroup("su2hat").unwrap();
        triple_products_agree(&h, &ix(a), &ix(b), &ix(c));
        let m = h.convolve(&ix(a), &ix(b)).unwrap();
        prop_assert_eq!(m.total_mass(), Scalar::one());
        prop_assert_eq!(m.len() as u64, a.min(b) + 1);
    }

    #[test]
    fn su2_matches_characters(a in 0u64..60, b in 0u64..60) {
        let h = build_hypergroup("su2hat").unwrap();
        let coeffs: Vec<(u64, f64)> = h.convolve_float(&ix(a), &ix(b)).unwrap().iter().map(|(t, c)| (t.index().unwrap(), *c)).collect();
        prop_assert!(su2_product_numeric(a, b, &coeffs) < 1e-12);
    }

    #[test]
    fn product_associative(i in 0usize..40, j in 0usize..40, k in 0usize..40) {
        let h = build_hypergroup("rdp:conj:s3").unwrap();
        let els = h.elements(40);
        triple_products_agree(&h, &els[i], &els[j], &els[k]);
        prop_assert_eq!(h.convolve(&els[i], &els[j]).unwrap().total_mass(), Scalar::one());
    }
}
