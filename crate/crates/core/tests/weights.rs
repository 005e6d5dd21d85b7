mod common;

use common::*;
use hyplab::measures::{ElementId, Scalar};
use hyplab::registry::{build_hypergroup, build_weight};
use hyplab::weights::{check_central, check_submultiplicative, weak_additivity_constant};
use proptest::prelude::*;

fn ix(i: u64) -> ElementId {
    ElementId::Index(i)
}

#[test]
fn polynomial_weight_values() {
    let h = build_hypergroup("chebyshev").unwrap();
    let w = build_weight(&h, "poly:beta=2").unwrap();
    for n in 0..30i64 {
        assert_eq!(w.eval(&ix(n as u64)).unwrap(), Scalar::int((1 + n) * (1 + n)));
    }
}

#[test]
fn polynomial_weights_are_submultiplicative_and_central() {
    for spec in ["poly:beta=1", "poly:beta=2", "poly:beta=1/2"] {
        for hg in ["chebyshev", "su2hat"] {
            let h = build_hypergroup(hg).unwrap();
            let w = build_weight(&h, spec).unwrap();
            assert!(check_submultiplicative(&h, &w, 40).unwrap().passed, "{hg} {spec}");
            assert!(check_central(&h, &w, 40).unwrap().passed, "{hg} {spec}");
        }
    }
}

#[test]
fn cardinality_weight_on_s4() {
    let h = build_hypergroup("conj:s4").unwrap();
    let w = build_weight(&h, "card").unwrap();
    let sizes = tally(
        &classes_by_orbits(&hyplab::catalog::named_group("s4").unwrap())
            .iter()
            .map(Vec::len)
            .collect::<Vec<_>>(),
    );
    let mut got: Vec<usize> = h
        .elements(5)
        .iter()
        .map(|x| w.eval(x).unwrap().to_f64() as usize)
        .collect();
    got.sort_unstable();
    let mut expect: Vec<usize> = sizes.iter().flat_map(|(s, n)| std::iter::repeat_n(*s, *n)).collect();
    expect.sort_unstable();
    assert_eq!(got, expect);
    assert!(check_submultiplicative(&h, &w, 5).unwrap().passed);
}

#[test]
fn trivial_weight_weak_additivity_constant_is_one_half() {
    // ω ≡ 1: ω(t) ≤ C(ω(x)+ω(y)) holds with C = 1/2 and no smaller constant.
    let h = build_hypergroup("conj:s3").unwrap();
    let w = build_weight(&h, "trivial").unwrap();
    let r = weak_additivity_constant(&h, &w, 3).unwrap();
    assert_eq!(r.best_constant, Some(Scalar::ratio(1, 2)));
}

#[test]
fn halved_weight_fails_at_the_identity() {
    let h = build_hypergroup("chebyshev").unwrap();
    let w = build_weight(&h, "scaled:factor=1/2:poly:beta=1").unwrap();
    let r = check_submultiplicative(&h, &w, 10).unwrap();
    assert!(!r.passed);
    let first = &r.witnesses[0];
    assert_eq!(first.elements, vec!["0", "0"]);
    assert_eq!(
        (first.lhs.clone(), first.rhs.clone()),
        (Scalar::ratio(1, 2), Scalar::ratio(1, 4))
    );
}

#[test]
fn product_weight_needs_product_carrier() {
    let h = build_hypergroup("chebyshev").unwrap();
    assert!(build_weight(&h, "product:table:e=1,T=2,R=5").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rearrangement_identity_random(m in 0i64..40, n in 0i64..40, beta in 1u32..4) {
        let (a, b) = rearrangement_sides(beta, m.min(n), m.max(n));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exponential_weight_submultiplicative(a in 1u32..4, c in 1u32..4) {
        let h = build_hypergroup("chebyshev").unwrap();
        let alpha = format!("1/{}", a + 1);
        let w = build_weight(&h, &format!("exp:alpha={alpha},c={c}")).unwrap();
        prop_assert!(check_submultiplicative(&h, &w, 30).unwrap().passed);
    }
}
