use std::any::Any;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::hypergroups::{GrowthLaw, Hypergroup, HypergroupRule, PowerBound};
use crate::measures::{ElementId, Scalar};

type Linearization = dyn Fn(u64, u64) -> Vec<(u64, Scalar)> + Send + Sync;

#[derive(Clone)]
enum Kind {
    Chebyshev,
    Su2,
    Custom(Arc<Linearization>),
}

/// A hypergroup on ℕ₀ given by a linearization rule δ_n * δ_m = Σ_k c_k δ_k.
pub struct PolynomialHypergroup {
    tag: String,
    kind: Kind,
}

/// δ_n * δ_m = ½δ_{|n−m|} + ½δ_{n+m} for n, m ≥ 1.
pub fn chebyshev_rule(n: u64, m: u64) -> Vec<(u64, Scalar)> {
    if n == 0 || m == 0 {
        return vec![(n + m, Scalar::one())];
    }
    vec![(n.abs_diff(m), Scalar::ratio(1, 2)), (n + m, Scalar::ratio(1, 2))]
}

/// Clebsch-Gordan weights (r+1)/((ℓ+1)(ℓ'+1)) over r = |ℓ−ℓ'|, |ℓ−ℓ'|+2, …, ℓ+ℓ'.
pub fn su2_rule(l: u64, lp: u64) -> Vec<(u64, Scalar)> {
    let den = ((l + 1) * (lp + 1)) as i64;
    (l.abs_diff(lp)..=l + lp)
        .step_by(2)
        .map(|r| (r, Scalar::ratio(r as i64 + 1, den)))
        .collect()
}

fn index(x: &ElementId) -> u64 {
    x.index().expect("index id")
}

impl PolynomialHypergroup {
    fn raw(&self, n: u64, m: u64) -> Vec<(u64, Scalar)> {
        match &self.kind {
            Kind::Chebyshev => chebyshev_rule(n, m),
            Kind::Su2 => su2_rule(n, m),
            Kind::Custom(f) => f(n, m),
        }
    }

    fn standard_generator(&self, generator: &[ElementId]) -> bool {
        generator == [ElementId::Index(0), ElementId::Index(1)]
    }
}

impl HypergroupRule for PolynomialHypergroup {
    fn carrier(&self) -> &str {
        &self.tag
    }

    fn identity(&self) -> ElementId {
        ElementId::Index(0)
    }

    fn contains(&self, x: &ElementId) -> bool {
        matches!(x, ElementId::Index(_))
    }

    fn involution(&self, x: &ElementId) -> ElementId {
        x.clone()
    }

    fn convolve_terms(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, Scalar)> {
        self.raw(index(x), index(y))
            .into_iter()
            .map(|(k, c)| (ElementId::Index(k), c))
            .collect()
    }

    fn convolve_float(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, f64)> {
        let (n, m) = (index(x), index(y));
        match self.kind {
            Kind::Chebyshev if n > 0 && m > 0 => {
                vec![(ElementId::Index(n.abs_diff(m)), 0.5), (ElementId::Index(n + m), 0.5)]
            }
            Kind::Su2 => {
                let den = ((n + 1) * (m + 1)) as f64;
                (n.abs_diff(m)..=n + m)
                    .step_by(2)
                    .map(|r| (ElementId::Index(r), (r + 1) as f64 / den))
                    .collect()
            }
            _ => self
                .convolve_terms(x, y)
                .into_iter()
                .map(|(t, c)| (t, c.to_f64()))
                .collect(),
        }
    }

    fn support(&self, x: &ElementId, y: &ElementId) -> Vec<ElementId> {
        let (n, m) = (index(x), index(y));
        match self.kind {
            Kind::Chebyshev if n > 0 && m > 0 => {
                vec![ElementId::Index(n.abs_diff(m)), ElementId::Index(n + m)]
            }
            Kind::Su2 => (n.abs_diff(m)..=n + m).step_by(2).map(ElementId::Index).collect(),
            _ => self
                .convolve_terms(x, y)
                .into_iter()
                .filter(|(_, c)| !c.is_negligible())
                .map(|(t, _)| t)
                .collect(),
        }
    }

    fn size(&self) -> Option<usize> {
        None
    }

    fn enumerate(&self, n: usize) -> Vec<ElementId> {
        (0..n as u64).map(ElementId::Index).collect()
    }

    fn rank_of(&self, x: &ElementId) -> Option<usize> {
        x.index().map(|i| i as usize)
    }

    fn is_commutative(&self) -> bool {
        true
    }

    fn label(&self, x: &ElementId) -> String {
        x.to_string()
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let s = s.strip_prefix("pi_").or_else(|| s.strip_prefix('π')).unwrap_or(s);
        s.parse::<u64>().ok().map(ElementId::Index)
    }

    fn growth_law(&self, generator: &[ElementId]) -> Option<GrowthLaw> {
        match self.kind {
            Kind::Chebyshev | Kind::Su2 if self.standard_generator(generator) => Some(GrowthLaw {
                ball: PowerBound {
                    constant: 2.0,
                    exponent: 1,
                },
                level: PowerBound {
                    constant: 1.0,
                    exponent: 0,
                },
                level_exact: true,
                formula: "|F^{*n}| = n + 1 and exactly one point has word length n".into(),
            }),
            _ => None,
        }
    }

    fn describe(&self) -> Value {
        let family = match self.kind {
            Kind::Chebyshev => "chebyshev",
            Kind::Su2 => "su2hat",
            Kind::Custom(_) => "polynomial",
        };
        json!({"family": family, "carrier": self.tag})
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn standard(h: Hypergroup) -> Hypergroup {
    h.with_generator(vec![ElementId::Index(0), ElementId::Index(1)])
        .expect("{0, 1} is symmetric")
}

/// The Chebyshev hypergroup on ℕ₀ with generator {0, 1}.
pub fn chebyshev() -> Hypergroup {
    standard(Hypergroup::new(PolynomialHypergroup {
        tag: "chebyshev".into(),
        kind: Kind::Chebyshev,
    }))
}

/// The dual of SU(2), π_ℓ ↦ ℓ, with generator {π_0, π_1}.
pub fn su2_dual() -> Hypergroup {
    standard(Hypergroup::new(PolynomialHypergroup {
        tag: "su2hat".into(),
        kind: Kind::Su2,
    }))
}

/// Wraps a user linearization rule; validity is left to the axiom checker.
pub fn polynomial_hypergroup<F>(tag: &str, rule: F) -> Hypergroup
where
    F: Fn(u64, u64) -> Vec<(u64, Scalar)> + Send + Sync + 'static,
{
    standard(Hypergroup::new(PolynomialHypergroup {
        tag: tag.to_string(),
        kind: Kind::Custom(Arc::new(rule)),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergroups::check_axioms;

    fn measure(h: &Hypergroup, n: u64, m: u64) -> Vec<(u64, Scalar)> {
        h.convolve(&ElementId::Index(n), &ElementId::Index(m))
            .unwrap()
            .terms()
            .iter()
            .map(|(t, c)| (t.index().unwrap(), c.clone()))
            .collect()
    }

    #[test]
    fn chebyshev_examples() {
        let h = chebyshev();
        assert_eq!(
            measure(&h, 2, 2),
            vec![(0, Scalar::ratio(1, 2)), (4, Scalar::ratio(1, 2))]
        );
        assert_eq!(measure(&h, 0, 7), vec![(7, Scalar::one())]);
        assert_eq!(
            measure(&h, 5, 3),
            vec![(2, Scalar::ratio(1, 2)), (8, Scalar::ratio(1, 2))]
        );
    }

    #[test]
    fn su2_examples() {
        let h = su2_dual();
        assert_eq!(
            measure(&h, 1, 2),
            vec![(1, Scalar::ratio(2, 6)), (3, Scalar::ratio(4, 6))]
        );
        assert_eq!(measure(&h, 0, 9), vec![(9, Scalar::one())]);
        for l in 0..=30 {
            assert_eq!(
                h.haar(&ElementId::Index(l)).unwrap(),
                Scalar::int(((l + 1) * (l + 1)) as i64)
            );
        }
    }

    #[test]
    fn float_paths_agree() {
        for h in [chebyshev(), su2_dual()] {
            for n in 0..12 {
                for m in 0..12 {
                    let (x, y) = (ElementId::Index(n), ElementId::Index(m));
                    let exact = h.convolve(&x, &y).unwrap();
                    let float = h.convolve_float(&x, &y).unwrap();
                    assert_eq!(exact.len(), float.len());
                    for ((a, p), (b, q)) in exact.terms().iter().zip(&float) {
                        assert_eq!(a, b);
                        assert!((p.to_f64() - q).abs() < 1e-15);
                    }
                    assert_eq!(h.support(&x, &y).unwrap(), exact.support().cloned().collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn custom_rule_equals_builtin() {
        let h = polynomial_hypergroup("cheb2", chebyshev_rule);
        let c = chebyshev();
        for n in 0..10 {
            for m in 0..10 {
                assert_eq!(measure(&h, n, m), measure(&c, n, m));
            }
        }
        let su = polynomial_hypergroup("su2-rule", su2_rule);
        assert!(check_axioms(&su, 40).passed());
    }
}
