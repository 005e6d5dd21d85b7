use rayon::prelude::*;
use serde::Serialize;

use super::Hypergroup;
use crate::measures::{ElementId, Scalar, SparseMeasure};

const WITNESS_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    /// Positive, finite support, total mass 1.
    H1,
    /// Two-sided identity.
    H2,
    /// Involutive antihomomorphism.
    H3,
    /// e ∈ supp(δ_x * δ_y) iff y = x̌.
    H4,
    Associativity,
    HaarInvariance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomWitness {
    pub elements: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub cases: u64,
    pub witnesses: Vec<AxiomWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub carrier: String,
    pub truncation: usize,
    pub elements_checked: usize,
    pub associativity_elements: usize,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

#[derive(Default)]
struct Tally {
    cases: [u64; 5],
    witnesses: [Vec<AxiomWitness>; 5],
}

impl Tally {
    fn case(&mut self, a: Axiom) {
        self.cases[a as usize] += 1;
    }

    fn fail(&mut self, a: Axiom, elements: Vec<String>, detail: String) {
        let w = &mut self.witnesses[a as usize];
        if w.len() < WITNESS_LIMIT {
            w.push(AxiomWitness { elements, detail });
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..5 {
            self.cases[i] += other.cases[i];
            let room = WITNESS_LIMIT.saturating_sub(self.witnesses[i].len());
            let extra: Vec<_> = other.witnesses[i].iter().take(room).cloned().collect();
            self.witnesses[i].extend(extra);
        }
        self
    }

    fn failed(&self, a: Axiom) -> bool {
        !self.witnesses[a as usize].is_empty()
    }
}

/// Exact verification of (H1)–(H4) over the first `truncation` elements and of
/// associativity over the first `min(truncation, cap)` elements.
pub fn check_axioms(h: &Hypergroup, truncation: usize) -> AxiomReport {
    let elems = h.elements(truncation.max(1));
    let e = h.identity();
    let label = |x: &ElementId| h.label(x);

    let rows: Vec<Tally> = elems
        .par_iter()
        .map(|x| {
            let mut t = Tally::default();
            check_row(h, x, &elems, &e, &mut t);
            t
        })
        .collect();
    let mut tally = rows.into_iter().fold(Tally::default(), Tally::merge);

    // Identity law, including e itself even when it is not enumerated first.
    for x in &elems {
        tally.case(Axiom::H2);
        let px = SparseMeasure::point(h.carrier(), x.clone());
        for (a, b) in [(&e, x), (x, &e)] {
            match h.convolve(a, b) {
                Ok(m) if m == px => {}
                Ok(m) => tally.fail(
                    Axiom::H2,
                    vec![label(a), label(b)],
                    format!("expected point mass at {}, got {}", label(x), m.to_json()),
                ),
                Err(err) => tally.fail(Axiom::H2, vec![label(a), label(b)], err.to_string()),
            }
        }
    }
    if h.involution(&e).ok().as_ref() != Some(&e) {
        tally.fail(Axiom::H3, vec![label(&e)], "identity is not self-inverse".into());
    }

    let cap = h.associativity_cap().min(elems.len());
    let assoc = &elems[..cap];
    let triples: Vec<Tally> = assoc
        .par_iter()
        .map(|x| {
            let mut t = Tally::default();
            for y in assoc {
                for z in assoc {
                    t.case(Axiom::Associativity);
                    match associator(h, x, y, z) {
                        Ok(None) => {}
                        Ok(Some(detail)) => t.fail(Axiom::Associativity, vec![label(x), label(y), label(z)], detail),
                        Err(err) => t.fail(
                            Axiom::Associativity,
                            vec![label(x), label(y), label(z)],
                            err.to_string(),
                        ),
                    }
                }
            }
            t
        })
        .collect();
    let tally = triples.into_iter().fold(tally, Tally::merge);

    let checks = [Axiom::H1, Axiom::H2, Axiom::H3, Axiom::H4, Axiom::Associativity]
        .into_iter()
        .map(|a| AxiomCheck {
            axiom: a,
            passed: !tally.failed(a),
            cases: tally.cases[a as usize],
            witnesses: tally.witnesses[a as usize].clone(),
        })
        .collect();
    AxiomReport {
        carrier: h.carrier().to_string(),
        truncation,
        elements_checked: elems.len(),
        associativity_elements: cap,
        checks,
    }
}

fn check_row(h: &Hypergroup, x: &ElementId, elems: &[ElementId], e: &ElementId, t: &mut Tally) {
    let rule = h.rule();
    let label = |x: &ElementId| h.label(x);
    let xi = rule.involution(x);
    t.case(Axiom::H3);
    if !rule.contains(&xi) || rule.involution(&xi) != *x {
        t.fail(Axiom::H3, vec![label(x)], "involution is not an involution".into());
        return;
    }
    for y in elems {
        let pair = || vec![label(x), label(y)];
        t.case(Axiom::H1);
        let raw = rule.convolve_terms(x, y);
        if let Some((bad, c)) = raw.iter().find(|(_, c)| c.is_negative()) {
            t.fail(Axiom::H1, pair(), format!("negative coefficient {c} at {}", label(bad)));
            continue;
        }
        if let Some((bad, _)) = raw.iter().find(|(s, _)| !rule.contains(s)) {
            t.fail(Axiom::H1, pair(), format!("support point {bad} outside the carrier"));
            continue;
        }
        let m = match SparseMeasure::new(h.carrier(), raw) {
            Ok(m) => m,
            Err(err) => {
                t.fail(Axiom::H1, pair(), err.to_string());
                continue;
            }
        };
        let mass = m.total_mass();
        if !mass.approx_eq(&Scalar::one(), crate::measures::DEFAULT_TOLERANCE) {
            t.fail(Axiom::H1, pair(), format!("total mass {mass} ≠ 1"));
        }
        if m.is_empty() {
            t.fail(Axiom::H1, pair(), "empty support".into());
            continue;
        }

        t.case(Axiom::H3);
        let yi = rule.involution(y);
        let lhs = m.pushforward(|s| Some(rule.involution(s)));
        let rhs = SparseMeasure::new(h.carrier(), rule.convolve_terms(&yi, &xi));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => t.fail(
                Axiom::H3,
                pair(),
                format!("involuted product {} ≠ reversed product {}", a.to_json(), b.to_json()),
            ),
            (Err(err), _) | (_, Err(err)) => t.fail(Axiom::H3, pair(), err.to_string()),
        }

        t.case(Axiom::H4);
        let has_e = m.coefficient(e).is_some();
        if has_e != (*y == xi) {
            let detail = if has_e {
                format!("identity in support but {} is not the involution", label(y))
            } else {
                "identity missing from the support of x * x̌".to_string()
            };
            t.fail(Axiom::H4, pair(), detail);
        }
    }
}

fn associator(h: &Hypergroup, x: &ElementId, y: &ElementId, z: &ElementId) -> crate::error::Result<Option<String>> {
    let left = h.convolve_measures(&h.convolve(x, y)?, &h.point(z)?)?;
    let right = h.convolve_measures(&h.point(x)?, &h.convolve(y, z)?)?;
    if left == right {
        return Ok(None);
    }
    if !left.is_exact() || !right.is_exact() {
        let close = left.len() == right.len()
            && left
                .terms()
                .iter()
                .zip(right.terms())
                .all(|((a, p), (b, q))| a == b && p.approx_eq(q, crate::measures::DEFAULT_TOLERANCE));
        if close {
            return Ok(None);
        }
    }
    Ok(Some(format!(
        "(xy)z = {} but x(yz) = {}",
        left.to_json(),
        right.to_json()
    )))
}

/// Left invariance of the Haar weights: Σ_y (δ_x̌ * δ_y)(t)·h(y) = h(t).
///
/// For infinite carriers the sum runs over supp(δ_x * δ_t), which contains
/// every y contributing a nonzero term.
pub fn check_haar_invariance(h: &Hypergroup, truncation: usize) -> AxiomCheck {
    let elems = h.elements(truncation.max(1));
    let universe: Option<Vec<ElementId>> = h.size().map(|s| h.elements(s));
    let rows: Vec<Tally> = elems
        .par_iter()
        .map(|x| {
            let mut t = Tally::default();
            let xi = match h.involution(x) {
                Ok(v) => v,
                Err(err) => {
                    t.fail(Axiom::H2, vec![h.label(x)], err.to_string());
                    return t;
                }
            };
            for target in &elems {
                t.case(Axiom::H2);
                let ys = match &universe {
                    Some(all) => all.clone(),
                    None => h.support(x, target).unwrap_or_default(),
                };
                let outcome = (|| -> crate::error::Result<Option<String>> {
                    let mut acc = Scalar::zero();
                    for y in &ys {
                        if let Some(c) = h.convolve(&xi, y)?.coefficient(target) {
                            acc = &acc + &(c * &h.haar(y)?);
                        }
                    }
                    let ht = h.haar(target)?;
                    Ok((!acc.approx_eq(&ht, crate::measures::DEFAULT_TOLERANCE))
                        .then(|| format!("translate sums to {acc}, Haar weight is {ht}")))
                })();
                match outcome {
                    Ok(None) => {}
                    Ok(Some(d)) => t.fail(Axiom::H2, vec![h.label(x), h.label(target)], d),
                    Err(err) => t.fail(Axiom::H2, vec![h.label(x), h.label(target)], err.to_string()),
                }
            }
            t
        })
        .collect();
    let tally = rows.into_iter().fold(Tally::default(), Tally::merge);
    AxiomCheck {
        axiom: Axiom::HaarInvariance,
        passed: !tally.failed(Axiom::H2),
        cases: tally.cases[Axiom::H2 as usize],
        witnesses: tally.witnesses[Axiom::H2 as usize].clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_entries_pass_small() {
        for h in [catalog::chebyshev(), catalog::su2_dual()] {
            let r = check_axioms(&h, 30);
            assert!(r.passed(), "{:?}", r);
            assert!(check_haar_invariance(&h, 15).passed);
        }
    }

    #[test]
    fn negative_rule_fails_h1() {
        let h = catalog::polynomial_hypergroup("bad", |n, m| {
            if n == 1 && m == 1 {
                vec![(0, Scalar::ratio(3, 2)), (2, Scalar::ratio(-1, 2))]
            } else {
                catalog::chebyshev_rule(n, m)
            }
        });
        let r = check_axioms(&h, 5);
        let h1 = r.check(Axiom::H1).unwrap();
        assert!(!h1.passed);
        assert_eq!(h1.witnesses[0].elements, vec!["1".to_string(), "1".to_string()]);
    }
}
