use rayon::prelude::*;
use serde::Serialize;

use super::{Weight, WeightKind};
use crate::catalog::as_conj;
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, RestrictedProduct};
use crate::measures::{ElementId, Scalar, DEFAULT_TOLERANCE};

/// Strictly increasing samples at the end of a ratio sequence that raise the divergence flag.
pub const DIVERGENCE_RUN: usize = 10;

/// Witnesses kept per report; the total count is always recorded.
const MAX_WITNESSES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightProperty {
    Submultiplicative,
    Central,
    WeaklyAdditive,
    BoundedBelow,
    Equivalent,
}

/// A tuple of elements with the two sides of the inequality that was tested.
#[derive(Clone, Debug, Serialize)]
pub struct WeightWitness {
    pub elements: Vec<String>,
    #[serde(skip)]
    pub ids: Vec<ElementId>,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

/// A constant known in closed form for the weight family, with how it was checked.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub route: String,
    pub constant: Scalar,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightCheckReport {
    pub property: WeightProperty,
    pub passed: bool,
    pub truncation: usize,
    /// Ordered pairs covered; on commutative hypergroups (x, y) and (y, x) are one evaluation.
    pub cases: usize,
    pub violations: usize,
    pub witnesses: Vec<WeightWitness>,
    /// Attained constant: sup ratio for weak additivity, min value for boundedness below.
    pub best_constant: Option<Scalar>,
    /// min and max of ω₂/ω₁ for equivalence.
    pub lower: Option<Scalar>,
    pub upper: Option<Scalar>,
    pub divergence: bool,
    pub certificate: Option<Certificate>,
    pub exact: bool,
    pub notes: Vec<String>,
}

impl WeightCheckReport {
    fn new(property: WeightProperty, truncation: usize, exact: bool) -> Self {
        WeightCheckReport {
            property,
            passed: true,
            truncation,
            cases: 0,
            violations: 0,
            witnesses: vec![],
            best_constant: None,
            lower: None,
            upper: None,
            divergence: false,
            certificate: None,
            exact,
            notes: vec![],
        }
    }

    fn absorb(&mut self, found: Vec<WeightWitness>) {
        self.violations += found.len();
        let room = MAX_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses.extend(found.into_iter().take(room));
        self.passed = self.violations == 0;
    }
}

struct Term {
    elem: ElementId,
    coeff: Scalar,
    weight: Scalar,
}

/// Support of δ_x * δ_y with weight values, exact when the weight is.
fn weighted_terms(h: &Hypergroup, w: &Weight, x: &ElementId, y: &ElementId) -> Result<Vec<Term>> {
    if w.is_exact() {
        h.convolve(x, y)?
            .terms()
            .iter()
            .map(|(t, c)| {
                Ok(Term {
                    elem: t.clone(),
                    coeff: c.clone(),
                    weight: w.eval(t)?,
                })
            })
            .collect()
    } else {
        h.convolve_float(x, y)?
            .into_iter()
            .map(|(t, c)| {
                let weight = Scalar::float(w.eval_f64(&t)?);
                Ok(Term {
                    elem: t,
                    coeff: Scalar::float(c),
                    weight,
                })
            })
            .collect()
    }
}

fn value(w: &Weight, x: &ElementId) -> Result<Scalar> {
    if w.is_exact() {
        w.eval(x)
    } else {
        Ok(Scalar::float(w.eval_f64(x)?))
    }
}

fn mass(terms: &[Term]) -> Scalar {
    terms
        .iter()
        .fold(Scalar::zero(), |acc, t| &acc + &(&t.coeff * &t.weight))
}

/// Runs `f` on every pair (x, y) of the first `n` elements, y ≥ x when H is commutative.
/// Results come back in enumeration order.
fn for_pairs<T, F>(h: &Hypergroup, n: usize, f: F) -> Result<(Vec<ElementId>, Vec<T>, usize)>
where
    T: Send,
    F: Fn(&ElementId, &ElementId) -> Result<Option<T>> + Sync,
{
    let xs = h.elements(n);
    let comm = h.is_commutative();
    let rows: Vec<Result<(Vec<T>, usize)>> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let start = if comm { i } else { 0 };
            let mut out = Vec::new();
            for j in start..xs.len() {
                if let Some(t) = f(&xs[i], &xs[j])? {
                    out.push(t);
                }
            }
            let covered = if comm { 2 * (xs.len() - i) - 1 } else { xs.len() };
            Ok((out, covered))
        })
        .collect();
    let mut all = Vec::new();
    let mut cases = 0;
    for r in rows {
        let (v, c) = r?;
        cases += c;
        all.extend(v);
    }
    Ok((xs, all, cases))
}

fn witness(h: &Hypergroup, ids: Vec<ElementId>, lhs: Scalar, rhs: Scalar) -> WeightWitness {
    WeightWitness {
        elements: ids.iter().map(|x| h.label(x)).collect(),
        ids,
        lhs,
        rhs,
    }
}

fn prepare(h: &Hypergroup, w: &Weight, property: WeightProperty, n: usize) -> Result<WeightCheckReport> {
    if n == 0 {
        return Err(HyplabError::InvalidParam("truncation must be at least 1".into()));
    }
    w.check_carrier(h)?;
    Ok(WeightCheckReport::new(property, n, w.is_exact()))
}

/// ω(δ_x * δ_y) ≤ ω(x)ω(y) on all pairs of the first `n` elements.
pub fn check_submultiplicative(h: &Hypergroup, w: &Weight, n: usize) -> Result<WeightCheckReport> {
    check_submultiplicative_tol(h, w, n, DEFAULT_TOLERANCE)
}

pub fn check_submultiplicative_tol(h: &Hypergroup, w: &Weight, n: usize, tol: f64) -> Result<WeightCheckReport> {
    let mut report = prepare(h, w, WeightProperty::Submultiplicative, n)?;
    let (_, found, cases) = for_pairs(h, n, |x, y| {
        let lhs = mass(&weighted_terms(h, w, x, y)?);
        let rhs = &value(w, x)? * &value(w, y)?;
        Ok(lhs
            .exceeds(&rhs, tol)
            .then(|| witness(h, vec![x.clone(), y.clone()], lhs, rhs)))
    })?;
    report.cases = cases;
    report.absorb(found);
    Ok(report)
}

/// ω(t) ≤ ω(x)ω(y) for every t in supp(δ_x * δ_y); witnesses are (t, x, y).
pub fn check_central(h: &Hypergroup, w: &Weight, n: usize) -> Result<WeightCheckReport> {
    check_central_tol(h, w, n, DEFAULT_TOLERANCE)
}

pub fn check_central_tol(h: &Hypergroup, w: &Weight, n: usize, tol: f64) -> Result<WeightCheckReport> {
    let mut report = prepare(h, w, WeightProperty::Central, n)?;
    let (_, found, cases) = for_pairs(h, n, |x, y| {
        let rhs = &value(w, x)? * &value(w, y)?;
        let bad: Vec<WeightWitness> = weighted_terms(h, w, x, y)?
            .into_iter()
            .filter(|t| t.weight.exceeds(&rhs, tol))
            .map(|t| witness(h, vec![t.elem, x.clone(), y.clone()], t.weight, rhs.clone()))
            .collect();
        Ok(Some(bad))
    })?;
    report.cases = cases;
    report.absorb(found.into_iter().flatten().collect());
    Ok(report)
}

/// max{1, 2^(β−1)}, exact for integer β.
pub(crate) fn power_mean_constant(beta: &Scalar) -> Scalar {
    if !beta.exceeds(&Scalar::one(), 0.0) {
        return Scalar::one();
    }
    match super::nonnegative_integer(beta) {
        Some(k) => Scalar::int(2).powi(k - 1),
        None => Scalar::float(2f64.powf(beta.to_f64() - 1.0)),
    }
}

/// |D| ≤ 2(|C₁| + |C₂|) for every class D in supp(δ_{C₁} * δ_{C₂}).
fn class_size_bound(h: &Hypergroup) -> Result<bool> {
    let data = as_conj(h)?.class_data();
    let k = data.len();
    for a in 0..k {
        for b in 0..k {
            let bound = 2 * (data.size(a) + data.size(b));
            for t in h.support(&ElementId::Index(a as u64), &ElementId::Index(b as u64))? {
                if data.size(t.index().expect("class id") as usize) > bound {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Closed-form weak-additivity constant for the weight family, when one is known.
pub fn weak_additivity_certificate(h: &Hypergroup, w: &Weight) -> Result<Option<Certificate>> {
    let cert = |route: &str, constant: Scalar, detail: String| {
        Some(Certificate {
            route: route.into(),
            constant,
            detail,
        })
    };
    Ok(match w.kind() {
        WeightKind::Trivial => cert("trivial", Scalar::ratio(1, 2), "ω(δ_x*δ_y) = 1 = (ω(x)+ω(y))/2".into()),
        WeightKind::Polynomial { beta } => cert(
            "polynomial",
            power_mean_constant(beta),
            format!("τ(t) ≤ τ(x)+τ(y) and (a+b)^β ≤ max{{1,2^(β−1)}}(a^β+b^β), β = {beta}"),
        ),
        WeightKind::Dimension { beta } => cert(
            "dimension",
            power_mean_constant(beta),
            format!("d_π ≤ d_μ + d_ν on the support, β = {beta}"),
        ),
        WeightKind::ChebyshevF { p } => cert(
            "chebyshev-f",
            power_mean_constant(&Scalar::int(*p as i64)),
            format!("(n+m)^{p} ≤ max{{1,2^({p}−1)}}(n^{p}+m^{p})"),
        ),
        WeightKind::OmegaAlpha { alpha } => {
            let rp = h.rule_as::<RestrictedProduct>().expect("ω_α lives on a product");
            for c in rp.distinct_components() {
                if !class_size_bound(c)? {
                    return Ok(None);
                }
            }
            let two_alpha = match super::nonnegative_integer(alpha) {
                Some(k) => Scalar::int(2).powi(k),
                None => Scalar::float(2f64.powf(alpha.to_f64())),
            };
            let family_note = if rp.family().is_some() {
                "; later SL(2,2^n) slots satisfy it since their class sizes lie in {q²−1, q(q±1)}"
            } else {
                ""
            };
            cert(
                "omega-alpha",
                &two_alpha * &power_mean_constant(alpha),
                format!(
                    "|D| ≤ 2(|C₁|+|C₂|) verified on every materialized component{family_note}; M = 2^α·max{{1,2^(α−1)}}, α = {alpha}"
                ),
            )
        }
        _ => None,
    })
}

/// sup ω(δ_x*δ_y)/(ω(x)+ω(y)) over the truncation, compared with the family certificate.
pub fn weak_additivity_constant(h: &Hypergroup, w: &Weight, n: usize) -> Result<WeightCheckReport> {
    weak_additivity_constant_tol(h, w, n, DEFAULT_TOLERANCE)
}

pub fn weak_additivity_constant_tol(h: &Hypergroup, w: &Weight, n: usize, tol: f64) -> Result<WeightCheckReport> {
    let mut report = prepare(h, w, WeightProperty::WeaklyAdditive, n)?;
    let (_, ratios, cases) = for_pairs(h, n, |x, y| {
        let lhs = mass(&weighted_terms(h, w, x, y)?);
        let rhs = &value(w, x)? + &value(w, y)?;
        Ok(Some((x.clone(), y.clone(), &lhs / &rhs, lhs, rhs)))
    })?;
    report.cases = cases;
    let mut best: Option<(ElementId, ElementId, Scalar, Scalar, Scalar)> = None;
    for r in ratios {
        if best.as_ref().is_none_or(|b| r.2.exceeds(&b.2, 0.0)) {
            best = Some(r);
        }
    }
    let (bx, by, ratio, lhs, rhs) = best.expect("truncation is non-empty");
    report.best_constant = Some(ratio.clone());
    report.certificate = weak_additivity_certificate(h, w)?;
    let exhaustive = h.size().is_some_and(|s| s <= n);
    if report.certificate.is_none() && exhaustive {
        report.certificate = Some(Certificate {
            route: "exhaustive".into(),
            constant: ratio.clone(),
            detail: format!(
                "all {} elements of the finite carrier were covered",
                h.size().unwrap_or(0)
            ),
        });
    }
    match &report.certificate {
        Some(c) if ratio.exceeds(&c.constant, tol) => {
            report.absorb(vec![witness(h, vec![bx, by], lhs, &rhs * &c.constant)]);
        }
        Some(_) => {
            report.witnesses.push(witness(h, vec![bx, by], lhs, rhs));
        }
        None => report
            .notes
            .push("no closed-form constant for this weight family; value is attained on the truncation only".into()),
    }
    Ok(report)
}

/// ω(x) ≥ δ on the first `n` elements.
pub fn check_bounded_below(h: &Hypergroup, w: &Weight, delta: &Scalar, n: usize) -> Result<WeightCheckReport> {
    let mut report = prepare(h, w, WeightProperty::BoundedBelow, n)?;
    let xs = h.elements(n);
    let vals = xs.iter().map(|x| value(w, x)).collect::<Result<Vec<_>>>()?;
    report.cases = xs.len();
    report.best_constant = vals.iter().cloned().reduce(Scalar::min);
    let bad = xs
        .iter()
        .zip(&vals)
        .filter(|(_, v)| delta.exceeds(v, DEFAULT_TOLERANCE))
        .map(|(x, v)| witness(h, vec![x.clone()], v.clone(), delta.clone()))
        .collect();
    report.absorb(bad);
    Ok(report)
}

fn increasing_tail(values: &[Scalar]) -> bool {
    values.len() >= DIVERGENCE_RUN
        && values[values.len() - DIVERGENCE_RUN..]
            .windows(2)
            .all(|p| p[1].exceeds(&p[0], 0.0))
}

/// C₁ω₁ ≤ ω₂ ≤ C₂ω₁ on the truncation with C₁ = min ω₂/ω₁ and C₂ = max ω₂/ω₁.
pub fn check_equivalence(h: &Hypergroup, w1: &Weight, w2: &Weight, n: usize) -> Result<WeightCheckReport> {
    let mut report = prepare(h, w1, WeightProperty::Equivalent, n)?;
    w2.check_carrier(h)?;
    report.exact = w1.is_exact() && w2.is_exact();
    let xs = h.elements(n);
    let ratios = xs
        .par_iter()
        .map(|x| Ok(&value(w2, x)? / &value(w1, x)?))
        .collect::<Result<Vec<Scalar>>>()?;
    report.cases = xs.len();
    let argmin = (0..ratios.len()).fold(0, |b, i| if ratios[b].exceeds(&ratios[i], 0.0) { i } else { b });
    let argmax = (0..ratios.len()).fold(0, |b, i| if ratios[i].exceeds(&ratios[b], 0.0) { i } else { b });
    report.lower = Some(ratios[argmin].clone());
    report.upper = Some(ratios[argmax].clone());
    for i in [argmin, argmax] {
        report
            .witnesses
            .push(witness(h, vec![xs[i].clone()], value(w2, &xs[i])?, value(w1, &xs[i])?));
    }
    report.divergence = increasing_tail(&ratios);
    report.passed = !report.divergence;
    if report.divergence {
        report.notes.push(format!(
            "the last {DIVERGENCE_RUN} ratios increase strictly: heuristic divergence flag, not a proof"
        ));
    } else {
        report
            .notes
            .push("equivalent at truncation: ratios bounded above and below on the enumerated range".into());
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioEntry {
    pub n: usize,
    pub omega_d: Scalar,
    pub omega_e_squared: Scalar,
    pub ratio: Scalar,
    pub in_support: bool,
}

/// ω(D_N)/ω(E_N)² along D_N = (d,…,d,e,…) and E_N = (x,…,x,e,…) with N copies.
#[derive(Clone, Debug, Serialize)]
pub struct RatioSequence {
    pub d: String,
    pub e: String,
    pub entries: Vec<RatioEntry>,
    pub divergence: bool,
}

impl RatioSequence {
    /// D_N ∈ supp(δ_{E_N} * δ_{E_N}) and ω(D_N) > ω(E_N)² for every N: ω is not central.
    pub fn refutes_centrality(&self) -> bool {
        self.entries
            .iter()
            .all(|r| r.in_support && r.ratio.exceeds(&Scalar::one(), 0.0))
    }
}

pub fn centrality_ratios(
    h: &Hypergroup,
    w: &Weight,
    d: &ElementId,
    x: &ElementId,
    n_max: usize,
) -> Result<RatioSequence> {
    w.check_carrier(h)?;
    let rp = h
        .rule_as::<RestrictedProduct>()
        .ok_or_else(|| HyplabError::WrongCarrier(format!("{} is not a restricted product", h.carrier())))?;
    if rp.slot_count().is_some_and(|k| k < n_max) {
        return Err(HyplabError::InvalidParam(format!("need {n_max} slots")));
    }
    let repeat = |z: &ElementId, n: usize| -> Result<ElementId> {
        let mut m = std::collections::BTreeMap::new();
        for s in 0..n as u32 {
            if let Some(slots) = rp.single(s, z.clone())?.slots() {
                m.extend(slots.clone());
            }
        }
        Ok(ElementId::Product(m))
    };
    let entries = (1..=n_max)
        .map(|n| {
            let (dn, en) = (repeat(d, n)?, repeat(x, n)?);
            let omega_d = w.eval(&dn)?;
            let we = w.eval(&en)?;
            let omega_e_squared = &we * &we;
            Ok(RatioEntry {
                n,
                ratio: &omega_d / &omega_e_squared,
                omega_d,
                omega_e_squared,
                in_support: rp.coefficient(&en, &en, &dn)?.is_positive(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<Scalar> = entries.iter().map(|e| e.ratio.clone()).collect();
    let comp = rp.component(0).expect("slot 0");
    Ok(RatioSequence {
        d: comp.label(d),
        e: comp.label(x),
        divergence: increasing_tail(&ratios),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, conj_hypergroup, conj_power, named_group};
    use crate::weights::{
        cardinality_weight, omega_alpha_weight, polynomial_weight, product_weight, table_weight_by_label,
        trivial_weight, ProductComponents,
    };

    fn s3() -> Hypergroup {
        conj_hypergroup(&named_group("s3").unwrap()).unwrap()
    }

    fn w125(h: &Hypergroup) -> Weight {
        table_weight_by_label(
            h,
            &[("e", Scalar::int(1)), ("T", Scalar::int(2)), ("R", Scalar::int(5))],
        )
        .unwrap()
    }

    #[test]
    fn non_central_s3_weight() {
        let h = s3();
        let w = w125(&h);
        let sub = check_submultiplicative(&h, &w, 3).unwrap();
        assert!(sub.passed);
        let cen = check_central(&h, &w, 3).unwrap();
        assert!(!cen.passed);
        let wit = &cen.witnesses[0];
        assert_eq!(wit.elements, vec!["R", "T", "T"]);
        assert_eq!((wit.lhs.clone(), wit.rhs.clone()), (Scalar::int(5), Scalar::int(4)));
        let bad = table_weight_by_label(
            &h,
            &[("e", Scalar::int(1)), ("T", Scalar::int(1)), ("R", Scalar::int(5))],
        )
        .unwrap();
        let r = check_submultiplicative(&h, &bad, 3).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witnesses[0].elements, vec!["T", "T"]);
        assert_eq!(r.witnesses[0].lhs, Scalar::ratio(11, 3));
    }

    #[test]
    fn weak_additivity_certificates() {
        let h = catalog::chebyshev();
        let w = polynomial_weight(&h, Scalar::one()).unwrap();
        let r = weak_additivity_constant(&h, &w, 60).unwrap();
        assert!(r.passed);
        assert_eq!(r.certificate.unwrap().constant, Scalar::one());
        assert!(!r.best_constant.unwrap().exceeds(&Scalar::one(), 0.0));
        let t = weak_additivity_constant(&h, &trivial_weight(), 20).unwrap();
        assert_eq!(t.best_constant.unwrap(), Scalar::ratio(1, 2));
        let p = catalog::sl2_even_product(2).unwrap();
        let wa = omega_alpha_weight(&p, Scalar::one()).unwrap();
        let r = weak_additivity_constant(&p, &wa, 40).unwrap();
        assert_eq!(r.certificate.unwrap().constant, Scalar::int(2));
        assert!(r.passed);
        assert_eq!(power_mean_constant(&Scalar::int(3)), Scalar::int(4));
        assert_eq!(power_mean_constant(&Scalar::ratio(1, 2)), Scalar::one());
    }

    #[test]
    fn central_implies_submultiplicative() {
        let s4 = conj_hypergroup(&named_group("s4").unwrap()).unwrap();
        let w = cardinality_weight(&s4).unwrap();
        assert!(check_central(&s4, &w, 5).unwrap().passed);
        assert!(check_submultiplicative(&s4, &w, 5).unwrap().passed);
        let b = check_bounded_below(&s4, &w, &Scalar::one(), 5).unwrap();
        assert!(b.passed);
        assert_eq!(b.best_constant.unwrap(), Scalar::one());
    }

    #[test]
    fn equivalence_of_scaled_weight() {
        let h = catalog::chebyshev();
        let w = polynomial_weight(&h, Scalar::one()).unwrap();
        let r = check_equivalence(&h, &w, &w.scaled(Scalar::int(2)).unwrap(), 50).unwrap();
        assert_eq!((r.lower.unwrap(), r.upper.unwrap()), (Scalar::int(2), Scalar::int(2)));
        assert!(r.passed && !r.divergence);
        let r = check_equivalence(&h, &trivial_weight(), &w, 50).unwrap();
        assert!(r.divergence && !r.passed);
    }

    #[test]
    fn five_quarters_sequence() {
        let g = named_group("s3").unwrap();
        let c = conj_hypergroup(&g).unwrap();
        let h = conj_power(&g, None).unwrap();
        let w = product_weight(&h, ProductComponents::Repeated(w125(&c))).unwrap();
        let (d, x) = (c.parse_element("R").unwrap(), c.parse_element("T").unwrap());
        let seq = centrality_ratios(&h, &w, &d, &x, 12).unwrap();
        for e in &seq.entries {
            assert_eq!(e.omega_d, Scalar::int(5).powi(e.n as i32));
            assert_eq!(e.omega_e_squared, Scalar::int(4).powi(e.n as i32));
            assert_eq!(e.ratio, Scalar::ratio(5, 4).powi(e.n as i32));
        }
        assert!(seq.divergence && seq.refutes_centrality());
    }
}
