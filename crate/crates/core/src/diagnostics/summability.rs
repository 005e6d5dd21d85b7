use serde::Serialize;

use crate::catalog::as_conj;
use crate::error::Result;
use crate::hypergroups::{Hypergroup, RestrictedProduct, SlotFamily, Slots};
use crate::measures::{ElementId, Scalar};
use crate::weights::{Weight, WeightKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SummabilityStatus {
    Finite,
    Divergent,
    Unknown,
}

/// Integral-comparison bounds on Σ_{n>R} (number of points with τ = n)·ω_n^{-2}.
#[derive(Clone, Debug, Serialize)]
pub struct TailBound {
    pub formula: String,
    pub radius: usize,
    pub lower: f64,
    pub upper: f64,
    pub level_constant: f64,
    pub level_exponent: u32,
    pub exponent: f64,
    /// Level counts come from a closed-form law rather than a fit.
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoSummability {
    pub truncation: usize,
    pub terms: usize,
    pub partial: Scalar,
    pub tail: Option<TailBound>,
    /// partial + upper tail.
    pub total: Option<f64>,
    /// partial + lower tail.
    pub total_lower: Option<f64>,
    pub status: SummabilityStatus,
    pub evidence: Vec<String>,
    /// (m, lower bound on a partial sum) pairs that grow without bound.
    pub divergence_lower_bounds: Vec<(usize, f64)>,
}

impl TwoSummability {
    fn new(n: usize, terms: usize, partial: Scalar, status: SummabilityStatus) -> Self {
        TwoSummability {
            truncation: n,
            terms,
            partial,
            tail: None,
            total: None,
            total_lower: None,
            status,
            evidence: vec![],
            divergence_lower_bounds: vec![],
        }
    }

    /// Finite with a tail that does not depend on a fitted growth rate.
    pub fn is_certified_finite(&self) -> bool {
        self.status == SummabilityStatus::Finite && self.tail.as_ref().is_none_or(|t| t.certified)
    }
}

fn float_partial(w: &Weight, xs: &[ElementId]) -> Result<f64> {
    let mut s = 0.0;
    for x in xs {
        s += w.eval_f64(x)?.powi(-2);
    }
    Ok(s)
}

/// Σ_{n>R} D n^d (1+n)^{-2s} ≤ D (1+R)^{d−2s+1}/(2s−d−1); for d = 0 also ≥ D (R+2)^{1−2s}/(2s−1).
fn power_tail(radius: usize, d_const: f64, d: u32, s: f64, exact_levels: bool, certified: bool) -> Option<TailBound> {
    let gap = 2.0 * s - d as f64 - 1.0;
    if gap <= 0.0 {
        return None;
    }
    let r = radius as f64;
    let upper = d_const * (1.0 + r).powf(-gap) / gap;
    let lower = if exact_levels && d == 0 {
        d_const * (r + 2.0).powf(-gap) / gap
    } else {
        0.0
    };
    Some(TailBound {
        formula: format!("D(1+R)^(d−2β+1)/(2β−d−1) with D = {d_const}, d = {d}, β = {s}, R = {radius}"),
        radius,
        lower,
        upper,
        level_constant: d_const,
        level_exponent: d,
        exponent: s,
        certified,
    })
}

fn with_tail(mut out: TwoSummability, tail: TailBound) -> TwoSummability {
    let p = out.partial.to_f64();
    out.total = Some(p + tail.upper);
    out.total_lower = Some(p + tail.lower);
    out.tail = Some(tail);
    out
}

/// Σ_{x∈H} ω(x)^{-2}: partial sum, analytic tail where the family admits one, and a status.
pub fn two_summability(h: &Hypergroup, w: &Weight, n: usize) -> Result<TwoSummability> {
    w.check_carrier(h)?;
    let rp = h.rule_as::<RestrictedProduct>();
    if let (Some(rp), WeightKind::OmegaAlpha { alpha }) = (rp, w.kind()) {
        if rp.family() == Some(SlotFamily::Sl2Even) {
            return sl2_divergence(h, w, rp, alpha.to_f64());
        }
    }
    if let Some(size) = h.size().filter(|&s| s <= n) {
        let xs = h.elements(size);
        let partial = if w.is_exact() {
            let mut s = Scalar::zero();
            for x in &xs {
                s = &s + &w.eval(x)?.powi(-2);
            }
            s
        } else {
            Scalar::float(float_partial(w, &xs)?)
        };
        let mut out = TwoSummability::new(n, size, partial, SummabilityStatus::Finite);
        out.total = Some(out.partial.to_f64());
        out.total_lower = out.total;
        out.evidence
            .push(format!("finite carrier with {size} points, summed exactly"));
        return Ok(out);
    }
    match w.kind() {
        WeightKind::Trivial => {
            let mut out = TwoSummability::new(n, n, Scalar::int(n as i64), SummabilityStatus::Divergent);
            out.evidence
                .push("ω ≡ 1 on an infinite carrier: every term equals 1".into());
            Ok(out)
        }
        WeightKind::Dimension { beta } if h.carrier() == "su2hat" => {
            let s = beta.to_f64();
            let xs = h.elements(n);
            let partial = float_partial(w, &xs)?;
            let out = TwoSummability::new(n, xs.len(), Scalar::float(partial), SummabilityStatus::Finite);
            Ok(level_tail(
                out,
                xs.len() - 1,
                1.0,
                0,
                s,
                true,
                true,
                "one point per level ℓ, ω(π_ℓ) = (ℓ+1)^β",
            ))
        }
        WeightKind::Polynomial { beta } => polynomial_summability(h, n, beta.to_f64()),
        WeightKind::ChebyshevF { p } if h.carrier() == "chebyshev" => {
            let xs = h.elements(n);
            let partial = float_partial(w, &xs)?;
            let mut out = TwoSummability::new(n, xs.len(), Scalar::float(partial), SummabilityStatus::Finite);
            if *p == 0 {
                out.status = SummabilityStatus::Divergent;
                out.evidence.push("ω_f ≡ 4: every term equals 1/16".into());
                return Ok(out);
            }
            let r = (xs.len() - 1) as f64;
            let q = 2.0 * *p as f64;
            let upper = r.powf(1.0 - q) / (q - 1.0);
            out.evidence.push("ω_f(n) ≥ n^p, tail ≤ ∫_R^∞ x^(−2p) dx".into());
            Ok(with_tail(
                out,
                TailBound {
                    formula: format!("R^(1−2p)/(2p−1) with p = {p}, R = {r}"),
                    radius: xs.len() - 1,
                    lower: 0.0,
                    upper,
                    level_constant: 1.0,
                    level_exponent: 0,
                    exponent: *p as f64,
                    certified: true,
                },
            ))
        }
        WeightKind::Product { .. } | WeightKind::OmegaAlpha { .. } => slot_independent(h, w, n, rp),
        _ => {
            let xs = h.elements(n);
            let mut out = TwoSummability::new(
                n,
                xs.len(),
                Scalar::float(float_partial(w, &xs)?),
                SummabilityStatus::Unknown,
            );
            out.evidence
                .push(format!("no analytic tail for the {} family", w.family()));
            Ok(out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn level_tail(
    mut out: TwoSummability,
    radius: usize,
    d_const: f64,
    d: u32,
    s: f64,
    exact_levels: bool,
    certified: bool,
    evidence: &str,
) -> TwoSummability {
    out.evidence.push(evidence.to_string());
    match power_tail(radius, d_const, d, s, exact_levels, certified) {
        Some(t) => {
            if !certified {
                out.status = SummabilityStatus::Unknown;
                out.evidence
                    .push("level counts are fitted on the truncation only".into());
            }
            with_tail(out, t)
        }
        None => {
            if exact_levels {
                out.status = SummabilityStatus::Divergent;
                out.evidence
                    .push(format!("2β = {} ≤ d+1 = {} with exact level counts", 2.0 * s, d + 1));
            } else {
                out.status = SummabilityStatus::Unknown;
                out.evidence
                    .push(format!("2β = {} ≤ d+1 = {}: no finite tail bound", 2.0 * s, d + 1));
            }
            out
        }
    }
}

fn polynomial_summability(h: &Hypergroup, n: usize, s: f64) -> Result<TwoSummability> {
    let mut radius = 0;
    while h.ball_size(radius + 1)? <= n {
        radius += 1;
    }
    let profile = h.growth_profile(radius)?;
    let partial: f64 = profile
        .level_sizes
        .iter()
        .enumerate()
        .map(|(r, &c)| c as f64 * (1.0 + r as f64).powf(-2.0 * s))
        .sum();
    let terms = profile.ball_sizes[radius];
    let out = TwoSummability::new(n, terms, Scalar::float(partial), SummabilityStatus::Finite);
    let law = profile.law.clone();
    let (bound, certified) = profile.tail_level_bound();
    let exact_levels = law.as_ref().is_some_and(|l| l.level_exact);
    Ok(level_tail(
        out,
        radius,
        bound.constant,
        bound.exponent,
        s,
        exact_levels,
        certified,
        &format!(
            "ball F^(*{radius}) summed by level; level counts ≤ {}·n^{}",
            bound.constant, bound.exponent
        ),
    ))
}

/// On ⊕ℕ H₀ with a slot-independent weight, one point repeated in every slot keeps the same value.
fn slot_independent(h: &Hypergroup, w: &Weight, n: usize, rp: Option<&RestrictedProduct>) -> Result<TwoSummability> {
    let xs = h.elements(n);
    let mut out = TwoSummability::new(
        n,
        xs.len(),
        Scalar::float(float_partial(w, &xs)?),
        SummabilityStatus::Unknown,
    );
    if let Some(rp) = rp {
        if let Slots::Repeated(c) = rp.slots() {
            if rp.has_infinitely_many_nontrivial_slots() {
                let a = c.elements(2)[1].clone();
                let vals = (0..8u32)
                    .map(|s| w.eval(&rp.single(s, a.clone())?))
                    .collect::<Result<Vec<_>>>()?;
                if vals.windows(2).all(|p| p[0] == p[1]) {
                    out.status = SummabilityStatus::Divergent;
                    out.evidence.push(format!(
                        "ω({} in slot s) = {} for every slot s: infinitely many terms equal {}",
                        c.label(&a),
                        vals[0],
                        vals[0].powi(-2)
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Lower bounds L_m = Π_{i≤m}(q_i+1)/(1+Σ_{i≤m} q_i(q_i+1))^{2α}, q_i = 2^i.
fn sl2_divergence(h: &Hypergroup, w: &Weight, rp: &RestrictedProduct, alpha: f64) -> Result<TwoSummability> {
    let size = h.size().unwrap_or(0);
    let xs = h.elements(size);
    let mut out = TwoSummability::new(
        size,
        xs.len(),
        Scalar::float(float_partial(w, &xs)?),
        SummabilityStatus::Divergent,
    );
    let mut verified = Vec::new();
    for comp in rp.distinct_components() {
        let data = as_conj(comp)?.class_data();
        let q = (comp.size().unwrap_or(1) - 1) as u64;
        let max = (0..data.len()).map(|c| data.size(c) as u64).max().unwrap_or(0);
        verified.push(data.len() as u64 == q + 1 && max <= q * (q + 1));
    }
    let mut log_count = 0.0;
    let mut size_sum = 1.0;
    for m in 1..=24usize {
        let q = 2f64.powi(m as i32);
        log_count += (q + 1.0).ln();
        size_sum += q * (q + 1.0);
        out.divergence_lower_bounds
            .push((m, (log_count - 2.0 * alpha * size_sum.ln()).exp()));
    }
    out.evidence.push(format!(
        "points supported in the first m slots number Π(q_i+1) and have ω ≤ (1+Σ q_i(q_i+1))^α; \
         class counts q+1 and sizes ≤ q(q+1) checked on the {} materialized slots: {}",
        verified.len(),
        verified.iter().all(|&b| b)
    ));
    if !verified.iter().all(|&b| b) {
        out.status = SummabilityStatus::Unknown;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::weights::{omega_alpha_weight, polynomial_weight, trivial_weight};

    #[test]
    fn basel_bracket() {
        let h = catalog::chebyshev();
        let w = polynomial_weight(&h, Scalar::one()).unwrap();
        let r = two_summability(&h, &w, 2000).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(r.is_certified_finite());
        assert!(r.total_lower.unwrap() <= z2 && z2 <= r.total.unwrap());
        assert!(r.total.unwrap() - z2 < 1e-6);
    }

    #[test]
    fn divergent_cases() {
        let h = catalog::chebyshev();
        assert_eq!(
            two_summability(&h, &trivial_weight(), 50).unwrap().status,
            SummabilityStatus::Divergent
        );
        let half = polynomial_weight(&h, Scalar::ratio(1, 2)).unwrap();
        assert_eq!(
            two_summability(&h, &half, 50).unwrap().status,
            SummabilityStatus::Divergent
        );
        let p = catalog::sl2_even_product(3).unwrap();
        let w = omega_alpha_weight(&p, Scalar::one()).unwrap();
        let r = two_summability(&p, &w, 200).unwrap();
        assert_eq!(r.status, SummabilityStatus::Divergent);
        let lb = &r.divergence_lower_bounds;
        assert!(lb.last().unwrap().1 > 1e6);
    }

    #[test]
    fn finite_is_exact() {
        let h = catalog::conj_hypergroup(&catalog::named_group("s3").unwrap()).unwrap();
        let r = two_summability(&h, &trivial_weight(), 10).unwrap();
        assert_eq!(r.partial, Scalar::int(3));
        assert_eq!(r.status, SummabilityStatus::Finite);
    }
}
