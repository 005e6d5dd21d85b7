use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::exponential::exp_lemma_constants;
use super::omega::omega_f64;
use super::summability::two_summability;
use super::DiagConfig;
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, PowerBound};
use crate::measures::{ElementId, Scalar};
use crate::weights::{
    power_mean_constant, weak_additivity_certificate, weak_additivity_constant, Certificate, Weight, WeightKind,
};

/// Elements used for the trivial lower bound sup|Ω| ≤ ‖Ω‖_{T²}.
const LOWER_BOUND_SAMPLE: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    T2General,
    TwoSummable,
    Polynomial,
    Exponential,
    SuN,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constituent {
    pub name: String,
    pub value: f64,
    /// Exact rational form when the constant is rational.
    pub exact: Option<String>,
}

/// An upper bound with the constants it was computed from.
#[derive(Clone, Debug, Serialize)]
pub struct NormBound {
    pub value: f64,
    pub route: Route,
    pub formula: String,
    /// The value includes the factor K_G.
    pub includes_kg: bool,
    pub constituents: Vec<Constituent>,
    /// sup |Ω| over a sample, a lower bound for ‖Ω‖_{T²}.
    pub t2_lower: Option<f64>,
    pub conditional_on: Vec<String>,
    pub notes: Vec<String>,
}

impl NormBound {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constituents.iter().find(|c| c.name == name).map(|c| c.value)
    }

    /// Re-evaluates the closed form of the route from the stored constants.
    pub fn recompute(&self) -> f64 {
        evaluate(self.route, &self.constituents, self.includes_kg)
    }

    pub fn recomputes_exactly(&self) -> bool {
        self.recompute().to_bits() == self.value.to_bits()
    }

    fn with_kg(&self, k_g: f64) -> NormBound {
        let mut out = self.clone();
        out.constituents.push(Constituent {
            name: "K_G".into(),
            value: k_g,
            exact: None,
        });
        out.includes_kg = true;
        out.formula = format!("K_G · {}", self.formula);
        out.value = out.recompute();
        out
    }
}

fn evaluate(route: Route, cs: &[Constituent], with_kg: bool) -> f64 {
    let get = |n: &str| cs.iter().find(|c| c.name == n).map(|c| c.value).unwrap_or(f64::NAN);
    let t2 = match route {
        Route::TwoSummable => 2.0 * get("C") * get("sum").sqrt(),
        Route::Polynomial => 2.0 * get("C") * (1.0 + get("partial") + get("tail")).sqrt(),
        Route::Exponential => 2.0 * get("M") * get("C_beta") * (1.0 + get("partial") + get("tail")).sqrt(),
        Route::SuN => 2.0 * get("A_beta") * get("C_n").powf(get("beta")) * (get("partial") + get("tail")).sqrt(),
        Route::T2General => get("row") + get("col"),
    };
    if with_kg {
        get("K_G") * t2
    } else {
        t2
    }
}

fn c(name: &str, value: f64) -> Constituent {
    Constituent {
        name: name.into(),
        value,
        exact: None,
    }
}

fn cs(name: &str, value: &Scalar) -> Constituent {
    Constituent {
        name: name.into(),
        value: value.to_f64(),
        exact: value.is_exact().then(|| value.to_string()),
    }
}

fn build(route: Route, formula: &str, constituents: Vec<Constituent>) -> NormBound {
    let value = evaluate(route, &constituents, false);
    NormBound {
        value,
        route,
        formula: formula.into(),
        includes_kg: false,
        constituents,
        t2_lower: None,
        conditional_on: vec![],
        notes: vec![],
    }
}

type PairFn = Arc<dyn Fn(&ElementId, &ElementId) -> f64 + Send + Sync>;

/// A splitting Ω ≤ f₁ + f₂ used for the T² estimate.
#[derive(Clone)]
pub enum Decomposition {
    /// f₁ = C/ω(x), f₂ = C/ω(y); the constant comes from the family certificate when absent.
    WeaklyAdditive {
        constant: Option<Scalar>,
    },
    /// f₁ = A_β C_n^β/(1+μ₁)^β, f₂ = A_β C_n^β/(1+ν₁)^β on the SU(n) dual.
    SuN {
        n: usize,
        beta: f64,
    },
    Custom {
        f1: PairFn,
        f2: PairFn,
    },
}

fn sample_sup_omega(h: &Hypergroup, w: &Weight) -> Result<f64> {
    let xs = h.elements(LOWER_BOUND_SAMPLE);
    let rows = xs
        .par_iter()
        .map(|x| {
            xs.iter()
                .map(|y| omega_f64(h, w, x, y))
                .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Upper bound on ‖Ω‖_{T²} from the given decomposition.
pub fn t2_upper_bound(
    h: &Hypergroup,
    w: &Weight,
    n: usize,
    decomposition: &Decomposition,
    cfg: &DiagConfig,
) -> Result<NormBound> {
    w.check_carrier(h)?;
    let mut bound = match decomposition {
        Decomposition::WeaklyAdditive { constant } => {
            let constant = match constant {
                Some(k) => k.clone(),
                None => certified_weak_additivity(h, w, n)?
                    .map(|cert| cert.constant)
                    .ok_or_else(|| {
                        HyplabError::NoDecomposition(format!("no weak-additivity constant for {}", w.family()))
                    })?,
            };
            let s = two_summability(h, w, n)?;
            if !s.is_certified_finite() {
                return Err(HyplabError::NoDecomposition(format!(
                    "Σ ω^-2 is not certified finite ({:?})",
                    s.status
                )));
            }
            let total = s.total.expect("finite sums carry a total");
            let mut b = build(
                Route::TwoSummable,
                "2C (Σ_x ω(x)^-2)^(1/2)",
                vec![cs("C", &constant), c("sum", total), cs("partial", &s.partial)],
            );
            if let Some(t) = &s.tail {
                b.constituents.push(c("tail", t.upper));
                b.notes.push(t.formula.clone());
            }
            b
        }
        Decomposition::SuN { n: rank, beta } => {
            let c_n = cfg.c_n.ok_or_else(|| HyplabError::MissingConstant("C_n".into()))?;
            let rank = *rank;
            if rank < 2 {
                return Err(HyplabError::InvalidParam("SU(n) needs n ≥ 2".into()));
            }
            let gap = 2.0 * beta - rank as f64 + 1.0;
            if gap <= 0.0 {
                return Err(HyplabError::RouteUnavailable(format!(
                    "needs β > (n−1)/2 = {}",
                    (rank as f64 - 1.0) / 2.0
                )));
            }
            let e = rank as f64 - 2.0 - 2.0 * beta;
            let partial: f64 = (0..=n).map(|k| (1.0 + k as f64).powf(e)).sum();
            let tail = (1.0 + n as f64).powf(-gap) / gap;
            let a = power_mean_constant(&Scalar::float(*beta));
            let mut b = build(
                Route::SuN,
                "2 A_β C_n^β (Σ_k (1+k)^(n−2)/(1+k)^(2β))^(1/2)",
                vec![
                    cs("A_beta", &a),
                    c("C_n", c_n),
                    c("beta", *beta),
                    c("n", rank as f64),
                    c("partial", partial),
                    c("tail", tail),
                ],
            );
            b.conditional_on.push("C_n".into());
            b
        }
        Decomposition::Custom { f1, f2 } => {
            let xs = h.elements(n);
            let mut col_sq = vec![0.0; xs.len()];
            let mut row_sq = vec![0.0; xs.len()];
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in xs.iter().enumerate() {
                    let (a, b) = (f1(x, y), f2(x, y));
                    if a < 0.0 || b < 0.0 || omega_f64(h, w, x, y)? > (a + b) * (1.0 + 1e-12) {
                        return Err(HyplabError::NoDecomposition(format!(
                            "f₁ + f₂ does not dominate Ω at ({}, {})",
                            h.label(x),
                            h.label(y)
                        )));
                    }
                    col_sq[j] += a * a;
                    row_sq[i] += b * b;
                }
            }
            let row = col_sq.iter().cloned().fold(0.0, f64::max).sqrt();
            let col = row_sq.iter().cloned().fold(0.0, f64::max).sqrt();
            let mut b = build(
                Route::T2General,
                "sup_y (Σ_x f₁²)^(1/2) + sup_x (Σ_y f₂²)^(1/2)",
                vec![c("row", row), c("col", col)],
            );
            if !h.size().is_some_and(|s| s <= n) {
                b.conditional_on.push(format!("truncation to the first {n} elements"));
            }
            b
        }
    };
    bound.t2_lower = Some(sample_sup_omega(h, w)?);
    Ok(bound)
}

/// Family certificate, or the exhaustive constant when the truncation covers a finite carrier.
pub(crate) fn certified_weak_additivity(h: &Hypergroup, w: &Weight, n: usize) -> Result<Option<Certificate>> {
    if let Some(c) = weak_additivity_certificate(h, w)? {
        return Ok(Some(c));
    }
    if h.size().is_some_and(|s| s <= n) {
        return Ok(weak_additivity_constant(h, w, n)?.certificate);
    }
    Ok(None)
}

/// Ball bound |F^{*n}| ≤ D n^d, closed form when known.
fn ball_bound(h: &Hypergroup, n: usize) -> Result<(PowerBound, bool)> {
    if let Some(law) = h.growth_law() {
        return Ok((law.ball, true));
    }
    let mut radius = 1;
    while radius < 64 && h.ball_size(radius + 1)? <= n {
        radius += 1;
    }
    Ok(h.growth_profile(radius)?.ball_bound())
}

fn polynomial_inner(d_const: f64, d: u32, beta: f64, n: usize) -> Option<(f64, f64)> {
    let gap = 2.0 * beta - d as f64 - 1.0;
    if gap <= 0.0 {
        return None;
    }
    let partial: f64 = (1..=n)
        .map(|k| d_const * (k as f64).powi(d as i32) * (1.0 + k as f64).powf(-2.0 * beta))
        .sum();
    let tail = d_const * (1.0 + n as f64).powf(-gap) / gap;
    Some((partial, tail))
}

/// K_G times the T² bound of the chosen route.
pub fn multiplication_norm_bound(
    h: &Hypergroup,
    w: &Weight,
    route: Route,
    n: usize,
    cfg: &DiagConfig,
) -> Result<NormBound> {
    w.check_carrier(h)?;
    let unavailable = |e: HyplabError| HyplabError::RouteUnavailable(e.to_string());
    let t2 = match route {
        Route::TwoSummable => {
            t2_upper_bound(h, w, n, &Decomposition::WeaklyAdditive { constant: None }, cfg).map_err(unavailable)?
        }
        Route::SuN => {
            let (rank, beta) = match w.kind() {
                WeightKind::Dimension { beta } if h.carrier() == "su2hat" => (2, beta.to_f64()),
                _ => {
                    return Err(HyplabError::RouteUnavailable(
                        "SU(n) route needs a dimension weight".into(),
                    ))
                }
            };
            t2_upper_bound(h, w, n, &Decomposition::SuN { n: rank, beta }, cfg)?
        }
        Route::Polynomial => {
            let beta = match w.kind() {
                WeightKind::Polynomial { beta } => beta.clone(),
                _ => {
                    return Err(HyplabError::RouteUnavailable(
                        "polynomial route needs a polynomial weight".into(),
                    ))
                }
            };
            let (bb, certified) = ball_bound(h, n)?;
            let (partial, tail) = polynomial_inner(bb.constant, bb.exponent, beta.to_f64(), n).ok_or_else(|| {
                HyplabError::RouteUnavailable(format!(
                    "DIVERGENT inner sum: needs 2β > d+1, have 2β = {} and d+1 = {}",
                    2.0 * beta.to_f64(),
                    bb.exponent + 1
                ))
            })?;
            let mut b = build(
                Route::Polynomial,
                "2C (1 + Σ_{n≥1} D n^d/(1+n)^(2β))^(1/2)",
                vec![
                    cs("C", &power_mean_constant(&beta)),
                    c("D", bb.constant),
                    c("d", bb.exponent as f64),
                    cs("beta", &beta),
                    c("partial", partial),
                    c("tail", tail),
                ],
            );
            if !certified {
                b.conditional_on.push("growth bound fitted on the truncation".into());
            }
            b.t2_lower = Some(sample_sup_omega(h, w)?);
            b
        }
        Route::Exponential => {
            let (alpha, cc) = match w.kind() {
                WeightKind::Exponential { alpha, c } => (alpha.clone(), c.clone()),
                _ => {
                    return Err(HyplabError::RouteUnavailable(
                        "exponential route needs an exponential weight".into(),
                    ))
                }
            };
            let (bb, certified) = ball_bound(h, n)?;
            let beta = exponential_beta(&alpha, &cc, bb.exponent)?;
            let k = exp_lemma_constants(&alpha, &cc, &beta, Some(bb.exponent))?;
            if !k.full_range {
                return Err(HyplabError::RouteUnavailable(format!(
                    "M is range-verified only (⌊2K⌋ = {} exceeds the cube cap); no numeric bound",
                    k.two_k
                )));
            }
            let (partial, tail) =
                polynomial_inner(bb.constant, bb.exponent, beta.to_f64(), n).expect("β above (d+1)/2");
            let mut b = build(
                Route::Exponential,
                "2 M C_β (1 + Σ_{n≥1} D n^d/(1+n)^(2β))^(1/2)",
                vec![
                    c("M", k.m),
                    cs("C_beta", &power_mean_constant(&beta)),
                    cs("beta", &beta),
                    c("D", bb.constant),
                    c("d", bb.exponent as f64),
                    c("partial", partial),
                    c("tail", tail),
                ],
            );
            if !certified {
                b.conditional_on.push("growth bound fitted on the truncation".into());
            }
            b.t2_lower = Some(sample_sup_omega(h, w)?);
            b
        }
        Route::T2General => {
            return Err(HyplabError::RouteUnavailable(
                "the general route needs an explicit decomposition; use t2_upper_bound".into(),
            ))
        }
    };
    Ok(t2.with_kg(cfg.k_g))
}

/// Least integer β strictly above max{1, 6/(Cα(1−α)), (d+1)/2}.
pub(crate) fn exponential_beta(alpha: &Scalar, c: &Scalar, d: u32) -> Result<Scalar> {
    let (a, cf) = (alpha.to_f64(), c.to_f64());
    if !(a > 0.0 && a < 1.0) || cf <= 0.0 {
        return Err(HyplabError::RouteUnavailable(
            "the exponential route needs 0 < α < 1 and C > 0".into(),
        ));
    }
    let floor = 1f64.max(6.0 / (cf * a * (1.0 - a))).max((d as f64 + 1.0) / 2.0);
    Ok(Scalar::int(floor.floor() as i64 + 1))
}
