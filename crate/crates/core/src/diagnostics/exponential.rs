use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HyplabError, Result};
use crate::hypergroups::Hypergroup;
use crate::measures::Scalar;

/// Largest cube side [0, side] searched for M.
pub const CUBE_SIDE_CAP: u64 = 200;

/// Constants for ω = e^{p(τ)} with p(x) = Cx^α − β ln(1+x).
#[derive(Clone, Debug, Serialize)]
pub struct ExpLemmaConstants {
    pub alpha: Scalar,
    pub c: Scalar,
    pub beta: Scalar,
    /// max{1, 6/(Cα(1−α))}.
    pub lemma_floor: Scalar,
    /// max{1, 6/(Cα(1−α)), (d+1)/2}, strict.
    pub theorem_floor: Option<Scalar>,
    /// (β²/(Cα(1−α)))^{1/α}.
    pub k: Scalar,
    /// ⌊2K⌋.
    pub two_k: u64,
    /// Searched range [0, side] with side = min(⌊2K⌋, cap).
    pub side: u64,
    /// side = ⌊2K⌋: M is the lemma's constant, not a range value.
    pub full_range: bool,
    /// ln M from the exhaustive cube.
    pub log_m_cube: f64,
    /// ln M from max p − 2 min p.
    pub log_m_reduced: f64,
    pub agree: bool,
    pub m: f64,
    pub argmax: [u64; 3],
}

impl ExpLemmaConstants {
    pub fn p(&self, x: f64) -> f64 {
        p_fn(self.c.to_f64(), self.alpha.to_f64(), self.beta.to_f64(), x)
    }

    pub fn q(&self, x: f64) -> f64 {
        self.p(x) / x
    }

    pub fn log_m(&self) -> f64 {
        self.log_m_cube
    }
}

fn p_fn(c: f64, a: f64, b: f64, x: f64) -> f64 {
    c * x.powf(a) - b * x.ln_1p()
}

fn unit_reciprocal(alpha: &Scalar) -> Option<i32> {
    let r = alpha.as_rational()?;
    (r.numer().is_one()).then(|| r.denom().to_i32()).flatten()
}

/// Floors, K and M for the exponential-weight lemma; `growth_exponent` adds the theorem floor.
pub fn exp_lemma_constants(
    alpha: &Scalar,
    c: &Scalar,
    beta: &Scalar,
    growth_exponent: Option<u32>,
) -> Result<ExpLemmaConstants> {
    let (a, cf) = (alpha.to_f64(), c.to_f64());
    if !(a > 0.0 && a < 1.0) {
        return Err(HyplabError::InvalidParam(format!("α = {alpha} must lie in (0, 1)")));
    }
    if cf <= 0.0 {
        return Err(HyplabError::InvalidParam(format!("C = {c} must be positive")));
    }
    let denom = &(c * alpha) * &(&Scalar::one() - alpha);
    let lemma_floor = Scalar::one().max(&Scalar::int(6) / &denom);
    if lemma_floor.exceeds(beta, 0.0) {
        return Err(HyplabError::InvalidParam(format!(
            "β = {beta} is below the floor {lemma_floor}"
        )));
    }
    let theorem_floor = growth_exponent.map(|d| lemma_floor.clone().max(Scalar::ratio(d as i64 + 1, 2)));
    let base = &(beta * beta) / &denom;
    let k = match unit_reciprocal(alpha) {
        Some(m) if base.is_exact() => base.powi(m),
        _ => Scalar::float(base.to_f64().powf(1.0 / a)),
    };
    let two_k = match (&k * &Scalar::int(2)).as_rational() {
        Some(r) => r.floor().to_integer().to_u64().unwrap_or(u64::MAX),
        None => {
            let v = 2.0 * k.to_f64();
            if v >= u64::MAX as f64 {
                u64::MAX
            } else {
                v.floor() as u64
            }
        }
    };
    let side = two_k.min(CUBE_SIDE_CAP);
    let bf = beta.to_f64();
    let pv: Vec<f64> = (0..=side).map(|z| p_fn(cf, a, bf, z as f64)).collect();
    let (log_m_cube, argmax) = (0..=side as usize)
        .into_par_iter()
        .map(|z1| {
            let mut best = (f64::NEG_INFINITY, [0u64; 3]);
            for z2 in 0..=side as usize {
                for z3 in 0..=side as usize {
                    let v = pv[z1] - pv[z2] - pv[z3];
                    if v > best.0 {
                        best = (v, [z1 as u64, z2 as u64, z3 as u64]);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, [0; 3]),
            |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
        );
    let pmax = pv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pmin = pv.iter().cloned().fold(f64::INFINITY, f64::min);
    let log_m_reduced = pmax - 2.0 * pmin;
    let agree = (log_m_cube - log_m_reduced).abs() <= 1e-12 * log_m_cube.abs().max(1.0);
    Ok(ExpLemmaConstants {
        alpha: alpha.clone(),
        c: c.clone(),
        beta: beta.clone(),
        lemma_floor,
        theorem_floor,
        k,
        two_k,
        side,
        full_range: two_k <= CUBE_SIDE_CAP,
        log_m_cube,
        log_m_reduced,
        agree,
        m: log_m_cube.exp(),
        argmax,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ModifiedWeightCheck {
    pub tau_max: usize,
    pub triples: usize,
    /// max p(τ(t)) − p(τ(x)) − p(τ(y)) over the triples.
    pub max_log_ratio: f64,
    pub log_m: f64,
    pub holds: bool,
    /// Every τ(t) fell inside the searched range.
    pub within_range: bool,
}

/// ω(t) ≤ M ω(x)ω(y) for ω = e^{p(τ)}, all t ∈ supp(δ_x * δ_y) with τ(x), τ(y) ≤ tau_max.
pub fn exp_modified_weight_check(h: &Hypergroup, k: &ExpLemmaConstants, tau_max: usize) -> Result<ModifiedWeightCheck> {
    let ball = h.ball(tau_max)?;
    let taus = ball.iter().map(|x| h.tau(x)).collect::<Result<Vec<_>>>()?;
    let rows = (0..ball.len())
        .into_par_iter()
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            let mut count = 0;
            let mut in_range = true;
            for j in 0..ball.len() {
                for t in h.support(&ball[i], &ball[j])? {
                    let tt = h.tau(&t)?;
                    in_range &= tt as u64 <= k.side;
                    best = best.max(k.p(tt as f64) - k.p(taus[i] as f64) - k.p(taus[j] as f64));
                    count += 1;
                }
            }
            Ok((best, count, in_range))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_log_ratio = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let within_range = rows.iter().all(|r| r.2);
    Ok(ModifiedWeightCheck {
        tau_max,
        triples: rows.iter().map(|r| r.1).sum(),
        max_log_ratio,
        log_m: k.log_m(),
        holds: max_log_ratio <= k.log_m() + 1e-12 * k.log_m().abs().max(1.0),
        within_range,
    })
}
