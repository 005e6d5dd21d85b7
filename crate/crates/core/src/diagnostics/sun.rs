use rayon::prelude::*;
use serde::Serialize;

use super::omega::omega_f64;
use crate::catalog::{su2_dual, DominantWeight};
use crate::error::{HyplabError, Result};
use crate::measures::{ElementId, Scalar};
use crate::weights::dimension_weight;

/// C_n^β (1/(1+μ₁) + 1/(1+ν₁))^β, an upper bound for Ω_β(μ, ν) on the SU(n) dual.
pub fn su_n_omega_bound(
    n: usize,
    beta: f64,
    mu: &DominantWeight,
    nu: &DominantWeight,
    c_n: Option<f64>,
) -> Result<f64> {
    let c = c_n.ok_or_else(|| HyplabError::MissingConstant("C_n".into()))?;
    if mu.rank() != n || nu.rank() != n {
        return Err(HyplabError::InvalidParam(format!(
            "dominant weights must have {n} parts"
        )));
    }
    let s = 1.0 / (1.0 + mu.top() as f64) + 1.0 / (1.0 + nu.top() as f64);
    Ok((c * s).powf(beta))
}

#[derive(Clone, Debug, Serialize)]
pub struct C2Calibration {
    pub beta: f64,
    pub level_max: usize,
    pub pairs: usize,
    /// Least C₂ for which the bound dominates every computed Ω.
    pub minimal_c2: f64,
    pub c2_used: f64,
    pub dominated: bool,
    /// max Ω/bound over the pairs.
    pub max_ratio: f64,
}

/// Compares exact SU(2) Ω_β with the C₂ bound for all ℓ, ℓ′ ≤ level_max.
/// Without a configured C₂ the value 1 is used, which d_π ≤ d_μ + d_ν − 1 justifies.
pub fn calibrate_c2(beta: f64, level_max: usize, c2: Option<f64>) -> Result<C2Calibration> {
    let h = su2_dual();
    let w = dimension_weight(&h, Scalar::float(beta))?;
    let c2_used = c2.unwrap_or(1.0);
    let rows = (0..=level_max)
        .into_par_iter()
        .map(|l| {
            let mut need: f64 = 0.0;
            let mut ratio: f64 = 0.0;
            for lp in 0..=level_max {
                let om = omega_f64(&h, &w, &ElementId::Index(l as u64), &ElementId::Index(lp as u64))?;
                let s = 1.0 / (1.0 + l as f64) + 1.0 / (1.0 + lp as f64);
                if beta > 0.0 {
                    need = need.max(om.powf(1.0 / beta) / s);
                }
                ratio = ratio.max(om / (c2_used * s).powf(beta));
            }
            Ok((need, ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let minimal_c2 = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_ratio = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(C2Calibration {
        beta,
        level_max,
        pairs: (level_max + 1) * (level_max + 1),
        minimal_c2,
        c2_used,
        dominated: max_ratio <= 1.0 + 1e-12,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dw(p: &[u32]) -> DominantWeight {
        DominantWeight::new(p.to_vec()).unwrap()
    }

    #[test]
    fn bound_values() {
        let e = dw(&[0, 0, 0]);
        assert_eq!(
            su_n_omega_bound(3, 2.0, &e, &e, Some(1.5)).unwrap(),
            (1.5f64 * 2.0).powi(2)
        );
        assert_eq!(su_n_omega_bound(3, 0.0, &dw(&[4, 1, 0]), &e, Some(3.0)).unwrap(), 1.0);
        assert!(matches!(
            su_n_omega_bound(3, 1.0, &e, &e, None),
            Err(HyplabError::MissingConstant(_))
        ));
    }

    #[test]
    fn c2_one_dominates() {
        let c = calibrate_c2(1.0, 30, None).unwrap();
        assert!(c.dominated);
        assert!(c.minimal_c2 <= 1.0 + 1e-12);
    }
}
