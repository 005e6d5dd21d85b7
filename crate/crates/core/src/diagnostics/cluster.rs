use rayon::prelude::*;
use serde::Serialize;

use super::omega::{omega, omega_f64};
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, RestrictedProduct, Slots};
use crate::measures::{ElementId, Scalar};
use crate::weights::{Weight, WeightKind};

#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub x: String,
    pub y: String,
    pub omega: Scalar,
    /// δ_x * δ_y is a point mass.
    pub point_mass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum ClusterVerdict {
    #[serde(rename = "CONSISTENT-WITH-STRONG-0-CLUSTER")]
    Consistent,
    #[serde(rename = "WITNESS-AGAINST")]
    WitnessAgainst { lower_bound: f64, pairs: Vec<PairWitness> },
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl ClusterVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ClusterVerdict::Consistent)
    }

    pub fn is_witness_against(&self) -> bool {
        matches!(self, ClusterVerdict::WitnessAgainst { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterScanResult {
    pub truncation: usize,
    /// Inner limsup is read off the deep tail [inner_depth, truncation).
    pub inner_depth: usize,
    pub threshold: f64,
    /// E_row(m) = max_{m ≤ x < inner_depth} max_{y ≥ inner_depth} Ω(x, y).
    pub row_envelope: Vec<f64>,
    /// E_col(m) = max_{m ≤ y < inner_depth} max_{x ≥ inner_depth} Ω(x, y).
    pub col_envelope: Vec<f64>,
    /// First tail index where both envelopes are below the threshold.
    pub crossing: Option<usize>,
    pub checks: usize,
    pub verdict: ClusterVerdict,
    pub notes: Vec<String>,
}

const ORDER_NOTE: &str =
    "x → ∞ is read along the fixed enumeration order; only WITNESS-AGAINST with Ω bounded below is order-independent";

fn suffix_max(v: &[(f64, usize)]) -> Vec<(f64, usize, usize)> {
    let mut out = vec![(0.0, 0, 0); v.len()];
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for i in (0..v.len()).rev() {
        if v[i].0 > best.0 {
            best = (v[i].0, i, v[i].1);
        }
        out[i] = best;
    }
    out
}

/// Iterated tail envelopes of Ω along the enumeration, with a verdict.
pub fn cluster_scan(h: &Hypergroup, w: &Weight, n: usize, threshold: f64) -> Result<ClusterScanResult> {
    if n < 10 {
        return Err(HyplabError::InvalidParam("cluster scan needs N ≥ 10".into()));
    }
    w.check_carrier(h)?;
    let xs = h.elements(n);
    let k = xs.len();
    if h.size().is_some_and(|s| s <= n) {
        return Ok(ClusterScanResult {
            truncation: n,
            inner_depth: k,
            threshold,
            row_envelope: vec![],
            col_envelope: vec![],
            crossing: Some(0),
            checks: 0,
            verdict: ClusterVerdict::Consistent,
            notes: vec!["finite carrier: the iterated limits are over empty tails".into()],
        });
    }
    let depth = k / 2;
    // best (Ω, partner index) for each shallow index, for both iterated orders
    let profile = |row: bool| -> Result<Vec<(f64, usize)>> {
        (0..depth)
            .into_par_iter()
            .map(|i| {
                let mut best = (f64::NEG_INFINITY, depth);
                for j in depth..k {
                    let v = if row {
                        omega_f64(h, w, &xs[i], &xs[j])?
                    } else {
                        omega_f64(h, w, &xs[j], &xs[i])?
                    };
                    if v > best.0 {
                        best = (v, j);
                    }
                }
                Ok(best)
            })
            .collect()
    };
    let rows = profile(true)?;
    let cols = if h.is_commutative() {
        rows.clone()
    } else {
        profile(false)?
    };
    let (er, ec) = (suffix_max(&rows), suffix_max(&cols));
    let row_envelope: Vec<f64> = er.iter().map(|e| e.0).collect();
    let col_envelope: Vec<f64> = ec.iter().map(|e| e.0).collect();
    let crossing = (0..depth).find(|&m| row_envelope[m] < threshold && col_envelope[m] < threshold);
    let last = depth - 1;
    let quarter = depth / 2;
    let mut notes = vec![ORDER_NOTE.to_string()];
    let verdict = if row_envelope[last] < threshold && col_envelope[last] < threshold {
        notes.push("CONSISTENT is evidence along the truncation, not a certificate".into());
        ClusterVerdict::Consistent
    } else {
        let flat = |e: &[f64]| e[last] >= threshold && e[last] >= e[quarter] / 2.0;
        let pick = if flat(&row_envelope) {
            Some((true, &er))
        } else if flat(&col_envelope) {
            Some((false, &ec))
        } else {
            None
        };
        match pick {
            Some((row, env)) => {
                let step = (depth - quarter).div_ceil(8).max(1);
                let mut pairs = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                for m in (quarter..depth).step_by(step) {
                    let (_, i, j) = env[m];
                    if !seen.insert((i, j)) {
                        continue;
                    }
                    let (x, y) = if row { (&xs[i], &xs[j]) } else { (&xs[j], &xs[i]) };
                    pairs.push(PairWitness {
                        x: h.label(x),
                        y: h.label(y),
                        omega: omega(h, w, x, y)?,
                        point_mass: h.convolve(x, y)?.as_point().is_some(),
                    });
                }
                let lower_bound = pairs.iter().map(|p| p.omega.to_f64()).fold(f64::INFINITY, f64::min);
                notes.push(format!(
                    "Ω stays ≥ {lower_bound} on pairs taken ever deeper in the enumeration"
                ));
                ClusterVerdict::WitnessAgainst { lower_bound, pairs }
            }
            None => ClusterVerdict::Inconclusive,
        }
    };
    let checks = depth * (k - depth) * if h.is_commutative() { 1 } else { 2 };
    Ok(ClusterScanResult {
        truncation: n,
        inner_depth: depth,
        threshold,
        row_envelope,
        col_envelope,
        crossing,
        checks,
        verdict,
        notes,
    })
}

/// Ω(v_n, u_m) = 1 with v_n = a in slot 2n and u_m = a in slot 2m+1, 1 ≤ n, m ≤ depth.
pub fn non_arens_witness(h: &Hypergroup, w: &Weight, depth: usize) -> Result<ClusterScanResult> {
    w.check_carrier(h)?;
    let rp = h
        .rule_as::<RestrictedProduct>()
        .ok_or_else(|| HyplabError::WrongCarrier(format!("{} is not a restricted product", h.carrier())))?;
    let comp = match rp.slots() {
        Slots::Repeated(c) if rp.has_infinitely_many_nontrivial_slots() => c,
        _ => {
            return Err(HyplabError::WrongCarrier(format!(
                "{} does not have infinitely many non-trivial slots",
                h.carrier()
            )))
        }
    };
    if !matches!(w.kind(), WeightKind::Product { .. } | WeightKind::Trivial) {
        return Err(HyplabError::InvalidParam(format!(
            "{} is not a product weight",
            w.family()
        )));
    }
    if depth == 0 {
        return Err(HyplabError::InvalidParam("depth must be at least 1".into()));
    }
    let a: ElementId = comp.elements(2)[1].clone();
    let pairs_idx: Vec<(usize, usize)> = (1..=depth).flat_map(|n| (1..=depth).map(move |m| (n, m))).collect();
    let pairs = pairs_idx
        .par_iter()
        .map(|&(n, m)| {
            let v = rp.single(2 * n as u32, a.clone())?;
            let u = rp.single(2 * m as u32 + 1, a.clone())?;
            Ok(PairWitness {
                x: h.label(&v),
                y: h.label(&u),
                omega: omega(h, w, &v, &u)?,
                point_mass: h.convolve(&v, &u)?.as_point().is_some(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_hold = pairs
        .iter()
        .all(|p| p.point_mass && p.omega.approx_eq(&Scalar::one(), 0.0));
    let lower_bound = pairs.iter().map(|p| p.omega.to_f64()).fold(f64::INFINITY, f64::min);
    let verdict = if all_hold {
        ClusterVerdict::WitnessAgainst { lower_bound, pairs }
    } else {
        ClusterVerdict::Inconclusive
    };
    Ok(ClusterScanResult {
        truncation: depth,
        inner_depth: depth,
        threshold: 1.0,
        row_envelope: vec![],
        col_envelope: vec![],
        crossing: None,
        checks: depth * depth,
        verdict,
        notes: vec![format!(
            "v_n = {} in slot 2n, u_m = {} in slot 2m+1; disjoint supports give point masses and Ω = 1",
            comp.label(&a),
            comp.label(&a)
        )],
    })
}
