use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hypergroups::Hypergroup;
use crate::measures::{ElementId, Scalar};
use crate::weights::Weight;

/// Ω(x, y) = ω(δ_x * δ_y)/(ω(x)ω(y)), exact when the weight is.
pub fn omega(h: &Hypergroup, w: &Weight, x: &ElementId, y: &ElementId) -> Result<Scalar> {
    w.check_carrier(h)?;
    if !w.is_exact() {
        return Ok(Scalar::float(omega_f64(h, w, x, y)?));
    }
    let m = h.convolve(x, y)?.weighted_mass(w)?;
    Ok(&m / &(&w.eval(x)? * &w.eval(y)?))
}

/// Float Ω for scans.
pub fn omega_f64(h: &Hypergroup, w: &Weight, x: &ElementId, y: &ElementId) -> Result<f64> {
    let mut m = 0.0;
    for (t, c) in h.convolve_float(x, y)? {
        m += c * w.eval_f64(&t)?;
    }
    Ok(m / (w.eval_f64(x)? * w.eval_f64(y)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaTable {
    pub truncation: usize,
    pub labels: Vec<String>,
    #[serde(skip)]
    pub elements: Vec<ElementId>,
    pub values: Vec<Vec<Scalar>>,
    /// sup_y Ω(x, y) for each row x.
    pub row_sup: Vec<Scalar>,
    /// sup_x Ω(x, y) for each column y.
    pub col_sup: Vec<Scalar>,
    pub exact: bool,
}

impl OmegaTable {
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.values[i][j]
    }

    /// Every entry lies in (0, 1] up to the tolerance.
    pub fn in_unit_interval(&self, tol: f64) -> bool {
        self.values
            .iter()
            .flatten()
            .all(|v| v.is_positive() && !v.exceeds(&Scalar::one(), tol))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(vec![]);
        wtr.write_record(["x", "y", "omega", "exact_value"])
            .map_err(std::io::Error::from)?;
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                wtr.write_record([
                    self.labels[i].as_str(),
                    self.labels[j].as_str(),
                    &format!("{:.17e}", v.to_f64()),
                    &if v.is_exact() { v.to_string() } else { String::new() },
                ])
                .map_err(std::io::Error::from)?;
            }
        }
        let bytes = wtr.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Ω over the first `n` enumerated elements.
pub fn omega_table(h: &Hypergroup, w: &Weight, n: usize) -> Result<OmegaTable> {
    w.check_carrier(h)?;
    let xs = h.elements(n);
    let comm = h.is_commutative();
    let upper: Vec<Vec<Scalar>> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let start = if comm { i } else { 0 };
            (start..xs.len())
                .map(|j| omega(h, w, &xs[i], &xs[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let k = xs.len();
    let values: Vec<Vec<Scalar>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if !comm {
                        upper[i][j].clone()
                    } else if j >= i {
                        upper[i][j - i].clone()
                    } else {
                        upper[j][i - j].clone()
                    }
                })
                .collect()
        })
        .collect();
    let sup = |it: &mut dyn Iterator<Item = Scalar>| it.reduce(Scalar::max).unwrap_or_else(Scalar::zero);
    let row_sup = (0..k).map(|i| sup(&mut values[i].iter().cloned())).collect();
    let col_sup = (0..k).map(|j| sup(&mut values.iter().map(|r| r[j].clone()))).collect();
    Ok(OmegaTable {
        truncation: n,
        labels: xs.iter().map(|x| h.label(x)).collect(),
        elements: xs,
        values,
        row_sup,
        col_sup,
        exact: w.is_exact(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::weights::{chebyshev_f_weight, dimension_weight, trivial_weight};

    #[test]
    fn trivial_weight_gives_one() {
        let h = catalog::su2_dual();
        let t = omega_table(&h, &trivial_weight(), 12).unwrap();
        assert!(t.values.iter().flatten().all(|v| *v == Scalar::one()));
    }

    #[test]
    fn chebyshev_f_spot_value() {
        let h = catalog::chebyshev();
        let w = chebyshev_f_weight(&h, 2).unwrap();
        let v = omega(&h, &w, &ElementId::Index(1), &ElementId::Index(1)).unwrap();
        assert_eq!(v, Scalar::ratio(5, 16));
    }

    #[test]
    fn symmetric_and_bounded() {
        let h = catalog::su2_dual();
        let w = dimension_weight(&h, Scalar::int(2)).unwrap();
        let t = omega_table(&h, &w, 20).unwrap();
        assert!(t.in_unit_interval(0.0));
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(t.get(i, j), t.get(j, i));
            }
        }
        assert!(t.to_csv().unwrap().lines().count() == 401);
    }
}
