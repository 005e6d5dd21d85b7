use serde_json::{json, Value};

use super::{power_of, Weight, WeightKind};
use crate::catalog::DominantWeight;
use crate::error::{HyplabError, Result};
use crate::hypergroups::Hypergroup;
use crate::measures::{ElementId, Scalar};

fn require_carrier(h: &Hypergroup, tag: &str) -> Result<()> {
    if h.carrier() == tag {
        Ok(())
    } else {
        Err(HyplabError::WrongCarrier(format!(
            "expected {tag}, got {}",
            h.carrier()
        )))
    }
}

fn level(x: &ElementId) -> Result<u64> {
    x.index()
        .ok_or_else(|| HyplabError::Carrier(format!("{x} is not an index")))
}

/// Σ₂ over r = from, from+2, …, to.
pub fn step2_sum(from: i64, to: i64, f: impl Fn(i64) -> Result<Scalar>) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    let mut r = from;
    while r <= to {
        acc = &acc + &f(r)?;
        r += 2;
    }
    Ok(acc)
}

/// d_π^β for an SU(n) dominant weight.
pub fn dimension_value(pi: &DominantWeight, beta: &Scalar) -> Scalar {
    let d = pi.dimension();
    match super::nonnegative_integer(beta) {
        Some(k) => Scalar::big_int(d.into()).powi(k),
        None => Scalar::float(
            crate::measures::rational_to_f64(&num_rational::BigRational::from_integer(d.into())).powf(beta.to_f64()),
        ),
    }
}

/// ω_β(π_ℓ) = (ℓ+1)^β on the SU(2) dual.
pub fn dimension_weight(h: &Hypergroup, beta: Scalar) -> Result<Weight> {
    require_carrier(h, "su2hat")?;
    if beta.is_negative() {
        return Err(HyplabError::InvalidParam("β must be non-negative".into()));
    }
    let exact = super::nonnegative_integer(&beta).is_some();
    let (b, bf) = (beta.clone(), beta.to_f64());
    Ok(Weight::build(
        "dimension",
        json!({"beta": beta.to_string()}),
        exact,
        Some(h.carrier()),
        WeightKind::Dimension { beta },
        move |x| Ok(power_of(level(x)? + 1, &b)),
    )
    .with_fast(move |x| Ok((level(x)? as f64 + 1.0).powf(bf))))
}

/// A weight on ℤ known on the window [−W, W].
#[derive(Clone, Debug)]
pub struct ZWeight {
    window: i64,
    values: Vec<Scalar>,
    label: String,
}

impl ZWeight {
    pub fn new(window: i64, values: Vec<Scalar>, label: &str) -> Result<Self> {
        if window < 0 || values.len() as i64 != 2 * window + 1 {
            return Err(HyplabError::LengthMismatch(format!(
                "window {window} needs {} values, got {}",
                2 * window + 1,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_positive()) {
            return Err(HyplabError::GroupWeight(format!(
                "σ({}) is not positive",
                i as i64 - window
            )));
        }
        Ok(ZWeight {
            window,
            values,
            label: label.to_string(),
        })
    }

    pub fn from_fn(window: i64, label: &str, f: impl Fn(i64) -> Scalar) -> Result<Self> {
        ZWeight::new(window, (-window..=window).map(f).collect(), label)
    }

    /// σ(r) = 1 for r ≥ 0 and (1 − r)^β for r < 0.
    pub fn sigma_beta(beta: &Scalar, window: i64) -> Result<Self> {
        let b = beta.clone();
        ZWeight::from_fn(window, &format!("sigma_beta({beta})"), move |r| {
            if r >= 0 {
                Scalar::one()
            } else {
                power_of((1 - r) as u64, &b)
            }
        })
    }

    /// Reads `{"window": W, "values": [...]}` with values as numbers or "a/b" strings.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| HyplabError::Config(format!("ℤ-weight: {s}"));
        let window = v["window"].as_i64().ok_or_else(|| bad("missing window"))?;
        let values = v["values"]
            .as_array()
            .ok_or_else(|| bad("missing values"))?
            .iter()
            .map(|x| match x {
                Value::String(s) => Scalar::parse(s),
                Value::Number(n) => Scalar::parse(&n.to_string()),
                _ => Err(bad("values must be numbers")),
            })
            .collect::<Result<Vec<_>>>()?;
        ZWeight::new(window, values, "table")
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Scalar::is_exact)
    }

    pub fn get(&self, r: i64) -> Result<Scalar> {
        if r.abs() > self.window {
            return Err(HyplabError::Domain(format!(
                "σ({r}) is outside the window ±{}",
                self.window
            )));
        }
        Ok(self.values[(r + self.window) as usize].clone())
    }

    /// σ(a+b) ≤ σ(a)σ(b) for all a, b with a, b, a+b in the window ("window-verified").
    pub fn check_group_weight(&self) -> Result<()> {
        let w = self.window;
        for a in -w..=w {
            for b in (-w - a).max(-w)..=(w - a).min(w) {
                let bound = &self.get(a)? * &self.get(b)?;
                let v = self.get(a + b)?;
                if v.exceeds(&bound, crate::measures::DEFAULT_TOLERANCE) {
                    return Err(HyplabError::GroupWeight(format!("σ({a}+{b}) = {v} > {bound}")));
                }
            }
        }
        Ok(())
    }
}

/// ω_σ(π_ℓ) = (ℓ+1)⁻¹ Σ₂_{r=−ℓ}^{ℓ} σ(r); refuses ℓ beyond the window.
pub fn lifted_su2_weight(h: &Hypergroup, sigma: &ZWeight) -> Result<Weight> {
    require_carrier(h, "su2hat")?;
    sigma.check_group_weight()?;
    let values: Vec<Scalar> = (0..=sigma.window())
        .map(|l| {
            let s = step2_sum(-l, l, |r| sigma.get(r))?;
            Ok(&s / &Scalar::int(l + 1))
        })
        .collect::<Result<_>>()?;
    let window = sigma.window();
    Ok(Weight::build(
        "lifted_su2",
        json!({"sigma": sigma.label(), "window": window, "window_verified": true}),
        sigma.is_exact(),
        Some(h.carrier()),
        WeightKind::LiftedSu2,
        move |x| {
            let l = level(x)?;
            values
                .get(l as usize)
                .cloned()
                .ok_or_else(|| HyplabError::Domain(format!("π_{l} needs σ beyond the window ±{window}")))
        },
    ))
}

/// The diagonal of W on π_ℓ: σ(−ℓ), σ(−ℓ+2), …, σ(ℓ).
pub fn su2_diagonal(sigma: &ZWeight, l: i64) -> Result<Vec<Scalar>> {
    (0..=l).map(|i| sigma.get(-l + 2 * i)).collect()
}

/// ω_W(π) = trace(I_π ∘ W)/d_π from positive diagonal data on the SU(2) dual.
pub fn weight_from_trace_data(h: &Hypergroup, data: Vec<(ElementId, Vec<Scalar>)>) -> Result<Weight> {
    require_carrier(h, "su2hat")?;
    let mut values = std::collections::BTreeMap::new();
    for (x, diag) in data {
        let l = level(&x)?;
        if diag.len() as u64 != l + 1 {
            return Err(HyplabError::LengthMismatch(format!(
                "π_{l} has dimension {} but {} diagonal values were given",
                l + 1,
                diag.len()
            )));
        }
        if diag.iter().any(|v| !v.is_positive()) {
            return Err(HyplabError::InvalidParam(format!(
                "diagonal data for π_{l} must be positive"
            )));
        }
        values.insert(l, &Scalar::sum(&diag) / &Scalar::int(l as i64 + 1));
    }
    let exact = values.values().all(Scalar::is_exact);
    Ok(Weight::build(
        "trace_data",
        json!({"levels": values.len()}),
        exact,
        Some(h.carrier()),
        WeightKind::TraceData,
        move |x| {
            let l = level(x)?;
            values
                .get(&l)
                .cloned()
                .ok_or_else(|| HyplabError::Domain(format!("no trace data for π_{l}")))
        },
    ))
}

/// Both sides of Σ₂_{t=−m}^{m} Σ₂_{s=−n}^{n} σ(t+s) = Σ₂_{t=n−m}^{n+m} Σ₂_{s=−t}^{t} σ(s).
pub fn rearrangement_identity(sigma: &ZWeight, m: i64, n: i64) -> Result<(Scalar, Scalar)> {
    let lhs = step2_sum(-m, m, |t| step2_sum(-n, n, |s| sigma.get(t + s)))?;
    let (lo, hi) = ((n - m).abs(), n + m);
    let rhs = step2_sum(lo, hi, |t| step2_sum(-t, t, |s| sigma.get(s)))?;
    Ok((lhs, rhs))
}

/// ω_f(n) = f(n) + 2 on the Chebyshev hypergroup with f(n) = n^p + 1.
pub fn chebyshev_f_weight(h: &Hypergroup, p: u32) -> Result<Weight> {
    require_carrier(h, "chebyshev")?;
    let value = move |n: u64| Scalar::int(n as i64).powi(p as i32) + Scalar::int(3);
    Ok(Weight::build(
        "chebyshev_f",
        json!({"f": format!("n^{p} + 1")}),
        true,
        Some(h.carrier()),
        WeightKind::ChebyshevF { p },
        move |x| Ok(value(level(x)?)),
    )
    .with_fast(move |x| Ok((level(x)? as f64).powi(p as i32) + 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::weights::{check_central, check_submultiplicative, trivial_weight};

    #[test]
    fn sigma_beta_and_lift() {
        let h = catalog::su2_dual();
        let sigma = ZWeight::sigma_beta(&Scalar::one(), 60).unwrap();
        assert_eq!(sigma.get(-2).unwrap(), Scalar::int(3));
        assert_eq!(sigma.get(2).unwrap(), Scalar::one());
        let w = lifted_su2_weight(&h, &sigma).unwrap();
        assert_eq!(w.eval(&ElementId::Index(2)).unwrap(), Scalar::ratio(5, 3));
        assert!(matches!(w.eval(&ElementId::Index(61)), Err(HyplabError::Domain(_))));
        let ones = ZWeight::from_fn(10, "one", |_| Scalar::one()).unwrap();
        let w1 = lifted_su2_weight(&h, &ones).unwrap();
        assert!((0..=10).all(|l| w1.eval(&ElementId::Index(l)).unwrap() == Scalar::one()));
    }

    #[test]
    fn trace_data_matches_lift() {
        let h = catalog::su2_dual();
        let sigma = ZWeight::sigma_beta(&Scalar::one(), 20).unwrap();
        let lifted = lifted_su2_weight(&h, &sigma).unwrap();
        let data = (0..=20)
            .map(|l| (ElementId::Index(l as u64), su2_diagonal(&sigma, l).unwrap()))
            .collect();
        let traced = weight_from_trace_data(&h, data).unwrap();
        for l in 0..=20 {
            let x = ElementId::Index(l);
            assert_eq!(traced.eval(&x).unwrap(), lifted.eval(&x).unwrap());
        }
        assert_eq!(
            su2_diagonal(&sigma, 2).unwrap(),
            vec![Scalar::int(3), Scalar::one(), Scalar::one()]
        );
        let short = vec![(ElementId::Index(2), vec![Scalar::one()])];
        assert!(matches!(
            weight_from_trace_data(&h, short),
            Err(HyplabError::LengthMismatch(_))
        ));
    }

    #[test]
    fn window_group_weight_check() {
        let bad = ZWeight::from_fn(3, "bad", |r| if r == 2 { Scalar::int(9) } else { Scalar::one() }).unwrap();
        assert!(matches!(bad.check_group_weight(), Err(HyplabError::GroupWeight(_))));
        let v = json!({"window": 1, "values": ["2", 1, "2"]});
        assert!(ZWeight::from_json(&v).unwrap().check_group_weight().is_ok());
    }

    #[test]
    fn rearrangement_small() {
        for beta in [1, 2] {
            let sigma = ZWeight::sigma_beta(&Scalar::int(beta), 40).unwrap();
            for n in 0..=20 {
                for m in 0..=n {
                    let (l, r) = rearrangement_identity(&sigma, m, n).unwrap();
                    assert_eq!(l, r, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn dimension_weight_is_central() {
        let h = catalog::su2_dual();
        let w = dimension_weight(&h, Scalar::int(2)).unwrap();
        assert!(check_central(&h, &w, 25).unwrap().passed);
        assert!(dimension_weight(&catalog::chebyshev(), Scalar::one()).is_err());
        let pi = DominantWeight::new(vec![2, 1, 0]).unwrap();
        assert_eq!(dimension_value(&pi, &Scalar::int(2)), Scalar::int(64));
    }

    #[test]
    fn chebyshev_f() {
        let h = catalog::chebyshev();
        let w = chebyshev_f_weight(&h, 2).unwrap();
        assert_eq!(w.eval(&ElementId::Index(0)).unwrap(), Scalar::int(3));
        assert_eq!(w.eval(&ElementId::Index(2)).unwrap(), Scalar::int(7));
        assert!(check_central(&h, &w, 40).unwrap().passed);
        assert!(check_submultiplicative(&h, &trivial_weight(), 10).unwrap().passed);
    }
}
