//! Weight families and the verification suite for them.

mod checks;
pub(crate) use checks::power_mean_constant;
mod conj;
mod product;
mod su2;

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

pub use checks::{
    centrality_ratios, check_bounded_below, check_central, check_central_tol, check_equivalence,
    check_submultiplicative, check_submultiplicative_tol, weak_additivity_certificate, weak_additivity_constant,
    weak_additivity_constant_tol, Certificate, RatioEntry, RatioSequence, WeightCheckReport, WeightProperty,
    WeightWitness, DIVERGENCE_RUN,
};
pub use conj::{
    cardinality_weight, check_group_weight, mean_weight, mean_weight_norm_bridge, omega_alpha_weight,
    push_forward_weight, quotient_weight, sigma_from_central, BridgeReport,
};
pub use product::{product_weight, ProductComponents};
pub use su2::{
    chebyshev_f_weight, dimension_value, dimension_weight, lifted_su2_weight, rearrangement_identity, step2_sum,
    su2_diagonal, weight_from_trace_data, ZWeight,
};

use crate::error::{HyplabError, Result};
use crate::hypergroups::Hypergroup;
use crate::measures::{ElementId, PointFunction, Scalar};

type Eval = dyn Fn(&ElementId) -> Result<Scalar> + Send + Sync;
type FastEval = dyn Fn(&ElementId) -> Result<f64> + Send + Sync;

/// Structural information the diagnostics use to pick certificate routes.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    Trivial,
    Polynomial {
        beta: Scalar,
    },
    Exponential {
        alpha: Scalar,
        c: Scalar,
    },
    Cardinality,
    Mean,
    OmegaAlpha {
        alpha: Scalar,
    },
    /// Product over slots; `repeated` when one component weight is used in every slot.
    Product {
        repeated: bool,
    },
    PushForward,
    Dimension {
        beta: Scalar,
    },
    LiftedSu2,
    TraceData,
    ChebyshevF {
        p: u32,
    },
    Table,
    Scaled {
        factor: Scalar,
    },
}

/// A positive function on a carrier with an exactness flag.
#[derive(Clone)]
pub struct Weight {
    family: String,
    params: Value,
    exact: bool,
    carrier: Option<String>,
    kind: WeightKind,
    eval: Arc<Eval>,
    fast: Option<Arc<FastEval>>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("family", &self.family)
            .field("params", &self.params)
            .field("exact", &self.exact)
            .finish()
    }
}

impl Weight {
    pub(crate) fn build<F>(
        family: &str,
        params: Value,
        exact: bool,
        carrier: Option<&str>,
        kind: WeightKind,
        eval: F,
    ) -> Self
    where
        F: Fn(&ElementId) -> Result<Scalar> + Send + Sync + 'static,
    {
        Weight {
            family: family.to_string(),
            params,
            exact,
            carrier: carrier.map(str::to_string),
            kind,
            eval: Arc::new(eval),
            fast: None,
        }
    }

    pub(crate) fn with_fast<F>(mut self, fast: F) -> Self
    where
        F: Fn(&ElementId) -> Result<f64> + Send + Sync + 'static,
    {
        self.fast = Some(Arc::new(fast));
        self
    }

    pub fn eval(&self, x: &ElementId) -> Result<Scalar> {
        (self.eval)(x)
    }

    /// Float value, through the fast path when the family has one.
    pub fn eval_f64(&self, x: &ElementId) -> Result<f64> {
        match &self.fast {
            Some(f) => f(x),
            None => Ok(self.eval(x)?.to_f64()),
        }
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn params(&self) -> &Value {
        &self.params
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn carrier(&self) -> Option<&str> {
        self.carrier.as_deref()
    }

    pub fn describe(&self) -> Value {
        json!({"family": self.family, "params": self.params, "exact": self.exact})
    }

    /// Refuses use on a hypergroup other than the one the weight was built for.
    pub fn check_carrier(&self, h: &Hypergroup) -> Result<()> {
        match &self.carrier {
            Some(c) if c != h.carrier() => Err(HyplabError::WrongCarrier(format!(
                "weight built on {c} used on {}",
                h.carrier()
            ))),
            _ => Ok(()),
        }
    }

    /// c·ω, again a weight when c ≥ 1.
    pub fn scaled(&self, factor: Scalar) -> Result<Weight> {
        if !factor.is_positive() {
            return Err(HyplabError::InvalidParam("scale factor must be positive".into()));
        }
        let base = self.clone();
        let f = factor.clone();
        let ff = factor.to_f64();
        let fast_base = self.clone();
        Ok(Weight::build(
            &format!("scaled({})", self.family),
            json!({"factor": factor.to_string(), "base": self.describe()}),
            self.exact && factor.is_exact(),
            self.carrier.as_deref(),
            WeightKind::Scaled { factor },
            move |x| Ok(&base.eval(x)? * &f),
        )
        .with_fast(move |x| Ok(fast_base.eval_f64(x)? * ff)))
    }
}

impl PointFunction for Weight {
    fn value_at(&self, x: &ElementId) -> Result<Scalar> {
        self.eval(x)
    }
}

/// ω ≡ 1.
pub fn trivial_weight() -> Weight {
    Weight::build("trivial", json!({}), true, None, WeightKind::Trivial, |_| {
        Ok(Scalar::one())
    })
    .with_fast(|_| Ok(1.0))
}

/// Explicit values on the listed elements; anything else is a domain error.
pub fn table_weight(h: &Hypergroup, values: Vec<(ElementId, Scalar)>) -> Result<Weight> {
    let mut map = std::collections::HashMap::new();
    let mut shown = serde_json::Map::new();
    for (x, v) in values {
        h.check_member(&x)?;
        if !v.is_positive() {
            return Err(HyplabError::InvalidParam(format!(
                "weight value {v} at {} is not positive",
                h.label(&x)
            )));
        }
        shown.insert(h.label(&x), Value::String(v.to_string()));
        map.insert(x, v);
    }
    let exact = map.values().all(Scalar::is_exact);
    let carrier = h.carrier().to_string();
    Ok(Weight::build(
        "table",
        Value::Object(shown),
        exact,
        Some(h.carrier()),
        WeightKind::Table,
        move |x| {
            map.get(x)
                .cloned()
                .ok_or_else(|| HyplabError::Domain(format!("table weight undefined at {x} on {carrier}")))
        },
    ))
}

/// Table weight from labels, e.g. `[("e", 1), ("T", 2), ("R", 5)]`.
pub fn table_weight_by_label(h: &Hypergroup, values: &[(&str, Scalar)]) -> Result<Weight> {
    let vals = values
        .iter()
        .map(|(l, v)| Ok((h.parse_element(l)?, v.clone())))
        .collect::<Result<Vec<_>>>()?;
    table_weight(h, vals)
}

fn nonnegative_integer(s: &Scalar) -> Option<i32> {
    let r = s.as_rational()?;
    (r.is_integer() && !r.numer().sign().eq(&num_bigint::Sign::Minus))
        .then(|| num_traits::ToPrimitive::to_i32(r.numer()))
        .flatten()
}

/// (1 + v)^β, exact when β is a non-negative integer.
pub(crate) fn power_of(base: u64, beta: &Scalar) -> Scalar {
    match nonnegative_integer(beta) {
        Some(k) => Scalar::int(base as i64).powi(k),
        None => Scalar::float((base as f64).powf(beta.to_f64())),
    }
}

/// ω_β(x) = (1 + τ_F(x))^β.
pub fn polynomial_weight(h: &Hypergroup, beta: Scalar) -> Result<Weight> {
    if h.generator().is_none() {
        return Err(HyplabError::NoGenerator);
    }
    if beta.is_negative() {
        return Err(HyplabError::InvalidParam("β must be non-negative".into()));
    }
    let exact = nonnegative_integer(&beta).is_some();
    let (he, hf) = (h.clone(), h.clone());
    let (b, bf) = (beta.clone(), beta.to_f64());
    Ok(Weight::build(
        "polynomial",
        json!({"beta": beta.to_string()}),
        exact,
        Some(h.carrier()),
        WeightKind::Polynomial { beta },
        move |x| Ok(power_of(1 + he.tau(x)? as u64, &b)),
    )
    .with_fast(move |x| Ok((1.0 + hf.tau(x)? as f64).powf(bf))))
}

/// σ_{α,C}(x) = exp(C·τ_F(x)^α), always float.
pub fn exponential_weight(h: &Hypergroup, alpha: Scalar, c: Scalar) -> Result<Weight> {
    if h.generator().is_none() {
        return Err(HyplabError::NoGenerator);
    }
    let (a, cf) = (alpha.to_f64(), c.to_f64());
    if !(0.0..=1.0).contains(&a) || cf <= 0.0 {
        return Err(HyplabError::InvalidParam("need 0 ≤ α ≤ 1 and C > 0".into()));
    }
    let he = h.clone();
    let value = move |x: &ElementId| -> Result<f64> { Ok((cf * (he.tau(x)? as f64).powf(a)).exp()) };
    let v2 = value.clone();
    Ok(Weight::build(
        "exponential",
        json!({"alpha": alpha.to_string(), "C": c.to_string()}),
        false,
        Some(h.carrier()),
        WeightKind::Exponential { alpha, c },
        move |x| Ok(Scalar::float(value(x)?)),
    )
    .with_fast(v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn polynomial_values() {
        let h = catalog::chebyshev();
        let w = polynomial_weight(&h, Scalar::int(1)).unwrap();
        assert!(w.is_exact());
        for n in 0..20 {
            assert_eq!(w.eval(&ElementId::Index(n)).unwrap(), Scalar::int(n as i64 + 1));
        }
        let w0 = polynomial_weight(&h, Scalar::zero()).unwrap();
        assert_eq!(w0.eval(&ElementId::Index(9)).unwrap(), Scalar::one());
        let half = polynomial_weight(&h, Scalar::ratio(1, 2)).unwrap();
        assert!(!half.is_exact());
        assert!((half.eval_f64(&ElementId::Index(3)).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            polynomial_weight(&h.without_generator(), Scalar::one()),
            Err(HyplabError::NoGenerator)
        ));
    }

    #[test]
    fn exponential_values() {
        let h = catalog::chebyshev();
        let w = exponential_weight(&h, Scalar::ratio(1, 2), Scalar::one()).unwrap();
        let v = w.eval(&ElementId::Index(4)).unwrap().to_f64();
        assert!((v - 2f64.exp()).abs() < 1e-12);
        assert!(!w.is_exact());
        assert!(exponential_weight(&h, Scalar::int(2), Scalar::one()).is_err());
    }

    #[test]
    fn table_and_scaling() {
        let h = catalog::conj_hypergroup(&catalog::named_group("s3").unwrap()).unwrap();
        let w = table_weight_by_label(
            &h,
            &[("e", Scalar::int(1)), ("T", Scalar::int(2)), ("R", Scalar::int(5))],
        )
        .unwrap();
        let tt = h
            .convolve(&h.parse_element("T").unwrap(), &h.parse_element("T").unwrap())
            .unwrap();
        assert_eq!(tt.weighted_mass(&w).unwrap(), Scalar::ratio(11, 3));
        let w2 = w.scaled(Scalar::int(2)).unwrap();
        assert_eq!(w2.eval(&h.identity()).unwrap(), Scalar::int(2));
        let other = catalog::chebyshev();
        assert!(matches!(w.check_carrier(&other), Err(HyplabError::WrongCarrier(_))));
    }

    #[test]
    fn weighted_mass_on_su2() {
        let h = catalog::su2_dual();
        let w = dimension_weight(&h, Scalar::one()).unwrap();
        let m = h.convolve(&ElementId::Index(1), &ElementId::Index(1)).unwrap();
        assert_eq!(m.weighted_mass(&w).unwrap(), Scalar::ratio(5, 2));
        assert_eq!(m.total_mass(), Scalar::one());
    }
}
