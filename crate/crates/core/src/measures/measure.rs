use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{ElementId, Scalar};
use crate::error::{HyplabError, Result};

/// Anything that assigns a scalar to carrier points (weights, test oracles).
pub trait PointFunction {
    fn value_at(&self, x: &ElementId) -> Result<Scalar>;
}

impl<F> PointFunction for F
where
    F: Fn(&ElementId) -> Result<Scalar>,
{
    fn value_at(&self, x: &ElementId) -> Result<Scalar> {
        self(x)
    }
}

/// A finitely supported positive measure on a tagged carrier.
///
/// Terms are sorted by [`ElementId`], deduplicated, and strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMeasure {
    carrier: Arc<str>,
    terms: Vec<(ElementId, Scalar)>,
}

impl SparseMeasure {
    /// Canonicalizes `terms`: merges duplicates, drops zeros, rejects negatives.
    pub fn new(carrier: impl Into<Arc<str>>, terms: impl IntoIterator<Item = (ElementId, Scalar)>) -> Result<Self> {
        let mut merged: BTreeMap<ElementId, Scalar> = BTreeMap::new();
        for (x, c) in terms {
            match merged.get_mut(&x) {
                Some(acc) => *acc = &*acc + &c,
                None => {
                    merged.insert(x, c);
                }
            }
        }
        let mut out = Vec::with_capacity(merged.len());
        for (x, c) in merged {
            if c.is_negligible() {
                continue;
            }
            if c.is_negative() {
                return Err(HyplabError::Domain(format!("negative coefficient {c} at element {x}")));
            }
            out.push((x, c));
        }
        Ok(SparseMeasure {
            carrier: carrier.into(),
            terms: out,
        })
    }

    pub fn point(carrier: impl Into<Arc<str>>, x: ElementId) -> Self {
        SparseMeasure {
            carrier: carrier.into(),
            terms: vec![(x, Scalar::one())],
        }
    }

    pub fn carrier(&self) -> &str {
        &self.carrier
    }

    pub fn terms(&self) -> &[(ElementId, Scalar)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &ElementId> {
        self.terms.iter().map(|(x, _)| x)
    }

    pub fn coefficient(&self, x: &ElementId) -> Option<&Scalar> {
        self.terms
            .binary_search_by(|(y, _)| y.cmp(x))
            .ok()
            .map(|i| &self.terms[i].1)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_exact())
    }

    /// The single support point, if this is a point mass with coefficient 1.
    pub fn as_point(&self) -> Option<&ElementId> {
        match self.terms.as_slice() {
            [(x, c)] if c == &Scalar::one() => Some(x),
            _ => None,
        }
    }

    pub fn total_mass(&self) -> Scalar {
        Scalar::sum(self.terms.iter().map(|(_, c)| c))
    }

    /// Σ μ(t)·w(t).
    pub fn weighted_mass(&self, w: &dyn PointFunction) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (x, c) in &self.terms {
            acc = &acc + &(c * &w.value_at(x)?);
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        if !c.is_positive() {
            return Err(HyplabError::InvalidParam(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        SparseMeasure::new(self.carrier.clone(), self.terms.iter().map(|(x, a)| (x.clone(), a * c)))
    }

    pub fn add(&self, other: &SparseMeasure) -> Result<Self> {
        self.same_carrier(other)?;
        SparseMeasure::new(
            self.carrier.clone(),
            self.terms.iter().chain(other.terms.iter()).cloned(),
        )
    }

    /// Image measure under `f`; `None` from `f` is a domain error.
    pub fn pushforward<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&ElementId) -> Option<ElementId>,
    {
        let mut out = Vec::with_capacity(self.terms.len());
        for (x, c) in &self.terms {
            let y = f(x).ok_or_else(|| HyplabError::Domain(format!("pushforward map undefined at {x}")))?;
            out.push((y, c.clone()));
        }
        SparseMeasure::new(self.carrier.clone(), out)
    }

    pub(crate) fn same_carrier(&self, other: &SparseMeasure) -> Result<()> {
        if self.carrier != other.carrier {
            return Err(HyplabError::Carrier(format!(
                "measures live on different carriers: {} vs {}",
                self.carrier, other.carrier
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(x, c)| match c.num_den() {
                Some((n, d)) => json!({"elem": x.to_json(), "num": n, "den": d}),
                None => json!({"elem": x.to_json(), "value": c.to_f64()}),
            })
            .collect();
        json!({"carrier": &*self.carrier, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| HyplabError::InvalidParam(format!("measure json: {m}"));
        let carrier = v["carrier"].as_str().ok_or_else(|| bad("missing carrier"))?;
        let terms = v["terms"].as_array().ok_or_else(|| bad("missing terms"))?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let x = ElementId::from_json(&t["elem"])?;
            let c = match (&t["num"], &t["den"], &t["value"]) {
                (Value::String(n), Value::String(d), _) => Scalar::from_parts(n, d)?,
                (_, _, Value::Number(f)) => Scalar::Float(f.as_f64().unwrap_or(f64::NAN)),
                _ => return Err(bad("term needs num/den or value")),
            };
            out.push((x, c));
        }
        SparseMeasure::new(carrier, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(i: u64) -> ElementId {
        ElementId::Index(i)
    }

    #[test]
    fn canonical_construction() {
        let a = SparseMeasure::new(
            "t",
            vec![
                (idx(2), Scalar::ratio(1, 4)),
                (idx(0), Scalar::zero()),
                (idx(2), Scalar::ratio(1, 4)),
                (idx(1), Scalar::ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.terms()[0].0, idx(1));
        assert_eq!(a.coefficient(&idx(2)), Some(&Scalar::ratio(1, 2)));
        assert_eq!(a.total_mass(), Scalar::one());
    }

    #[test]
    fn negative_rejected() {
        assert!(SparseMeasure::new("t", vec![(idx(0), Scalar::int(-1))]).is_err());
    }

    #[test]
    fn float_zero_threshold() {
        let m = SparseMeasure::new("t", vec![(idx(0), Scalar::Float(1e-16)), (idx(1), Scalar::Float(1.0))]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn merge_and_scale() {
        let h = SparseMeasure::new("t", vec![(idx(0), Scalar::ratio(1, 2))]).unwrap();
        let s = h.add(&h).unwrap();
        assert_eq!(s, SparseMeasure::point("t", idx(0)));
        assert_eq!(s.scale(&Scalar::one()).unwrap(), s);
        assert!(s.scale(&Scalar::zero()).is_err());
    }

    #[test]
    fn carriers_must_match() {
        let a = SparseMeasure::point("a", idx(0));
        let b = SparseMeasure::point("b", idx(0));
        assert!(matches!(a.add(&b), Err(HyplabError::Carrier(_))));
    }

    #[test]
    fn pushforward_partial_map() {
        let m = SparseMeasure::new("t", vec![(idx(0), Scalar::ratio(1, 2)), (idx(1), Scalar::ratio(1, 2))]).unwrap();
        let collapsed = m.pushforward(|_| Some(idx(5))).unwrap();
        assert_eq!(collapsed, SparseMeasure::point("t", idx(5)));
        assert!(m.pushforward(|x| (x == &idx(0)).then(|| idx(0))).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = SparseMeasure::new(
            "su2hat",
            vec![(idx(0), Scalar::ratio(1, 4)), (idx(2), Scalar::ratio(3, 4))],
        )
        .unwrap();
        let v = m.to_json();
        assert_eq!(v["terms"][1]["num"], "3");
        assert_eq!(SparseMeasure::from_json(&v).unwrap(), m);
    }

    #[test]
    fn weighted_mass_with_closure() {
        let m = SparseMeasure::new("t", vec![(idx(0), Scalar::ratio(1, 4)), (idx(2), Scalar::ratio(3, 4))]).unwrap();
        let w = |x: &ElementId| Ok(Scalar::int(x.index().unwrap() as i64 + 1));
        assert_eq!(m.weighted_mass(&w).unwrap(), Scalar::ratio(5, 2));
    }
}
