//! The hypergroup abstraction: rules, the shared handle, Haar measure,
//! balls and word length, restricted products and the axiom verifier.

mod axioms;
mod growth;
mod product;
mod table;

use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde_json::Value;

pub use axioms::{check_axioms, check_haar_invariance, Axiom, AxiomCheck, AxiomReport, AxiomWitness};
pub use growth::{tau_comparison, GrowthLaw, GrowthProfile, PowerBound, TauComparison};
pub(crate) use product::restricted_product_family;
pub use product::{restricted_product, RestrictedProduct, SlotFamily, Slots};
pub use table::TableHypergroup;

use crate::error::{HyplabError, Result};
use crate::measures::{ElementId, Scalar, SparseMeasure};
use growth::BallCache;

/// Default number of elements used for associativity triples.
pub const DEFAULT_ASSOCIATIVITY_CAP: usize = 25;
/// Default number of ball levels explored before giving up on τ.
pub const DEFAULT_BALL_CAP: usize = 10_000;

const CONVOLUTION_CACHE_LIMIT: usize = 1 << 18;
const RANK_SEARCH_LIMIT: usize = 1 << 20;

/// A concrete convolution rule. Implementations are immutable.
pub trait HypergroupRule: Send + Sync + 'static {
    /// Tag attached to every measure on this carrier.
    fn carrier(&self) -> &str;
    fn identity(&self) -> ElementId;
    fn contains(&self, x: &ElementId) -> bool;
    /// Only called on members of the carrier.
    fn involution(&self, x: &ElementId) -> ElementId;
    /// Raw coefficients of δ_x * δ_y, before positivity is enforced.
    fn convolve_terms(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, Scalar)>;

    fn convolve_float(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, f64)> {
        self.convolve_terms(x, y)
            .into_iter()
            .map(|(t, c)| (t, c.to_f64()))
            .collect()
    }

    /// Support of δ_x * δ_y.
    fn support(&self, x: &ElementId, y: &ElementId) -> Vec<ElementId> {
        self.convolve_terms(x, y)
            .into_iter()
            .filter(|(_, c)| !c.is_negligible())
            .map(|(t, _)| t)
            .collect()
    }

    /// Number of carrier points, `None` when infinite.
    fn size(&self) -> Option<usize>;
    /// First `n` carrier points in the fixed enumeration order.
    fn enumerate(&self, n: usize) -> Vec<ElementId>;
    /// Position in the enumeration, when cheaply known.
    fn rank_of(&self, _x: &ElementId) -> Option<usize> {
        None
    }
    fn is_commutative(&self) -> bool;
    fn label(&self, x: &ElementId) -> String {
        x.to_string()
    }
    fn parse_label(&self, _s: &str) -> Option<ElementId> {
        None
    }
    /// Closed-form ball growth for the given generator, if known.
    fn growth_law(&self, _generator: &[ElementId]) -> Option<GrowthLaw> {
        None
    }
    /// Whether convolutions are worth memoizing.
    fn memoize(&self) -> bool {
        false
    }
    fn describe(&self) -> Value;
    fn as_any(&self) -> &dyn Any;
}

struct Inner {
    rule: Arc<dyn HypergroupRule>,
    generator: Option<Vec<ElementId>>,
    ball_cap: usize,
    associativity_cap: usize,
    balls: RwLock<BallCache>,
    prefix: RwLock<Arc<Vec<ElementId>>>,
    ranks: RwLock<HashMap<ElementId, usize>>,
    conv_cache: RwLock<HashMap<(ElementId, ElementId), SparseMeasure>>,
}

/// Shared, thread-safe handle on a hypergroup rule plus its memo tables.
#[derive(Clone)]
pub struct Hypergroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for Hypergroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergroup")
            .field("carrier", &self.carrier())
            .field("generator", &self.inner.generator)
            .finish()
    }
}

impl Hypergroup {
    pub fn new(rule: impl HypergroupRule) -> Self {
        Self::from_arc(Arc::new(rule), None)
    }

    fn from_arc(rule: Arc<dyn HypergroupRule>, generator: Option<Vec<ElementId>>) -> Self {
        let nested = generator.as_ref().map(|f| f.contains(&rule.identity())).unwrap_or(true);
        Hypergroup {
            inner: Arc::new(Inner {
                balls: RwLock::new(BallCache::new(rule.identity(), nested)),
                rule,
                generator,
                ball_cap: DEFAULT_BALL_CAP,
                associativity_cap: DEFAULT_ASSOCIATIVITY_CAP,
                prefix: RwLock::new(Arc::new(Vec::new())),
                ranks: RwLock::new(HashMap::new()),
                conv_cache: RwLock::new(HashMap::new()),
            }),
        }
    }

    fn rebuild(&self, generator: Option<Vec<ElementId>>, ball_cap: usize, assoc: usize) -> Self {
        let mut h = Self::from_arc(self.inner.rule.clone(), generator);
        let inner = Arc::get_mut(&mut h.inner).expect("fresh handle");
        inner.ball_cap = ball_cap;
        inner.associativity_cap = assoc;
        h
    }

    /// Attaches a finite symmetric generator set F (needed for τ_F and balls).
    pub fn with_generator(&self, generator: Vec<ElementId>) -> Result<Self> {
        if generator.is_empty() {
            return Err(HyplabError::InvalidParam("empty generator set".into()));
        }
        let mut f = generator;
        f.sort();
        f.dedup();
        for x in &f {
            self.check_member(x)?;
            let inv = self.involution(x)?;
            if f.binary_search(&inv).is_err() {
                return Err(HyplabError::InvalidParam(format!(
                    "generator set is not symmetric: involution of {} missing",
                    self.label(x)
                )));
            }
        }
        Ok(self.rebuild(Some(f), self.inner.ball_cap, self.inner.associativity_cap))
    }

    pub fn without_generator(&self) -> Self {
        self.rebuild(None, self.inner.ball_cap, self.inner.associativity_cap)
    }

    pub fn with_ball_cap(&self, cap: usize) -> Self {
        self.rebuild(self.inner.generator.clone(), cap.max(1), self.inner.associativity_cap)
    }

    pub fn with_associativity_cap(&self, cap: usize) -> Self {
        self.rebuild(self.inner.generator.clone(), self.inner.ball_cap, cap)
    }

    pub fn rule(&self) -> &dyn HypergroupRule {
        &*self.inner.rule
    }

    /// Downcast to a concrete rule type.
    pub fn rule_as<T: 'static>(&self) -> Option<&T> {
        self.inner.rule.as_any().downcast_ref::<T>()
    }

    pub fn carrier(&self) -> &str {
        self.inner.rule.carrier()
    }

    pub fn identity(&self) -> ElementId {
        self.inner.rule.identity()
    }

    pub fn generator(&self) -> Option<&[ElementId]> {
        self.inner.generator.as_deref()
    }

    pub fn associativity_cap(&self) -> usize {
        self.inner.associativity_cap
    }

    pub fn ball_cap(&self) -> usize {
        self.inner.ball_cap
    }

    pub fn size(&self) -> Option<usize> {
        self.inner.rule.size()
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    pub fn is_commutative(&self) -> bool {
        self.inner.rule.is_commutative()
    }

    pub fn contains(&self, x: &ElementId) -> bool {
        self.inner.rule.contains(x)
    }

    pub fn label(&self, x: &ElementId) -> String {
        self.inner.rule.label(x)
    }

    pub fn describe(&self) -> Value {
        let mut v = self.inner.rule.describe();
        if let (Some(f), Value::Object(map)) = (&self.inner.generator, &mut v) {
            map.insert(
                "generator".into(),
                Value::Array(f.iter().map(|x| Value::String(self.label(x))).collect()),
            );
        }
        v
    }

    pub fn growth_law(&self) -> Option<GrowthLaw> {
        self.generator().and_then(|f| self.inner.rule.growth_law(f))
    }

    /// Resolves a user-facing label, an integer, or an element id in JSON form.
    pub fn parse_element(&self, s: &str) -> Result<ElementId> {
        let s = s.trim();
        let x = match self.inner.rule.parse_label(s) {
            Some(x) => x,
            None => match serde_json::from_str::<Value>(s) {
                Ok(v) => ElementId::from_json(&v)?,
                Err(_) => {
                    return Err(HyplabError::Carrier(format!(
                        "unknown element {s:?} in {}",
                        self.carrier()
                    )))
                }
            },
        };
        self.check_member(&x)?;
        Ok(x)
    }

    pub(crate) fn check_member(&self, x: &ElementId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(HyplabError::Carrier(format!(
                "{x} is not in carrier {}",
                self.carrier()
            )))
        }
    }

    pub fn involution(&self, x: &ElementId) -> Result<ElementId> {
        self.check_member(x)?;
        Ok(self.inner.rule.involution(x))
    }

    /// δ_x * δ_y.
    pub fn convolve(&self, x: &ElementId, y: &ElementId) -> Result<SparseMeasure> {
        self.check_member(x)?;
        self.check_member(y)?;
        let memo = self.inner.rule.memoize();
        if memo {
            let key = (x.clone(), y.clone());
            if let Some(m) = self.inner.conv_cache.read().unwrap().get(&key) {
                return Ok(m.clone());
            }
        }
        let m = SparseMeasure::new(self.carrier(), self.inner.rule.convolve_terms(x, y))
            .map_err(|e| HyplabError::Axiom(format!("convolution of {x} and {y}: {e}")))?;
        if memo {
            let mut cache = self.inner.conv_cache.write().unwrap();
            if cache.len() < CONVOLUTION_CACHE_LIMIT {
                cache.insert((x.clone(), y.clone()), m.clone());
            }
        }
        Ok(m)
    }

    /// Float coefficients of δ_x * δ_y (fast path for scans).
    pub fn convolve_float(&self, x: &ElementId, y: &ElementId) -> Result<Vec<(ElementId, f64)>> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.inner.rule.convolve_float(x, y))
    }

    pub fn support(&self, x: &ElementId, y: &ElementId) -> Result<Vec<ElementId>> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.inner.rule.support(x, y))
    }

    /// Bilinear extension of the point convolution.
    pub fn convolve_measures(&self, mu: &SparseMeasure, nu: &SparseMeasure) -> Result<SparseMeasure> {
        for m in [mu, nu] {
            if m.carrier() != self.carrier() {
                return Err(HyplabError::Carrier(format!(
                    "measure on {} used with {}",
                    m.carrier(),
                    self.carrier()
                )));
            }
        }
        let mut terms = Vec::new();
        for (x, a) in mu.terms() {
            for (y, b) in nu.terms() {
                let ab = a * b;
                for (t, c) in self.convolve(x, y)?.terms() {
                    terms.push((t.clone(), &ab * c));
                }
            }
        }
        SparseMeasure::new(self.carrier(), terms)
    }

    pub fn point(&self, x: &ElementId) -> Result<SparseMeasure> {
        self.check_member(x)?;
        Ok(SparseMeasure::point(self.carrier(), x.clone()))
    }

    /// h(x) = 1 / (δ_x̌ * δ_x)(e).
    pub fn haar(&self, x: &ElementId) -> Result<Scalar> {
        let inv = self.involution(x)?;
        let m = self.convolve(&inv, x)?;
        let e = self.identity();
        match m.coefficient(&e) {
            Some(c) => c.recip(),
            None => Err(HyplabError::Axiom(format!(
                "identity not in the support of the convolution of {} with its involution",
                self.label(x)
            ))),
        }
    }

    /// The first `n` elements of the fixed enumeration (fewer for small finite carriers).
    pub fn elements(&self, n: usize) -> Vec<ElementId> {
        let p = self.prefix(n);
        p[..n.min(p.len())].to_vec()
    }

    fn prefix(&self, n: usize) -> Arc<Vec<ElementId>> {
        {
            let p = self.inner.prefix.read().unwrap();
            let exhausted = self.size().map(|s| p.len() >= s).unwrap_or(false);
            if p.len() >= n || exhausted {
                return p.clone();
            }
        }
        let mut p = self.inner.prefix.write().unwrap();
        if p.len() < n {
            let want = n.max(p.len() * 2).max(16);
            let want = self.size().map(|s| want.min(s)).unwrap_or(want);
            *p = Arc::new(self.inner.rule.enumerate(want));
        }
        p.clone()
    }

    /// Enumeration position of `x`.
    pub fn rank(&self, x: &ElementId) -> Option<usize> {
        if let Some(r) = self.inner.rule.rank_of(x) {
            return Some(r);
        }
        if !self.contains(x) {
            return None;
        }
        if let Some(r) = self.inner.ranks.read().unwrap().get(x) {
            return Some(*r);
        }
        let mut n = 64;
        loop {
            let p = self.prefix(n);
            if let Some(pos) = p.iter().position(|y| y == x) {
                let mut ranks = self.inner.ranks.write().unwrap();
                for (i, y) in p.iter().enumerate() {
                    ranks.entry(y.clone()).or_insert(i);
                }
                return Some(pos);
            }
            let exhausted = p.len() < n;
            if exhausted || n >= RANK_SEARCH_LIMIT {
                return None;
            }
            n *= 4;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn chebyshev_convolution_and_measures() {
        let h = catalog::chebyshev();
        let one = ElementId::Index(1);
        let m = h.convolve(&one, &one).unwrap();
        let expect = SparseMeasure::new(
            "chebyshev",
            vec![
                (ElementId::Index(0), Scalar::ratio(1, 2)),
                (ElementId::Index(2), Scalar::ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(m, expect);
        let m3 = h.convolve_measures(&m, &h.point(&one).unwrap()).unwrap();
        let expect3 = SparseMeasure::new(
            "chebyshev",
            vec![
                (ElementId::Index(1), Scalar::ratio(3, 4)),
                (ElementId::Index(3), Scalar::ratio(1, 4)),
            ],
        )
        .unwrap();
        assert_eq!(m3, expect3);
        let e = h.point(&ElementId::Index(0)).unwrap();
        assert_eq!(h.convolve_measures(&e, &m3).unwrap(), m3);
    }

    #[test]
    fn carrier_errors() {
        let h = catalog::su2_dual();
        assert!(matches!(
            h.convolve(&ElementId::Tuple(vec![1]), &ElementId::Index(0)),
            Err(HyplabError::Carrier(_))
        ));
        let other = SparseMeasure::point("chebyshev", ElementId::Index(0));
        assert!(h.convolve_measures(&other, &other).is_err());
    }

    #[test]
    fn generator_must_be_symmetric() {
        let g = catalog::named_group("s3").unwrap();
        let h = catalog::conj_hypergroup(&g).unwrap();
        assert!(h.with_generator(vec![ElementId::Index(0), ElementId::Index(1)]).is_ok());
        let z3 = catalog::conj_hypergroup(&catalog::GroupTable::cyclic(3).unwrap()).unwrap();
        assert!(z3.with_generator(vec![ElementId::Index(1)]).is_err());
    }

    #[test]
    fn enumeration_and_rank() {
        let h = catalog::chebyshev();
        let els = h.elements(5);
        assert_eq!(els, (0..5).map(ElementId::Index).collect::<Vec<_>>());
        assert_eq!(h.rank(&ElementId::Index(17)), Some(17));
        let s3 = catalog::conj_hypergroup(&catalog::named_group("s3").unwrap()).unwrap();
        assert_eq!(s3.elements(10).len(), 3);
    }
}
