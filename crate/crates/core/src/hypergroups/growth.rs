use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::Hypergroup;
use crate::error::{HyplabError, Result};
use crate::measures::ElementId;

/// A bound `size(n) ≤ constant · n^exponent` for n ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerBound {
    pub constant: f64,
    pub exponent: u32,
}

impl PowerBound {
    pub fn holds(&self, n: usize, size: usize) -> bool {
        size as f64 <= self.constant * (n as f64).powi(self.exponent as i32) * (1.0 + 1e-12)
    }
}

/// Closed-form growth of balls and level sets for a known generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthLaw {
    pub ball: PowerBound,
    /// Bound on the number of points with τ = n.
    pub level: PowerBound,
    /// The level bound is attained with equality at every n ≥ 1.
    pub level_exact: bool,
    pub formula: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    /// |F^{*n}| for n = 0..=N.
    pub ball_sizes: Vec<usize>,
    /// Number of points with τ = n.
    pub level_sizes: Vec<usize>,
    /// Least-squares slope of ln|F^{*n}| against ln n over n ≥ 1.
    pub fitted_slope: f64,
    pub ball: PowerBound,
    pub level: PowerBound,
    /// Every sampled n ≥ 1 satisfies both bounds.
    pub certificate_holds: bool,
    pub law: Option<GrowthLaw>,
}

impl GrowthProfile {
    /// The level bound to use for tails: the closed form when known, else the fit.
    pub fn tail_level_bound(&self) -> (PowerBound, bool) {
        match &self.law {
            Some(l) => (l.level, true),
            None => (self.level, false),
        }
    }

    pub fn ball_bound(&self) -> (PowerBound, bool) {
        match &self.law {
            Some(l) => (l.ball, true),
            None => (self.ball, false),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TauComparison {
    pub samples: usize,
    /// min τ_F / τ_F' over non-identity samples.
    pub lower: f64,
    /// max τ_F / τ_F' over non-identity samples.
    pub upper: f64,
}

pub(crate) struct BallCache {
    nested: bool,
    /// Nested mode: level sets; otherwise full balls.
    levels: Vec<Vec<ElementId>>,
    first_level: HashMap<ElementId, usize>,
    ball_sizes: Vec<usize>,
    level_sizes: Vec<usize>,
    stalled: bool,
}

impl BallCache {
    pub(crate) fn new(e: ElementId, nested: bool) -> Self {
        let mut first_level = HashMap::new();
        first_level.insert(e.clone(), 0);
        BallCache {
            nested,
            levels: vec![vec![e]],
            first_level,
            ball_sizes: vec![1],
            level_sizes: vec![1],
            stalled: false,
        }
    }

    fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    fn grow(&mut self, h: &Hypergroup, f: &[ElementId]) {
        let frontier = self.levels.last().expect("level 0 present");
        let mut next = BTreeSet::new();
        for x in frontier {
            for g in f {
                for t in h.rule().support(x, g) {
                    if !self.nested || !self.first_level.contains_key(&t) {
                        next.insert(t);
                    }
                }
            }
        }
        let n = self.levels.len();
        let mut fresh = 0;
        for t in &next {
            if !self.first_level.contains_key(t) {
                self.first_level.insert(t.clone(), n);
                fresh += 1;
            }
        }
        let next: Vec<ElementId> = next.into_iter().collect();
        if self.nested {
            self.stalled = next.is_empty();
            self.ball_sizes.push(self.ball_sizes[n - 1] + next.len());
        } else {
            self.stalled = &next == frontier;
            self.ball_sizes.push(next.len());
        }
        self.level_sizes.push(fresh);
        self.levels.push(next);
    }
}

impl Hypergroup {
    fn require_generator(&self) -> Result<Vec<ElementId>> {
        self.generator().map(|f| f.to_vec()).ok_or(HyplabError::NoGenerator)
    }

    fn ensure_depth(&self, n: usize) -> Result<()> {
        let f = self.require_generator()?;
        if self.inner.balls.read().unwrap().depth() >= n {
            return Ok(());
        }
        let mut cache = self.inner.balls.write().unwrap();
        while cache.depth() < n {
            cache.grow(self, &f);
        }
        Ok(())
    }

    /// F^{*n} as a sorted support set; ball(0) = {e}.
    pub fn ball(&self, n: usize) -> Result<Vec<ElementId>> {
        self.ensure_depth(n)?;
        let cache = self.inner.balls.read().unwrap();
        if cache.nested {
            let mut out: Vec<ElementId> = cache.levels[..=n].iter().flatten().cloned().collect();
            out.sort();
            Ok(out)
        } else {
            Ok(cache.levels[n].clone())
        }
    }

    pub fn ball_size(&self, n: usize) -> Result<usize> {
        self.ensure_depth(n)?;
        Ok(self.inner.balls.read().unwrap().ball_sizes[n])
    }

    /// τ_F(x): least n with x ∈ F^{*n}.
    pub fn tau(&self, x: &ElementId) -> Result<usize> {
        let f = self.require_generator()?;
        self.check_member(x)?;
        if let Some(n) = self.inner.balls.read().unwrap().first_level.get(x) {
            return Ok(*n);
        }
        let mut cache = self.inner.balls.write().unwrap();
        loop {
            if let Some(n) = cache.first_level.get(x) {
                return Ok(*n);
            }
            if cache.stalled || cache.depth() >= self.ball_cap() {
                return Err(HyplabError::NotGenerated(self.label(x), cache.depth()));
            }
            cache.grow(self, &f);
        }
    }

    /// Ball sizes for n = 0..=N with a fitted power bound and its per-sample check.
    pub fn growth_profile(&self, n_max: usize) -> Result<GrowthProfile> {
        self.ensure_depth(n_max)?;
        let cache = self.inner.balls.read().unwrap();
        let ball_sizes = cache.ball_sizes[..=n_max].to_vec();
        let level_sizes = cache.level_sizes[..=n_max].to_vec();
        drop(cache);
        let (fitted_slope, ball) = fit_power(&ball_sizes);
        let (_, level) = fit_power(&level_sizes);
        let certificate_holds = (1..=n_max).all(|n| ball.holds(n, ball_sizes[n]) && level.holds(n, level_sizes[n]));
        Ok(GrowthProfile {
            ball_sizes,
            level_sizes,
            fitted_slope,
            ball,
            level,
            certificate_holds,
            law: self.growth_law(),
        })
    }
}

/// Least-squares slope on log-log data, rounded up to an integer exponent,
/// with the smallest constant making the bound hold on every sample n ≥ 1.
fn fit_power(sizes: &[usize]) -> (f64, PowerBound) {
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &s)| s > 0)
        .map(|(n, &s)| ((n as f64).ln(), (s as f64).ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let exponent = (slope - 1e-6).ceil().max(0.0) as u32;
    let constant = sizes
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &s)| s as f64 / (n as f64).powi(exponent as i32))
        .fold(0.0_f64, f64::max);
    (slope, PowerBound { constant, exponent })
}

/// Two-sided linear comparison of word lengths for two generators.
pub fn tau_comparison(a: &Hypergroup, b: &Hypergroup, samples: usize) -> Result<TauComparison> {
    if a.carrier() != b.carrier() {
        return Err(HyplabError::Carrier("word lengths on different carriers".into()));
    }
    let mut lower = f64::INFINITY;
    let mut upper = 0.0_f64;
    let e = a.identity();
    for x in a.elements(samples) {
        if x == e {
            continue;
        }
        let r = a.tau(&x)? as f64 / b.tau(&x)? as f64;
        lower = lower.min(r);
        upper = upper.max(r);
    }
    Ok(TauComparison { samples, lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn chebyshev_balls() {
        let h = catalog::chebyshev();
        assert_eq!(h.ball(0).unwrap(), vec![ElementId::Index(0)]);
        for n in 0..50 {
            assert_eq!(h.ball_size(n).unwrap(), n + 1);
            assert_eq!(h.tau(&ElementId::Index(n as u64)).unwrap(), n);
        }
        let p = h.growth_profile(100).unwrap();
        assert_eq!(p.ball.exponent, 1);
        assert_eq!(p.ball.constant, 2.0);
        assert_eq!(p.level.exponent, 0);
        assert_eq!(p.level.constant, 1.0);
        assert!(p.certificate_holds);
    }

    #[test]
    fn missing_generator() {
        let h = catalog::chebyshev().without_generator();
        assert!(matches!(h.tau(&ElementId::Index(3)), Err(HyplabError::NoGenerator)));
    }

    #[test]
    fn finite_carrier_stalls() {
        let s3 = catalog::conj_hypergroup(&catalog::named_group("s3").unwrap()).unwrap();
        let t = s3.parse_element("T").unwrap();
        let r = s3.parse_element("R").unwrap();
        let h = s3.with_generator(vec![s3.identity(), t]).unwrap();
        assert_eq!(h.tau(&r).unwrap(), 2);
        let only_e = s3.with_generator(vec![s3.identity()]).unwrap();
        assert!(matches!(only_e.tau(&r), Err(HyplabError::NotGenerated(..))));
    }

    #[test]
    fn ball_cap_is_reported() {
        let h = catalog::chebyshev().with_ball_cap(10);
        assert!(matches!(
            h.tau(&ElementId::Index(50)),
            Err(HyplabError::NotGenerated(_, 10))
        ));
    }

    #[test]
    fn comparison_of_generators() {
        let a = catalog::chebyshev();
        let b = a
            .with_generator(vec![ElementId::Index(0), ElementId::Index(1), ElementId::Index(2)])
            .unwrap();
        let c = tau_comparison(&a, &b, 60).unwrap();
        assert_eq!(c.upper, 2.0);
        assert_eq!(c.lower, 1.0);
    }
}
