use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::error::{HyplabError, Result};

/// A dominant weight π_1 ≥ … ≥ π_n = 0 of SU(n).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DominantWeight(Vec<u32>);

impl DominantWeight {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(HyplabError::InvalidParam("dominant weights need n ≥ 2 entries".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || *parts.last().expect("nonempty") != 0 {
            return Err(HyplabError::InvalidParam(format!(
                "{parts:?} is not non-increasing with last entry 0"
            )));
        }
        Ok(DominantWeight(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// The leading entry π_1.
    pub fn top(&self) -> u32 {
        self.0[0]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    /// d_π = Π_{i<j} (π_i − π_j + j − i)/(j − i).
    pub fn dimension(&self) -> BigUint {
        let n = self.0.len();
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for i in 0..n {
            for j in i + 1..n {
                num *= (self.0[i] - self.0[j]) as u64 + (j - i) as u64;
                den *= (j - i) as u64;
            }
        }
        let (q, r) = num.div_rem(&den);
        debug_assert!(r == BigUint::default(), "Weyl product is integral");
        q
    }
}

impl fmt::Display for DominantWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All dominant weights of SU(n) with π_1 ≤ cap, graded by Σπ_i then lexicographic,
/// together with their dimensions.
pub fn su_n_dominant(n: usize, cap: u32) -> Result<Vec<(DominantWeight, BigUint)>> {
    if n < 2 {
        return Err(HyplabError::InvalidParam(format!("SU({n}) needs n ≥ 2")));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut current, 0, cap, &mut out);
    out.sort_by(|a: &DominantWeight, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
    Ok(out
        .into_iter()
        .map(|w| {
            let d = w.dimension();
            (w, d)
        })
        .collect())
}

fn fill(current: &mut Vec<u32>, i: usize, bound: u32, out: &mut Vec<DominantWeight>) {
    let n = current.len();
    if i == n - 1 {
        current[i] = 0;
        out.push(DominantWeight(current.clone()));
        return;
    }
    for v in 0..=bound {
        current[i] = v;
        fill(current, i + 1, v, out);
    }
}

/// Number of dominant weights of SU(n) with π_1 = k, namely C(k+n−2, n−2).
pub fn count_with_top(n: usize, k: u32) -> BigUint {
    // Non-increasing (π_2, …, π_{n−1}) in [0, k]: multisets of size n−2 from k+1 values.
    let r = n.saturating_sub(2) as u64;
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (k as u64 + 1 + i) / (i + 1);
    }
    acc
}
