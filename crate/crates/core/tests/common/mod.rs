//! Independent oracles: brute-force group arithmetic, character identities and closed forms.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use hyplab::catalog::GroupTable;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Conjugacy classes by orbit closure under g x g⁻¹, sorted by smallest member.
pub fn classes_by_orbits(g: &GroupTable) -> Vec<Vec<u32>> {
    let n = g.order() as u32;
    let mut seen = vec![false; n as usize];
    let mut out = vec![];
    for x in 0..n {
        if seen[x as usize] {
            continue;
        }
        let mut orbit: Vec<u32> = (0..n).map(|a| g.mul(g.mul(a, x), g.inv(a))).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            seen[y as usize] = true;
        }
        out.push(orbit);
    }
    out
}

/// δ_C * δ_D by pair counting: the coefficient of E is |E|·#{(a,b) ∈ C×D : ab = e₀}/(|C||D|).
pub fn class_product(g: &GroupTable, c: &[u32], d: &[u32], classes: &[Vec<u32>]) -> Vec<BigRational> {
    classes
        .iter()
        .map(|e| {
            let target = e[0];
            let count = c
                .iter()
                .flat_map(|&a| d.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| g.mul(a, b) == target)
                .count() as i64;
            q(count * e.len() as i64, (c.len() * d.len()) as i64)
        })
        .collect()
}

/// max over sample angles of |cos(nθ)cos(mθ) − Σ_k c_k cos(kθ)|.
pub fn chebyshev_product_numeric(n: u64, m: u64, coeffs: &[(u64, f64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 1..=37 {
        let theta = 0.0853 * i as f64;
        let lhs = (n as f64 * theta).cos() * (m as f64 * theta).cos();
        let rhs: f64 = coeffs.iter().map(|&(k, c)| c * (k as f64 * theta).cos()).sum();
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Character of the (ℓ+1)-dimensional SU(2) representation at angle θ.
pub fn su2_character(l: u64, theta: f64) -> f64 {
    ((l as f64 + 1.0) * theta).sin() / theta.sin()
}

/// max over sample angles of |φ_ℓ φ_ℓ′ − Σ_r c_r φ_r| with φ_ℓ = χ_ℓ/(ℓ+1).
pub fn su2_product_numeric(l: u64, lp: u64, coeffs: &[(u64, f64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 1..=29 {
        let theta = 0.1031 * i as f64;
        let phi = |k: u64| su2_character(k, theta) / (k as f64 + 1.0);
        let lhs = phi(l) * phi(lp);
        let rhs: f64 = coeffs.iter().map(|&(r, c)| c * phi(r)).sum();
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Weyl dimension of the SU(3) representation with highest weight λ = (λ₁, λ₂, λ₃).
pub fn su3_dimension(l: [u32; 3]) -> u64 {
    let a = (l[0] - l[1]) as u64;
    let b = (l[1] - l[2]) as u64;
    (a + 1) * (b + 1) * (a + b + 2) / 2
}

/// Dominant SU(3) weights (λ₁ ≥ λ₂ ≥ λ₃ = 0) with λ₁ = k.
pub fn su3_count_top(k: u32) -> u64 {
    (0..=k).count() as u64
}

/// Σ_{n≥0} (1+n)^{-2} = π²/6.
pub fn basel() -> f64 {
    std::f64::consts::PI.powi(2) / 6.0
}

/// K = (β²/(Cα(1−α)))^{1/α} for α = 1/m, integer β and C, as an exact integer.
pub fn exp_k_unit_fraction(m: u32, c: u64, beta: u64) -> Option<u64> {
    // Cα(1−α) = C(m−1)/m², so β²/(Cα(1−α)) = β²m²/(C(m−1)).
    let num = beta * beta * (m as u64) * (m as u64);
    let den = c * (m as u64 - 1);
    num.is_multiple_of(den).then(|| (num / den).pow(m))
}

/// Σ₂ over r = from, from+2, …, to.
pub fn step2<T: std::iter::Sum<T>>(from: i64, to: i64, f: impl Fn(i64) -> T) -> T {
    (0..).map(|i| from + 2 * i).take_while(|&r| r <= to).map(f).sum()
}

/// Exact double sums for the rearrangement identity with σ(r) = 1 (r ≥ 0), (1−r)^β (r < 0).
pub fn sigma_beta(beta: u32, r: i64) -> BigInt {
    if r >= 0 {
        BigInt::from(1)
    } else {
        BigInt::from(1 - r).pow(beta)
    }
}

pub fn rearrangement_sides(beta: u32, m: i64, n: i64) -> (BigInt, BigInt) {
    let lhs = step2(-m, m, |t| step2(-n, n, |s| sigma_beta(beta, t + s)));
    let rhs = step2((n - m).abs(), n + m, |t| step2(-t, t, |s| sigma_beta(beta, s)));
    (lhs, rhs)
}

/// Frequency table of a slice.
pub fn tally<T: Ord + Clone>(xs: &[T]) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x.clone()).or_insert(0) += 1;
    }
    m
}
