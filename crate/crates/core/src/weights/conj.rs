use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::{power_of, table_weight, Weight, WeightKind};
use crate::catalog::{as_conj, conj_quotient, group_convolve, GroupTable};
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, RestrictedProduct};
use crate::measures::{ElementId, Scalar};

fn class_index(h: &Hypergroup, x: &ElementId) -> Result<usize> {
    h.check_member(x)?;
    Ok(x.index().expect("class id") as usize)
}

/// ω(C) = |C|.
pub fn cardinality_weight(h: &Hypergroup) -> Result<Weight> {
    let sizes: Vec<usize> = {
        let data = as_conj(h)?.class_data();
        (0..data.len()).map(|c| data.size(c)).collect()
    };
    let hh = h.clone();
    Ok(Weight::build(
        "cardinality",
        json!({}),
        true,
        Some(h.carrier()),
        WeightKind::Cardinality,
        move |x| Ok(Scalar::int(sizes[class_index(&hh, x)?] as i64)),
    ))
}

/// Exhaustive check that σ > 0 and σ(xy) ≤ σ(x)σ(y) on a finite group.
pub fn check_group_weight(g: &GroupTable, sigma: &[Scalar]) -> Result<()> {
    if sigma.len() != g.order() {
        return Err(HyplabError::LengthMismatch(format!(
            "{} group weight values for a group of order {}",
            sigma.len(),
            g.order()
        )));
    }
    if let Some(x) = sigma.iter().position(|v| !v.is_positive()) {
        return Err(HyplabError::GroupWeight(format!(
            "σ({}) is not positive",
            g.element_name(x as u32)
        )));
    }
    let m = g.order() as u32;
    for x in 0..m {
        for y in 0..m {
            let xy = g.mul(x, y);
            let bound = &sigma[x as usize] * &sigma[y as usize];
            if sigma[xy as usize].exceeds(&bound, crate::measures::DEFAULT_TOLERANCE) {
                return Err(HyplabError::GroupWeight(format!(
                    "σ({}·{}) = {} > {}",
                    g.element_name(x),
                    g.element_name(y),
                    sigma[xy as usize],
                    bound
                )));
            }
        }
    }
    Ok(())
}

/// ω_σ(C) = |C|⁻¹ Σ_{t∈C} σ(t) for a group weight σ, listed by element index.
pub fn mean_weight(h: &Hypergroup, sigma: Vec<Scalar>) -> Result<Weight> {
    let conj = as_conj(h)?;
    check_group_weight(conj.group(), &sigma)?;
    let data = conj.class_data();
    let values: Vec<Scalar> = data
        .classes()
        .iter()
        .map(|members| {
            let total = Scalar::sum(members.iter().map(|&t| &sigma[t as usize]));
            &total / &Scalar::int(members.len() as i64)
        })
        .collect();
    let exact = sigma.iter().all(Scalar::is_exact);
    let hh = h.clone();
    Ok(Weight::build(
        "mean",
        json!({"sigma": sigma.iter().map(|v| v.to_string()).collect::<Vec<_>>()}),
        exact,
        Some(h.carrier()),
        WeightKind::Mean,
        move |x| Ok(values[class_index(&hh, x)?].clone()),
    ))
}

/// σ_ω(x) = ω(C_x), listed by group element index.
pub fn sigma_from_central(h: &Hypergroup, w: &Weight) -> Result<Vec<Scalar>> {
    let conj = as_conj(h)?;
    w.check_carrier(h)?;
    (0..conj.group().order() as u32)
        .map(|x| w.eval(&conj.class_id(x)))
        .collect()
}

/// ω_α(C) = (1 + Σ_{slots i with C_i ≠ e} |C_i|)^α on a restricted product of Conj(G_i).
pub fn omega_alpha_weight(h: &Hypergroup, alpha: Scalar) -> Result<Weight> {
    let rp = h
        .rule_as::<RestrictedProduct>()
        .ok_or_else(|| HyplabError::WrongCarrier(format!("{} is not a restricted product", h.carrier())))?;
    for c in rp.distinct_components() {
        as_conj(c).map_err(|_| {
            HyplabError::WrongCarrier(format!("component {} is not a conjugacy-class hypergroup", c.carrier()))
        })?;
    }
    if !alpha.is_positive() {
        return Err(HyplabError::InvalidParam("α must be positive".into()));
    }
    let hh = h.clone();
    let size_sum = move |x: &ElementId| -> Result<u64> {
        hh.check_member(x)?;
        let rp = hh.rule_as::<RestrictedProduct>().expect("checked");
        let mut total = 1u64;
        for (slot, c) in x.slots().expect("product id") {
            let comp = rp.component(*slot).expect("member");
            let data = as_conj(comp)?.class_data();
            total += data.size(c.index().expect("class id") as usize) as u64;
        }
        Ok(total)
    };
    let exact = super::nonnegative_integer(&alpha).is_some();
    let (a, af) = (alpha.clone(), alpha.to_f64());
    let s2 = size_sum.clone();
    Ok(Weight::build(
        "omega_alpha",
        json!({"alpha": alpha.to_string()}),
        exact,
        Some(h.carrier()),
        WeightKind::OmegaAlpha { alpha },
        move |x| Ok(power_of(size_sum(x)?, &a)),
    )
    .with_fast(move |x| Ok((s2(x)? as f64).powf(af))))
}

/// ω'(y) = min{ω(x) : φ(x) = y} for a surjective homomorphism φ of finite hypergroups,
/// given as the full list of pairs (x, φ(x)).
pub fn push_forward_weight(
    source: &Hypergroup,
    target: &Hypergroup,
    map: &[(ElementId, ElementId)],
    w: &Weight,
    delta: &Scalar,
) -> Result<Weight> {
    let n = source.size().ok_or_else(|| {
        HyplabError::UnboundedFiber(format!("fibers over infinite {} cannot be exhausted", source.carrier()))
    })?;
    let m = target
        .size()
        .ok_or_else(|| HyplabError::UnboundedFiber(format!("infinite target {}", target.carrier())))?;
    w.check_carrier(source)?;
    if !delta.is_positive() {
        return Err(HyplabError::InvalidParam("the lower bound δ must be positive".into()));
    }
    let phi: HashMap<ElementId, ElementId> = map.iter().cloned().collect();
    let src = source.elements(n);
    for x in &src {
        let y = phi
            .get(x)
            .ok_or_else(|| HyplabError::Domain(format!("map undefined at {}", source.label(x))))?;
        target.check_member(y)?;
        let v = w.eval(x)?;
        if delta.exceeds(&v, 0.0) {
            return Err(HyplabError::InvalidParam(format!(
                "ω({}) = {v} is below the lower bound {delta}",
                source.label(x)
            )));
        }
    }
    // Homomorphism: φ(δ_x * δ_y) = δ_φ(x) * δ_φ(y).
    for x in &src {
        for y in &src {
            let image = source.convolve(x, y)?.pushforward(|t| phi.get(t).cloned())?;
            let image = crate::measures::SparseMeasure::new(target.carrier(), image.terms().to_vec())?;
            if image != target.convolve(&phi[x], &phi[y])? {
                return Err(HyplabError::InvalidParam(format!(
                    "map is not a homomorphism at ({}, {})",
                    source.label(x),
                    source.label(y)
                )));
            }
        }
    }
    let mut best: HashMap<ElementId, Scalar> = HashMap::new();
    for x in &src {
        let v = w.eval(x)?;
        best.entry(phi[x].clone())
            .and_modify(|b| *b = b.clone().min(v.clone()))
            .or_insert(v);
    }
    let values = target
        .elements(m)
        .into_iter()
        .map(|y| {
            let v = best.get(&y).cloned().ok_or_else(|| {
                HyplabError::Domain(format!(
                    "map is not surjective: {} has an empty fiber",
                    target.label(&y)
                ))
            })?;
            Ok((y, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let t = table_weight(target, values)?;
    let exact = t.is_exact();
    let base = t.clone();
    Ok(Weight::build(
        "push_forward",
        json!({"source": source.carrier(), "weight": w.describe(), "lower_bound": delta.to_string()}),
        exact,
        Some(target.carrier()),
        WeightKind::PushForward,
        move |x| base.eval(x),
    ))
}

/// Conj(G) → Conj(G/N) with ω̃(C_{xN}) = min over the fiber.
pub fn quotient_weight(h: &Hypergroup, subgroup: &[u32], w: &Weight, delta: &Scalar) -> Result<(Hypergroup, Weight)> {
    let (q, map) = conj_quotient(h, subgroup)?;
    let wq = push_forward_weight(h, &q, &map, w, delta)?;
    Ok((q, wq))
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    pub group: String,
    pub functions_checked: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// ‖Ψ(f)‖ in ℓ¹(Conj(G), ω_σ) equals ‖f‖ in ℓ¹(G, σ) for class indicators and their products.
pub fn mean_weight_norm_bridge(h: &Hypergroup, sigma: &[Scalar]) -> Result<BridgeReport> {
    let conj = as_conj(h)?;
    let g = conj.group();
    let data = conj.class_data();
    let w = mean_weight(h, sigma.to_vec())?;
    let sig: Vec<BigRational> = sigma
        .iter()
        .map(|v| {
            v.as_rational()
                .cloned()
                .ok_or_else(|| HyplabError::InvalidParam("norm bridge needs exact σ".into()))
        })
        .collect::<Result<_>>()?;
    let k = data.len();
    let m = g.order();
    let basis = |c: usize| -> Vec<BigRational> {
        let mut f = vec![BigRational::zero(); m];
        for &x in &data.classes()[c] {
            f[x as usize] = BigRational::new(BigInt::from(1), BigInt::from(data.size(c)));
        }
        f
    };
    let mut functions: Vec<(String, Vec<BigRational>)> = (0..k).map(|c| (data.name(c).to_string(), basis(c))).collect();
    for c in 0..k {
        for d in c..k {
            functions.push((
                format!("{}*{}", data.name(c), data.name(d)),
                group_convolve(g, &basis(c), &basis(d)),
            ));
        }
    }
    let mut failures = Vec::new();
    for (name, f) in &functions {
        let group_norm = f.iter().zip(&sig).fold(BigRational::zero(), |acc, (v, s)| acc + v * s);
        let mut hyper_norm = Scalar::zero();
        for (e, members) in data.classes().iter().enumerate() {
            let psi = Scalar::Exact(&f[members[0] as usize] * BigRational::from_integer(BigInt::from(members.len())));
            hyper_norm = &hyper_norm + &(&psi * &w.eval(&ElementId::Index(e as u64))?);
        }
        if hyper_norm != Scalar::Exact(group_norm) {
            failures.push(format!("weighted norms differ for {name}"));
        }
    }
    Ok(BridgeReport {
        group: g.name().to_string(),
        functions_checked: functions.len(),
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{conj_hypergroup, conj_power, named_group};
    use crate::weights::{check_central, check_submultiplicative, table_weight_by_label};

    fn s3() -> Hypergroup {
        conj_hypergroup(&named_group("s3").unwrap()).unwrap()
    }

    #[test]
    fn cardinality_on_s3_and_s4() {
        let h = s3();
        let w = cardinality_weight(&h).unwrap();
        let vals: Vec<Scalar> = h.elements(3).iter().map(|x| w.eval(x).unwrap()).collect();
        assert_eq!(vals, vec![Scalar::int(1), Scalar::int(3), Scalar::int(2)]);
        assert!(check_central(&h, &w, 3).unwrap().passed);
        let s4 = conj_hypergroup(&named_group("s4").unwrap()).unwrap();
        assert!(check_central(&s4, &cardinality_weight(&s4).unwrap(), 5).unwrap().passed);
        assert!(cardinality_weight(&crate::catalog::chebyshev()).is_err());
    }

    #[test]
    fn mean_weight_and_group_weight_check() {
        let h = s3();
        let w = mean_weight(&h, vec![Scalar::one(); 6]).unwrap();
        assert!(h.elements(3).iter().all(|x| w.eval(x).unwrap() == Scalar::one()));
        let g = named_group("s3").unwrap();
        // 2 on transpositions, 1 elsewhere: submultiplicative, decided exhaustively.
        let sigma: Vec<Scalar> = (0..6)
            .map(|x| {
                let n = g.element_name(x);
                if n.len() == 4 {
                    Scalar::int(2)
                } else {
                    Scalar::one()
                }
            })
            .collect();
        assert!(check_group_weight(&g, &sigma).is_ok());
        let bad: Vec<Scalar> = (0..6)
            .map(|x| {
                if g.element_name(x).len() == 5 {
                    Scalar::int(5)
                } else {
                    Scalar::one()
                }
            })
            .collect();
        assert!(matches!(mean_weight(&h, bad), Err(HyplabError::GroupWeight(_))));
        let r = mean_weight_norm_bridge(&h, &sigma).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn sigma_round_trip() {
        let h = s3();
        let w = cardinality_weight(&h).unwrap();
        let sigma = sigma_from_central(&h, &w).unwrap();
        let back = mean_weight(&h, sigma).unwrap();
        for x in h.elements(3) {
            assert_eq!(back.eval(&x).unwrap(), w.eval(&x).unwrap());
        }
    }

    #[test]
    fn omega_alpha_values() {
        let h = conj_power(&named_group("s3").unwrap(), None).unwrap();
        let w = omega_alpha_weight(&h, Scalar::one()).unwrap();
        assert_eq!(w.eval(&h.identity()).unwrap(), Scalar::one());
        assert_eq!(w.eval(&h.parse_element("[0:T]").unwrap()).unwrap(), Scalar::int(4));
        assert_eq!(w.eval(&h.parse_element("[0:T,3:R]").unwrap()).unwrap(), Scalar::int(6));
        assert!(check_central(&h, &w, 60).unwrap().passed);
        assert!(matches!(
            omega_alpha_weight(&crate::catalog::chebyshev(), Scalar::one()),
            Err(HyplabError::WrongCarrier(_))
        ));
    }

    #[test]
    fn quotient_to_z2() {
        let h = s3();
        let w = table_weight_by_label(
            &h,
            &[("e", Scalar::int(1)), ("T", Scalar::int(2)), ("R", Scalar::int(5))],
        )
        .unwrap();
        let g = as_conj(&h).unwrap().group().clone();
        let a3: Vec<u32> = ["e", "(123)", "(132)"].iter().map(|n| g.find(n).unwrap()).collect();
        let (q, wq) = quotient_weight(&h, &a3, &w, &Scalar::one()).unwrap();
        let vals: Vec<Scalar> = q.elements(2).iter().map(|x| wq.eval(x).unwrap()).collect();
        assert_eq!(vals, vec![Scalar::int(1), Scalar::int(2)]);
        assert!(check_submultiplicative(&q, &wq, 2).unwrap().passed);
        let id: Vec<(ElementId, ElementId)> = h.elements(3).into_iter().map(|x| (x.clone(), x)).collect();
        let same = push_forward_weight(&h, &h, &id, &w, &Scalar::one()).unwrap();
        for x in h.elements(3) {
            assert_eq!(same.eval(&x).unwrap(), w.eval(&x).unwrap());
        }
        let cheb = crate::catalog::chebyshev();
        assert!(matches!(
            push_forward_weight(&cheb, &h, &[], &crate::weights::trivial_weight(), &Scalar::one()),
            Err(HyplabError::UnboundedFiber(_))
        ));
    }
}
