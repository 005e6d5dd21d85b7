use serde_json::json;

use super::{Weight, WeightKind};
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, RestrictedProduct, Slots};
use crate::measures::{ElementId, Scalar};

/// Component weights of a product weight.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum ProductComponents {
    /// One weight per slot of a finite product.
    PerSlot(Vec<Weight>),
    /// The same weight in every slot.
    Repeated(Weight),
}

/// ω((x_i)) = Π_i ω_i(x_i) on a restricted product.
pub fn product_weight(h: &Hypergroup, comps: ProductComponents) -> Result<Weight> {
    let rp = h
        .rule_as::<RestrictedProduct>()
        .ok_or_else(|| HyplabError::WrongCarrier(format!("{} is not a restricted product", h.carrier())))?;
    let (weights, repeated): (Vec<Weight>, bool) = match (&comps, rp.slots()) {
        (ProductComponents::PerSlot(ws), Slots::Finite(hs)) => {
            if ws.len() != hs.len() {
                return Err(HyplabError::LengthMismatch(format!(
                    "{} component weights for {} slots",
                    ws.len(),
                    hs.len()
                )));
            }
            for (w, c) in ws.iter().zip(hs) {
                w.check_carrier(c)?;
            }
            (ws.clone(), false)
        }
        (ProductComponents::PerSlot(ws), Slots::Repeated(_)) => {
            return Err(HyplabError::LengthMismatch(format!(
                "{} component weights for countably many slots",
                ws.len()
            )))
        }
        (ProductComponents::Repeated(w), slots) => {
            for c in rp.distinct_components() {
                w.check_carrier(c)?;
            }
            if let Slots::Repeated(c) = slots {
                let at_e = w.eval(&c.identity())?;
                if !at_e.approx_eq(&Scalar::one(), crate::measures::DEFAULT_TOLERANCE) {
                    return Err(HyplabError::Normalization(format!(
                        "ω(e) = {at_e} ≠ 1 in infinitely many slots"
                    )));
                }
            }
            let n = rp.slot_count().unwrap_or(0);
            (if n > 0 { vec![w.clone(); n] } else { vec![w.clone()] }, true)
        }
    };
    let infinite = matches!(rp.slots(), Slots::Repeated(_));
    // Product of ω_s(e) over the finitely many slots, multiplied back out where x_s ≠ e.
    let identity_factors: Vec<Scalar> = if infinite {
        vec![]
    } else {
        weights
            .iter()
            .enumerate()
            .map(|(s, w)| w.eval(&rp.component(s as u32).expect("slot").identity()))
            .collect::<Result<_>>()?
    };
    let exact = weights.iter().all(Weight::is_exact);
    let params = json!({
        "components": weights.iter().map(Weight::describe).collect::<Vec<_>>(),
        "repeated": repeated,
    });
    let hh = h.clone();
    let (ws, ids) = (weights.clone(), identity_factors.clone());
    let eval = move |x: &ElementId| -> Result<Scalar> {
        hh.check_member(x)?;
        let slots = x.slots().expect("product id");
        let mut acc = Scalar::one();
        for (s, f) in ids.iter().enumerate() {
            if !slots.contains_key(&(s as u32)) {
                acc = &acc * f;
            }
        }
        for (s, c) in slots {
            let w = if infinite { &ws[0] } else { &ws[*s as usize] };
            acc = &acc * &w.eval(c)?;
        }
        Ok(acc)
    };
    let hf = h.clone();
    let idf: Vec<f64> = identity_factors.iter().map(Scalar::to_f64).collect();
    let fast = move |x: &ElementId| -> Result<f64> {
        hf.check_member(x)?;
        let slots = x.slots().expect("product id");
        let mut acc = 1.0;
        for (s, f) in idf.iter().enumerate() {
            if !slots.contains_key(&(s as u32)) {
                acc *= f;
            }
        }
        for (s, c) in slots {
            let w = if infinite { &weights[0] } else { &weights[*s as usize] };
            acc *= w.eval_f64(c)?;
        }
        Ok(acc)
    };
    Ok(Weight::build(
        "product",
        params,
        exact,
        Some(h.carrier()),
        WeightKind::Product { repeated },
        eval,
    )
    .with_fast(fast))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{conj_hypergroup, conj_power, named_group};
    use crate::weights::{check_submultiplicative, table_weight_by_label, trivial_weight};

    fn s3_weight(h: &Hypergroup) -> Weight {
        table_weight_by_label(
            h,
            &[("e", Scalar::int(1)), ("T", Scalar::int(2)), ("R", Scalar::int(5))],
        )
        .unwrap()
    }

    #[test]
    fn trivial_components() {
        let h = conj_power(&named_group("s3").unwrap(), Some(3)).unwrap();
        let w = product_weight(&h, ProductComponents::Repeated(trivial_weight())).unwrap();
        assert!(h.elements(27).iter().all(|x| w.eval(x).unwrap() == Scalar::one()));
    }

    #[test]
    fn repeated_s3_weight() {
        let g = named_group("s3").unwrap();
        let c = conj_hypergroup(&g).unwrap();
        let h = conj_power(&g, None).unwrap();
        let w = product_weight(&h, ProductComponents::Repeated(s3_weight(&c))).unwrap();
        let x = h.parse_element("[0:R,1:R,2:T]").unwrap();
        assert_eq!(w.eval(&x).unwrap(), Scalar::int(50));
        assert!(check_submultiplicative(&h, &w, 60).unwrap().passed);
        let heavy = table_weight_by_label(
            &c,
            &[("e", Scalar::int(2)), ("T", Scalar::int(2)), ("R", Scalar::int(5))],
        )
        .unwrap();
        assert!(matches!(
            product_weight(&h, ProductComponents::Repeated(heavy)),
            Err(HyplabError::Normalization(_))
        ));
    }

    #[test]
    fn finite_identity_factors() {
        let g = named_group("s3").unwrap();
        let c = conj_hypergroup(&g).unwrap();
        let h = conj_power(&g, Some(2)).unwrap();
        let heavy = table_weight_by_label(
            &c,
            &[("e", Scalar::int(2)), ("T", Scalar::int(3)), ("R", Scalar::int(5))],
        )
        .unwrap();
        let w = product_weight(&h, ProductComponents::PerSlot(vec![heavy, s3_weight(&c)])).unwrap();
        assert_eq!(w.eval(&h.identity()).unwrap(), Scalar::int(2));
        assert_eq!(w.eval(&h.parse_element("[1:R]").unwrap()).unwrap(), Scalar::int(10));
        assert!(matches!(
            product_weight(&h, ProductComponents::PerSlot(vec![trivial_weight()])),
            Err(HyplabError::LengthMismatch(_))
        ));
    }
}
