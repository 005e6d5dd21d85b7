//! String and JSON specs for hypergroups and weights.
//!
//! Hypergroups: `chebyshev`, `su2hat`, `sunhat:n=2`, `conj:<group>` (built-in name such as
//! `s3`, `z5`, `sl2_4`, or a group JSON file), `table:<file.json>`, `rdp:<spec>` (countably many
//! copies), `rdp:<k>:<spec>` (k copies) and `rdp:sl2[:K=<slots>]`.
//!
//! Weights: `trivial`, `poly:beta=b`, `exp:alpha=a,c=c`, `card`, `omega-alpha:alpha=a`,
//! `dim:beta=b`, `cheb-f:p=p`, `lifted:beta=b[,window=W]`, `table:<label>=<value>,…`,
//! `product:<component spec>`, `scaled:factor=f:<spec>` and `json:<file.json>`.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::catalog::{
    chebyshev, conj_hypergroup, named_group, sl2_even_product, su2_dual, GroupTable, DEFAULT_SL2_SLOTS,
};
use crate::error::{HyplabError, Result};
use crate::hypergroups::{restricted_product, Hypergroup, RestrictedProduct, Slots};
use crate::measures::Scalar;
use crate::weights::{
    cardinality_weight, chebyshev_f_weight, dimension_weight, exponential_weight, lifted_su2_weight, mean_weight,
    omega_alpha_weight, polynomial_weight, product_weight, table_weight_by_label, trivial_weight, ProductComponents,
    Weight, ZWeight,
};

/// Default ℤ window for lifted SU(2) weights.
pub const DEFAULT_LIFT_WINDOW: i64 = 1000;

fn config(msg: impl Into<String>) -> HyplabError {
    HyplabError::Config(msg.into())
}

/// Finds a data file as given, then under `data/`, then under the workspace `data/`.
pub fn resolve_path(path: &str) -> Result<PathBuf> {
    let candidates = [
        PathBuf::from(path),
        Path::new("data").join(path),
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(path),
    ];
    candidates
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| config(format!("file not found: {path}")))
}

/// `k=v,k=v` into ordered pairs.
fn params(s: &str) -> Result<Vec<(String, String)>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| config(format!("expected key=value, got {kv:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn param<'a>(ps: &'a [(String, String)], key: &str) -> Option<&'a str> {
    ps.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn required_scalar(ps: &[(String, String)], key: &str, spec: &str) -> Result<Scalar> {
    let v = param(ps, key).ok_or_else(|| config(format!("{spec}: missing parameter {key}")))?;
    Scalar::parse(v).map_err(|e| config(format!("{spec}: {e}")))
}

fn only_keys(ps: &[(String, String)], allowed: &[&str], spec: &str) -> Result<()> {
    match ps.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(config(format!("{spec}: unknown parameter {k}"))),
        None => Ok(()),
    }
}

fn group(spec: &str) -> Result<GroupTable> {
    if spec.ends_with(".json") {
        GroupTable::from_file(resolve_path(spec)?)
    } else {
        named_group(spec)
    }
}

pub fn build_hypergroup(spec: &str) -> Result<Hypergroup> {
    let spec = spec.trim();
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "chebyshev" if rest.is_empty() => Ok(chebyshev()),
        "su2hat" if rest.is_empty() => Ok(su2_dual()),
        "sunhat" => {
            let ps = params(rest)?;
            only_keys(&ps, &["n"], spec)?;
            match param(&ps, "n") {
                Some("2") => Ok(su2_dual()),
                Some(n) => Err(config(format!(
                    "sunhat:n={n}: only n = 2 carries a materialized convolution; SU(n) data is available through dimension tables"
                ))),
                None => Err(config("sunhat needs n")),
            }
        }
        "conj" if !rest.is_empty() => conj_hypergroup(&group(rest)?),
        "table" if !rest.is_empty() => Hypergroup::from_table_file(resolve_path(rest)?),
        "rdp" => {
            if rest == "sl2" || rest.starts_with("sl2:") {
                let ps = params(rest.strip_prefix("sl2").unwrap_or_default().trim_start_matches(':'))?;
                only_keys(&ps, &["K"], spec)?;
                let k = match param(&ps, "K") {
                    Some(k) => k
                        .parse()
                        .map_err(|_| config(format!("{spec}: K must be a positive integer")))?,
                    None => DEFAULT_SL2_SLOTS,
                };
                return sl2_even_product(k);
            }
            let (first, tail) = rest.split_once(':').unwrap_or((rest, ""));
            match first.parse::<usize>() {
                Ok(0) => Err(config("rdp needs at least one copy")),
                Ok(k) => {
                    let c = build_hypergroup(tail)?;
                    Ok(restricted_product(
                        format!("rdp{k}:{}", c.carrier()),
                        Slots::Finite(vec![c; k]),
                    ))
                }
                Err(_) => {
                    let c = build_hypergroup(rest)?;
                    Ok(restricted_product(format!("rdp:{}", c.carrier()), Slots::Repeated(c)))
                }
            }
        }
        _ => Err(config(format!("unknown hypergroup spec {spec:?}"))),
    }
}

/// Component hypergroups of a product, with a flag for the repeated form.
fn product_slots(h: &Hypergroup) -> Result<(Vec<Hypergroup>, bool)> {
    let rp = h
        .rule_as::<RestrictedProduct>()
        .ok_or_else(|| config(format!("product weight on non-product {}", h.carrier())))?;
    Ok(match rp.slots() {
        Slots::Repeated(c) => (vec![c.clone()], true),
        Slots::Finite(cs) => (cs.clone(), false),
    })
}

fn product_of(h: &Hypergroup, make: impl Fn(&Hypergroup) -> Result<Weight>) -> Result<Weight> {
    let (slots, repeated) = product_slots(h)?;
    let comps = if repeated {
        ProductComponents::Repeated(make(&slots[0])?)
    } else {
        ProductComponents::PerSlot(slots.iter().map(&make).collect::<Result<_>>()?)
    };
    product_weight(h, comps)
}

pub fn build_weight(h: &Hypergroup, spec: &str) -> Result<Weight> {
    let spec = spec.trim();
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "product" => return product_of(h, |c| build_weight(c, rest)),
        "json" => {
            let text = std::fs::read_to_string(resolve_path(rest)?)?;
            return weight_from_json(h, &serde_json::from_str(&text)?);
        }
        "scaled" => {
            let (ps, inner) = rest
                .split_once(':')
                .ok_or_else(|| config("scaled needs factor=f:<weight spec>"))?;
            let ps = params(ps)?;
            only_keys(&ps, &["factor"], spec)?;
            return build_weight(h, inner)?.scaled(required_scalar(&ps, "factor", spec)?);
        }
        "table" => {
            let ps = params(rest)?;
            let vals = ps
                .iter()
                .map(|(k, v)| Ok((k.as_str(), Scalar::parse(v)?)))
                .collect::<Result<Vec<_>>>()?;
            return table_weight_by_label(h, &vals);
        }
        _ => {}
    }
    let ps = params(rest)?;
    match head {
        "trivial" | "one" => {
            only_keys(&ps, &[], spec)?;
            Ok(trivial_weight())
        }
        "poly" => {
            only_keys(&ps, &["beta"], spec)?;
            polynomial_weight(h, required_scalar(&ps, "beta", spec)?)
        }
        "exp" => {
            only_keys(&ps, &["alpha", "c"], spec)?;
            exponential_weight(
                h,
                required_scalar(&ps, "alpha", spec)?,
                required_scalar(&ps, "c", spec)?,
            )
        }
        "card" => {
            only_keys(&ps, &[], spec)?;
            cardinality_weight(h)
        }
        "omega-alpha" => {
            only_keys(&ps, &["alpha"], spec)?;
            omega_alpha_weight(h, required_scalar(&ps, "alpha", spec)?)
        }
        "dim" => {
            only_keys(&ps, &["beta"], spec)?;
            dimension_weight(h, required_scalar(&ps, "beta", spec)?)
        }
        "cheb-f" => {
            only_keys(&ps, &["p"], spec)?;
            let p = param(&ps, "p")
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| config(format!("{spec}: p must be a non-negative integer")))?;
            chebyshev_f_weight(h, p)
        }
        "lifted" => {
            only_keys(&ps, &["beta", "window"], spec)?;
            let window = match param(&ps, "window") {
                Some(w) => w.parse().map_err(|_| config(format!("{spec}: bad window")))?,
                None => DEFAULT_LIFT_WINDOW,
            };
            lifted_su2_weight(h, &ZWeight::sigma_beta(&required_scalar(&ps, "beta", spec)?, window)?)
        }
        _ => Err(config(format!("unknown weight spec {spec:?}"))),
    }
}

fn json_scalar(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => Scalar::parse(s),
        Value::Number(n) => Scalar::parse(&n.to_string()),
        _ => Err(config(format!("expected a number, got {v}"))),
    }
}

/// Reads `{"family": …}` weight objects.
///
/// Families: any string spec via `{"spec": "poly:beta=2"}`; `{"family": "table", "values": {label: v}}`;
/// `{"family": "mean", "sigma": [σ(g₀), σ(g₁), …]}`; `{"family": "lifted", "sigma": {"window", "values"}}`;
/// `{"family": "product", "component": {…}}` or `{"family": "product", "slots": [{…}, …]}`;
/// `{"family": "scaled", "factor": f, "base": {…}}`.
pub fn weight_from_json(h: &Hypergroup, v: &Value) -> Result<Weight> {
    if let Some(s) = v.get("spec").and_then(Value::as_str) {
        return build_weight(h, s);
    }
    let family = v["family"]
        .as_str()
        .ok_or_else(|| config("weight json needs family or spec"))?;
    match family {
        "table" => {
            let values = v["values"]
                .as_object()
                .ok_or_else(|| config("table weight needs values"))?;
            let vals = values
                .iter()
                .map(|(k, x)| Ok((k.as_str(), json_scalar(x)?)))
                .collect::<Result<Vec<_>>>()?;
            table_weight_by_label(h, &vals)
        }
        "mean" => {
            let sigma = v["sigma"]
                .as_array()
                .ok_or_else(|| config("mean weight needs sigma"))?
                .iter()
                .map(json_scalar)
                .collect::<Result<Vec<_>>>()?;
            mean_weight(h, sigma)
        }
        "lifted" => lifted_su2_weight(h, &ZWeight::from_json(&v["sigma"])?),
        "product" => {
            if let Some(c) = v.get("component") {
                return product_of(h, |slot| weight_from_json(slot, c));
            }
            let specs = v["slots"]
                .as_array()
                .ok_or_else(|| config("product weight needs component or slots"))?;
            let (slots, repeated) = product_slots(h)?;
            if repeated || slots.len() != specs.len() {
                return Err(HyplabError::LengthMismatch(format!(
                    "{} slot weights for {} slots",
                    specs.len(),
                    if repeated {
                        "countably many".to_string()
                    } else {
                        slots.len().to_string()
                    }
                )));
            }
            let comps = slots
                .iter()
                .zip(specs)
                .map(|(c, s)| weight_from_json(c, s))
                .collect::<Result<Vec<_>>>()?;
            product_weight(h, ProductComponents::PerSlot(comps))
        }
        "scaled" => weight_from_json(h, &v["base"])?.scaled(json_scalar(&v["factor"])?),
        other => Err(config(format!("unknown weight family {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypergroup_specs() {
        assert_eq!(build_hypergroup("chebyshev").unwrap().carrier(), chebyshev().carrier());
        assert_eq!(build_hypergroup("sunhat:n=2").unwrap().carrier(), su2_dual().carrier());
        assert_eq!(build_hypergroup("conj:s4").unwrap().size(), Some(5));
        assert_eq!(build_hypergroup("rdp:2:conj:s3").unwrap().size(), Some(9));
        assert!(build_hypergroup("rdp:conj:s3").unwrap().size().is_none());
        assert!(build_hypergroup("rdp:sl2:K=2").is_ok());
        for bad in ["nope", "sunhat:n=3", "conj:", "rdp:0:conj:s3", "chebyshev:x=1"] {
            assert!(
                matches!(
                    build_hypergroup(bad),
                    Err(HyplabError::Config(_)) | Err(HyplabError::InvalidParam(_))
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn group_file_matches_builtin() {
        let h = build_hypergroup("conj:s3.json").unwrap();
        let t = h.parse_element("T").unwrap();
        let m = h.convolve(&t, &t).unwrap();
        assert_eq!(
            m.coefficient(&h.parse_element("e").unwrap()),
            Some(&Scalar::ratio(1, 3))
        );
        assert_eq!(
            m.coefficient(&h.parse_element("R").unwrap()),
            Some(&Scalar::ratio(2, 3))
        );
    }

    #[test]
    fn weight_specs() {
        let h = build_hypergroup("chebyshev").unwrap();
        let w = build_weight(&h, "poly:beta=2").unwrap();
        assert_eq!(w.eval(&h.parse_element("3").unwrap()).unwrap(), Scalar::int(16));
        assert!(build_weight(&h, "poly:gamma=2").is_err());
        assert!(build_weight(&h, "exp:alpha=1/2,c=4").is_ok());
        let p = build_hypergroup("rdp:conj:s3").unwrap();
        let w = build_weight(&p, "product:table:e=1,T=2,R=5").unwrap();
        assert!(w.describe()["family"].as_str().unwrap().contains("product"));
        let j: Value = serde_json::json!({"family": "product", "component": {"family": "table", "values": {"e": 1, "T": 2, "R": 5}}});
        let wj = weight_from_json(&p, &j).unwrap();
        let x = p.elements(40)[39].clone();
        assert_eq!(w.eval(&x).unwrap(), wj.eval(&x).unwrap());
    }
}
