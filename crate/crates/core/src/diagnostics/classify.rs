use serde::Serialize;
use serde_json::{json, Value};

use super::bounds::{certified_weak_additivity, exponential_beta, multiplication_norm_bound, NormBound, Route};
use super::cluster::{cluster_scan, non_arens_witness, ClusterVerdict};
use super::exponential::exp_lemma_constants;
use super::summability::two_summability;
use super::{DiagConfig, REPORT_SCHEMA};
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, RestrictedProduct, SlotFamily};
use crate::measures::Scalar;
use crate::weights::{Weight, WeightKind};

/// Slots probed by the product witness: Ω(v_n, u_m) for 1 ≤ n, m ≤ depth.
const WITNESS_DEPTH: usize = 10;

const UNWEIGHTED_REMARK: &str = "unweighted ℓ¹ algebras of infinite hypergroups are known not to be Arens regular \
     (a result stated for L¹(H)); recorded as documentation, not certified here";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictTier {
    #[serde(rename = "CERTIFIED-YES")]
    CertifiedYes,
    #[serde(rename = "WITNESSED-NO")]
    WitnessedNo,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub tier: VerdictTier,
    pub route: Option<String>,
    /// Ids of the certificate links the verdict rests on.
    pub links: Vec<String>,
    pub bound: Option<NormBound>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn yes(route: &str, links: Vec<String>) -> Self {
        Verdict {
            tier: VerdictTier::CertifiedYes,
            route: Some(route.into()),
            links,
            bound: None,
            notes: vec![],
        }
    }

    fn no(route: &str, links: Vec<String>) -> Self {
        Verdict {
            tier: VerdictTier::WitnessedNo,
            ..Verdict::yes(route, links)
        }
    }

    fn unknown(notes: Vec<String>) -> Self {
        Verdict {
            tier: VerdictTier::Unknown,
            route: None,
            links: vec![],
            bound: None,
            notes,
        }
    }
}

/// One re-runnable step: `op` applied to `inputs` yields `outputs`.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateLink {
    pub id: String,
    pub op: String,
    pub inputs: Value,
    pub outputs: Value,
    pub constants: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdicts {
    pub arens_regular: Verdict,
    pub injective: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub schema: String,
    pub subject: Value,
    pub verdicts: Verdicts,
    pub certificates: Vec<CertificateLink>,
    pub evidence: Value,
    pub truncation: usize,
    pub config: DiagConfig,
}

impl Classification {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Every CERTIFIED-YES verdict names links that exist in the chain.
    pub fn chain_complete(&self) -> bool {
        [&self.verdicts.arens_regular, &self.verdicts.injective]
            .iter()
            .filter(|v| v.tier != VerdictTier::Unknown)
            .all(|v| !v.links.is_empty() && v.links.iter().all(|id| self.certificates.iter().any(|c| &c.id == id)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecheckOutcome {
    pub id: String,
    pub op: String,
    pub ok: bool,
    pub detail: String,
}

/// Why 1/ω vanishes at infinity, when the weight family guarantees it.
fn reciprocal_decay(h: &Hypergroup, w: &Weight) -> Option<String> {
    if h.is_finite() {
        return None;
    }
    match w.kind() {
        WeightKind::Polynomial { beta } if beta.is_positive() && h.generator().is_some() => {
            Some(format!("ω ≥ (1+R)^β outside the finite ball of radius R, β = {beta}"))
        }
        WeightKind::Dimension { beta } if beta.is_positive() && h.carrier() == "su2hat" => {
            Some(format!("ω(π_ℓ) = (ℓ+1)^β with one element per dimension, β = {beta}"))
        }
        WeightKind::ChebyshevF { p } if *p >= 1 => Some(format!("ω(n) = n^{p} + 3 → ∞")),
        WeightKind::OmegaAlpha { alpha } if alpha.is_positive() => {
            let rp = h.rule_as::<RestrictedProduct>()?;
            (rp.family() == Some(SlotFamily::Sl2Even)).then(|| {
                format!("finitely many elements have class-size product below any bound; class sizes grow in the slot index, α = {alpha}")
            })
        }
        _ => None,
    }
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::T2General => "t2-general",
        Route::TwoSummable => "2-summable",
        Route::Polynomial => "polynomial",
        Route::Exponential => "exponential",
        Route::SuN => "su-n",
    }
}

fn parse_route(s: &str) -> Result<Route> {
    Ok(match s {
        "2-summable" => Route::TwoSummable,
        "polynomial" => Route::Polynomial,
        "exponential" => Route::Exponential,
        "su-n" => Route::SuN,
        "t2-general" => Route::T2General,
        _ => return Err(HyplabError::InvalidParam(format!("unknown route {s}"))),
    })
}

fn input_usize(inputs: &Value, key: &str) -> Result<usize> {
    inputs
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| HyplabError::InvalidParam(format!("certificate input {key} missing")))
}

fn input_scalar(inputs: &Value, key: &str) -> Result<Scalar> {
    let s = inputs
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| HyplabError::InvalidParam(format!("certificate input {key} missing")))?;
    Scalar::parse(s)
}

/// Runs a named operation; both the classifier and `recheck` go through here.
fn run_op(h: &Hypergroup, w: &Weight, op: &str, inputs: &Value, cfg: &DiagConfig) -> Result<(Value, Value)> {
    let fail = |msg: String| Err(HyplabError::NoDecomposition(msg));
    match op {
        "finite-carrier" => match h.size() {
            Some(s) => Ok((json!({"size": s}), json!({}))),
            None => fail("carrier is infinite".into()),
        },
        "weak-additivity" => {
            let n = input_usize(inputs, "n")?;
            match certified_weak_additivity(h, w, n)? {
                Some(c) => Ok((
                    json!({"route": c.route, "constant": c.constant.to_string()}),
                    json!({"detail": c.detail}),
                )),
                None => fail("no weak-additivity certificate".into()),
            }
        }
        "reciprocal-decay" => match reciprocal_decay(h, w) {
            Some(reason) => Ok((json!({"holds": true, "reason": reason}), json!({}))),
            None => fail("1/ω → 0 is not certified for this family".into()),
        },
        "growth-law" => match h.growth_law() {
            Some(law) => Ok((
                json!({"ball_constant": law.ball.constant, "ball_exponent": law.ball.exponent, "level_exact": law.level_exact}),
                json!({"formula": law.formula}),
            )),
            None => fail("no closed-form growth law".into()),
        },
        "two-summability" => {
            let s = two_summability(h, w, input_usize(inputs, "n")?)?;
            Ok((
                json!({"status": s.status, "total": s.total, "certified": s.is_certified_finite()}),
                json!({"partial": s.partial.to_string(), "tail": s.tail}),
            ))
        }
        "norm-bound" => {
            let route = parse_route(inputs.get("route").and_then(Value::as_str).unwrap_or_default())?;
            let b = multiplication_norm_bound(h, w, route, input_usize(inputs, "n")?, cfg)?;
            Ok((
                json!({"value": b.value, "conditional_on": b.conditional_on}),
                json!({"formula": b.formula, "constituents": b.constituents}),
            ))
        }
        "exp-lemma" => {
            let d = input_usize(inputs, "d")? as u32;
            let k = exp_lemma_constants(
                &input_scalar(inputs, "alpha")?,
                &input_scalar(inputs, "c")?,
                &input_scalar(inputs, "beta")?,
                Some(d),
            )?;
            Ok((
                json!({
                    "lemma_floor": k.lemma_floor.to_string(),
                    "theorem_floor": k.theorem_floor.as_ref().map(|t| t.to_string()),
                    "K": k.k.to_string(),
                    "full_range": k.full_range,
                    "searched_side": k.side,
                    "log_M": k.log_m_cube,
                }),
                json!({"cube_cap": super::CUBE_SIDE_CAP}),
            ))
        }
        "non-arens-witness" => {
            let r = non_arens_witness(h, w, input_usize(inputs, "depth")?)?;
            match r.verdict {
                ClusterVerdict::WitnessAgainst { lower_bound, .. } => Ok((
                    json!({"verdict": "WITNESS-AGAINST", "lower_bound": lower_bound, "checks": r.checks}),
                    json!({"notes": r.notes}),
                )),
                _ => fail("the product witness did not hold".into()),
            }
        }
        _ => Err(HyplabError::InvalidParam(format!("unknown certificate op {op}"))),
    }
}

struct Chain<'a> {
    h: &'a Hypergroup,
    w: &'a Weight,
    cfg: &'a DiagConfig,
    links: Vec<CertificateLink>,
}

impl Chain<'_> {
    /// Runs the op and records it; `None` when its precondition fails.
    fn link(&mut self, op: &str, inputs: Value) -> Result<Option<String>> {
        if let Some(l) = self.links.iter().find(|l| l.op == op && l.inputs == inputs) {
            return Ok(Some(l.id.clone()));
        }
        match run_op(self.h, self.w, op, &inputs, self.cfg) {
            Ok((outputs, constants)) => {
                let id = format!("{}-{}", op, self.links.len() + 1);
                self.links.push(CertificateLink {
                    id: id.clone(),
                    op: op.into(),
                    inputs,
                    outputs,
                    constants,
                });
                Ok(Some(id))
            }
            Err(
                HyplabError::NoDecomposition(_)
                | HyplabError::RouteUnavailable(_)
                | HyplabError::WrongCarrier(_)
                | HyplabError::MissingConstant(_),
            ) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn output(&self, id: &str) -> &Value {
        &self.links.iter().find(|l| l.id == id).expect("link exists").outputs
    }
}

fn injective_route(chain: &mut Chain, n: usize) -> Result<Option<Verdict>> {
    let (h, w, cfg) = (chain.h, chain.w, chain.cfg);
    if let WeightKind::Polynomial { .. } = w.kind() {
        if let Some(g) = chain.link("growth-law", json!({}))? {
            if let Some(b) = chain.link("norm-bound", json!({"route": "polynomial", "n": n}))? {
                let mut v = Verdict::yes("polynomial weight with 2β > d+1", vec![g, b]);
                v.bound = Some(multiplication_norm_bound(h, w, Route::Polynomial, n, cfg)?);
                return Ok(Some(v));
            }
        }
    }
    let sum_ok = match chain.link("two-summability", json!({"n": n}))? {
        Some(id) => chain.output(&id)["certified"].as_bool().unwrap_or(false).then_some(id),
        None => None,
    };
    if let Some(s) = sum_ok {
        if let Some(wa) = chain.link("weak-additivity", json!({"n": n}))? {
            if let Some(b) = chain.link("norm-bound", json!({"route": route_name(Route::TwoSummable), "n": n}))? {
                let mut v = Verdict::yes("2-summable weakly additive weight", vec![wa, s, b]);
                v.bound = Some(multiplication_norm_bound(h, w, Route::TwoSummable, n, cfg)?);
                return Ok(Some(v));
            }
        }
    }
    if let WeightKind::Exponential { alpha, c } = w.kind() {
        if let Some(g) = chain.link("growth-law", json!({}))? {
            let d = h.growth_law().expect("growth law linked").ball.exponent;
            let beta = exponential_beta(alpha, c, d)?;
            let inputs = json!({"alpha": alpha.to_string(), "c": c.to_string(), "beta": beta.to_string(), "d": d});
            if let Some(e) = chain.link("exp-lemma", inputs)? {
                let mut links = vec![g, e];
                let mut v = Verdict::yes("exponential weight on polynomial growth", vec![]);
                if let Some(b) = chain.link("norm-bound", json!({"route": "exponential", "n": n}))? {
                    links.push(b);
                    v.bound = Some(multiplication_norm_bound(h, w, Route::Exponential, n, cfg)?);
                } else {
                    v.notes.push(format!(
                        "M exists by the lemma but ⌊2K⌋ exceeds the cube cap {}; no numeric bound is reported",
                        super::CUBE_SIDE_CAP
                    ));
                }
                v.links = links;
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Runs the certificate chain for Arens regularity and injectivity of the weighted algebra.
pub fn classify(h: &Hypergroup, w: &Weight, n: usize, cfg: &DiagConfig) -> Result<Classification> {
    w.check_carrier(h)?;
    let mut chain = Chain {
        h,
        w,
        cfg,
        links: vec![],
    };
    let mut evidence = serde_json::Map::new();
    evidence.insert(
        "enumeration".into(),
        json!("x → ∞ is read along the fixed enumeration; CONSISTENT scan verdicts are evidence, never certificates"),
    );

    let injective = injective_route(&mut chain, n)?;
    let arens = if let Some(id) = chain.link("finite-carrier", json!({}))? {
        Some(Verdict::yes(
            "finite carrier: the algebra is finite-dimensional",
            vec![id],
        ))
    } else if let Some(v) = &injective {
        let mut a = Verdict::yes("operator algebra ⇒ Arens regular", v.links.clone());
        a.notes.push("follows from the injectivity certificate".into());
        Some(a)
    } else {
        match (
            chain.link("weak-additivity", json!({"n": n}))?,
            chain.link("reciprocal-decay", json!({}))?,
        ) {
            (Some(wa), Some(rd)) => Some(Verdict::yes("weakly additive weight with 1/ω ∈ c₀", vec![wa, rd])),
            _ => None,
        }
    };

    let (arens, injective) = match (arens, injective) {
        (a, Some(i)) => (a.expect("injective implies Arens"), i),
        (a, None) => {
            let witness = match chain.link("non-arens-witness", json!({"depth": WITNESS_DEPTH}))? {
                Some(id) if a.is_none() => Some(id),
                _ => None,
            };
            match witness {
                Some(id) => (
                    Verdict::no(
                        "product weight with point-mass pairs in disjoint slots",
                        vec![id.clone()],
                    ),
                    Verdict::no("not Arens regular ⇒ not an operator algebra", vec![id]),
                ),
                None => {
                    let scan = cluster_scan(h, w, n.max(10), cfg.cluster_threshold)?;
                    evidence.insert(
                        "cluster_scan".into(),
                        json!({
                            "verdict": scan.verdict,
                            "threshold": scan.threshold,
                            "inner_depth": scan.inner_depth,
                            "crossing": scan.crossing,
                            "row_tail": scan.row_envelope.last(),
                            "col_tail": scan.col_envelope.last(),
                        }),
                    );
                    let mut notes = vec!["no sufficient condition applies".to_string()];
                    if matches!(w.kind(), WeightKind::Trivial) && !h.is_finite() {
                        notes.push(UNWEIGHTED_REMARK.into());
                    }
                    let arens = a.unwrap_or_else(|| Verdict::unknown(notes.clone()));
                    (arens, Verdict::unknown(notes))
                }
            }
        }
    };

    Ok(Classification {
        schema: REPORT_SCHEMA.into(),
        subject: json!({"hypergroup": h.describe(), "weight": w.describe()}),
        verdicts: Verdicts {
            arens_regular: arens,
            injective,
        },
        certificates: chain.links,
        evidence: Value::Object(evidence),
        truncation: n,
        config: cfg.clone(),
    })
}

/// Re-runs every link of the chain and compares the outputs.
pub fn recheck(h: &Hypergroup, w: &Weight, c: &Classification, cfg: &DiagConfig) -> Result<Vec<RecheckOutcome>> {
    w.check_carrier(h)?;
    Ok(c.certificates
        .iter()
        .map(|l| {
            let (ok, detail) = match run_op(h, w, &l.op, &l.inputs, cfg) {
                Ok((out, _)) if out == l.outputs => (true, "outputs reproduced".to_string()),
                Ok((out, _)) => (false, format!("expected {}, got {}", l.outputs, out)),
                Err(e) => (false, e.to_string()),
            };
            RecheckOutcome {
                id: l.id.clone(),
                op: l.op.clone(),
                ok,
                detail,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, conj_hypergroup, conj_power, named_group};
    use crate::weights::{polynomial_weight, product_weight, table_weight_by_label, trivial_weight, ProductComponents};

    fn recheck_all(h: &Hypergroup, w: &Weight, c: &Classification) {
        assert!(c.chain_complete());
        for r in recheck(h, w, c, &DiagConfig::default()).unwrap() {
            assert!(r.ok, "{} {}", r.id, r.detail);
        }
    }

    #[test]
    fn chebyshev_beta_two() {
        let h = catalog::chebyshev();
        let w = polynomial_weight(&h, Scalar::int(2)).unwrap();
        let c = classify(&h, &w, 200, &DiagConfig::default()).unwrap();
        assert_eq!(c.verdicts.arens_regular.tier, VerdictTier::CertifiedYes);
        assert_eq!(c.verdicts.injective.tier, VerdictTier::CertifiedYes);
        assert!(c.verdicts.injective.route.as_deref().unwrap().starts_with("polynomial"));
        recheck_all(&h, &w, &c);
    }

    #[test]
    fn chebyshev_beta_one_uses_summability() {
        let h = catalog::chebyshev();
        let w = polynomial_weight(&h, Scalar::one()).unwrap();
        let c = classify(&h, &w, 200, &DiagConfig::default()).unwrap();
        assert_eq!(c.verdicts.injective.tier, VerdictTier::CertifiedYes);
        assert!(c.verdicts.injective.route.as_deref().unwrap().starts_with("2-summable"));
        recheck_all(&h, &w, &c);
    }

    #[test]
    fn chebyshev_unweighted_unknown() {
        let h = catalog::chebyshev();
        let c = classify(&h, &trivial_weight(), 60, &DiagConfig::default()).unwrap();
        assert_eq!(c.verdicts.arens_regular.tier, VerdictTier::Unknown);
        assert_eq!(c.verdicts.injective.tier, VerdictTier::Unknown);
        assert!(c.evidence.get("cluster_scan").is_some());
        assert!(c
            .verdicts
            .arens_regular
            .notes
            .iter()
            .any(|n| n.contains("documentation")));
    }

    #[test]
    fn product_weight_witnessed() {
        let g = named_group("s3").unwrap();
        let comp = conj_hypergroup(&g).unwrap();
        let h = conj_power(&g, None).unwrap();
        let w0 = table_weight_by_label(
            &comp,
            &[("e", Scalar::int(1)), ("T", Scalar::int(2)), ("R", Scalar::int(5))],
        )
        .unwrap();
        let w = product_weight(&h, ProductComponents::Repeated(w0)).unwrap();
        let c = classify(&h, &w, 60, &DiagConfig::default()).unwrap();
        assert_eq!(c.verdicts.arens_regular.tier, VerdictTier::WitnessedNo);
        assert_eq!(c.verdicts.injective.tier, VerdictTier::WitnessedNo);
        recheck_all(&h, &w, &c);
    }

    #[test]
    fn finite_carrier_is_arens() {
        let h = conj_hypergroup(&named_group("s4").unwrap()).unwrap();
        let c = classify(&h, &trivial_weight(), 10, &DiagConfig::default()).unwrap();
        assert_eq!(c.verdicts.arens_regular.tier, VerdictTier::CertifiedYes);
        assert_eq!(c.verdicts.injective.tier, VerdictTier::CertifiedYes);
        recheck_all(&h, &trivial_weight(), &c);
        let json = c.to_json();
        assert_eq!(json["schema"], REPORT_SCHEMA);
        assert!(json["config"]["C_n"].is_null());
    }
}
