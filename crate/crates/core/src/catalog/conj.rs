use std::any::Any;
use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::group::GroupTable;
use crate::error::{HyplabError, Result};
use crate::hypergroups::{Hypergroup, HypergroupRule};
use crate::measures::{ElementId, Scalar};

/// Seed used for the representative-independence spot check when none is given.
pub const DEFAULT_SPOT_SEED: u64 = 0x5eed;
const SPOT_CHECKS: usize = 64;

/// Conjugacy classes of a finite group with their structure counts.
#[derive(Clone, Debug)]
pub struct ConjClassData {
    class_of: Vec<u32>,
    classes: Vec<Vec<u32>>,
    inverse: Vec<u32>,
    names: Vec<String>,
    /// `counts[(c·k + d)·k + e]` = #{(x, y) ∈ C×D : xy = e₀} for the first element e₀ of E.
    counts: Vec<u64>,
}

impl ConjClassData {
    pub fn compute(g: &GroupTable, seed: u64) -> Result<Self> {
        let m = g.order();
        let mut class_of = vec![u32::MAX; m];
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for x in 0..m as u32 {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let id = classes.len() as u32;
            let mut orbit = vec![x];
            class_of[x as usize] = id;
            let mut i = 0;
            while i < orbit.len() {
                let y = orbit[i];
                for &s in g.generators() {
                    let z = g.conjugate(s, y);
                    if class_of[z as usize] == u32::MAX {
                        class_of[z as usize] = id;
                        orbit.push(z);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            classes.push(orbit);
        }
        let k = classes.len();
        let inverse = classes.iter().map(|c| class_of[g.inv(c[0]) as usize]).collect();

        // n_E = #{(x, y) ∈ C×D : xy ∈ E}; c_CDE = n_E / |E|.
        let mut counts = vec![0u64; k * k * k];
        let mut tally = vec![0u64; k];
        for c in 0..k {
            for d in 0..k {
                tally.iter_mut().for_each(|t| *t = 0);
                for &x in &classes[c] {
                    for &y in &classes[d] {
                        tally[class_of[g.mul(x, y) as usize] as usize] += 1;
                    }
                }
                for (e, &n) in tally.iter().enumerate() {
                    let size = classes[e].len() as u64;
                    if n % size != 0 {
                        return Err(HyplabError::GroupValidation(format!(
                            "class product count {n} not divisible by class size {size}"
                        )));
                    }
                    counts[(c * k + d) * k + e] = n / size;
                }
            }
        }

        let names = match g.class_names() {
            Some(n) if n.len() == k => n.to_vec(),
            Some(n) => {
                return Err(HyplabError::GroupValidation(format!(
                    "{} class names given for {k} classes",
                    n.len()
                )))
            }
            None => classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == 0 {
                        "e".to_string()
                    } else {
                        format!("C{}", g.element_name(c[0]))
                    }
                })
                .collect(),
        };
        let data = ConjClassData {
            class_of,
            classes,
            inverse,
            names,
            counts,
        };
        data.spot_check(g, seed)?;
        Ok(data)
    }

    /// Recounts c_CDE at random representatives of E.
    fn spot_check(&self, g: &GroupTable, seed: u64) -> Result<()> {
        let k = self.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SPOT_CHECKS.min(k * k * k) {
            let (c, d, e) = (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k));
            let rep = self.classes[e][rng.gen_range(0..self.classes[e].len())];
            let n = self.classes[c]
                .iter()
                .filter(|&&x| self.class_of[g.mul(g.inv(x), rep) as usize] as usize == d)
                .count() as u64;
            if n != self.structure_count(c, d, e) {
                return Err(HyplabError::GroupValidation(format!(
                    "structure count depends on the representative of class {}",
                    self.names[e]
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class_of(&self, x: u32) -> usize {
        self.class_of[x as usize] as usize
    }

    pub fn size(&self, c: usize) -> usize {
        self.classes[c].len()
    }

    pub fn inverse(&self, c: usize) -> usize {
        self.inverse[c] as usize
    }

    pub fn name(&self, c: usize) -> &str {
        &self.names[c]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn structure_count(&self, c: usize, d: usize, e: usize) -> u64 {
        let k = self.len();
        self.counts[(c * k + d) * k + e]
    }
}

/// Conj(G): the hypergroup of conjugacy classes.
pub struct ConjHypergroup {
    tag: String,
    group: Arc<GroupTable>,
    data: ConjClassData,
}

impl ConjHypergroup {
    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn class_data(&self) -> &ConjClassData {
        &self.data
    }

    fn class(&self, x: &ElementId) -> usize {
        x.index().expect("class id") as usize
    }

    /// The class containing a group element.
    pub fn class_id(&self, x: u32) -> ElementId {
        ElementId::Index(self.data.class_of(x) as u64)
    }
}

impl HypergroupRule for ConjHypergroup {
    fn carrier(&self) -> &str {
        &self.tag
    }

    fn identity(&self) -> ElementId {
        ElementId::Index(0)
    }

    fn contains(&self, x: &ElementId) -> bool {
        matches!(x, ElementId::Index(i) if (*i as usize) < self.data.len())
    }

    fn involution(&self, x: &ElementId) -> ElementId {
        ElementId::Index(self.data.inverse(self.class(x)) as u64)
    }

    fn convolve_terms(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, Scalar)> {
        let (c, d) = (self.class(x), self.class(y));
        let denom = (self.data.size(c) * self.data.size(d)) as i64;
        (0..self.data.len())
            .filter_map(|e| {
                let n = self.data.structure_count(c, d, e) * self.data.size(e) as u64;
                (n > 0).then(|| (ElementId::Index(e as u64), Scalar::ratio(n as i64, denom)))
            })
            .collect()
    }

    fn support(&self, x: &ElementId, y: &ElementId) -> Vec<ElementId> {
        let (c, d) = (self.class(x), self.class(y));
        (0..self.data.len())
            .filter(|&e| self.data.structure_count(c, d, e) > 0)
            .map(|e| ElementId::Index(e as u64))
            .collect()
    }

    fn size(&self) -> Option<usize> {
        Some(self.data.len())
    }

    fn enumerate(&self, n: usize) -> Vec<ElementId> {
        (0..n.min(self.data.len()) as u64).map(ElementId::Index).collect()
    }

    fn rank_of(&self, x: &ElementId) -> Option<usize> {
        self.contains(x).then(|| self.class(x))
    }

    fn is_commutative(&self) -> bool {
        true
    }

    fn label(&self, x: &ElementId) -> String {
        match x {
            ElementId::Index(i) if (*i as usize) < self.data.len() => self.data.name(*i as usize).to_string(),
            other => other.to_string(),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        if let Some(c) = self.data.names().iter().position(|n| n == s) {
            return Some(ElementId::Index(c as u64));
        }
        let elem = s.strip_prefix("C_").or_else(|| s.strip_prefix('C')).unwrap_or(s);
        let elem = elem.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(elem);
        self.group.find(elem).map(|x| self.class_id(x))
    }

    fn describe(&self) -> Value {
        json!({
            "family": "conj",
            "carrier": self.tag,
            "group": self.group.name(),
            "group_order": self.group.order(),
            "classes": (0..self.data.len())
                .map(|c| json!({"name": self.data.name(c), "size": self.data.size(c)}))
                .collect::<Vec<_>>(),
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub fn conj_hypergroup(g: &GroupTable) -> Result<Hypergroup> {
    conj_hypergroup_seeded(g, DEFAULT_SPOT_SEED)
}

pub fn conj_hypergroup_seeded(g: &GroupTable, seed: u64) -> Result<Hypergroup> {
    let data = ConjClassData::compute(g, seed)?;
    for c in 0..data.len() {
        for d in 0..data.len() {
            let mass: u64 = (0..data.len())
                .map(|e| data.structure_count(c, d, e) * data.size(e) as u64)
                .sum();
            if mass != (data.size(c) * data.size(d)) as u64 {
                return Err(HyplabError::GroupValidation("class mass identity fails".into()));
            }
        }
    }
    Ok(Hypergroup::new(ConjHypergroup {
        tag: format!("conj:{}", g.name()),
        group: Arc::new(g.clone()),
        data,
    }))
}

/// Access to the class structure behind a Conj(G) handle.
pub fn as_conj(h: &Hypergroup) -> Result<&ConjHypergroup> {
    h.rule_as::<ConjHypergroup>().ok_or(HyplabError::NotAConjHypergroup)
}

/// The map Conj(G) → Conj(G/N) induced by a normal subgroup.
pub fn conj_quotient(h: &Hypergroup, subgroup: &[u32]) -> Result<(Hypergroup, Vec<(ElementId, ElementId)>)> {
    let conj = as_conj(h)?;
    let g = conj.group();
    let (q, proj) = g.quotient(subgroup)?;
    let hq = conj_hypergroup(&q)?;
    let cq = as_conj(&hq)?;
    let map = conj
        .class_data()
        .classes()
        .iter()
        .enumerate()
        .map(|(c, members)| (ElementId::Index(c as u64), cq.class_id(proj[members[0] as usize])))
        .collect();
    Ok((hq, map))
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiReport {
    pub group: String,
    pub classes: usize,
    pub pairs_checked: usize,
    pub multiplicative: bool,
    pub isometric: bool,
    pub central: bool,
    pub failures: Vec<String>,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.multiplicative && self.isometric && self.central
    }
}

pub(crate) type Dense = Vec<BigRational>;

/// Group-algebra convolution on dense vectors: (f * g)(xy) += f(x) g(y).
pub(crate) fn group_convolve(g: &GroupTable, f: &Dense, h: &Dense) -> Dense {
    let m = g.order();
    let mut out = vec![BigRational::zero(); m];
    for x in 0..m {
        if f[x].is_zero() {
            continue;
        }
        for y in 0..m {
            if h[y].is_zero() {
                continue;
            }
            out[g.mul(x as u32, y as u32) as usize] += &f[x] * &h[y];
        }
    }
    out
}

fn l1(f: &Dense) -> BigRational {
    f.iter().map(|v| v.abs()).fold(BigRational::zero(), |a, b| a + b)
}

/// Checks that Ψ(f)(C) = |C|·f(C) carries group convolution of central functions to
/// hypergroup convolution, isometrically, on sampled pairs of class indicators.
pub fn psi_isomorphism_check(g: &GroupTable, samples: usize, seed: u64) -> Result<PsiReport> {
    let h = conj_hypergroup_seeded(g, seed)?;
    let conj = as_conj(&h)?;
    let data = conj.class_data();
    let k = data.len();
    let m = g.order();
    let mut pairs: Vec<(usize, usize)> = (0..k).flat_map(|c| (0..k).map(move |d| (c, d))).collect();
    if samples > 0 && samples < pairs.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = HashSet::new();
        while chosen.len() < samples {
            chosen.insert(rng.gen_range(0..pairs.len()));
        }
        let mut idx: Vec<usize> = chosen.into_iter().collect();
        idx.sort_unstable();
        pairs = idx.into_iter().map(|i| pairs[i]).collect();
    }
    // Ψ⁻¹(δ_C) is the central function equal to 1/|C| on C.
    let basis = |c: usize| -> Dense {
        let mut f = vec![BigRational::zero(); m];
        let v = BigRational::new(BigInt::from(1), BigInt::from(data.size(c)));
        for &x in &data.classes()[c] {
            f[x as usize] = v.clone();
        }
        f
    };
    let mut report = PsiReport {
        group: g.name().to_string(),
        classes: k,
        pairs_checked: pairs.len(),
        multiplicative: true,
        isometric: true,
        central: true,
        failures: Vec::new(),
    };
    for c in 0..k {
        if l1(&basis(c)) != BigRational::from_integer(1.into()) {
            report.isometric = false;
            report
                .failures
                .push(format!("class {} indicator does not have norm 1", data.name(c)));
        }
    }
    for (c, d) in pairs {
        let prod = group_convolve(g, &basis(c), &basis(d));
        let (cn, dn) = (data.name(c), data.name(d));
        for (e, members) in data.classes().iter().enumerate() {
            if members.iter().any(|&x| prod[x as usize] != prod[members[0] as usize]) {
                report.central = false;
                report
                    .failures
                    .push(format!("{cn}*{dn} is not constant on {}", data.name(e)));
            }
        }
        let psi: Vec<(ElementId, Scalar)> = data
            .classes()
            .iter()
            .enumerate()
            .filter(|(_, members)| !prod[members[0] as usize].is_zero())
            .map(|(e, members)| {
                let v = &prod[members[0] as usize] * BigRational::from_integer(BigInt::from(members.len()));
                (ElementId::Index(e as u64), Scalar::Exact(v))
            })
            .collect();
        let hyper = h.convolve(&ElementId::Index(c as u64), &ElementId::Index(d as u64))?;
        if hyper.terms() != psi.as_slice() {
            report.multiplicative = false;
            report
                .failures
                .push(format!("Ψ({cn}*{dn}) differs from the class convolution"));
        }
        let psi_norm = psi
            .iter()
            .map(|(_, v)| v.as_rational().expect("exact").clone())
            .fold(BigRational::zero(), |a, b| a + b);
        if psi_norm != l1(&prod) {
            report.isometric = false;
            report.failures.push(format!("norm of {cn}*{dn} changes under Ψ"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::named_group;

    /// Independent oracle: pair counts straight from the multiplication table.
    fn brute_conv(g: &GroupTable, c: &[u32], d: &[u32], e: &[u32]) -> BigRational {
        let hits = c
            .iter()
            .flat_map(|&x| d.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| e.contains(&g.mul(x, y)))
            .count();
        BigRational::new(BigInt::from(hits), BigInt::from(c.len() * d.len()))
    }

    #[test]
    fn s3_classes_and_products() {
        let g = named_group("s3").unwrap();
        let h = conj_hypergroup(&g).unwrap();
        let conj = as_conj(&h).unwrap();
        let sizes: Vec<usize> = (0..3).map(|c| conj.class_data().size(c)).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
        let t = h.parse_element("T").unwrap();
        let r = h.parse_element("R").unwrap();
        assert_eq!(h.parse_element("C_(12)").unwrap(), t);
        assert_eq!(h.parse_element("(123)").unwrap(), r);
        let tt = h.convolve(&t, &t).unwrap();
        assert_eq!(tt.coefficient(&h.identity()), Some(&Scalar::ratio(1, 3)));
        assert_eq!(tt.coefficient(&r), Some(&Scalar::ratio(2, 3)));
        let rr = h.convolve(&r, &r).unwrap();
        assert_eq!(rr.coefficient(&h.identity()), Some(&Scalar::ratio(1, 2)));
        assert_eq!(rr.coefficient(&r), Some(&Scalar::ratio(1, 2)));
    }

    #[test]
    fn structure_constants_match_brute_force() {
        for name in ["s3", "s4", "sl2_2", "sl2_4"] {
            let g = named_group(name).unwrap();
            let h = conj_hypergroup(&g).unwrap();
            let data = as_conj(&h).unwrap().class_data().clone();
            for c in 0..data.len() {
                for d in 0..data.len() {
                    let m = h
                        .convolve(&ElementId::Index(c as u64), &ElementId::Index(d as u64))
                        .unwrap();
                    for e in 0..data.len() {
                        let want = brute_conv(&g, &data.classes()[c], &data.classes()[d], &data.classes()[e]);
                        let got = m
                            .coefficient(&ElementId::Index(e as u64))
                            .map(|s| s.as_rational().unwrap().clone())
                            .unwrap_or_else(BigRational::zero);
                        assert_eq!(got, want, "{name} {c} {d} {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn haar_is_class_size() {
        for name in ["s3", "s4"] {
            let g = named_group(name).unwrap();
            let h = conj_hypergroup(&g).unwrap();
            let data = as_conj(&h).unwrap().class_data().clone();
            for (c, members) in data.classes().iter().enumerate() {
                let inv: Vec<u32> = data.classes()[data.inverse(c)].clone();
                let pairs = inv
                    .iter()
                    .flat_map(|&x| members.iter().map(move |&y| (x, y)))
                    .filter(|&(x, y)| g.mul(x, y) == 0)
                    .count();
                let oracle = Scalar::ratio((members.len() * members.len()) as i64, pairs as i64);
                assert_eq!(h.haar(&ElementId::Index(c as u64)).unwrap(), oracle);
            }
        }
    }

    #[test]
    fn psi_bridge() {
        for name in ["s3", "s4", "z2"] {
            let r = psi_isomorphism_check(&named_group(name).unwrap(), 0, 1).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let trivial = GroupTable::cyclic(1).unwrap();
        assert!(psi_isomorphism_check(&trivial, 0, 1).unwrap().passed());
        let sampled = psi_isomorphism_check(&named_group("s4").unwrap(), 7, 3).unwrap();
        assert_eq!(sampled.pairs_checked, 7);
    }

    #[test]
    fn abelian_group_gives_point_masses() {
        let h = conj_hypergroup(&GroupTable::cyclic(2).unwrap()).unwrap();
        for x in h.elements(2) {
            for y in h.elements(2) {
                assert!(h.convolve(&x, &y).unwrap().as_point().is_some());
            }
        }
    }

    #[test]
    fn quotient_classes() {
        let h = conj_hypergroup(&named_group("s3").unwrap()).unwrap();
        let g = as_conj(&h).unwrap().group().clone();
        let a3: Vec<u32> = ["e", "(123)", "(132)"].iter().map(|n| g.find(n).unwrap()).collect();
        let (q, map) = conj_quotient(&h, &a3).unwrap();
        assert_eq!(q.size(), Some(2));
        assert_eq!(map[0].1, q.identity());
        assert_eq!(map[2].1, q.identity());
        assert_ne!(map[1].1, q.identity());
    }
}
