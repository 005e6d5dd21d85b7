use std::any::Any;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::{Hypergroup, HypergroupRule};
use crate::error::{HyplabError, Result};
use crate::measures::{ElementId, Scalar};

/// Component layout of a restricted direct product.
#[derive(Clone, Debug)]
pub enum Slots {
    /// Finitely many named slots.
    Finite(Vec<Hypergroup>),
    /// Countably many copies of one component, indexed by ℕ₀.
    Repeated(Hypergroup),
}

/// Extra structure for products whose infinite continuation is only known in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotFamily {
    /// Slot k is Conj(SL(2, 2^(k+1))); only the first slots are materialized.
    Sl2Even,
}

/// ⊕_i H_i with finitely supported points, stored without identity coordinates.
///
/// Enumeration is graded by Σ_{slot s in the support} (s + rank of the coordinate),
/// then lexicographic on the canonical id.
pub struct RestrictedProduct {
    tag: String,
    slots: Slots,
    family: Option<SlotFamily>,
}

impl RestrictedProduct {
    pub fn slots(&self) -> &Slots {
        &self.slots
    }

    pub fn family(&self) -> Option<SlotFamily> {
        self.family
    }

    pub fn slot_count(&self) -> Option<usize> {
        match &self.slots {
            Slots::Finite(v) => Some(v.len()),
            Slots::Repeated(_) => None,
        }
    }

    pub fn component(&self, slot: u32) -> Option<&Hypergroup> {
        match &self.slots {
            Slots::Finite(v) => v.get(slot as usize),
            Slots::Repeated(h) => Some(h),
        }
    }

    /// All components that can appear, for checks that iterate over them.
    pub fn distinct_components(&self) -> Vec<&Hypergroup> {
        match &self.slots {
            Slots::Finite(v) => v.iter().collect(),
            Slots::Repeated(h) => vec![h],
        }
    }

    /// Infinitely many slots with a non-trivial component.
    pub fn has_infinitely_many_nontrivial_slots(&self) -> bool {
        match &self.slots {
            Slots::Repeated(h) => h.size() != Some(1),
            Slots::Finite(_) => false,
        }
    }

    /// Point with a single non-identity coordinate.
    pub fn single(&self, slot: u32, x: ElementId) -> Result<ElementId> {
        let comp = self
            .component(slot)
            .ok_or_else(|| HyplabError::Carrier(format!("no slot {slot}")))?;
        comp.check_member(&x)?;
        let mut m = BTreeMap::new();
        if x != comp.identity() {
            m.insert(slot, x);
        }
        Ok(ElementId::Product(m))
    }

    /// (δ_x * δ_y)(t) as a product of per-slot coefficients, without expanding the support.
    pub fn coefficient(&self, x: &ElementId, y: &ElementId, t: &ElementId) -> Result<Scalar> {
        let bad = |z: &ElementId| HyplabError::Carrier(format!("{z} is not a product point"));
        let xm = x.slots().ok_or_else(|| bad(x))?;
        let ym = y.slots().ok_or_else(|| bad(y))?;
        let tm = t.slots().ok_or_else(|| bad(t))?;
        let slots: BTreeSet<u32> = xm.keys().chain(ym.keys()).chain(tm.keys()).copied().collect();
        let mut acc = Scalar::one();
        for s in slots {
            let h = self
                .component(s)
                .ok_or_else(|| HyplabError::Carrier(format!("no slot {s}")))?;
            let c = h.convolve(&self.coordinate(xm, s), &self.coordinate(ym, s))?;
            match c.coefficient(&self.coordinate(tm, s)) {
                Some(v) => acc = &acc * v,
                None => return Ok(Scalar::zero()),
            }
        }
        Ok(acc)
    }

    fn coordinate(&self, x: &BTreeMap<u32, ElementId>, slot: u32) -> ElementId {
        x.get(&slot)
            .cloned()
            .unwrap_or_else(|| self.component(slot).expect("valid slot").identity())
    }

    fn grade_budget_elements(&self, budget: usize) -> Vec<ElementId> {
        let mut out = Vec::new();
        let mut current = BTreeMap::new();
        self.fill(0, budget, &mut current, &mut out);
        out.sort();
        out
    }

    fn fill(&self, slot: u32, budget: usize, current: &mut BTreeMap<u32, ElementId>, out: &mut Vec<ElementId>) {
        if budget == 0 {
            out.push(ElementId::Product(current.clone()));
            return;
        }
        let s = slot as usize;
        if s + 1 > budget {
            return;
        }
        let comp = match self.component(slot) {
            Some(c) => c,
            None => return,
        };
        self.fill(slot + 1, budget, current, out);
        let max_rank = budget - s;
        let elems = comp.elements(max_rank + 1);
        for (r, x) in elems.iter().enumerate().skip(1) {
            current.insert(slot, x.clone());
            self.fill(slot + 1, budget - s - r, current, out);
        }
        current.remove(&slot);
    }

    fn max_grade(&self) -> Option<usize> {
        match &self.slots {
            Slots::Finite(v) => v
                .iter()
                .enumerate()
                .map(|(s, h)| h.size().map(|n| if n > 1 { s + n - 1 } else { 0 }))
                .sum(),
            Slots::Repeated(h) if h.size() == Some(1) => Some(0),
            Slots::Repeated(_) => None,
        }
    }
}

impl HypergroupRule for RestrictedProduct {
    fn carrier(&self) -> &str {
        &self.tag
    }

    fn identity(&self) -> ElementId {
        ElementId::Product(BTreeMap::new())
    }

    fn contains(&self, x: &ElementId) -> bool {
        let Some(m) = x.slots() else { return false };
        m.iter().all(|(s, c)| match self.component(*s) {
            Some(h) => h.contains(c) && *c != h.identity(),
            None => false,
        })
    }

    fn involution(&self, x: &ElementId) -> ElementId {
        let m = x.slots().expect("product id");
        ElementId::Product(
            m.iter()
                .map(|(s, c)| {
                    let h = self.component(*s).expect("valid slot");
                    (*s, h.rule().involution(c))
                })
                .collect(),
        )
    }

    fn convolve_terms(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, Scalar)> {
        let (xm, ym) = (x.slots().expect("product id"), y.slots().expect("product id"));
        let slots: BTreeSet<u32> = xm.keys().chain(ym.keys()).copied().collect();
        let mut acc: Vec<(BTreeMap<u32, ElementId>, Scalar)> = vec![(BTreeMap::new(), Scalar::one())];
        for s in slots {
            let h = self.component(s).expect("valid slot");
            let e = h.identity();
            let terms = h
                .rule()
                .convolve_terms(&self.coordinate(xm, s), &self.coordinate(ym, s));
            let mut next = Vec::with_capacity(acc.len() * terms.len());
            for (partial, c) in &acc {
                for (t, d) in &terms {
                    let mut p = partial.clone();
                    if *t != e {
                        p.insert(s, t.clone());
                    }
                    next.push((p, c * d));
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(m, c)| (ElementId::Product(m), c)).collect()
    }

    fn size(&self) -> Option<usize> {
        match &self.slots {
            Slots::Finite(v) => v.iter().map(|h| h.size()).product(),
            Slots::Repeated(h) if h.size() == Some(1) => Some(1),
            Slots::Repeated(_) => None,
        }
    }

    fn enumerate(&self, n: usize) -> Vec<ElementId> {
        let mut out = Vec::with_capacity(n);
        let max = self.max_grade();
        let mut g = 0;
        while out.len() < n {
            if let Some(m) = max {
                if g > m {
                    break;
                }
            }
            out.extend(self.grade_budget_elements(g));
            g += 1;
        }
        out.truncate(n);
        out
    }

    fn is_commutative(&self) -> bool {
        self.distinct_components().iter().all(|h| h.is_commutative())
    }

    fn label(&self, x: &ElementId) -> String {
        match x.slots() {
            Some(m) if m.is_empty() => "e".into(),
            Some(m) => {
                let parts: Vec<String> = m
                    .iter()
                    .map(|(s, c)| match self.component(*s) {
                        Some(h) => format!("{s}:{}", h.label(c)),
                        None => format!("{s}:{c}"),
                    })
                    .collect();
                format!("[{}]", parts.join(","))
            }
            None => x.to_string(),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let s = s.trim();
        if s == "e" || s == "[]" {
            return Some(self.identity());
        }
        let body = s.strip_prefix('[')?.strip_suffix(']')?;
        let mut m = BTreeMap::new();
        for part in body.split(',') {
            let (slot, lab) = part.split_once(':')?;
            let slot: u32 = slot.trim().parse().ok()?;
            let comp = self.component(slot)?;
            let x = comp.parse_element(lab).ok()?;
            if x != comp.identity() {
                m.insert(slot, x);
            }
        }
        Some(ElementId::Product(m))
    }

    fn memoize(&self) -> bool {
        true
    }

    fn describe(&self) -> Value {
        let layout = match &self.slots {
            Slots::Finite(v) => {
                json!({"slots": v.len(), "components": v.iter().map(|h| h.describe()).collect::<Vec<_>>()})
            }
            Slots::Repeated(h) => json!({"slots": "countable", "component": h.describe()}),
        };
        json!({"family": "rdp", "carrier": self.tag, "layout": layout})
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Builds ⊕ of the given slots. Identity coordinates are never stored.
pub fn restricted_product(tag: impl Into<String>, slots: Slots) -> Hypergroup {
    Hypergroup::new(RestrictedProduct {
        tag: tag.into(),
        slots,
        family: None,
    })
}

pub(crate) fn restricted_product_family(tag: impl Into<String>, slots: Slots, family: SlotFamily) -> Hypergroup {
    Hypergroup::new(RestrictedProduct {
        tag: tag.into(),
        slots,
        family: Some(family),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::hypergroups::check_axioms;

    fn s3() -> Hypergroup {
        catalog::conj_hypergroup(&catalog::named_group("s3").unwrap()).unwrap()
    }

    #[test]
    fn single_slot_product_matches_component() {
        let c = s3();
        let p = restricted_product("p1", Slots::Finite(vec![c.clone()]));
        let rp = p.rule_as::<RestrictedProduct>().unwrap();
        for x in c.elements(3) {
            for y in c.elements(3) {
                let lhs = p
                    .convolve(&rp.single(0, x.clone()).unwrap(), &rp.single(0, y.clone()).unwrap())
                    .unwrap();
                let rhs = c.convolve(&x, &y).unwrap();
                let lifted = rhs.pushforward(|t| rp.single(0, t.clone()).ok()).unwrap();
                assert_eq!(lhs.terms(), lifted.terms());
            }
        }
    }

    #[test]
    fn disjoint_slots_give_point_mass() {
        let c = s3();
        let p = restricted_product("p2", Slots::Finite(vec![c.clone(), c.clone()]));
        let rp = p.rule_as::<RestrictedProduct>().unwrap();
        let t = c.parse_element("T").unwrap();
        let r = c.parse_element("R").unwrap();
        let x = rp.single(0, t.clone()).unwrap();
        let y = rp.single(1, r.clone()).unwrap();
        let m = p.convolve(&x, &y).unwrap();
        let mut merged = BTreeMap::new();
        merged.insert(0, t);
        merged.insert(1, r);
        assert_eq!(m.as_point(), Some(&ElementId::Product(merged)));
    }

    #[test]
    fn haar_is_multiplicative() {
        let c = s3();
        let p = restricted_product("p2", Slots::Finite(vec![c.clone(), c.clone()]));
        for x in p.elements(9) {
            let m = x.slots().unwrap();
            let mut expect = Scalar::one();
            for (s, cx) in m {
                let _ = s;
                expect = &expect * &c.haar(cx).unwrap();
            }
            assert_eq!(p.haar(&x).unwrap(), expect);
        }
    }

    #[test]
    fn enumeration_is_graded_and_complete() {
        let c = s3();
        let p = restricted_product("p3", Slots::Finite(vec![c.clone(), c.clone(), c]));
        let all = p.elements(100);
        assert_eq!(all.len(), 27);
        assert_eq!(all[0], p.identity());
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 27);
        assert!(check_axioms(&p, 27).passed());
    }

    #[test]
    fn repeated_slots_enumerate_lazily() {
        let p = restricted_product("rep", Slots::Repeated(s3()));
        let first = p.elements(40);
        assert_eq!(first.len(), 40);
        assert!(first.iter().all(|x| p.contains(x)));
        assert_eq!(p.parse_element("[0:T,5:R]").unwrap().slots().unwrap().len(), 2);
    }
}
