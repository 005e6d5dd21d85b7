use std::any::Any;
use std::collections::HashMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{check_axioms, Hypergroup, HypergroupRule};
use crate::error::{HyplabError, Result};
use crate::measures::{ElementId, Scalar};

/// A finite hypergroup given by an explicit convolution table.
///
/// Enumeration lists the identity first, then the remaining elements in file order.
#[derive(Clone, Debug)]
pub struct TableHypergroup {
    tag: String,
    names: Vec<String>,
    identity: usize,
    involution: Vec<usize>,
    /// Row-major `m × m` table of raw coefficient lists.
    table: Vec<Vec<(usize, Scalar)>>,
    order: Vec<usize>,
    position: Vec<usize>,
}

impl TableHypergroup {
    pub fn new(
        tag: impl Into<String>,
        names: Vec<String>,
        identity: usize,
        involution: Vec<usize>,
        table: Vec<Vec<(usize, Scalar)>>,
    ) -> Result<Self> {
        let m = names.len();
        let bad = |s: String| HyplabError::InvalidParam(format!("hypergroup table: {s}"));
        if m == 0 {
            return Err(bad("no elements".into()));
        }
        if identity >= m || involution.len() != m || table.len() != m * m {
            return Err(bad("inconsistent sizes".into()));
        }
        if involution.iter().any(|&i| i >= m) || table.iter().flatten().any(|(t, _)| *t >= m) {
            return Err(bad("index out of range".into()));
        }
        let mut order = vec![identity];
        order.extend((0..m).filter(|&i| i != identity));
        let mut position = vec![0; m];
        for (p, &i) in order.iter().enumerate() {
            position[i] = p;
        }
        Ok(TableHypergroup {
            tag: tag.into(),
            names,
            identity,
            involution,
            table,
            order,
            position,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn entry(&self, x: usize, y: usize) -> &[(usize, Scalar)] {
        &self.table[x * self.names.len() + y]
    }

    pub fn entry_mut(&mut self, x: usize, y: usize) -> &mut Vec<(usize, Scalar)> {
        let m = self.names.len();
        &mut self.table[x * m + y]
    }

    fn index_of(&self, x: &ElementId) -> usize {
        x.index().expect("table id") as usize
    }

    /// Reads the JSON table format without validating the axioms.
    pub fn from_json_unchecked(tag: &str, v: &Value) -> Result<Self> {
        let bad = |s: &str| HyplabError::InvalidParam(format!("hypergroup table: {s}"));
        let names: Vec<String> = v["elements"]
            .as_array()
            .ok_or_else(|| bad("missing elements"))?
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("element names must be strings"))
            })
            .collect::<Result<_>>()?;
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if index.len() != names.len() {
            return Err(bad("duplicate element names"));
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| bad(&format!("unknown element {s:?}")))
        };
        let identity = lookup(v["identity"].as_str().ok_or_else(|| bad("missing identity"))?)?;
        let inv_map = v["involution"].as_object().ok_or_else(|| bad("missing involution"))?;
        let mut involution = vec![usize::MAX; names.len()];
        for (k, val) in inv_map {
            involution[lookup(k)?] = lookup(val.as_str().ok_or_else(|| bad("involution values must be names"))?)?;
        }
        if involution.contains(&usize::MAX) {
            return Err(bad("involution must be given for every element"));
        }
        let m = names.len();
        let conv = v["convolution"].as_object().ok_or_else(|| bad("missing convolution"))?;
        let mut table: Vec<Option<Vec<(usize, Scalar)>>> = vec![None; m * m];
        for (key, terms) in conv {
            let (a, b) = key
                .split_once('|')
                .ok_or_else(|| bad(&format!("bad pair key {key:?}")))?;
            let (a, b) = (lookup(a)?, lookup(b)?);
            let mut row = Vec::new();
            for t in terms.as_array().ok_or_else(|| bad("terms must be a list"))? {
                let elem = lookup(t["elem"].as_str().ok_or_else(|| bad("term elem must be a name"))?)?;
                let c = match (&t["num"], &t["den"]) {
                    (Value::String(n), Value::String(d)) => Scalar::from_parts(n, d)?,
                    (Value::Number(n), Value::Number(d)) => Scalar::from_parts(&n.to_string(), &d.to_string())?,
                    _ => return Err(bad("term needs num and den")),
                };
                row.push((elem, c));
            }
            table[a * m + b] = Some(row);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| bad(&format!("missing pair {}|{}", names[i / m], names[i % m]))))
            .collect::<Result<Vec<_>>>()?;
        TableHypergroup::new(tag, names, identity, involution, table)
    }

    pub fn to_json(&self) -> Value {
        let mut conv = Map::new();
        let m = self.names.len();
        for a in 0..m {
            for b in 0..m {
                let terms: Vec<Value> = self
                    .entry(a, b)
                    .iter()
                    .map(|(t, c)| {
                        let (n, d) = c.num_den().unwrap_or_else(|| (c.to_f64().to_string(), "1".into()));
                        json!({"elem": self.names[*t], "num": n, "den": d})
                    })
                    .collect();
                conv.insert(format!("{}|{}", self.names[a], self.names[b]), Value::Array(terms));
            }
        }
        let inv: Map<String, Value> = (0..m)
            .map(|i| {
                (
                    self.names[i].clone(),
                    Value::String(self.names[self.involution[i]].clone()),
                )
            })
            .collect();
        json!({
            "elements": self.names,
            "identity": self.names[self.identity],
            "involution": inv,
            "convolution": conv,
        })
    }

    /// Snapshot of any finite hypergroup as an explicit table.
    pub fn from_hypergroup(h: &Hypergroup) -> Result<Self> {
        let n = h
            .size()
            .ok_or_else(|| HyplabError::InvalidParam("cannot tabulate an infinite carrier".into()))?;
        let elems = h.elements(n);
        let pos: HashMap<&ElementId, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let names: Vec<String> = elems.iter().map(|x| h.label(x)).collect();
        let identity = pos[&h.identity()];
        let involution = elems
            .iter()
            .map(|x| Ok(pos[&h.involution(x)?]))
            .collect::<Result<Vec<_>>>()?;
        let mut table = Vec::with_capacity(n * n);
        for x in &elems {
            for y in &elems {
                table.push(
                    h.convolve(x, y)?
                        .terms()
                        .iter()
                        .map(|(t, c)| (pos[t], c.clone()))
                        .collect(),
                );
            }
        }
        TableHypergroup::new(format!("table:{}", h.carrier()), names, identity, involution, table)
    }
}

impl HypergroupRule for TableHypergroup {
    fn carrier(&self) -> &str {
        &self.tag
    }

    fn identity(&self) -> ElementId {
        ElementId::Index(self.identity as u64)
    }

    fn contains(&self, x: &ElementId) -> bool {
        matches!(x, ElementId::Index(i) if (*i as usize) < self.names.len())
    }

    fn involution(&self, x: &ElementId) -> ElementId {
        ElementId::Index(self.involution[self.index_of(x)] as u64)
    }

    fn convolve_terms(&self, x: &ElementId, y: &ElementId) -> Vec<(ElementId, Scalar)> {
        self.entry(self.index_of(x), self.index_of(y))
            .iter()
            .map(|(t, c)| (ElementId::Index(*t as u64), c.clone()))
            .collect()
    }

    fn size(&self) -> Option<usize> {
        Some(self.names.len())
    }

    fn enumerate(&self, n: usize) -> Vec<ElementId> {
        self.order.iter().take(n).map(|&i| ElementId::Index(i as u64)).collect()
    }

    fn rank_of(&self, x: &ElementId) -> Option<usize> {
        self.contains(x).then(|| self.position[self.index_of(x)])
    }

    fn is_commutative(&self) -> bool {
        let m = self.names.len();
        (0..m).all(|a| {
            (0..m).all(|b| {
                let mut p: Vec<_> = self.entry(a, b).to_vec();
                let mut q: Vec<_> = self.entry(b, a).to_vec();
                p.sort_by_key(|t| t.0);
                q.sort_by_key(|t| t.0);
                p == q
            })
        })
    }

    fn label(&self, x: &ElementId) -> String {
        match x {
            ElementId::Index(i) if (*i as usize) < self.names.len() => self.names[*i as usize].clone(),
            other => other.to_string(),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        self.names
            .iter()
            .position(|n| n == s)
            .map(|i| ElementId::Index(i as u64))
    }

    fn describe(&self) -> Value {
        json!({"family": "table", "carrier": self.tag, "size": self.names.len()})
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

impl Hypergroup {
    /// Loads a table file and validates every axiom at full size.
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Hypergroup> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text)?;
        let tag = format!(
            "table:{}",
            path.file_stem().and_then(|s| s.to_str()).unwrap_or("anonymous")
        );
        Hypergroup::from_table(TableHypergroup::from_json_unchecked(&tag, &v)?)
    }

    pub fn from_table(t: TableHypergroup) -> Result<Hypergroup> {
        let n = t.len();
        let h = Hypergroup::new(t);
        let report = check_axioms(&h.with_associativity_cap(n), n);
        if !report.passed() {
            let first = report
                .checks
                .iter()
                .find(|c| !c.passed)
                .and_then(|c| {
                    c.witnesses
                        .first()
                        .map(|w| format!("{:?} {:?}: {}", c.axiom, w.elements, w.detail))
                })
                .unwrap_or_default();
            return Err(HyplabError::Axiom(format!("table rejected: {first}")));
        }
        Ok(h)
    }
}
