use std::collections::{HashMap, VecDeque};
use std::path::Path;

use serde_json::Value;

use crate::error::{HyplabError, Result};

/// Largest group accepted from permutation generators.
pub const MAX_GROUP_ORDER: usize = 100_000;

/// Arithmetic in GF(2^n) for 1 ≤ n ≤ 8.
#[derive(Clone, Copy, Debug)]
pub struct Gf2n {
    degree: u32,
    modulus: u32,
}

impl Gf2n {
    pub fn new(degree: u32) -> Result<Self> {
        // Conway-style irreducible polynomials, bit i = coefficient of x^i.
        let modulus = match degree {
            1 => 0b11,
            2 => 0b111,
            3 => 0b1011,
            4 => 0b10011,
            5 => 0b100101,
            6 => 0b1000011,
            7 => 0b10000011,
            8 => 0b100011101,
            _ => return Err(HyplabError::InvalidParam(format!("GF(2^{degree}) unsupported"))),
        };
        Ok(Gf2n { degree, modulus })
    }

    pub fn size(&self) -> u32 {
        1 << self.degree
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let mut acc = 0u32;
        let (mut a, mut b) = (a, b);
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & (1 << self.degree) != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Table(Vec<u32>),
    Perm {
        perms: Vec<Vec<u32>>,
        index: HashMap<Vec<u32>, u32>,
    },
    Matrix {
        field: Gf2n,
        mats: Vec<[u32; 4]>,
        index: HashMap<[u32; 4], u32>,
    },
}

/// A finite group with indexed elements; index 0 is always the identity.
#[derive(Clone, Debug)]
pub struct GroupTable {
    name: String,
    names: Vec<String>,
    inverse: Vec<u32>,
    generators: Vec<u32>,
    class_names: Option<Vec<String>>,
    repr: Repr,
}

impl GroupTable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_name(&self, a: u32) -> &str {
        &self.names[a as usize]
    }

    pub fn find(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Labels for conjugacy classes, in class order.
    pub fn with_class_names(mut self, names: Vec<String>) -> Self {
        self.class_names = Some(names);
        self
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Table(t) => t[a as usize * self.order() + b as usize],
            Repr::Perm { perms, index } => {
                let (p, q) = (&perms[a as usize], &perms[b as usize]);
                let r: Vec<u32> = q.iter().map(|&i| p[i as usize]).collect();
                index[&r]
            }
            Repr::Matrix { field, mats, index } => {
                let (x, y) = (mats[a as usize], mats[b as usize]);
                let f = |i: u32, j: u32| field.mul(i, j);
                let r = [
                    f(x[0], y[0]) ^ f(x[1], y[2]),
                    f(x[0], y[1]) ^ f(x[1], y[3]),
                    f(x[2], y[0]) ^ f(x[3], y[2]),
                    f(x[2], y[1]) ^ f(x[3], y[3]),
                ];
                index[&r]
            }
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn conjugate(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Ingests a multiplication table, verifying closure, identity, inverses and associativity.
    /// Elements are re-indexed so that the identity comes first.
    pub fn from_table(table: Vec<Vec<u32>>, names: Option<Vec<String>>) -> Result<Self> {
        let m = table.len();
        let bad = |s: String| HyplabError::GroupValidation(s);
        if m == 0 {
            return Err(bad("empty table".into()));
        }
        if table.iter().any(|r| r.len() != m) {
            return Err(bad("table is not square".into()));
        }
        if table.iter().flatten().any(|&x| x as usize >= m) {
            return Err(bad("closure fails: entry out of range".into()));
        }
        let e = (0..m)
            .find(|&i| (0..m).all(|j| table[i][j] as usize == j && table[j][i] as usize == j))
            .ok_or_else(|| bad("no identity element".into()))?;
        for (a, row) in table.iter().enumerate() {
            if !(0..m).any(|b| row[b] as usize == e && table[b][a] as usize == e) {
                return Err(bad(format!("element {a} has no inverse")));
            }
        }
        for a in 0..m {
            for b in 0..m {
                let ab = table[a][b] as usize;
                for c in 0..m {
                    if table[ab][c] != table[a][table[b][c] as usize] {
                        return Err(bad(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let names = match names {
            Some(n) if n.len() == m => n,
            Some(_) => return Err(bad("name list length differs from order".into())),
            None => (0..m).map(|i| format!("g{i}")).collect(),
        };
        // Move the identity to index 0, keep the rest in input order.
        let mut order = vec![e];
        order.extend((0..m).filter(|&i| i != e));
        let mut pos = vec![0u32; m];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p as u32;
        }
        let mut flat = vec![0u32; m * m];
        for (pa, &a) in order.iter().enumerate() {
            for (pb, &b) in order.iter().enumerate() {
                flat[pa * m + pb] = pos[table[a][b] as usize];
            }
        }
        let names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        let inverse: Vec<u32> = (0..m as u32)
            .map(|a| {
                (0..m as u32)
                    .find(|&b| flat[a as usize * m + b as usize] == 0)
                    .expect("checked")
            })
            .collect();
        let mut g = GroupTable {
            name: "table".into(),
            names,
            inverse,
            generators: Vec::new(),
            class_names: None,
            repr: Repr::Table(flat),
        };
        g.generators = g.greedy_generators();
        Ok(g)
    }

    /// Closes a set of permutations (images of 0..degree) under composition.
    pub fn from_permutations(degree: usize, generators: Vec<Vec<u32>>) -> Result<Self> {
        let bad = |s: String| HyplabError::GroupValidation(s);
        for g in &generators {
            let mut seen = vec![false; degree];
            if g.len() != degree {
                return Err(bad(format!("permutation {g:?} has wrong degree")));
            }
            for &i in g {
                if i as usize >= degree || seen[i as usize] {
                    return Err(bad(format!("{g:?} is not a permutation")));
                }
                seen[i as usize] = true;
            }
        }
        let id: Vec<u32> = (0..degree as u32).collect();
        let mut perms = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for g in &generators {
                let p: Vec<u32> = perms[a].iter().map(|&i| g[i as usize]).collect();
                if !index.contains_key(&p) {
                    if perms.len() >= MAX_GROUP_ORDER {
                        return Err(bad(format!("group order exceeds {MAX_GROUP_ORDER}")));
                    }
                    index.insert(p.clone(), perms.len() as u32);
                    perms.push(p);
                    queue.push_back(perms.len() - 1);
                }
            }
        }
        let names = perms.iter().map(|p| cycle_name(p)).collect();
        let inverse = perms
            .iter()
            .map(|p| {
                let mut q = vec![0u32; degree];
                for (i, &j) in p.iter().enumerate() {
                    q[j as usize] = i as u32;
                }
                index[&q]
            })
            .collect();
        let gens: Vec<u32> = generators.iter().map(|g| index[g]).collect();
        Ok(GroupTable {
            name: format!("perm{degree}"),
            names,
            inverse,
            generators: gens,
            class_names: None,
            repr: Repr::Perm { perms, index },
        })
    }

    /// The symmetric group on n letters.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HyplabError::InvalidParam("S_0 is not supported".into()));
        }
        if n == 1 {
            return GroupTable::from_permutations(1, vec![vec![0]]).map(|g| g.with_name("s1"));
        }
        let mut swap: Vec<u32> = (0..n as u32).collect();
        swap.swap(0, 1);
        let cycle: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        Ok(GroupTable::from_permutations(n, vec![swap, cycle])?.with_name(format!("s{n}")))
    }

    /// The cyclic group ℤ/n.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HyplabError::InvalidParam("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| ((a + b) % n) as u32).collect()).collect();
        let names = (0..n).map(|i| i.to_string()).collect();
        Ok(GroupTable::from_table(table, Some(names))?.with_name(format!("z{n}")))
    }

    /// SL(2, 2^n) as 2×2 matrices of determinant 1 over GF(2^n).
    pub fn sl2_even(n: u32) -> Result<Self> {
        let field = Gf2n::new(n)?;
        let q = field.size();
        let mut mats = vec![[1, 0, 0, 1]];
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let m = [a, b, c, d];
                        if field.mul(a, d) ^ field.mul(b, c) == 1 && m != [1, 0, 0, 1] {
                            mats.push(m);
                        }
                    }
                }
            }
        }
        if mats.len() > MAX_GROUP_ORDER {
            return Err(HyplabError::GroupValidation(format!(
                "group order exceeds {MAX_GROUP_ORDER}"
            )));
        }
        let index: HashMap<[u32; 4], u32> = mats.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        let names = mats
            .iter()
            .map(|m| format!("[{} {}; {} {}]", m[0], m[1], m[2], m[3]))
            .collect();
        // In characteristic 2 the inverse of [a b; c d] with det 1 is [d b; c a].
        let inverse = mats.iter().map(|m| index[&[m[3], m[1], m[2], m[0]]]).collect();
        let mut gens = Vec::new();
        for t in 1..q {
            gens.push(index[&[1, t, 0, 1]]);
            gens.push(index[&[1, 0, t, 1]]);
        }
        Ok(GroupTable {
            name: format!("sl2_{q}"),
            names,
            inverse,
            generators: gens,
            class_names: None,
            repr: Repr::Matrix { field, mats, index },
        })
    }

    /// Reads `{"order", "table"}` or `{"degree", "generators"}` with optional `names`,
    /// `class_names` and `name`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| HyplabError::GroupValidation(format!("group json: {s}"));
        let strings = |key: &str| -> Result<Option<Vec<String>>> {
            match &v[key] {
                Value::Null => Ok(None),
                Value::Array(a) => a
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| bad("names must be strings"))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
                _ => Err(bad("names must be a list")),
            }
        };
        let ints = |x: &Value| -> Result<Vec<u32>> {
            x.as_array()
                .ok_or_else(|| bad("expected a list of integers"))?
                .iter()
                .map(|i| i.as_u64().map(|i| i as u32).ok_or_else(|| bad("expected integers")))
                .collect()
        };
        let mut g = if let Some(t) = v.get("table") {
            let rows = t
                .as_array()
                .ok_or_else(|| bad("table must be a list of rows"))?
                .iter()
                .map(ints)
                .collect::<Result<Vec<_>>>()?;
            if let Some(m) = v["order"].as_u64() {
                if m as usize != rows.len() {
                    return Err(bad("order does not match table size"));
                }
            }
            GroupTable::from_table(rows, strings("names")?)?
        } else if let Some(gens) = v.get("generators") {
            let degree = v["degree"].as_u64().ok_or_else(|| bad("missing degree"))? as usize;
            let gens = gens
                .as_array()
                .ok_or_else(|| bad("generators must be a list"))?
                .iter()
                .map(ints)
                .collect::<Result<Vec<_>>>()?;
            GroupTable::from_permutations(degree, gens)?
        } else {
            return Err(bad("need either table or generators"));
        };
        if let Some(n) = v["name"].as_str() {
            g.name = n.to_string();
        }
        g.class_names = strings("class_names")?;
        Ok(g)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let mut g = GroupTable::from_json(&v)?;
        if v["name"].is_null() {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                g.name = stem.to_string();
            }
        }
        Ok(g)
    }

    fn greedy_generators(&self) -> Vec<u32> {
        let m = self.order();
        let mut inside = vec![false; m];
        inside[0] = true;
        let mut members = vec![0u32];
        let mut gens = Vec::new();
        for x in 0..m as u32 {
            if inside[x as usize] {
                continue;
            }
            gens.push(x);
            let mut queue: VecDeque<u32> = members.iter().copied().collect();
            while let Some(a) = queue.pop_front() {
                for &g in &gens {
                    let b = self.mul(a, g);
                    if !inside[b as usize] {
                        inside[b as usize] = true;
                        members.push(b);
                        queue.push_back(b);
                    }
                }
            }
        }
        gens
    }

    /// Checks that `subgroup` is a normal subgroup.
    pub fn check_normal(&self, subgroup: &[u32]) -> Result<()> {
        let mut inside = vec![false; self.order()];
        for &n in subgroup {
            inside[n as usize] = true;
        }
        let bad = |s: String| HyplabError::GroupValidation(s);
        if !inside[0] {
            return Err(bad("subgroup lacks the identity".into()));
        }
        for &a in subgroup {
            if !inside[self.inv(a) as usize] {
                return Err(bad("subgroup not closed under inverses".into()));
            }
            for &b in subgroup {
                if !inside[self.mul(a, b) as usize] {
                    return Err(bad("subgroup not closed under products".into()));
                }
            }
            for &g in &self.generators {
                if !inside[self.conjugate(g, a) as usize] {
                    return Err(bad("subgroup is not normal".into()));
                }
            }
        }
        Ok(())
    }

    /// G/N with the projection; coset names are `xN` with `N` for the identity coset.
    pub fn quotient(&self, subgroup: &[u32]) -> Result<(GroupTable, Vec<u32>)> {
        self.check_normal(subgroup)?;
        let m = self.order();
        let mut coset = vec![u32::MAX; m];
        let mut reps = Vec::new();
        for x in 0..m as u32 {
            if coset[x as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &n in subgroup {
                coset[self.mul(x, n) as usize] = id;
            }
        }
        let k = reps.len();
        let table: Vec<Vec<u32>> = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset[self.mul(a, b) as usize]).collect())
            .collect();
        let names = reps
            .iter()
            .map(|&r| {
                if r == 0 {
                    "N".to_string()
                } else {
                    format!("{}N", self.names[r as usize])
                }
            })
            .collect();
        let q = GroupTable::from_table(table, Some(names))?.with_name(format!("{}/N{k}", self.name));
        Ok((q, coset))
    }
}

/// Cycle notation with 1-based points; `e` for the identity.
fn cycle_name(p: &[u32]) -> String {
    let n = p.len();
    let mut seen = vec![false; n];
    let sep = if n > 9 { " " } else { "" };
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push((i + 1).to_string());
            i = p[i] as usize;
        }
        out.push('(');
        out.push_str(&cyc.join(sep));
        out.push(')');
    }
    if out.is_empty() {
        "e".into()
    } else {
        out
    }
}
