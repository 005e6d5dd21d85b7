use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{HyplabError, Result};

/// Identifier of a point in a hypergroup carrier.
///
/// The derived order is the canonical total order used for measure supports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    /// Table-backed elements and ℕ₀-indexed carriers.
    Index(u64),
    /// Non-increasing tuples such as SU(n) dominant weights.
    Tuple(Vec<u32>),
    /// Restricted-product points: slot → non-identity coordinate.
    Product(BTreeMap<u32, ElementId>),
}

impl ElementId {
    pub fn index(&self) -> Option<u64> {
        match self {
            ElementId::Index(i) => Some(*i),
            _ => None,
        }
    }

    pub fn slots(&self) -> Option<&BTreeMap<u32, ElementId>> {
        match self {
            ElementId::Product(m) => Some(m),
            _ => None,
        }
    }

    /// JSON form: a number, an array of numbers, or an object keyed by slot.
    pub fn to_json(&self) -> Value {
        match self {
            ElementId::Index(i) => Value::from(*i),
            ElementId::Tuple(t) => Value::from(t.clone()),
            ElementId::Product(m) => Value::Object(m.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect()),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_u64()
                .map(ElementId::Index)
                .ok_or_else(|| HyplabError::InvalidParam(format!("bad element index {n}"))),
            Value::Array(items) => items
                .iter()
                .map(|x| {
                    x.as_u64()
                        .and_then(|x| u32::try_from(x).ok())
                        .ok_or_else(|| HyplabError::InvalidParam(format!("bad tuple entry {x}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(ElementId::Tuple),
            Value::Object(map) => {
                let mut slots = BTreeMap::new();
                for (k, v) in map {
                    let slot: u32 = k
                        .parse()
                        .map_err(|_| HyplabError::InvalidParam(format!("bad slot key {k:?}")))?;
                    slots.insert(slot, ElementId::from_json(v)?);
                }
                Ok(ElementId::Product(slots))
            }
            other => Err(HyplabError::InvalidParam(format!("bad element id {other}"))),
        }
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Index(i) => write!(f, "{i}"),
            ElementId::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            ElementId::Product(m) => {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl From<u64> for ElementId {
    fn from(i: u64) -> Self {
        ElementId::Index(i)
    }
}

impl Serialize for ElementId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ElementId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        ElementId::from_json(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut slots = BTreeMap::new();
        slots.insert(0, ElementId::Index(2));
        slots.insert(7, ElementId::Tuple(vec![2, 1, 0]));
        let id = ElementId::Product(slots);
        let back = ElementId::from_json(&id.to_json()).unwrap();
        assert_eq!(id, back);
        let s = serde_json::to_string(&id).unwrap();
        assert_eq!(s, r#"{"0":2,"7":[2,1,0]}"#);
        assert_eq!(serde_json::from_str::<ElementId>(&s).unwrap(), id);
    }

    #[test]
    fn display() {
        assert_eq!(ElementId::Index(3).to_string(), "3");
        assert_eq!(ElementId::Tuple(vec![2, 1, 0]).to_string(), "(2,1,0)");
    }
}
