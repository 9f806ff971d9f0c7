//! Feature values and schemas.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One feature value. `Pad` and `Mask` are out-of-band tokens that never
/// belong to a feature domain.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Cat(u32),
    Real(f64),
    Pad,
    Mask,
}

impl Value {
    pub fn is_token(&self) -> bool {
        matches!(self, Value::Pad | Value::Mask)
    }

    pub fn as_cat(&self) -> Option<u32> {
        match self {
            Value::Cat(c) => Some(*c),
            _ => None,
        }
    }

    /// Numeric reading of an in-domain value.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Cat(c) => Some(*c as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Cat(_) => 0,
            Value::Real(_) => 1,
            Value::Pad => 2,
            Value::Mask => 3,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Cat(a), Value::Cat(b)) => a.cmp(b),
            (Value::Real(a), Value::Real(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Cat(c) => c.hash(state),
            Value::Real(r) => r.to_bits().hash(state),
            _ => {}
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Cat(c) => write!(f, "{c}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Pad => f.write_str("pad"),
            Value::Mask => f.write_str("mask"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            Value::Cat(c) => s.serialize_u32(*c),
            Value::Real(r) => s.serialize_f64(*r),
            Value::Pad => s.serialize_str("pad"),
            Value::Mask => s.serialize_str("mask"),
        }
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a non-negative integer, a number, \"pad\" or \"mask\"")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> core::result::Result<Value, E> {
        u32::try_from(v)
            .map(Value::Cat)
            .map_err(|_| E::custom("categorical code out of range"))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> core::result::Result<Value, E> {
        if v < 0 {
            return Err(E::custom("categorical codes are non-negative"));
        }
        self.visit_u64(v as u64)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> core::result::Result<Value, E> {
        Ok(Value::Real(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> core::result::Result<Value, E> {
        match v {
            "pad" => Ok(Value::Pad),
            "mask" => Ok(Value::Mask),
            _ => Err(E::custom(format!("unknown token {v:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        d.deserialize_any(ValueVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Cat { card: u32 },
    Real,
}

/// Per-index kinds. Serialized as `{"kinds": [...], "cards": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaRepr", into = "SchemaRepr")]
pub struct Schema {
    kinds: Vec<FeatureKind>,
}

#[derive(Serialize, Deserialize)]
struct SchemaRepr {
    kinds: Vec<String>,
    cards: Vec<Option<u32>>,
}

impl TryFrom<SchemaRepr> for Schema {
    type Error = Error;

    fn try_from(r: SchemaRepr) -> Result<Self> {
        if r.kinds.len() != r.cards.len() {
            return Err(Error::config("schema kinds and cards differ in length"));
        }
        let kinds = r
            .kinds
            .iter()
            .zip(&r.cards)
            .map(|(k, c)| match (k.as_str(), c) {
                ("cat", Some(card)) if *card > 0 => Ok(FeatureKind::Cat { card: *card }),
                ("cat", _) => Err(Error::config("categorical feature needs a positive card")),
                ("real", None) => Ok(FeatureKind::Real),
                ("real", Some(_)) => Err(Error::config("real feature must have null card")),
                (other, _) => Err(Error::config(format!("unknown feature kind {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Schema::new(kinds)
    }
}

impl From<Schema> for SchemaRepr {
    fn from(s: Schema) -> Self {
        let mut kinds = Vec::with_capacity(s.len());
        let mut cards = Vec::with_capacity(s.len());
        for k in s.kinds {
            match k {
                FeatureKind::Cat { card } => {
                    kinds.push(String::from("cat"));
                    cards.push(Some(card));
                }
                FeatureKind::Real => {
                    kinds.push(String::from("real"));
                    cards.push(None);
                }
            }
        }
        SchemaRepr { kinds, cards }
    }
}

impl Schema {
    pub fn new(kinds: Vec<FeatureKind>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::config("schema has no features"));
        }
        if kinds.iter().any(|k| matches!(k, FeatureKind::Cat { card: 0 })) {
            return Err(Error::config("categorical cardinality must be positive"));
        }
        Ok(Schema { kinds })
    }

    pub fn categorical(cards: &[u32]) -> Result<Self> {
        Schema::new(cards.iter().map(|&card| FeatureKind::Cat { card }).collect())
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kinds(&self) -> &[FeatureKind] {
        &self.kinds
    }

    pub fn kind(&self, i: usize) -> FeatureKind {
        self.kinds[i]
    }

    pub fn all_categorical(&self) -> bool {
        self.kinds.iter().all(|k| matches!(k, FeatureKind::Cat { .. }))
    }

    pub fn cards(&self) -> Option<Vec<u32>> {
        self.kinds
            .iter()
            .map(|k| match k {
                FeatureKind::Cat { card } => Some(*card),
                FeatureKind::Real => None,
            })
            .collect()
    }

    /// Whether `v` lies in feature `i`'s value domain.
    pub fn in_domain(&self, i: usize, v: &Value) -> bool {
        match (self.kinds[i], v) {
            (FeatureKind::Cat { card }, Value::Cat(c)) => *c < card,
            (FeatureKind::Real, Value::Real(r)) => r.is_finite(),
            _ => false,
        }
    }

    /// Rejects tokens that collide with any feature domain.
    pub fn check_token(&self, token: &Value) -> Result<()> {
        if (0..self.len()).any(|i| self.in_domain(i, token)) {
            return Err(Error::config(format!("token {token} lies inside a feature domain")));
        }
        Ok(())
    }

    /// Checks a full feature vector.
    pub fn validate(&self, x: &[Value]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), got: x.len() });
        }
        for (i, v) in x.iter().enumerate() {
            if !self.in_domain(i, v) {
                return Err(Error::data(format!("value {v} outside the domain of feature {i}")));
            }
        }
        Ok(())
    }

    /// Checks a vector where unobserved positions hold `Value::Mask`.
    pub fn validate_view(&self, x: &[Value]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), got: x.len() });
        }
        for (i, v) in x.iter().enumerate() {
            if !matches!(v, Value::Mask) && !self.in_domain(i, v) {
                return Err(Error::data(format!("value {v} outside the domain of feature {i}")));
            }
        }
        Ok(())
    }

    /// Integer codes coerced to reals where the schema asks for reals.
    pub fn coerce(&self, x: &mut [Value]) {
        for (v, k) in x.iter_mut().zip(&self.kinds) {
            if let (FeatureKind::Real, Value::Cat(c)) = (k, *v) {
                *v = Value::Real(c as f64);
            }
        }
    }

    /// Number of full assignments when every feature is categorical.
    pub fn support_size(&self) -> Option<u128> {
        self.cards().map(|c| c.iter().map(|&k| k as u128).product())
    }
}
