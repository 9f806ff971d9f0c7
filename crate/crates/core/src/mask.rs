//! Selection masks, explanations and the value transforms built on them.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::value::{Schema, Value};

/// Binary selection over `d` features. Orders lexicographically by bits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SelectionMask {
    bits: Vec<bool>,
}

impl SelectionMask {
    pub fn new(bits: Vec<bool>) -> Self {
        SelectionMask { bits }
    }

    pub fn from_u8(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::data("mask entries must be 0 or 1")),
            })
            .collect::<Result<Vec<_>>>()
            .map(SelectionMask::new)
    }

    pub fn from_indices(d: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = alloc::vec![false; d];
        for &i in indices {
            if i >= d {
                return Err(Error::config("mask index out of range"));
            }
            bits[i] = true;
        }
        Ok(SelectionMask { bits })
    }

    /// Unit vector selecting only feature `i`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut bits = alloc::vec![false; d];
        bits[i] = true;
        SelectionMask { bits }
    }

    pub fn full(d: usize) -> Self {
        SelectionMask { bits: alloc::vec![true; d] }
    }

    pub fn empty(d: usize) -> Self {
        SelectionMask { bits: alloc::vec![false; d] }
    }

    /// Mask whose bit `i` is bit `i` of `code`.
    pub fn from_code(d: usize, code: u64) -> Self {
        SelectionMask { bits: (0..d).map(|i| (code >> i) & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn complement(&self) -> Self {
        SelectionMask { bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        SelectionMask { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect() }
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }

    /// All masks over `d` features with at most `k` ones, in lexicographic order.
    pub fn all_up_to(d: usize, k: usize) -> Vec<SelectionMask> {
        assert!(d < 64, "too many features to enumerate");
        let mut out: Vec<SelectionMask> = (0..(1u64 << d))
            .filter(|c| c.count_ones() as usize <= k)
            .map(|c| SelectionMask::from_code(d, c))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for SelectionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

impl Serialize for SelectionMask {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.to_u8().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SelectionMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        SelectionMask::from_u8(&raw).map_err(serde::de::Error::custom)
    }
}

/// The pair (mask, selected values in ascending index order).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Explanation {
    pub mask: SelectionMask,
    pub values: Vec<Value>,
}

impl Explanation {
    /// Re-embeds into a length-d vector with `Value::Mask` at unselected positions.
    pub fn to_view(&self) -> Vec<Value> {
        let mut out = alloc::vec![Value::Mask; self.mask.len()];
        for (i, v) in self.mask.indices().zip(&self.values) {
            out[i] = *v;
        }
        out
    }
}

fn check_len(x: &[Value], mask: &SelectionMask) -> Result<()> {
    if x.len() != mask.len() {
        return Err(Error::Dimension { expected: mask.len(), got: x.len() });
    }
    Ok(())
}

pub fn extract_explanation(x: &[Value], mask: &SelectionMask) -> Result<Explanation> {
    check_len(x, mask)?;
    Ok(Explanation { mask: mask.clone(), values: mask.indices().map(|i| x[i]).collect() })
}

pub fn complement_mask(mask: &SelectionMask) -> SelectionMask {
    mask.complement()
}

/// Selected values left-aligned, remainder filled with `pad`.
pub fn val_padded(exp: &Explanation, pad: Value, schema: &Schema) -> Result<Vec<Value>> {
    schema.check_token(&pad)?;
    if exp.mask.len() != schema.len() {
        return Err(Error::Dimension { expected: schema.len(), got: exp.mask.len() });
    }
    let mut out = exp.values.clone();
    out.resize(exp.mask.len(), pad);
    Ok(out)
}

/// Keeps selected positions and replaces the rest with `token`.
pub fn apply_mask_token(x: &[Value], mask: &SelectionMask, token: Value, schema: &Schema) -> Result<Vec<Value>> {
    schema.check_token(&token)?;
    check_len(x, mask)?;
    Ok(masked_view(x, mask, token))
}

/// Unchecked form of [`apply_mask_token`] used on hot paths.
pub(crate) fn masked_view(x: &[Value], mask: &SelectionMask, token: Value) -> Vec<Value> {
    x.iter().zip(mask.bits()).map(|(v, &b)| if b { *v } else { token }).collect()
}

/// `x_v` with `Value::Mask` elsewhere.
pub fn view(x: &[Value], mask: &SelectionMask) -> Vec<Value> {
    masked_view(x, mask, Value::Mask)
}
