//! Labeled datasets and the weighted sample view shared by all scores.

use alloc::vec::Vec;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dgp::DiscreteDgp;
use crate::error::{Error, Result};
use crate::value::{Schema, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryLabel(bool);

impl BinaryLabel {
    pub const ZERO: BinaryLabel = BinaryLabel(false);
    pub const ONE: BinaryLabel = BinaryLabel(true);

    pub fn new(v: u8) -> Result<Self> {
        match v {
            0 => Ok(BinaryLabel(false)),
            1 => Ok(BinaryLabel(true)),
            _ => Err(Error::data("labels must be 0 or 1")),
        }
    }

    pub fn from_bool(b: bool) -> Self {
        BinaryLabel(b)
    }

    pub fn get(self) -> u8 {
        self.0 as u8
    }
}

impl Serialize for BinaryLabel {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.get())
    }
}

impl<'de> Deserialize<'de> for BinaryLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        BinaryLabel::new(u8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<Value>,
    pub y: BinaryLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    schema: Schema,
    samples: Vec<Sample>,
}

impl LabeledDataset {
    pub fn new(schema: Schema, samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::data("dataset is empty"));
        }
        for s in &samples {
            schema.validate(&s.x)?;
        }
        Ok(LabeledDataset { schema, samples })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.schema.len()
    }
}

/// Samples with weights summing to one. A dataset gives `1/n` per row and an
/// exact joint table gives `q(x, y)` per positive-mass entry; `scale` turns
/// weights back into counts for learners (`n` for datasets, 1 for tables).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSamples {
    schema: Schema,
    pub xs: Vec<Vec<Value>>,
    pub ys: Vec<u8>,
    pub ws: Vec<f64>,
    pub scale: f64,
    exact: bool,
}

impl WeightedSamples {
    pub fn from_dataset(data: &LabeledDataset) -> Self {
        let n = data.len() as f64;
        WeightedSamples {
            schema: data.schema.clone(),
            xs: data.samples.iter().map(|s| s.x.clone()).collect(),
            ys: data.samples.iter().map(|s| s.y.get()).collect(),
            ws: alloc::vec![1.0 / n; data.len()],
            scale: n,
            exact: false,
        }
    }

    pub fn from_table(table: &DiscreteDgp) -> Self {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut ws = Vec::new();
        for e in table.entries() {
            for y in 0..2u8 {
                let p = e.p[y as usize];
                if p > 0.0 {
                    xs.push(e.x.iter().map(|&c| Value::Cat(c)).collect());
                    ys.push(y);
                    ws.push(p);
                }
            }
        }
        WeightedSamples { schema: table.schema().clone(), xs, ys, ws, scale: 1.0, exact: true }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.schema.len()
    }

    /// True when weights are exact probabilities from a joint table.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Learner weight (a count for datasets) of row `i`.
    pub fn count(&self, i: usize) -> f64 {
        self.ws[i] * self.scale
    }

    /// Weighted sum in row order.
    pub fn mean(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.len() {
            acc += self.ws[i] * f(i);
        }
        acc
    }

    pub fn p_y1(&self) -> f64 {
        self.mean(|i| self.ys[i] as f64)
    }
}
