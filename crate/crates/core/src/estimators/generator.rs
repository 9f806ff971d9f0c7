//! Conditional generators `q(x | x_v=a, y)`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::data::WeightedSamples;
use crate::dgp::{format_view, DiscreteDgp};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::value::Value;

#[derive(Clone, Debug)]
pub enum ConditionalGenerator {
    /// Restricts and renormalizes the joint table.
    ExactDiscrete(Arc<DiscreteDgp>),
    /// Resamples dataset rows that match the condition.
    Empirical(WeightedSamples),
}

/// Candidate inputs with cumulative weights, ready for repeated draws.
#[derive(Clone, Debug)]
pub struct Candidates {
    xs: Vec<Vec<Value>>,
    cdf: Vec<f64>,
}

impl Candidates {
    pub fn draw(&self, rng: &mut Rng) -> &[Value] {
        let total = *self.cdf.last().unwrap();
        let u = rng.uniform() * total;
        let i = self.cdf.partition_point(|&c| c <= u).min(self.xs.len() - 1);
        &self.xs[i]
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

fn matches(x: &[Value], view: &[Value]) -> bool {
    x.iter().zip(view).all(|(a, b)| matches!(b, Value::Mask) || a == b)
}

impl ConditionalGenerator {
    pub fn candidates(&self, view: &[Value], y: u8) -> Result<Candidates> {
        let mut xs = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        match self {
            ConditionalGenerator::ExactDiscrete(t) => {
                t.schema().validate_view(view)?;
                for e in t.entries() {
                    let x = e.values();
                    let p = e.p[y as usize];
                    if p > 0.0 && matches(&x, view) {
                        acc += p;
                        xs.push(x);
                        cdf.push(acc);
                    }
                }
            }
            ConditionalGenerator::Empirical(d) => {
                if view.len() != d.dim() {
                    return Err(Error::Dimension { expected: d.dim(), got: view.len() });
                }
                for i in 0..d.len() {
                    if d.ys[i] == y && matches(&d.xs[i], view) {
                        acc += d.ws[i];
                        xs.push(d.xs[i].clone());
                        cdf.push(acc);
                    }
                }
            }
        }
        if xs.is_empty() {
            return Err(Error::Conditioning(format_view(view)));
        }
        Ok(Candidates { xs, cdf })
    }

    pub fn draw(&self, view: &[Value], y: u8, rng: &mut Rng) -> Result<Vec<Value>> {
        Ok(self.candidates(view, y)?.draw(rng).to_vec())
    }
}
