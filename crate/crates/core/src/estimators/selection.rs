//! Selection models `q(F | x_v, l, v)` with a null label slot.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::learner::{Classifier, LearnerSpec, Row};
use crate::data::WeightedSamples;
use crate::error::{Error, Result};
use crate::explainers::SelectionVocabulary;
use crate::mask::SelectionMask;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub learner: LearnerSpec,
}

/// One classifier per vocabulary entry `v`, predicting the index `F` of the
/// selected mask from `(x_v, l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionModel {
    pub vocab: Vec<SelectionMask>,
    models: Vec<Classifier>,
}

/// Model input: the values selected by `v`, then the label channel (a code
/// for an observed label, `Value::Mask` for null).
pub fn selection_input(x: &[Value], v: &SelectionMask, label: Option<u8>) -> Vec<Value> {
    let mut out: Vec<Value> = v.indices().map(|i| x[i]).collect();
    out.push(label.map_or(Value::Mask, |y| Value::Cat(y as u32)));
    out
}

impl SelectionModel {
    /// Every sample is presented twice per `v`: once with its label and once
    /// with the null label.
    pub fn fit(
        data: &WeightedSamples,
        masks: &[SelectionMask],
        vocab: &SelectionVocabulary,
        config: &SelectionConfig,
    ) -> Result<Self> {
        if data.is_empty() || vocab.is_empty() {
            return Err(Error::data("selection model needs data and a nonempty vocabulary"));
        }
        if masks.len() != data.len() {
            return Err(Error::Dimension { expected: data.len(), got: masks.len() });
        }
        let classes: Vec<usize> = masks
            .iter()
            .map(|m| vocab.index_of(m).ok_or_else(|| Error::data("mask missing from vocabulary")))
            .collect::<Result<_>>()?;
        let k = vocab.len();
        let mut models = Vec::with_capacity(k);
        for v in vocab.masks() {
            let mut rows = Vec::with_capacity(2 * data.len());
            for i in 0..data.len() {
                for label in [Some(data.ys[i]), None] {
                    rows.push(Row { x: selection_input(&data.xs[i], v, label), class: classes[i], weight: data.count(i) });
                }
            }
            models.push(Classifier::fit(&config.learner, &rows, k)?);
        }
        Ok(SelectionModel { vocab: vocab.masks().to_vec(), models })
    }

    /// Distribution of `F` over the vocabulary given `(x_v, l, v = vocab[j])`.
    pub fn predict_f(&self, j: usize, x: &[Value], label: Option<u8>) -> Vec<f64> {
        self.models[j].predict(&selection_input(x, &self.vocab[j], label)).probs
    }

    /// `q(E_v = 1 | x_v, l)` for `v = vocab[j]`.
    pub fn prob_selected(&self, j: usize, x: &[Value], label: Option<u8>) -> f64 {
        self.predict_f(j, x, label)[j]
    }
}
