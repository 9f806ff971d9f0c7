//! Explanation functions `e: x -> mask`, including the encoding
//! constructions and exhaustive reductive search.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, WeightedSamples};
use crate::dgp::{attention_decode, AttentionModel, Dgp, SwitchLayout};
use crate::error::{Error, Result};
use crate::estimators::Conditional;
use crate::mask::{extract_explanation, masked_view, Explanation, SelectionMask};
use crate::math::{ln_bernoulli, near};
use crate::value::{Schema, Value};

/// Default cap on distinct inputs enumerated by reductive search.
pub const REDUCTIVE_SUPPORT_CAP: usize = 1 << 16;

/// One row of a lookup-table explainer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub x: Vec<Value>,
    pub mask: SelectionMask,
}

/// Serializable explainer configuration, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExplainerSpec {
    /// Always selects the listed feature indices (0-based).
    Constant { select: Vec<usize> },
    AllInputs,
    /// Control input plus the feature it switches to.
    OptimalSwitch {
        #[serde(default)]
        layout: Option<SwitchLayout>,
    },
    /// `high` when `pi(x) > 0.5`, `low` otherwise; default the last two features.
    PosEnc {
        #[serde(default)]
        high: Option<Vec<usize>>,
        #[serde(default)]
        low: Option<Vec<usize>>,
    },
    /// Best singleton or empty selection for the predicted class.
    PredEnc,
    /// The feature the control input switches to, without the control.
    MargEnc {
        #[serde(default)]
        layout: Option<SwitchLayout>,
    },
    AttentionArgmax {
        #[serde(default)]
        model: Option<AttentionModel>,
    },
    /// Exhaustive search over subsets of size at most `k`.
    Reductive {
        k: usize,
        #[serde(default)]
        round: Option<bool>,
    },
    Table {
        rows: Vec<TableRow>,
        #[serde(default)]
        fallback: Option<SelectionMask>,
        #[serde(default)]
        round: bool,
    },
}

impl ExplainerSpec {
    pub fn constant(select: &[usize]) -> Self {
        ExplainerSpec::Constant { select: select.to_vec() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExplainerSpec::Constant { .. } => "constant",
            ExplainerSpec::AllInputs => "all_inputs",
            ExplainerSpec::OptimalSwitch { .. } => "optimal_switch",
            ExplainerSpec::PosEnc { .. } => "pos_enc",
            ExplainerSpec::PredEnc => "pred_enc",
            ExplainerSpec::MargEnc { .. } => "marg_enc",
            ExplainerSpec::AttentionArgmax { .. } => "attention_argmax",
            ExplainerSpec::Reductive { .. } => "reductive",
            ExplainerSpec::Table { .. } => "table",
        }
    }

    /// Short display name, e.g. `constant_x3`.
    pub fn default_name(&self) -> String {
        match self {
            ExplainerSpec::Constant { select } => {
                let mut s = String::from("constant");
                for i in select {
                    s.push_str(&format!("_x{}", i + 1));
                }
                s
            }
            ExplainerSpec::Reductive { k, .. } => format!("reductive_k{k}"),
            other => String::from(other.kind()),
        }
    }

    /// Whether the construction is known to encode on the switch DGPs.
    pub fn known_encoding(&self) -> Option<bool> {
        match self {
            ExplainerSpec::Constant { .. } | ExplainerSpec::AllInputs | ExplainerSpec::OptimalSwitch { .. } => Some(false),
            ExplainerSpec::PosEnc { .. }
            | ExplainerSpec::PredEnc
            | ExplainerSpec::MargEnc { .. }
            | ExplainerSpec::AttentionArgmax { .. }
            | ExplainerSpec::Reductive { .. } => Some(true),
            ExplainerSpec::Table { .. } => None,
        }
    }
}

/// Lookup-table explainer keyed by the exact (optionally rounded) input.
#[derive(Clone, Debug, PartialEq)]
pub struct TableExplainer {
    pub d: usize,
    pub map: BTreeMap<Vec<Value>, SelectionMask>,
    pub fallback: Option<SelectionMask>,
    pub round: bool,
}

impl TableExplainer {
    pub fn key(&self, x: &[Value]) -> Vec<Value> {
        if self.round { round_key(x) } else { x.to_vec() }
    }

    pub fn rows(&self) -> Vec<TableRow> {
        self.map.iter().map(|(x, m)| TableRow { x: x.clone(), mask: m.clone() }).collect()
    }
}

/// Real values rounded to the nearest integer; categorical codes unchanged.
pub fn round_key(x: &[Value]) -> Vec<Value> {
    x.iter()
        .map(|v| match v {
            Value::Real(r) => Value::Real(libm::round(*r) + 0.0),
            other => *other,
        })
        .collect()
}

#[derive(Clone)]
pub enum Explainer {
    Constant(SelectionMask),
    AllInputs(usize),
    Switch { d: usize, layout: SwitchLayout, with_control: bool },
    PosEnc { high: SelectionMask, low: SelectionMask, pi: Arc<dyn Conditional> },
    PredEnc { d: usize, pi: Arc<dyn Conditional> },
    Attention { model: AttentionModel },
    Table(TableExplainer),
}

impl fmt::Debug for Explainer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Explainer::Constant(m) => write!(f, "Constant({m})"),
            Explainer::AllInputs(d) => write!(f, "AllInputs({d})"),
            Explainer::Switch { layout, with_control, .. } => write!(f, "Switch({layout:?}, control={with_control})"),
            Explainer::PosEnc { high, low, .. } => write!(f, "PosEnc({high}, {low})"),
            Explainer::PredEnc { .. } => f.write_str("PredEnc"),
            Explainer::Attention { model } => write!(f, "Attention({model:?})"),
            Explainer::Table(t) => write!(f, "Table({} rows)", t.map.len()),
        }
    }
}

fn indices_mask(d: usize, idx: &[usize]) -> Result<SelectionMask> {
    SelectionMask::from_indices(d, idx)
}

impl Explainer {
    /// Builds an explainer. `pi` is the accessor for `q(y=1 | x_v)` used by
    /// pos_enc, pred_enc and reductive search.
    pub fn build(spec: &ExplainerSpec, dgp: &Dgp, pi: Option<Arc<dyn Conditional>>) -> Result<Self> {
        Self::build_with_data(spec, dgp, pi, None)
    }

    /// As [`Explainer::build`], with the training set reductive search needs.
    pub fn build_with_data(
        spec: &ExplainerSpec,
        dgp: &Dgp,
        pi: Option<Arc<dyn Conditional>>,
        train: Option<&WeightedSamples>,
    ) -> Result<Self> {
        Self::build_for_schema(spec, dgp.schema(), dgp.switch_layout(), pi, train)
    }

    /// As [`Explainer::build_with_data`] without a DGP: switch explainers
    /// fall back to `default_layout`.
    pub fn build_for_schema(
        spec: &ExplainerSpec,
        schema: &Schema,
        default_layout: Option<SwitchLayout>,
        pi: Option<Arc<dyn Conditional>>,
        train: Option<&WeightedSamples>,
    ) -> Result<Self> {
        let d = schema.len();
        let layout = |l: &Option<SwitchLayout>| {
            l.or(default_layout)
                .ok_or_else(|| Error::config("this DGP has no default switch layout; set one"))
                .and_then(|l| {
                    if l.control < d && l.one < d && l.zero < d {
                        Ok(l)
                    } else {
                        Err(Error::config("switch layout index out of range"))
                    }
                })
        };
        let need_pi = || pi.clone().ok_or_else(|| Error::config("explainer needs a conditional accessor"));
        Ok(match spec {
            ExplainerSpec::Constant { select } => Explainer::Constant(indices_mask(d, select)?),
            ExplainerSpec::AllInputs => Explainer::AllInputs(d),
            ExplainerSpec::OptimalSwitch { layout: l } => Explainer::Switch { d, layout: layout(l)?, with_control: true },
            ExplainerSpec::MargEnc { layout: l } => Explainer::Switch { d, layout: layout(l)?, with_control: false },
            ExplainerSpec::PosEnc { high, low } => {
                if d < 2 && (high.is_none() || low.is_none()) {
                    return Err(Error::config("pos_enc defaults need at least two features"));
                }
                let high = indices_mask(d, high.as_deref().unwrap_or(&[d - 2]))?;
                let low = indices_mask(d, low.as_deref().unwrap_or(&[d - 1]))?;
                Explainer::PosEnc { high, low, pi: need_pi()? }
            }
            ExplainerSpec::PredEnc => Explainer::PredEnc { d, pi: need_pi()? },
            ExplainerSpec::AttentionArgmax { model } => {
                if d != 3 {
                    return Err(Error::config("attention_argmax needs three features"));
                }
                let model = model.clone().unwrap_or_default();
                model.validate()?;
                Explainer::Attention { model }
            }
            ExplainerSpec::Reductive { k, round } => {
                let train = train.ok_or_else(|| Error::config("reductive search needs a training set"))?;
                let round = round.unwrap_or(!schema.all_categorical());
                reductive_search(&*need_pi()?, train, *k, round, REDUCTIVE_SUPPORT_CAP)?
            }
            ExplainerSpec::Table { rows, fallback, round } => {
                let mut map = BTreeMap::new();
                for r in rows {
                    if r.x.len() != d || r.mask.len() != d {
                        return Err(Error::Dimension { expected: d, got: r.x.len().max(r.mask.len()) });
                    }
                    let key = if *round { round_key(&r.x) } else { r.x.clone() };
                    if let Some(prev) = map.insert(key, r.mask.clone()) {
                        if prev != r.mask {
                            return Err(Error::data("table explainer maps one input to two masks"));
                        }
                    }
                }
                if fallback.as_ref().is_some_and(|f| f.len() != d) {
                    return Err(Error::Dimension { expected: d, got: fallback.as_ref().unwrap().len() });
                }
                Explainer::Table(TableExplainer { d, map, fallback: fallback.clone(), round: *round })
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Explainer::Constant(m) => m.len(),
            Explainer::AllInputs(d) | Explainer::Switch { d, .. } | Explainer::PredEnc { d, .. } => *d,
            Explainer::PosEnc { high, .. } => high.len(),
            Explainer::Attention { .. } => 3,
            Explainer::Table(t) => t.d,
        }
    }

    pub fn explain(&self, x: &[Value]) -> Result<SelectionMask> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::Dimension { expected: d, got: x.len() });
        }
        match self {
            Explainer::Constant(m) => Ok(m.clone()),
            Explainer::AllInputs(d) => Ok(SelectionMask::full(*d)),
            Explainer::Switch { d, layout, with_control } => {
                let on = matches!(x[layout.control], Value::Cat(1));
                let target = if on { layout.one } else { layout.zero };
                let mut idx = alloc::vec![target];
                if *with_control {
                    idx.push(layout.control);
                }
                SelectionMask::from_indices(*d, &idx)
            }
            Explainer::PosEnc { high, low, pi } => {
                let p = pi.prob_y1(x)?;
                Ok(if p > 0.5 { high.clone() } else { low.clone() })
            }
            Explainer::PredEnc { d, pi } => pred_enc(*d, &**pi, x),
            Explainer::Attention { model } => {
                let out = model.predict(&attention_decode(x)?);
                Ok(SelectionMask::unit(3, out.argmax_key(&model.beta)))
            }
            Explainer::Table(t) => {
                let key = t.key(x);
                match t.map.get(&key) {
                    Some(m) => Ok(m.clone()),
                    None => t.fallback.clone().ok_or_else(|| {
                        let parts: Vec<String> = key.iter().map(|v| format!("{v}")).collect();
                        Error::TableMiss(format!("[{}]", parts.join(",")))
                    }),
                }
            }
        }
    }

    /// Masks for every row plus the vocabulary weighted by the set's weights.
    pub fn explain_set(&self, set: &WeightedSamples) -> Result<(Vec<SelectionMask>, SelectionVocabulary)> {
        let masks = set.xs.iter().map(|x| self.explain(x)).collect::<Result<Vec<_>>>()?;
        let vocab = SelectionVocabulary::from_masks(&masks, &set.ws)?;
        Ok((masks, vocab))
    }
}

fn pred_enc(d: usize, pi: &dyn Conditional, x: &[Value]) -> Result<SelectionMask> {
    let high = pi.prob_y1(x)? > 0.5;
    let mut best: Option<(f64, SelectionMask)> = None;
    let candidates = (0..d).map(|i| SelectionMask::unit(d, i)).chain(core::iter::once(SelectionMask::empty(d)));
    for m in candidates {
        let p = pi.prob_y1(&masked_view(x, &m, Value::Mask))?;
        let s = if high { p } else { 1.0 - p };
        let better = match &best {
            None => true,
            Some((b, _)) => s > *b && !near(s, *b),
        };
        if better {
            best = Some((s, m));
        }
    }
    Ok(best.unwrap().1)
}

/// For each distinct (rounded) input, the subset of size at most `k` with
/// the highest average `ln q(y | x_S)` over matching samples. Ties go to the
/// lexicographically smallest mask. Inputs never seen map to the subset that
/// is best over the whole set.
pub fn reductive_search(
    cond: &dyn Conditional,
    data: &WeightedSamples,
    k: usize,
    round: bool,
    support_cap: usize,
) -> Result<Explainer> {
    if k == 0 {
        return Err(Error::config("reductive search needs k >= 1"));
    }
    if data.is_empty() {
        return Err(Error::data("reductive search needs a nonempty dataset"));
    }
    let d = data.dim();
    if d >= 24 {
        return Err(Error::config("too many features to enumerate subsets"));
    }
    let mut groups: BTreeMap<Vec<Value>, Vec<usize>> = BTreeMap::new();
    for (i, x) in data.xs.iter().enumerate() {
        let key = if round { round_key(x) } else { x.clone() };
        groups.entry(key).or_default().push(i);
        if groups.len() > support_cap {
            return Err(Error::config(format!("more than {support_cap} distinct inputs")));
        }
    }
    let candidates = SelectionMask::all_up_to(d, k.min(d));
    let mut loglik = alloc::vec![0.0; data.len() * candidates.len()];
    for i in 0..data.len() {
        for (c, m) in candidates.iter().enumerate() {
            let p = cond.prob_y1(&masked_view(&data.xs[i], m, Value::Mask))?;
            loglik[i * candidates.len() + c] = ln_bernoulli(p, data.ys[i]);
        }
    }
    let pick = |rows: &[usize]| {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        let total: f64 = rows.iter().map(|&i| data.ws[i]).sum();
        for c in 0..candidates.len() {
            let s = rows.iter().map(|&i| data.ws[i] * loglik[i * candidates.len() + c]).sum::<f64>() / total;
            if s > best_score && !near(s, best_score) {
                best = c;
                best_score = s;
            }
        }
        candidates[best].clone()
    };
    let all: Vec<usize> = (0..data.len()).collect();
    let fallback = pick(&all);
    let map = groups.iter().map(|(key, rows)| (key.clone(), pick(rows))).collect();
    Ok(Explainer::Table(TableExplainer { d, map, fallback: Some(fallback), round }))
}

/// Distinct masks in lexicographic order with their probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionVocabulary {
    masks: Vec<SelectionMask>,
    probs: Vec<f64>,
}

impl SelectionVocabulary {
    pub fn from_masks(masks: &[SelectionMask], weights: &[f64]) -> Result<Self> {
        if masks.len() != weights.len() {
            return Err(Error::Dimension { expected: weights.len(), got: masks.len() });
        }
        let mut acc: BTreeMap<&SelectionMask, f64> = BTreeMap::new();
        for (m, w) in masks.iter().zip(weights) {
            *acc.entry(m).or_insert(0.0) += w;
        }
        let total: f64 = acc.values().sum();
        let (masks, probs) = acc.into_iter().filter(|(_, w)| *w > 0.0).map(|(m, w)| (m.clone(), w / total)).unzip();
        Ok(SelectionVocabulary { masks, probs })
    }

    pub fn masks(&self) -> &[SelectionMask] {
        &self.masks
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn index_of(&self, m: &SelectionMask) -> Option<usize> {
        self.masks.binary_search(m).ok()
    }

    pub fn prob(&self, m: &SelectionMask) -> f64 {
        self.index_of(m).map_or(0.0, |i| self.probs[i])
    }
}

/// Per-sample explanations and the empirical vocabulary.
pub fn explain_dataset(e: &Explainer, data: &LabeledDataset) -> Result<(Vec<Explanation>, SelectionVocabulary)> {
    let set = WeightedSamples::from_dataset(data);
    let (masks, vocab) = e.explain_set(&set)?;
    let exps = set.xs.iter().zip(&masks).map(|(x, m)| extract_explanation(x, m)).collect::<Result<Vec<_>>>()?;
    Ok((exps, vocab))
}
