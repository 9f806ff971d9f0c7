//! ROAR, FRESH, EVAL-X, ENCODE-METER, STRIPE-X, the encoding check,
//! rank metrics and entropies.
//!
//! Every expectation is a weighted sum over [`WeightedSamples`] in row order,
//! so dataset averages and exact joint-table expectations share one kernel.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::WeightedSamples;
use crate::dgp::{Dgp, DiscreteDgp};
use crate::error::{Error, Result};
use crate::estimators::{mi_plugin, Classifier, Conditional, ConditionalGenerator, LearnerSpec, Row, SelectionModel};
use crate::explainers::{Explainer, SelectionVocabulary};
use crate::mask::{extract_explanation, masked_view, val_padded, Explanation, SelectionMask};
use crate::math::{binary_entropy, kl_bernoulli, ln_bernoulli, xlnx};
use crate::rng::Rng;
use crate::value::{FeatureKind, Value};

/// A score with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreValue {
    pub value: f64,
    pub n_samples: usize,
    pub estimator: String,
    pub seed: Option<u64>,
}

impl ScoreValue {
    fn of(value: f64, set: &WeightedSamples, estimator: &str) -> Self {
        let tag = if set.is_exact() { "exact" } else { estimator };
        ScoreValue { value, n_samples: set.len(), estimator: String::from(tag), seed: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

fn check_masks(set: &WeightedSamples, masks: &[SelectionMask]) -> Result<()> {
    if masks.len() != set.len() {
        return Err(Error::Dimension { expected: set.len(), got: masks.len() });
    }
    if let Some(m) = masks.iter().find(|m| m.len() != set.dim()) {
        return Err(Error::Dimension { expected: set.dim(), got: m.len() });
    }
    Ok(())
}

/// `q(y=1 | x_v = a)` for every row, with `(v, a)` its explanation.
pub fn evalx_probs(model: &dyn Conditional, masks: &[SelectionMask], set: &WeightedSamples) -> Result<Vec<f64>> {
    check_masks(set, masks)?;
    (0..set.len()).map(|i| model.prob_y1(&masked_view(&set.xs[i], &masks[i], Value::Mask))).collect()
}

/// `E[ln q(y | x_v = a)]` from precomputed [`evalx_probs`].
pub fn evalx_from_probs(probs: &[f64], set: &WeightedSamples) -> Result<ScoreValue> {
    if probs.len() != set.len() {
        return Err(Error::Dimension { expected: set.len(), got: probs.len() });
    }
    Ok(ScoreValue::of(set.mean(|i| ln_bernoulli(probs[i], set.ys[i])), set, "estimated"))
}

/// `E[ln q(y | x_v = a)]` with `(v, a)` the explanation of each row.
pub fn evalx_score(model: &dyn Conditional, masks: &[SelectionMask], set: &WeightedSamples) -> Result<ScoreValue> {
    evalx_from_probs(&evalx_probs(model, masks, set)?, set)
}

/// `sum_v q(e(x)=v) E[KL(q(y|x) || q(y|x_v)) | e(x)=v]`, which equals
/// EVAL-X* minus EVAL-X.
pub fn evalx_gap(oracle: &dyn Conditional, table: &DiscreteDgp, explainer: &Explainer) -> Result<ScoreValue> {
    let mut acc = 0.0;
    for e in table.entries() {
        let x = e.values();
        let m = explainer.explain(&x)?;
        let q = oracle.prob_y1(&masked_view(&x, &m, Value::Mask))?;
        acc += e.p_x() * kl_bernoulli(e.p_y1_given_x(), q);
    }
    Ok(ScoreValue { value: acc, n_samples: table.entries().len(), estimator: String::from("exact"), seed: None })
}

fn fit_and_score(
    learner: &LearnerSpec,
    train: &WeightedSamples,
    train_inputs: Vec<Vec<Value>>,
    eval: &WeightedSamples,
    eval_inputs: &[Vec<Value>],
) -> Result<f64> {
    let rows: Vec<Row> = train_inputs
        .into_iter()
        .enumerate()
        .map(|(i, x)| Row { x, class: train.ys[i] as usize, weight: train.count(i) })
        .collect();
    let clf = Classifier::fit(learner, &rows, 2)?;
    let mut acc = 0.0;
    for i in 0..eval.len() {
        acc += eval.ws[i] * ln_bernoulli(clf.predict(&eval_inputs[i]).probs[1], eval.ys[i]);
    }
    Ok(acc)
}

/// ROAR result: complement log-likelihood and its negation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoarScore {
    pub complement_loglik: ScoreValue,
    /// Negated log-likelihood; higher is better, optimum `H(y)`.
    pub value: f64,
}

/// Refits `learner` on the unselected inputs (selected positions replaced by
/// the mask token, so the selection pattern stays visible) and scores the
/// evaluation set.
pub fn roar_score(
    train: &WeightedSamples,
    train_masks: &[SelectionMask],
    eval: &WeightedSamples,
    eval_masks: &[SelectionMask],
    learner: &LearnerSpec,
) -> Result<RoarScore> {
    check_masks(train, train_masks)?;
    check_masks(eval, eval_masks)?;
    let input = |x: &[Value], m: &SelectionMask| masked_view(x, &m.complement(), Value::Mask);
    let tr = train.xs.iter().zip(train_masks).map(|(x, m)| input(x, m)).collect();
    let ev: Vec<Vec<Value>> = eval.xs.iter().zip(eval_masks).map(|(x, m)| input(x, m)).collect();
    let ll = fit_and_score(learner, train, tr, eval, &ev)?;
    Ok(RoarScore { complement_loglik: ScoreValue::of(ll, eval, "estimated"), value: -ll })
}

/// Refits `learner` on padded selected values (positions erased) and scores
/// the evaluation set.
pub fn fresh_score(
    train: &WeightedSamples,
    train_masks: &[SelectionMask],
    eval: &WeightedSamples,
    eval_masks: &[SelectionMask],
    learner: &LearnerSpec,
    pad: Value,
) -> Result<ScoreValue> {
    check_masks(train, train_masks)?;
    check_masks(eval, eval_masks)?;
    let schema = train.schema();
    let input = |x: &[Value], m: &SelectionMask| val_padded(&extract_explanation(x, m)?, pad, schema);
    let tr = train.xs.iter().zip(train_masks).map(|(x, m)| input(x, m)).collect::<Result<Vec<_>>>()?;
    let ev = eval.xs.iter().zip(eval_masks).map(|(x, m)| input(x, m)).collect::<Result<Vec<_>>>()?;
    let ll = fit_and_score(learner, train, tr, eval, &ev)?;
    Ok(ScoreValue::of(ll, eval, "estimated"))
}

/// Mutual information of a 2x2 joint given as `[e][y]` masses.
fn mi_2x2(j: &[[f64; 2]; 2]) -> f64 {
    let total: f64 = j.iter().flatten().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let pe = [(j[0][0] + j[0][1]) / total, (j[1][0] + j[1][1]) / total];
    let py = [(j[0][0] + j[1][0]) / total, (j[0][1] + j[1][1]) / total];
    let hj: f64 = j.iter().flatten().map(|&p| xlnx(p / total)).sum();
    let mi = hj - pe.iter().map(|&p| xlnx(p)).sum::<f64>() - py.iter().map(|&p| xlnx(p)).sum::<f64>();
    mi.max(0.0)
}

/// Per-selection breakdown of an ENCODE-METER value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodeMeterTerm {
    pub mask: SelectionMask,
    pub prob: f64,
    /// Contribution to the total, already weighted by `prob`.
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodeMeterResult {
    pub score: ScoreValue,
    pub terms: Vec<EncodeMeterTerm>,
}

/// `E_{(v,a)} I(E_v; y | x_v = a)` evaluated on the joint table.
pub fn encode_meter_exact(table: &DiscreteDgp, explainer: &Explainer) -> Result<EncodeMeterResult> {
    let entries = table.entries();
    let xs: Vec<Vec<Value>> = entries.iter().map(|e| e.values()).collect();
    let masks = xs.iter().map(|x| explainer.explain(x)).collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = entries.iter().map(|e| e.p_x()).collect();
    let vocab = SelectionVocabulary::from_masks(&masks, &weights)?;
    let mut total = 0.0;
    let mut terms = Vec::with_capacity(vocab.len());
    for v in vocab.masks() {
        let mut joint: BTreeMap<Vec<Value>, [[f64; 2]; 2]> = BTreeMap::new();
        for (k, e) in entries.iter().enumerate() {
            let key: Vec<Value> = v.indices().map(|i| xs[k][i]).collect();
            let slot = joint.entry(key).or_insert([[0.0; 2]; 2]);
            let ev = (masks[k] == *v) as usize;
            slot[ev][0] += e.p[0];
            slot[ev][1] += e.p[1];
        }
        let mut contribution = 0.0;
        for j in joint.values() {
            let selected = j[1][0] + j[1][1];
            if selected > 0.0 {
                contribution += selected * mi_2x2(j);
            }
        }
        total += contribution;
        terms.push(EncodeMeterTerm { mask: v.clone(), prob: vocab.prob(v), contribution });
    }
    let score = ScoreValue { value: total, n_samples: entries.len(), estimator: String::from("exact"), seed: None };
    Ok(EncodeMeterResult { score, terms })
}

/// How the predictive path averages over `y | x_v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum YSampling {
    /// Exact expectation over the binary label.
    Exact,
    /// `k` labels drawn from the EVAL-X model per row.
    Samples { k: usize, seed: u64 },
}

/// Predictive ENCODE-METER in KL form:
/// `E[ KL(q(E_v | x_v, y) || q(E_v | x_v)) ]` with `y ~ q(y | x_v)`.
pub fn encode_meter_predictive(
    set: &WeightedSamples,
    masks: &[SelectionMask],
    selection: &SelectionModel,
    evalx: &dyn Conditional,
    sampling: YSampling,
) -> Result<ScoreValue> {
    encode_meter_predictive_probs(set, masks, selection, &evalx_probs(evalx, masks, set)?, sampling)
}

/// As [`encode_meter_predictive`] with `q(y=1 | x_v)` precomputed per row.
pub fn encode_meter_predictive_probs(
    set: &WeightedSamples,
    masks: &[SelectionMask],
    selection: &SelectionModel,
    probs: &[f64],
    sampling: YSampling,
) -> Result<ScoreValue> {
    check_masks(set, masks)?;
    if probs.len() != set.len() {
        return Err(Error::Dimension { expected: set.len(), got: probs.len() });
    }
    let mut rng = match sampling {
        YSampling::Samples { seed, .. } => Some(Rng::new(seed, 0x656d)),
        YSampling::Exact => None,
    };
    let mut acc = 0.0;
    for i in 0..set.len() {
        let x = &set.xs[i];
        // A selection never seen in training has probability zero under
        // the model for every label, so it contributes no divergence.
        let Ok(j) = selection.vocab.binary_search(&masks[i]) else { continue };
        let p_null = selection.prob_selected(j, x, None);
        let pi = probs[i];
        let term = match (&sampling, rng.as_mut()) {
            (YSampling::Samples { k, .. }, Some(r)) => {
                let mut s = 0.0;
                for _ in 0..*k {
                    let y = r.bernoulli(pi) as u8;
                    s += kl_bernoulli(selection.prob_selected(j, x, Some(y)), p_null);
                }
                s / (*k).max(1) as f64
            }
            _ => {
                (1.0 - pi) * kl_bernoulli(selection.prob_selected(j, x, Some(0)), p_null)
                    + pi * kl_bernoulli(selection.prob_selected(j, x, Some(1)), p_null)
            }
        };
        acc += set.ws[i] * term;
    }
    Ok(ScoreValue::of(acc, set, "predictive"))
}

/// Generative ENCODE-METER: for each distinct explanation `(v, a)`, draw
/// `y ~ q(y | x_v=a)` and `x ~ q(x | x_v=a, y)`, then take the plug-in
/// mutual information between `1[e(x) = v]` and `y`.
#[allow(clippy::too_many_arguments)]
pub fn encode_meter_generative(
    set: &WeightedSamples,
    masks: &[SelectionMask],
    explainer: &Explainer,
    evalx: &dyn Conditional,
    generator: &ConditionalGenerator,
    draws: usize,
    seed: u64,
) -> Result<ScoreValue> {
    check_masks(set, masks)?;
    if draws == 0 {
        return Err(Error::config("generative ENCODE-METER needs at least one draw"));
    }
    let mut groups: BTreeMap<Explanation, f64> = BTreeMap::new();
    for i in 0..set.len() {
        *groups.entry(extract_explanation(&set.xs[i], &masks[i])?).or_insert(0.0) += set.ws[i];
    }
    let mut acc = 0.0;
    for (stream, (exp, w)) in groups.iter().enumerate() {
        let view = exp.to_view();
        let pi = evalx.prob_y1(&view)?;
        let cands = [generator.candidates(&view, 0).ok(), generator.candidates(&view, 1).ok()];
        let mut rng = Rng::new(seed, stream as u64);
        let mut es = Vec::with_capacity(draws);
        let mut ys = Vec::with_capacity(draws);
        for _ in 0..draws {
            let mut y = rng.bernoulli(pi) as usize;
            if cands[y].is_none() {
                y = 1 - y;
            }
            let c = cands[y].as_ref().ok_or_else(|| Error::Conditioning(String::from("no generator support")))?;
            let x = c.draw(&mut rng);
            es.push(explainer.explain(x)? == exp.mask);
            ys.push(y as u8);
        }
        acc += w * mi_plugin(&es, &ys)?;
    }
    Ok(ScoreValue::of(acc, set, "generative"))
}

/// `EVAL-X - alpha * ENCODE-METER`.
pub fn stripe_x(evalx: &ScoreValue, phi: &ScoreValue, alpha: f64) -> Result<ScoreValue> {
    if !(alpha >= 0.0) {
        return Err(Error::config("alpha must be non-negative"));
    }
    Ok(ScoreValue {
        value: evalx.value - alpha * phi.value,
        n_samples: evalx.n_samples,
        estimator: evalx.estimator.clone(),
        seed: evalx.seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingCheckConfig {
    pub learner: LearnerSpec,
    /// Selections backed by fewer dataset rows are skipped.
    pub min_samples: usize,
    pub acc_tol: f64,
    pub kl_tol: f64,
}

impl EncodingCheckConfig {
    pub fn estimated() -> Self {
        EncodingCheckConfig { learner: LearnerSpec::tree(6), min_samples: 10, acc_tol: 0.02, kl_tol: 0.01 }
    }

    pub fn exact() -> Self {
        EncodingCheckConfig { learner: LearnerSpec::exact(), min_samples: 1, acc_tol: 0.02, kl_tol: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub mask: SelectionMask,
    pub prob: f64,
    /// Accuracy of predicting `E_v` from `x_v` where `x_v` takes values seen
    /// under this selection.
    pub accuracy: f64,
    /// Mean `KL(q(y | x_v, E_v=1) || q(y | x_v, E_v=0))` over rows selecting `v`.
    pub kl: f64,
    pub encodes: bool,
    pub skipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingVerdict {
    pub encodes: bool,
    /// Mass-weighted accuracy over evaluated selections.
    pub accuracy: f64,
    /// Mass-weighted KL over evaluated selections.
    pub kl: f64,
    pub selections: Vec<SelectionRecord>,
}

/// Checks both unpredictability conditions per selection: the selection
/// event must not be predictable from its values, and conditioning on it
/// must change the label distribution.
pub fn encoding_check(
    set: &WeightedSamples,
    masks: &[SelectionMask],
    config: &EncodingCheckConfig,
) -> Result<EncodingVerdict> {
    check_masks(set, masks)?;
    let vocab = SelectionVocabulary::from_masks(masks, &set.ws)?;
    if vocab.is_empty() {
        return Err(Error::data("no positive-mass selections"));
    }
    let mut records = Vec::with_capacity(vocab.len());
    for (v, &prob) in vocab.masks().iter().zip(vocab.probs()) {
        let key = |i: usize| -> Vec<Value> { v.indices().map(|k| set.xs[i][k]).collect() };
        let selected: Vec<usize> = (0..set.len()).filter(|&i| masks[i] == *v).collect();
        if !set.is_exact() && selected.len() < config.min_samples {
            records.push(SelectionRecord { mask: v.clone(), prob, accuracy: 1.0, kl: 0.0, encodes: false, skipped: true });
            continue;
        }
        // Categorical selections are judged where their values occur under
        // `v`; real-valued ones never repeat exactly, so every row counts.
        let real = v.indices().any(|k| !matches!(set.schema().kind(k), FeatureKind::Cat { .. }));
        let region: Vec<usize> = if real {
            (0..set.len()).collect()
        } else {
            let seen: BTreeSet<Vec<Value>> = selected.iter().map(|&i| key(i)).collect();
            (0..set.len()).filter(|&i| seen.contains(&key(i))).collect()
        };
        let e_rows: Vec<Row> = region
            .iter()
            .map(|&i| Row { x: key(i), class: (masks[i] == *v) as usize, weight: set.count(i) })
            .collect();
        let e_model = Classifier::fit(&config.learner, &e_rows, 2)?;
        let mut hit = 0.0;
        let mut tot = 0.0;
        for (r, &i) in e_rows.iter().zip(&region) {
            let pred = (e_model.predict(&r.x).probs[1] > 0.5) as usize;
            hit += set.ws[i] * (pred == r.class) as u8 as f64;
            tot += set.ws[i];
        }
        let accuracy = if tot > 0.0 { hit / tot } else { 1.0 };
        let y_rows: Vec<Row> = region
            .iter()
            .map(|&i| {
                let mut x = key(i);
                x.push(Value::Cat((masks[i] == *v) as u32));
                Row { x, class: set.ys[i] as usize, weight: set.count(i) }
            })
            .collect();
        let y_model = Classifier::fit(&config.learner, &y_rows, 2)?;
        let mut kl = 0.0;
        let mut mass = 0.0;
        for &i in &selected {
            let mut x = key(i);
            x.push(Value::Cat(1));
            let on = y_model.predict(&x);
            *x.last_mut().unwrap() = Value::Cat(0);
            let off = y_model.predict(&x);
            if on.support > 0.0 && off.support > 0.0 {
                kl += set.ws[i] * kl_bernoulli(on.probs[1], off.probs[1]);
            }
            mass += set.ws[i];
        }
        let kl = if mass > 0.0 { kl / mass } else { 0.0 };
        let encodes = accuracy < 1.0 - config.acc_tol && kl > config.kl_tol;
        records.push(SelectionRecord { mask: v.clone(), prob, accuracy, kl, encodes, skipped: false });
    }
    let used: Vec<&SelectionRecord> = records.iter().filter(|r| !r.skipped).collect();
    let mass: f64 = used.iter().map(|r| r.prob).sum();
    let (accuracy, kl) = if mass > 0.0 {
        (
            used.iter().map(|r| r.prob * r.accuracy).sum::<f64>() / mass,
            used.iter().map(|r| r.prob * r.kl).sum::<f64>() / mass,
        )
    } else {
        (1.0, 0.0)
    };
    Ok(EncodingVerdict { encodes: records.iter().any(|r| r.encodes), accuracy, kl, selections: records })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankMetrics {
    pub accuracy: f64,
    pub auroc: f64,
}

/// Weighted AUROC (Mann-Whitney with midranks for ties).
pub fn auroc(scores: &[f64], labels: &[u8], weights: &[f64]) -> Result<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let wp: f64 = (0..scores.len()).filter(|&i| labels[i] == 1).map(|i| weights[i]).sum();
    let wn: f64 = (0..scores.len()).filter(|&i| labels[i] == 0).map(|i| weights[i]).sum();
    if wp <= 0.0 || wn <= 0.0 {
        return Err(Error::Numerical(String::from("AUROC is undefined for a single-class set")));
    }
    let mut below = 0.0;
    let mut num = 0.0;
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        while end < idx.len() && scores[idx[end]] == scores[idx[k]] {
            end += 1;
        }
        let (mut gp, mut gn) = (0.0, 0.0);
        for &i in &idx[k..end] {
            if labels[i] == 1 { gp += weights[i] } else { gn += weights[i] }
        }
        num += gp * (below + 0.5 * gn);
        below += gn;
        k = end;
    }
    // Rounding in the weighted sums can land a hair outside [0, 1].
    Ok((num / (wp * wn)).clamp(0.0, 1.0))
}

/// Threshold-0.5 accuracy and AUROC of `q(y=1 | x_v)`.
pub fn rank_metrics(model: &dyn Conditional, masks: &[SelectionMask], set: &WeightedSamples) -> Result<RankMetrics> {
    rank_metrics_from_probs(&evalx_probs(model, masks, set)?, set)
}

pub fn rank_metrics_from_probs(probs: &[f64], set: &WeightedSamples) -> Result<RankMetrics> {
    if probs.len() != set.len() {
        return Err(Error::Dimension { expected: set.len(), got: probs.len() });
    }
    let accuracy = set.mean(|i| ((probs[i] > 0.5) as u8 == set.ys[i]) as u8 as f64);
    let auroc = auroc(probs, &set.ys, &set.ws)?;
    Ok(RankMetrics { accuracy, auroc })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub h_y: f64,
    pub h_y_given_x: f64,
}

pub fn entropies(dgp: &Dgp) -> Result<Entropies> {
    if let Some(h) = dgp.hybrid() {
        return Ok(Entropies {
            h_y: binary_entropy(h.unobserved_mean),
            h_y_given_x: h.expect(|z| binary_entropy(crate::math::sigmoid(h.gamma * z))),
        });
    }
    Ok(table_entropies(dgp.table()?))
}

pub fn table_entropies(t: &DiscreteDgp) -> Entropies {
    let p1: f64 = t.entries().iter().map(|e| e.p[1]).sum();
    let h_y_given_x = t.entries().iter().map(|e| e.p_x() * binary_entropy(e.p_y1_given_x())).sum();
    Entropies { h_y: binary_entropy(p1), h_y_given_x }
}

/// Exact identities checked by enumeration over a joint table.
pub mod identities {
    use super::*;

    /// Whether `{x : x_{e(x)} = (v,a)}` equals `{x : e(x)=v} ∩ {x : x_v=a}`
    /// for every explanation value on the support.
    pub fn event_identity(table: &DiscreteDgp, explainer: &Explainer) -> Result<bool> {
        let xs: Vec<Vec<Value>> = table.entries().iter().map(|e| e.values()).collect();
        let exps = xs
            .iter()
            .map(|x| explainer.explain(x).and_then(|m| extract_explanation(x, &m)))
            .collect::<Result<Vec<_>>>()?;
        let distinct: BTreeSet<&Explanation> = exps.iter().collect();
        for target in distinct {
            for (k, x) in xs.iter().enumerate() {
                let lhs = exps[k] == *target;
                let rhs = exps[k].mask == target.mask
                    && target.mask.indices().zip(&target.values).all(|(i, a)| x[i] == *a);
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Largest `|q(y | x_{e(x)}=(v,a)) - q(y | x_v=a, E_v=1)|` over
    /// positive-mass explanations. The left side groups by the extracted
    /// explanation; the right side filters by selection and values.
    pub fn conditional_identity_gap(table: &DiscreteDgp, explainer: &Explainer) -> Result<f64> {
        let entries = table.entries();
        let xs: Vec<Vec<Value>> = entries.iter().map(|e| e.values()).collect();
        let masks = xs.iter().map(|x| explainer.explain(x)).collect::<Result<Vec<_>>>()?;
        let mut grouped: BTreeMap<Explanation, [f64; 2]> = BTreeMap::new();
        for (k, e) in entries.iter().enumerate() {
            let s = grouped.entry(extract_explanation(&xs[k], &masks[k])?).or_insert([0.0; 2]);
            s[0] += e.p[0];
            s[1] += e.p[1];
        }
        let mut gap: f64 = 0.0;
        for (exp, g) in &grouped {
            let mut f = [0.0; 2];
            for (k, e) in entries.iter().enumerate() {
                if masks[k] == exp.mask && exp.mask.indices().zip(&exp.values).all(|(i, a)| xs[k][i] == *a) {
                    f[0] += e.p[0];
                    f[1] += e.p[1];
                }
            }
            gap = gap.max((g[1] / (g[0] + g[1]) - f[1] / (f[0] + f[1])).abs());
        }
        Ok(gap)
    }

    /// Largest `|q(y | x_{e(x)}=(v,a)) - q(y | x_v=a)|` over positive-mass
    /// explanations.
    pub fn wysiwyg_gap(oracle: &dyn Conditional, table: &DiscreteDgp, explainer: &Explainer) -> Result<f64> {
        let mut grouped: BTreeMap<Explanation, [f64; 2]> = BTreeMap::new();
        for e in table.entries() {
            let x = e.values();
            let s = grouped.entry(extract_explanation(&x, &explainer.explain(&x)?)?).or_insert([0.0; 2]);
            s[0] += e.p[0];
            s[1] += e.p[1];
        }
        let mut gap: f64 = 0.0;
        for (exp, g) in &grouped {
            let q = oracle.prob_y1(&exp.to_view())?;
            gap = gap.max((g[1] / (g[0] + g[1]) - q).abs());
        }
        Ok(gap)
    }
}

/// Scores reported for one (explainer, seed) pair.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub roar: Option<f64>,
    pub fresh: Option<f64>,
    pub evalx: Option<f64>,
    pub encode_meter: Option<f64>,
    pub stripe_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auroc: Option<f64>,
}

/// The benchmark and CLI output record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub dgp: String,
    pub explainer: String,
    pub scores: ScoreSet,
    pub alpha: f64,
    pub entropy_y: f64,
    pub verdict: Option<EncodingVerdict>,
    pub estimator: String,
    pub seed: Option<u64>,
}
