//! Conditional models `q(y=1 | x_v=a)` over arbitrary subsets.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::learner::{Classifier, LearnerSpec, Row};
use crate::data::WeightedSamples;
use crate::dgp::{build_dgp, format_view, DgpSpec, Dgp, DiscreteDgp, HybridDgp};
use crate::error::{Error, Result};
use crate::mask::{masked_view, SelectionMask};
use crate::math::ln_bernoulli;
use crate::rng::{mix, Rng};
use crate::value::{Schema, Value};

/// Anything that answers `q(y=1 | x_v=a)` for a view with `Value::Mask` at
/// unobserved positions.
pub trait Conditional: Send + Sync {
    fn prob_y1(&self, view: &[Value]) -> Result<f64>;
}

/// Exact marginalization over a joint table, memoized for every subset when
/// the table is small enough.
#[derive(Clone, Debug)]
pub struct TableOracle {
    table: Arc<DiscreteDgp>,
    cache: Option<BTreeMap<Vec<Value>, [f64; 2]>>,
}

/// Largest `2^d * entries` product that is precomputed.
const ORACLE_CACHE_CAP: u128 = 1 << 22;

impl TableOracle {
    pub fn new(table: Arc<DiscreteDgp>) -> Self {
        let d = table.schema().len();
        let work = (1u128 << d.min(100)) * table.entries().len() as u128;
        let cache = (d < 64 && work <= ORACLE_CACHE_CAP).then(|| {
            let mut map: BTreeMap<Vec<Value>, [f64; 2]> = BTreeMap::new();
            for code in 0..(1u64 << d) {
                let m = SelectionMask::from_code(d, code);
                for e in table.entries() {
                    let key = masked_view(&e.values(), &m, Value::Mask);
                    let slot = map.entry(key).or_insert([0.0, 0.0]);
                    slot[0] += e.p[0];
                    slot[1] += e.p[1];
                }
            }
            map
        });
        TableOracle { table, cache }
    }

    pub fn table(&self) -> &Arc<DiscreteDgp> {
        &self.table
    }

    /// `[q(x_v=a, y=0), q(x_v=a, y=1)]`.
    pub fn joint(&self, view: &[Value]) -> [f64; 2] {
        match &self.cache {
            Some(map) => map.get(view).copied().unwrap_or([0.0, 0.0]),
            None => self.table.marginal(view),
        }
    }
}

impl Conditional for TableOracle {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        self.table.schema().validate_view(view)?;
        let m = self.joint(view);
        let z = m[0] + m[1];
        if z <= 0.0 {
            return Err(Error::Conditioning(format_view(view)));
        }
        Ok(m[1] / z)
    }
}

impl Conditional for HybridDgp {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        self.conditional(view)
    }
}

impl Conditional for Dgp {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        self.true_conditional(view)
    }
}

/// How surrogate training draws masks for each sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum MaskDistribution {
    /// Size uniform on `0..=d`, then a uniform subset of that size.
    SizeUniform { draws_per_sample: usize },
    /// Every subset once per sample.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub mask_distribution: MaskDistribution,
    pub learner: LearnerSpec,
    pub seed: u64,
}

impl SurrogateConfig {
    /// Frequency tables on all-categorical schemas, trees otherwise.
    pub fn default_for(schema: &Schema, seed: u64) -> Self {
        let learner = if schema.all_categorical() {
            LearnerSpec::table()
        } else {
            LearnerSpec::Tree { max_depth: 8, min_leaf: 5.0, smoothing: 0.5 }
        };
        SurrogateConfig { mask_distribution: MaskDistribution::SizeUniform { draws_per_sample: 8 }, learner, seed }
    }
}

/// Draws a mask: size uniform on `0..=d`, then a uniform subset.
pub fn draw_size_uniform_mask(d: usize, rng: &mut Rng) -> SelectionMask {
    let k = rng.below(d as u64 + 1) as usize;
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..k {
        let j = i + rng.below((d - i) as u64) as usize;
        idx.swap(i, j);
    }
    SelectionMask::from_indices(d, &idx[..k]).unwrap()
}

/// Classifier over masked views, trained on random subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub dim: usize,
    pub config: SurrogateConfig,
    pub classifier: Classifier,
}

impl SurrogateModel {
    pub fn fit(data: &WeightedSamples, config: &SurrogateConfig) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::data("surrogate needs a nonempty dataset"));
        }
        let d = data.dim();
        let mut rng = Rng::new(config.seed, 0x7375);
        let mut rows = Vec::new();
        for i in 0..data.len() {
            let masks: Vec<SelectionMask> = match config.mask_distribution {
                MaskDistribution::Exhaustive => {
                    if d >= 24 {
                        return Err(Error::config("exhaustive masks need fewer than 24 features"));
                    }
                    (0..(1u64 << d)).map(|c| SelectionMask::from_code(d, c)).collect()
                }
                MaskDistribution::SizeUniform { draws_per_sample } => {
                    (0..draws_per_sample).map(|_| draw_size_uniform_mask(d, &mut rng)).collect()
                }
            };
            for m in masks {
                rows.push(Row {
                    x: masked_view(&data.xs[i], &m, Value::Mask),
                    class: data.ys[i] as usize,
                    weight: data.count(i),
                });
            }
        }
        let classifier = Classifier::fit(&config.learner, &rows, 2)?;
        Ok(SurrogateModel { dim: d, config: config.clone(), classifier })
    }

    /// Average `ln q(y | x_S)` over `masks_per_sample` random subsets per
    /// sample of a held-out set.
    pub fn validation_loglik(&self, data: &WeightedSamples, masks_per_sample: usize, seed: u64) -> Result<f64> {
        let mut rng = Rng::new(seed, 0x766c);
        let mut acc = 0.0;
        for i in 0..data.len() {
            let mut s = 0.0;
            for _ in 0..masks_per_sample {
                let m = draw_size_uniform_mask(self.dim, &mut rng);
                let p = self.prob_y1(&masked_view(&data.xs[i], &m, Value::Mask))?;
                s += ln_bernoulli(p, data.ys[i]);
            }
            acc += data.ws[i] * s / masks_per_sample as f64;
        }
        Ok(acc)
    }
}

impl Conditional for SurrogateModel {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        if view.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: view.len() });
        }
        Ok(self.classifier.predict(view).probs[1])
    }
}

/// Monte Carlo conditional with a fixed per-query seed, so repeated queries
/// agree.
#[derive(Clone, Debug)]
pub struct MonteCarloModel {
    pub dgp: Dgp,
    pub n: usize,
    pub seed: u64,
}

impl Conditional for MonteCarloModel {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        let mut h = self.seed;
        for v in view {
            h = mix(h, match v {
                Value::Cat(c) => *c as u64,
                Value::Real(r) => r.to_bits(),
                Value::Pad => u64::MAX - 1,
                Value::Mask => u64::MAX,
            });
        }
        self.dgp.true_conditional_mc(view, self.n, h).map(|e| e.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    ExactOracle,
    MonteCarlo,
    SubsetSurrogate,
}

/// A fitted conditional model of any backend.
#[derive(Clone, Debug)]
pub enum ConditionalModel {
    Table(TableOracle),
    Hybrid(HybridDgp),
    MonteCarlo(MonteCarloModel),
    Surrogate(SurrogateModel),
}

/// Serializable form of a [`ConditionalModel`]. Oracles store the DGP
/// configuration and are rebuilt on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum ModelDocument {
    ExactOracle { dgp: DgpSpec },
    MonteCarlo { dgp: DgpSpec, n: usize, seed: u64 },
    SubsetSurrogate { model: SurrogateModel },
}

/// Default Monte Carlo resample count.
pub const MC_RESAMPLES: usize = 500;

impl ConditionalModel {
    pub fn exact(dgp: &Dgp) -> Result<Self> {
        match dgp.hybrid() {
            Some(h) => Ok(ConditionalModel::Hybrid(h.clone())),
            None => Ok(ConditionalModel::Table(TableOracle::new(dgp.table()?.clone()))),
        }
    }

    pub fn from_table(table: Arc<DiscreteDgp>) -> Self {
        ConditionalModel::Table(TableOracle::new(table))
    }

    pub fn monte_carlo(dgp: &Dgp, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("Monte Carlo needs at least one resample"));
        }
        Ok(ConditionalModel::MonteCarlo(MonteCarloModel { dgp: dgp.clone(), n, seed }))
    }

    pub fn surrogate(data: &WeightedSamples, config: &SurrogateConfig) -> Result<Self> {
        SurrogateModel::fit(data, config).map(ConditionalModel::Surrogate)
    }

    pub fn backend(&self) -> Backend {
        match self {
            ConditionalModel::Table(_) | ConditionalModel::Hybrid(_) => Backend::ExactOracle,
            ConditionalModel::MonteCarlo(_) => Backend::MonteCarlo,
            ConditionalModel::Surrogate(_) => Backend::SubsetSurrogate,
        }
    }

    /// Serializable form; `dgp` names the oracle's source.
    pub fn to_document(&self, dgp: Option<&DgpSpec>) -> Result<ModelDocument> {
        let need = || dgp.cloned().ok_or_else(|| Error::config("oracle documents need the DGP configuration"));
        Ok(match self {
            ConditionalModel::Table(_) | ConditionalModel::Hybrid(_) => ModelDocument::ExactOracle { dgp: need()? },
            ConditionalModel::MonteCarlo(m) => ModelDocument::MonteCarlo { dgp: need()?, n: m.n, seed: m.seed },
            ConditionalModel::Surrogate(m) => ModelDocument::SubsetSurrogate { model: m.clone() },
        })
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        match doc {
            ModelDocument::ExactOracle { dgp } => ConditionalModel::exact(&build_dgp(dgp)?),
            ModelDocument::MonteCarlo { dgp, n, seed } => ConditionalModel::monte_carlo(&build_dgp(dgp)?, *n, *seed),
            ModelDocument::SubsetSurrogate { model } => Ok(ConditionalModel::Surrogate(model.clone())),
        }
    }
}

impl Conditional for ConditionalModel {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        match self {
            ConditionalModel::Table(t) => t.prob_y1(view),
            ConditionalModel::Hybrid(h) => h.prob_y1(view),
            ConditionalModel::MonteCarlo(m) => m.prob_y1(view),
            ConditionalModel::Surrogate(s) => s.prob_y1(view),
        }
    }
}

impl<T: Conditional + ?Sized> Conditional for Arc<T> {
    fn prob_y1(&self, view: &[Value]) -> Result<f64> {
        (**self).prob_y1(view)
    }
}
